//! Exact decision procedures for words over a contracting automaton.
//!
//! Everything here rests on one fact: taking first-level sections of a freely
//! reduced word never increases total length, so the set of words reachable
//! from a given one by iterated sections is finite. Triviality, equality, the
//! nucleus, orbit counts, activity parities and order probes are all driven
//! off that closure.

use crate::automaton::{act, wreath_decompose_mode, AutomatonSpec, Vertex};
use crate::bits::EventuallyPeriodicBits;
use crate::word::{Gen, GroupWord, ReduceMode, StateId};
use crate::Error;
use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

/// Whether the word represents the identity automorphism.
///
/// A word is trivial iff no member of its section closure moves the first
/// level: an active member is a section witnessing nontriviality, and if all
/// members are inactive then every level is fixed.
pub fn is_trivial(w: &GroupWord, spec: &AutomatonSpec) -> bool {
    is_trivial_mode(w, spec, spec.mode())
}

pub(crate) fn is_trivial_mode(w: &GroupWord, spec: &AutomatonSpec, mode: ReduceMode) -> bool {
    if w.is_empty() {
        return true;
    }
    let mut seen: HashSet<GroupWord> = HashSet::new();
    let mut queue: VecDeque<GroupWord> = VecDeque::new();
    seen.insert(w.clone());
    queue.push_back(w.clone());
    while let Some(cur) = queue.pop_front() {
        let p = wreath_decompose_mode(&cur, spec, mode);
        if p.swap {
            return false;
        }
        for s in p.sections {
            if !s.is_empty() && !seen.contains(&s) {
                seen.insert(s.clone());
                queue.push_back(s);
            }
        }
    }
    true
}

pub fn equal(a: &GroupWord, b: &GroupWord, spec: &AutomatonSpec) -> bool {
    let mode = spec.mode();
    is_trivial_mode(&a.concat(&b.inverse(mode), mode), spec, mode)
}

/// Verifies that every state squares to the identity, deciding in sign-aware
/// arithmetic so the answer does not presuppose what it checks.
pub fn involution_check(spec: &AutomatonSpec) -> bool {
    spec.state_ids().all(|id| {
        let g = GroupWord::from_gens([Gen::plain(id), Gen::plain(id)], ReduceMode::Signed);
        is_trivial_mode(&g, spec, ReduceMode::Signed)
    })
}

/// Hash of the permutation the word induces on one level. Distinct hashes
/// prove distinct elements; equal hashes decide nothing.
pub fn action_fingerprint(w: &GroupWord, spec: &AutomatonSpec, depth: usize) -> u64 {
    let mut h = DefaultHasher::new();
    for i in 0..1u64 << depth {
        act(w, &Vertex::from_index(depth, i), spec).to_index().hash(&mut h);
    }
    h.finish()
}

const FINGERPRINT_DEPTH: usize = 5;

/// Shortlex-least word representing the same automorphism, found by
/// enumerating reduced words of at most the input's length.
pub fn canonical_form(w: &GroupWord, spec: &AutomatonSpec) -> GroupWord {
    let mode = spec.mode();
    if is_trivial_mode(w, spec, mode) {
        return GroupWord::identity();
    }
    let mut alphabet: Vec<Gen> = Vec::new();
    for id in spec.state_ids() {
        alphabet.push(Gen::plain(id));
        if mode == ReduceMode::Signed {
            alphabet.push(Gen::plain(id).inverted());
        }
    }
    let target_fp = action_fingerprint(w, spec, FINGERPRINT_DEPTH);
    // Words of each length in lex order; extending in alphabet order keeps it.
    let mut level: Vec<Vec<Gen>> = vec![Vec::new()];
    for _ in 1..=w.len() {
        let mut next = Vec::new();
        for stem in &level {
            for &g in &alphabet {
                if let Some(&last) = stem.last() {
                    if mode.cancels(last, g) {
                        continue;
                    }
                }
                let mut cand = stem.clone();
                cand.push(g);
                next.push(cand);
            }
        }
        for cand in &next {
            let cw = GroupWord::from_gens(cand.iter().copied(), mode);
            if action_fingerprint(&cw, spec, FINGERPRINT_DEPTH) == target_fp
                && equal(&cw, w, spec)
            {
                return cw;
            }
        }
        level = next;
    }
    w.clone()
}

/// A set of automorphisms stored as words, deduplicated by the action they
/// induce rather than by spelling.
struct SemanticSet<'a> {
    spec: &'a AutomatonSpec,
    members: Vec<GroupWord>,
    by_fingerprint: HashMap<u64, Vec<usize>>,
}

impl<'a> SemanticSet<'a> {
    fn new(spec: &'a AutomatonSpec) -> SemanticSet<'a> {
        SemanticSet { spec, members: Vec::new(), by_fingerprint: HashMap::new() }
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    fn contains(&self, w: &GroupWord) -> bool {
        let fp = action_fingerprint(w, self.spec, FINGERPRINT_DEPTH);
        self.by_fingerprint
            .get(&fp)
            .is_some_and(|ids| ids.iter().any(|&i| equal(&self.members[i], w, self.spec)))
    }

    /// Inserts unless an equal element is present; reports whether it was new.
    fn insert(&mut self, w: GroupWord) -> bool {
        if self.contains(&w) {
            return false;
        }
        let fp = action_fingerprint(&w, self.spec, FINGERPRINT_DEPTH);
        self.by_fingerprint.entry(fp).or_default().push(self.members.len());
        self.members.push(w);
        true
    }
}

/// Caps for the nucleus search; exceeding either aborts with
/// [`Error::PossiblyNonContracting`].
#[derive(Clone, Copy, Debug)]
pub struct NucleusOptions {
    pub max_rounds: usize,
    pub max_elements: usize,
}

impl Default for NucleusOptions {
    fn default() -> Self {
        NucleusOptions { max_rounds: 32, max_elements: 4096 }
    }
}

/// The nucleus: the minimal section-closed set containing the states and
/// their inverses such that products of two members have all sufficiently
/// deep sections back in the set. Members are canonical shortlex words in
/// shortlex order; the identity comes first.
pub struct Nucleus {
    members: Vec<GroupWord>,
}

impl Nucleus {
    pub fn members(&self) -> &[GroupWord] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &GroupWord, spec: &AutomatonSpec) -> bool {
        self.members.iter().any(|m| equal(m, w, spec))
    }
}

/// Section-closure graph of `w`, truncated at known nucleus members: the
/// elements to adjoin are exactly those reachable from a cycle, since they
/// and only they recur as sections at unboundedly deep levels.
fn persistent_sections(
    w: &GroupWord,
    spec: &AutomatonSpec,
    mode: ReduceMode,
    known: &SemanticSet,
) -> Vec<GroupWord> {
    let mut nodes: Vec<GroupWord> = Vec::new();
    let mut index: HashMap<GroupWord, usize> = HashMap::new();
    let mut children: Vec<Option<[usize; 2]>> = Vec::new();

    let mut queue = VecDeque::new();
    if known.contains(w) {
        return Vec::new();
    }
    index.insert(w.clone(), 0);
    nodes.push(w.clone());
    children.push(None);
    queue.push_back(0usize);
    while let Some(i) = queue.pop_front() {
        let p = wreath_decompose_mode(&nodes[i], spec, mode);
        let mut child_ids = [usize::MAX; 2];
        for (x, s) in p.sections.into_iter().enumerate() {
            if known.contains(&s) {
                continue;
            }
            let id = *index.entry(s.clone()).or_insert_with(|| {
                nodes.push(s);
                children.push(None);
                queue.push_back(nodes.len() - 1);
                nodes.len() - 1
            });
            child_ids[x] = id;
        }
        children[i] = Some(child_ids);
    }

    // A node is on a cycle iff it reaches itself through the truncated edges.
    let edges = |i: usize| children[i].unwrap().into_iter().filter(|&c| c != usize::MAX);
    let n = nodes.len();
    let mut persistent = vec![false; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = edges(i).collect();
        let mut cyclic = false;
        while let Some(j) = stack.pop() {
            if j == i {
                cyclic = true;
                break;
            }
            if !seen[j] {
                seen[j] = true;
                stack.extend(edges(j));
            }
        }
        if cyclic {
            persistent[i] = true;
        }
    }
    // Everything reachable from a cycle persists too.
    loop {
        let mut changed = false;
        for i in 0..n {
            if persistent[i] {
                for j in edges(i) {
                    if !persistent[j] {
                        persistent[j] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    nodes
        .into_iter()
        .enumerate()
        .filter_map(|(i, w)| persistent[i].then_some(w))
        .collect()
}

/// Computes the nucleus by closing the states under persistent sections of
/// pairwise products.
pub fn nucleus_closure(
    spec: &AutomatonSpec,
    options: NucleusOptions,
) -> Result<Nucleus, Error> {
    let mode = spec.mode();
    let mut set = SemanticSet::new(spec);
    set.insert(GroupWord::identity());
    for id in spec.state_ids() {
        set.insert(GroupWord::single(Gen::plain(id), mode));
        set.insert(GroupWord::single(Gen::plain(id).inverted(), mode));
    }
    for round in 0..options.max_rounds {
        let snapshot = set.members.clone();
        let mut grew = false;
        for g in &snapshot {
            for h in &snapshot {
                let prod = g.concat(h, mode);
                for p in persistent_sections(&prod, spec, mode, &set) {
                    if set.insert(p) {
                        grew = true;
                    }
                }
                if set.len() > options.max_elements {
                    return Err(Error::PossiblyNonContracting {
                        rounds: round + 1,
                        size: set.len(),
                    });
                }
            }
        }
        if !grew {
            let mut members: Vec<GroupWord> =
                set.members.iter().map(|m| canonical_form(m, spec)).collect();
            members.sort_by(|a, b| a.shortlex_cmp(b));
            return Ok(Nucleus { members });
        }
    }
    Err(Error::PossiblyNonContracting { rounds: options.max_rounds, size: set.len() })
}

/// Orbits of the group generated by `gens` on the vertices of one level.
/// Each orbit lists vertex indices in increasing order; orbits are sorted by
/// their least vertex.
pub struct LevelOrbits {
    pub depth: usize,
    pub orbits: Vec<Vec<u64>>,
}

impl LevelOrbits {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits.len() == 1
    }
}

pub fn orbits_on_level(gens: &[GroupWord], depth: usize, spec: &AutomatonSpec) -> LevelOrbits {
    let mode = spec.mode();
    let mut movers: Vec<GroupWord> = Vec::new();
    for g in gens {
        movers.push(g.clone());
        movers.push(g.inverse(mode));
    }
    let size = 1u64 << depth;
    let mut orbit_of: Vec<Option<usize>> = vec![None; size as usize];
    let mut orbits: Vec<Vec<u64>> = Vec::new();
    for start in 0..size {
        if orbit_of[start as usize].is_some() {
            continue;
        }
        let id = orbits.len();
        let mut component = vec![start];
        orbit_of[start as usize] = Some(id);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let vertex = Vertex::from_index(depth, v);
            for m in &movers {
                let img = act(m, &vertex, spec).to_index();
                if orbit_of[img as usize].is_none() {
                    orbit_of[img as usize] = Some(id);
                    component.push(img);
                    queue.push_back(img);
                }
            }
        }
        component.sort_unstable();
        orbits.push(component);
    }
    LevelOrbits { depth, orbits }
}

/// Activity parity sequence of a state: bit `m` is the parity of the number
/// of active sections at depth `m`, equivalently the parity of the
/// permutation induced on level `m + 1`.
///
/// Computed by iterating the linear recurrence `V[s] <- V[s|_0] xor V[s|_1]`
/// on the vector of all state parities until the vector repeats.
pub fn tau_state(spec: &AutomatonSpec, id: StateId) -> EventuallyPeriodicBits {
    let n = spec.state_count();
    let step = |v: &[bool]| -> Vec<bool> {
        spec.state_ids()
            .map(|s| {
                [crate::automaton::Letter::ZERO, crate::automaton::Letter::ONE]
                    .iter()
                    .map(|&x| spec.state_section(s, x).map_or(false, |c| v[c.index()]))
                    .fold(false, |a, b| a ^ b)
            })
            .collect()
    };
    let mut v: Vec<bool> = spec.state_ids().map(|s| spec.state_active(s)).collect();
    let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut bits: Vec<bool> = Vec::new();
    loop {
        if let Some(&at) = seen.get(&v) {
            let period = bits.split_off(at);
            return EventuallyPeriodicBits::new(bits, period);
        }
        seen.insert(v.clone(), bits.len());
        bits.push(v[id.index()]);
        v = step(&v);
        assert!(bits.len() <= (1 << 20), "activity recurrence failed to cycle on {n} states");
    }
}

/// Activity parity sequence of a word. Parities add over products and are
/// blind to inversion, so this is the xor of the letters' state sequences.
pub fn tau_word(w: &GroupWord, spec: &AutomatonSpec) -> EventuallyPeriodicBits {
    let mut acc = EventuallyPeriodicBits::zero();
    let mut cache: HashMap<StateId, EventuallyPeriodicBits> = HashMap::new();
    for g in w.gens() {
        let t = cache.entry(g.state).or_insert_with(|| tau_state(spec, g.state));
        acc = acc.xor(t);
    }
    acc
}

/// Whether the cyclic group generated by the word is transitive on every
/// level, which holds iff every activity parity is odd.
pub fn is_level_transitive(w: &GroupWord, spec: &AutomatonSpec) -> bool {
    tau_word(w, spec).is_all_ones()
}

/// Per-state activity parity sequences, in declaration order.
pub fn tau_table(spec: &AutomatonSpec) -> Vec<(String, EventuallyPeriodicBits)> {
    spec.state_ids().map(|id| (spec.state_name(id).to_string(), tau_state(spec, id))).collect()
}

/// Exponent sum of each state across the word, signs counted.
pub fn exponent_sums(w: &GroupWord, spec: &AutomatonSpec) -> Vec<i64> {
    let mut sums = vec![0i64; spec.state_count()];
    for g in w.gens() {
        sums[g.state.index()] += if g.inverse { -1 } else { 1 };
    }
    sums
}

/// Facts about the whole group that license order shortcuts. Both default to
/// off; constructions that prove them switch them on.
#[derive(Clone, Copy, Default, Debug)]
pub struct GroupTraits {
    /// The map sending each state to a free basis vector extends to an
    /// isomorphism from the abelianization onto a free abelian group.
    pub free_abelianization: bool,
    pub torsion_free: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct OrderProbeOptions {
    /// Upper bound of the exhaustive scan over small exponents.
    pub small_scan: u64,
    /// Largest `j` for which `w^(2^j)` is tested beyond the scan.
    pub max_exp: u32,
    /// Abort threshold on reduced word length during the power tests.
    pub max_word_len: usize,
}

impl Default for OrderProbeOptions {
    fn default() -> Self {
        OrderProbeOptions { small_scan: 64, max_exp: 20, max_word_len: 1 << 16 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InfiniteWitness {
    /// The element is transitive on every level, hence of infinite order.
    LevelTransitiveTau,
    /// Nonzero image in a free abelianization.
    NonzeroAbelianization,
    /// Nontrivial element of a torsion-free group.
    TorsionFreeNontrivial,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ElementOrder {
    Finite(u64),
    Infinite(InfiniteWitness),
    Unknown { tested_to: u64 },
}

/// Determines the order of the element when a witness or a bounded search
/// settles it.
///
/// Exponents `2..=small_scan` are tested outright, then powers `w^(2^j)`.
/// A first success among the latter pins the order exactly: earlier failures
/// rule out every proper divisor that is not a smaller two-power.
pub fn order_probe(
    w: &GroupWord,
    spec: &AutomatonSpec,
    traits: GroupTraits,
    options: OrderProbeOptions,
) -> ElementOrder {
    let mode = spec.mode();
    if is_trivial(w, spec) {
        return ElementOrder::Finite(1);
    }
    if is_level_transitive(w, spec) {
        return ElementOrder::Infinite(InfiniteWitness::LevelTransitiveTau);
    }
    if traits.free_abelianization && exponent_sums(w, spec).iter().any(|&s| s != 0) {
        return ElementOrder::Infinite(InfiniteWitness::NonzeroAbelianization);
    }
    if traits.torsion_free {
        return ElementOrder::Infinite(InfiniteWitness::TorsionFreeNontrivial);
    }
    let mut power = w.clone();
    for m in 2..=options.small_scan {
        power = power.concat(w, mode);
        if is_trivial(&power, spec) {
            return ElementOrder::Finite(m);
        }
    }
    // Any order beyond the scan found this way is a power of two, so square.
    let mut sq = w.clone();
    let mut exp = 0u32;
    while exp < options.max_exp {
        sq = sq.concat(&sq, mode);
        exp += 1;
        if 1u64 << exp <= options.small_scan {
            continue;
        }
        if sq.len() > options.max_word_len {
            return ElementOrder::Unknown { tested_to: 1 << (exp - 1) };
        }
        if is_trivial(&sq, spec) {
            return ElementOrder::Finite(1 << exp);
        }
    }
    ElementOrder::Unknown { tested_to: 1 << options.max_exp }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{activity, AutomatonSpec, StateDecl};

    fn basilica() -> AutomatonSpec {
        AutomatonSpec::new(
            vec![
                StateDecl::new("a1", None, Some("a2"), true),
                StateDecl::new("a2", Some("a1"), None, false),
            ],
            false,
        )
        .unwrap()
    }

    fn adding_machine() -> AutomatonSpec {
        AutomatonSpec::new(vec![StateDecl::new("a1", None, Some("a1"), true)], false).unwrap()
    }

    fn dihedral() -> AutomatonSpec {
        AutomatonSpec::new(
            vec![
                StateDecl::new("b1", None, None, true),
                StateDecl::new("a1", Some("b1"), Some("a1"), false),
            ],
            true,
        )
        .unwrap()
    }

    fn w(spec: &AutomatonSpec, text: &[(&str, i64)]) -> GroupWord {
        let mut out = GroupWord::identity();
        for &(name, k) in text {
            out = out.concat(&spec.generator_word(name).unwrap().pow(k, spec.mode()), spec.mode());
        }
        out
    }

    #[test]
    fn triviality_of_defining_relations() {
        let spec = basilica();
        let a1 = w(&spec, &[("a1", 1)]);
        let a2 = w(&spec, &[("a2", 1)]);
        let conj = a2.conjugated(&a1, spec.mode());
        assert!(is_trivial(&GroupWord::commutator(&a2, &conj, spec.mode()), &spec));
        assert!(!is_trivial(&GroupWord::commutator(&a1, &a2, spec.mode()), &spec));
        assert!(!is_trivial(&w(&spec, &[("a1", 2)]), &spec));
    }

    #[test]
    fn equal_sees_through_spelling() {
        let spec = basilica();
        let a1 = w(&spec, &[("a1", 1)]);
        let a2 = w(&spec, &[("a2", 1)]);
        let conj = a2.conjugated(&a1, spec.mode());
        let lhs = a2.concat(&conj, spec.mode());
        let rhs = conj.concat(&a2, spec.mode());
        assert!(equal(&lhs, &rhs, &spec));
        assert!(!equal(&a1, &a2, &spec));
    }

    #[test]
    fn adding_machine_powers_are_nontrivial() {
        let spec = adding_machine();
        let a1 = w(&spec, &[("a1", 1)]);
        for k in 1..=8 {
            assert!(!is_trivial(&a1.pow(k, spec.mode()), &spec));
        }
        assert!(is_trivial(&a1.concat(&a1.inverse(spec.mode()), spec.mode()), &spec));
    }

    #[test]
    fn involution_check_is_sign_aware() {
        assert!(involution_check(&dihedral()));
        assert!(!involution_check(&basilica()));
    }

    #[test]
    fn canonical_form_minimizes() {
        let spec = basilica();
        let a1 = w(&spec, &[("a1", 1)]);
        let a2 = w(&spec, &[("a2", 1)]);
        let padded = a2.concat(&a1, spec.mode()).concat(&a1.inverse(spec.mode()), spec.mode());
        assert_eq!(canonical_form(&padded, &spec), a2);
        let conj = a2.conjugated(&a1, spec.mode());
        assert_eq!(
            canonical_form(&GroupWord::commutator(&a2, &conj, spec.mode()), &spec),
            GroupWord::identity()
        );
    }

    #[test]
    fn basilica_nucleus_has_seven_canonical_members() {
        let spec = basilica();
        let nucleus = nucleus_closure(&spec, NucleusOptions::default()).unwrap();
        let mode = spec.mode();
        let mut expected = vec![
            GroupWord::identity(),
            w(&spec, &[("a1", 1)]),
            w(&spec, &[("a1", -1)]),
            w(&spec, &[("a2", 1)]),
            w(&spec, &[("a2", -1)]),
            w(&spec, &[("a1", 1), ("a2", -1)]),
            w(&spec, &[("a2", 1), ("a1", -1)]),
        ];
        expected.sort_by(|a, b| a.shortlex_cmp(b));
        assert_eq!(nucleus.members(), expected.as_slice());
        let _ = mode;
    }

    #[test]
    fn adding_machine_nucleus_is_three_elements() {
        let spec = adding_machine();
        let nucleus = nucleus_closure(&spec, NucleusOptions::default()).unwrap();
        assert_eq!(nucleus.len(), 3);
        assert!(nucleus.contains(&GroupWord::identity(), &spec));
        assert!(nucleus.contains(&w(&spec, &[("a1", 1)]), &spec));
        assert!(nucleus.contains(&w(&spec, &[("a1", -1)]), &spec));
    }

    #[test]
    fn nucleus_caps_abort_instead_of_running_away() {
        let spec = basilica();
        let res = nucleus_closure(&spec, NucleusOptions { max_rounds: 32, max_elements: 5 });
        assert!(matches!(res, Err(Error::PossiblyNonContracting { .. })));
        let res = nucleus_closure(&spec, NucleusOptions { max_rounds: 0, max_elements: 4096 });
        assert!(matches!(res, Err(Error::PossiblyNonContracting { rounds: 0, .. })));
    }

    #[test]
    fn full_mirror_state_is_an_involution_with_tiny_nucleus() {
        // alpha = <<alpha, alpha>> s flips every letter of every vertex, so
        // it squares to the identity even though its activity is unbounded.
        let spec = AutomatonSpec::new(
            vec![StateDecl::new("alpha", Some("alpha"), Some("alpha"), true)],
            false,
        )
        .unwrap();
        assert!(involution_check(&spec));
        let nucleus = nucleus_closure(&spec, NucleusOptions::default()).unwrap();
        assert_eq!(nucleus.len(), 2);
    }

    #[test]
    fn orbit_counts_on_small_levels() {
        let spec = dihedral();
        let both = [w(&spec, &[("b1", 1)]), w(&spec, &[("a1", 1)])];
        for depth in 1..=6 {
            assert!(orbits_on_level(&both, depth, &spec).is_transitive());
        }
        let only_a1 = [w(&spec, &[("a1", 1)])];
        let orbits = orbits_on_level(&only_a1, 2, &spec);
        assert_eq!(orbits.orbits, vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn tau_sequences_of_the_sample_groups() {
        let spec = basilica();
        assert_eq!(tau_word(&w(&spec, &[("a1", 1)]), &spec).to_string(), "(10)^inf");
        assert_eq!(tau_word(&w(&spec, &[("a2", 1)]), &spec).to_string(), "(01)^inf");
        let spec = dihedral();
        assert_eq!(tau_word(&w(&spec, &[("b1", 1)]), &spec).to_string(), "1(0)^inf");
        assert_eq!(tau_word(&w(&spec, &[("a1", 1)]), &spec).to_string(), "0(1)^inf");
        let prod = w(&spec, &[("b1", 1), ("a1", 1)]);
        assert!(is_level_transitive(&prod, &spec));
    }

    #[test]
    fn tau_matches_brute_force_parity() {
        let spec = basilica();
        let word = w(&spec, &[("a1", 1), ("a2", -1), ("a1", 1)]);
        let tau = tau_word(&word, &spec);
        for m in 1..=7usize {
            let mut parity = false;
            for i in 0..1u64 << (m - 1) {
                let v = Vertex::from_index(m - 1, i);
                let section = crate::automaton::restrict(&word, &v, &spec);
                parity ^= activity(&section, &spec);
            }
            assert_eq!(tau.bit(m - 1), parity, "level {m}");
        }
    }

    #[test]
    fn order_probe_finds_witnesses_and_small_orders() {
        let spec = adding_machine();
        let a1 = w(&spec, &[("a1", 1)]);
        assert_eq!(
            order_probe(&a1, &spec, GroupTraits::default(), OrderProbeOptions::default()),
            ElementOrder::Infinite(InfiniteWitness::LevelTransitiveTau)
        );

        let spec = dihedral();
        let b1 = w(&spec, &[("b1", 1)]);
        assert_eq!(
            order_probe(&b1, &spec, GroupTraits::default(), OrderProbeOptions::default()),
            ElementOrder::Finite(2)
        );
        assert!(matches!(
            order_probe(
                &w(&spec, &[("b1", 1), ("a1", 1)]),
                &spec,
                GroupTraits::default(),
                OrderProbeOptions::default()
            ),
            ElementOrder::Infinite(InfiniteWitness::LevelTransitiveTau)
        ));

        let spec = basilica();
        let free = GroupTraits { free_abelianization: true, torsion_free: true };
        let a1 = w(&spec, &[("a1", 1)]);
        let a2 = w(&spec, &[("a2", 1)]);
        // a1 a2^-1 is transitive on every level, so the parity witness
        // preempts the abelianization one; a1^2 has even parities throughout.
        assert_eq!(
            order_probe(&w(&spec, &[("a1", 1), ("a2", -1)]), &spec, free, OrderProbeOptions::default()),
            ElementOrder::Infinite(InfiniteWitness::LevelTransitiveTau)
        );
        assert_eq!(
            order_probe(&w(&spec, &[("a1", 2)]), &spec, free, OrderProbeOptions::default()),
            ElementOrder::Infinite(InfiniteWitness::NonzeroAbelianization)
        );
        let comm = GroupWord::commutator(&a1, &a2, spec.mode());
        assert_eq!(
            order_probe(&comm, &spec, free, OrderProbeOptions::default()),
            ElementOrder::Infinite(InfiniteWitness::TorsionFreeNontrivial)
        );
        let limited = OrderProbeOptions { small_scan: 8, max_exp: 6, max_word_len: 1 << 12 };
        assert!(matches!(
            order_probe(&comm, &spec, GroupTraits::default(), limited),
            ElementOrder::Unknown { .. }
        ));
    }

    #[test]
    fn identity_order_is_one() {
        let spec = dihedral();
        assert_eq!(
            order_probe(
                &GroupWord::identity(),
                &spec,
                GroupTraits::default(),
                OrderProbeOptions::default()
            ),
            ElementOrder::Finite(1)
        );
    }
}
