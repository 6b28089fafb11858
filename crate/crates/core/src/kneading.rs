//! The two kneading families of self-similar groups.
//!
//! `KvGroup` is built from a periodic kneading word `v = x_1…x_{n−1}` (possibly
//! empty) and acts with n signed generators; `KwvGroup` is built from a
//! pre-periodic pair `(w, v) = (y_1…y_k, x_1…x_n)` with `last(w) ≠ last(v)` and
//! acts with k + n involutions. Generator indexing is 1-based to match the
//! kneading subscripts, and wraparound obeys `b_{k+1} = a_{n+1} = a_1`.

use std::fmt;

use crate::automaton::{wreath_decompose, AutomatonSpec, Letter, StateDecl};
use crate::bits::EventuallyPeriodicBits;
use crate::error::Error;
use crate::solver::{equal, exponent_sums, is_trivial, GroupTraits};
use crate::word::{Gen, GroupWord, ReduceMode, StateId};

/// A finite word over the alphabet {0, 1}.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitWord(Vec<Letter>);

impl BitWord {
    pub fn empty() -> BitWord {
        BitWord(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> BitWord {
        BitWord(letters)
    }

    pub fn parse(s: &str) -> Result<BitWord, Error> {
        s.chars().map(Letter::from_char).collect::<Result<Vec<_>, _>>().map(BitWord)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The i-th letter, 1-based to match the kneading subscripts.
    pub fn at(&self, i: usize) -> Letter {
        self.0[i - 1]
    }

    /// The word with every letter flipped.
    pub fn mirror(&self) -> BitWord {
        BitWord(self.0.iter().map(|l| l.flip()).collect())
    }

    pub fn primitive_root(&self) -> &[Letter] {
        crate::automaton::primitive_root(&self.0)
    }

    /// Whether the word is not a proper power of a shorter word.
    pub fn is_primitive(&self) -> bool {
        self.primitive_root().len() == self.0.len()
    }

    /// Largest d such that the word is a d-th power.
    pub fn power_degree(&self) -> usize {
        if self.0.is_empty() {
            1
        } else {
            self.0.len() / self.primitive_root().len()
        }
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// Kneading data: either a purely periodic word or a pre-periodic pair.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum KneadingData {
    Periodic { v: BitWord },
    Preperiodic { w: BitWord, v: BitWord },
}

impl KneadingData {
    pub fn group(&self) -> Result<KneadingGroup, Error> {
        match self {
            KneadingData::Periodic { v } => Ok(KneadingGroup::Kv(KvGroup::new(v.clone()))),
            KneadingData::Preperiodic { w, v } => {
                Ok(KneadingGroup::Kwv(KwvGroup::new(w.clone(), v.clone())?))
            }
        }
    }
}

/// How the period completes: the letter x for which v·x is a maximal power
/// u^d, together with that root and the sign the nucleus cross terms carry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PeriodParameter {
    pub d: usize,
    pub root: BitWord,
    pub x: Letter,
    /// +1 when x = 0, −1 when x = 1.
    pub epsilon: i64,
}

fn kv_decls(v: &BitWord, prefix: &str, alt_first: bool) -> Vec<StateDecl> {
    let n = v.len() + 1;
    let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
    let last = names[n - 1].as_str();
    let mut decls = Vec::with_capacity(n);
    // The active generator reads the section on one side and swaps; the two
    // conventions differ only in which side carries it.
    decls.push(if alt_first {
        StateDecl::new(&names[0], Some(last), None, true)
    } else {
        StateDecl::new(&names[0], None, Some(last), true)
    });
    for i in 1..n {
        let prev = names[i - 1].as_str();
        decls.push(if v.at(i) == Letter::ZERO {
            StateDecl::new(&names[i], Some(prev), None, false)
        } else {
            StateDecl::new(&names[i], None, Some(prev), false)
        });
    }
    decls
}

fn kwv_decls(w: &BitWord, v: &BitWord, b_prefix: &str, a_prefix: &str) -> Vec<StateDecl> {
    let k = w.len();
    let n = v.len();
    let b_names: Vec<String> = (1..=k).map(|j| format!("{b_prefix}{j}")).collect();
    let a_names: Vec<String> = (1..=n).map(|i| format!("{a_prefix}{i}")).collect();
    let mut decls = Vec::with_capacity(k + n);
    decls.push(StateDecl::new(&b_names[0], None, None, true));
    for j in 1..k {
        let prev = b_names[j - 1].as_str();
        decls.push(if w.at(j) == Letter::ZERO {
            StateDecl::new(&b_names[j], Some(prev), None, false)
        } else {
            StateDecl::new(&b_names[j], None, Some(prev), false)
        });
    }
    let (bk, an) = (b_names[k - 1].as_str(), a_names[n - 1].as_str());
    // last(w) ≠ last(v), so exactly one of the two arrangements applies.
    decls.push(if w.at(k) == Letter::ZERO {
        StateDecl::new(&a_names[0], Some(bk), Some(an), false)
    } else {
        StateDecl::new(&a_names[0], Some(an), Some(bk), false)
    });
    for i in 1..n {
        let prev = a_names[i - 1].as_str();
        decls.push(if v.at(i) == Letter::ZERO {
            StateDecl::new(&a_names[i], Some(prev), None, false)
        } else {
            StateDecl::new(&a_names[i], None, Some(prev), false)
        });
    }
    decls
}

/// The group attached to a periodic kneading word.
///
/// Generators: `a_1 = ⟨1, a_n⟩σ` and `a_{i+1} = ⟨a_i, 1⟩` or `⟨1, a_i⟩` as
/// `x_i` is 0 or 1. The empty word gives the binary adding machine.
#[derive(Clone, Debug)]
pub struct KvGroup {
    v: BitWord,
    spec: AutomatonSpec,
}

impl KvGroup {
    pub fn new(v: BitWord) -> KvGroup {
        let decls = kv_decls(&v, "a", false);
        let spec = AutomatonSpec::new(decls, false).expect("generated states are well formed");
        KvGroup { v, spec }
    }

    pub fn v(&self) -> &BitWord {
        &self.v
    }

    pub fn n(&self) -> usize {
        self.v.len() + 1
    }

    pub fn spec(&self) -> &AutomatonSpec {
        &self.spec
    }

    pub fn display_name(&self) -> String {
        if self.v.is_empty() {
            "K_∅".to_string()
        } else {
            format!("K_{{{}}}", self.v)
        }
    }

    /// The generator a_i as a word, 1-based.
    pub fn gen_word(&self, i: usize) -> GroupWord {
        assert!(1 <= i && i <= self.n());
        GroupWord::single(Gen::plain(StateId((i - 1) as u16)), ReduceMode::Signed)
    }

    pub fn generators(&self) -> Vec<GroupWord> {
        (1..=self.n()).map(|i| self.gen_word(i)).collect()
    }

    pub fn period_parameter(&self) -> PeriodParameter {
        let mut best: Option<PeriodParameter> = None;
        for x in [Letter::ZERO, Letter::ONE] {
            let mut letters = self.v.letters().to_vec();
            letters.push(x);
            let completed = BitWord::new(letters);
            let d = completed.power_degree();
            let root = BitWord::new(completed.primitive_root().to_vec());
            let epsilon = if x == Letter::ZERO { 1 } else { -1 };
            if best.as_ref().map_or(true, |b| d > b.d) {
                best = Some(PeriodParameter { d, root, x, epsilon });
            }
        }
        best.expect("both completions were considered")
    }

    /// The nucleus in closed form: the identity, the a_i^{±1}, and the cross
    /// terms a_i^ε a_{i + j·n/d}^{−ε} over the d-fold symmetry of v·x.
    /// It has 1 + n(d+1) elements.
    pub fn nucleus_expected(&self) -> Vec<GroupWord> {
        let mode = ReduceMode::Signed;
        let n = self.n();
        let p = self.period_parameter();
        let step = n / p.d;
        let mut out = vec![GroupWord::identity()];
        for i in 1..=n {
            out.push(self.gen_word(i));
            out.push(self.gen_word(i).inverse(mode));
        }
        for i in 1..=n {
            for j in 1..p.d {
                let other = ((i - 1 + step * j) % n) + 1;
                let cross =
                    self.gen_word(i).pow(p.epsilon, mode).concat(&self.gen_word(other).pow(-p.epsilon, mode), mode);
                out.push(cross);
            }
        }
        out
    }

    /// The injective endomorphism with ⟨g, ρ(g)⟩ as the image's sections,
    /// where ρ counts the exponent sum of a_n.
    pub fn endomorphism(&self) -> Endomorphism {
        let mode = ReduceMode::Signed;
        let n = self.n();
        let mut images = Vec::with_capacity(n);
        let mut rho_images = Vec::with_capacity(n);
        for i in 1..=n {
            if i == n {
                images.push(self.gen_word(1).pow(2, mode));
                rho_images.push(self.gen_word(n));
            } else {
                let img = if self.v.at(i) == Letter::ZERO {
                    self.gen_word(i + 1)
                } else {
                    // a_1 a_{i+1} a_1^{-1}
                    self.gen_word(i + 1).conjugated(&self.gen_word(1).inverse(mode), mode)
                };
                images.push(img);
                rho_images.push(GroupWord::identity());
            }
        }
        Endomorphism { images, rho_images, mode }
    }

    pub fn traits(&self) -> GroupTraits {
        GroupTraits { free_abelianization: true, torsion_free: true }
    }

    /// Image in the free abelianization ℤ^n.
    pub fn abelianize(&self, g: &GroupWord) -> Vec<i64> {
        exponent_sums(g, &self.spec)
    }

    /// τ(a_i) is the indicator of the levels congruent to i−1 mod n.
    pub fn expected_tau(&self, i: usize) -> EventuallyPeriodicBits {
        let mut period = vec![false; self.n()];
        period[i - 1] = true;
        EventuallyPeriodicBits::new(Vec::new(), period)
    }

    /// The cycle a_i travels: (x_{i−1} … x_1 1 x_{n−1} … x_i).
    pub fn expected_ray(&self, i: usize) -> Vec<Letter> {
        let mut cycle = Vec::with_capacity(self.n());
        for j in (1..i).rev() {
            cycle.push(self.v.at(j));
        }
        cycle.push(Letter::ONE);
        for j in (i..self.n()).rev() {
            cycle.push(self.v.at(j));
        }
        cycle
    }

    /// Sections of a_{i+1}, a_{i+1}^{a_1} and a_1² jointly reach every
    /// generator, and a_1 moves the first level.
    pub fn recurrence_check(&self) -> bool {
        let mode = ReduceMode::Signed;
        let a1 = self.gen_word(1);
        let mut words = vec![a1.pow(2, mode)];
        for i in 1..self.n() {
            words.push(self.gen_word(i + 1));
            words.push(self.gen_word(i + 1).conjugated(&a1, mode));
        }
        first_level_recurrence(&self.spec, &words)
    }

    pub fn branch_witnesses(&self) -> WitnessReport {
        let mode = ReduceMode::Signed;
        let n = self.n();
        if n == 1 {
            return WitnessReport {
                statements: Vec::new(),
                conclusion: "abelian; no branching witnesses".to_string(),
            };
        }
        let phi = self.endomorphism();
        let mut statements = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                let g = GroupWord::commutator(&self.gen_word(i), &self.gen_word(j), mode);
                let pair = wreath_decompose(&phi.apply(&g), &self.spec);
                let passed = !pair.swap
                    && equal(&pair.sections[0], &g, &self.spec)
                    && is_trivial(&pair.sections[1], &self.spec);
                statements.push(WitnessStatement {
                    description: format!("phi([a{i},a{j}]) has sections <[a{i},a{j}], 1>"),
                    passed,
                });
            }
        }
        let comm = GroupWord::commutator(&self.gen_word(1), &self.gen_word(2), mode);
        statements.push(WitnessStatement {
            description: "[a1,a2] is nontrivial".to_string(),
            passed: !is_trivial(&comm, &self.spec),
        });
        WitnessReport::conclude(statements, "consistent with weak branchness over the commutator subgroup")
    }

    /// Conjugation by α = ⟨α, α⟩σ carries each a_i onto the generator m_i of
    /// the mirrored group, built with its first generator in the alternative
    /// arrangement m_1 = ⟨m_n, 1⟩σ.
    pub fn mirror_check(&self) -> bool {
        let mode = ReduceMode::Signed;
        let n = self.n();
        let mut decls = kv_decls(&self.v, "a", false);
        decls.extend(kv_decls(&self.v.mirror(), "m", true));
        decls.push(StateDecl::new("alpha", Some("alpha"), Some("alpha"), true));
        let joint = AutomatonSpec::new(decls, false).expect("joint states are well formed");
        let alpha = joint.generator_word("alpha").expect("alpha was declared");
        (1..=n).all(|i| {
            let a = joint.generator_word(&format!("a{i}")).expect("declared");
            let m = joint.generator_word(&format!("m{i}")).expect("declared");
            equal(&a.conjugated(&alpha, mode), &m, &joint)
        })
    }
}

/// The group attached to a pre-periodic kneading pair. All generators are
/// involutions.
#[derive(Clone, Debug)]
pub struct KwvGroup {
    w: BitWord,
    v: BitWord,
    spec: AutomatonSpec,
}

impl KwvGroup {
    pub fn new(w: BitWord, v: BitWord) -> Result<KwvGroup, Error> {
        if w.is_empty() || v.is_empty() {
            return Err(Error::EmptyKneadingWord);
        }
        if w.at(w.len()) == v.at(v.len()) {
            return Err(Error::LastLetterClash);
        }
        let decls = kwv_decls(&w, &v, "b", "a");
        let spec = AutomatonSpec::new(decls, true).expect("generated states are well formed");
        Ok(KwvGroup { w, v, spec })
    }

    pub fn w(&self) -> &BitWord {
        &self.w
    }

    pub fn v(&self) -> &BitWord {
        &self.v
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn spec(&self) -> &AutomatonSpec {
        &self.spec
    }

    pub fn display_name(&self) -> String {
        format!("K_{{{},{}}}", self.w, self.v)
    }

    /// Set when v is a proper power; the construction still goes through.
    pub fn non_primitive_v(&self) -> bool {
        !self.v.is_primitive()
    }

    pub fn b_word(&self, j: usize) -> GroupWord {
        assert!(1 <= j && j <= self.k());
        GroupWord::single(Gen::plain(StateId((j - 1) as u16)), ReduceMode::Involutive)
    }

    pub fn a_word(&self, i: usize) -> GroupWord {
        assert!(1 <= i && i <= self.n());
        GroupWord::single(Gen::plain(StateId((self.k() + i - 1) as u16)), ReduceMode::Involutive)
    }

    pub fn generators(&self) -> Vec<GroupWord> {
        let mut out: Vec<GroupWord> = (1..=self.k()).map(|j| self.b_word(j)).collect();
        out.extend((1..=self.n()).map(|i| self.a_word(i)));
        out
    }

    /// Largest d with v = u^d.
    pub fn period_degree(&self) -> usize {
        self.v.power_degree()
    }

    /// The nucleus in closed form: the identity, the b_j, and for each residue
    /// class mod n/d the subset products of {a_i, a_{i+n/d}, …} in increasing
    /// index order. It has k + 1 + (n/d)(2^d − 1) elements.
    pub fn nucleus_expected(&self) -> Vec<GroupWord> {
        let mode = ReduceMode::Involutive;
        let d = self.period_degree();
        let step = self.n() / d;
        let mut out = vec![GroupWord::identity()];
        for j in 1..=self.k() {
            out.push(self.b_word(j));
        }
        for i in 1..=step {
            for mask in 1u32..(1 << d) {
                let mut prod = GroupWord::identity();
                for l in 0..d {
                    if mask & (1 << l) != 0 {
                        prod = prod.concat(&self.a_word(i + l * step), mode);
                    }
                }
                out.push(prod);
            }
        }
        out
    }

    pub fn traits(&self) -> GroupTraits {
        GroupTraits::default()
    }

    /// Image in the abelianization (ℤ/2)^{k+n}, b-coordinates first.
    pub fn abelianize(&self, g: &GroupWord) -> Vec<u8> {
        exponent_sums(g, &self.spec).iter().map(|s| (s.rem_euclid(2)) as u8).collect()
    }

    /// The cycle a_i travels: (x_{i−1} … x_1 x_n x_{n−1} … x_i).
    pub fn expected_ray(&self, i: usize) -> Vec<Letter> {
        let n = self.n();
        let mut cycle = Vec::with_capacity(n);
        for j in (1..i).rev() {
            cycle.push(self.v.at(j));
        }
        cycle.push(self.v.at(n));
        for j in (i..n).rev() {
            cycle.push(self.v.at(j));
        }
        cycle
    }

    /// Sections of b_{j+1}, b_{j+1}^{b_1}, a_{i+1}, a_{i+1}^{b_1} (with
    /// wraparound to a_1) jointly reach every generator, and b_1 moves the
    /// first level.
    pub fn recurrence_check(&self) -> bool {
        let mode = ReduceMode::Involutive;
        let b1 = self.b_word(1);
        let mut words = Vec::new();
        for j in 1..=self.k() {
            let g = if j == self.k() { self.a_word(1) } else { self.b_word(j + 1) };
            words.push(g.clone());
            words.push(g.conjugated(&b1, mode));
        }
        for i in 1..=self.n() {
            let g = if i == self.n() { self.a_word(1) } else { self.a_word(i + 1) };
            words.push(g.clone());
            words.push(g.conjugated(&b1, mode));
        }
        first_level_recurrence(&self.spec, &words)
    }

    /// Derives the endomorphism and its parameters s, t, u, m by finite
    /// search, shortest candidates first. Returns `DihedralCase` for
    /// k = n = 1 and `SearchExhausted` if a search or the section-table
    /// verification fails.
    pub fn endomorphism(&self) -> Result<KwvEndomorphism, Error> {
        let mode = ReduceMode::Involutive;
        let spec = &self.spec;
        let (k, n) = (self.k(), self.n());
        if k == 1 && n == 1 {
            return Err(Error::DihedralCase);
        }
        let b1 = self.b_word(1);
        let bk = self.b_word(k);
        let a1 = self.a_word(1);
        let an = self.a_word(n);
        const CAP: usize = 8;

        let (s, t, m): (GroupWord, GroupWord, u32);
        if k >= 2 && n >= 2 {
            s = search_product(&[b1.clone()], mode, CAP, |cand| {
                is_trivial(&GroupWord::commutator(&an.conjugated(cand, mode), &bk, mode), spec)
            })
            .ok_or_else(|| Error::SearchExhausted("s in <b1> with [a_n^s, b_k] = 1".into()))?;
            let target1 = an.conjugated(&s, mode);
            t = search_product(&[b1.clone(), self.b_word(2)], mode, CAP, |cand| {
                wreath_is(&a1.conjugated(cand, mode), &bk, &target1, spec)
            })
            .ok_or_else(|| Error::SearchExhausted("t in <b1,b2> with a_1^t = <b_k, a_n^s>".into()))?;
            m = 1;
        } else if k >= 3 {
            s = search_product(&[b1.clone(), self.b_word(2)], mode, CAP, |cand| {
                is_trivial(&GroupWord::commutator(&a1.conjugated(cand, mode), &bk, mode), spec)
            })
            .ok_or_else(|| Error::SearchExhausted("s in <b1,b2> with [a_1^s, b_k] = 1".into()))?;
            let target1 = a1.conjugated(&s, mode);
            t = search_product(&[b1.clone(), self.b_word(2), self.b_word(3)], mode, CAP, |cand| {
                wreath_is(&a1.conjugated(cand, mode), &bk, &target1, spec)
            })
            .ok_or_else(|| {
                Error::SearchExhausted("t in <b1,b2,b3> with a_1^t = <b_k, a_1^s>".into())
            })?;
            m = 1;
        } else if k == 2 {
            // Joint search for (r, s), by total length then position.
            let b2 = self.b_word(2);
            let id = GroupWord::identity();
            let pairs =
                [(id.clone(), id.clone()), (id.clone(), b1.clone()), (b1.clone(), id), (b1.clone(), b1.clone())];
            let found = pairs.into_iter().find(|(r, cand_s)| {
                wreath_is(&b2.conjugated(r, mode), &b1, &GroupWord::identity(), spec)
                    && wreath_is(&a1.conjugated(&r.concat(cand_s, mode), mode), &b2, &a1, spec)
            });
            let (_r, found_s) = found.ok_or_else(|| {
                Error::SearchExhausted("(r, s) in <b1>² with b_2^r = <b_1, 1>, a_1^{rs} = <b_2, a_1>".into())
            })?;
            s = found_s;
            let target1 = a1.conjugated(&s, mode);
            t = search_product(&[b1.clone(), self.b_word(2)], mode, CAP, |cand| {
                wreath_is(&a1.conjugated(cand, mode), &bk, &target1, spec)
            })
            .ok_or_else(|| Error::SearchExhausted("t in <b1,b2> with a_1^t = <b_2, a_1^s>".into()))?;
            m = 2;
        } else {
            // k = 1, n ≥ 2.
            s = GroupWord::identity();
            t = search_product(&[b1.clone()], mode, CAP, |cand| {
                wreath_is(&a1.conjugated(cand, mode), &b1, &an, spec)
            })
            .ok_or_else(|| Error::SearchExhausted("t in <b1> with a_1^t = <b_1, a_n>".into()))?;
            m = 2;
        }

        let mut images = Vec::with_capacity(k + n);
        let mut rho_images = Vec::with_capacity(k + n);
        for j in 1..=k {
            if j == k {
                images.push(a1.conjugated(&t, mode));
                rho_images.push(an.conjugated(&s, mode));
            } else {
                let img = if self.w.at(j) == Letter::ZERO {
                    self.b_word(j + 1)
                } else {
                    self.b_word(j + 1).conjugated(&b1, mode)
                };
                images.push(img);
                rho_images.push(GroupWord::identity());
            }
        }
        for i in 1..=n {
            if i == n {
                let img = if self.v.at(n) == Letter::ZERO { a1.clone() } else { a1.conjugated(&b1, mode) };
                images.push(img);
                rho_images.push(bk.clone());
            } else {
                let img = if self.v.at(i) == Letter::ZERO {
                    self.a_word(i + 1)
                } else {
                    self.a_word(i + 1).conjugated(&b1, mode)
                };
                images.push(img);
                rho_images.push(GroupWord::identity());
            }
        }
        let phi = Endomorphism { images, rho_images, mode };

        // Every image must decompose as <g, rho(g)>.
        for id in spec.state_ids() {
            let g = GroupWord::single(Gen::plain(id), mode);
            let pair = wreath_decompose(&phi.apply(&g), spec);
            if pair.swap
                || !equal(&pair.sections[0], &g, spec)
                || !equal(&pair.sections[1], &phi.rho(&g), spec)
            {
                return Err(Error::SearchExhausted(format!(
                    "section table verification failed at {}",
                    spec.state_name(id)
                )));
            }
        }

        // Normal form of phi(b_k) as a conjugate of a_1: a_1^{u b_1^{y_k}}.
        let mut u_gens = Vec::new();
        if k >= 2 {
            u_gens.push(self.b_word(2));
            u_gens.push(self.b_word(2).conjugated(&b1, mode));
        }
        if k >= 3 {
            u_gens.push(self.b_word(3));
            u_gens.push(self.b_word(3).conjugated(&b1, mode));
        }
        let phi_bk = phi.apply(&bk);
        let tail = if self.w.at(k) == Letter::ONE { b1 } else { GroupWord::identity() };
        let (u, u_factors) = search_product_indexed(&u_gens, mode, CAP, |cand| {
            equal(&phi_bk, &a1.conjugated(&cand.concat(&tail, mode), mode), spec)
        })
        .ok_or_else(|| {
            Error::SearchExhausted("u in <b2, b2^b1, b3, b3^b1> with phi(b_k) = a_1^{u b_1^{y_k}}".into())
        })?;

        Ok(KwvEndomorphism { phi, s, t, u, u_factors, m })
    }

    pub fn branch_witnesses(&self) -> WitnessReport {
        let mode = ReduceMode::Involutive;
        let (k, n) = (self.k(), self.n());
        if k == 1 && n == 1 {
            return WitnessReport {
                statements: Vec::new(),
                conclusion: "infinite dihedral; not weakly branch; no witnesses".to_string(),
            };
        }
        let phi = match self.endomorphism() {
            Ok(e) => e.phi,
            Err(err) => {
                return WitnessReport {
                    statements: Vec::new(),
                    conclusion: format!("endomorphism derivation failed: {err}"),
                }
            }
        };
        let b1 = self.b_word(1);
        let a1 = self.a_word(1);
        // Commutators with trivial rho, so that phi places them diagonally.
        let mut commutators = Vec::new();
        if k >= 2 {
            for j in 2..=k {
                commutators.push((format!("[b1,b{j}]"), GroupWord::commutator(&b1, &self.b_word(j), mode)));
            }
            for i in 1..=n {
                commutators.push((format!("[b1,a{i}]"), GroupWord::commutator(&b1, &self.a_word(i), mode)));
            }
        } else {
            for i in 1..=n {
                for j in (i + 1)..=n {
                    commutators
                        .push((format!("[a{i},a{j}]"), GroupWord::commutator(&self.a_word(i), &self.a_word(j), mode)));
                }
            }
            for i in 1..n {
                commutators.push((format!("[a{i},b1]"), GroupWord::commutator(&self.a_word(i), &b1, mode)));
            }
        }
        let mut statements = Vec::new();
        for (name, g) in commutators {
            let pair = wreath_decompose(&phi.apply(&g), &self.spec);
            let passed = !pair.swap
                && equal(&pair.sections[0], &g, &self.spec)
                && is_trivial(&pair.sections[1], &self.spec);
            statements.push(WitnessStatement {
                description: format!("phi({name}) has sections <{name}, 1>"),
                passed,
            });
        }
        let order_witness: Option<(String, GroupWord, u64)> = if k >= 2 && n >= 2 {
            Some(("[b1,b2] has order 2".into(), GroupWord::commutator(&b1, &self.b_word(2), mode), 2))
        } else if k == 2 && n == 1 && self.w.at(1) == self.w.at(2) {
            Some(("(b1 a1)^4 has order 2".into(), b1.concat(&a1, mode).pow(4, mode), 2))
        } else if k == 1 {
            Some(("[b1,a1] has order 4".into(), GroupWord::commutator(&b1, &a1, mode), 4))
        } else {
            None
        };
        if let Some((description, g, expected)) = order_witness {
            let passed = element_has_order(&g, &self.spec, expected);
            statements.push(WitnessStatement { description, passed });
        }
        if k == 2 && n == 1 && self.w.at(1) != self.w.at(2) {
            // Here the family has no small torsion witness: b1 a1 has
            // infinite order, because (b1 a1)^4 fixes the corner vertex cc
            // (c the first letter of w) and restricts there to (b1 a1)^2,
            // so no power of b1 a1 dies.
            let prod = b1.concat(&a1, mode);
            let square = prod.pow(2, mode);
            let c = usize::from(self.w.at(1) == Letter(true));
            let top = wreath_decompose(&prod.pow(4, mode), &self.spec);
            let inner = wreath_decompose(&top.sections[c], &self.spec);
            let passed = !top.swap
                && !inner.swap
                && equal(&inner.sections[c], &square, &self.spec)
                && !is_trivial(&square, &self.spec);
            statements.push(WitnessStatement {
                description: "b1 a1 has infinite order ((b1 a1)^4 restricts to (b1 a1)^2)".into(),
                passed,
            });
        }
        WitnessReport::conclude(statements, "consistent with branchness")
    }

    /// Conjugation by α = ⟨α, α⟩σ carries this group onto the one built from
    /// the mirrored pair, generator by generator.
    pub fn mirror_check(&self) -> bool {
        let mode = ReduceMode::Involutive;
        let mut decls = kwv_decls(&self.w, &self.v, "b", "a");
        decls.extend(kwv_decls(&self.w.mirror(), &self.v.mirror(), "mb", "ma"));
        decls.push(StateDecl::new("alpha", Some("alpha"), Some("alpha"), true));
        let joint = AutomatonSpec::new(decls, true).expect("joint states are well formed");
        let alpha = joint.generator_word("alpha").expect("alpha was declared");
        let mut names = Vec::new();
        for j in 1..=self.k() {
            names.push((format!("b{j}"), format!("mb{j}")));
        }
        for i in 1..=self.n() {
            names.push((format!("a{i}"), format!("ma{i}")));
        }
        names.into_iter().all(|(g, mg)| {
            let g = joint.generator_word(&g).expect("declared");
            let mg = joint.generator_word(&mg).expect("declared");
            equal(&g.conjugated(&alpha, mode), &mg, &joint)
        })
    }
}

/// Either kneading family, for callers that treat them uniformly.
#[derive(Clone, Debug)]
pub enum KneadingGroup {
    Kv(KvGroup),
    Kwv(KwvGroup),
}

impl KneadingGroup {
    pub fn spec(&self) -> &AutomatonSpec {
        match self {
            KneadingGroup::Kv(g) => g.spec(),
            KneadingGroup::Kwv(g) => g.spec(),
        }
    }

    pub fn display_name(&self) -> String {
        match self {
            KneadingGroup::Kv(g) => g.display_name(),
            KneadingGroup::Kwv(g) => g.display_name(),
        }
    }

    pub fn traits(&self) -> GroupTraits {
        match self {
            KneadingGroup::Kv(g) => g.traits(),
            KneadingGroup::Kwv(g) => g.traits(),
        }
    }

    pub fn generators(&self) -> Vec<GroupWord> {
        match self {
            KneadingGroup::Kv(g) => g.generators(),
            KneadingGroup::Kwv(g) => g.generators(),
        }
    }

    pub fn nucleus_expected(&self) -> Vec<GroupWord> {
        match self {
            KneadingGroup::Kv(g) => g.nucleus_expected(),
            KneadingGroup::Kwv(g) => g.nucleus_expected(),
        }
    }

    pub fn recurrence_check(&self) -> bool {
        match self {
            KneadingGroup::Kv(g) => g.recurrence_check(),
            KneadingGroup::Kwv(g) => g.recurrence_check(),
        }
    }

    pub fn branch_witnesses(&self) -> WitnessReport {
        match self {
            KneadingGroup::Kv(g) => g.branch_witnesses(),
            KneadingGroup::Kwv(g) => g.branch_witnesses(),
        }
    }

    pub fn mirror_check(&self) -> bool {
        match self {
            KneadingGroup::Kv(g) => g.mirror_check(),
            KneadingGroup::Kwv(g) => g.mirror_check(),
        }
    }

    /// The periodic ray a directed generator travels, if the state is one.
    pub fn expected_ray(&self, id: StateId) -> Option<Vec<Letter>> {
        match self {
            KneadingGroup::Kv(g) => Some(g.expected_ray(id.index() + 1)),
            KneadingGroup::Kwv(g) => {
                let idx = id.index();
                if idx < g.k() {
                    None
                } else {
                    Some(g.expected_ray(idx - g.k() + 1))
                }
            }
        }
    }
}

impl From<KvGroup> for KneadingGroup {
    fn from(g: KvGroup) -> KneadingGroup {
        KneadingGroup::Kv(g)
    }
}

impl From<KwvGroup> for KneadingGroup {
    fn from(g: KwvGroup) -> KneadingGroup {
        KneadingGroup::Kwv(g)
    }
}

/// A group endomorphism given on generators, with the right section of each
/// image recorded separately: Ψ(φ(g)) = ⟨g, ρ(g)⟩ for every g.
#[derive(Clone, Debug)]
pub struct Endomorphism {
    images: Vec<GroupWord>,
    rho_images: Vec<GroupWord>,
    mode: ReduceMode,
}

impl Endomorphism {
    pub fn image(&self, id: StateId) -> &GroupWord {
        &self.images[id.index()]
    }

    pub fn apply(&self, w: &GroupWord) -> GroupWord {
        self.map(w, &self.images)
    }

    /// The right section of the image: ρ is itself a homomorphism because
    /// every image fixes the first level.
    pub fn rho(&self, w: &GroupWord) -> GroupWord {
        self.map(w, &self.rho_images)
    }

    pub fn apply_iter(&self, w: &GroupWord, times: u32) -> GroupWord {
        let mut out = w.clone();
        for _ in 0..times {
            out = self.apply(&out);
        }
        out
    }

    fn map(&self, w: &GroupWord, images: &[GroupWord]) -> GroupWord {
        let mut gens = Vec::new();
        for &g in w.gens() {
            let img = &images[g.state.index()];
            if g.inverse {
                gens.extend(img.inverse(self.mode).gens().iter().copied());
            } else {
                gens.extend(img.gens().iter().copied());
            }
        }
        GroupWord::from_gens(gens, self.mode)
    }
}

/// The derived endomorphism of a pre-periodic group together with the
/// parameters fixing it: Ψ(a_1^t) = ⟨b_k, a_n^s⟩, φ(b_k) = a_1^{u b_1^{y_k}},
/// and ⟨a_1^t, b_1⟩ is dihedral of order 2^{m+2}.
#[derive(Clone, Debug)]
pub struct KwvEndomorphism {
    pub phi: Endomorphism,
    pub s: GroupWord,
    pub t: GroupWord,
    pub u: GroupWord,
    /// Indices into `[b_2, b_2^{b_1}, b_3, b_3^{b_1}]` whose product is `u`,
    /// in written order.  Entries `>= 2` occur only when `k >= 3`.
    pub u_factors: Vec<usize>,
    pub m: u32,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WitnessStatement {
    pub description: String,
    pub passed: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WitnessReport {
    pub statements: Vec<WitnessStatement>,
    pub conclusion: String,
}

impl WitnessReport {
    pub fn all_passed(&self) -> bool {
        self.statements.iter().all(|s| s.passed)
    }

    fn conclude(statements: Vec<WitnessStatement>, on_success: &str) -> WitnessReport {
        let failed = statements.iter().filter(|s| !s.passed).count();
        let conclusion = if failed == 0 {
            format!("all witnesses hold; {on_success}")
        } else {
            format!("{failed} witness(es) failed")
        };
        WitnessReport { statements, conclusion }
    }
}

/// Whether the sections of the given first-level-fixing words jointly reach
/// every generator, with some generator moving the first level.
pub fn first_level_recurrence(spec: &AutomatonSpec, words: &[GroupWord]) -> bool {
    let mut sections = Vec::new();
    for w in words {
        let pair = wreath_decompose(w, spec);
        if pair.swap {
            return false;
        }
        sections.extend(pair.sections);
    }
    if !spec.state_ids().any(|id| spec.state_active(id)) {
        return false;
    }
    spec.state_ids().all(|id| {
        let g = GroupWord::single(Gen::plain(id), spec.mode());
        sections.iter().any(|s| equal(s, &g, spec))
    })
}

fn wreath_is(w: &GroupWord, sec0: &GroupWord, sec1: &GroupWord, spec: &AutomatonSpec) -> bool {
    let pair = wreath_decompose(w, spec);
    !pair.swap && equal(&pair.sections[0], sec0, spec) && equal(&pair.sections[1], sec1, spec)
}

fn element_has_order(g: &GroupWord, spec: &AutomatonSpec, order: u64) -> bool {
    if is_trivial(g, spec) {
        return order == 1;
    }
    let mode = spec.mode();
    let mut power = g.clone();
    for m in 2..=order {
        power = power.concat(g, mode);
        if is_trivial(&power, spec) {
            return m == order;
        }
    }
    false
}

/// First product of the given factors, none adjacent to itself, satisfying
/// the predicate; ordered by factor count, then by factor positions. With no
/// factors only the identity is tried.
fn search_product<F>(
    factors: &[GroupWord],
    mode: ReduceMode,
    max_factors: usize,
    pred: F,
) -> Option<GroupWord>
where
    F: FnMut(&GroupWord) -> bool,
{
    search_product_indexed(factors, mode, max_factors, pred).map(|(word, _)| word)
}

fn search_product_indexed<F>(
    factors: &[GroupWord],
    mode: ReduceMode,
    max_factors: usize,
    mut pred: F,
) -> Option<(GroupWord, Vec<usize>)>
where
    F: FnMut(&GroupWord) -> bool,
{
    let id = GroupWord::identity();
    if pred(&id) {
        return Some((id, Vec::new()));
    }
    let mut level: Vec<(Vec<usize>, GroupWord)> = Vec::new();
    for _ in 0..max_factors {
        let mut next = Vec::new();
        if level.is_empty() {
            for (i, f) in factors.iter().enumerate() {
                next.push((vec![i], f.clone()));
            }
        } else {
            for (seq, word) in &level {
                let last = *seq.last().expect("nonempty sequence");
                for (i, f) in factors.iter().enumerate() {
                    if i != last {
                        let mut longer = seq.clone();
                        longer.push(i);
                        next.push((longer, word.concat(f, mode)));
                    }
                }
            }
        }
        for (seq, word) in &next {
            if pred(word) {
                return Some((word.clone(), seq.clone()));
            }
        }
        level = next;
        if level.is_empty() {
            return None;
        }
    }
    None
}
