//! Finite automata presenting tree automorphisms, and their action on the
//! binary rooted tree.
//!
//! Every state `g` of an [`AutomatonSpec`] decomposes as
//! `g = <<g|_0, g|_1>> s^e`: the section `g|_x` acts on the subtree below the
//! letter `x`, and afterwards `s` (the swap of the two subtrees) is applied
//! when the state is active (`e = 1`). Sections of states are again states or
//! the identity, which keeps every operation on words exact: sections of a
//! word never exceed its length.
//!
//! The action is on the right. For a product the accumulated swap parity `e`
//! routes the next factor's sections: appending `h` to a product with parity
//! `e` contributes `h|_(x xor e)` to the section at `x`.

use crate::word::{Gen, GroupWord, ReduceMode, StateId};
use crate::Error;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A letter of the binary alphabet `X = {0, 1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(pub bool);

impl Letter {
    pub const ZERO: Letter = Letter(false);
    pub const ONE: Letter = Letter(true);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn flip(self) -> Letter {
        Letter(!self.0)
    }

    /// The letter moved by a swap of parity `e`.
    pub fn xor(self, e: bool) -> Letter {
        Letter(self.0 ^ e)
    }

    pub fn from_char(c: char) -> Result<Letter, Error> {
        match c {
            '0' => Ok(Letter::ZERO),
            '1' => Ok(Letter::ONE),
            other => Err(Error::BadBit(other)),
        }
    }

    pub fn as_char(self) -> char {
        if self.0 {
            '1'
        } else {
            '0'
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A vertex of the tree: a finite word over `X`. The empty vertex is the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Vertex(Vec<Letter>);

impl Vertex {
    pub fn root() -> Vertex {
        Vertex::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Vertex {
        Vertex(letters)
    }

    pub fn parse(s: &str) -> Result<Vertex, Error> {
        s.chars().map(Letter::from_char).collect::<Result<_, _>>().map(Vertex)
    }

    /// The `i`-th vertex of level `depth` in lexicographic order.
    pub fn from_index(depth: usize, i: u64) -> Vertex {
        Vertex((0..depth).map(|j| Letter(i >> (depth - 1 - j) & 1 == 1)).collect())
    }

    pub fn to_index(&self) -> u64 {
        self.0.iter().fold(0, |acc, l| acc << 1 | l.0 as u64)
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

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn concat(&self, other: &Vertex) -> Vertex {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Vertex(v)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct State {
    name: String,
    sections: [Option<StateId>; 2],
    active: bool,
}

/// Declaration of one automaton state by name.
#[derive(Clone, Debug)]
pub struct StateDecl {
    pub name: String,
    /// Section at letter 0; `None` is the identity.
    pub sec0: Option<String>,
    /// Section at letter 1; `None` is the identity.
    pub sec1: Option<String>,
    pub active: bool,
}

impl StateDecl {
    pub fn new(
        name: &str,
        sec0: Option<&str>,
        sec1: Option<&str>,
        active: bool,
    ) -> StateDecl {
        StateDecl {
            name: name.to_string(),
            sec0: sec0.map(str::to_string),
            sec1: sec1.map(str::to_string),
            active,
        }
    }
}

/// A finite automaton over `X = {0, 1}` whose states are tree automorphisms.
///
/// Sections of states are single states or the identity. `involutive` marks
/// automata all of whose states square to the identity; words over such an
/// automaton are stored sign-free.
#[derive(Clone, Debug)]
pub struct AutomatonSpec {
    states: Vec<State>,
    involutive: bool,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    name: String,
    sec0: String,
    sec1: String,
    active: bool,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    states: Vec<StateJson>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    involutive: bool,
}

impl AutomatonSpec {
    pub fn new(decls: Vec<StateDecl>, involutive: bool) -> Result<AutomatonSpec, Error> {
        if decls.len() > u16::MAX as usize {
            return Err(Error::TooManyStates(decls.len()));
        }
        let find = |name: &str, decls: &[StateDecl]| -> Result<StateId, Error> {
            decls
                .iter()
                .position(|d| d.name == name)
                .map(|i| StateId(i as u16))
                .ok_or_else(|| Error::UnknownState(name.to_string()))
        };
        for (i, d) in decls.iter().enumerate() {
            if d.name.is_empty() || d.name == "1" {
                return Err(Error::BadStateName(d.name.clone()));
            }
            if decls[..i].iter().any(|e| e.name == d.name) {
                return Err(Error::DuplicateState(d.name.clone()));
            }
        }
        let mut states = Vec::with_capacity(decls.len());
        for d in &decls {
            let sec = |s: &Option<String>| -> Result<Option<StateId>, Error> {
                s.as_deref().map(|n| find(n, &decls)).transpose()
            };
            states.push(State {
                name: d.name.clone(),
                sections: [sec(&d.sec0)?, sec(&d.sec1)?],
                active: d.active,
            });
        }
        Ok(AutomatonSpec { states, involutive })
    }

    pub fn from_json(json: &str) -> Result<AutomatonSpec, Error> {
        let parsed: SpecJson = serde_json::from_str(json)?;
        let decls = parsed
            .states
            .into_iter()
            .map(|s| StateDecl {
                name: s.name,
                sec0: (s.sec0 != "1").then_some(s.sec0),
                sec1: (s.sec1 != "1").then_some(s.sec1),
                active: s.active,
            })
            .collect();
        AutomatonSpec::new(decls, parsed.involutive)
    }

    pub fn to_json(&self) -> String {
        let doc = SpecJson {
            states: self
                .states
                .iter()
                .map(|s| StateJson {
                    name: s.name.clone(),
                    sec0: self.section_name(s.sections[0]),
                    sec1: self.section_name(s.sections[1]),
                    active: s.active,
                })
                .collect(),
            involutive: self.involutive,
        };
        serde_json::to_string_pretty(&doc).expect("spec serialization cannot fail")
    }

    fn section_name(&self, s: Option<StateId>) -> String {
        match s {
            None => "1".to_string(),
            Some(id) => self.states[id.index()].name.clone(),
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u16).map(StateId)
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.index()].name
    }

    pub fn state_names(&self) -> Vec<String> {
        self.states.iter().map(|s| s.name.clone()).collect()
    }

    pub fn find_state(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name).map(|i| StateId(i as u16))
    }

    pub fn state_section(&self, id: StateId, x: Letter) -> Option<StateId> {
        self.states[id.index()].sections[x.index()]
    }

    pub fn state_active(&self, id: StateId) -> bool {
        self.states[id.index()].active
    }

    pub fn is_involutive(&self) -> bool {
        self.involutive
    }

    pub fn mode(&self) -> ReduceMode {
        if self.involutive {
            ReduceMode::Involutive
        } else {
            ReduceMode::Signed
        }
    }

    pub fn gen(&self, name: &str) -> Result<Gen, Error> {
        self.find_state(name)
            .map(Gen::plain)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn generator_word(&self, name: &str) -> Result<GroupWord, Error> {
        Ok(GroupWord::single(self.gen(name)?, self.mode()))
    }

    pub fn gen_active(&self, g: Gen) -> bool {
        self.states[g.state.index()].active
    }

    /// Section of a letter at `x`. For an inverse letter the defining
    /// recursion gives `(g^-1)|_x = (g|_(x xor e))^-1` with `e` the activity
    /// of `g`.
    pub fn gen_section(&self, g: Gen, x: Letter) -> Option<Gen> {
        let st = &self.states[g.state.index()];
        let side = if g.inverse { x.xor(st.active) } else { x };
        st.sections[side.index()].map(|s| Gen { state: s, inverse: g.inverse })
    }
}

/// First-level decomposition `w = <<sections[0], sections[1]>> s^swap`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WreathPair {
    pub sections: [GroupWord; 2],
    pub swap: bool,
}

pub(crate) fn wreath_decompose_mode(
    w: &GroupWord,
    spec: &AutomatonSpec,
    mode: ReduceMode,
) -> WreathPair {
    let mut e = false;
    let mut secs = [Vec::new(), Vec::new()];
    for &g in w.gens() {
        // Appending g to a product with swap parity e contributes
        // g|_(x xor e) to the section at x.
        for x in [Letter::ZERO, Letter::ONE] {
            if let Some(h) = spec.gen_section(g, x.xor(e)) {
                secs[x.index()].push(h);
            }
        }
        e ^= spec.gen_active(g);
    }
    let [s0, s1] = secs;
    WreathPair {
        sections: [GroupWord::from_gens(s0, mode), GroupWord::from_gens(s1, mode)],
        swap: e,
    }
}

pub fn wreath_decompose(w: &GroupWord, spec: &AutomatonSpec) -> WreathPair {
    wreath_decompose_mode(w, spec, spec.mode())
}

/// Swap parity of a word: whether it moves the first level.
pub fn activity(w: &GroupWord, spec: &AutomatonSpec) -> bool {
    w.gens().iter().fold(false, |e, &g| e ^ spec.gen_active(g))
}

pub(crate) fn section_at_mode(
    w: &GroupWord,
    x: Letter,
    spec: &AutomatonSpec,
    mode: ReduceMode,
) -> GroupWord {
    let mut e = false;
    let mut out = Vec::new();
    for &g in w.gens() {
        if let Some(h) = spec.gen_section(g, x.xor(e)) {
            out.push(h);
        }
        e ^= spec.gen_active(g);
    }
    GroupWord::from_gens(out, mode)
}

/// Section of `w` at a vertex: iterated first-level sections along the path.
pub fn restrict(w: &GroupWord, v: &Vertex, spec: &AutomatonSpec) -> GroupWord {
    let mode = spec.mode();
    let mut cur = w.clone();
    for &x in v.letters() {
        cur = section_at_mode(&cur, x, spec, mode);
    }
    cur
}

/// Image of a vertex under the automorphism: letterwise, the current swap
/// parity moves the letter and the section at the original letter continues.
pub fn act(w: &GroupWord, v: &Vertex, spec: &AutomatonSpec) -> Vertex {
    let mode = spec.mode();
    let mut cur = w.clone();
    let mut out = Vec::with_capacity(v.len());
    for &x in v.letters() {
        out.push(x.xor(activity(&cur, spec)));
        cur = section_at_mode(&cur, x, spec, mode);
    }
    Vertex(out)
}

/// Classification of a single state by its section behaviour. `Directed`
/// carries the edge labels around the unique section cycle, starting at the
/// state; the activity ray of the state is that cycle repeated forever.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StateClass {
    /// All section paths die out; `depth` levels suffice.
    Finitary { depth: usize },
    Directed { cycle: Vec<Letter> },
    /// Bounded activity but not on a cycle itself.
    OtherBounded,
    Unbounded,
}

impl StateClass {
    /// Primitive root of the directed cycle, if directed.
    pub fn ray_root(&self) -> Option<Vec<Letter>> {
        match self {
            StateClass::Directed { cycle } => Some(primitive_root(cycle).to_vec()),
            _ => None,
        }
    }
}

/// Shortest word `u` with `w = u^k`.
pub fn primitive_root<T: PartialEq>(w: &[T]) -> &[T] {
    let n = w.len();
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| w[i] == w[i - d]) {
            return &w[..d];
        }
    }
    w
}

/// Classifies a state (`None` is the identity automorphism).
pub fn classify_state(spec: &AutomatonSpec, state: Option<StateId>) -> StateClass {
    let Some(start) = state else {
        return StateClass::Finitary { depth: 0 };
    };
    let n = spec.state_count();
    // Finitary states: both sections identity or finitary. Fixpoint from below.
    let mut finitary = vec![false; n];
    loop {
        let mut changed = false;
        for id in spec.state_ids() {
            if finitary[id.index()] {
                continue;
            }
            let dead = [Letter::ZERO, Letter::ONE].iter().all(|&x| {
                spec.state_section(id, x).map_or(true, |s| finitary[s.index()])
            });
            if dead {
                finitary[id.index()] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if finitary[start.index()] {
        // Longest section path to the identity; well defined on the acyclic part.
        fn depth_of(spec: &AutomatonSpec, id: StateId, memo: &mut Vec<Option<usize>>) -> usize {
            if let Some(d) = memo[id.index()] {
                return d;
            }
            let d = 1 + [Letter::ZERO, Letter::ONE]
                .iter()
                .filter_map(|&x| spec.state_section(id, x))
                .map(|s| depth_of(spec, s, memo))
                .max()
                .unwrap_or(0);
            memo[id.index()] = Some(d);
            d
        }
        let mut memo = vec![None; n];
        return StateClass::Finitary { depth: depth_of(spec, start, &mut memo) };
    }

    // Live graph: non-finitary states reachable from start, with the edges
    // into non-finitary sections.
    let live_edges = |id: StateId| -> Vec<(Letter, StateId)> {
        [Letter::ZERO, Letter::ONE]
            .iter()
            .filter_map(|&x| {
                spec.state_section(id, x)
                    .filter(|s| !finitary[s.index()])
                    .map(|s| (x, s))
            })
            .collect()
    };
    let mut reachable = vec![false; n];
    let mut stack = vec![start];
    reachable[start.index()] = true;
    while let Some(id) = stack.pop() {
        for (_, s) in live_edges(id) {
            if !reachable[s.index()] {
                reachable[s.index()] = true;
                stack.push(s);
            }
        }
    }
    let reaches = |from: StateId, to: StateId| -> bool {
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        while let Some(id) = stack.pop() {
            for (_, s) in live_edges(id) {
                if s == to {
                    return true;
                }
                if !seen[s.index()] {
                    seen[s.index()] = true;
                    stack.push(s);
                }
            }
        }
        false
    };
    let cyclic: Vec<bool> = (0..n as u16)
        .map(|i| reachable[i as usize] && reaches(StateId(i), StateId(i)))
        .collect();
    // Bounded iff every reachable cyclic state has exactly one live edge:
    // cycles are then disjoint simple loops with no route from one cycle to
    // any cycle, and activity stays bounded levelwise.
    let bounded = (0..n)
        .filter(|&i| reachable[i] && cyclic[i])
        .all(|i| live_edges(StateId(i as u16)).len() == 1);
    if !bounded {
        return StateClass::Unbounded;
    }
    if cyclic[start.index()] {
        let mut cycle = Vec::new();
        let mut cur = start;
        loop {
            let (x, next) = live_edges(cur)[0];
            cycle.push(x);
            cur = next;
            if cur == start {
                break;
            }
        }
        StateClass::Directed { cycle }
    } else {
        StateClass::OtherBounded
    }
}

/// Moore diagram in DOT form. Active states are filled black, inactive white;
/// edges into the identity are omitted. Output is deterministic: states in
/// declaration order, edges by letter.
pub fn moore_dot(spec: &AutomatonSpec) -> String {
    let mut out = String::from("digraph moore {\n  rankdir=LR;\n  node [shape=circle];\n");
    for id in spec.state_ids() {
        let name = spec.state_name(id);
        if spec.state_active(id) {
            out.push_str(&format!(
                "  \"{name}\" [style=filled, fillcolor=black, fontcolor=white];\n"
            ));
        } else {
            out.push_str(&format!("  \"{name}\" [style=filled, fillcolor=white];\n"));
        }
    }
    for id in spec.state_ids() {
        for x in [Letter::ZERO, Letter::ONE] {
            if let Some(s) = spec.state_section(id, x) {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                    spec.state_name(id),
                    spec.state_name(s),
                    x
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}
