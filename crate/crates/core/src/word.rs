//! Freely reduced words over the states of an automaton.
//!
//! Elements of the groups in this crate are stored as words over generator
//! symbols. A word is kept freely reduced at all times; the reduction rule
//! depends on the [`ReduceMode`] of the automaton the word lives over.
//! Products read left to right: in `g * h` the automorphism `g` acts first.

use std::cmp::Ordering;

/// Index of a state in an [`AutomatonSpec`](crate::automaton::AutomatonSpec).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId(pub u16);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One letter of a word: a generator or its formal inverse.
///
/// The derived order is (state index, sign) with the positive letter first;
/// canonical representatives rely on it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Gen {
    pub state: StateId,
    pub inverse: bool,
}

impl Gen {
    pub fn plain(state: StateId) -> Gen {
        Gen { state, inverse: false }
    }

    pub fn inverted(self) -> Gen {
        Gen { state: self.state, inverse: !self.inverse }
    }
}

/// Free-reduction rule for words.
///
/// `Signed` cancels adjacent `g g^-1` pairs. `Involutive` is for automata
/// whose every state is an involution: signs are discarded and adjacent equal
/// letters cancel. Soundness of the involutive rule is a property of the
/// automaton, not of the words; see `solver::involution_check`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReduceMode {
    Signed,
    Involutive,
}

impl ReduceMode {
    fn normalize(self, g: Gen) -> Gen {
        match self {
            ReduceMode::Signed => g,
            ReduceMode::Involutive => Gen::plain(g.state),
        }
    }

    pub(crate) fn cancels(self, a: Gen, b: Gen) -> bool {
        a.state == b.state
            && match self {
                ReduceMode::Signed => a.inverse != b.inverse,
                ReduceMode::Involutive => true,
            }
    }
}

/// A freely reduced word. Constructors reduce eagerly, so words over the same
/// automaton are freely equal iff they compare `==`. Equality as tree
/// automorphisms is the separate, coarser `solver::equal`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GroupWord {
    gens: Vec<Gen>,
}

fn push_reduced(gens: &mut Vec<Gen>, g: Gen, mode: ReduceMode) {
    let g = mode.normalize(g);
    match gens.last() {
        Some(&top) if mode.cancels(top, g) => {
            gens.pop();
        }
        _ => gens.push(g),
    }
}

impl GroupWord {
    pub fn identity() -> GroupWord {
        GroupWord::default()
    }

    pub fn single(g: Gen, mode: ReduceMode) -> GroupWord {
        GroupWord { gens: vec![mode.normalize(g)] }
    }

    /// Reduces an arbitrary letter sequence. Cancellation cascades: the
    /// stack-based pass removes nested pairs in one sweep.
    pub fn from_gens<I: IntoIterator<Item = Gen>>(iter: I, mode: ReduceMode) -> GroupWord {
        let mut gens = Vec::new();
        for g in iter {
            push_reduced(&mut gens, g, mode);
        }
        GroupWord { gens }
    }

    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// True when the word is freely trivial. The group-level test is
    /// `solver::is_trivial`.
    pub fn is_identity_word(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn inverse(&self, mode: ReduceMode) -> GroupWord {
        GroupWord::from_gens(self.gens.iter().rev().map(|g| g.inverted()), mode)
    }

    pub fn concat(&self, other: &GroupWord, mode: ReduceMode) -> GroupWord {
        let mut gens = self.gens.clone();
        for &g in &other.gens {
            push_reduced(&mut gens, g, mode);
        }
        GroupWord { gens }
    }

    /// `self` conjugated by `by`: `by^-1 self by`.
    pub fn conjugated(&self, by: &GroupWord, mode: ReduceMode) -> GroupWord {
        by.inverse(mode).concat(self, mode).concat(by, mode)
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(a: &GroupWord, b: &GroupWord, mode: ReduceMode) -> GroupWord {
        a.inverse(mode)
            .concat(&b.inverse(mode), mode)
            .concat(a, mode)
            .concat(b, mode)
    }

    pub fn pow(&self, k: i64, mode: ReduceMode) -> GroupWord {
        let base = if k < 0 { self.inverse(mode) } else { self.clone() };
        let mut out = GroupWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base, mode);
        }
        out
    }

    /// Shortlex order: length first, then letterwise (state index, sign).
    pub fn shortlex_cmp(&self, other: &GroupWord) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.gens.cmp(&other.gens))
    }
}
