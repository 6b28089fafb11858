//! Relator families for the kneading groups, their expansion through the
//! group endomorphism, exact soundness checking, and text emission of the
//! finitely presented ascending HNN overgroups.
//!
//! The tree groups are recursively presented: a finite seed of relators
//! together with all of its images under powers of the endomorphism `phi`
//! presents the group.  Everything here stays at the level of words — a
//! relator is a [`GroupWord`] that the solver can check is trivial — except
//! for the HNN emitters, which produce text in the syntax accepted by
//! [`crate::parser::parse_word`] over the overgroup alphabet.

use std::fmt::Write as _;

use serde::Serialize;

use crate::automaton::{AutomatonSpec, Letter};
use crate::kneading::{Endomorphism, KvGroup, KwvEndomorphism, KwvGroup};
use crate::solver::{equal, exponent_sums, is_trivial};
use crate::word::{GroupWord, ReduceMode};

/// A finite batch of relators, all trivial in the group they belong to.
///
/// `levels` records how many endomorphism levels the constructor already
/// folded into `base` (seed families use 0).  Every word in `base` is
/// freely reduced and nonempty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RelatorFamily {
    pub base: Vec<GroupWord>,
    pub levels: u32,
}

impl RelatorFamily {
    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }
}

/// Seed relators for a periodic-kneading group: commutators
/// `[a_i, a_j^{a_1^e}]` for `i, j in 2..=n`, where the exponent `e <= max_exponent`
/// runs over even values (including 0) when the routing letters `x_{i-1}`,
/// `x_{j-1}` differ and over odd values when they agree.  Words that reduce
/// to the identity are dropped.  For one generator the seed is empty.
pub fn relators_kv(group: &KvGroup, max_exponent: u32) -> RelatorFamily {
    let mode = group.spec().mode();
    let n = group.n();
    let a1 = group.gen_word(1);
    let mut base = Vec::new();
    for i in 2..=n {
        for j in 2..=n {
            let same = group.v().at(i - 1) == group.v().at(j - 1);
            for e in 0..=max_exponent {
                if (e % 2 == 1) != same {
                    continue;
                }
                let conj = group.gen_word(j).conjugated(&a1.pow(e as i64, mode), mode);
                let rel = GroupWord::commutator(&group.gen_word(i), &conj, mode);
                if !rel.is_identity_word() {
                    base.push(rel);
                }
            }
        }
    }
    RelatorFamily { base, levels: 0 }
}

/// The elements of the dihedral subgroup `<a_1^t, b_1>` (order `2^{m+2}`),
/// split by the parity of their `b_1`-exponent: `(odd, even)`.
///
/// Elements are enumerated as alternating products of `A = a_1^t` and
/// `B = b_1` by length, the `A`-initial word before the `B`-initial one at
/// each length, and deduplicated by group equality keeping the first
/// occurrence.  Both classes have `2^{m+1}` elements; the identity is the
/// first even element.
pub fn dihedral_classes(group: &KwvGroup, data: &KwvEndomorphism) -> (Vec<GroupWord>, Vec<GroupWord>) {
    let spec = group.spec();
    let mode = spec.mode();
    let a = group.a_word(1).conjugated(&data.t, mode);
    let b = group.b_word(1);
    let order = 1usize << (data.m + 2);

    let mut elements: Vec<GroupWord> = Vec::new();
    for len in 0..order {
        for start in 0..2usize {
            if len == 0 && start == 1 {
                continue;
            }
            let mut word = GroupWord::identity();
            for pos in 0..len {
                let factor = if (pos + start) % 2 == 0 { &a } else { &b };
                word = word.concat(factor, mode);
            }
            if !elements.iter().any(|seen| equal(seen, &word, spec)) {
                elements.push(word);
            }
        }
    }

    let mut odd = Vec::new();
    let mut even = Vec::new();
    for word in elements {
        // b_1 is the first state, so its exponent sum is the first entry.
        if exponent_sums(&word, spec)[0].rem_euclid(2) == 1 {
            odd.push(word);
        } else {
            even.push(word);
        }
    }
    (odd, even)
}

fn commutation_block(
    first: &GroupWord,
    second: &GroupWord,
    conjugators: &[GroupWord],
    mode: ReduceMode,
    out: &mut Vec<GroupWord>,
) {
    for w in conjugators {
        let rel = GroupWord::commutator(first, &second.conjugated(w, mode), mode);
        if !rel.is_identity_word() {
            out.push(rel);
        }
    }
}

/// Seed relators for a strictly pre-periodic kneading group: the commutation
/// families `[b_i, b_j^w]`, `[a_i, b_j^w]`, `[a_i, a_j^w]` with indices
/// starting at 2, where `w` runs over the odd dihedral class when the two
/// routing letters agree and over the even class when they differ.  The
/// routing letter of `b_j` is `y_{j-1}` and of `a_i` is `x_{i-1}`.
pub fn relators_kwv(group: &KwvGroup, data: &KwvEndomorphism) -> RelatorFamily {
    let mode = group.spec().mode();
    let (odd, even) = dihedral_classes(group, data);
    let class = |same: bool| if same { &odd } else { &even };
    let k = group.k();
    let n = group.n();
    let route_b = |j: usize| group.w().at(j - 1);
    let route_a = |i: usize| group.v().at(i - 1);

    let mut base = Vec::new();
    for i in 2..=k {
        for j in 2..=k {
            let conj = class(route_b(i) == route_b(j));
            commutation_block(&group.b_word(i), &group.b_word(j), conj, mode, &mut base);
        }
    }
    for i in 2..=n {
        for j in 2..=k {
            let conj = class(route_a(i) == route_b(j));
            commutation_block(&group.a_word(i), &group.b_word(j), conj, mode, &mut base);
        }
    }
    for i in 2..=n {
        for j in 2..=n {
            let conj = class(route_a(i) == route_a(j));
            commutation_block(&group.a_word(i), &group.a_word(j), conj, mode, &mut base);
        }
    }
    RelatorFamily { base, levels: 0 }
}

/// Fixed relators of a strictly pre-periodic kneading group that are not
/// endomorphism-expanded by the caller: pairwise commutation of the
/// generators `a_i` within each residue class modulo `n/d` (where `d` is the
/// power degree of the period word), followed by the torsion relator
/// `T = (a_n^s b_k)^{2^m}` and its images `phi^l(T)` for `l <= levels`.
///
/// The generator squares are part of the presentation too, but an involutive
/// word reduces them away; they appear only as text in the presentation
/// documents, and their soundness is the involution check on the automaton.
pub fn fbar_relators(group: &KwvGroup, data: &KwvEndomorphism, levels: u32) -> RelatorFamily {
    let mode = group.spec().mode();
    let n = group.n();
    let d = group.period_degree();
    let step = n / d;

    let mut base = Vec::new();
    for i in 1..=step {
        let class: Vec<usize> = (0..d).map(|l| i + l * step).collect();
        for p in 0..class.len() {
            for q in (p + 1)..class.len() {
                let rel =
                    GroupWord::commutator(&group.a_word(class[p]), &group.a_word(class[q]), mode);
                if !rel.is_identity_word() {
                    base.push(rel);
                }
            }
        }
    }

    let core = group
        .a_word(n)
        .conjugated(&data.s, mode)
        .concat(&group.b_word(group.k()), mode);
    let torsion = core.pow(1i64 << data.m, mode);
    for l in 0..=levels {
        let img = data.phi.apply_iter(&torsion, l);
        if !img.is_identity_word() {
            base.push(img);
        }
    }
    RelatorFamily { base, levels }
}

/// All images `phi^l(r)` for `r` in the family and `0 <= l <= levels`,
/// ordered by level and then by the family order, with identity words
/// dropped.
pub fn phi_expand(family: &RelatorFamily, phi: &Endomorphism, levels: u32) -> Vec<GroupWord> {
    let mut out = Vec::new();
    for l in 0..=levels {
        for base in &family.base {
            let img = phi.apply_iter(base, l);
            if !img.is_identity_word() {
                out.push(img);
            }
        }
    }
    out
}

/// Result of checking a batch of claimed relators against the word problem.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifyReport {
    pub raw_count: usize,
    /// Count after removing words that repeat an earlier word letter for
    /// letter.  (Group equality would be useless here: all sound relators
    /// are equal to the identity.)
    pub deduped_count: usize,
    pub failures: Vec<GroupWord>,
}

impl VerifyReport {
    pub fn all_trivial(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that every word is trivial in the group described by `spec`.
pub fn verify_relators(words: &[GroupWord], spec: &AutomatonSpec) -> VerifyReport {
    let mut seen: Vec<&GroupWord> = Vec::new();
    let mut failures = Vec::new();
    for w in words {
        if seen.contains(&w) {
            continue;
        }
        seen.push(w);
        if !is_trivial(w, spec) {
            failures.push(w.clone());
        }
    }
    VerifyReport { raw_count: words.len(), deduped_count: seen.len(), failures }
}

/// A presentation rendered as text.  Relator strings parse back with
/// [`crate::parser::parse_word`] over the listed generators (HNN relators
/// use signed words; tree-group relators use the group's own mode).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PresentationDoc {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    /// Kneading polynomial of the period word, when the presentation has one.
    pub p: Option<String>,
    /// Kneading polynomial of the pre-period word, for the pre-periodic case.
    pub q: Option<String>,
    pub notes: Vec<String>,
}

impl PresentationDoc {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "generators: {}", self.generators.join(", "));
        if let Some(p) = &self.p {
            let _ = writeln!(out, "p(t) = {p}");
        }
        if let Some(q) = &self.q {
            let _ = writeln!(out, "q(t) = {q}");
        }
        let _ = writeln!(out, "relators:");
        for r in &self.relators {
            let _ = writeln!(out, "  {r}");
        }
        if !self.notes.is_empty() {
            let _ = writeln!(out, "notes:");
            for note in &self.notes {
                let _ = writeln!(out, "  {note}");
            }
        }
        out
    }
}

fn t_power(i: usize) -> String {
    if i == 1 {
        "t".to_string()
    } else {
        format!("t^{i}")
    }
}

fn gen_t_conj(gen: &str, i: usize) -> String {
    if i == 1 {
        format!("{gen}^t")
    } else {
        format!("{gen}^(t^{i})")
    }
}

/// Ascending-degree polynomial over {0,1} coefficients; zero is "0".
fn poly_text(coeffs: &[bool]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c)
        .map(|(deg, _)| match deg {
            0 => "1".to_string(),
            1 => "t".to_string(),
            d => format!("t^{d}"),
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// `gen` raised to a polynomial, as a conjugator token: `None` for the zero
/// polynomial (the token is the identity), the bare name for the constant 1.
fn poly_conj(gen: &str, poly: &str) -> Option<String> {
    match poly {
        "0" => None,
        "1" => Some(gen.to_string()),
        _ => Some(format!("{gen}^({poly})")),
    }
}

/// Finite presentation of the ascending HNN extension of a periodic-kneading
/// group, on generators `a` and `t`.  The embedding sends `a` to the inverse
/// of the first tree generator and conjugation by `t` to the endomorphism;
/// with `p(t) = x_{n-1} t + ... + x_1 t^{n-1}` the relators are
/// `a^(t^n - 2 a^(p))` and the commutators `[a^(t^i), a^(t^j a)]`,
/// `[a^(t^i), a^(t^j a^3)]` for `1 <= i, j < n`.
pub fn emit_hnn_kv(group: &KvGroup) -> PresentationDoc {
    let n = group.n();
    let coeffs: Vec<bool> =
        (0..n).map(|deg| deg >= 1 && group.v().at(n - deg) == Letter::ONE).collect();
    let p = poly_text(&coeffs);

    let mut relators = Vec::new();
    let main = match poly_conj("a", &p) {
        None => format!("a^({} - 2)", t_power(n)),
        Some(c) => format!("a^({} - 2 {c})", t_power(n)),
    };
    relators.push(main);
    for i in 1..n {
        for j in 1..n {
            relators.push(format!("[{}, a^({} a)]", gen_t_conj("a", i), t_power(j)));
        }
    }
    for i in 1..n {
        for j in 1..n {
            relators.push(format!("[{}, a^({} a^3)]", gen_t_conj("a", i), t_power(j)));
        }
    }

    let notes = vec![
        format!(
            "{} embeds as the subgroup generated by the conjugates a^(t^i) for 0 <= i < {}; \
             a maps to the inverse of a1 and conjugation by t realizes the endomorphism",
            group.display_name(),
            n,
        ),
        "the tree generators are recovered by a_(i+1) = a^(x_i) a_i^t a^(-x_i), starting \
         from a_1 = a^-1; the first relator says a_n^t = a_1^2"
            .to_string(),
        "each relator maps to the identity in the tree group; completeness of the list is \
         not machine-checked"
            .to_string(),
    ];

    PresentationDoc {
        generators: vec!["a".to_string(), "t".to_string()],
        relators,
        p: Some(p),
        q: None,
        notes,
    }
}

/// Finite presentation of the ascending HNN extension of a strictly
/// pre-periodic kneading group, on generators `a`, `b`, `t`.  The embedding
/// sends `b` to `b_1`, `a` to `a_1^u`, and conjugation by `t` to the
/// endomorphism; `p(t) = x_n + ... + x_1 t^(n-1)` and
/// `q(t) = y_k + ... + y_1 t^(k-1)`.
pub fn emit_hnn_kwv(group: &KwvGroup, data: &KwvEndomorphism) -> PresentationDoc {
    let k = group.k();
    let n = group.n();
    let d = group.period_degree();
    let step = n / d;

    let p_coeffs: Vec<bool> = (0..n).map(|deg| group.v().at(n - deg) == Letter::ONE).collect();
    let q_coeffs: Vec<bool> = (0..k).map(|deg| group.w().at(k - deg) == Letter::ONE).collect();
    let p = poly_text(&p_coeffs);
    let q = poly_text(&q_coeffs);

    // Images of b_2, b_2^{b_1}, b_3, b_3^{b_1} under the identification.
    const U_TOKENS: [&str; 4] = ["b^t", "b^(t b)", "b^(t^2)", "b^(t^2 b)"];
    let u_inv: Vec<&str> = data.u_factors.iter().rev().map(|&i| U_TOKENS[i]).collect();
    let u_prefix =
        if u_inv.is_empty() { String::new() } else { format!("{} ", u_inv.join(" ")) };

    let mut relators = vec![
        "a^2".to_string(),
        "b^2".to_string(),
        format!("(a b)^{}", 1u64 << (data.m + 1)),
    ];

    // b_k^t = a_1^{u b_1^{y_k}} under the identification.
    let rel4_rhs = match poly_conj("b", &q) {
        None => "a".to_string(),
        Some(c) if c == "b" => "a^b".to_string(),
        Some(c) => format!("a^({c})"),
    };
    relators.push(format!("{} {}", gen_t_conj("b", k), rel4_rhs));

    // a_n^t = a_1^{b_1^{x_n}}, written through a = a_1^u.
    let term1 = format!("{u_prefix}{}", t_power(n));
    let term2 = match poly_conj("b", &p) {
        None if u_inv.is_empty() => "1".to_string(),
        None => u_inv.join(" "),
        Some(c) => format!("{u_prefix}{c}"),
    };
    relators.push(format!("a^({term1} - {term2})"));

    for j in 1..d {
        relators.push(format!("[a, a^({})]", t_power(j * step)));
    }

    let ell_max = 1u64 << data.m;
    let dihedral_conj = |j: usize, l: u64| {
        if l == 0 {
            format!("{} b", t_power(j))
        } else {
            format!("{} b (a b)^{}", t_power(j), 2 * l)
        }
    };
    for i in 1..k {
        for j in 1..k {
            for l in 0..=ell_max {
                relators.push(format!("[{}, b^({})]", gen_t_conj("b", i), dihedral_conj(j, l)));
            }
        }
    }
    for i in 1..n {
        for j in 1..k {
            for l in 0..=ell_max {
                relators.push(format!("[{}, b^({})]", gen_t_conj("a", i), dihedral_conj(j, l)));
            }
        }
    }
    for i in 1..n {
        for j in 1..n {
            for l in 0..=ell_max {
                relators.push(format!("[{}, a^({})]", gen_t_conj("a", i), dihedral_conj(j, l)));
            }
        }
    }

    let notes = vec![
        format!(
            "{} embeds with b = b1, a = a1 conjugated by u, and conjugation by t realizing \
             the endomorphism; a is redundant (the fourth relator expresses b_k^t through it)",
            group.display_name(),
        ),
        format!("a b has order {}", 1u64 << (data.m + 1)),
        "each relator maps to the identity in the tree group; completeness of the list is \
         not machine-checked"
            .to_string(),
    ];

    PresentationDoc {
        generators: vec!["a".to_string(), "b".to_string(), "t".to_string()],
        relators,
        p: Some(p),
        q: Some(q),
        notes,
    }
}

/// The recursive presentation of a periodic-kneading group, truncated at
/// `levels` endomorphism expansions of the seed commutators.
pub fn presentation_doc_kv(group: &KvGroup, levels: u32) -> PresentationDoc {
    let table = crate::parser::SymbolTable::from_spec(group.spec());
    let seed = relators_kv(group, 2);
    let phi = group.endomorphism();
    let words = phi_expand(&seed, &phi, levels);
    let relators: Vec<String> =
        words.iter().map(|w| crate::parser::format_word(w, &table)).collect();

    let mut notes = vec![format!(
        "relators are the endomorphism images, through level {levels}, of the seed \
         commutators; the full presentation takes all levels"
    )];
    if group.n() == 1 {
        notes.push("the seed is empty: the group is infinite cyclic".to_string());
    }

    PresentationDoc { generators: group.spec().state_names(), relators, p: None, q: None, notes }
}

/// The recursive presentation of a strictly pre-periodic kneading group,
/// truncated at `levels` expansions: generator squares (as text), the fixed
/// relators, and the expanded commutation families.
pub fn presentation_doc_kwv(
    group: &KwvGroup,
    data: &KwvEndomorphism,
    levels: u32,
) -> PresentationDoc {
    let table = crate::parser::SymbolTable::from_spec(group.spec());
    let mut relators: Vec<String> =
        group.spec().state_names().iter().map(|name| format!("{name}^2")).collect();
    for w in &fbar_relators(group, data, levels).base {
        relators.push(crate::parser::format_word(w, &table));
    }
    let seed = relators_kwv(group, data);
    for w in phi_expand(&seed, &data.phi, levels) {
        relators.push(crate::parser::format_word(&w, &table));
    }

    let notes = vec![
        "generator squares are listed as text only: an involutive word reduces them away, \
         and their soundness is the involution check on the automaton"
            .to_string(),
        format!(
            "the remaining relators are the fixed family plus endomorphism images of the \
             commutation seed through level {levels}; the full presentation takes all levels"
        ),
    ];

    PresentationDoc { generators: group.spec().state_names(), relators, p: None, q: None, notes }
}
