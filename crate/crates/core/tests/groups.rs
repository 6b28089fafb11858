//! Cross-module properties: the action/section laws that make the wreath
//! recursion an automorphism action, homomorphism laws for the derived maps
//! (tau, abelianization, the injective endomorphism), contraction into the
//! nucleus, and classification sweeps over all small groups.

use img_core::automaton::{act, classify_state, restrict, AutomatonSpec, StateClass, Vertex};
use img_core::kneading::{BitWord, KvGroup, KwvGroup};
use img_core::solver::{
    equal, is_trivial, nucleus_closure, order_probe, tau_word, ElementOrder, NucleusOptions,
    OrderProbeOptions,
};
use img_core::word::{Gen, GroupWord, ReduceMode, StateId};
use proptest::prelude::*;

fn kv(bits: &str) -> KvGroup {
    KvGroup::new(BitWord::parse(bits).unwrap())
}

fn kwv(w: &str, v: &str) -> KwvGroup {
    KwvGroup::new(BitWord::parse(w).unwrap(), BitWord::parse(v).unwrap()).unwrap()
}

/// Builds a word from `(state, inverted)` picks, wrapping the state index.
fn word_from(spec: &AutomatonSpec, picks: &[(u8, bool)]) -> GroupWord {
    let ids: Vec<StateId> = spec.state_ids().collect();
    let mode = spec.mode();
    let mut w = GroupWord::identity();
    for &(i, inv) in picks {
        let mut g = Gen::plain(ids[i as usize % ids.len()]);
        if inv && mode == ReduceMode::Signed {
            g = g.inverted();
        }
        w = w.concat(&GroupWord::single(g, mode), mode);
    }
    w
}

fn sample_specs() -> Vec<AutomatonSpec> {
    vec![
        kv("10").spec().clone(),
        kv("0").spec().clone(),
        kwv("1", "10").spec().clone(),
        kwv("110", "1").spec().clone(),
    ]
}

type Picks = Vec<(u8, bool)>;

fn picks() -> impl Strategy<Value = Picks> {
    proptest::collection::vec((0u8..8, any::<bool>()), 0..8)
}

proptest! {
    // x · (uw) = (x · u) · w and (uw)|_x = u|_x · w|_{x·u}, on every vertex
    // of the third level.
    #[test]
    fn action_composes_and_sections_cohere(u in picks(), w in picks(), which in 0usize..4) {
        let spec = &sample_specs()[which];
        let mode = spec.mode();
        let uw = word_from(spec, &u);
        let ww = word_from(spec, &w);
        let prod = uw.concat(&ww, mode);
        for idx in 0..8 {
            let x = Vertex::from_index(3, idx);
            let through = act(&uw, &x, spec);
            prop_assert_eq!(act(&prod, &x, spec), act(&ww, &through, spec));
            let lhs = restrict(&prod, &x, spec);
            let rhs = restrict(&uw, &x, spec).concat(&restrict(&ww, &through, spec), mode);
            prop_assert!(equal(&lhs, &rhs, spec));
        }
    }

    #[test]
    fn inverses_cancel(u in picks(), which in 0usize..4) {
        let spec = &sample_specs()[which];
        let w = word_from(spec, &u);
        let inv = w.inverse(spec.mode());
        prop_assert!(is_trivial(&w.concat(&inv, spec.mode()), spec));
        for idx in 0..16 {
            let x = Vertex::from_index(4, idx);
            prop_assert_eq!(act(&inv, &act(&w, &x, spec), spec), x);
        }
    }

    // tau is a homomorphism onto level parities.
    #[test]
    fn tau_adds_levelwise(u in picks(), w in picks(), which in 0usize..4) {
        let spec = &sample_specs()[which];
        let uw = word_from(spec, &u);
        let ww = word_from(spec, &w);
        let prod = uw.concat(&ww, spec.mode());
        prop_assert_eq!(tau_word(&prod, spec), tau_word(&uw, spec).xor(&tau_word(&ww, spec)));
    }

    #[test]
    fn abelianization_is_additive(u in picks(), w in picks()) {
        let signed = kv("10");
        let uw = word_from(signed.spec(), &u);
        let ww = word_from(signed.spec(), &w);
        let prod = uw.concat(&ww, ReduceMode::Signed);
        let sum: Vec<i64> = signed
            .abelianize(&uw)
            .iter()
            .zip(signed.abelianize(&ww))
            .map(|(a, b)| a + b)
            .collect();
        prop_assert_eq!(signed.abelianize(&prod), sum);

        let involutive = kwv("1", "10");
        let uw = word_from(involutive.spec(), &u);
        let ww = word_from(involutive.spec(), &w);
        let prod = uw.concat(&ww, ReduceMode::Involutive);
        let sum: Vec<u8> = involutive
            .abelianize(&uw)
            .iter()
            .zip(involutive.abelianize(&ww))
            .map(|(a, b)| (a + b) % 2)
            .collect();
        prop_assert_eq!(involutive.abelianize(&prod), sum);
    }

    // phi respects products exactly, not just up to the group relation.
    #[test]
    fn endomorphism_respects_products(u in picks(), w in picks()) {
        let signed = kv("11");
        let phi = signed.endomorphism();
        let uw = word_from(signed.spec(), &u);
        let ww = word_from(signed.spec(), &w);
        let lhs = phi.apply(&uw.concat(&ww, ReduceMode::Signed));
        let rhs = phi.apply(&uw).concat(&phi.apply(&ww), ReduceMode::Signed);
        prop_assert!(equal(&lhs, &rhs, signed.spec()));

        let involutive = kwv("11", "10");
        let phi = involutive.endomorphism().unwrap().phi;
        let uw = word_from(involutive.spec(), &u);
        let ww = word_from(involutive.spec(), &w);
        let lhs = phi.apply(&uw.concat(&ww, ReduceMode::Involutive));
        let rhs = phi.apply(&uw).concat(&phi.apply(&ww), ReduceMode::Involutive);
        prop_assert!(equal(&lhs, &rhs, involutive.spec()));
    }

    // Repeated sections of any reasonably short word land in the nucleus.
    #[test]
    fn sections_contract_into_the_nucleus(u in proptest::collection::vec((0u8..8, any::<bool>()), 1..7), which in 0usize..4) {
        let spec = &sample_specs()[which];
        let nucleus = nucleus_closure(spec, NucleusOptions::default()).unwrap();
        let mut frontier = vec![word_from(spec, &u)];
        let mut contracted = false;
        for _ in 0..16 {
            if frontier.iter().all(|g| nucleus.contains(g, spec)) {
                contracted = true;
                break;
            }
            let mut next: Vec<GroupWord> = Vec::new();
            for g in &frontier {
                for x in 0..2 {
                    let s = restrict(g, &Vertex::from_index(1, x), spec);
                    if !next.iter().any(|t| equal(t, &s, spec)) {
                        next.push(s);
                    }
                }
            }
            frontier = next;
        }
        prop_assert!(contracted, "sections still outside the nucleus after 16 levels");
    }
}

#[test]
fn nucleus_contains_generators_and_is_closed() {
    for spec in sample_specs() {
        let nucleus = nucleus_closure(&spec, NucleusOptions::default()).unwrap();
        assert!(nucleus.contains(&GroupWord::identity(), &spec));
        for id in spec.state_ids() {
            let g = GroupWord::single(Gen::plain(id), spec.mode());
            assert!(nucleus.contains(&g, &spec), "generator {id:?} missing");
        }
        for m in nucleus.members() {
            assert!(nucleus.contains(&m.inverse(spec.mode()), &spec));
            for x in 0..2 {
                let s = restrict(m, &Vertex::from_index(1, x), &spec);
                assert!(nucleus.contains(&s, &spec), "section of a member escapes");
            }
        }
    }
}

/// No small nonzero exponent vector annihilates: the generator images form a
/// basis of the free abelianization.
#[test]
fn kv_generators_are_independent_in_the_abelianization() {
    let mut words = vec![BitWord::empty()];
    for len in 1..=3usize {
        for i in 0..1u32 << len {
            words.push(BitWord::parse(&format!("{i:0len$b}")).unwrap());
        }
    }
    for v in words {
        let g = KvGroup::new(v);
        let n = g.n();
        for code in 0..7usize.pow(n as u32) {
            let mut rest = code;
            let mut coeffs = Vec::with_capacity(n);
            let mut word = GroupWord::identity();
            for i in 1..=n {
                let e = (rest % 7) as i64 - 3;
                rest /= 7;
                coeffs.push(e);
                word = word.concat(&g.gen_word(i).pow(e, ReduceMode::Signed), ReduceMode::Signed);
            }
            if coeffs.iter().all(|&e| e == 0) {
                assert!(is_trivial(&word, g.spec()));
                continue;
            }
            assert!(
                !is_trivial(&word, g.spec()),
                "{}: coefficients {coeffs:?} annihilate",
                g.display_name()
            );
            assert_eq!(g.abelianize(&word), coeffs);
        }
    }
}

/// Every generator of every small group is finitary or directed, and the
/// directed rays follow the kneading letters.
#[test]
fn generators_classify_as_finitary_or_directed() {
    let mut words = vec![BitWord::empty()];
    for len in 1..=4usize {
        for i in 0..1u32 << len {
            words.push(BitWord::parse(&format!("{i:0len$b}")).unwrap());
        }
    }
    for v in &words {
        let g = KvGroup::new(v.clone());
        for i in 1..=g.n() {
            let id = g.gen_word(i).gens()[0].state;
            match classify_state(g.spec(), Some(id)) {
                StateClass::Directed { cycle } => assert_eq!(cycle, g.expected_ray(i)),
                other => panic!("{} generator a{i} classified {other:?}", g.display_name()),
            }
        }
    }
    for w in words.iter().filter(|b| !b.is_empty() && b.len() <= 3) {
        for v in words.iter().filter(|b| !b.is_empty() && b.len() <= 3) {
            let Ok(g) = KwvGroup::new(w.clone(), v.clone()) else { continue };
            for j in 1..=g.k() {
                let id = g.b_word(j).gens()[0].state;
                match classify_state(g.spec(), Some(id)) {
                    StateClass::Finitary { depth } => assert!(depth <= g.k()),
                    other => panic!("{} generator b{j} classified {other:?}", g.display_name()),
                }
            }
            for i in 1..=g.n() {
                let id = g.a_word(i).gens()[0].state;
                match classify_state(g.spec(), Some(id)) {
                    StateClass::Directed { cycle } => assert_eq!(cycle, g.expected_ray(i)),
                    other => panic!("{} generator a{i} classified {other:?}", g.display_name()),
                }
            }
        }
    }
}

/// In the infinite dihedral group, words with odd generator count are
/// reflections of order 2; nontrivial even words are translations, and the
/// probe never invents a finite order for them.
#[test]
fn dihedral_orders_split_by_parity() {
    let g = kwv("0", "1");
    let opts = OrderProbeOptions { small_scan: 16, max_exp: 6, max_word_len: 1 << 12 };
    let b1 = g.b_word(1);
    let a1 = g.a_word(1);
    let mut w = GroupWord::identity();
    for len in 1..=9usize {
        let letter = if len % 2 == 1 { &b1 } else { &a1 };
        w = w.concat(letter, ReduceMode::Involutive);
        let ord = order_probe(&w, g.spec(), g.traits(), opts);
        if len % 2 == 1 {
            assert_eq!(ord, ElementOrder::Finite(2), "odd word of length {len}");
        } else {
            assert!(
                !matches!(ord, ElementOrder::Finite(_)),
                "even word of length {len} probed {ord:?}"
            );
        }
    }
}

#[test]
fn spec_json_is_deterministic_and_well_formed() {
    for spec in sample_specs() {
        let first = spec.to_json();
        assert_eq!(first, spec.to_json());
        let value: serde_json::Value = serde_json::from_str(&first).unwrap();
        let states = value["states"].as_array().unwrap();
        assert_eq!(states.len(), spec.state_count());
        for state in states {
            assert!(state["name"].is_string());
            assert!(state["active"].is_boolean());
        }
    }
}
