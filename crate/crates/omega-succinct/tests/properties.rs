//! Property tests for the structural invariants: lasso unrolling, subset
//! construction language preservation, minimization canonicity, witness
//! replay, completion, serialization round trips and deficit handling.

use proptest::prelude::*;

use omega_succinct::alphabet::Alphabet;
use omega_succinct::automaton::{AcceptanceMode, Automaton, LassoWord};
use omega_succinct::buchi;
use omega_succinct::dfa;
use omega_succinct::hoa;
use omega_succinct::mdp::{self, LabelledMdp, MdpTransition, Rational};

fn arb_automaton(mode: AcceptanceMode) -> impl Strategy<Value = Automaton> {
    (1usize..=4).prop_flat_map(move |n| {
        let edges = proptest::collection::vec(proptest::bool::ANY, n * 3 * n);
        let finals = proptest::collection::vec(proptest::bool::ANY, n);
        (edges, finals).prop_map(move |(edges, finals)| {
            let alphabet = Alphabet::standard();
            let final_states: Vec<usize> = (0..n).filter(|&q| finals[q]).collect();
            let mut a = Automaton::new(alphabet, n, 0, final_states, mode).unwrap();
            for q in 0..n {
                for s in 0..3 {
                    for t in 0..n {
                        if edges[(q * 3 + s) * n + t] {
                            let sym = a.alphabet.symbol(s);
                            a.add_edge(q, sym, t).unwrap();
                        }
                    }
                }
            }
            a
        })
    })
}

fn arb_word(max_len: usize) -> impl Strategy<Value = Vec<char>> {
    proptest::collection::vec(proptest::sample::select(vec!['0', '1', '$']), 0..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lasso_acceptance_is_unrolling_invariant(
        a in arb_automaton(AcceptanceMode::Buchi),
        stem in arb_word(4),
        cycle in arb_word(3),
    ) {
        prop_assume!(!cycle.is_empty());
        let plain = LassoWord { stem: stem.clone(), cycle: cycle.clone() };
        let mut unrolled_stem = stem;
        unrolled_stem.extend(cycle.iter().copied());
        let unrolled = LassoWord { stem: unrolled_stem, cycle };
        prop_assert_eq!(
            a.accepts_lasso(&plain).unwrap(),
            a.accepts_lasso(&unrolled).unwrap()
        );
    }

    #[test]
    fn subset_construction_preserves_language(a in arb_automaton(AcceptanceMode::Finite)) {
        let det = dfa::subset_construction(&a).unwrap();
        // Exhaustive over all words up to 2|Q|+2 letters.
        let bound = 2 * a.num_states() + 2;
        let alphabet = a.alphabet.clone();
        let mut layer: Vec<Vec<char>> = vec![Vec::new()];
        for _ in 0..=bound {
            for w in &layer {
                prop_assert_eq!(
                    a.accepts_finite(w).unwrap(),
                    det.accepts_finite(w).unwrap(),
                    "word {:?}", w
                );
            }
            layer = layer
                .iter()
                .flat_map(|w| {
                    alphabet.symbols().iter().map(move |&c| {
                        let mut v = w.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
    }

    #[test]
    fn minimization_has_no_equivalent_state_pair(a in arb_automaton(AcceptanceMode::Finite)) {
        let det = dfa::complete_with_sink(&dfa::subset_construction(&a).unwrap());
        let min = dfa::hopcroft_minimize(&det).unwrap();
        let (eq, _) = dfa::dfa_equivalent(&min, &det).unwrap();
        prop_assert!(eq, "minimization changed the language");
        for p in 0..min.num_states() {
            for q in (p + 1)..min.num_states() {
                let (same, _) = dfa::dfa_equivalent(
                    &min.rerooted(p).unwrap(),
                    &min.rerooted(q).unwrap(),
                )
                .unwrap();
                prop_assert!(!same, "states {} and {} equivalent", p, q);
            }
        }
    }

    #[test]
    fn emptiness_witness_replays(a in arb_automaton(AcceptanceMode::Buchi)) {
        let (empty, witness) = buchi::is_empty_buchi(&a).unwrap();
        if let Some(w) = witness {
            prop_assert!(!empty);
            prop_assert!(a.accepts_lasso(&w).unwrap());
        } else {
            prop_assert!(empty);
        }
    }

    #[test]
    fn loopify_is_complete(a in arb_automaton(AcceptanceMode::Finite)) {
        prop_assert!(buchi::loopify(&a).is_complete());
    }

    #[test]
    fn hoa_round_trip(a in arb_automaton(AcceptanceMode::Buchi)) {
        let text = hoa::to_hoa(&a, None);
        let back = hoa::parse_hoa(&text).unwrap();
        prop_assert_eq!(a, back);
    }
}

fn arb_subchain() -> impl Strategy<Value = LabelledMdp> {
    // 2–3 states; per state a bundle of up to three outcomes whose
    // probabilities sum to at most 1 (weights out of 8).
    (2usize..=3).prop_flat_map(|n| {
        let rows = proptest::collection::vec(
            (
                proptest::collection::vec((0usize..3, 0usize..n), 1..=3),
                1u32..=8,
            ),
            n,
        );
        rows.prop_map(move |rows| {
            let alphabet = Alphabet::standard();
            let mut m = LabelledMdp::new(alphabet, n, 0).unwrap();
            for (s, (outcomes, budget)) in rows.into_iter().enumerate() {
                let share = Rational::new(
                    num_bigint::BigInt::from(budget),
                    num_bigint::BigInt::from(8 * outcomes.len() as u32),
                );
                let bundle = outcomes
                    .into_iter()
                    .map(|(label, target)| MdpTransition {
                        prob: share.clone(),
                        label: ['0', '1', '$'][label],
                        target,
                    })
                    .collect();
                m.add_action(s, bundle).unwrap();
            }
            m
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn explicit_deficit_preserves_language_probability(m in arb_subchain()) {
        let dba = omega_succinct::families::build_dn(1).unwrap();
        let implicit = mdp::mc_language_probability(&m, &dba).unwrap();
        let explicit = mdp::mc_language_probability(&m.with_explicit_deficit(), &dba).unwrap();
        prop_assert_eq!(implicit, explicit);
    }

    #[test]
    fn syntactic_value_bounded_by_semantic(m in arb_subchain()) {
        let g1 = omega_succinct::families::build_gn(1).unwrap();
        let d1 = omega_succinct::families::build_dn(1).unwrap();
        let syn = omega_succinct::product::psyn(&m, &g1).unwrap();
        let sem = omega_succinct::product::psem(&m, &d1).unwrap();
        prop_assert!(syn <= sem);
    }
}
