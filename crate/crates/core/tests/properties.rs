//! Randomized invariants. Each property pits a library function against an
//! independent reimplementation (trial division, naive edge walks) or
//! asserts an algebraic identity that must hold for every input, not just
//! the handful of worked examples in the unit tests.

use std::collections::BTreeMap;

use proptest::prelude::*;

use primesum_core::{
    is_prime, parse_edge_list, plan_construction, serialize_edge_list, validate_ap,
    verify_labeling, ApValidation, Graph, Labeling, Mode, Provenance,
};

fn is_prime_td(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= x {
        if x % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

/// Graph on `n` vertices whose edge set is carved out of the complete graph
/// by `mask` bits, in the canonical (u < v) pair order.
fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let edges = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, e)| e);
    Graph::new(n, edges).unwrap()
}

fn arb_provenance() -> impl Strategy<Value = Provenance> {
    prop_oneof![
        Just(Provenance::External),
        Just(Provenance::BruteForced),
        (
            prop_oneof![Just(Mode::Strict), Just(Mode::Windowed)],
            2u64..1_000_000,
            1u64..1_000_000,
            1usize..60,
        )
            .prop_map(|(mode, p, d, len)| Provenance::Constructed { mode, p, d, len }),
    ]
}

proptest! {
    /// The production primality test agrees with trial division across the
    /// whole range the constructions actually use.
    #[test]
    fn is_prime_matches_trial_division(x in 0u64..=10_000_000_000) {
        prop_assert_eq!(is_prime(x), is_prime_td(x));
    }

    /// validate_ap classifies exactly the indices trial division classifies.
    #[test]
    fn ap_validation_agrees_with_trial_division(
        p in 1u64..=500,
        d in 1u64..=60,
        len in 1usize..=10,
    ) {
        let expected_failing: Vec<usize> = (0..len)
            .filter(|&k| !is_prime_td(p + k as u64 * d))
            .collect();
        match validate_ap(p, d, len).unwrap() {
            ApValidation::Valid(ap) => {
                prop_assert!(expected_failing.is_empty());
                prop_assert_eq!((ap.p(), ap.d(), ap.len()), (p, d, len));
            }
            ApValidation::Invalid { failing } => {
                prop_assert_eq!(failing, expected_failing);
            }
        }
    }

    /// Window arithmetic: for every plan, the progression must reach one
    /// step past the window top, and the window holds exactly one sum per
    /// edge-index value, m(n-1) + 1 of them.
    #[test]
    fn plan_window_arithmetic(m in 1usize..=64, n in 1usize..=64, strict in any::<bool>()) {
        let mode = if strict { Mode::Strict } else { Mode::Windowed };
        let plan = plan_construction(m, n, mode).unwrap();
        prop_assert_eq!(plan.original_mn(), (m, n));
        prop_assert_eq!(plan.is_trivial(), (m, n) == (1, 1));
        prop_assert_eq!(plan.swapped(), n == 1 && m >= 2);
        if plan.is_trivial() {
            prop_assert_eq!(plan.required_len(), 0);
            return Ok(());
        }
        let (pm, pn) = (plan.m(), plan.n());
        // Normalization only ever swaps the sides.
        prop_assert!((pm, pn) == (m, n) || (pm, pn) == (n, m));
        prop_assert!(pn >= 2, "non-trivial plans keep n >= 2 so b-indices stay distinct");
        let (lo, hi) = plan.window();
        prop_assert_eq!(hi - lo + 1, pm * (pn - 1) + 1);
        prop_assert_eq!(plan.required_len(), hi + 1);
        match mode {
            Mode::Windowed => prop_assert_eq!(lo, 0),
            Mode::Strict => prop_assert_eq!(lo, (pm - 1) * (pn - 1) + 2),
        }
        prop_assert!(plan.c().is_none(), "no AP bound yet");
    }

    /// The verifier is exactly the naive definition: distinct, positive,
    /// every edge sum prime. Checked on arbitrary graphs with arbitrary
    /// (often invalid) label assignments.
    #[test]
    fn verifier_agrees_with_naive_check(
        n in 1usize..=7,
        mask in any::<u64>(),
        raw_labels in prop::collection::vec(0u64..=120, 7),
    ) {
        let g = graph_from_mask(n, mask);
        let labels: BTreeMap<usize, u64> =
            (0..n).map(|v| (v, raw_labels[v])).collect();
        let labeling = Labeling::new(labels.clone(), Provenance::External);
        let report = verify_labeling(&g, &labeling).unwrap();

        let distinct = {
            let mut seen = std::collections::HashSet::new();
            labels.values().all(|&l| seen.insert(l))
        };
        let positive = labels.values().all(|&l| l >= 1);
        let sums_prime = g
            .edges()
            .iter()
            .all(|&(u, v)| is_prime_td(labels[&u] + labels[&v]));
        prop_assert_eq!(report.pass, distinct && positive && sums_prime);
        prop_assert_eq!(report.pass, report.violations.is_empty());
    }

    /// Serializing a graph and parsing it back is the identity.
    #[test]
    fn edge_list_round_trip(n in 1usize..=11, mask in any::<u64>()) {
        let g = graph_from_mask(n, mask);
        let text = serialize_edge_list(&g);
        let parsed = parse_edge_list(&text).unwrap();
        prop_assert_eq!(parsed, g);
    }

    /// Labeling JSON round-trips through serde including provenance.
    #[test]
    fn labeling_json_round_trip(
        entries in prop::collection::btree_map(0usize..200, 1u64..1_000_000_000_000, 0..30),
        provenance in arb_provenance(),
    ) {
        let labeling = Labeling::new(entries, provenance);
        let json = serde_json::to_string(&labeling).unwrap();
        let back: Labeling = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, labeling);
    }
}
