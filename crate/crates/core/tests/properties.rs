mod support;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rko::keys::RandomKeyVector;
use rko::mip::{knapsack, MipInstance};
use rko::portfolio::pick_position;
use rko::search::{build_searchers, run_ensemble_with, EnsembleOptions, RunBudget, RunMode, SearcherConfig};
use rko::FnDecoder;
use support::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(PROPERTY_CASES))]

    #[test]
    fn keys_stay_in_range(c in closure_case()) {
        check_key_closure(&c)?;
    }

    #[test]
    fn pool_invariants((cap, ops) in pool_ops()) {
        check_pool(cap, &ops)?;
    }

    #[test]
    fn portfolio_decoder_shape((n, k, l, u, x) in portfolio_case()) {
        check_portfolio_decode(n, k, &l, &u, &x)?;
    }

    #[test]
    fn tdtsp_decoder_shape(x in prop::collection::vec(key(), 6)) {
        check_tdtsp_decode(&x)?;
    }

    #[test]
    fn random_vectors_in_range(n in 1usize..64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = RandomKeyVector::random(n, &mut rng).unwrap();
        prop_assert_eq!(v.len(), n);
        prop_assert!(v.keys().iter().all(|k| (0.0..1.0).contains(k)));
    }

    #[test]
    fn position_map_is_monotone(a in key(), b in key(), m in 1usize..200) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (p, q) = (pick_position(lo, m), pick_position(hi, m));
        prop_assert!(p <= q);
        prop_assert!(p >= 1 && q <= m);
    }

    #[test]
    fn mip_map_respects_box(
        bounds in prop::collection::vec((-20i32..20, 0i32..15), 1..6),
        x in prop::collection::vec(key(), 6),
        p in 0usize..6,
    ) {
        let n = bounds.len();
        let p = p.min(n);
        let l: Vec<f64> = bounds.iter().map(|b| b.0 as f64).collect();
        let u: Vec<f64> = bounds.iter().map(|b| (b.0 + b.1) as f64).collect();
        let inst = MipInstance::new(vec![1.0; n], vec![vec![1.0; n]], vec![0.0], l.clone(), u.clone(), p).unwrap();
        let mapped = inst.map_keys(&x[..n]);
        for i in 0..n {
            prop_assert!(l[i] <= mapped[i] && mapped[i] <= u[i]);
            if i < p {
                prop_assert_eq!(mapped[i].fract(), 0.0);
            }
        }
        let f = inst.check_feasibility(&mapped);
        prop_assert!(f.bounds_ok && f.integral_ok);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ensemble_trace_is_monotone(seed in any::<u64>(), calls in 50u64..600) {
        let dec = FnDecoder::new(5, bumpy);
        let searchers = build_searchers(&SearcherConfig::default_set()).unwrap();
        let opts = EnsembleOptions { mode: RunMode::sequential(), ..EnsembleOptions::default() };
        let r = run_ensemble_with(&dec, &searchers, &RunBudget::calls(calls, seed), &opts).unwrap();
        prop_assert!(r.decoder_calls <= calls);
        for w in r.trace.windows(2) {
            prop_assert!(w[1].cost < w[0].cost);
            prop_assert!(w[1].calls > w[0].calls);
        }
        prop_assert_eq!(r.trace.last().unwrap().cost, r.best_cost);
    }
}

#[test]
fn knapsack_decodes_every_subset() {
    // every binary vector is reachable: keys 0.25 / 0.75 map to 0 / 1
    let inst = knapsack(&[3.0, 4.0, 5.0], &[1.0, 2.0, 3.0], 7.0).unwrap();
    for mask in 0u32..8 {
        let keys: Vec<f64> = (0..3).map(|i| if mask >> i & 1 == 1 { 0.75 } else { 0.25 }).collect();
        let x = inst.map_keys(&keys);
        let back: u32 = x.iter().enumerate().map(|(i, v)| (*v as u32) << i).sum();
        assert_eq!(back, mask);
    }
}
