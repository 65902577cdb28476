#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rko::keys::{EvaluatedSolution, RandomKeyVector, KEY_MAX};
use rko::local_search::rvnd;
use rko::perturb::{blend, shake, BlendConfig, ShakeConfig};
use rko::pool::ElitePool;
use rko::portfolio::{PortfolioDecoder, PortfolioInstance};
use rko::tdtsp::{lower_bound_l, six_customer_example, TdTspDecoder};
use rko::{Decoder, FnDecoder};

pub const PROPERTY_CASES: u32 = 10_000;

/// Keys drawn from the whole key range including its edges.
pub fn key() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => 0.0..1.0f64,
        1 => Just(0.0),
        1 => Just(KEY_MAX),
    ]
}

pub fn keys(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(key(), min..=max)
}

fn in_range(v: &RandomKeyVector) -> bool {
    v.keys().iter().all(|k| (0.0..1.0).contains(k))
}

fn rkv(k: Vec<f64>) -> RandomKeyVector {
    RandomKeyVector::from_keys(k).expect("strategy yields valid keys")
}

pub fn bumpy(keys: &[f64]) -> f64 {
    keys.iter()
        .enumerate()
        .map(|(i, k)| (k - 0.37).powi(2) + 0.05 * ((i + 1) as f64 * 9.0 * k).sin())
        .sum()
}

#[derive(Debug, Clone)]
pub struct ClosureCase {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub beta: (f64, f64),
    pub rho: f64,
    pub mu: f64,
    pub negate: bool,
    pub seed: u64,
}

pub fn closure_case() -> impl Strategy<Value = ClosureCase> {
    (1usize..=12)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(key(), n),
                prop::collection::vec(key(), n),
                (0.01..=1.0f64, 0.01..=1.0f64),
                0.0..=1.0f64,
                0.0..=1.0f64,
                any::<bool>(),
                any::<u64>(),
            )
        })
        .prop_map(|(a, b, (x, y), rho, mu, negate, seed)| ClosureCase {
            a,
            b,
            beta: (x.min(y), x.max(y)),
            rho,
            mu,
            negate,
            seed,
        })
}

/// Shake, blend and RVND outputs stay inside [0, 1); shake touches at most
/// two keys per move; RVND never worsens its start.
pub fn check_key_closure(c: &ClosureCase) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let a = rkv(c.a.clone());
    let b = rkv(c.b.clone());
    let cfg = ShakeConfig::new(c.beta.0, c.beta.1).unwrap();
    let s = shake(&a, &cfg, &mut rng);
    prop_assert!(in_range(&s));
    prop_assert_eq!(s.len(), a.len());
    let changed = s.keys().iter().zip(a.keys()).filter(|(x, y)| x != y).count();
    let bound = 2 * (c.beta.1 * a.len() as f64).ceil() as usize;
    prop_assert!(changed <= bound, "{changed} keys changed, bound {bound}");

    let bcfg = BlendConfig::new(c.rho, c.mu, if c.negate { -1 } else { 1 }).unwrap();
    let child = blend(&a, &b, &bcfg, &mut rng).unwrap();
    prop_assert!(in_range(&child));

    let dec = FnDecoder::new(a.len(), bumpy);
    let start = EvaluatedSolution::new(a.clone(), dec.cost(a.keys()), 0).unwrap();
    let out = rvnd(&start, &dec, 40, &mut rng);
    prop_assert!(in_range(out.vector()));
    prop_assert!(out.cost() <= start.cost());
    Ok(())
}

pub fn pool_ops() -> impl Strategy<Value = (usize, Vec<(Vec<f64>, f64)>)> {
    (
        1usize..=6,
        prop::collection::vec(
            (
                prop::collection::vec(prop_oneof![Just(0.25), Just(0.5), 0.0..1.0f64], 2),
                prop_oneof![Just(1.0), Just(2.0), -10.0..10.0f64],
            ),
            1..40,
        ),
    )
}

/// Capacity is never exceeded and fills exactly, the best cost never rises,
/// members stay distinct and sorted.
pub fn check_pool(capacity: usize, ops: &[(Vec<f64>, f64)]) -> Result<(), TestCaseError> {
    let pool = ElitePool::new(capacity).unwrap();
    let mut best = f64::INFINITY;
    let mut distinct: Vec<Vec<f64>> = Vec::new();
    for (i, (k, c)) in ops.iter().enumerate() {
        let sol = EvaluatedSolution::new(rkv(k.clone()), *c, i as u64).unwrap();
        pool.insert(sol);
        if !distinct.contains(k) {
            distinct.push(k.clone());
        }
        let snap = pool.snapshot();
        prop_assert!(snap.len() <= capacity);
        prop_assert_eq!(snap.len(), distinct.len().min(capacity));
        let b = snap[0].cost();
        prop_assert!(b <= best);
        best = b;
        for w in snap.windows(2) {
            prop_assert!(w[0].cost() <= w[1].cost());
        }
        for (x, s) in snap.iter().enumerate() {
            for t in &snap[x + 1..] {
                prop_assert!(s.vector().keys() != t.vector().keys());
            }
        }
    }
    Ok(())
}

pub fn portfolio_case() -> impl Strategy<Value = (usize, usize, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..=12)
        .prop_flat_map(|n| (Just(n), 1..=n))
        .prop_flat_map(|(n, k)| {
            (
                Just(n),
                Just(k),
                prop::collection::vec(0.0..0.2f64, n),
                prop::collection::vec(0.0..=1.0f64, n),
                prop::collection::vec(key(), 2 * k),
            )
        })
}

/// Exactly K distinct assets, weights summing to one on the selection only.
pub fn check_portfolio_decode(
    n: usize,
    k: usize,
    lower: &[f64],
    upper_frac: &[f64],
    x: &[f64],
) -> Result<(), TestCaseError> {
    let upper: Vec<f64> = lower
        .iter()
        .zip(upper_frac)
        .map(|(l, f)| l + (1.0 - l) * f)
        .collect();
    let sigma = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.01 } else { 0.0 }).collect())
        .collect();
    let Ok(inst) = PortfolioInstance::new(vec![0.01; n], sigma, 0.5, k, lower.to_vec(), upper)
    else {
        // bounds that admit no budget-feasible portfolio are rejected at load
        return Ok(());
    };
    let s = PortfolioDecoder::new(inst).decode(x);
    prop_assert_eq!(s.z.iter().filter(|z| **z).count(), k);
    prop_assert_eq!(s.assets.len(), k);
    let mut ids = s.assets.clone();
    ids.sort_unstable();
    ids.dedup();
    prop_assert_eq!(ids.len(), k);
    prop_assert!(ids.iter().all(|&a| a < n));
    prop_assert!((s.w.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    for (i, w) in s.w.iter().enumerate() {
        if !s.z[i] {
            prop_assert_eq!(*w, 0.0);
        }
    }
    Ok(())
}

/// Bijective ordering, strictly rising times, flows n..0 and the travel
/// lower bound on unpenalized routes of the six-customer example.
pub fn check_tdtsp_decode(x: &[f64]) -> Result<(), TestCaseError> {
    let inst = six_customer_example();
    let dec = TdTspDecoder::new(inst.clone());
    let n = inst.n();
    let s = dec.decode(x);
    let mut seen = s.permutation.clone();
    seen.sort_unstable();
    prop_assert_eq!(seen, (1..=n).collect::<Vec<_>>());

    let mut route = vec![0];
    route.extend(&s.permutation);
    route.push(n + 1);
    for w in route.windows(2) {
        prop_assert!(s.a[w[1]] > s.a[w[0]]);
    }
    prop_assert_eq!(s.arcs.len(), n + 1);
    let forward: Vec<f64> = s
        .arcs
        .iter()
        .map(|&(i, j, _)| {
            s.flows
                .iter()
                .find(|f| f.0 == i && f.1 == j)
                .map(|f| f.2)
                .unwrap_or(f64::NAN)
        })
        .collect();
    let expect: Vec<f64> = (0..=n).rev().map(|f| f as f64).collect();
    prop_assert_eq!(forward, expect);
    if !s.penalized {
        prop_assert!(lower_bound_l(&inst) <= s.cost);
    }
    Ok(())
}
