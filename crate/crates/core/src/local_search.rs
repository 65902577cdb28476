//! Problem-independent local searches in key space and the randomized
//! variable neighborhood descent (RVND) that chains them.
//!
//! Every search sees the problem only through a *probe*: a closure that
//! evaluates a key vector and returns `None` once the evaluation budget is
//! spent. All searches are first-improvement and require strict decrease.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::decoder::Decoder;
use crate::keys::{clamp_key, EvaluatedSolution, RandomKeyVector, KEY_MAX};

/// Farey sequence of order 7 with the final 1/1 pulled inside the key range.
pub const FAREY_7: [f64; 19] = [
    0.0,
    1.0 / 7.0,
    1.0 / 6.0,
    1.0 / 5.0,
    1.0 / 4.0,
    2.0 / 7.0,
    1.0 / 3.0,
    2.0 / 5.0,
    3.0 / 7.0,
    1.0 / 2.0,
    4.0 / 7.0,
    3.0 / 5.0,
    2.0 / 3.0,
    5.0 / 7.0,
    3.0 / 4.0,
    4.0 / 5.0,
    5.0 / 6.0,
    6.0 / 7.0,
    0.9999,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalSearch {
    Swap,
    Mirror,
    Farey,
    NelderMead,
}

impl LocalSearch {
    pub const ALL: [LocalSearch; 4] = [
        LocalSearch::Swap,
        LocalSearch::Mirror,
        LocalSearch::Farey,
        LocalSearch::NelderMead,
    ];

    pub fn run<F, R>(self, current: &EvaluatedSolution, probe: &mut F, rng: &mut R) -> LsResult
    where
        F: FnMut(RandomKeyVector) -> Option<EvaluatedSolution>,
        R: Rng + ?Sized,
    {
        match self {
            LocalSearch::Swap => swap_ls(current, probe, rng),
            LocalSearch::Mirror => mirror_ls(current, probe, rng),
            LocalSearch::Farey => farey_ls(current, probe, rng),
            LocalSearch::NelderMead => {
                nelder_mead_ls(current, probe, &NelderMeadConfig::default())
            }
        }
    }
}

/// Outcome of one local-search application.
#[derive(Debug, Clone)]
pub struct LsResult {
    pub improved: Option<EvaluatedSolution>,
    pub exhausted: bool,
}

impl LsResult {
    fn none() -> Self {
        Self {
            improved: None,
            exhausted: false,
        }
    }

    fn exhausted(improved: Option<EvaluatedSolution>) -> Self {
        Self {
            improved,
            exhausted: true,
        }
    }

    fn improved(s: EvaluatedSolution) -> Self {
        Self {
            improved: Some(s),
            exhausted: false,
        }
    }
}

pub fn swap_ls<F, R>(current: &EvaluatedSolution, probe: &mut F, rng: &mut R) -> LsResult
where
    F: FnMut(RandomKeyVector) -> Option<EvaluatedSolution>,
    R: Rng + ?Sized,
{
    let n = current.vector().len();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    pairs.shuffle(rng);
    for (i, j) in pairs {
        let v = current.vector();
        if v[i] == v[j] {
            continue;
        }
        let mut cand = v.clone();
        cand.swap(i, j);
        match probe(cand) {
            None => return LsResult::exhausted(None),
            Some(s) if s.cost() < current.cost() => return LsResult::improved(s),
            Some(_) => {}
        }
    }
    LsResult::none()
}

pub fn mirror_ls<F, R>(current: &EvaluatedSolution, probe: &mut F, rng: &mut R) -> LsResult
where
    F: FnMut(RandomKeyVector) -> Option<EvaluatedSolution>,
    R: Rng + ?Sized,
{
    let mut idx: Vec<usize> = (0..current.vector().len()).collect();
    idx.shuffle(rng);
    for i in idx {
        let mut cand = current.vector().clone();
        let k = cand[i];
        cand.set(i, 1.0 - k);
        if cand[i] == k {
            continue;
        }
        match probe(cand) {
            None => return LsResult::exhausted(None),
            Some(s) if s.cost() < current.cost() => return LsResult::improved(s),
            Some(_) => {}
        }
    }
    LsResult::none()
}

pub fn farey_ls<F, R>(current: &EvaluatedSolution, probe: &mut F, rng: &mut R) -> LsResult
where
    F: FnMut(RandomKeyVector) -> Option<EvaluatedSolution>,
    R: Rng + ?Sized,
{
    let mut idx: Vec<usize> = (0..current.vector().len()).collect();
    idx.shuffle(rng);
    for i in idx {
        for &value in &FAREY_7 {
            if current.vector()[i] == value {
                continue;
            }
            let mut cand = current.vector().clone();
            cand.set(i, value);
            match probe(cand) {
                None => return LsResult::exhausted(None),
                Some(s) if s.cost() < current.cost() => return LsResult::improved(s),
                Some(_) => {}
            }
        }
    }
    LsResult::none()
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Offset applied to one coordinate per initial vertex.
    pub initial_step: f64,
    /// Call cap is `calls_per_dimension * dimension`.
    pub calls_per_dimension: usize,
    pub min_diameter: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.05,
            calls_per_dimension: 50,
            min_diameter: 1e-4,
        }
    }
}

/// Nelder–Mead over the key box, every trial point clamped to `[0, 1 - 1e-9]`.
pub fn nelder_mead_ls<F>(
    current: &EvaluatedSolution,
    probe: &mut F,
    cfg: &NelderMeadConfig,
) -> LsResult
where
    F: FnMut(RandomKeyVector) -> Option<EvaluatedSolution>,
{
    let n = current.vector().len();
    let max_calls = cfg.calls_per_dimension * n;
    let mut calls = 0usize;

    // `None` from the closure means the outer budget ran out.
    let mut eval = |x: &[f64], calls: &mut usize| -> Option<EvaluatedSolution> {
        *calls += 1;
        let v = RandomKeyVector::from_clamped(x.iter().copied()).ok()?;
        probe(v)
    };

    let mut simplex: Vec<EvaluatedSolution> = Vec::with_capacity(n + 1);
    simplex.push(current.clone());
    for i in 0..n {
        let mut x = current.vector().keys().to_vec();
        x[i] = if x[i] + cfg.initial_step <= KEY_MAX {
            x[i] + cfg.initial_step
        } else {
            clamp_key(x[i] - cfg.initial_step)
        };
        match eval(&x, &mut calls) {
            Some(s) => simplex.push(s),
            None => return LsResult::exhausted(best_if_improved(&simplex, current)),
        }
    }

    while calls < max_calls {
        simplex.sort_by(|a, b| a.cost().total_cmp(&b.cost()));
        if diameter(&simplex) < cfg.min_diameter {
            break;
        }
        let worst = simplex[n].clone();
        let second_worst_cost = simplex[n - 1].cost();
        let best_cost = simplex[0].cost();

        let mut centroid = vec![0.0; n];
        for s in &simplex[..n] {
            for (c, k) in centroid.iter_mut().zip(s.vector().keys()) {
                *c += k / n as f64;
            }
        }
        let towards = |from: &[f64], coeff: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, f)| clamp_key(c + coeff * (c - f)))
                .collect()
        };

        let reflected = towards(worst.vector().keys(), cfg.reflection);
        let Some(r) = eval(&reflected, &mut calls) else {
            return LsResult::exhausted(best_if_improved(&simplex, current));
        };

        if r.cost() < best_cost {
            let expanded = towards(worst.vector().keys(), cfg.reflection * cfg.expansion);
            let Some(e) = eval(&expanded, &mut calls) else {
                simplex[n] = r;
                return LsResult::exhausted(best_if_improved(&simplex, current));
            };
            simplex[n] = if e.cost() < r.cost() { e } else { r };
            continue;
        }
        if r.cost() < second_worst_cost {
            simplex[n] = r;
            continue;
        }

        let contracted = if r.cost() < worst.cost() {
            towards(worst.vector().keys(), cfg.reflection * cfg.contraction)
        } else {
            towards(worst.vector().keys(), -cfg.contraction)
        };
        let Some(c) = eval(&contracted, &mut calls) else {
            return LsResult::exhausted(best_if_improved(&simplex, current));
        };
        if c.cost() < r.cost().min(worst.cost()) {
            simplex[n] = c;
            continue;
        }

        let best_keys = simplex[0].vector().keys().to_vec();
        for idx in 1..=n {
            let x: Vec<f64> = best_keys
                .iter()
                .zip(simplex[idx].vector().keys())
                .map(|(b, k)| clamp_key(b + cfg.shrink * (k - b)))
                .collect();
            match eval(&x, &mut calls) {
                Some(s) => simplex[idx] = s,
                None => return LsResult::exhausted(best_if_improved(&simplex, current)),
            }
        }
    }

    match best_if_improved(&simplex, current) {
        Some(s) => LsResult::improved(s),
        None => LsResult::none(),
    }
}

fn best_if_improved(
    simplex: &[EvaluatedSolution],
    current: &EvaluatedSolution,
) -> Option<EvaluatedSolution> {
    simplex
        .iter()
        .min_by(|a, b| a.cost().total_cmp(&b.cost()))
        .filter(|s| s.cost() < current.cost())
        .cloned()
}

fn diameter(simplex: &[EvaluatedSolution]) -> f64 {
    let best = simplex[0].vector().keys();
    simplex[1..]
        .iter()
        .map(|s| {
            s.vector()
                .keys()
                .iter()
                .zip(best)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// RVND driven by an arbitrary probe. Stops when a full shuffled pass of the
/// four searches yields no improvement or the probe reports exhaustion.
pub fn rvnd_with<F, R>(start: EvaluatedSolution, probe: &mut F, rng: &mut R) -> EvaluatedSolution
where
    F: FnMut(RandomKeyVector) -> Option<EvaluatedSolution>,
    R: Rng + ?Sized,
{
    let mut current = start;
    let mut order = LocalSearch::ALL;
    order.shuffle(rng);
    let mut idx = 0;
    while idx < order.len() {
        let res = order[idx].run(&current, probe, rng);
        match res.improved {
            Some(better) => {
                current = better;
                if res.exhausted {
                    break;
                }
                order.shuffle(rng);
                idx = 0;
            }
            None if res.exhausted => break,
            None => idx += 1,
        }
    }
    current
}

/// RVND with at most `budget` extra probe calls on top of `probe`'s own limit.
pub fn rvnd_budgeted<F, R>(
    start: EvaluatedSolution,
    probe: &mut F,
    budget: usize,
    rng: &mut R,
) -> EvaluatedSolution
where
    F: FnMut(RandomKeyVector) -> Option<EvaluatedSolution>,
    R: Rng + ?Sized,
{
    let mut used = 0usize;
    let mut limited = |v: RandomKeyVector| {
        if used >= budget {
            return None;
        }
        used += 1;
        probe(v)
    };
    rvnd_with(start, &mut limited, rng)
}

/// RVND against a decoder directly, spending at most `budget` decoder calls.
/// The start solution is assumed already evaluated.
pub fn rvnd<D, R>(
    start: &EvaluatedSolution,
    decoder: &D,
    budget: usize,
    rng: &mut R,
) -> EvaluatedSolution
where
    D: Decoder + ?Sized,
    R: Rng + ?Sized,
{
    let mut ordinal = start.decoded_at();
    let mut probe = |v: RandomKeyVector| {
        ordinal += 1;
        let cost = decoder.cost(v.keys());
        EvaluatedSolution::new(v, cost, ordinal).ok()
    };
    rvnd_budgeted(start.clone(), &mut probe, budget, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::FnDecoder;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eval_with<D: Decoder>(d: &D, keys: Vec<f64>) -> EvaluatedSolution {
        let v = RandomKeyVector::from_keys(keys).unwrap();
        let c = d.cost(v.keys());
        EvaluatedSolution::new(v, c, 0).unwrap()
    }

    #[test]
    fn farey_values_sorted_and_in_range() {
        assert!(FAREY_7.windows(2).all(|w| w[0] < w[1]));
        assert!(FAREY_7.iter().all(|k| (0.0..1.0).contains(k)));
    }

    #[test]
    fn fixed_point_is_returned_unchanged() {
        let flat = FnDecoder::new(3, |_: &[f64]| 1.0);
        let start = eval_with(&flat, vec![0.2, 0.4, 0.6]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = rvnd(&start, &flat, 10_000, &mut rng);
        assert_eq!(out, start);
    }

    #[test]
    fn budget_one_allows_one_call() {
        let calls = std::sync::atomic::AtomicUsize::new(0);
        let d = FnDecoder::new(4, |k: &[f64]| {
            calls.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            k.iter().sum()
        });
        let start = eval_with(&d, vec![0.9, 0.8, 0.7, 0.6]);
        calls.store(0, std::sync::atomic::Ordering::Relaxed);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = rvnd(&start, &d, 1, &mut rng);
        assert!(calls.load(std::sync::atomic::Ordering::Relaxed) <= 1);
        assert!(out.cost() <= start.cost());
    }

    #[test]
    fn rvnd_never_worsens() {
        let d = FnDecoder::new(5, |k: &[f64]| {
            k.iter()
                .enumerate()
                .map(|(i, x)| (x - 0.1 * i as f64).powi(2))
                .sum()
        });
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let v = RandomKeyVector::random(5, &mut rng).unwrap();
            let start = eval_with(&d, v.into_inner());
            let out = rvnd(&start, &d, 2000, &mut rng);
            assert!(out.cost() <= start.cost());
        }
    }

    #[test]
    fn nelder_mead_finds_interior_minimum() {
        let d = FnDecoder::new(2, |k: &[f64]| (k[0] - 0.37).powi(2) + (k[1] - 0.61).powi(2));
        let start = eval_with(&d, vec![0.9, 0.1]);
        let mut ordinal = 0;
        let mut probe = |v: RandomKeyVector| {
            ordinal += 1;
            let c = d.cost(v.keys());
            EvaluatedSolution::new(v, c, ordinal).ok()
        };
        let res = nelder_mead_ls(&start, &mut probe, &NelderMeadConfig::default());
        let best = res.improved.unwrap();
        assert!(best.cost() < 1e-6, "cost {}", best.cost());
    }

    #[test]
    fn swap_ls_takes_first_improvement() {
        // cost is lowest when keys are sorted ascending
        let d = FnDecoder::new(3, |k: &[f64]| {
            k.windows(2).filter(|w| w[0] > w[1]).count() as f64
        });
        let start = eval_with(&d, vec![0.9, 0.5, 0.1]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut probe = |v: RandomKeyVector| {
            let c = d.cost(v.keys());
            EvaluatedSolution::new(v, c, 0).ok()
        };
        let res = swap_ls(&start, &mut probe, &mut rng);
        assert!(res.improved.unwrap().cost() < start.cost());
    }

    #[test]
    fn mirror_ls_improves_when_complement_better() {
        let d = FnDecoder::new(1, |k: &[f64]| k[0]);
        let start = eval_with(&d, vec![0.8]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut probe = |v: RandomKeyVector| {
            let c = d.cost(v.keys());
            EvaluatedSolution::new(v, c, 0).ok()
        };
        let res = mirror_ls(&start, &mut probe, &mut rng);
        assert!((res.improved.unwrap().cost() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn farey_ls_reaches_grid_value() {
        let d = FnDecoder::new(1, |k: &[f64]| (k[0] - 0.5).abs());
        let start = eval_with(&d, vec![0.93]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut probe = |v: RandomKeyVector| {
            let c = d.cost(v.keys());
            EvaluatedSolution::new(v, c, 0).ok()
        };
        let out = rvnd_with(start, &mut probe, &mut rng);
        assert!(out.cost() < 1e-3);
    }
}
