//! Cardinality-constrained mean-variance portfolio selection.
//!
//! A key vector of length `2K` encodes a portfolio: the first `K` keys pick
//! assets one at a time from the shrinking list of unpicked assets, the last
//! `K` keys place each picked asset's raw weight inside its holding bounds.
//! Raw weights are then normalised to sum to one, which may push some of them
//! out of bounds; such portfolios are penalised.
//!
//! Asset identifiers are 0-based throughout.

use serde::{Deserialize, Serialize};

use crate::decoder::Decoder;
use crate::error::{Result, RkoError};

pub const PROPORTIONAL_PENALTY: f64 = 1e4;
pub const FIXED_PENALTY: f64 = 1e3;
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
pub const BUDGET_TOLERANCE: f64 = 1e-9;
/// Upper limit on grid points the oracle will visit.
pub const ORACLE_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioInstance {
    mu: Vec<f64>,
    sigma: Vec<Vec<f64>>,
    lambda: f64,
    k: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PortfolioInstance {
    pub fn new(
        mu: Vec<f64>,
        sigma: Vec<Vec<f64>>,
        lambda: f64,
        k: usize,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let n = mu.len();
        if n == 0 {
            return Err(RkoError::instance("portfolio needs at least one asset"));
        }
        if sigma.len() != n || sigma.iter().any(|r| r.len() != n) {
            return Err(RkoError::instance(format!("covariance must be {n}x{n}")));
        }
        if lower.len() != n || upper.len() != n {
            return Err(RkoError::instance("holding bounds must have one entry per asset"));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(RkoError::instance(format!("lambda {lambda} outside [0, 1]")));
        }
        if k == 0 || k > n {
            return Err(RkoError::instance(format!("cardinality {k} outside 1..={n}")));
        }
        let finite = mu.iter().chain(sigma.iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(RkoError::instance("returns and covariances must be finite"));
        }
        for i in 0..n {
            if !(0.0 <= lower[i] && lower[i] <= upper[i] && upper[i] <= 1.0) {
                return Err(RkoError::instance(format!(
                    "asset {i}: bounds [{}, {}] must satisfy 0 <= l <= u <= 1",
                    lower[i], upper[i]
                )));
            }
            for j in 0..i {
                if (sigma[i][j] - sigma[j][i]).abs() > SYMMETRY_TOLERANCE {
                    return Err(RkoError::instance(format!(
                        "covariance not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let min_l = lower.iter().copied().fold(f64::INFINITY, f64::min);
        let max_u = upper.iter().copied().fold(0.0, f64::max);
        if k as f64 * min_l > 1.0 || (k as f64) * max_u < 1.0 {
            return Err(RkoError::instance(format!(
                "no budget-feasible portfolio: K*min(l) = {}, K*max(u) = {}",
                k as f64 * min_l,
                k as f64 * max_u
            )));
        }
        Ok(Self {
            mu,
            sigma,
            lambda,
            k,
            lower,
            upper,
        })
    }

    /// Same bounds for every asset.
    pub fn with_uniform_bounds(
        mu: Vec<f64>,
        sigma: Vec<Vec<f64>>,
        lambda: f64,
        k: usize,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        let n = mu.len();
        Self::new(mu, sigma, lambda, k, vec![lower; n], vec![upper; n])
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[Vec<f64>] {
        &self.sigma
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Copy with a different risk-aversion weight.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        let mut out = self.clone();
        if !(0.0..=1.0).contains(&lambda) {
            return Err(RkoError::instance(format!("lambda {lambda} outside [0, 1]")));
        }
        out.lambda = lambda;
        Ok(out)
    }

    /// Copy with a different cardinality.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(
            self.mu.clone(),
            self.sigma.clone(),
            self.lambda,
            k,
            self.lower.clone(),
            self.upper.clone(),
        )
    }

    pub fn risk(&self, w: &[f64]) -> f64 {
        let mut total = 0.0;
        for (i, wi) in w.iter().enumerate() {
            if *wi == 0.0 {
                continue;
            }
            let row: f64 = self.sigma[i].iter().zip(w).map(|(s, wj)| s * wj).sum();
            total += wi * row;
        }
        total
    }

    pub fn expected_return(&self, w: &[f64]) -> f64 {
        self.mu.iter().zip(w).map(|(m, w)| m * w).sum()
    }

    /// Penalty-free objective `lambda w'Sw - (1 - lambda) mu'w`.
    pub fn objective(&self, w: &[f64]) -> f64 {
        self.lambda * self.risk(w) - (1.0 - self.lambda) * self.expected_return(w)
    }

    /// Total bound violation of the selected assets.
    pub fn bound_violation(&self, assets: &[usize], w: &[f64]) -> f64 {
        assets
            .iter()
            .map(|&a| (w[a] - self.upper[a]).max(0.0) + (self.lower[a] - w[a]).max(0.0))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioSolution {
    /// Selected assets in selection order.
    pub assets: Vec<usize>,
    pub w: Vec<f64>,
    pub z: Vec<bool>,
    pub cost: f64,
    pub penalty: f64,
}

impl PortfolioSolution {
    pub fn feasible(&self) -> bool {
        self.penalty == 0.0
    }
}

/// 1-based pick position for key `x` over `m` remaining assets.
pub fn pick_position(x: f64, m: usize) -> usize {
    ((x * m as f64).ceil() as usize).clamp(1, m)
}

#[derive(Debug, Clone)]
pub struct PortfolioDecoder {
    instance: PortfolioInstance,
}

impl PortfolioDecoder {
    pub fn new(instance: PortfolioInstance) -> Self {
        Self { instance }
    }

    pub fn instance(&self) -> &PortfolioInstance {
        &self.instance
    }

    pub fn decode(&self, keys: &[f64]) -> PortfolioSolution {
        let inst = &self.instance;
        let (n, k) = (inst.n(), inst.k());
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut assets = Vec::with_capacity(k);
        let mut w = vec![0.0; n];
        let mut z = vec![false; n];
        let mut total = 0.0;
        for i in 0..k {
            let pos = pick_position(keys[i], remaining.len());
            let id = remaining.remove(pos - 1);
            let raw = inst.lower[id] + (inst.upper[id] - inst.lower[id]) * keys[i + k];
            w[id] = raw;
            z[id] = true;
            total += raw;
            assets.push(id);
        }
        for &a in &assets {
            w[a] = if total > 0.0 { w[a] / total } else { 1.0 / k as f64 };
        }
        let penalty = inst.bound_violation(&assets, &w);
        let mut cost = inst.objective(&w);
        if penalty > 0.0 {
            cost += PROPORTIONAL_PENALTY * penalty + FIXED_PENALTY;
        }
        PortfolioSolution {
            assets,
            w,
            z,
            cost,
            penalty,
        }
    }
}

impl Decoder for PortfolioDecoder {
    fn dimension(&self) -> usize {
        2 * self.instance.k()
    }

    fn cost(&self, keys: &[f64]) -> f64 {
        self.decode(keys).cost
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioCheck {
    pub budget_ok: bool,
    pub cardinality_ok: bool,
    pub bounds_ok: bool,
    /// Assets whose weight lies outside `[l z, u z]`.
    pub bound_violations: Vec<usize>,
    pub binary_ok: bool,
}

impl PortfolioCheck {
    pub fn feasible(&self) -> bool {
        self.budget_ok && self.cardinality_ok && self.bounds_ok && self.binary_ok
    }
}

/// Checks budget, cardinality, linked bounds and indicator consistency.
pub fn check_portfolio(instance: &PortfolioInstance, sol: &PortfolioSolution) -> PortfolioCheck {
    let n = instance.n();
    let well_formed = sol.w.len() == n && sol.z.len() == n;
    if !well_formed {
        return PortfolioCheck {
            budget_ok: false,
            cardinality_ok: false,
            bounds_ok: false,
            bound_violations: Vec::new(),
            binary_ok: false,
        };
    }
    let budget_ok = (sol.w.iter().sum::<f64>() - 1.0).abs() <= BUDGET_TOLERANCE;
    let cardinality_ok = sol.z.iter().filter(|z| **z).count() == instance.k();
    let bound_violations: Vec<usize> = (0..n)
        .filter(|&i| {
            let zi = if sol.z[i] { 1.0 } else { 0.0 };
            sol.w[i] < instance.lower[i] * zi || sol.w[i] > instance.upper[i] * zi
        })
        .collect();
    let mut seen = vec![false; n];
    let assets_ok = sol.assets.iter().all(|&a| {
        let fresh = a < n && !seen[a] && sol.z[a];
        if a < n {
            seen[a] = true;
        }
        fresh
    }) && sol.assets.len() == sol.z.iter().filter(|z| **z).count();
    PortfolioCheck {
        budget_ok,
        cardinality_ok,
        bounds_ok: bound_violations.is_empty(),
        bound_violations,
        binary_ok: assets_ok,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioOracle {
    pub cost: f64,
    pub assets: Vec<usize>,
    pub w: Vec<f64>,
    pub grid_points: u64,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exhaustive search over all `K`-subsets and all weight vectors on the
/// simplex grid of spacing `step` that respect the holding bounds.
pub fn brute_force_portfolio(instance: &PortfolioInstance, step: f64) -> Result<PortfolioOracle> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(RkoError::config("grid step must lie in (0, 1]"));
    }
    let units = (1.0 / step).round() as i64;
    let (n, k) = (instance.n(), instance.k());
    let range = |a: usize| -> (i64, i64) {
        let lo = (instance.lower[a] * units as f64 - 1e-9).ceil() as i64;
        let hi = (instance.upper[a] * units as f64 + 1e-9).floor() as i64;
        (lo.max(0), hi.min(units))
    };
    let widest = (0..n)
        .map(|a| {
            let (lo, hi) = range(a);
            (hi - lo + 1).max(0) as f64
        })
        .fold(0.0, f64::max);
    let estimate = binomial(n, k) * widest.powi(k as i32 - 1);
    if estimate > ORACLE_LIMIT {
        return Err(RkoError::GuardExceeded {
            what: "portfolio grid enumeration".into(),
            estimate,
            limit: ORACLE_LIMIT,
        });
    }

    let mut best: Option<PortfolioOracle> = None;
    let mut grid_points = 0u64;
    let mut subset: Vec<usize> = (0..k).collect();
    let mut w = vec![0.0; n];
    loop {
        let ranges: Vec<(i64, i64)> = subset.iter().map(|&a| range(a)).collect();
        let mut counts = vec![0i64; k];
        search_simplex(
            instance,
            &subset,
            &ranges,
            units,
            0,
            units,
            &mut counts,
            &mut w,
            &mut grid_points,
            &mut best,
        );
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    let mut out = best.ok_or_else(|| {
        RkoError::instance("no grid point satisfies the holding bounds; refine the step")
    })?;
    out.grid_points = grid_points;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search_simplex(
    inst: &PortfolioInstance,
    subset: &[usize],
    ranges: &[(i64, i64)],
    units: i64,
    depth: usize,
    left: i64,
    counts: &mut [i64],
    w: &mut [f64],
    visited: &mut u64,
    best: &mut Option<PortfolioOracle>,
) {
    let k = subset.len();
    // remaining mass the later assets can absorb
    let tail_min: i64 = ranges[depth + 1..].iter().map(|r| r.0).sum();
    let tail_max: i64 = ranges[depth + 1..].iter().map(|r| r.1).sum();
    let (lo, hi) = ranges[depth];
    if depth + 1 == k {
        if left < lo || left > hi {
            return;
        }
        counts[depth] = left;
        *visited += 1;
        for (i, &a) in subset.iter().enumerate() {
            w[a] = counts[i] as f64 / units as f64;
        }
        let cost = inst.objective(w);
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            *best = Some(PortfolioOracle {
                cost,
                assets: subset.to_vec(),
                w: w.to_vec(),
                grid_points: 0,
            });
        }
        for &a in subset {
            w[a] = 0.0;
        }
        return;
    }
    let from = lo.max(left - tail_max);
    let to = hi.min(left - tail_min);
    for c in from..=to {
        counts[depth] = c;
        search_simplex(inst, subset, ranges, units, depth + 1, left - c, counts, w, visited, best);
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
