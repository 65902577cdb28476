//! Generic mixed-integer programs `min c'x  s.t.  Ax <= b,  l <= x <= u`,
//! with the first `p` variables integer.
//!
//! Keys map affinely onto the variable boxes (integers by rounding half up)
//! and violated rows are charged a quadratic penalty, so every key vector has
//! a finite cost.

use serde::{Deserialize, Serialize};

use crate::decoder::Decoder;
use crate::error::{Result, RkoError};

pub const DEFAULT_PENALTY: f64 = 1e4;
pub const INTEGRALITY_TOLERANCE: f64 = 1e-9;
/// Largest assignment count the enumeration oracle will visit.
pub const ORACLE_LIMIT: f64 = (1u64 << 20) as f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MipInstance {
    c: Vec<f64>,
    /// Sparse rows of `A` as `(column, value)` pairs.
    rows: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    integers: usize,
}

impl MipInstance {
    /// Builds an instance from a dense row-major constraint matrix.
    pub fn new(
        c: Vec<f64>,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        integers: usize,
    ) -> Result<Self> {
        let n = c.len();
        let mut rows = Vec::with_capacity(a.len());
        for (r, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(RkoError::instance(format!(
                    "row {r} of A has {} entries, expected {n}",
                    row.len()
                )));
            }
            rows.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect(),
            );
        }
        Self::from_rows(c, rows, b, lower, upper, integers)
    }

    /// Builds an instance from `(row, column, value)` triplets over `m` rows.
    /// Repeated positions are summed.
    pub fn from_triplets(
        c: Vec<f64>,
        m: usize,
        triplets: &[(usize, usize, f64)],
        b: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        integers: usize,
    ) -> Result<Self> {
        let n = c.len();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for &(r, j, v) in triplets {
            if r >= m || j >= n {
                return Err(RkoError::instance(format!(
                    "triplet ({r}, {j}) outside a {m}x{n} matrix"
                )));
            }
            match rows[r].iter_mut().find(|(col, _)| *col == j) {
                Some(entry) => entry.1 += v,
                None => rows[r].push((j, v)),
            }
        }
        for row in &mut rows {
            row.sort_by_key(|(j, _)| *j);
        }
        Self::from_rows(c, rows, b, lower, upper, integers)
    }

    fn from_rows(
        c: Vec<f64>,
        rows: Vec<Vec<(usize, f64)>>,
        b: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        integers: usize,
    ) -> Result<Self> {
        let n = c.len();
        let m = rows.len();
        if n == 0 || m == 0 {
            return Err(RkoError::instance("a MIP needs at least one variable and one row"));
        }
        if b.len() != m || lower.len() != n || upper.len() != n {
            return Err(RkoError::instance(format!(
                "inconsistent sizes: n={n}, m={m}, |b|={}, |l|={}, |u|={}",
                b.len(),
                lower.len(),
                upper.len()
            )));
        }
        if integers > n {
            return Err(RkoError::instance(format!(
                "{integers} integer variables declared but only {n} exist"
            )));
        }
        let all_finite = c.iter().chain(&b).chain(&lower).chain(&upper).all(|v| v.is_finite())
            && rows.iter().flatten().all(|(_, v)| v.is_finite());
        if !all_finite {
            return Err(RkoError::instance("MIP data must be finite"));
        }
        for i in 0..n {
            if lower[i] > upper[i] {
                return Err(RkoError::instance(format!(
                    "variable {i}: lower bound {} exceeds upper bound {}",
                    lower[i], upper[i]
                )));
            }
            if i < integers && (lower[i].fract() != 0.0 || upper[i].fract() != 0.0) {
                return Err(RkoError::instance(format!(
                    "integer variable {i} has non-integer bounds"
                )));
            }
        }
        Ok(Self {
            c,
            rows,
            b,
            lower,
            upper,
            integers,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_integers(&self) -> usize {
        self.integers
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Dense copy of `A`.
    pub fn dense_a(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; self.num_vars()];
                for &(j, v) in row {
                    dense[j] = v;
                }
                dense
            })
            .collect()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Row slacks `b - Ax`.
    pub fn slacks(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.b)
            .map(|(row, b)| b - row.iter().map(|&(j, a)| a * x[j]).sum::<f64>())
            .collect()
    }

    /// Variable values encoded by `keys`.
    pub fn map_keys(&self, keys: &[f64]) -> Vec<f64> {
        keys.iter()
            .enumerate()
            .map(|(i, &k)| {
                let (l, u) = (self.lower[i], self.upper[i]);
                if i < self.integers {
                    // round half up of l - 0.5 + (u - l + 1) k
                    (l + (u - l + 1.0) * k).floor().clamp(l, u)
                } else {
                    (l + (u - l) * k).clamp(l, u)
                }
            })
            .collect()
    }

    pub fn check_feasibility(&self, x: &[f64]) -> MipFeasibility {
        let slack = self.slacks(x);
        let bounds_ok = x
            .iter()
            .enumerate()
            .all(|(i, &v)| v >= self.lower[i] && v <= self.upper[i]);
        let integral_ok = x[..self.integers]
            .iter()
            .all(|v| (v - v.round()).abs() <= INTEGRALITY_TOLERANCE);
        let rows_ok = slack.iter().all(|s| *s >= 0.0);
        MipFeasibility {
            feasible: rows_ok && bounds_ok && integral_ok,
            slack,
            bounds_ok,
            integral_ok,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyModel {
    pub prefactor: f64,
}

impl Default for PenaltyModel {
    fn default() -> Self {
        Self {
            prefactor: DEFAULT_PENALTY,
        }
    }
}

impl PenaltyModel {
    pub fn new(prefactor: f64) -> Result<Self> {
        if !(prefactor > 0.0 && prefactor.is_finite()) {
            return Err(RkoError::config("penalty prefactor must be positive"));
        }
        Ok(Self { prefactor })
    }

    /// Quadratic charge over negative slacks.
    pub fn charge(&self, slack: &[f64]) -> f64 {
        slack
            .iter()
            .filter(|s| **s < 0.0)
            .map(|s| self.prefactor * s * s)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MipAssignment {
    pub x: Vec<f64>,
    pub cost: f64,
    /// Per-row slack `b - Ax`; negative entries are violations.
    pub violations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MipFeasibility {
    pub feasible: bool,
    pub slack: Vec<f64>,
    pub bounds_ok: bool,
    pub integral_ok: bool,
}

#[derive(Debug, Clone)]
pub struct MipDecoder {
    instance: MipInstance,
    penalty: PenaltyModel,
}

impl MipDecoder {
    pub fn new(instance: MipInstance, penalty: PenaltyModel) -> Self {
        Self { instance, penalty }
    }

    pub fn instance(&self) -> &MipInstance {
        &self.instance
    }

    pub fn decode(&self, keys: &[f64]) -> MipAssignment {
        let x = self.instance.map_keys(keys);
        self.assess(x)
    }

    fn assess(&self, x: Vec<f64>) -> MipAssignment {
        let violations = self.instance.slacks(&x);
        let cost = self.instance.objective(&x) + self.penalty.charge(&violations);
        MipAssignment {
            x,
            cost,
            violations,
        }
    }
}

impl Decoder for MipDecoder {
    fn dimension(&self) -> usize {
        self.instance.num_vars()
    }

    fn cost(&self, keys: &[f64]) -> f64 {
        self.decode(keys).cost
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MipOracle {
    /// Best objective among feasible assignments, if any was found.
    pub best_feasible: Option<(f64, Vec<f64>)>,
    /// Best penalized cost over all enumerated assignments.
    pub best_penalized: (f64, Vec<f64>),
    /// False when continuous variables were only sampled at box corners.
    pub exact: bool,
    pub enumerated: u64,
}

/// Enumerates every integer assignment in the box, with continuous variables
/// fixed at their bound corners.
pub fn brute_force_mip(instance: &MipInstance, penalty: &PenaltyModel) -> Result<MipOracle> {
    let n = instance.num_vars();
    let p = instance.num_integers();
    let choices: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (l, u) = (instance.lower[i], instance.upper[i]);
            if i < p {
                let count = (u - l) as u64 + 1;
                (0..count).map(|k| l + k as f64).collect()
            } else if l == u {
                vec![l]
            } else {
                vec![l, u]
            }
        })
        .collect();
    let estimate: f64 = choices.iter().map(|c| c.len() as f64).product();
    if estimate > ORACLE_LIMIT {
        return Err(RkoError::GuardExceeded {
            what: "MIP enumeration".into(),
            estimate,
            limit: ORACLE_LIMIT,
        });
    }
    let exact = choices[p..].iter().all(|c| c.len() == 1);
    let decoder = MipDecoder::new(instance.clone(), *penalty);

    let mut idx = vec![0usize; n];
    let mut best_feasible: Option<(f64, Vec<f64>)> = None;
    let mut best_penalized: Option<(f64, Vec<f64>)> = None;
    let mut enumerated = 0u64;
    loop {
        let x: Vec<f64> = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
        enumerated += 1;
        let assessed = decoder.assess(x);
        if assessed.violations.iter().all(|s| *s >= 0.0) {
            let obj = instance.objective(&assessed.x);
            if best_feasible.as_ref().is_none_or(|(c, _)| obj < *c) {
                best_feasible = Some((obj, assessed.x.clone()));
            }
        }
        if best_penalized.as_ref().is_none_or(|(c, _)| assessed.cost < *c) {
            best_penalized = Some((assessed.cost, assessed.x));
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(MipOracle {
                    best_feasible,
                    best_penalized: best_penalized.expect("at least one assignment"),
                    exact,
                    enumerated,
                });
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// 0/1 knapsack as a minimisation MIP: `c = -profit`, one capacity row.
pub fn knapsack(weights: &[f64], profits: &[f64], capacity: f64) -> Result<MipInstance> {
    if weights.len() != profits.len() {
        return Err(RkoError::instance("weights and profits differ in length"));
    }
    let n = weights.len();
    MipInstance::new(
        profits.iter().map(|p| -p).collect(),
        vec![weights.to_vec()],
        vec![capacity],
        vec![0.0; n],
        vec![1.0; n],
        n,
    )
}
