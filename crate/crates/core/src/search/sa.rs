use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Metaheuristic, SearchContext, SearchRng};
use crate::error::{Result, RkoError};
use crate::keys::EvaluatedSolution;
use crate::perturb::{shake, ShakeConfig};

const CALIBRATION_SAMPLES: usize = 100;
const MIN_TEMPERATURE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    /// Target probability of accepting a median worsening move at `T0`.
    pub initial_acceptance: f64,
    pub cooling_rate: f64,
    /// Moves per temperature level; `None` means the decoder dimension.
    pub moves_per_temperature: Option<usize>,
    pub shake: ShakeConfig,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            initial_acceptance: 0.5,
            cooling_rate: 0.99,
            moves_per_temperature: None,
            shake: ShakeConfig::default(),
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_acceptance > 0.0 && self.initial_acceptance < 1.0) {
            return Err(RkoError::config("SA initial acceptance must lie in (0, 1)"));
        }
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return Err(RkoError::config("SA cooling rate must lie in (0, 1)"));
        }
        if self.moves_per_temperature == Some(0) {
            return Err(RkoError::config("SA moves per temperature must be positive"));
        }
        self.shake.validate()
    }
}

/// Metropolis rule: improving and neutral moves always pass; a worsening
/// move passes when `u < exp(-delta / t)`.
pub fn metropolis_accept(delta: f64, temperature: f64, u: f64) -> bool {
    if delta <= 0.0 {
        return true;
    }
    if temperature <= 0.0 {
        return false;
    }
    u < (-delta / temperature).exp()
}

/// Temperature at which the median worsening delta is accepted with
/// probability `acceptance`.
pub fn calibrate_temperature(deltas: &[f64], acceptance: f64) -> f64 {
    let mut worse: Vec<f64> = deltas.iter().copied().filter(|d| *d > 0.0).collect();
    if worse.is_empty() {
        return 1.0;
    }
    worse.sort_by(f64::total_cmp);
    let median = worse[worse.len() / 2];
    -median / acceptance.ln()
}

#[derive(Debug, Clone)]
pub struct SimulatedAnnealing {
    params: SaParams,
}

impl SimulatedAnnealing {
    pub fn new(params: SaParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    fn restart_point(
        ctx: &SearchContext<'_>,
        rng: &mut SearchRng,
    ) -> Option<EvaluatedSolution> {
        ctx.pool()
            .random_member(rng)
            .or_else(|| ctx.random_solution(rng))
    }
}

impl Metaheuristic for SimulatedAnnealing {
    fn label(&self) -> String {
        "SA".to_string()
    }

    fn search(&self, ctx: &SearchContext<'_>, rng: &mut SearchRng) {
        let moves = self
            .params
            .moves_per_temperature
            .unwrap_or(ctx.dimension())
            .max(1);
        let Some(mut current) = Self::restart_point(ctx, rng) else {
            return;
        };
        let mut best_cost = current.cost();

        let mut deltas = Vec::with_capacity(CALIBRATION_SAMPLES);
        for _ in 0..CALIBRATION_SAMPLES {
            let Some(n) = ctx.evaluate(shake(current.vector(), &self.params.shake, rng)) else {
                return;
            };
            deltas.push(n.cost() - current.cost());
            if n.cost() < best_cost {
                best_cost = n.cost();
                ctx.offer(&n);
            }
        }
        let t0 = calibrate_temperature(&deltas, self.params.initial_acceptance);
        let mut t = t0;

        loop {
            for _ in 0..moves {
                let Some(n) = ctx.evaluate(shake(current.vector(), &self.params.shake, rng))
                else {
                    return;
                };
                if n.cost() < best_cost {
                    best_cost = n.cost();
                    ctx.offer(&n);
                }
                if metropolis_accept(n.cost() - current.cost(), t, rng.gen()) {
                    current = n;
                }
            }
            t *= self.params.cooling_rate;
            if t < MIN_TEMPERATURE {
                match Self::restart_point(ctx, rng) {
                    Some(s) => current = s,
                    None => return,
                }
                t = t0;
            }
        }
    }
}
