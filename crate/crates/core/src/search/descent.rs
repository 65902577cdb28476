//! Iterated local search and variable neighbourhood search.
//!
//! Both alternate a shake with an RVND descent and only move on strict
//! improvement. ILS always shakes with one configuration; VNS walks through
//! an ascending list of fixed perturbation rates, going back to the first
//! after every improvement.

use serde::{Deserialize, Serialize};

use super::{Metaheuristic, SearchContext, SearchRng};
use crate::error::{Result, RkoError};
use crate::keys::{EvaluatedSolution, RandomKeyVector};
use crate::local_search::rvnd_budgeted;
use crate::perturb::{shake, ShakeConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IlsParams {
    pub shake: ShakeConfig,
    /// Non-improving iterations before restarting from a pool member.
    pub stall_limit: usize,
    /// RVND decoder-call budget per iteration, as a multiple of the dimension.
    pub rvnd_calls_per_dimension: usize,
}

impl Default for IlsParams {
    fn default() -> Self {
        Self {
            shake: ShakeConfig::default(),
            stall_limit: 20,
            rvnd_calls_per_dimension: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VnsParams {
    pub beta_levels: Vec<f64>,
    pub stall_limit: usize,
    pub rvnd_calls_per_dimension: usize,
}

impl Default for VnsParams {
    fn default() -> Self {
        Self {
            beta_levels: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            stall_limit: 20,
            rvnd_calls_per_dimension: 100,
        }
    }
}

fn check_common(stall_limit: usize, rvnd_calls: usize) -> Result<()> {
    if stall_limit == 0 || rvnd_calls == 0 {
        return Err(RkoError::config(
            "stall limit and RVND call budget must be positive",
        ));
    }
    Ok(())
}

impl IlsParams {
    pub fn validate(&self) -> Result<()> {
        self.shake.validate()?;
        check_common(self.stall_limit, self.rvnd_calls_per_dimension)
    }
}

impl VnsParams {
    pub fn validate(&self) -> Result<()> {
        if self.beta_levels.is_empty() {
            return Err(RkoError::config("VNS needs at least one beta level"));
        }
        if self.beta_levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RkoError::config("VNS beta levels must be strictly increasing"));
        }
        for &b in &self.beta_levels {
            ShakeConfig::fixed(b)?;
        }
        check_common(self.stall_limit, self.rvnd_calls_per_dimension)
    }

    fn neighbourhoods(&self) -> Vec<ShakeConfig> {
        self.beta_levels
            .iter()
            .map(|&b| ShakeConfig {
                beta_min: b,
                beta_max: b,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Improved(EvaluatedSolution),
    NotImproved,
    Stopped,
}

/// One shake + RVND iteration from `current`.
pub fn descent_step<F>(
    current: &EvaluatedSolution,
    shake_cfg: &ShakeConfig,
    probe: &mut F,
    rvnd_budget: usize,
    rng: &mut SearchRng,
) -> StepOutcome
where
    F: FnMut(RandomKeyVector) -> Option<EvaluatedSolution>,
{
    let shaken = shake(current.vector(), shake_cfg, rng);
    let Some(start) = probe(shaken) else {
        return StepOutcome::Stopped;
    };
    let local = rvnd_budgeted(start, probe, rvnd_budget, rng);
    if local.cost() < current.cost() {
        StepOutcome::Improved(local)
    } else {
        StepOutcome::NotImproved
    }
}

fn descent_loop(
    ctx: &SearchContext<'_>,
    rng: &mut SearchRng,
    levels: &[ShakeConfig],
    stall_limit: usize,
    rvnd_budget: usize,
) {
    let mut probe = ctx.probe();
    let restart = |rng: &mut SearchRng| {
        ctx.pool()
            .random_member(rng)
            .or_else(|| ctx.random_solution(rng))
    };
    let Some(mut current) = restart(rng) else {
        return;
    };
    let mut best_cost = current.cost();
    let mut k = 0usize;
    let mut stall = 0usize;
    while !ctx.is_stopped() {
        match descent_step(&current, &levels[k], &mut probe, rvnd_budget, rng) {
            StepOutcome::Stopped => return,
            StepOutcome::Improved(better) => {
                if better.cost() < best_cost {
                    best_cost = better.cost();
                    ctx.offer(&better);
                }
                current = better;
                k = 0;
                stall = 0;
            }
            StepOutcome::NotImproved => {
                k = (k + 1) % levels.len();
                stall += 1;
                if stall >= stall_limit {
                    match restart(rng) {
                        Some(s) => current = s,
                        None => return,
                    }
                    k = 0;
                    stall = 0;
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ils {
    params: IlsParams,
}

impl Ils {
    pub fn new(params: IlsParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }
}

impl Metaheuristic for Ils {
    fn label(&self) -> String {
        "ILS".to_string()
    }

    fn search(&self, ctx: &SearchContext<'_>, rng: &mut SearchRng) {
        let budget = self.params.rvnd_calls_per_dimension * ctx.dimension();
        descent_loop(ctx, rng, &[self.params.shake], self.params.stall_limit, budget);
    }
}

#[derive(Debug, Clone)]
pub struct Vns {
    params: VnsParams,
}

impl Vns {
    pub fn new(params: VnsParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }
}

impl Metaheuristic for Vns {
    fn label(&self) -> String {
        "VNS".to_string()
    }

    fn search(&self, ctx: &SearchContext<'_>, rng: &mut SearchRng) {
        let budget = self.params.rvnd_calls_per_dimension * ctx.dimension();
        let levels = self.params.neighbourhoods();
        descent_loop(ctx, rng, &levels, self.params.stall_limit, budget);
    }
}
