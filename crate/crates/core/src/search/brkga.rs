use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Metaheuristic, SearchContext, SearchRng};
use crate::error::{Result, RkoError};
use crate::keys::{EvaluatedSolution, RandomKeyVector};
use crate::perturb::{blend, BlendConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BrkgaParams {
    pub population_size: usize,
    pub elite_fraction: f64,
    pub mutant_fraction: f64,
    /// Probability that an offspring key comes from the elite parent.
    pub inherit_bias: f64,
    /// Generations between pool exchanges.
    pub exchange_interval: usize,
}

impl Default for BrkgaParams {
    fn default() -> Self {
        Self {
            population_size: 100,
            elite_fraction: 0.20,
            mutant_fraction: 0.15,
            inherit_bias: 0.70,
            exchange_interval: 50,
        }
    }
}

impl BrkgaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 3 {
            return Err(RkoError::config("BRKGA population must hold at least 3 individuals"));
        }
        let in_open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !in_open_unit(self.elite_fraction) || !in_open_unit(self.mutant_fraction) {
            return Err(RkoError::config("BRKGA elite and mutant fractions must lie in (0, 1)"));
        }
        if self.elite_fraction + self.mutant_fraction >= 1.0 {
            return Err(RkoError::config("BRKGA elite + mutant fractions must be below 1"));
        }
        if self.exchange_interval == 0 {
            return Err(RkoError::config("BRKGA exchange interval must be positive"));
        }
        BlendConfig::new(self.inherit_bias, 0.0, 1)?;
        Ok(())
    }

    /// Number of elites, mutants and offspring per generation.
    pub fn split(&self) -> (usize, usize, usize) {
        let p = self.population_size;
        let elites = ((self.elite_fraction * p as f64) as usize).clamp(1, p - 2);
        let mutants = ((self.mutant_fraction * p as f64) as usize).min(p - elites - 1);
        (elites, mutants, p - elites - mutants)
    }
}

#[derive(Debug, Clone)]
pub struct Brkga {
    params: BrkgaParams,
}

impl Brkga {
    pub fn new(params: BrkgaParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &BrkgaParams {
        &self.params
    }
}

fn sort_by_cost(pop: &mut [EvaluatedSolution]) {
    pop.sort_by(|a, b| a.cost().total_cmp(&b.cost()));
}

/// Builds the next generation from a cost-sorted population: elites are
/// carried over unchanged, followed by fresh mutants and elite x non-elite
/// offspring. Returns `None` when `probe` runs dry.
pub fn next_generation<F>(
    population: &[EvaluatedSolution],
    params: &BrkgaParams,
    probe: &mut F,
    rng: &mut SearchRng,
) -> Option<Vec<EvaluatedSolution>>
where
    F: FnMut(RandomKeyVector) -> Option<EvaluatedSolution>,
{
    let p = population.len();
    let dim = population.first()?.vector().len();
    let (elites, mutants, offspring) = params.split();
    let blend_cfg = BlendConfig {
        rho: params.inherit_bias,
        mu: 0.0,
        factor: 1,
    };
    let mut next = Vec::with_capacity(p);
    next.extend_from_slice(&population[..elites]);
    for _ in 0..mutants {
        next.push(probe(RandomKeyVector::random(dim, rng).ok()?)?);
    }
    for _ in 0..offspring {
        let a = &population[rng.gen_range(0..elites)];
        let b = &population[rng.gen_range(elites..p)];
        let child = blend(a.vector(), b.vector(), &blend_cfg, rng).ok()?;
        next.push(probe(child)?);
    }
    sort_by_cost(&mut next);
    Some(next)
}

impl Metaheuristic for Brkga {
    fn label(&self) -> String {
        "BRKGA".to_string()
    }

    fn search(&self, ctx: &SearchContext<'_>, rng: &mut SearchRng) {
        let p = self.params.population_size;
        let (elites, _, _) = self.params.split();
        let mut probe = ctx.probe();

        let mut population = Vec::with_capacity(p);
        for _ in 0..p {
            match ctx.random_solution(rng) {
                Some(s) => population.push(s),
                None => return,
            }
        }
        sort_by_cost(&mut population);
        let mut best_cost = population[0].cost();
        ctx.offer(&population[0]);

        let mut generation = 0usize;
        while !ctx.is_stopped() {
            population = match next_generation(&population, &self.params, &mut probe, rng) {
                Some(next) => next,
                None => return,
            };
            generation += 1;
            if population[0].cost() < best_cost {
                best_cost = population[0].cost();
                ctx.offer(&population[0]);
            }
            if generation % self.params.exchange_interval == 0 {
                if let Some(member) = ctx.pool().random_member(rng) {
                    let slot = rng.gen_range(elites..p);
                    population[slot] = member;
                    sort_by_cost(&mut population);
                }
            }
        }
    }
}
