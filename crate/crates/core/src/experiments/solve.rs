use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::decoder::Decoder;
use crate::error::{Result, RkoError};
use crate::io::{self, budget_for, ProblemKind};
use crate::mip::{brute_force_mip, MipDecoder, PenaltyModel};
use crate::pool::DEFAULT_POOL_CAPACITY;
use crate::portfolio::{brute_force_portfolio, check_portfolio, PortfolioDecoder, PortfolioInstance};
use crate::search::{
    build_searchers, run_ensemble_with, EnsembleOptions, RunBudget, RunMode, RunReport,
    SearcherConfig,
};
use crate::tdtsp::{brute_force_tdtsp, check_tdtsp, TdTspDecoder, TdTspInstance};

/// Holding bounds applied to OR-Library portfolio files unless overridden.
pub const DEFAULT_HOLDING_BOUNDS: (f64, f64) = (0.01, 0.25);
/// Simplex step of the portfolio oracle.
pub const DEFAULT_GRID_STEP: f64 = 1e-3;

/// Overrides for portfolio instances; OR-Library files carry only returns and
/// covariances, so `k` and `lambda` are mandatory for them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PortfolioOptions {
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// A loaded instance bound to its decoder.
pub enum Problem {
    Mip(MipDecoder),
    Portfolio(PortfolioDecoder),
    Tdtsp(TdTspDecoder),
}

impl Problem {
    pub fn load(kind: ProblemKind, text: &str, opts: &PortfolioOptions) -> Result<Self> {
        Ok(match kind {
            ProblemKind::Mip => {
                Problem::Mip(MipDecoder::new(io::parse_mip(text)?, PenaltyModel::default()))
            }
            ProblemKind::Tdtsp => Problem::Tdtsp(TdTspDecoder::new(io::parse_tdtsp(text)?)),
            ProblemKind::Portfolio => Problem::Portfolio(PortfolioDecoder::new(
                load_portfolio(text, opts)?,
            )),
        })
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            Problem::Mip(_) => ProblemKind::Mip,
            Problem::Portfolio(_) => ProblemKind::Portfolio,
            Problem::Tdtsp(_) => ProblemKind::Tdtsp,
        }
    }

    /// Variables, assets or customers, whichever sizes the instance.
    pub fn size(&self) -> usize {
        match self {
            Problem::Mip(d) => d.instance().num_vars(),
            Problem::Portfolio(d) => d.instance().n(),
            Problem::Tdtsp(d) => d.instance().n(),
        }
    }

    pub fn decoder(&self) -> &dyn Decoder {
        match self {
            Problem::Mip(d) => d,
            Problem::Portfolio(d) => d,
            Problem::Tdtsp(d) => d,
        }
    }

    pub fn default_time_limit(&self) -> f64 {
        budget_for(self.kind(), self.size())
    }

    /// Decoded solution for `keys`, with its feasibility verdict.
    pub fn describe(&self, keys: &[f64]) -> Value {
        match self {
            Problem::Mip(d) => {
                let a = d.decode(keys);
                let report = d.instance().check_feasibility(&a.x);
                json!({
                    "x": a.x,
                    "cost": a.cost,
                    "objective": d.instance().objective(&a.x),
                    "slack": a.violations,
                    "feasible": report.feasible,
                })
            }
            Problem::Portfolio(d) => {
                let s = d.decode(keys);
                let inst = d.instance();
                json!({
                    "assets": s.assets,
                    "weights": s.assets.iter().map(|&a| s.w[a]).collect::<Vec<_>>(),
                    "cost": s.cost,
                    "penalty": s.penalty,
                    "risk": inst.risk(&s.w),
                    "return": inst.expected_return(&s.w),
                    "feasible": check_portfolio(inst, &s).feasible(),
                })
            }
            Problem::Tdtsp(d) => {
                let s = d.decode(keys);
                let check = check_tdtsp(d.instance(), &s);
                json!({
                    "permutation": s.permutation,
                    "a": s.a,
                    "cost": s.cost,
                    "penalized": s.penalized,
                    "feasible": check.all_pass(),
                })
            }
        }
    }

    pub fn is_feasible(&self, keys: &[f64]) -> bool {
        self.describe(keys)["feasible"].as_bool().unwrap_or(false)
    }

    /// Exhaustive optimum within the oracle guards.
    pub fn oracle(&self, grid_step: f64) -> Result<Value> {
        Ok(match self {
            Problem::Mip(d) => {
                let o = brute_force_mip(d.instance(), &PenaltyModel::default())?;
                json!({
                    "kind": "mip",
                    "cost": o.best_feasible.as_ref().map_or(o.best_penalized.0, |b| b.0),
                    "x": o.best_feasible.as_ref().map_or(&o.best_penalized.1, |b| &b.1),
                    "feasible": o.best_feasible.is_some(),
                    "exact": o.exact,
                    "enumerated": o.enumerated,
                })
            }
            Problem::Portfolio(d) => {
                let o = brute_force_portfolio(d.instance(), grid_step)?;
                json!({
                    "kind": "portfolio",
                    "cost": o.cost,
                    "assets": o.assets,
                    "weights": o.assets.iter().map(|&a| o.w[a]).collect::<Vec<_>>(),
                    "grid_step": grid_step,
                    "grid_points": o.grid_points,
                })
            }
            Problem::Tdtsp(d) => {
                let o = brute_force_tdtsp(d.instance())?;
                json!({
                    "kind": "tdtsp",
                    "cost": o.cost,
                    "permutation": o.permutation,
                    "evaluated": o.evaluated,
                })
            }
        })
    }
}

fn load_portfolio(text: &str, opts: &PortfolioOptions) -> Result<PortfolioInstance> {
    if text.trim_start().starts_with('{') {
        let inst = io::parse_portfolio(text)?;
        let n = inst.n();
        let lower = opts.lower.map_or_else(|| inst.lower().to_vec(), |l| vec![l; n]);
        let upper = opts.upper.map_or_else(|| inst.upper().to_vec(), |u| vec![u; n]);
        return PortfolioInstance::new(
            inst.mu().to_vec(),
            inst.sigma().to_vec(),
            opts.lambda.unwrap_or(inst.lambda()),
            opts.k.unwrap_or(inst.k()),
            lower,
            upper,
        );
    }
    let file = io::parse_orlib_portfolio(text)?;
    let k = opts
        .k
        .ok_or_else(|| RkoError::config("OR-Library portfolio files need a cardinality (--k)"))?;
    let lambda = opts
        .lambda
        .ok_or_else(|| RkoError::config("OR-Library portfolio files need a risk aversion (--lambda)"))?;
    PortfolioInstance::with_uniform_bounds(
        file.mu,
        file.sigma,
        lambda,
        k,
        opts.lower.unwrap_or(DEFAULT_HOLDING_BOUNDS.0),
        opts.upper.unwrap_or(DEFAULT_HOLDING_BOUNDS.1),
    )
}

/// How to run a batch of seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub searchers: Vec<SearcherConfig>,
    pub seeds: Vec<u64>,
    /// Wall-clock seconds per run; `None` with no call limit means the
    /// instance-size schedule.
    pub time_limit: Option<f64>,
    pub decoder_calls: Option<u64>,
    /// Single-threaded round-robin mode; needs `decoder_calls`.
    pub deterministic: bool,
    pub pool_capacity: usize,
    pub target_cost: Option<f64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            searchers: SearcherConfig::default_set(),
            seeds: (1..=5).collect(),
            time_limit: None,
            decoder_calls: None,
            deterministic: false,
            pool_capacity: DEFAULT_POOL_CAPACITY,
            target_cost: None,
        }
    }
}

impl SolveConfig {
    pub fn with_seeds(mut self, runs: u64) -> Self {
        self.seeds = (1..=runs).collect();
        self
    }

    /// Budget for one seed; `default_seconds` applies when neither limit is
    /// set.
    pub fn budget(&self, seed: u64, default_seconds: f64) -> Result<RunBudget> {
        let time_limit = match (self.time_limit, self.decoder_calls) {
            (Some(t), _) => Some(t),
            (None, None) => Some(default_seconds),
            (None, Some(_)) => None,
        };
        let time_limit = match time_limit {
            Some(t) if !(t > 0.0 && t.is_finite()) => {
                return Err(RkoError::config(format!("time limit must be positive, got {t}")))
            }
            Some(t) => Some(Duration::from_secs_f64(t)),
            None => None,
        };
        let budget = RunBudget {
            time_limit,
            call_limit: self.decoder_calls,
            seed,
        };
        budget.validate()?;
        Ok(budget)
    }

    pub fn options(&self) -> EnsembleOptions {
        EnsembleOptions {
            pool_capacity: self.pool_capacity,
            mode: if self.deterministic {
                RunMode::sequential()
            } else {
                RunMode::Parallel
            },
            target_cost: self.target_cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub runs: Vec<RunReport>,
    pub best_cost: f64,
    pub mean_cost: f64,
    /// Seed of the best run (first one on ties).
    pub best_seed: u64,
}

impl SolveOutcome {
    pub fn best_run(&self) -> &RunReport {
        self.runs
            .iter()
            .find(|r| r.seed == self.best_seed)
            .expect("best seed belongs to a run")
    }
}

/// Runs one ensemble per seed on `decoder`.
pub fn solve(decoder: &dyn Decoder, cfg: &SolveConfig, default_seconds: f64) -> Result<SolveOutcome> {
    if cfg.seeds.is_empty() {
        return Err(RkoError::config("at least one seed is required"));
    }
    if cfg.deterministic && cfg.decoder_calls.is_none() {
        return Err(RkoError::config(
            "deterministic mode requires a decoder-call limit",
        ));
    }
    let searchers = build_searchers(&cfg.searchers)?;
    let opts = cfg.options();
    let mut runs = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let budget = cfg.budget(seed, default_seconds)?;
        runs.push(run_ensemble_with(decoder, &searchers, &budget, &opts)?);
    }
    let best = runs
        .iter()
        .min_by(|a, b| a.best_cost.total_cmp(&b.best_cost))
        .expect("non-empty runs");
    Ok(SolveOutcome {
        best_cost: best.best_cost,
        best_seed: best.seed,
        mean_cost: runs.iter().map(|r| r.best_cost).sum::<f64>() / runs.len() as f64,
        runs,
    })
}

/// Solves a loaded problem with its size-based default budget.
pub fn solve_problem(problem: &Problem, cfg: &SolveConfig) -> Result<SolveOutcome> {
    solve(problem.decoder(), cfg, problem.default_time_limit())
}

pub const RUNS_HEADER: [&str; 7] = [
    "seed",
    "best_cost",
    "time_to_best",
    "calls_to_best",
    "decoder_calls",
    "searcher",
    "target_reached",
];

pub fn write_runs_csv<W: std::io::Write>(runs: &[RunReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUNS_HEADER)?;
    for r in runs {
        w.write_record([
            r.seed.to_string(),
            super::fmt6(r.best_cost),
            super::fmt6(r.time_to_best),
            r.calls_to_best.to_string(),
            r.decoder_calls.to_string(),
            r.searcher_id.clone(),
            u8::from(r.target_reached).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// JSON summary of a solve batch, including the decoded best solution.
pub fn solve_summary(problem: &Problem, outcome: &SolveOutcome) -> Value {
    let best = outcome.best_run();
    json!({
        "kind": problem.kind().to_string(),
        "size": problem.size(),
        "best_cost": outcome.best_cost,
        "mean_cost": outcome.mean_cost,
        "best_seed": outcome.best_seed,
        "solution": problem.describe(&best.best_vector),
        "runs": outcome.runs.iter().map(|r| json!({
            "seed": r.seed,
            "best_cost": r.best_cost,
            "time_to_best": r.time_to_best,
            "calls_to_best": r.calls_to_best,
            "decoder_calls": r.decoder_calls,
            "searcher": r.searcher_id,
        })).collect::<Vec<_>>(),
    })
}

/// Synthetic TD-TSP instance, serialized.
pub fn generate_tdtsp(n: usize, intervals: usize, seed: u64) -> Result<String> {
    Ok(io::write_tdtsp(&TdTspInstance::generate(n, intervals, seed)?))
}
