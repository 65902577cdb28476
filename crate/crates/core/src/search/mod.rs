//! The searcher ensemble.
//!
//! A run seeds an [`ElitePool`] with random solutions and then lets every
//! configured [`Metaheuristic`] loose on the same decoder. Searchers share
//! nothing but the pool, a decoder-call counter and a stop flag.
//!
//! In [`RunMode::Sequential`] the searchers still live on their own threads,
//! but a baton lets exactly one of them run at a time and passes it on every
//! `quantum` decoder calls, which makes the whole run a pure function of the
//! master seed.

mod brkga;
mod descent;
mod sa;
mod turnstile;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Mutex, PoisonError};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decoder::Decoder;
use crate::error::{Result, RkoError};
use crate::keys::{EvaluatedSolution, RandomKeyVector};
use crate::pool::{ElitePool, InsertOutcome, DEFAULT_POOL_CAPACITY};

pub use brkga::{Brkga, BrkgaParams};
pub use descent::{Ils, IlsParams, Vns, VnsParams};
pub use sa::{metropolis_accept, SaParams, SimulatedAnnealing};

use turnstile::Turnstile;

pub type SearchRng = ChaCha8Rng;

pub const DEFAULT_QUANTUM: u64 = 100;

const POOL_INIT: usize = usize::MAX;

/// Stopping rule and master seed of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunBudget {
    pub time_limit: Option<Duration>,
    pub call_limit: Option<u64>,
    pub seed: u64,
}

impl RunBudget {
    pub fn seconds(secs: f64, seed: u64) -> Self {
        Self {
            time_limit: Some(Duration::from_secs_f64(secs)),
            call_limit: None,
            seed,
        }
    }

    pub fn calls(calls: u64, seed: u64) -> Self {
        Self {
            time_limit: None,
            call_limit: Some(calls),
            seed,
        }
    }

    pub fn with_call_limit(mut self, calls: u64) -> Self {
        self.call_limit = Some(calls);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let time_ok = self.time_limit.is_some_and(|d| !d.is_zero());
        let calls_ok = self.call_limit.is_some_and(|c| c > 0);
        if self.time_limit.is_some_and(|d| d.is_zero()) || self.call_limit == Some(0) {
            return Err(RkoError::config("budget limits must be positive"));
        }
        if !time_ok && !calls_ok {
            return Err(RkoError::config(
                "budget needs a wall-clock limit or a decoder-call limit",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// All searchers run concurrently.
    Parallel,
    /// Searchers take turns, `quantum` decoder calls each. Requires a
    /// decoder-call limit; the wall clock is ignored and times are reported
    /// as zero.
    Sequential { quantum: u64 },
}

impl RunMode {
    pub fn sequential() -> Self {
        RunMode::Sequential {
            quantum: DEFAULT_QUANTUM,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleOptions {
    pub pool_capacity: usize,
    pub mode: RunMode,
    /// Stop as soon as the best cost is at or below this value.
    pub target_cost: Option<f64>,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            pool_capacity: DEFAULT_POOL_CAPACITY,
            mode: RunMode::Parallel,
            target_cost: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub seconds: f64,
    pub calls: u64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub best_cost: f64,
    pub best_vector: Vec<f64>,
    /// Seconds from run start until the best solution was decoded.
    pub time_to_best: f64,
    /// Decoder-call ordinal that produced the best solution.
    pub calls_to_best: u64,
    pub decoder_calls: u64,
    pub seed: u64,
    pub searcher_id: String,
    /// Every improvement of the run-wide best, in discovery order.
    pub trace: Vec<TracePoint>,
    pub target_reached: bool,
}

/// A search strategy over key vectors. Implementations loop until
/// [`SearchContext::evaluate`] returns `None`.
pub trait Metaheuristic: Send + Sync {
    fn label(&self) -> String;

    fn search(&self, ctx: &SearchContext<'_>, rng: &mut SearchRng);
}

/// Searcher configurations understood by the command line and config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SearcherConfig {
    Brkga(BrkgaParams),
    Sa(SaParams),
    Ils(IlsParams),
    Vns(VnsParams),
}

impl SearcherConfig {
    pub fn build(&self) -> Result<Box<dyn Metaheuristic>> {
        Ok(match self {
            SearcherConfig::Brkga(p) => Box::new(Brkga::new(p.clone())?),
            SearcherConfig::Sa(p) => Box::new(SimulatedAnnealing::new(p.clone())?),
            SearcherConfig::Ils(p) => Box::new(Ils::new(p.clone())?),
            SearcherConfig::Vns(p) => Box::new(Vns::new(p.clone())?),
        })
    }

    /// Parses a comma-separated list such as `brkga,sa,ils,vns` into
    /// default-parameter searchers.
    pub fn parse_list(list: &str) -> Result<Vec<SearcherConfig>> {
        let out: Vec<SearcherConfig> = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| match s.to_ascii_lowercase().as_str() {
                "brkga" => Ok(SearcherConfig::Brkga(BrkgaParams::default())),
                "sa" => Ok(SearcherConfig::Sa(SaParams::default())),
                "ils" => Ok(SearcherConfig::Ils(IlsParams::default())),
                "vns" => Ok(SearcherConfig::Vns(VnsParams::default())),
                other => Err(RkoError::config(format!("unknown searcher `{other}`"))),
            })
            .collect::<Result<_>>()?;
        if out.is_empty() {
            return Err(RkoError::config("searcher list is empty"));
        }
        Ok(out)
    }

    pub fn default_set() -> Vec<SearcherConfig> {
        vec![
            SearcherConfig::Brkga(BrkgaParams::default()),
            SearcherConfig::Sa(SaParams::default()),
            SearcherConfig::Ils(IlsParams::default()),
            SearcherConfig::Vns(VnsParams::default()),
        ]
    }
}

pub fn build_searchers(configs: &[SearcherConfig]) -> Result<Vec<Box<dyn Metaheuristic>>> {
    configs.iter().map(SearcherConfig::build).collect()
}

struct Best {
    solution: EvaluatedSolution,
    seconds: f64,
    who: usize,
}

#[derive(Default)]
struct Tracker {
    best: Option<Best>,
    trace: Vec<TracePoint>,
    failure: Option<RkoError>,
}

struct Shared<'a> {
    decoder: &'a dyn Decoder,
    dimension: usize,
    pool: ElitePool,
    calls: AtomicU64,
    call_limit: Option<u64>,
    deadline: Option<Instant>,
    started: Instant,
    measure_time: bool,
    stop: AtomicBool,
    target: Option<f64>,
    tracker: Mutex<Tracker>,
    turnstile: Option<Turnstile>,
}

impl Shared<'_> {
    fn evaluate(&self, who: usize, v: RandomKeyVector) -> Option<EvaluatedSolution> {
        if self.stop.load(Ordering::Acquire) {
            return None;
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                self.stop.store(true, Ordering::Release);
                return None;
            }
        }
        let reserved = self
            .calls
            .fetch_update(Ordering::AcqRel, Ordering::Acquire, |c| match self.call_limit {
                Some(limit) if c >= limit => None,
                _ => Some(c + 1),
            });
        let ordinal = match reserved {
            Ok(prev) => prev + 1,
            Err(_) => {
                self.stop.store(true, Ordering::Release);
                return None;
            }
        };

        let cost = self.decoder.cost(v.keys());
        let solution = match EvaluatedSolution::new(v, cost, ordinal) {
            Ok(s) => s,
            Err(e) => {
                let mut t = self.tracker.lock().unwrap_or_else(PoisonError::into_inner);
                t.failure.get_or_insert(e);
                self.stop.store(true, Ordering::Release);
                return None;
            }
        };

        {
            let mut t = self.tracker.lock().unwrap_or_else(PoisonError::into_inner);
            if t.best.as_ref().is_none_or(|b| cost < b.solution.cost()) {
                let seconds = if self.measure_time {
                    self.started.elapsed().as_secs_f64()
                } else {
                    0.0
                };
                t.trace.push(TracePoint {
                    seconds,
                    calls: ordinal,
                    cost,
                });
                t.best = Some(Best {
                    solution: solution.clone(),
                    seconds,
                    who,
                });
            }
        }
        if self.target.is_some_and(|target| cost <= target) {
            self.stop.store(true, Ordering::Release);
        }
        if let (Some(t), true) = (&self.turnstile, who != POOL_INIT) {
            t.tick(who);
        }
        Some(solution)
    }
}

/// Handle through which a searcher evaluates vectors and talks to the pool.
pub struct SearchContext<'a> {
    shared: &'a Shared<'a>,
    id: usize,
}

impl SearchContext<'_> {
    pub fn dimension(&self) -> usize {
        self.shared.dimension
    }

    /// Decodes `v`; `None` once the budget is spent or the run was stopped.
    pub fn evaluate(&self, v: RandomKeyVector) -> Option<EvaluatedSolution> {
        self.shared.evaluate(self.id, v)
    }

    pub fn random_solution(&self, rng: &mut SearchRng) -> Option<EvaluatedSolution> {
        let v = RandomKeyVector::random(self.dimension(), rng).ok()?;
        self.evaluate(v)
    }

    pub fn offer(&self, solution: &EvaluatedSolution) -> InsertOutcome {
        self.shared.pool.insert(solution.clone())
    }

    pub fn pool(&self) -> &ElitePool {
        &self.shared.pool
    }

    pub fn is_stopped(&self) -> bool {
        self.shared.stop.load(Ordering::Acquire)
    }

    /// Probe closure for the local searches.
    pub fn probe(&self) -> impl FnMut(RandomKeyVector) -> Option<EvaluatedSolution> + '_ {
        move |v| self.evaluate(v)
    }
}

struct FinishGuard<'a> {
    turnstile: Option<&'a Turnstile>,
    id: usize,
}

impl Drop for FinishGuard<'_> {
    fn drop(&mut self) {
        if let Some(t) = self.turnstile {
            t.finish(self.id);
        }
    }
}

/// Runs the ensemble with default options (parallel mode).
pub fn run_ensemble(
    decoder: &dyn Decoder,
    searchers: &[Box<dyn Metaheuristic>],
    budget: &RunBudget,
    pool_capacity: usize,
) -> Result<RunReport> {
    let opts = EnsembleOptions {
        pool_capacity,
        ..EnsembleOptions::default()
    };
    run_ensemble_with(decoder, searchers, budget, &opts)
}

pub fn run_ensemble_with(
    decoder: &dyn Decoder,
    searchers: &[Box<dyn Metaheuristic>],
    budget: &RunBudget,
    opts: &EnsembleOptions,
) -> Result<RunReport> {
    if searchers.is_empty() {
        return Err(RkoError::config("at least one searcher is required"));
    }
    budget.validate()?;
    let dimension = decoder.dimension();
    if dimension == 0 {
        return Err(RkoError::InvalidDimension(0));
    }
    let (turnstile, deadline, measure_time) = match opts.mode {
        RunMode::Parallel => (
            None,
            budget.time_limit.map(|d| Instant::now() + d),
            true,
        ),
        RunMode::Sequential { quantum } => {
            if budget.call_limit.is_none() {
                return Err(RkoError::config(
                    "sequential mode requires a decoder-call limit",
                ));
            }
            (Some(Turnstile::new(searchers.len(), quantum)), None, false)
        }
    };

    let shared = Shared {
        decoder,
        dimension,
        pool: ElitePool::new(opts.pool_capacity)?,
        calls: AtomicU64::new(0),
        call_limit: budget.call_limit,
        deadline,
        started: Instant::now(),
        measure_time,
        stop: AtomicBool::new(false),
        target: opts.target_cost,
        tracker: Mutex::new(Tracker::default()),
        turnstile,
    };

    let mut master = ChaCha8Rng::seed_from_u64(budget.seed);
    for _ in 0..opts.pool_capacity {
        let v = RandomKeyVector::random(dimension, &mut master)?;
        match shared.evaluate(POOL_INIT, v) {
            Some(s) => {
                shared.pool.insert(s);
            }
            None => break,
        }
    }
    let seeds: Vec<u64> = searchers.iter().map(|_| master.gen()).collect();

    if !shared.stop.load(Ordering::Acquire) {
        std::thread::scope(|scope| {
            for (id, (mh, &seed)) in searchers.iter().zip(&seeds).enumerate() {
                let shared = &shared;
                scope.spawn(move || {
                    let _guard = FinishGuard {
                        turnstile: shared.turnstile.as_ref(),
                        id,
                    };
                    if let Some(t) = &shared.turnstile {
                        t.wait_turn(id);
                    }
                    let ctx = SearchContext { shared, id };
                    let mut rng = SearchRng::seed_from_u64(seed);
                    mh.search(&ctx, &mut rng);
                });
            }
        });
    } else if let Some(t) = &shared.turnstile {
        for id in 0..searchers.len() {
            t.finish(id);
        }
    }

    let tracker = shared
        .tracker
        .into_inner()
        .unwrap_or_else(PoisonError::into_inner);
    if let Some(e) = tracker.failure {
        return Err(e);
    }
    let best = tracker
        .best
        .ok_or_else(|| RkoError::config("budget too small to evaluate a single solution"))?;
    shared.pool.insert(best.solution.clone());

    let target_reached = opts.target_cost.is_some_and(|t| best.solution.cost() <= t);
    let searcher_id = if best.who == POOL_INIT {
        "pool-init".to_string()
    } else {
        searchers[best.who].label()
    };
    let pool_best = shared
        .pool
        .best()
        .expect("pool holds at least the tracked best");
    Ok(RunReport {
        best_cost: pool_best.cost(),
        best_vector: pool_best.vector().keys().to_vec(),
        time_to_best: best.seconds,
        calls_to_best: best.solution.decoded_at(),
        decoder_calls: shared.calls.load(Ordering::Acquire),
        seed: budget.seed,
        searcher_id,
        trace: tracker.trace,
        target_reached,
    })
}
