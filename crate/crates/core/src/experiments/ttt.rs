use serde::{Deserialize, Serialize};

use crate::decoder::Decoder;
use crate::error::{Result, RkoError};
use crate::search::{run_ensemble_with, EnsembleOptions, Metaheuristic, RunBudget, RunMode};

/// Target value `pct` percent worse than `reference` (for minimization).
pub fn target_from_percent(reference: f64, pct: f64) -> f64 {
    reference + reference.abs() * pct / 100.0
}

/// Outcome of one time-to-target repetition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TttRun {
    pub seed: u64,
    /// Seconds until the target was met, or the limit when censored.
    pub seconds: f64,
    /// Decoder calls until the target was met, or all calls spent.
    pub calls: u64,
    pub reached: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TttPoint {
    pub seed: u64,
    pub seconds: f64,
    pub calls: u64,
    pub censored: bool,
    /// Empirical cumulative probability `(i - 0.5) / N` of the i-th sorted run.
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TttRecord {
    pub target: f64,
    pub limit_seconds: Option<f64>,
    pub limit_calls: Option<u64>,
    pub points: Vec<TttPoint>,
}

impl TttRecord {
    /// Sorts the runs by time (calls break ties, censored runs last) and
    /// attaches plotting positions.
    pub fn from_runs(
        target: f64,
        limit_seconds: Option<f64>,
        limit_calls: Option<u64>,
        runs: &[TttRun],
    ) -> Self {
        let mut runs = runs.to_vec();
        for r in &mut runs {
            if !r.reached {
                if let Some(l) = limit_seconds {
                    r.seconds = l;
                }
                if let Some(c) = limit_calls {
                    r.calls = c;
                }
            }
        }
        runs.sort_by(|a, b| {
            a.reached
                .cmp(&b.reached)
                .reverse()
                .then(a.seconds.total_cmp(&b.seconds))
                .then(a.calls.cmp(&b.calls))
                .then(a.seed.cmp(&b.seed))
        });
        let n = runs.len() as f64;
        let points = runs
            .iter()
            .enumerate()
            .map(|(i, r)| TttPoint {
                seed: r.seed,
                seconds: r.seconds,
                calls: r.calls,
                censored: !r.reached,
                probability: (i as f64 + 0.5) / n,
            })
            .collect();
        Self {
            target,
            limit_seconds,
            limit_calls,
            points,
        }
    }

    pub fn uncensored(&self) -> usize {
        self.points.iter().filter(|p| !p.censored).count()
    }

    pub fn censored(&self) -> usize {
        self.points.len() - self.uncensored()
    }
}

/// Runs `repetitions` ensembles with seeds `1..=repetitions`, each stopping as
/// soon as its best cost reaches `target` or the budget runs out.
pub fn run_ttt(
    decoder: &dyn Decoder,
    searchers: &[Box<dyn Metaheuristic>],
    target: f64,
    template: &RunBudget,
    repetitions: usize,
    mode: RunMode,
    pool_capacity: usize,
) -> Result<TttRecord> {
    if repetitions == 0 {
        return Err(RkoError::config("TTT needs at least one repetition"));
    }
    let opts = EnsembleOptions {
        pool_capacity,
        mode,
        target_cost: Some(target),
    };
    let mut runs = Vec::with_capacity(repetitions);
    for seed in 1..=repetitions as u64 {
        let budget = RunBudget { seed, ..*template };
        let report = run_ensemble_with(decoder, searchers, &budget, &opts)?;
        runs.push(TttRun {
            seed,
            seconds: report.time_to_best,
            calls: if report.target_reached {
                report.calls_to_best
            } else {
                report.decoder_calls
            },
            reached: report.target_reached,
        });
    }
    let limit_seconds = match mode {
        RunMode::Parallel => template.time_limit.map(|d| d.as_secs_f64()),
        RunMode::Sequential { .. } => None,
    };
    Ok(TttRecord::from_runs(
        target,
        limit_seconds,
        template.call_limit,
        &runs,
    ))
}

pub const TTT_HEADER: [&str; 6] = ["seed", "seconds", "calls", "censored", "probability", "target"];

pub fn write_ttt_csv<W: std::io::Write>(record: &TttRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TTT_HEADER)?;
    for p in &record.points {
        w.write_record([
            p.seed.to_string(),
            super::fmt6(p.seconds),
            p.calls.to_string(),
            u8::from(p.censored).to_string(),
            super::fmt6(p.probability),
            super::fmt6(record.target),
        ])?;
    }
    w.flush()?;
    Ok(())
}
