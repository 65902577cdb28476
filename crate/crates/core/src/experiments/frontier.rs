use serde::{Deserialize, Serialize};

use crate::error::{Result, RkoError};
use crate::portfolio::{check_portfolio, PortfolioDecoder, PortfolioInstance};

use super::solve::{solve, SolveConfig};

/// The sweep `0.02, 0.04, ..., 0.98`.
pub fn default_lambdas() -> Vec<f64> {
    (1..=49).map(|i| i as f64 * 0.02).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub lambda: f64,
    pub risk: f64,
    pub ret: f64,
    pub cost: f64,
    pub feasible: bool,
    pub assets: Vec<usize>,
}

/// True when `a` is at least as good as `b` in both risk and return and
/// strictly better in one.
pub fn dominates(a: &FrontierPoint, b: &FrontierPoint, tol: f64) -> bool {
    let no_worse = a.risk <= b.risk + tol && a.ret >= b.ret - tol;
    let better = a.risk < b.risk - tol || a.ret > b.ret + tol;
    no_worse && better
}

/// One batch of seeded ensemble runs per risk-aversion value; each point
/// holds the best portfolio over the seeds.
pub fn run_frontier(
    instance: &PortfolioInstance,
    lambdas: &[f64],
    cfg: &SolveConfig,
    default_seconds: f64,
) -> Result<Vec<FrontierPoint>> {
    if lambdas.is_empty() {
        return Err(RkoError::config("frontier needs at least one lambda"));
    }
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(RkoError::config(format!("lambda {lambda} must lie in (0, 1)")));
        }
        let decoder = PortfolioDecoder::new(instance.with_lambda(lambda)?);
        let outcome = solve(&decoder, cfg, default_seconds)?;
        let sol = decoder.decode(&outcome.best_run().best_vector);
        let inst = decoder.instance();
        points.push(FrontierPoint {
            lambda,
            risk: inst.risk(&sol.w),
            ret: inst.expected_return(&sol.w),
            cost: sol.cost,
            feasible: check_portfolio(inst, &sol).feasible(),
            assets: sol.assets,
        });
    }
    Ok(points)
}

pub const FRONTIER_HEADER: [&str; 5] = ["lambda", "risk", "return", "cost", "feasible"];

pub fn write_frontier_csv<W: std::io::Write>(points: &[FrontierPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FRONTIER_HEADER)?;
    for p in points {
        w.write_record([
            super::fmt6(p.lambda),
            super::fmt6(p.risk),
            super::fmt6(p.ret),
            super::fmt6(p.cost),
            u8::from(p.feasible).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(risk: f64, ret: f64) -> FrontierPoint {
        FrontierPoint {
            lambda: 0.5,
            risk,
            ret,
            cost: 0.0,
            feasible: true,
            assets: vec![],
        }
    }

    #[test]
    fn default_sweep_excludes_endpoints() {
        let l = default_lambdas();
        assert_eq!(l.len(), 49);
        assert!((l[0] - 0.02).abs() < 1e-12);
        assert!((l[48] - 0.98).abs() < 1e-12);
    }

    #[test]
    fn domination() {
        assert!(dominates(&pt(1.0, 2.0), &pt(2.0, 2.0), 0.0));
        assert!(!dominates(&pt(1.0, 1.0), &pt(2.0, 2.0), 0.0));
        assert!(!dominates(&pt(1.0, 1.0), &pt(1.0, 1.0), 0.0));
    }
}
