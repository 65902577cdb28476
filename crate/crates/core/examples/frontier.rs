//! Sweeps the risk-aversion parameter on a small portfolio and prints the
//! efficient frontier as CSV.

use rko::experiments::{dominates, run_frontier, write_frontier_csv, SolveConfig};
use rko::portfolio::PortfolioInstance;

fn main() -> rko::Result<()> {
    let mu = vec![0.010, 0.008, 0.012, 0.005, 0.009, 0.011];
    let vol = [0.20, 0.12, 0.30, 0.08, 0.15, 0.25];
    let sigma = (0..6)
        .map(|i| {
            (0..6)
                .map(|j| if i == j { vol[i] * vol[i] } else { 0.3 * vol[i] * vol[j] })
                .collect()
        })
        .collect();
    let inst = PortfolioInstance::with_uniform_bounds(mu, sigma, 0.5, 3, 0.05, 0.6)?;

    let lambdas: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let cfg = SolveConfig {
        decoder_calls: Some(20_000),
        deterministic: true,
        ..SolveConfig::default()
    }
    .with_seeds(2);
    let points = run_frontier(&inst, &lambdas, &cfg, 1.0)?;
    write_frontier_csv(&points, std::io::stdout())?;

    let dominated = points
        .iter()
        .filter(|p| points.iter().any(|q| dominates(q, p, 1e-9)))
        .count();
    eprintln!("{dominated} of {} points dominated", points.len());
    Ok(())
}
