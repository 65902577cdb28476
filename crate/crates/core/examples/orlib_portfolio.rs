//! Reads a portfolio file in the OR-Library layout and solves one
//! cardinality setting. Without an argument a small file is synthesized.

use rko::experiments::{solve, SolveConfig};
use rko::io::{format_orlib_portfolio, parse_orlib_portfolio, read_to_string};
use rko::portfolio::{PortfolioDecoder, PortfolioInstance};

fn main() -> rko::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => read_to_string(path)?,
        None => {
            let n = 12;
            let mu: Vec<f64> = (0..n).map(|i| 0.003 + 0.0005 * i as f64).collect();
            let sd: Vec<f64> = (0..n).map(|i| 0.03 + 0.004 * i as f64).collect();
            let corr: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.25 }).collect())
                .collect();
            format_orlib_portfolio(&mu, &sd, &corr)
        }
    };
    let file = parse_orlib_portfolio(&text)?;
    println!("{} assets", file.mu.len());

    let inst = PortfolioInstance::with_uniform_bounds(file.mu, file.sigma, 0.3, 5, 0.01, 0.25)?;
    let decoder = PortfolioDecoder::new(inst);
    let cfg = SolveConfig {
        time_limit: Some(1.0),
        ..SolveConfig::default()
    }
    .with_seeds(3);
    let out = solve(&decoder, &cfg, 1.0)?;
    let sol = decoder.decode(&out.best_run().best_vector);
    println!("best {:.6} mean {:.6}", out.best_cost, out.mean_cost);
    for &a in &sol.assets {
        println!("  asset {:>3}: {:.4}", a + 1, sol.w[a]);
    }
    Ok(())
}
