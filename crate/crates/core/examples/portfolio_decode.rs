//! Decodes a six-key vector into a three-asset portfolio and checks it.

use rko::portfolio::{check_portfolio, PortfolioDecoder, PortfolioInstance};

fn main() -> rko::Result<()> {
    let n = 10;
    let mu: Vec<f64> = (0..n).map(|i| 0.002 + 0.001 * i as f64).collect();
    let sigma = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.004 } else { 0.001 }).collect())
        .collect();
    let inst = PortfolioInstance::with_uniform_bounds(mu, sigma, 0.3, 3, 0.01, 0.40)?;
    let decoder = PortfolioDecoder::new(inst);

    let keys = [0.81, 0.32, 0.54, 0.29, 0.15, 0.91];
    let sol = decoder.decode(&keys);
    println!("selected assets (1-based): {:?}", sol.assets.iter().map(|a| a + 1).collect::<Vec<_>>());
    for &a in &sol.assets {
        println!("  w[{}] = {:.4}", a + 1, sol.w[a]);
    }
    println!("bound violation {:.4}, cost {:.4}", sol.penalty, sol.cost);

    let check = check_portfolio(decoder.instance(), &sol);
    println!(
        "budget {} cardinality {} bounds {} (violated on {:?})",
        check.budget_ok,
        check.cardinality_ok,
        check.bounds_ok,
        check.bound_violations.iter().map(|a| a + 1).collect::<Vec<_>>()
    );
    Ok(())
}
