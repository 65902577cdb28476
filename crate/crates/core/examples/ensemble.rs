//! Runs the searcher ensemble on a continuous test function, first in
//! parallel against the clock and then in the reproducible sequential mode.

use rko::search::{build_searchers, run_ensemble_with, EnsembleOptions, RunBudget, RunMode, SearcherConfig};
use rko::FnDecoder;

fn rastrigin(keys: &[f64]) -> f64 {
    keys.iter()
        .map(|k| {
            let x = 10.24 * k - 5.12 + 0.7;
            x * x - 10.0 * (2.0 * std::f64::consts::PI * x).cos() + 10.0
        })
        .sum()
}

fn main() -> rko::Result<()> {
    let decoder = FnDecoder::new(8, rastrigin);

    // searcher parameters can come from JSON
    let configs: Vec<SearcherConfig> = serde_json::from_str(
        r#"[{"kind":"brkga","population_size":60},{"kind":"sa"},{"kind":"ils"},{"kind":"vns"}]"#,
    )?;
    let searchers = build_searchers(&configs)?;

    let r = run_ensemble_with(
        &decoder,
        &searchers,
        &RunBudget::seconds(1.0, 7),
        &EnsembleOptions::default(),
    )?;
    println!(
        "parallel: best {:.4} after {:.3}s by {} ({} decoder calls)",
        r.best_cost, r.time_to_best, r.searcher_id, r.decoder_calls
    );
    for p in r.trace.iter().rev().take(5).rev() {
        println!("  call {:>7}: {:.4}", p.calls, p.cost);
    }

    let opts = EnsembleOptions {
        mode: RunMode::sequential(),
        ..EnsembleOptions::default()
    };
    let a = run_ensemble_with(&decoder, &searchers, &RunBudget::calls(50_000, 7), &opts)?;
    let b = run_ensemble_with(&decoder, &searchers, &RunBudget::calls(50_000, 7), &opts)?;
    println!(
        "sequential: best {:.4}, repeat identical: {}",
        a.best_cost,
        a == b
    );
    Ok(())
}
