//! A 0/1 knapsack written as a generic integer program, solved by the
//! ensemble through the penalty decoder and checked against enumeration.

use rko::mip::{brute_force_mip, knapsack, MipDecoder, PenaltyModel};
use rko::search::{build_searchers, run_ensemble_with, EnsembleOptions, RunBudget, RunMode, SearcherConfig};

fn main() -> rko::Result<()> {
    let weights = [70., 73., 77., 80., 82., 87., 90., 94., 98., 106., 110., 113., 115., 118., 120.];
    let profits = [135., 139., 149., 150., 156., 163., 173., 184., 192., 201., 210., 214., 221., 229., 240.];
    let inst = knapsack(&weights, &profits, 750.0)?;

    let oracle = brute_force_mip(&inst, &PenaltyModel::default())?;
    let (opt, _) = oracle.best_feasible.clone().expect("empty knapsack is feasible");
    println!("enumeration optimum: profit {}", -opt);

    let decoder = MipDecoder::new(inst.clone(), PenaltyModel::default());
    let searchers = build_searchers(&SearcherConfig::default_set())?;
    let opts = EnsembleOptions {
        mode: RunMode::sequential(),
        ..EnsembleOptions::default()
    };
    for seed in 1..=5 {
        let r = run_ensemble_with(&decoder, &searchers, &RunBudget::calls(20_000, seed), &opts)?;
        let x = inst.map_keys(&r.best_vector);
        let feasible = inst.check_feasibility(&x).feasible;
        let picked: Vec<usize> = (0..x.len()).filter(|&i| x[i] == 1.0).collect();
        println!(
            "seed {seed}: profit {} feasible {feasible} items {picked:?} (found by {} at call {})",
            -r.best_cost, r.searcher_id, r.calls_to_best
        );
    }
    Ok(())
}
