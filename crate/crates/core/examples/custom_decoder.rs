//! Plugs a new problem into the ensemble by implementing `Decoder`:
//! single-machine scheduling with weighted completion times, where the key
//! order gives the job sequence.

use rko::search::{build_searchers, run_ensemble_with, EnsembleOptions, RunBudget, RunMode, SearcherConfig};
use rko::tdtsp::permutation_from_keys;
use rko::Decoder;

struct WeightedCompletion {
    durations: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedCompletion {
    fn sequence(&self, keys: &[f64]) -> Vec<usize> {
        permutation_from_keys(keys).into_iter().map(|j| j - 1).collect()
    }
}

impl Decoder for WeightedCompletion {
    fn dimension(&self) -> usize {
        self.durations.len()
    }

    fn cost(&self, keys: &[f64]) -> f64 {
        let mut clock = 0.0;
        self.sequence(keys)
            .into_iter()
            .map(|j| {
                clock += self.durations[j];
                self.weights[j] * clock
            })
            .sum()
    }
}

fn main() -> rko::Result<()> {
    let problem = WeightedCompletion {
        durations: vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0, 5.0, 3.0],
        weights: vec![2.0, 7.0, 1.0, 8.0, 2.0, 8.0, 1.0, 8.0, 2.0, 8.0],
    };
    // Smith's rule (ratio order) is optimal for this problem
    let mut smith: Vec<usize> = (0..problem.dimension()).collect();
    smith.sort_by(|&a, &b| {
        (problem.durations[a] / problem.weights[a])
            .total_cmp(&(problem.durations[b] / problem.weights[b]))
    });
    let mut keys = vec![0.0; smith.len()];
    for (pos, &j) in smith.iter().enumerate() {
        keys[j] = pos as f64 / smith.len() as f64;
    }
    println!("ratio-rule cost {}", problem.cost(&keys));

    let searchers = build_searchers(&SearcherConfig::parse_list("brkga,ils")?)?;
    let opts = EnsembleOptions {
        mode: RunMode::sequential(),
        ..EnsembleOptions::default()
    };
    let r = run_ensemble_with(&problem, &searchers, &RunBudget::calls(20_000, 3), &opts)?;
    println!("ensemble cost {} sequence {:?}", r.best_cost, problem.sequence(&r.best_vector));
    Ok(())
}
