//! Time-to-target data on a generated TD-TSP instance: how many decoder
//! calls the ensemble needs to reach the optimum, and to get within 5%.

use rko::experiments::{run_ttt, target_from_percent, write_ttt_csv};
use rko::search::{build_searchers, RunBudget, RunMode, SearcherConfig};
use rko::tdtsp::{brute_force_tdtsp, TdTspDecoder, TdTspInstance};

fn main() -> rko::Result<()> {
    let inst = TdTspInstance::generate(8, 3, 11)?;
    let optimum = brute_force_tdtsp(&inst)?.cost;
    let decoder = TdTspDecoder::new(inst);
    let searchers = build_searchers(&SearcherConfig::default_set())?;

    for pct in [5.0, 0.0] {
        let target = target_from_percent(optimum, pct);
        let rec = run_ttt(
            &decoder,
            &searchers,
            target,
            &RunBudget::calls(20_000, 0),
            10,
            RunMode::sequential(),
            20,
        )?;
        eprintln!(
            "target {target} ({pct}% above optimum): {}/{} reached",
            rec.uncensored(),
            rec.points.len()
        );
        write_ttt_csv(&rec, std::io::stdout())?;
    }
    Ok(())
}
