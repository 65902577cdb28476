//! Experimental protocol: multi-seed solves, relative deviations,
//! time-to-target data, efficient frontiers and quality profiles. Every
//! writer emits CSV with fixed headers and six-decimal numbers.

mod frontier;
mod profile;
mod rpd;
mod solve;
mod ttt;

pub use frontier::{default_lambdas, dominates, run_frontier, write_frontier_csv, FrontierPoint, FRONTIER_HEADER};
pub use profile::{
    best_known, quality_profile, read_references_csv, read_results_csv, write_profile_csv,
    ProfileMeasure, ProfilePoint, ProfileRecord, QualityFactor, Reference, ResultTable,
    PROFILE_HEADER,
};
pub use rpd::{rpd, rpd_raw, rpd_record, write_rpd_csv, RpdRecord, RPD_HEADER};
pub use solve::{
    generate_tdtsp, solve, solve_problem, solve_summary, write_runs_csv, PortfolioOptions,
    Problem, SolveConfig, SolveOutcome, DEFAULT_GRID_STEP, DEFAULT_HOLDING_BOUNDS, RUNS_HEADER,
};
pub use ttt::{run_ttt, target_from_percent, write_ttt_csv, TttPoint, TttRecord, TttRun, TTT_HEADER};

/// Fixed six-decimal rendering; negative zero prints as zero.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}
