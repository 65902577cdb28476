use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rko::experiments::{
    default_lambdas, generate_tdtsp, quality_profile, read_references_csv, read_results_csv,
    rpd_record, run_frontier, run_ttt, solve_problem, solve_summary, target_from_percent,
    write_frontier_csv, write_profile_csv, write_rpd_csv, write_runs_csv, write_ttt_csv,
    PortfolioOptions, Problem, SolveConfig, DEFAULT_GRID_STEP,
};
use rko::io::{read_to_string, ProblemKind};
use rko::search::{build_searchers, RunMode, SearcherConfig};
use rko::{Result, RkoError};

#[derive(Parser)]
#[command(name = "rko", version, about = "Random-key optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the ensemble once per seed and report the best solution.
    Solve(SolveArgs),
    /// Relative percentage deviation of a runs CSV against a reference value.
    Rpd(RpdArgs),
    /// Time-to-target repetitions.
    Ttt(TttArgs),
    /// Efficient frontier over a risk-aversion sweep.
    Frontier(FrontierArgs),
    /// Quality performance profiles.
    Profile(ProfileArgs),
    /// Exhaustive optimum of a small instance.
    Oracle(OracleArgs),
    /// Synthetic TD-TSP instance.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    kind: ProblemKind,
    /// Portfolio cardinality.
    #[arg(long)]
    k: Option<usize>,
    /// Portfolio risk aversion.
    #[arg(long)]
    lambda: Option<f64>,
    /// Portfolio lower holding bound for every asset.
    #[arg(long)]
    lower: Option<f64>,
    /// Portfolio upper holding bound for every asset.
    #[arg(long)]
    upper: Option<f64>,
}

impl InstanceArgs {
    fn load(&self) -> Result<Problem> {
        let text = read_to_string(&self.instance)?;
        Problem::load(self.kind, &text, &self.portfolio_options())
    }

    fn portfolio_options(&self) -> PortfolioOptions {
        PortfolioOptions {
            k: self.k,
            lambda: self.lambda,
            lower: self.lower,
            upper: self.upper,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated searchers (brkga, sa, ils, vns) or a JSON file of
    /// searcher configurations.
    #[arg(long, default_value = "brkga,sa,ils,vns")]
    searchers: String,
    /// Number of runs; seeds are 1..=N.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    /// Seconds per run; defaults to the instance-size schedule.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    decoder_calls: Option<u64>,
    /// Single-threaded, seed-reproducible mode (needs --decoder-calls).
    #[arg(long)]
    deterministic: bool,
    #[arg(long, default_value_t = rko::pool::DEFAULT_POOL_CAPACITY)]
    pool: usize,
}

impl RunArgs {
    fn config(&self) -> Result<SolveConfig> {
        let searchers = if Path::new(&self.searchers).is_file() {
            serde_json::from_str(&read_to_string(&self.searchers)?)?
        } else {
            SearcherConfig::parse_list(&self.searchers)?
        };
        if self.seeds == 0 {
            return Err(RkoError::config("--seeds must be at least 1"));
        }
        Ok(SolveConfig {
            searchers,
            seeds: (1..=self.seeds).collect(),
            time_limit: self.time_limit,
            decoder_calls: self.decoder_calls,
            deterministic: self.deterministic,
            pool_capacity: self.pool,
            target_cost: None,
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Directory for result.json and runs.csv; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RpdArgs {
    /// Runs CSV written by `solve`.
    #[arg(long)]
    results: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    reference_ub: f64,
    #[arg(long, default_value = "instance")]
    instance_id: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TttArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Reference value the target is measured from.
    #[arg(long, allow_hyphen_values = true)]
    reference: f64,
    /// Target as percent above the reference.
    #[arg(long, default_value_t = 0.0)]
    percent: f64,
    #[arg(long, default_value_t = 20)]
    repetitions: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FrontierArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated risk-aversion values; defaults to 0.02..0.98.
    #[arg(long, value_delimiter = ',')]
    lambdas: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// CSV with columns instance,method,value.
    #[arg(long)]
    results: PathBuf,
    /// CSV with columns instance,best,lb.
    #[arg(long)]
    references: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.01, 1.05, 1.1, 1.5, 2.0])]
    taus: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    grid_step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    /// Number of time intervals.
    #[arg(long, default_value_t = 3)]
    intervals: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> std::result::Result<ProblemKind, String> {
    s.parse().map_err(|e: RkoError| e.to_string())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_runs_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rd = csv::Reader::from_path(path)?;
    let headers = rd.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| RkoError::config(format!("runs CSV lacks a `{name}` column")))
    };
    let (ci, ti) = (col("best_cost")?, col("time_to_best")?);
    let (mut ofvs, mut times) = (Vec::new(), Vec::new());
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let num = |j: usize| {
            row.get(j)
                .unwrap_or("")
                .parse::<f64>()
                .map_err(|e| RkoError::Parse {
                    line: i + 2,
                    message: e.to_string(),
                })
        };
        ofvs.push(num(ci)?);
        times.push(num(ti)?);
    }
    Ok((ofvs, times))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(a) => {
            let problem = a.instance.load()?;
            let outcome = solve_problem(&problem, &a.run.config()?)?;
            let summary = serde_json::to_string_pretty(&solve_summary(&problem, &outcome))?;
            match &a.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join("result.json"), summary + "\n")?;
                    write_runs_csv(&outcome.runs, File::create(dir.join("runs.csv"))?)?;
                }
                None => {
                    println!("{summary}");
                    write_runs_csv(&outcome.runs, io::stdout().lock())?;
                }
            }
        }
        Command::Rpd(a) => {
            let (ofvs, times) = read_runs_csv(&a.results)?;
            let rec = rpd_record(&a.instance_id, a.reference_ub, &ofvs, &times)?;
            write_rpd_csv(&[rec], output(a.out.as_deref())?)?;
        }
        Command::Ttt(a) => {
            let problem = a.instance.load()?;
            let cfg = a.run.config()?;
            let searchers = build_searchers(&cfg.searchers)?;
            let budget = cfg.budget(1, problem.default_time_limit())?;
            let mode = if cfg.deterministic {
                if cfg.decoder_calls.is_none() {
                    return Err(RkoError::config(
                        "deterministic mode requires a decoder-call limit",
                    ));
                }
                RunMode::sequential()
            } else {
                RunMode::Parallel
            };
            let target = target_from_percent(a.reference, a.percent);
            let rec = run_ttt(
                problem.decoder(),
                &searchers,
                target,
                &budget,
                a.repetitions,
                mode,
                cfg.pool_capacity,
            )?;
            write_ttt_csv(&rec, output(a.out.as_deref())?)?;
        }
        Command::Frontier(a) => {
            let problem = a.instance.load()?;
            let Problem::Portfolio(decoder) = &problem else {
                return Err(RkoError::config("frontier needs --kind portfolio"));
            };
            let lambdas = if a.lambdas.is_empty() {
                default_lambdas()
            } else {
                a.lambdas.clone()
            };
            let points = run_frontier(
                decoder.instance(),
                &lambdas,
                &a.run.config()?,
                problem.default_time_limit(),
            )?;
            write_frontier_csv(&points, output(a.out.as_deref())?)?;
        }
        Command::Profile(a) => {
            let results = read_results_csv(File::open(&a.results)?)?;
            let refs = read_references_csv(File::open(&a.references)?)?;
            let rec = quality_profile(&results, &refs, &a.taus)?;
            write_profile_csv(&rec, output(a.out.as_deref())?)?;
        }
        Command::Oracle(a) => {
            let problem = a.instance.load()?;
            let value = problem.oracle(a.grid_step)?;
            let mut out = output(a.out.as_deref())?;
            writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        }
        Command::Generate(a) => {
            let text = generate_tdtsp(a.n, a.intervals, a.seed)?;
            let mut out = output(a.out.as_deref())?;
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
