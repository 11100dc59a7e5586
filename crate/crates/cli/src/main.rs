//! `fairmdp`: generate instances, compute and check ε-covers, inspect grid sizes.

mod output;
mod source;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairmdp_core::backend::FeasibilityBackend;
use fairmdp_core::grid::{
    lorenz_cell_bounds, lorenz_cell_count, pareto_cell_count, pareto_cover_bound,
};
use fairmdp_core::instance::{write_instance_file, InstanceFile};
use fairmdp_core::lp::{solve_lp, solve_mip, text};
use fairmdp_core::oracle::DEFAULT_ENUMERATION_LIMIT;
use fairmdp_core::{
    greedy_min_cover, lnd_filter, lorenz_grid_cover_with, pareto_grid_cover_with, pnd_filter,
    random_instance, two_phase_lorenz_cover_with, verify_cover, CoverSet, GridConfig, ScanOptions,
    Space,
};

use source::{ModelOptions, Source};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(fairmdp_core::Error),
    Verification(String),
}

impl From<fairmdp_core::Error> for CliError {
    fn from(e: fairmdp_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_resource() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Verification(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fairmdp",
    version,
    about = "ε-covers of Pareto and Lorenz tradeoffs in multiobjective MDPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Compute an ε-cover and print it as a table.
    Cover(CoverArgs),
    /// Verify an ε-cover against exact ground truth.
    Check(CheckArgs),
    /// Print an instance summary and grid size bounds.
    Stats(StatsArgs),
    /// Solve an LP in text form from stdin (external-solver adapter).
    SolveLp,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    states: usize,
    #[arg(long)]
    actions: usize,
    #[arg(long, default_value_t = 2)]
    objectives: usize,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// Instance file, or builtin:example1:N / builtin:example2:N.
    #[arg(long = "in", value_name = "SOURCE")]
    input: String,
    /// Restrict to deterministic policies (MIP queries).
    #[arg(long)]
    deterministic: bool,
    /// Binary-variable budget for MIP queries.
    #[arg(long)]
    max_binaries: Option<usize>,
    /// Load a builtin as a discounted chain MDP with this discount.
    #[arg(long, value_name = "GAMMA")]
    as_mdp: Option<f64>,
}

impl InputArgs {
    fn options(&self) -> ModelOptions {
        ModelOptions {
            deterministic: self.deterministic,
            max_binaries: self.max_binaries,
            as_mdp: self.as_mdp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Pareto,
    Lorenz,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::Pareto => Space::Pareto,
            SpaceArg::Lorenz => Space::Lorenz,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Grid,
    TwoPhase,
    Greedy,
}

#[derive(Args)]
struct MethodArgs {
    #[arg(long, value_enum)]
    space: SpaceArg,
    #[arg(long, value_enum, default_value = "grid")]
    method: Method,
    #[arg(long)]
    epsilon: f64,
    /// Worker threads for grid queries; more than one disables skip-ahead.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct CoverArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    method: MethodArgs,
    /// Write the cover table here instead of stdout.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Write plot data (frontier and cover points).
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Largest ground-truth set drawn as the plotted frontier.
    #[arg(long, default_value_t = 20_000)]
    frontier_limit: u64,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    method: MethodArgs,
    /// Check this table (from `cover --table`) instead of computing a cover.
    #[arg(long)]
    cover: Option<PathBuf>,
    /// Largest number of deterministic policies to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    limit: u64,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
}

fn compute_cover(backend: &FeasibilityBackend, m: &MethodArgs) -> Result<CoverSet, CliError> {
    if m.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let space = Space::from(m.space);
    let opts = ScanOptions {
        skip_ahead: m.jobs == 1,
        jobs: m.jobs,
    };
    let cover = match (m.method, space) {
        (Method::Greedy, _) => greedy_min_cover(backend, m.epsilon, space)?.0,
        (Method::TwoPhase, Space::Pareto) => {
            return Err(CliError::Usage(
                "two-phase applies to the lorenz space only".into(),
            ))
        }
        (method, space) => {
            let cfg = GridConfig::for_backend(backend, m.epsilon)?;
            match (method, space) {
                (Method::TwoPhase, _) => two_phase_lorenz_cover_with(backend, &cfg, opts)?,
                (_, Space::Lorenz) => lorenz_grid_cover_with(backend, &cfg, opts)?,
                (_, Space::Pareto) => pareto_grid_cover_with(backend, &cfg, opts)?,
            }
        }
    };
    Ok(cover)
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn summary(source: &Source, m: &MethodArgs, cover: &CoverSet) -> String {
    let method = match m.method {
        Method::Grid => "grid",
        Method::TwoPhase => "two-phase",
        Method::Greedy => "greedy",
    };
    let mut out = String::new();
    let _ = writeln!(out, "source\t{}", source.label());
    let _ = writeln!(out, "space\t{}", cover.space);
    let _ = writeln!(out, "method\t{method}");
    let _ = writeln!(out, "epsilon\t{}", m.epsilon);
    let _ = writeln!(out, "size\t{}", cover.len());
    let _ = writeln!(out, "queries\t{}", cover.stats.queries);
    let _ = writeln!(out, "skipped\t{}", cover.stats.skipped);
    let _ = writeln!(out, "pruned\t{}", cover.stats.pruned);
    out
}

fn run_gen(a: GenArgs) -> Result<String, CliError> {
    let momdp = random_instance(a.seed, a.states, a.actions, a.objectives)?;
    let text = write_instance_file(&InstanceFile {
        momdp,
        name: Some(format!(
            "random-{}x{}x{}-{}",
            a.states, a.actions, a.objectives, a.seed
        )),
        seed: Some(a.seed),
    });
    match &a.out {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn run_cover(a: CoverArgs) -> Result<String, CliError> {
    let opts = a.input.options();
    let source = source::load(&a.input.input, &opts)?;
    let backend = source.backend(&opts);
    let start = Instant::now();
    let cover = compute_cover(&backend, &a.method)?;
    eprintln!("time\t{:.3}s", start.elapsed().as_secs_f64());
    let mut out = summary(&source, &a.method, &cover);
    let table = output::cover_table(&cover);
    match &a.table {
        Some(path) => write_file(path, &table)?,
        None => {
            out.push('\n');
            out.push_str(&table);
        }
    }
    if let Some(path) = &a.plot {
        let exact = source.exact(a.frontier_limit).ok();
        let frontier = match exact.as_ref().map(|s| s.materialize(a.frontier_limit)) {
            Some(Ok(points)) => Some(match cover.space {
                Space::Pareto => pnd_filter(&points)?,
                Space::Lorenz => lnd_filter(&points)?,
            }),
            _ => {
                eprintln!("note\tground truth exceeds --frontier-limit; plotting the cover only");
                None
            }
        };
        write_file(path, &output::plot_data(frontier.as_deref(), &cover))?;
    }
    Ok(out)
}

fn run_check(a: CheckArgs) -> Result<String, CliError> {
    let opts = a.input.options();
    let source = source::load(&a.input.input, &opts)?;
    let values = match &a.cover {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            output::parse_cover_table(&text)?
        }
        None => compute_cover(&source.backend(&opts), &a.method)?.values(),
    };
    let exact = source.exact(a.limit)?;
    let space = Space::from(a.method.space);
    let verdict = verify_cover(&values, &exact, a.method.epsilon, space)?;
    match verdict.witness {
        None => Ok(format!(
            "covered\t{} points\t{space}\tepsilon {}\n",
            values.len(),
            a.method.epsilon
        )),
        Some(w) => Err(CliError::Verification(format!(
            "not covered: {:?} is not {space} ε-dominated by any of {} cover points",
            w.as_slice(),
            values.len()
        ))),
    }
}

fn run_stats(a: StatsArgs) -> Result<String, CliError> {
    let opts = a.input.options();
    let source = source::load(&a.input.input, &opts)?;
    let backend = source.backend(&opts);
    let n = backend.num_objectives();
    let mut out = String::new();
    let _ = writeln!(out, "source\t{}", source.label());
    match &source {
        Source::Explicit { set, .. } => {
            let _ = writeln!(out, "points\t{}", set.len());
        }
        Source::Model { momdp, .. } => {
            let _ = writeln!(out, "states\t{}", momdp.num_states());
            let _ = writeln!(out, "actions\t{}", momdp.num_actions());
            let _ = writeln!(out, "discount\t{}", momdp.discount());
            let _ = writeln!(
                out,
                "deterministic_policies\t{}",
                momdp.deterministic_policy_count()
            );
        }
    }
    let cfg = GridConfig::for_backend(&backend, a.epsilon)?;
    let (product, monotone) = lorenz_cell_bounds(n, &cfg);
    let _ = writeln!(out, "objectives\t{n}");
    let _ = writeln!(out, "epsilon\t{}", a.epsilon);
    let _ = writeln!(out, "bound_K\t{}", cfg.bound);
    let _ = writeln!(out, "pareto_cover_bound\t{}", pareto_cover_bound(n, &cfg));
    let _ = writeln!(out, "pareto_cells\t{}", pareto_cell_count(n, &cfg));
    let _ = writeln!(out, "lorenz_cells_product\t{product}");
    let _ = writeln!(out, "lorenz_cells_monotone\t{monotone}");
    let _ = writeln!(out, "lorenz_cells_scanned\t{}", lorenz_cell_count(n, &cfg));
    Ok(out)
}

fn run_solve_lp() -> Result<String, CliError> {
    let mut input = String::new();
    io::stdin()
        .read_to_string(&mut input)
        .map_err(|e| CliError::Usage(format!("stdin: {e}")))?;
    let model = text::parse_lp(&input)?;
    let sol = if model.binaries.is_empty() {
        solve_lp(&model.base)?
    } else {
        solve_mip(&model)?
    };
    Ok(text::write_solution(&sol))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Cover(a) => run_cover(a),
        Command::Check(a) => run_check(a),
        Command::Stats(a) => run_stats(a),
        Command::SolveLp => run_solve_lp(),
    };
    match result {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
