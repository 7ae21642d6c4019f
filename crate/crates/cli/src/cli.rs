//! Argument parsing and the subcommands of the `edgematch` binary.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use edgematch::clique::{export_dimacs_streamed, Scope};
use edgematch::io::{generate, read_instance, read_solution, write_instance, write_solution, GeneratorParams};
use edgematch::pipeline::{run_pipeline, Pipeline};
use edgematch::puzzle::score_board;
use edgematch::region::lp::export_lp;
use edgematch::region::{Region, RegionProblem, SolveMode};
use edgematch::{Board, Instance};

use crate::harness::{self, InstanceSource, Overrides, RunConfig, TABLE_HEADER};

/// Exit status for success, usage errors and file or parse errors.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FILE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "edgematch", version, about = "Edge-matching puzzle solvers and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance with a planted solution.
    Generate(GenerateArgs),
    /// Solve an instance with one pipeline.
    Solve(SolveArgs),
    /// Score a solution file against an instance.
    Score { instance: PathBuf, solution: PathBuf },
    /// Write the conflict graph in DIMACS format.
    ExportClique(ExportArgs),
    /// Write the region model in LP format.
    ExportLp(ExportArgs),
    /// Run pipelines over several seeds and aggregate the scores.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(short = 'n', long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Inner palette size (default scales with n).
    #[arg(long)]
    inner: Option<u32>,
    /// Border palette size (default scales with n).
    #[arg(long)]
    border: Option<u32>,
    #[arg(short = 'o', long)]
    output: PathBuf,
    /// Also write the planted solution to this file.
    #[arg(long)]
    write_planted: Option<PathBuf>,
    /// Append the planted solution to the instance file.
    #[arg(long)]
    embed_planted: bool,
}

#[derive(Debug, Args, Clone)]
struct Budgets {
    /// Local search time limit, seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Time per region solve, seconds.
    #[arg(long)]
    region_budget: Option<f64>,
    /// Backtracking timeout, seconds.
    #[arg(long)]
    backtrack_timeout: Option<f64>,
    /// Clique heuristic selections for clique-full.
    #[arg(long)]
    q: Option<u64>,
    /// Clique heuristic time limit for clique-full, seconds.
    #[arg(long)]
    clique_time: Option<f64>,
    /// Count budgets in solver steps so runs repeat exactly.
    #[arg(long)]
    deterministic: bool,
}

impl Budgets {
    fn overrides(&self) -> Result<Overrides, CliError> {
        Ok(Overrides {
            time_limit: secs(self.time_limit)?,
            region_budget: secs(self.region_budget)?,
            backtrack_timeout: secs(self.backtrack_timeout)?,
            clique_q: self.q,
            clique_time: secs(self.clique_time)?,
        })
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "greedy+ls")]
    pipeline: String,
    #[arg(long, default_value_t = 1)]
    strip_height: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    budgets: Budgets,
    /// Solution output file.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Local search trace output (CSV).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    instance: PathBuf,
    #[arg(short = 'o', long)]
    output: PathBuf,
    /// Restrict to a region, as `r1,c1,r2,c2` (1-based, inclusive).
    #[arg(long)]
    region: Option<String>,
    /// Solution file whose placements outside the region are held fixed.
    #[arg(long)]
    context: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Instance file; omit to generate one instance per seed.
    #[arg(long, conflicts_with = "n")]
    instance: Option<PathBuf>,
    /// Board size of generated instances.
    #[arg(short = 'n', long)]
    n: Option<usize>,
    #[arg(long)]
    inner: Option<u32>,
    #[arg(long)]
    border: Option<u32>,
    /// Pipelines, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "greedy")]
    pipeline: Vec<String>,
    /// Strip heights, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    strip_height: Vec<usize>,
    /// Seeds, as a list `0,3,7` or a range `0..10`.
    #[arg(long, default_value = "0..10")]
    seeds: String,
    #[command(flatten)]
    budgets: Budgets,
    /// Per-run CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Directory for per-run solution and trace files.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Aggregate an existing per-run CSV instead of running.
    #[arg(long, conflicts_with_all = ["instance", "n"])]
    from_csv: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    File(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::File(_) => EXIT_FILE,
        }
    }
}

fn usage(msg: impl ToString) -> CliError {
    CliError::Usage(msg.to_string())
}

fn file_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::File(format!("{}: {e}", path.display()))
}

fn secs(v: Option<f64>) -> Result<Option<Duration>, CliError> {
    v.map(|s| Duration::try_from_secs_f64(s).map_err(|_| usage(format!("invalid duration {s}")))).transpose()
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let f = File::open(path).map_err(|e| file_err(path, e))?;
    read_instance(BufReader::new(f)).map_err(|e| file_err(path, e))
}

fn load_solution(path: &Path, inst: &Instance) -> Result<Board, CliError> {
    let f = File::open(path).map_err(|e| file_err(path, e))?;
    read_solution(BufReader::new(f), inst).map_err(|e| file_err(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| file_err(path, e))
}

/// Parses `a..b` (exclusive) or a comma-separated list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("invalid seed list `{s}`");
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        return Ok((a..b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn parse_region(s: &str, n: usize) -> Result<Region, CliError> {
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("invalid region `{s}`, expected r1,c1,r2,c2")))?;
    let [r1, c1, r2, c2] = v[..] else { return Err(usage(format!("invalid region `{s}`, expected r1,c1,r2,c2"))) };
    Region::new(r1, c1, r2, c2, n).map_err(usage)
}

/// Runs the command line `args` (program name first), writing normal
/// output to `out`, and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::File(e.to_string());
    match command {
        Command::Generate(a) => {
            let mut params = GeneratorParams::scaled(a.n, a.seed);
            params.inner_colors = a.inner.unwrap_or(params.inner_colors);
            params.border_colors = a.border.unwrap_or(params.border_colors);
            let mut inst = generate(&params).map_err(usage)?;
            let planted = inst.planted.clone().expect("generated instances are planted");
            if !a.embed_planted {
                inst.planted = None;
            }
            let mut w = create(&a.output)?;
            write_instance(&inst, &mut w).and_then(|_| w.flush()).map_err(|e| file_err(&a.output, e))?;
            if let Some(path) = &a.write_planted {
                let mut w = create(path)?;
                write_solution(&planted, &mut w).and_then(|_| w.flush()).map_err(|e| file_err(path, e))?;
            }
            writeln!(out, "wrote {} ({}x{}, {} tiles)", a.output.display(), a.n, a.n, a.n * a.n).map_err(io_err)?;
        }
        Command::Solve(a) => {
            let pipeline: Pipeline = a.pipeline.parse().map_err(usage)?;
            let inst = load_instance(&a.instance)?;
            let cfg = a.budgets.overrides()?.config(inst.n, a.strip_height, a.seed);
            let clock = harness::make_clock(a.budgets.deterministic);
            let run = run_pipeline(&inst, pipeline, &cfg, &clock).map_err(usage)?;
            if let Some(path) = &a.output {
                let mut w = create(path)?;
                write_solution(&run.board, &mut w).and_then(|_| w.flush()).map_err(|e| file_err(path, e))?;
            }
            if let (Some(path), Some(trace)) = (&a.trace, &run.trace) {
                trace.write_csv(create(path)?).map_err(|e| file_err(path, e))?;
            }
            writeln!(out, "{}", run.score).map_err(io_err)?;
            writeln!(
                out,
                "construction {:.3} s, local search {:.3} s",
                run.construct_time.as_secs_f64(),
                run.ls_time.as_secs_f64()
            )
            .map_err(io_err)?;
        }
        Command::Score { instance, solution } => {
            let inst = load_instance(&instance)?;
            let board = load_solution(&solution, &inst)?;
            let score = score_board(&inst, &board).map_err(|e| file_err(&solution, e))?;
            writeln!(out, "{score}").map_err(io_err)?;
        }
        Command::ExportClique(a) => {
            let inst = load_instance(&a.instance)?;
            let mut w = create(&a.output)?;
            let edges = match scope_parts(&inst, &a)? {
                Some((region, context)) => {
                    export_dimacs_streamed(&inst, Some(&Scope { region, context: &context }), &mut w)
                }
                None => export_dimacs_streamed(&inst, None, &mut w),
            }
            .map_err(|e| file_err(&a.output, e))?;
            writeln!(out, "wrote {} ({edges} edges)", a.output.display()).map_err(io_err)?;
        }
        Command::ExportLp(a) => {
            let inst = load_instance(&a.instance)?;
            let (region, context) = scope_parts(&inst, &a)?.unwrap_or((Region::full(inst.n), Board::empty(inst.n)));
            let problem = RegionProblem::new(&inst, region, &context, SolveMode::MinimizeDefects);
            problem.validate().map_err(usage)?;
            let mut w = create(&a.output)?;
            export_lp(&problem, &mut w).and_then(|_| w.flush()).map_err(|e| file_err(&a.output, e))?;
            writeln!(out, "wrote {}", a.output.display()).map_err(io_err)?;
        }
        Command::Bench(a) => bench(a, out)?,
    }
    Ok(())
}

/// Region and fixed context of an export: the context solution with the
/// region cleared.
fn scope_parts(inst: &Instance, a: &ExportArgs) -> Result<Option<(Region, Board)>, CliError> {
    let region = a.region.as_deref().map(|s| parse_region(s, inst.n)).transpose()?;
    let mut context = match &a.context {
        Some(path) => load_solution(path, inst)?,
        None => Board::empty(inst.n),
    };
    match region {
        Some(region) => {
            for pos in region.positions() {
                context.clear(pos);
            }
            Ok(Some((region, context)))
        }
        None if a.context.is_some() => Err(usage("--context needs --region")),
        None => Ok(None),
    }
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::File(e.to_string());
    let records = match &a.from_csv {
        Some(path) => {
            let f = File::open(path).map_err(|e| file_err(path, e))?;
            harness::read_csv(BufReader::new(f)).map_err(|e| file_err(path, e))?
        }
        None => {
            let instance = match (&a.instance, a.n) {
                (Some(p), _) => InstanceSource::File(p.clone()),
                (None, Some(n)) => InstanceSource::Generated { n, inner: a.inner, border: a.border },
                (None, None) => return Err(usage("bench needs --instance or -n")),
            };
            let pipelines =
                a.pipeline.iter().map(|p| p.parse::<Pipeline>()).collect::<Result<Vec<_>, _>>().map_err(usage)?;
            let config = RunConfig {
                instance,
                pipelines,
                strip_heights: a.strip_height.clone(),
                seeds: parse_seeds(&a.seeds).map_err(usage)?,
                overrides: a.budgets.overrides()?,
                deterministic: a.budgets.deterministic,
                output_dir: a.output_dir.clone(),
            };
            harness::run_bench(&config).map_err(usage)?.records
        }
    };
    if let Some(path) = &a.csv {
        harness::write_csv(&records, create(path)?).map_err(|e| file_err(path, e))?;
    }
    writeln!(out, "{TABLE_HEADER}").map_err(io_err)?;
    for row in harness::aggregate(&records) {
        writeln!(out, "{row}").map_err(io_err)?;
    }
    Ok(())
}
