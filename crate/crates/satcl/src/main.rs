//! Command-line front end: stream generation, experiment runs, cell
//! dumps, the perfect-memory checker, and the scaling run.
//!
//! Exit codes: 0 on success, 1 on invalid input (bad flags, bad files,
//! bad specs), 2 on internal errors (I/O failures). All outputs are
//! deterministic given the flags; the seed defaults to `$SATCL_SEED`
//! (then 42) unless `--seed` is given.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use satcl::algorithms::parse_algorithm;
use satcl::cl::ClAlgorithm;
use satcl::criteria::{sat_region, Criterion, CriterionKind};
use satcl::equivalence::{enumerate_cells, perfect_memory_check, Arrangement};
use satcl::error::Error;
use satcl::harness::{
    cells_csv, generate, results_csv, run_experiment_on_stream, scaling_experiment, write_text,
    StreamKind, StreamSpec, SEED_ENV,
};
use satcl::rat::parse_rat;
use satcl::taskfile;

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "satcl",
    version,
    about = "Exact-geometry continual-learning testbed"
)]
struct Cli {
    /// RNG seed (default: $SATCL_SEED, then 42)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Hypothesis dimension for generated streams
    #[arg(long, global = true, default_value_t = 2)]
    dim: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a task stream and write it as a JSON task file
    Gen {
        /// Stream kind: planted, adversarial, singleton, or ball-means
        #[arg(long)]
        spec: String,
        /// Number of tasks
        #[arg(long, default_value = "5")]
        tasks: String,
        /// Atoms per task
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Criterion threshold, a rational like 1/2
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        /// Planted feasibility margin, a rational below epsilon
        #[arg(long, default_value = "1/4")]
        margin: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run algorithms over a stream and write the results CSV
    Run {
        /// Task count (with --spec) or a task-file path (without)
        #[arg(long)]
        tasks: Option<String>,
        /// Generate the stream instead of reading a file
        #[arg(long)]
        spec: Option<String>,
        /// per-sample-abs, mean-abs, or mean-sq-euclid
        #[arg(long, default_value = "per-sample-abs")]
        criterion: String,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long, default_value = "1/4")]
        margin: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Algorithm selector; repeatable (exact, replay, replay:k=<int>,
        /// reg:lambda=<rat>)
        #[arg(long = "alg", required = true)]
        algs: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Write measured step times instead of zeros (non-deterministic)
        #[arg(long)]
        times: bool,
    },
    /// Enumerate the cells of a task file's satisfaction regions
    Cells {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long, default_value = "per-sample-abs")]
        criterion: String,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the perfect-memory checker for one algorithm
    CheckMemory {
        /// Task-file path (alternative to --spec)
        #[arg(long)]
        tasks: Option<PathBuf>,
        #[arg(long)]
        spec: Option<String>,
        #[arg(long)]
        alg: String,
        #[arg(long, default_value_t = 100)]
        probes: usize,
        #[arg(long, default_value = "per-sample-abs")]
        criterion: String,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long, default_value = "1/4")]
        margin: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Task count for generated streams
        #[arg(long, default_value_t = 3)]
        gen_tasks: usize,
    },
    /// Time cell enumeration on growing slab arrangements
    Scaling {
        #[arg(long, default_value_t = 10)]
        qmax: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| Error::InvalidInput(format!("bad {SEED_ENV} value {v:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn parse_criterion(kind: &str, epsilon: &str) -> Result<Criterion, Error> {
    let kind = match kind {
        "per-sample-abs" => CriterionKind::PerSampleAbs,
        "mean-abs" => CriterionKind::MeanAbs,
        "mean-sq-euclid" => CriterionKind::MeanSqEuclid,
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown criterion {other:?}; expected per-sample-abs, mean-abs, or mean-sq-euclid"
            )))
        }
    };
    Criterion::new(kind, parse_rat(epsilon)?)
}

/// Builds the stream spec for a kind, fixing the dimensions the fixed
/// instances require.
fn build_spec(
    kind_name: &str,
    seed: u64,
    dim: usize,
    tasks: usize,
    n: usize,
    epsilon: &str,
    margin: &str,
) -> Result<StreamSpec, Error> {
    let kind = StreamKind::parse(kind_name)?;
    let (dim, tasks) = match kind {
        StreamKind::AdversarialShift => (2, 2),
        StreamKind::SingletonSat => (1, 2),
        _ => (dim, tasks),
    };
    Ok(StreamSpec {
        kind,
        seed,
        dim,
        tasks,
        n_per_task: n,
        epsilon: parse_rat(epsilon)?,
        margin: parse_rat(margin)?,
    })
}

fn parse_task_count(raw: &str) -> Result<usize, Error> {
    raw.parse::<usize>().map_err(|_| {
        Error::InvalidInput(format!("with --spec, --tasks is a task count; got {raw:?}"))
    })
}

fn run_cli(cli: Cli) -> Result<(), Error> {
    let seed = resolve_seed(cli.seed)?;
    match cli.command {
        Command::Gen {
            spec,
            tasks,
            n,
            epsilon,
            margin,
            out,
        } => {
            let count = parse_task_count(&tasks)?;
            let spec = build_spec(&spec, seed, cli.dim, count, n, &epsilon, &margin)?;
            let stream = generate(&spec)?;
            taskfile::save(&out, &stream)?;
            println!("wrote {} tasks to {}", stream.len(), out.display());
        }
        Command::Run {
            tasks,
            spec,
            criterion,
            epsilon,
            margin,
            n,
            algs,
            out,
            times,
        } => {
            let c = parse_criterion(&criterion, &epsilon)?;
            let stream = match (&spec, &tasks) {
                (Some(kind), count) => {
                    let count = match count {
                        Some(raw) => parse_task_count(raw)?,
                        None => 5,
                    };
                    let spec = build_spec(kind, seed, cli.dim, count, n, &epsilon, &margin)?;
                    generate(&spec)?
                }
                (None, Some(path)) => taskfile::load(PathBuf::from(path).as_path())?,
                (None, None) => {
                    return Err(Error::InvalidInput(
                        "run needs --spec <kind> or --tasks <file>".into(),
                    ))
                }
            };
            let algorithms: Result<Vec<Box<dyn ClAlgorithm>>, Error> =
                algs.iter().map(|a| parse_algorithm(a)).collect();
            let result = run_experiment_on_stream(&stream, &algorithms?, &c)?;
            write_text(&out, &results_csv(&result, times))?;
            println!("wrote {} rows to {}", result.rows.len(), out.display());
        }
        Command::Cells {
            tasks,
            criterion,
            epsilon,
            out,
        } => {
            let c = parse_criterion(&criterion, &epsilon)?;
            let stream = taskfile::load(&tasks)?;
            let regions: Result<Vec<_>, Error> = stream.iter().map(|t| sat_region(&c, t)).collect();
            let arr = Arrangement::new(regions?)?;
            let cells = enumerate_cells(&arr)?;
            write_text(&out, &cells_csv(&cells))?;
            println!("wrote {} cells to {}", cells.len(), out.display());
        }
        Command::CheckMemory {
            tasks,
            spec,
            alg,
            probes,
            criterion,
            epsilon,
            margin,
            n,
            gen_tasks,
        } => {
            let c = parse_criterion(&criterion, &epsilon)?;
            let stream = match (&spec, &tasks) {
                (Some(kind), _) => {
                    let spec = build_spec(kind, seed, cli.dim, gen_tasks, n, &epsilon, &margin)?;
                    generate(&spec)?
                }
                (None, Some(path)) => taskfile::load(path)?,
                (None, None) => {
                    return Err(Error::InvalidInput(
                        "check-memory needs --spec <kind> or --tasks <file>".into(),
                    ))
                }
            };
            let algorithm = parse_algorithm(&alg)?;
            let verdict = perfect_memory_check(algorithm.as_ref(), &stream, &c, probes)?;
            println!("{verdict}");
        }
        Command::Scaling { qmax, out } => {
            if qmax == 0 {
                return Err(Error::InvalidInput("qmax must be at least 1".into()));
            }
            let q_range: Vec<usize> = (1..=qmax).collect();
            let rows = scaling_experiment(&q_range, cli.dim, seed, Some(&out))?;
            println!("wrote {} rows to {}", rows.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run_cli(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Io { .. } => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
