//! Command-line entry point.
//!
//! Exit codes: 0 on success, 1 when the problem is infeasible or
//! unsatisfiable, 2 on input errors. Successful runs print a JSON run
//! report on standard error.

mod output;
mod svg;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::catalog::Catalog;
use crate::constraint::{bind_constraints, parse_constraint_file, ConstraintSet};
use crate::engine::{
    self, check_satisfiable, enumerate_valid, generate_front, EngineError, EngineMode,
    GenerationConfig, TiePolicy,
};

pub use output::{write_front_csv, write_front_jsonl, Counts, RunReport, ScenarioRecord};
pub use svg::render_scatter;

#[derive(Parser, Debug)]
#[command(name = "scenforge", version, about = "Generate and prioritize consistent operational scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Inputs {
    /// Catalog JSON file
    catalog: PathBuf,
    /// Constraint file (one formula per line)
    #[arg(short = 'c', long = "constraints")]
    constraints: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct Bounds {
    /// Minimum number of features per scenario
    #[arg(long = "min", default_value_t = 1)]
    min: usize,
    /// Maximum number of features per scenario (default: catalog size)
    #[arg(long = "max")]
    max: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and bind the catalog and constraints
    Validate {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Print one valid scenario, or UNSAT
    Satcheck {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Write every valid scenario (exhaustive; small catalogs only)
    Generate {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        bounds: Bounds,
        /// Output JSONL file
        #[arg(long)]
        out: PathBuf,
        /// Largest catalog accepted for exhaustive enumeration
        #[arg(long, default_value_t = 25)]
        limit: usize,
    },
    /// Compute the Pareto front of valid scenarios
    Front {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        bounds: Bounds,
        /// Keep all tied scenarios per point, or one representative
        #[arg(long, value_enum, default_value_t = Ties::All)]
        ties: Ties,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        /// Search threads
        #[arg(long, env = "SCENFORGE_WORKERS", default_value_t = 1)]
        workers: usize,
        /// Cap on retained tied scenarios per front point
        #[arg(long, default_value_t = 100_000)]
        max_ties: usize,
        /// Output JSONL file
        #[arg(long)]
        out: PathBuf,
        /// Optional per-point CSV summary
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Optional SVG scatter plot
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Ties {
    All,
    Rep,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Auto,
    Brute,
    Bnb,
}

#[derive(Debug)]
enum Failure {
    /// Exit 2.
    Input(String),
    /// Exit 1.
    Infeasible(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Infeasible(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Infeasible(m) => m,
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_err(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

struct Loaded {
    catalog: Catalog,
    constraints: ConstraintSet,
}

fn load(inputs: &Inputs) -> Result<Loaded, Failure> {
    let catalog = Catalog::load(&read(&inputs.catalog)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", inputs.catalog.display())))?;
    let constraints = match &inputs.constraints {
        None => ConstraintSet::empty(&catalog),
        Some(path) => {
            let bytes = read(path)?;
            let text = std::str::from_utf8(&bytes)
                .map_err(|e| Failure::Input(format!("{}: not UTF-8: {e}", path.display())))?;
            let sources = parse_constraint_file(text)
                .map_err(|e| Failure::Input(format!("{}:{}: {}", path.display(), e.line, e.error)))?;
            bind_constraints(&sources, &catalog)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
        }
    };
    Ok(Loaded {
        catalog,
        constraints,
    })
}

fn config(bounds: &Bounds) -> GenerationConfig {
    GenerationConfig {
        min_features: bounds.min,
        max_features: bounds.max,
        ..Default::default()
    }
}

fn base_counts(loaded: &Loaded) -> Counts {
    Counts {
        features: loaded.catalog.len(),
        constraints: loaded.constraints.len(),
        ..Default::default()
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(write_err(path))
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(&'static str, Counts), Failure> {
    match command {
        Command::Validate { inputs } => {
            let loaded = load(&inputs)?;
            let _ = writeln!(
                stdout,
                "ok: {} features, {} constraints",
                loaded.catalog.len(),
                loaded.constraints.len()
            );
            Ok(("validate", base_counts(&loaded)))
        }
        Command::Satcheck { inputs, bounds } => {
            let loaded = load(&inputs)?;
            let cfg = config(&bounds);
            cfg.size_bounds(loaded.catalog.len())?;
            match check_satisfiable(&loaded.catalog, &loaded.constraints, &cfg) {
                Some(witness) => {
                    let score = engine::score(&witness, &loaded.catalog)?;
                    let _ = output::write_record(stdout, &witness, &score);
                    let mut counts = base_counts(&loaded);
                    counts.valid_examined = 1;
                    Ok(("satcheck", counts))
                }
                None => {
                    let _ = writeln!(stdout, "UNSAT");
                    Err(Failure::Infeasible(
                        "no scenario satisfies every constraint within the size bounds".into(),
                    ))
                }
            }
        }
        Command::Generate {
            inputs,
            bounds,
            out,
            limit,
        } => {
            let loaded = load(&inputs)?;
            let cfg = GenerationConfig {
                brute_force_limit: limit,
                ..config(&bounds)
            };
            let scenarios = enumerate_valid(&loaded.catalog, &loaded.constraints, &cfg)?;
            let mut w = create(&out)?;
            let mut n = 0u64;
            for scenario in scenarios {
                let score = engine::score(&scenario, &loaded.catalog)?;
                output::write_record(&mut w, &scenario, &score).map_err(write_err(&out))?;
                n += 1;
            }
            w.flush().map_err(write_err(&out))?;
            let mut counts = base_counts(&loaded);
            counts.valid_examined = n;
            Ok(("generate", counts))
        }
        Command::Front {
            inputs,
            bounds,
            ties,
            mode,
            workers,
            max_ties,
            out,
            csv,
            svg,
        } => {
            let loaded = load(&inputs)?;
            let cfg = GenerationConfig {
                tie_policy: match ties {
                    Ties::All => TiePolicy::AllTies,
                    Ties::Rep => TiePolicy::Representative,
                },
                engine_mode: match mode {
                    Mode::Auto => EngineMode::Auto,
                    Mode::Brute => EngineMode::BruteForce,
                    Mode::Bnb => EngineMode::BranchAndBound,
                },
                worker_count: workers,
                max_ties_per_point: max_ties,
                ..config(&bounds)
            };
            let front = generate_front(&loaded.catalog, &loaded.constraints, &cfg)?;
            if front.points.is_empty() {
                return Err(Failure::Infeasible(
                    "no valid scenario: the front is empty".into(),
                ));
            }
            let mut w = create(&out)?;
            write_front_jsonl(&mut w, &front).map_err(write_err(&out))?;
            w.flush().map_err(write_err(&out))?;
            if let Some(path) = &csv {
                write_front_csv(create(path)?, &front).map_err(write_err(path))?;
            }
            if let Some(path) = &svg {
                fs::write(path, render_scatter(&front)).map_err(write_err(path))?;
            }
            let mut counts = base_counts(&loaded);
            counts.valid_examined = front.total_valid_examined;
            counts.front_points = front.points.len();
            counts.front_scenarios = front.scenario_count();
            counts.truncated = front.truncated;
            Ok(("front", counts))
        }
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let start = Instant::now();
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    match execute(cli.command, &mut stdout) {
        Ok((command, counts)) => {
            let report = RunReport {
                command: command.to_string(),
                elapsed_ms: start.elapsed().as_millis() as u64,
                counts,
            };
            eprintln!(
                "{}",
                serde_json::to_string(&report).expect("report serialization cannot fail")
            );
            0
        }
        Err(failure) => {
            let _ = stdout.flush();
            eprintln!("error: {}", failure.message());
            failure.code()
        }
    }
}
