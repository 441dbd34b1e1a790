use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kelleyscope::commands::{self, exit_code, CoverArgs, InumArgs, MnArgs, Outcome, Settings};
use kelleyscope::kelley::MnMode;
use kelleyscope::{Error, Rational, Result};

#[derive(Parser)]
#[command(
    name = "kelleyscope",
    version,
    about = "Exact intersection numbers, Kelley measures and epsilon-covers of finite families"
)]
struct Cli {
    /// Seed for generated instances; overrides the seed in a spec.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Work budget: multisets for brute force, nodes for exact cover search.
    #[arg(long, global = true, env = "KELLEYSCOPE_BUDGET")]
    budget: Option<u64>,

    /// Report path for inum, mn, cover and kelley-verify; family file for
    /// gen; CSV for sweep.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Record per-phase wall-clock times in the report.
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Greedy,
}

#[derive(Subcommand)]
enum Command {
    /// Exact intersection number with measure and sequence witnesses.
    Inum {
        instance: PathBuf,
        /// Also enumerate every sequence up to this length.
        #[arg(long, value_name = "L")]
        brute: Option<u64>,
        /// Compare against brute force (at the witness length unless --brute
        /// is given).
        #[arg(long)]
        oracle_check: bool,
    },
    /// Fewest classes with intersection number above 1 - epsilon covering
    /// the family.
    Mn {
        instance: PathBuf,
        #[arg(long, value_name = "P/Q")]
        epsilon: Rational,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// Accept classes whose intersection number equals 1 - epsilon.
        #[arg(long)]
        non_strict: bool,
    },
    /// Threshold bands of a measure, each verified by exact LP.
    Cover {
        instance: PathBuf,
        /// Comma-separated weights or a JSON file; defaults to the optimal
        /// measure of the family.
        #[arg(long)]
        measure: Option<String>,
        /// Comma-separated descending thresholds in (0, 1].
        #[arg(long)]
        grid: Option<String>,
    },
    /// Synthesize a measure from a cover file and check strict positivity.
    KelleyVerify { instance: PathBuf, cover: PathBuf },
    /// Materialize an instance spec (file or inline JSON) as a family file.
    Gen { spec: String },
    /// Analyse a spec across a range of sizes.
    Sweep { spec: String },
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run(cli: &Cli) -> Result<i32> {
    let settings = Settings {
        jobs: cli
            .jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1),
        budget: cli.budget,
        timings: cli.timings,
        seed: cli.seed,
    };
    let is_sweep = matches!(cli.command, Command::Sweep { .. });
    if cli.format == Format::Csv && !is_sweep {
        return Err(Error::Domain(
            "--format csv is only available for sweep".into(),
        ));
    }

    let outcome: Outcome = match &cli.command {
        Command::Inum {
            instance,
            brute,
            oracle_check,
        } => {
            let (file, f) = commands::load_family(instance)?;
            let args = InumArgs {
                brute: *brute,
                oracle_check: *oracle_check,
            };
            commands::cmd_inum(&file, &f, args, &settings)?
        }
        Command::Mn {
            instance,
            epsilon,
            mode,
            non_strict,
        } => {
            let (file, f) = commands::load_family(instance)?;
            let args = MnArgs {
                epsilon: epsilon.clone(),
                mode: match mode {
                    ModeArg::Exact => MnMode::Exact,
                    ModeArg::Greedy => MnMode::Greedy,
                },
                strict: !non_strict,
            };
            commands::cmd_mn(&file, &f, &args, &settings)?
        }
        Command::Cover {
            instance,
            measure,
            grid,
        } => {
            let (file, f) = commands::load_family(instance)?;
            let args = CoverArgs {
                measure: measure.as_deref().map(commands::load_measure).transpose()?,
                grid: grid
                    .as_deref()
                    .map(commands::parse_rational_list)
                    .transpose()?,
            };
            commands::cmd_cover(&file, &f, &args, &settings)?
        }
        Command::KelleyVerify { instance, cover } => {
            let (file, f) = commands::load_family(instance)?;
            let cover = commands::load_cover(cover)?;
            commands::cmd_kelley_verify(&file, &f, cover, &settings)?
        }
        Command::Gen { spec } => {
            let spec = commands::load_instance_spec(spec)?;
            commands::cmd_gen(&spec, &settings)?
        }
        Command::Sweep { spec } => {
            let spec = commands::load_sweep_spec(spec)?;
            commands::cmd_sweep(&spec, &settings)?
        }
    };

    let report = outcome.report.to_json();
    match (&cli.command, &cli.out) {
        (Command::Gen { .. }, Some(path)) => {
            write_file(path, outcome.family_file.as_deref().unwrap_or_default())?;
            print!("{report}");
        }
        (Command::Sweep { .. }, out) => {
            let csv = outcome.csv.as_deref().unwrap_or_default();
            if let Some(path) = out {
                write_file(path, csv)?;
            }
            match cli.format {
                Format::Csv => print!("{csv}"),
                Format::Json => print!("{report}"),
            }
        }
        (_, Some(path)) => write_file(path, &report)?,
        (_, None) => print!("{report}"),
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("kelleyscope: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
