//! `bohmian`: run, list and validate scenario files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bohmian::scenario::{self, Overrides, RunOutput, ScenarioConfig, SCENARIOS};
use bohmian::Error;
use clap::{Parser, Subcommand};

/// Overrides the output directory of every run; `--out` takes precedence.
const OUT_ENV: &str = "BOHMIAN_OUT";
const TIMING_FILE: &str = "timing.txt";

const EXIT_USAGE: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_NUMERIC: u8 = 4;
const EXIT_IO: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "bohmian", version, about = "Bohm, Moyal and Clifford pictures of 1-D quantum dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory (overrides the config and $BOHMIAN_OUT).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Ensemble seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Reduced Planck constant.
    #[arg(long, global = true)]
    hbar: Option<f64>,

    /// Worker threads for the numerical kernels.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Exit with status 4 when any residual exceeds its acceptance bound.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file (or a built-in scenario by name).
    Run { config: String },
    /// List the built-in scenarios.
    List,
    /// Check a scenario file without running it.
    Validate { config: String },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unknown { .. } | Error::Parse(_) => EXIT_USAGE,
            _ => EXIT_GUARD,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::new(EXIT_USAGE, "--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    }
    if let Some(h) = cli.hbar {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Failure::new(EXIT_USAGE, format!("--hbar must be positive and finite, got {h}")));
        }
    }
    match &cli.command {
        Command::List => {
            for name in SCENARIOS {
                println!("{name}");
            }
            Ok(())
        }
        Command::Validate { config } => {
            load(config, cli)?.validate()?;
            println!("OK");
            Ok(())
        }
        Command::Run { config } => run(config, cli),
    }
}

/// Reads `arg` as a file, falling back to a built-in scenario of that name.
fn load(arg: &str, cli: &Cli) -> Result<ScenarioConfig, Failure> {
    let path = Path::new(arg);
    let mut cfg = if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
        ScenarioConfig::parse(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?
    } else if SCENARIOS.contains(&arg) {
        scenario::builtin(arg)?
    } else {
        return Err(Failure::new(
            EXIT_USAGE,
            format!(
                "no config file `{arg}` and no built-in scenario of that name; valid scenarios: {}",
                SCENARIOS.join(", ")
            ),
        ));
    };
    cfg.apply(&Overrides {
        seed: cli.seed,
        hbar: cli.hbar,
    });
    Ok(cfg)
}

fn output_dir(cfg: &ScenarioConfig, cli: &Cli) -> PathBuf {
    if let Some(d) = &cli.out {
        return d.clone();
    }
    if let Some(d) = std::env::var_os(OUT_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(d).join(&cfg.scenario);
    }
    match &cfg.output_dir {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from("out").join(&cfg.scenario),
    }
}

fn run(arg: &str, cli: &Cli) -> Result<(), Failure> {
    let cfg = load(arg, cli)?;
    let dir = output_dir(&cfg, cli);
    let start = Instant::now();
    let output: RunOutput = scenario::run_scenario(&cfg)?;
    let elapsed = start.elapsed().as_secs_f64();

    let io = |e: std::io::Error| Failure::new(EXIT_IO, format!("writing {}: {e}", dir.display()));
    let written = output.write(&dir).map_err(io)?;
    std::fs::write(dir.join(TIMING_FILE), format!("wall_time_seconds = {elapsed:.6}\n")).map_err(io)?;

    let report = &output.report;
    for a in &report.analyses {
        let verdict = if a.checks.is_empty() {
            "done"
        } else if a.passed() {
            "pass"
        } else {
            "FAIL"
        };
        println!("{:<16} {verdict:<5} {} file(s)", a.name, a.files.len());
    }
    println!("wrote {} files to {} in {elapsed:.2} s", written.len() + 1, dir.display());

    let failed: Vec<_> = report.failed_checks().collect();
    for (analysis, c) in &failed {
        eprintln!(
            "{}: {analysis}.{} = {:e} exceeds {:e}",
            if cli.strict { "error" } else { "warning" },
            c.name,
            c.value,
            c.bound
        );
    }
    if cli.strict && !failed.is_empty() {
        return Err(Failure::new(EXIT_NUMERIC, format!("{} check(s) above their acceptance bound", failed.len())));
    }
    Ok(())
}
