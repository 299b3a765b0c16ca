//! Command-line front end: `run`, `gen` and `bench`.
//!
//! Exit codes: 0 clean, 1 validation failure, 2 bad input.

pub mod bench;
pub mod gen;
pub mod run;
pub mod stream;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::params::Overrides;
use crate::pipeline::{BackendChoice, Mode};
use gen::{GenParams, StreamKind};
use run::RunOptions;
use stream::UpdateStream;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dyncolour", version, about = "Fully dynamic (1+ε)Δ edge colouring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct EngineArgs {
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Degree cap for direct, splitter and hierarchy modes. Defaults to the
    /// stream's hint, then to its peak degree.
    #[arg(long)]
    pub delta_max: Option<usize>,
    /// JSON object with any of: eta, ell, a, levels, t1, t2, base, threshold, mu.
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BackendChoice::Auto)]
    pub backend: BackendChoice,
    /// Replay every looked-up process and check every shift step.
    #[arg(long)]
    pub audit: bool,
    /// Accepted for symmetry with `gen`; runs are deterministic without it.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay a stream and print a JSON report.
    Run {
        stream: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        validate_every: usize,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded update stream.
    Gen {
        #[arg(value_enum)]
        kind: StreamKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Degree cap, target degree or hub peak, depending on the kind.
        #[arg(long)]
        degree: Option<usize>,
        /// Edge budget for sliding-window.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time one stream under several modes.
    Bench {
        stream: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Mode::Direct, Mode::Full])]
        modes: Vec<Mode>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[command(flatten)]
        engine: EngineArgs,
        /// JSON rows go here; the table always goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_stream(path: &Path) -> Result<UpdateStream, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    UpdateStream::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_overrides(path: Option<&Path>) -> Result<Overrides, String> {
    let Some(path) = path else { return Ok(Overrides::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn options(engine: &EngineArgs, mode: Mode, validate_every: usize) -> Result<RunOptions, String> {
    if !(engine.epsilon > 0.0 && engine.epsilon < 1.0) {
        return Err(format!("--epsilon must lie in (0, 1), got {}", engine.epsilon));
    }
    Ok(RunOptions {
        mode,
        epsilon: engine.epsilon,
        delta_max: engine.delta_max,
        backend: engine.backend,
        overrides: read_overrides(engine.overrides.as_deref())?,
        validate_every,
        audit: engine.audit,
    })
}

fn execute(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Run {
            stream,
            mode,
            validate_every,
            engine,
            out,
        } => {
            let opts = options(&engine, mode, validate_every)?;
            let s = read_stream(&stream)?;
            let report = run::run(&s, &opts);
            emit(out.as_deref(), &report.to_json())?;
            if let Some(f) = &report.first_failure {
                eprintln!("validation failed at update {}: {}", f.update, f.reason);
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_VALIDATION })
        }
        Command::Gen {
            kind,
            n,
            steps,
            seed,
            degree,
            window,
            out,
        } => {
            if n < 2 {
                return Err("--n must be at least 2".into());
            }
            let p = GenParams {
                kind,
                n,
                steps,
                seed,
                degree,
                window,
            };
            let s = gen::generate(&p);
            let kind = serde_json::to_value(kind).expect("kind serialises");
            let comment = format!("{} n={n} steps={steps} seed={seed}", kind.as_str().unwrap_or("?"));
            let text = s.render(&comment);
            emit(out.as_deref(), text.trim_end())?;
            Ok(EXIT_OK)
        }
        Command::Bench {
            stream,
            modes,
            reps,
            engine,
            out,
        } => {
            let opts = options(&engine, Mode::Full, 0)?;
            let s = read_stream(&stream)?;
            let rows = bench::bench(&s, &modes, reps, &opts);
            print!("{}", bench::table(&rows));
            if let Some(p) = out {
                let json = serde_json::to_string_pretty(&rows).expect("rows serialise");
                std::fs::write(&p, json).map_err(|e| format!("{}: {e}", p.display()))?;
            }
            Ok(if rows.iter().all(|r| r.failures == 0) { EXIT_OK } else { EXIT_VALIDATION })
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}
