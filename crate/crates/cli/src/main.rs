use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hybrid_cli::config::{Diagnostic, ScenarioConfig};
use hybrid_cli::{run_scenario, tomography_demo, validate_backends, RunError, ScenarioReport, THREADS_ENV};

/// Hybrid quantum-classical ensemble laboratory.
#[derive(Parser)]
#[command(name = "hybridlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve both backends and write the requested diagnostics.
    Simulate(Paths),
    /// Cross-backend moment residuals and the dt-halving ratio.
    Validate(Paths),
    /// Hybrid brackets of the configured observable pairs over time.
    Brackets(Paths),
    /// Forward-simulate probe moments and recover the mediator moments.
    Tomography(Paths),
}

#[derive(Args)]
struct Paths {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; defaults to `[output] path`, then `<config stem>.<command>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Run(RunError),
    Usage(String),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure::Run(e)
    }
}

fn output_path(paths: &Paths, cfg: &ScenarioConfig, command: &str) -> PathBuf {
    if let Some(p) = &paths.out {
        return p.clone();
    }
    if let Some(p) = &cfg.output_path {
        return p.clone();
    }
    let stem = paths.config.file_stem().map_or("scenario".into(), |s| s.to_string_lossy());
    PathBuf::from(format!("{stem}.{command}.csv"))
}

fn write(path: &Path, report: &ScenarioReport) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, report.to_csv()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {} ({} rows)", path.display(), report.rows.len());
    Ok(())
}

fn run(command: &Command) -> Result<(), Failure> {
    let (name, paths) = match command {
        Command::Simulate(p) => ("simulate", p),
        Command::Validate(p) => ("validate", p),
        Command::Brackets(p) => ("brackets", p),
        Command::Tomography(p) => ("tomography", p),
    };
    let text = fs::read_to_string(&paths.config)
        .map_err(|e| Failure::Usage(format!("{}: {e}", paths.config.display())))?;
    let mut cfg: ScenarioConfig = text.parse().map_err(RunError::from)?;
    let out = output_path(paths, &cfg, name);
    match command {
        Command::Simulate(_) | Command::Brackets(_) => {
            if name == "brackets" {
                cfg.diagnostics = [Diagnostic::Brackets].into();
                if cfg.bracket_pairs.is_empty() {
                    return Err(Failure::Usage(format!(
                        "{}: no bracket pairs configured ([diagnostics] brackets)",
                        paths.config.display()
                    )));
                }
            }
            let result = run_scenario(&cfg, name)?;
            write(&out, &result.report)?;
            if let (Some(path), Some(state)) = (&cfg.grid_dump, &result.grid) {
                let file = fs::File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                state
                    .write_dump(std::io::BufWriter::new(file))
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                eprintln!("wrote grid dump {}", path.display());
            }
        }
        Command::Validate(_) => {
            let summary = validate_backends(&cfg)?;
            println!("max moment residual: {:.3e}", summary.max_residual);
            match summary.convergence_ratio {
                Some(r) => println!("dt-halving ratio: {r:.3} (order {:.3})", r.log2()),
                None => println!("dt-halving ratio: n/a (differences at roundoff)"),
            }
            write(&out, &summary.report)?;
        }
        Command::Tomography(_) => {
            let report = tomography_demo(&cfg)?;
            for line in report.table() {
                println!("{line}");
            }
            write(&out, &report.report)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                // Only fails if a pool already exists, which cannot happen here.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        }
    }
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
