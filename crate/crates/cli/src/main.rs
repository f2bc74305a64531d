use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tsverify_cli::{
    fixtures, load_config, run_campaign_with, CampaignConfig, Check, RunOptions, VerificationReport, SEED_ENV,
};

#[derive(Parser)]
#[command(
    name = "tsverify",
    version,
    about = "Verify delta-calculus identities and inequalities on time scales"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check requested by the config.
    Run(RunArgs),
    /// Run only the identity checks.
    Identities(RunArgs),
    /// Run only the refinement study.
    Convergence {
        #[command(flatten)]
        args: RunArgs,
        /// Highest refinement level.
        #[arg(long)]
        levels: u32,
    },
    /// Compare stored regression fixtures with this build.
    Fixtures {
        /// Recompute the fixtures with the brute-force oracle and overwrite them.
        #[arg(long)]
        regenerate: bool,
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Write report.json and report.csv here instead of printing the report.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    tol_abs: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn load(path: &Path) -> Result<CampaignConfig, ExitCode> {
    let mut cfg = load_config(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })?;
    if let Ok(raw) = std::env::var(SEED_ENV) {
        let seed = raw.trim().parse::<u64>().map_err(|_| {
            eprintln!("error: {SEED_ENV}={raw} is not an unsigned integer");
            ExitCode::from(2)
        })?;
        cfg.override_seeds(seed);
    }
    Ok(cfg)
}

fn emit(report: &VerificationReport, args: &RunArgs) -> Result<(), String> {
    let s = &report.summary;
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            for (name, text) in [("report.json", report.to_json()), ("report.csv", report.to_csv())] {
                let path = dir.join(name);
                std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            println!("{} rows: {} passed, {} failed", s.total, s.passed, s.failed);
        }
        None => {
            match args.format {
                Format::Json => print!("{}", report.to_json()),
                Format::Csv => print!("{}", report.to_csv()),
            }
            eprintln!("{} rows: {} passed, {} failed", s.total, s.passed, s.failed);
        }
    }
    Ok(())
}

fn run(args: &RunArgs, only: Option<Vec<Check>>, max_level: Option<u32>) -> ExitCode {
    let cfg = match load(&args.config) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    let opts = RunOptions {
        workers: args.workers,
        tol_abs: args.tol_abs,
        only,
        max_level,
    };
    let report = run_campaign_with(&cfg, &opts);
    if let Err(e) = emit(&report, args) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(&args, None, None),
        Command::Identities(args) => run(&args, Some(vec![Check::Identities, Check::AveragedIdentity]), None),
        Command::Convergence { args, levels } => run(&args, Some(vec![Check::Convergence]), Some(levels)),
        Command::Fixtures { regenerate, dir } => {
            let dir = dir.unwrap_or_else(fixtures::default_dir);
            if regenerate {
                match fixtures::write_all(&dir) {
                    Ok(paths) => {
                        for p in paths {
                            println!("wrote {}", p.display());
                        }
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            let problems = fixtures::verify_all(&dir);
            for p in &problems {
                println!("mismatch: {p}");
            }
            println!(
                "{} fixtures checked, {} mismatches",
                fixtures::names().len(),
                problems.len()
            );
            ExitCode::from(if problems.is_empty() { 0 } else { 1 })
        }
    }
}
