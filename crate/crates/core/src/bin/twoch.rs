//! Command-line runner for 2CH simulations and verification checks.
//!
//! Exit codes: 0 all requested checks passed; 1 a check ran and failed;
//! 2 precondition or configuration error (inadmissible weight, malformed
//! config, unmet hypothesis); 3 blow-up before T_end; 4 i/o failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twoch::cli::{self, Check, RunConfig};
use twoch::error::Error;

#[derive(Parser)]
#[command(
    name = "twoch",
    version,
    about = "Two-component Camassa-Holm solver and verification harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a key=value run configuration.
    config: PathBuf,
    /// Output directory (default: $TWOCH_OUT or ./out, plus the config stem).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the system and write the trajectory directory.
    Simulate(RunArgs),
    /// Integrate and run verification checks.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Replace the config's check set (repeatable).
        #[arg(long = "check")]
        checks: Vec<String>,
    },
    /// Certify a weight-spec file and print the traced Gronwall constant.
    WeightsCheck {
        /// Path to a key=value weight spec.
        file: PathBuf,
    },
    /// Run several configs concurrently into isolated directories.
    Sweep {
        /// Config files, one run each.
        configs: Vec<PathBuf>,
        /// Worker threads.
        #[arg(long, default_value_t = 2)]
        jobs: usize,
        /// Output root (default: $TWOCH_OUT or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn out_root(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("TWOCH_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load_config(path: &PathBuf) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into())
}

fn execute(cfg: &RunConfig, args: &RunArgs) -> u8 {
    let dir = match &args.out {
        Some(d) => d.clone(),
        None => out_root(&None).join(stem(&args.config)),
    };
    match cli::run(cfg, &dir) {
        Ok(summary) => {
            for o in &summary.outcomes {
                println!(
                    "check {}: {} ({})",
                    o.check,
                    if o.pass { "pass" } else { "fail" },
                    o.detail
                );
            }
            if let Some(t) = summary.blow_up {
                println!("outcome: blow-up at t={t:.6}");
            }
            println!("artifacts: {}", summary.out_dir.display());
            summary.exit_code() as u8
        }
        Err(e) => {
            eprintln!("error: {e}");
            cli::exit_code_for_error(&e) as u8
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // --help / --version are successful terminations
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(2);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let code = match &cli.command {
        Command::Simulate(args) => match load_config(&args.config) {
            Ok(mut cfg) => {
                cfg.checks.clear();
                execute(&cfg, args)
            }
            Err(e) => {
                eprintln!("error: {e}");
                cli::exit_code_for_error(&e) as u8
            }
        },
        Command::Verify { run, checks } => match load_config(&run.config) {
            Ok(mut cfg) => {
                if !checks.is_empty() {
                    cfg.checks.clear();
                    let mut bad = None;
                    for c in checks {
                        match Check::parse(c) {
                            Ok(chk) => {
                                cfg.checks.insert(chk);
                            }
                            Err(e) => bad = Some(e),
                        }
                    }
                    if let Some(e) = bad {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
                execute(&cfg, run)
            }
            Err(e) => {
                eprintln!("error: {e}");
                cli::exit_code_for_error(&e) as u8
            }
        },
        Command::WeightsCheck { file } => {
            let text = match std::fs::read_to_string(file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", file.display());
                    return ExitCode::from(4);
                }
            };
            match cli::weights_check_text(&text) {
                Ok(dump) => {
                    print!("{dump}");
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    cli::exit_code_for_error(&e) as u8
                }
            }
        }
        Command::Sweep { configs, jobs, out } => {
            if configs.is_empty() {
                eprintln!("error: sweep needs at least one config");
                return ExitCode::from(2);
            }
            let mut loaded = Vec::new();
            for path in configs {
                match load_config(path) {
                    Ok(cfg) => loaded.push((stem(path), cfg)),
                    Err(e) => {
                        eprintln!("error in {}: {e}", path.display());
                        return ExitCode::from(cli::exit_code_for_error(&e) as u8);
                    }
                }
            }
            let root = out_root(out);
            let results = cli::sweep(&loaded, &root, *jobs);
            let mut worst = 0;
            for (name, code) in &results {
                println!("{name}: exit {code}");
                worst = worst.max(*code);
            }
            worst as u8
        }
    };
    ExitCode::from(code)
}
