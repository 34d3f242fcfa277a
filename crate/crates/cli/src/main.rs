use std::path::PathBuf;
use std::process::ExitCode;

use bsq_cli::{load_config, run, ExperimentKind, EXIT_INVALID, THREADS_VAR};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bsq", version, about = "Boussinesq decay and profile experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// List every constraint the config violates.
    Validate { config: PathBuf },
    /// List the available experiment kinds.
    ListExperiments,
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_VAR}={v:?} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("{e}");
        return ExitCode::from(EXIT_INVALID as u8);
    }
    let code = match cli.command {
        Command::ListExperiments => {
            for k in ExperimentKind::ALL {
                println!("{:<20} {}", k.name(), k.summary());
            }
            0
        }
        Command::Validate { config } => match load_config(&config) {
            Ok((cfg, _)) => {
                let v = cfg.validate();
                for m in &v {
                    println!("{m}");
                }
                if v.is_empty() { 0 } else { EXIT_INVALID }
            }
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        },
        Command::Run { config } => {
            let base = config.parent().map(PathBuf::from).unwrap_or_default();
            match load_config(&config).and_then(|(cfg, text)| run(&cfg, &text, &base)) {
                Ok(code) => {
                    println!("{}", if code == 0 { "PASS" } else { "FAIL" });
                    code
                }
                Err(e) => {
                    eprintln!("{e}");
                    e.exit_code()
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
