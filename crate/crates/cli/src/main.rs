use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fedmm_cli::commands;
use fedmm_cli::error::{CliResult, EXIT_CONFIG};

/// Federated minimax simulator.
#[derive(Parser)]
#[command(name = "fedmm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm block and write its CSV trace.
    Run { config: PathBuf },
    /// Run several algorithm blocks on the same problem into one CSV.
    Compare { config: PathBuf },
    /// Local SGDA fixed point on the two-agent scalar problem.
    FixedPoint {
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        eta: f64,
        /// Separate y stepsize (defaults to --eta).
        #[arg(long)]
        eta_y: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_rounds: usize,
    },
    /// Evaluate the generalization bounds for an input file.
    Bounds { inputs: PathBuf },
    /// Generate a problem from a config and dump it.
    GenData {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Run { config } => commands::cmd_run(&config, &mut stdout),
        Command::Compare { config } => commands::cmd_compare(&config, &mut stdout),
        Command::FixedPoint {
            k,
            eta,
            eta_y,
            max_rounds,
        } => commands::cmd_fixed_point(k, eta, eta_y, max_rounds, &mut stdout),
        Command::Bounds { inputs } => commands::cmd_bounds(&inputs, &mut stdout),
        Command::GenData { config, out } => commands::cmd_gen_data(&config, &out, &mut stdout),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
