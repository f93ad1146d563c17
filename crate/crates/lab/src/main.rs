use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smallball::{default_out_dir, registry, rerender, run_experiment, ExperimentConfig, LabError};

#[derive(Parser)]
#[command(name = "smallball", version, about = "Small-deviation and entropy-gap experiments for stable processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Worker threads; overrides the config.
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory; defaults to $SMALLBALL_OUT/<id> or ./smallball-out/<id>.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List registered experiments.
    List,
    /// Re-render plot.svg of a finished run from its CSV and report.
    Report { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cmd: Command) -> Result<(), LabError> {
    match cmd {
        Command::Run { config, workers, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = out.unwrap_or_else(|| default_out_dir(&cfg.experiment_id));
            let report = run_experiment(&cfg, workers, &out)?;
            print!("{}", report.summary());
            println!("wrote {} ({:.1} s)", out.display(), report.wall_clock_seconds);
        }
        Command::List => {
            for e in registry() {
                println!("{:<20} {}\n{:<20} [{}]", e.id, e.description, "", e.citation);
            }
        }
        Command::Report { dir } => {
            let path = rerender(&dir)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
