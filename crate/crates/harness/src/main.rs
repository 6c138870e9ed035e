use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hetnet_harness::figures::{run_fig3, run_fig4, run_fig5, run_single};
use hetnet_harness::{validate_config, ExperimentConfig, HarnessError, Mode, SweepReport};

#[derive(Parser)]
#[command(name = "hetnet", version, about = "Caching-aware mobility experiments for mmW/µW small-cell networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides experiment.seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides experiment.trials
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// analysis, simulation or compare; overrides experiment.mode
    #[arg(long, global = true)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Caching-duration CDF against initial distance.
    Fig3,
    /// Handover failures against speed, caching off and on.
    Fig4,
    /// Caching rate against initial distance, LoS and NLoS.
    Fig5,
    /// Check a configuration and print it with every default filled in.
    Validate,
    /// One trial with its event trace.
    SingleRun {
        /// Write the per-event trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

fn load(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let text = match &cli.config {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(vec![format!("{}: {e}", path.display())]))?,
        None => String::new(),
    };
    let mut cfg = validate_config(&text)?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    if let Some(trials) = cli.trials {
        if trials == 0 {
            return Err(HarnessError::Config(vec!["--trials must be at least 1".into()]));
        }
        cfg.set_trials(trials);
    }
    if let Some(mode) = cli.mode {
        cfg.set_mode(mode);
    }
    Ok(cfg)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(cli: &Cli, cfg: &ExperimentConfig, rep: &SweepReport) -> Result<(), HarnessError> {
    rep.write_csv(cfg, output(&cli.out)?)
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Fig3 => emit(cli, &cfg, &run_fig3(&cfg)?),
        Command::Fig4 => emit(cli, &cfg, &run_fig4(&cfg)?),
        Command::Fig5 => emit(cli, &cfg, &run_fig5(&cfg)?),
        Command::Validate => {
            let mut out = output(&cli.out)?;
            writeln!(out, "# config_sha256: {}", cfg.hash())?;
            out.write_all(cfg.echo().as_bytes())?;
            Ok(())
        }
        Command::SingleRun { trace } => {
            let (rep, events) = run_single(&cfg)?;
            if let Some(path) = trace {
                let mut w = BufWriter::new(File::create(path)?);
                for e in &events {
                    writeln!(w, "{e}")?;
                }
                w.flush()?;
            }
            emit(cli, &cfg, &rep)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hetnet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
