use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fsosec::commands;
use fsosec::{CampaignConfig, Overrides};

/// Secrecy analysis of intensity-modulated free-space optical wiretap links.
#[derive(Parser)]
#[command(name = "fsosec", version)]
struct Cli {
    /// Worker threads for per-slot analysis (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a campaign and write bob.fsow, eve.fsow and truth.json.
    Simulate(Common),
    /// Recover symbols and write report.json plus per-slot CSV series.
    Analyze(Common),
    /// Leakage bounds versus code length, rate split and repetition rate.
    Finitelen(Common),
    /// Mutual information versus soft-decision bin width.
    Binsweep(Common),
}

#[derive(Args)]
struct Common {
    /// Campaign file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Simulation RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Coherence slot length in milliseconds.
    #[arg(long)]
    coherence_ms: Option<f64>,
    /// Fixed soft-decision bin width for Eve in millivolts.
    #[arg(long)]
    delta_mv: Option<f64>,
    /// Comma-separated outage target rates in bits/s.
    #[arg(long, value_delimiter = ',')]
    rth_grid: Option<Vec<f64>>,
}

impl Common {
    fn load(&self) -> anyhow::Result<CampaignConfig> {
        let mut cfg = CampaignConfig::load(&self.config)?;
        cfg.apply(&Overrides {
            out: self.out.clone(),
            seed: self.seed,
            coherence_ms: self.coherence_ms,
            delta_mv: self.delta_mv,
            rth_grid_bps: self.rth_grid.clone(),
        });
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let pool = commands::thread_pool(cli.workers)?;
    match cli.command {
        Command::Simulate(c) => {
            let out = commands::simulate(&c.load()?)?;
            println!(
                "{}\n{}\n{}",
                out.bob.display(),
                out.eve.display(),
                out.truth.display()
            );
        }
        Command::Analyze(c) => {
            let a = commands::analyze(&c.load()?, &pool)?;
            let r = &a.report;
            println!(
                "slots {}/{} valid, R_S,T {:.4} bits, R_S,erg {} bits",
                r.meta.n_valid_slots,
                r.meta.n_slots,
                r.rs_long_span,
                r.rs_ergodic
                    .map_or_else(|| "undefined".to_string(), |v| format!("{v:.4}"))
            );
        }
        Command::Finitelen(c) => {
            let f = commands::finitelen(&c.load()?, &pool)?;
            println!(
                "sum rate {:.4} bits/letter, {} rate splits",
                f.total_rate,
                f.rate_split.len()
            );
        }
        Command::Binsweep(c) => {
            let s = commands::binsweep(&c.load()?, &pool)?;
            println!(
                "bob: delta {:.4e} V, MI {:.4}; eve: delta {:.4e} V, MI {:.4}",
                s.bob_choice.delta, s.bob_choice.mi, s.eve_choice.delta, s.eve_choice.mi
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FSOSEC_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
