use std::num::NonZeroUsize;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use psimax::experiment::{
    run_analytic, run_correlation, run_expected_bs, run_hull_split, run_simulation, ExperimentConfig,
    Threads,
};

/// Max-gap angular geometry experiments on random cellular networks.
#[derive(Parser)]
#[command(name = "psimax", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Overrides applied on top of the config file (or the defaults).
#[derive(Args)]
struct Common {
    /// Flat TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of scenarios to draw.
    #[arg(long, global = true)]
    scenarios: Option<u64>,
    /// Worker threads; "auto" or a positive integer.
    #[arg(long, global = true, value_parser = parse_threads)]
    threads: Option<Threads>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw scenarios and write results.csv, summary.csv and curves.csv.
    Simulate,
    /// Correlation of the max gap with TDOA GDOP per hearability bin.
    Correlate {
        /// Reuse an existing results.csv instead of simulating.
        #[arg(long)]
        results: Option<PathBuf>,
    },
    /// Stevens curves, weighted curves and expected station counts.
    Analytic,
    /// TDOA GDOP inside versus outside the convex hull.
    HullSplit {
        #[arg(long)]
        results: Option<PathBuf>,
    },
    /// Expected number of stations for a target max gap.
    ExpectedBs {
        /// Target gap in radians; repeatable. Defaults to the grid.
        #[arg(long)]
        phi: Vec<f64>,
    },
}

fn parse_threads(s: &str) -> Result<Threads, String> {
    if s == "auto" {
        return Ok(Threads::Auto);
    }
    s.parse::<NonZeroUsize>()
        .map(Threads::Fixed)
        .map_err(|_| format!("expected \"auto\" or a positive integer, got `{s}`"))
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)
            .with_context(|| format!("reading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.network.seed = seed;
    }
    if let Some(n) = common.scenarios {
        cfg.n_scenarios = n;
    }
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.4}"))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = load_config(&cli.common)?;
    let out = cfg.output_dir.display();
    match cli.command {
        Command::Simulate => {
            let s = run_simulation(&cfg)?;
            println!(
                "{} scenarios, {} with N >= {}; P(inside hull | N >= {}) = {}",
                s.hearability.scenarios(),
                s.rows,
                s.l_min,
                s.l_min,
                fmt_opt(s.inside_hull_fraction()),
            );
        }
        Command::Correlate { results } => {
            let report = run_correlation(&cfg, results.as_deref())?;
            for b in &report.bins {
                match &b.estimate {
                    Ok(e) => println!(
                        "{}: rows {} spearman {:.4} pearson {:.4} pearson_log {:.4}",
                        b.bin, b.rows, e.spearman, e.pearson_gdop.r, e.pearson_log_gdop.r
                    ),
                    Err(why) => println!("{}: rows {} unavailable ({why})", b.bin, b.rows),
                }
            }
        }
        Command::Analytic => {
            let report = run_analytic(&cfg)?;
            println!(
                "{} stevens curves, {} weighted curves, {} expected counts",
                report.stevens.len(),
                1 + report.sweep.len(),
                report.expected.len()
            );
        }
        Command::HullSplit { results } => {
            let report = run_hull_split(&cfg, results.as_deref())?;
            for b in &report.bins {
                println!(
                    "{}: inside p95 {} median {}; outside median {}; degenerate {}",
                    b.bin,
                    fmt_opt(b.inside_p95),
                    fmt_opt(b.inside_median),
                    fmt_opt(b.outside_median),
                    b.degenerate_rows
                );
            }
        }
        Command::ExpectedBs { phi } => {
            let phis = (!phi.is_empty()).then_some(phi.as_slice());
            for (phi, e) in run_expected_bs(&cfg, phis)? {
                let tag = if e.is_fallback() { " (monte carlo)" } else { "" };
                println!("phi {phi:.6}: E[L] = {:.6}{tag}", e.value);
            }
        }
    }
    eprintln!("wrote {out}");
    Ok(())
}
