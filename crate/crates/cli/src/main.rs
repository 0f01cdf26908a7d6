//! `metric-bounds`: bound tables, Monte-Carlo audits and figure data.
//!
//! Settings are resolved in three layers: built-in defaults, then the JSON
//! document given by `--config`, then command-line flags. Each subcommand
//! writes `<name>.csv` and `<name>.json` into `--out` and prints one line per
//! assertion. Exit status: 0 when every assertion passed, 2 when one failed,
//! 1 on error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use metric_bounds::experiments::{
    run_bounds, run_concentration, run_embed_audit, run_figure, run_gap, run_wasserstein, ExperimentConfig,
    ResultTable, SpaceSource,
};

#[derive(Parser, Debug)]
#[command(name = "metric-bounds", version, about = "Concentration and generalization bounds on finite metric spaces")]
struct Cli {
    /// JSON config; flags given here override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads for replicate fan-out (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Monte-Carlo replicates per grid point.
    #[arg(long, global = true)]
    replicates: Option<usize>,
    /// Confidence parameter.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Rejection budget certifying maximality of packing spaces.
    #[arg(long, global = true)]
    packing_budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rate table, best m and competitor bounds over the N grid.
    Bounds,
    /// Monte-Carlo W(P, P^N) against the concentration constants.
    Concentration,
    /// Generalization gap on a small product space against the bounds.
    Gap,
    /// Measured embedding distortion against the worst-case tables.
    EmbedAudit,
    /// Curve data and a gnuplot script: risk-bound-small, risk-bound-large
    /// or phase-diagram.
    Figure { name: String },
    /// Exact W(mu, nu) on the configured space, with the optimal coupling.
    Wasserstein,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(r) = cli.replicates {
        config.replicates = r;
    }
    if let Some(d) = cli.delta {
        config.delta = d;
    }
    if let (Some(b), SpaceSource::Packing { budget, .. }) = (cli.packing_budget, &mut config.space) {
        *budget = Some(b);
    }
    Ok(config)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Writes the table and reports its assertions; true when all passed.
fn finish(dir: &Path, stem: &str, mut table: ResultTable) -> Result<bool> {
    table.metadata.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    write(dir, &format!("{stem}.csv"), &table.to_csv())?;
    write(dir, &format!("{stem}.json"), &table.to_json())?;
    for a in &table.assertions {
        let status = if a.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", a.name, a.detail);
    }
    println!("wrote {}/{stem}.csv ({} rows, config {})", dir.display(), table.rows.len(), &table.metadata.config_hash[..12]);
    Ok(table.all_passed())
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting the worker pool")?;
    }
    let config = load_config(cli)?;
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::Bounds => {
            let (table, report) = run_bounds(&config)?;
            write(out, "bounds_wide.csv", &report.to_wide_csv())?;
            write(out, "bounds_rates.csv", &report.to_rate_csv())?;
            finish(out, "bounds", table)
        }
        Command::Concentration => finish(out, "concentration", run_concentration(&config)?.0),
        Command::Gap => finish(out, "gap", run_gap(&config)?.0),
        Command::EmbedAudit => finish(out, "embed-audit", run_embed_audit(&config)?.0),
        Command::Figure { name } => {
            let data = run_figure(name, &config)?;
            let stem = data.name.as_str();
            write(out, &format!("{stem}.gp"), &data.script)?;
            // the figure CSV holds the curves; the long-form table goes alongside
            write(out, &format!("{stem}.csv"), &data.csv)?;
            finish(out, &format!("{stem}_table"), data.table)
        }
        Command::Wasserstein => {
            let (table, report) = run_wasserstein(&config)?;
            write(out, "coupling.csv", &report.coupling_csv)?;
            println!("W = {} (TV = {}, diameter = {})", report.value, report.tv, report.diameter);
            finish(out, "wasserstein", table)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
