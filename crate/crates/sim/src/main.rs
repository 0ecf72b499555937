use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use mel_game::edge::LearningMode;
use mel_game::game::Policy;
use mel_sim::{aggregate, emit_results, parse_config, sweep, AggregateRow, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Pl,
    Fl,
}

/// Run deadline sweeps of the multi-orchestrator edge learning game.
#[derive(Debug, Parser)]
#[command(name = "melsim", version)]
struct Cli {
    /// TOML run configuration; defaults apply to anything missing.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated scenario seeds.
    #[arg(long, alias = "seed", value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Comma-separated deadlines in seconds.
    #[arg(long, value_delimiter = ',')]
    tmax: Option<Vec<f64>>,
    /// Comma-separated subset of fba-opt, dba-ee, random.
    #[arg(long, value_delimiter = ',', value_parser = parse_policy)]
    policies: Option<Vec<Policy>>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Audit every run for profitable unilateral deviations.
    #[arg(long)]
    verify_nash: bool,
    /// Print the default configuration as TOML and exit.
    #[arg(long)]
    print_defaults: bool,
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse().map_err(|e: mel_game::Error| e.to_string())
}

fn apply(cli: &Cli, mut config: RunConfig) -> anyhow::Result<RunConfig> {
    if let Some(dir) = &cli.out {
        config.output.dir = dir.clone();
    }
    if let Some(seeds) = &cli.seeds {
        config.sweep.seeds = seeds.clone();
    }
    if let Some(t) = &cli.tmax {
        config.sweep.t_max = t.clone();
    }
    if let Some(p) = &cli.policies {
        config.sweep.policies = p.clone();
    }
    if let Some(mode) = cli.mode {
        config = config.with_mode(match mode {
            Mode::Pl => LearningMode::Pl,
            Mode::Fl => LearningMode::Fl,
        });
    }
    config.nash.verify |= cli.verify_nash;
    config.validate()?;
    Ok(config)
}

fn print_summary(rows: &[AggregateRow]) {
    println!(
        "{:>8} {:>8} {:>12} {:>12} {:>12} {:>12} {:>10} {:>6}",
        "t_max", "policy", "utility", "revenue", "energy", "payment", "loss", "part"
    );
    for r in rows {
        println!(
            "{:>8} {:>8} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>10.4} {:>6.1}",
            r.t_max,
            r.policy.name(),
            r.avg_learner_utility,
            r.avg_revenue,
            r.avg_energy,
            r.total_payment,
            r.avg_learning_loss,
            r.participants
        );
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    if cli.print_defaults {
        print!("{}", RunConfig::default().to_toml());
        return Ok(());
    }
    let config = match &cli.config {
        Some(path) => parse_config(path)?,
        None => RunConfig::default(),
    };
    let config = apply(&cli, config)?;
    let records = sweep(&config)?;
    let rows = aggregate(&records);
    let files = emit_results(&config.output.dir, &config, &records, &rows)
        .with_context(|| format!("writing results to {}", config.output.dir.display()))?;
    print_summary(&rows);
    if config.nash.verify {
        let audited: Vec<_> = records.iter().filter_map(|r| r.nash).collect();
        let passed = audited.iter().filter(|n| n.is_epsilon_nash).count();
        println!("epsilon-Nash: {passed}/{} audited runs", audited.len());
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
