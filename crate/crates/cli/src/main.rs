use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use jspa_bench::{run_to_file, ExperimentConfig};

/// Run a seeded allocation experiment and write one CSV row per instance and solver.
#[derive(Parser, Debug)]
#[command(name = "jspa-bench", version)]
struct Args {
    /// Flat `key = value` config file; missing keys keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// First seed; instances use seeds `seed_base .. seed_base + seeds`.
    #[arg(long)]
    seed_base: Option<u64>,

    /// Comma-separated solvers: opt, grad, brute, eps (one per configured epsilon) or eps<value>.
    #[arg(long)]
    solvers: Option<String>,

    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Count basic operations inside each solver.
    #[arg(long, action = clap::ArgAction::Set)]
    count_ops: Option<bool>,

    /// Record wall time; off writes 0 seconds for reproducible output.
    #[arg(long, action = clap::ArgAction::Set)]
    timing: Option<bool>,
}

fn main() -> Result<()> {
    let args = Args::parse();
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = args.seed_base {
        cfg.seed_base = s;
    }
    if let Some(s) = args.solvers {
        cfg.solvers = s;
    }
    if let Some(o) = args.out {
        cfg.out = Some(o);
    }
    if let Some(c) = args.count_ops {
        cfg.count_ops = c;
    }
    if let Some(t) = args.timing {
        cfg.timing = t;
    }
    cfg.validate()?;
    let out = cfg.out.clone().context("no output path: pass --out or set `out` in the config")?;

    let records = run_to_file(&cfg, &out)?;

    let mut by_solver: BTreeMap<&str, (f64, Option<f64>, usize)> = BTreeMap::new();
    for r in &records {
        let e = by_solver.entry(&r.solver).or_default();
        e.0 += r.wsr;
        e.1 = r.loss.map(|l| e.1.unwrap_or(0.0) + l);
        e.2 += 1;
    }
    eprintln!("wrote {} rows to {}", records.len(), out.display());
    for (solver, (wsr, loss, n)) in by_solver {
        let n = n as f64;
        match loss {
            Some(l) => eprintln!("  {solver:>8}: mean wsr {:.4e} bit/s, mean loss {:.3e}", wsr / n, l / n),
            None => eprintln!("  {solver:>8}: mean wsr {:.4e} bit/s", wsr / n),
        }
    }
    Ok(())
}
