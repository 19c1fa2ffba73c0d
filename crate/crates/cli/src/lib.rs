//! Seeded batch experiments over the `noma-jspa` solvers.
//!
//! An experiment sweeps the number of users `K` and the multiplexing limit
//! `M`, draws `seeds` channel realizations per `K`, runs every requested
//! solver on each instance and writes one CSV row per (instance, solver):
//!
//! ```text
//! seed,K,N,M,solver,wsr,loss,ops,seconds
//! ```
//!
//! `loss` is `(opt - wsr) / opt` against the `opt` solver of the same instance
//! and is left empty when `opt` is not part of the run. Rows come out sorted by
//! `K`, `M`, seed and solver position regardless of how many worker threads ran.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use noma_jspa::channel::{generate_instance, parse_kv, ChannelConfig};
use noma_jspa::jspa::{JspaSolution, Prepared};
use noma_jspa::ops::count_ops_if;
use rayon::prelude::*;
use thiserror::Error;

pub const CSV_HEADER: &str = "seed,K,N,M,solver,wsr,loss,ops,seconds";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error("unknown solver {0:?} (expected opt, grad, brute, eps or eps<value>)")]
    UnknownSolver(String),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] noma_jspa::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver {
    Opt,
    Eps(f64),
    Grad,
    Brute,
}

impl Solver {
    /// Parse one solver name. A bare `eps` expands to one solver per entry of
    /// `epsilons`.
    pub fn parse_list(names: &str, epsilons: &[f64]) -> Result<Vec<Solver>> {
        let mut out = Vec::new();
        for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "opt" => out.push(Solver::Opt),
                "grad" => out.push(Solver::Grad),
                "brute" => out.push(Solver::Brute),
                "eps" => out.extend(epsilons.iter().map(|&e| Solver::Eps(e))),
                _ => match name.strip_prefix("eps").and_then(|e| e.parse::<f64>().ok()) {
                    Some(e) if e > 0.0 && e < 1.0 => out.push(Solver::Eps(e)),
                    _ => return Err(BenchError::UnknownSolver(name.to_string())),
                },
            }
        }
        if out.is_empty() {
            return Err(BenchError::Config("no solvers selected".into()));
        }
        Ok(out)
    }

    fn run(self, prepared: &Prepared, xi: f64) -> Result<JspaSolution> {
        Ok(match self {
            Solver::Opt => prepared.opt_jspa(),
            Solver::Eps(e) => prepared.eps_jspa(e),
            Solver::Grad => prepared.grad_jspa(xi),
            Solver::Brute => prepared.brute_force_jspa()?,
        })
    }

    pub fn name(self) -> String {
        match self {
            Solver::Opt => "opt".into(),
            Solver::Eps(e) => format!("eps{e}"),
            Solver::Grad => "grad".into(),
            Solver::Brute => "brute".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Physical parameters. `users` and `max_multiplexed` are overridden by
    /// the sweeps.
    pub channel: ChannelConfig,
    pub solvers: String,
    pub users: Vec<usize>,
    pub max_multiplexed: Vec<usize>,
    pub seeds: usize,
    pub seed_base: u64,
    pub epsilons: Vec<f64>,
    pub xi: f64,
    pub out: Option<PathBuf>,
    pub count_ops: bool,
    /// When false the `seconds` column is written as 0, making output
    /// byte-for-byte reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            channel: ChannelConfig::default(),
            solvers: "opt,grad".into(),
            users: vec![5, 10, 20],
            max_multiplexed: vec![1, 2, 3],
            seeds: 50,
            seed_base: 0,
            epsilons: vec![0.1],
            xi: 1e-4,
            out: None,
            count_ops: false,
            timing: true,
        }
    }
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| BenchError::Config(format!("bad entry {s:?} for {key}"))))
        .collect()
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| BenchError::Config(format!("bad value {value:?} for {key}")))
}

impl ExperimentConfig {
    /// Read a flat `key = value` file on top of the defaults.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (key, value) in parse_kv(text)? {
            cfg.set(&key, &value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_kv(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "solvers" => self.solvers = value.to_string(),
            "users" => self.users = list(key, value)?,
            "max_multiplexed" => self.max_multiplexed = list(key, value)?,
            "seeds" => self.seeds = scalar(key, value)?,
            "seed" => self.seed_base = scalar(key, value)?,
            "epsilon" => self.epsilons = list(key, value)?,
            "xi" => self.xi = scalar(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "count_ops" => self.count_ops = scalar(key, value)?,
            "timing" => self.timing = scalar(key, value)?,
            _ => self.channel.set(key, value)?,
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BenchError::Config(m.to_string()));
        if self.users.is_empty() || self.max_multiplexed.is_empty() {
            return bad("users and max_multiplexed sweeps must be non-empty");
        }
        if self.seeds == 0 {
            return bad("seeds must be at least 1");
        }
        if !(self.xi > 0.0) {
            return bad("xi must be > 0");
        }
        let min_k = *self.users.iter().min().unwrap();
        if self.max_multiplexed.iter().any(|&m| m == 0 || m > min_k) {
            return bad("every max_multiplexed value must be in 1..=min(users)");
        }
        Solver::parse_list(&self.solvers, &self.epsilons)?;
        let mut probe = self.channel.clone();
        probe.users = min_k;
        probe.max_multiplexed = 1;
        probe.validate()?;
        Ok(())
    }

    pub fn solver_list(&self) -> Result<Vec<Solver>> {
        Solver::parse_list(&self.solvers, &self.epsilons)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub users: usize,
    pub subcarriers: usize,
    pub max_multiplexed: usize,
    pub solver: String,
    /// Weighted sum-rate, bits/s.
    pub wsr: f64,
    pub loss: Option<f64>,
    pub ops: u64,
    pub seconds: f64,
}

impl RunRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.users,
            self.subcarriers,
            self.max_multiplexed,
            self.solver,
            self.wsr,
            self.loss.map_or(String::new(), |l| l.to_string()),
            self.ops,
            self.seconds
        )
    }
}

fn run_instance(cfg: &ExperimentConfig, solvers: &[Solver], k: usize, m: usize, seed: u64) -> Result<Vec<RunRecord>> {
    let channel = ChannelConfig { users: k, max_multiplexed: m, ..cfg.channel.clone() };
    let prepared = Prepared::new(&generate_instance(&channel, seed)?);
    let mut records = Vec::with_capacity(solvers.len());
    for &solver in solvers {
        let start = Instant::now();
        let (solution, ops) = count_ops_if(cfg.count_ops, || solver.run(&prepared, cfg.xi));
        let seconds = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
        records.push(RunRecord {
            seed,
            users: k,
            subcarriers: channel.subcarriers,
            max_multiplexed: m,
            solver: solver.name(),
            wsr: solution?.wsr,
            loss: None,
            ops,
            seconds,
        });
    }
    if let Some(opt) = records.iter().find(|r| r.solver == "opt").map(|r| r.wsr) {
        for r in &mut records {
            r.loss = Some(if opt > 0.0 { (opt - r.wsr) / opt } else { 0.0 });
        }
    }
    Ok(records)
}

/// Run every (K, M, seed) job on the rayon pool and return the records in
/// sweep order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let solvers = cfg.solver_list()?;
    let jobs: Vec<(usize, usize, u64)> = cfg
        .users
        .iter()
        .flat_map(|&k| {
            cfg.max_multiplexed
                .iter()
                .flat_map(move |&m| (0..cfg.seeds as u64).map(move |s| (k, m, s)))
        })
        .map(|(k, m, s)| (k, m, cfg.seed_base + s))
        .collect();
    let per_job: Vec<Vec<RunRecord>> = jobs
        .par_iter()
        .map(|&(k, m, seed)| run_instance(cfg, &solvers, k, m, seed))
        .collect::<Result<_>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

pub fn write_csv(records: &[RunRecord], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    out.flush()
}

/// Run the experiment and write its CSV to `path`. The file is created before
/// any solver runs, so a bad path fails immediately.
pub fn run_to_file(cfg: &ExperimentConfig, path: &Path) -> Result<Vec<RunRecord>> {
    let output_err = |source| BenchError::Output { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(output_err)?;
    let records = run_experiment(cfg)?;
    write_csv(&records, BufWriter::new(file)).map_err(output_err)?;
    Ok(records)
}
