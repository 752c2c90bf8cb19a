//! Experiments built from a config: sample paths, tail tables, moments,
//! bound evaluations and exact oracle laws, each written to the output
//! directory.

use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use sbc_core::bounds::BoundResult;
use sbc_core::oracle::{self, OracleBudget, OracleError};
use sbc_core::{PathKind, RandomSource, Theorem};

use crate::config::{ConfigError, ExperimentConfig, Format, SystemKind};
use crate::engine::{self, Engine, EngineError, MomentSummary, TailEstimate, TailQuery};
use crate::evaluate::{self, BoundRecord};
use crate::output::{self, flag, num, Table};

#[derive(Debug, Error)]
pub enum AppError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Engine(#[from] EngineError),
    #[error("oracle: {0}")]
    Oracle(OracleError),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl AppError {
    /// `2` for bad input, `3` for resource and IO failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Usage(_) => 2,
            Self::Engine(EngineError::UnsupportedPath(_) | EngineError::TooFewSamples { .. }) => 2,
            Self::Oracle(OracleError::NotDiscrete | OracleError::NotLattice { .. }) => 2,
            Self::Engine(_) | Self::Oracle(_) | Self::Io(_) => 3,
        }
    }
}

impl From<OracleError> for AppError {
    fn from(e: OracleError) -> Self {
        Self::Oracle(e)
    }
}

pub type Result<T> = std::result::Result<T, AppError>;

/// Engine for the config's worker count.
pub fn engine_for(cfg: &ExperimentConfig) -> Result<Engine> {
    Ok(Engine::new(cfg.workers)?)
}

/// One line of a tail table: the estimate and, if configured, its bound.
#[derive(Debug, Clone, Serialize)]
pub struct TailRow {
    pub estimate: TailEstimate,
    pub bound: Option<BoundRecord>,
    /// Whether the upper confidence limit lies at or below the clamped bound.
    pub dominated: Option<bool>,
}

pub const TAIL_HEADER: [&str; 14] = [
    "t",
    "k",
    "hits",
    "n",
    "p_hat",
    "ci_low",
    "ci_high",
    "bound_value",
    "bound_clamped",
    "bound_theorem",
    "bound_vacuous",
    "bound_applicable",
    "bound_failed_checks",
    "dominated",
];

impl TailRow {
    pub fn new(estimate: TailEstimate, bound: Option<&BoundResult>) -> Self {
        let dominated = bound.map(|b| estimate.exceed.ci_high <= b.clamped_value);
        Self { estimate, bound: bound.map(|b| BoundRecord::new(b, estimate.t, estimate.k)), dominated }
    }

    fn cells(&self) -> Vec<String> {
        let e = &self.estimate;
        let p = &e.exceed;
        let mut row = vec![e.t.to_string(), num(e.k), p.hits.to_string(), p.n.to_string(), num(p.p_hat), num(p.ci_low), num(p.ci_high)];
        match &self.bound {
            Some(b) => row.extend([
                num(b.log_value.exp()),
                num(b.clamped),
                b.theorem.to_string(),
                flag(b.vacuous),
                flag(b.applicable),
                failed(&b.validity),
                flag(self.dominated.unwrap_or(false)),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 7)),
        }
        row
    }
}

fn failed(checks: &[sbc_core::Check]) -> String {
    checks.iter().filter(|c| !c.satisfied).map(|c| c.name).collect::<Vec<_>>().join(";")
}

pub fn tail_table(rows: &[TailRow]) -> Table {
    let mut t = Table::new(&TAIL_HEADER);
    for r in rows {
        t.push(r.cells());
    }
    t
}

/// Tail estimates at the config's times with `k = k(t)`, plus bounds.
pub fn tail_rows(engine: &Engine, cfg: &ExperimentConfig) -> Result<Vec<TailRow>> {
    let queries: Vec<TailQuery> = cfg.report_times().into_iter().map(|t| TailQuery { t, k: cfg.threshold(t) }).collect();
    tail_rows_for(engine, cfg, &queries, cfg.resolved_bound())
}

pub fn tail_rows_for(
    engine: &Engine,
    cfg: &ExperimentConfig,
    queries: &[TailQuery],
    theorem: Option<Theorem>,
) -> Result<Vec<TailRow>> {
    let est = engine::estimate_tails(engine, &cfg.system(), cfg.path, queries, cfg.n, cfg.seed, cfg.confidence)?;
    Ok(est
        .into_iter()
        .map(|e| {
            let b = theorem.map(|th| evaluate::bound_for(cfg, th, e.t, e.k));
            TailRow::new(e, b.as_ref())
        })
        .collect())
}

/// Every state of one trajectory (stream 0 of the seed).
pub fn single_path(cfg: &ExperimentConfig) -> Vec<sbc_core::BistarState> {
    let mut out = Vec::with_capacity(cfg.horizon as usize + 1);
    let mut src = RandomSource::new(cfg.seed, 0);
    cfg.system().walk(cfg.horizon, &mut src, |s| out.push(*s));
    out
}

fn path_kinds(system: SystemKind) -> &'static [PathKind] {
    match system {
        SystemKind::TwoAgent => &PathKind::ALL[..1],
        SystemKind::Bistar => &PathKind::ALL,
    }
}

pub fn path_table(cfg: &ExperimentConfig, states: &[sbc_core::BistarState]) -> Table {
    let kinds = path_kinds(cfg.system);
    let mut header = vec!["t"];
    header.extend(kinds.iter().map(|k| k.label()));
    let mut t = Table::new(&header);
    for s in states {
        let mut row = vec![s.t.to_string()];
        row.extend(kinds.iter().map(|&k| num(s.get(k))));
        t.push(row);
    }
    t
}

#[derive(Serialize)]
struct PathJson<'a> {
    columns: Vec<&'static str>,
    rows: &'a [Vec<String>],
}

fn write_table(dir: &Path, name: &str, format: Format, table: &Table) -> Result<PathBuf> {
    let json = PathJson { columns: table.header.clone(), rows: &table.rows };
    Ok(output::write_either(dir, name, format, table, &json)?)
}

pub const MOMENT_HEADER: [&str; 8] =
    ["t", "mean", "mean_ci_low", "mean_ci_high", "variance", "rms", "rms_ci_low", "rms_ci_high"];

pub fn moment_table(m: &[MomentSummary]) -> Table {
    let mut t = Table::new(&MOMENT_HEADER);
    for s in m {
        t.push(vec![
            s.t.to_string(),
            num(s.mean.estimate),
            num(s.mean.ci_low),
            num(s.mean.ci_high),
            num(s.variance),
            num(s.rms.estimate),
            num(s.rms.ci_low),
            num(s.rms.ci_high),
        ]);
    }
    t
}

/// Writes `path.csv` for one seeded trajectory.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let table = path_table(cfg, &single_path(cfg));
    Ok(vec![write_table(Path::new(&cfg.out_dir), "path", cfg.format, &table)?])
}

/// Writes `tail.csv` and returns its rows.
pub fn tail(cfg: &ExperimentConfig) -> Result<(Vec<TailRow>, PathBuf)> {
    let engine = engine_for(cfg)?;
    let rows = tail_rows(&engine, cfg)?;
    let path = output::write_either(Path::new(&cfg.out_dir), "tail", cfg.format, &tail_table(&rows), &rows)?;
    Ok((rows, path))
}

/// Moments at the config's times.
pub fn moments(engine: &Engine, cfg: &ExperimentConfig) -> Result<Vec<MomentSummary>> {
    let times: Vec<u64> = cfg.report_times();
    Ok(engine::moment_summary(engine, &cfg.system(), cfg.path, &times, cfg.n, cfg.seed, cfg.confidence)?)
}

/// Path, tail table, moments and the resolved config, all in the output
/// directory.
pub fn run(cfg: &ExperimentConfig) -> Result<(Vec<TailRow>, Vec<PathBuf>)> {
    let dir = Path::new(&cfg.out_dir);
    let mut files = simulate(cfg)?;
    let engine = engine_for(cfg)?;
    let rows = tail_rows(&engine, cfg)?;
    files.push(output::write_either(dir, "tail", cfg.format, &tail_table(&rows), &rows)?);
    let m = moments(&engine, cfg)?;
    files.push(output::write_either(dir, "moments", cfg.format, &moment_table(&m), &m)?);
    let cfg_path = dir.join("config.txt");
    std::fs::write(&cfg_path, cfg.render())?;
    files.push(cfg_path);
    Ok((rows, files))
}

/// Bound evaluations at the config's times for `theorem` (or the resolved
/// one), with `k` fixed or `k(t)`.
pub fn bound_records(cfg: &ExperimentConfig, theorem: Option<Theorem>, k: Option<f64>) -> Result<Vec<BoundRecord>> {
    let th = theorem
        .or_else(|| cfg.resolved_bound())
        .ok_or_else(|| AppError::Usage(String::from("no bound selected: pass --theorem or set run.bound")))?;
    Ok(cfg
        .report_times()
        .into_iter()
        .map(|t| {
            let k = k.unwrap_or_else(|| cfg.threshold(t));
            BoundRecord::new(&evaluate::bound_for(cfg, th, t, k), t, k)
        })
        .collect())
}

/// Exact law of the observed difference at the horizon and exact tails at
/// the reported times.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub horizon: u64,
    pub distribution: Vec<(f64, f64)>,
    pub tails: Vec<(u64, f64, f64)>,
    pub pruned_mass: f64,
}

pub fn oracle_report(cfg: &ExperimentConfig, budget: OracleBudget) -> Result<OracleReport> {
    let noise = cfg.noise_model();
    let law_at = |t: u64| -> Result<sbc_core::oracle::LatticeDistribution> {
        Ok(match (cfg.system, cfg.path) {
            (_, PathKind::Leader) => oracle::exact_diff_distribution_with(&cfg.influence, &noise, t, budget)?,
            (SystemKind::Bistar, PathKind::Follower) => {
                oracle::exact_bistar_distribution(&cfg.influence, &cfg.follower_influence, &noise, t, budget)?
                    .follower_marginal()
            }
            (_, kind) => {
                return Err(AppError::Usage(format!("the oracle covers the y and y_f1 paths, not {}", kind.label())))
            }
        })
    };
    let final_law = law_at(cfg.horizon)?;
    let mut tails = Vec::new();
    for t in cfg.report_times() {
        let law = if t == cfg.horizon { final_law.clone() } else { law_at(t)? };
        let k = cfg.threshold(t);
        tails.push((t, k, oracle::exact_tail(&law, k)));
    }
    Ok(OracleReport {
        horizon: cfg.horizon,
        distribution: final_law.points().collect(),
        tails,
        pruned_mass: final_law.pruned_mass,
    })
}

pub fn write_oracle(cfg: &ExperimentConfig, r: &OracleReport) -> Result<Vec<PathBuf>> {
    let dir = Path::new(&cfg.out_dir);
    let mut d = Table::new(&["x", "mass"]);
    for &(x, m) in &r.distribution {
        d.push(vec![num(x), num(m)]);
    }
    let mut t = Table::new(&["t", "k", "exact_tail"]);
    for &(time, k, p) in &r.tails {
        t.push(vec![time.to_string(), num(k), num(p)]);
    }
    Ok(vec![
        output::write_either(dir, "oracle_distribution", cfg.format, &d, &r.distribution)?,
        output::write_either(dir, "oracle_tail", cfg.format, &t, &r.tails)?,
    ])
}
