//! Data (and optional SVG plots) for the four reference figures: two-agent
//! paths for three influence decay rates, the two-agent tail against its
//! bounds, and the bistar follower and cross-group tails against theirs.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use sbc_core::bounds::{self, SimplifiedForm, Theorem};
use sbc_core::{InfluenceFunction, PathKind};

use crate::config::{BoundChoice, ExperimentConfig, Format, SystemKind};
use crate::engine::{self, quantile, TailQuery};
use crate::evaluate;
use crate::output::{self, flag, num, Table};
use crate::runner::{engine_for, single_path, Result};
use crate::svg::{Plot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Two-agent paths and quantile bands for δ = 0.2, 0.5, 0.8.
    Fig2a,
    /// Two-agent tail against the simplified and sharp bounds, δ = 0.5.
    Fig2b,
    /// Follower-to-leader tail in the bistar network.
    Fig3a,
    /// Cross-group follower tail in the bistar network.
    Fig3b,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig3a => "fig3a",
            Self::Fig3b => "fig3b",
        }
    }
}

/// Noise half-width of the reference runs.
pub const HALF_WIDTH: f64 = 20.0;
/// Leader decay rates of the path figure.
pub const PATH_DELTAS: [f64; 3] = [0.2, 0.5, 0.8];
/// Leader decay rate of the tail figures.
pub const DELTA: f64 = 0.5;
/// Follower decay rate of the bistar figures.
pub const DELTA_TILDE: f64 = 0.55;
pub const PATH_HORIZON: u64 = 1000;
pub const TAIL_HORIZON: u64 = 400;
/// `(c1, c2)` of the simplified two-agent curve.
pub const TWO_AGENT_CONSTANTS: (f64, f64) = (1.0, 0.5);
/// `(c1, c2)` of the simplified bistar curves.
pub const BISTAR_CONSTANTS: (f64, f64) = (1.0, 0.8);

/// Run-level settings shared by every figure.
#[derive(Debug, Clone)]
pub struct FigureOptions {
    pub n: u64,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: String,
    pub format: Format,
    pub svg: bool,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self { n: 10_000, seed: 0, workers: 0, out_dir: String::from("out"), format: Format::Csv, svg: false }
    }
}

/// Two-agent config with `G(x) = 1 / (1 + x^(1 - δ))`, uniform noise on
/// `[-20, 20]`, `β = ε = δ/4`.
pub fn two_agent_config(delta: f64, opts: &FigureOptions) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        influence: InfluenceFunction::RationalPowerLaw { g0: 1.0, alpha: 1.0 - delta },
        n: opts.n,
        seed: opts.seed,
        workers: opts.workers,
        out_dir: opts.out_dir.clone(),
        format: opts.format,
        ..ExperimentConfig::default()
    };
    cfg.schedule.beta = delta / 4.0;
    cfg.schedule.epsilon = delta / 4.0;
    (cfg.schedule.c1, cfg.schedule.c2) = TWO_AGENT_CONSTANTS;
    cfg
}

/// Bistar config: leader `δ = 0.5`, follower `G̃(x) = 1 / (1 + x^(2/3 - δ̃))`
/// with `δ̃ = 0.55`, `β = δ/4`, `β̃ = δ̃/10`.
pub fn bistar_config(path: PathKind, opts: &FigureOptions) -> ExperimentConfig {
    let mut cfg = two_agent_config(DELTA, opts);
    cfg.system = SystemKind::Bistar;
    cfg.path = path;
    cfg.follower_influence = InfluenceFunction::RationalPowerLaw { g0: 1.0, alpha: 2.0 / 3.0 - DELTA_TILDE };
    cfg.schedule.beta_tilde = DELTA_TILDE / 10.0;
    (cfg.schedule.c1, cfg.schedule.c2) = BISTAR_CONSTANTS;
    cfg.bound = BoundChoice::Theorem(match path {
        PathKind::Cross => Theorem::SimplifiedBistarCross,
        _ => Theorem::SimplifiedBistarFollower,
    });
    cfg
}

/// Files written and a one-line verdict per figure.
#[derive(Debug, Clone, Default)]
pub struct FigureOutput {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    /// For tail figures: every `ci_high` lies at or below the simplified curve.
    pub below_bound: Option<bool>,
}

pub fn reproduce(fig: Figure, opts: &FigureOptions) -> Result<FigureOutput> {
    let dir = Path::new(&opts.out_dir).join(fig.name());
    match fig {
        Figure::Fig2a => path_figure(&dir, opts),
        Figure::Fig2b => tail_figure(&dir, fig, &two_agent_config(DELTA, opts), opts),
        Figure::Fig3a => tail_figure(&dir, fig, &bistar_config(PathKind::Follower, opts), opts),
        Figure::Fig3b => tail_figure(&dir, fig, &bistar_config(PathKind::Cross, opts), opts),
    }
}

const BAND_QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

fn path_figure(dir: &Path, opts: &FigureOptions) -> Result<FigureOutput> {
    let mut out = FigureOutput::default();
    let times: Vec<u64> = (0..=PATH_HORIZON).collect();
    for delta in PATH_DELTAS {
        let mut cfg = two_agent_config(delta, opts);
        cfg.horizon = PATH_HORIZON;
        let engine = engine_for(&cfg)?;
        let path = single_path(&cfg);
        let cols = engine::path_sample(&engine, &cfg.system(), PathKind::Leader, &times, cfg.n, cfg.seed)?;
        let mut table = Table::new(&["t", "y", "envelope", "q05", "q25", "q50", "q75", "q95"]);
        let mut bands = vec![Vec::new(); BAND_QUANTILES.len()];
        for (s, mut col) in path.iter().zip(cols) {
            col.sort_by(f64::total_cmp);
            let env = cfg.threshold(s.t);
            let mut row = vec![s.t.to_string(), num(s.y), num(env)];
            for (j, &q) in BAND_QUANTILES.iter().enumerate() {
                let v = quantile(&col, q);
                bands[j].push((s.t as f64, v));
                row.push(num(v));
            }
            table.push(row);
        }
        let name = format!("fig2a_delta{delta}");
        out.files.push(output::write_either(dir, &name, cfg.format, &table, &table.rows)?);
        if opts.svg {
            let mut series = vec![
                Series::new("path", path.iter().map(|s| (s.t as f64, s.y)).collect()),
                Series::new("envelope", path.iter().map(|s| (s.t as f64, cfg.threshold(s.t))).collect()).dashed(),
                Series::new("-envelope", path.iter().map(|s| (s.t as f64, -cfg.threshold(s.t))).collect()).dashed(),
            ];
            series.push(Series::new("q05", bands[0].clone()));
            series.push(Series::new("q95", bands[4].clone()));
            let plot = Plot {
                title: format!("two-agent difference, δ = {delta}"),
                x_label: String::from("t"),
                y_label: String::from("Y(t)"),
                log_y: false,
                series,
            };
            out.files.push(write_svg(dir, &name, &plot)?);
        }
        out.summary.push(format!("δ = {delta}: {} steps, {} paths in the bands", PATH_HORIZON, cfg.n));
    }
    Ok(out)
}

#[derive(Serialize)]
struct TailFigureRow {
    t: u64,
    k: f64,
    hits: u64,
    n: u64,
    p_hat: f64,
    ci_low: f64,
    ci_high: f64,
    simplified_bound: f64,
    sharp_bound: f64,
    sharp_applicable: bool,
    below_simplified: bool,
}

/// The sharp theorem drawn next to the simplified curve.
fn sharp_theorem(cfg: &ExperimentConfig) -> Theorem {
    match cfg.path {
        PathKind::Leader => Theorem::TwoAgentBounded,
        _ => Theorem::BistarFollower,
    }
}

fn tail_figure(dir: &Path, fig: Figure, cfg: &ExperimentConfig, opts: &FigureOptions) -> Result<FigureOutput> {
    let engine = engine_for(cfg)?;
    let times: Vec<u64> = (1..=TAIL_HORIZON / 10).map(|i| 10 * i).collect();
    let queries: Vec<TailQuery> = times.iter().map(|&t| TailQuery { t, k: cfg.threshold(t) }).collect();
    let est = engine::estimate_tails(&engine, &cfg.system(), cfg.path, &queries, cfg.n, cfg.seed, cfg.confidence)?;
    let simplified = match cfg.system {
        SystemKind::TwoAgent => Theorem::SimplifiedBounded,
        SystemKind::Bistar => cfg.resolved_bound().unwrap_or(Theorem::SimplifiedBistarFollower),
    };
    let exponent = evaluate::simplified_exponent(cfg, simplified);
    let sharp = sharp_theorem(cfg);
    let rows: Vec<TailFigureRow> = est
        .iter()
        .map(|e| {
            let s = bounds::simplified_bound(e.t as f64, cfg.schedule.c1, cfg.schedule.c2, exponent, SimplifiedForm::Exponential);
            let b = evaluate::bound_for(cfg, sharp, e.t, e.k);
            let p = e.exceed;
            TailFigureRow {
                t: e.t,
                k: e.k,
                hits: p.hits,
                n: p.n,
                p_hat: p.p_hat,
                ci_low: p.ci_low,
                ci_high: p.ci_high,
                simplified_bound: s.clamped_value,
                sharp_bound: b.clamped_value,
                sharp_applicable: b.applicable(),
                below_simplified: p.ci_high <= s.clamped_value,
            }
        })
        .collect();
    let mut table = Table::new(&[
        "t",
        "k",
        "hits",
        "n",
        "p_hat",
        "ci_low",
        "ci_high",
        "simplified_bound",
        "sharp_bound",
        "sharp_applicable",
        "below_simplified",
    ]);
    for r in &rows {
        table.push(vec![
            r.t.to_string(),
            num(r.k),
            r.hits.to_string(),
            r.n.to_string(),
            num(r.p_hat),
            num(r.ci_low),
            num(r.ci_high),
            num(r.simplified_bound),
            num(r.sharp_bound),
            flag(r.sharp_applicable),
            flag(r.below_simplified),
        ]);
    }
    let mut out = FigureOutput::default();
    out.files.push(output::write_either(dir, fig.name(), cfg.format, &table, &rows)?);
    if opts.svg {
        let pts = |f: fn(&TailFigureRow) -> f64| rows.iter().map(|r| (r.t as f64, f(r))).collect::<Vec<_>>();
        let plot = Plot {
            title: format!("{} tail, P(|{}(t)| >= k(t))", fig.name(), cfg.path.label()),
            x_label: String::from("t"),
            y_label: String::from("probability"),
            log_y: true,
            series: vec![
                Series::new("empirical", pts(|r| r.p_hat)),
                Series::new("upper confidence", pts(|r| r.ci_high)).dashed(),
                Series::new("simplified bound", pts(|r| r.simplified_bound)),
                Series::new("sharp bound", pts(|r| r.sharp_bound)),
            ],
        };
        out.files.push(write_svg(dir, fig.name(), &plot)?);
    }
    let below = rows.iter().all(|r| r.below_simplified);
    out.below_bound = Some(below);
    out.summary.push(format!(
        "{}: {} times, upper confidence limit {} the simplified curve (c1 = {}, c2 = {})",
        fig.name(),
        rows.len(),
        if below { "below" } else { "NOT below" },
        cfg.schedule.c1,
        cfg.schedule.c2
    ));
    Ok(out)
}

fn write_svg(dir: &Path, name: &str, plot: &Plot) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}.svg"));
    std::fs::write(&path, plot.render())?;
    Ok(path)
}
