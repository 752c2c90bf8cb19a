//! Command-line interface. Exit codes: `0` success, `2` bad config or
//! usage, `3` resource or IO failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use sbc_core::oracle::OracleBudget;
use sbc_core::Theorem;

use crate::audit;
use crate::config::{ConfigError, ExperimentConfig, Format};
use crate::figures::{self, Figure, FigureOptions};
use crate::output;
use crate::runner::{self, AppError, Result, TailRow};

#[derive(Debug, Parser)]
#[command(name = "sbc", version, about = "Simulate stochastic bounded confidence dynamics and check concentration bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Config file; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of trajectories.
    #[arg(long)]
    pub n: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one seeded trajectory.
    Simulate(Common),
    /// Estimate tails at the reported times and compare with the bound.
    Tail(Common),
    /// Trajectory, tail table and moments in one go.
    Run(Common),
    /// Evaluate a bound at the reported times and print JSON.
    Bound {
        #[command(flatten)]
        common: Common,
        /// Bound id, e.g. two_agent_bounded; defaults to the config's bound.
        #[arg(long)]
        theorem: Option<String>,
        /// Fixed threshold instead of k(t).
        #[arg(long)]
        k: Option<f64>,
    },
    /// Compare each link of the bound chain with simulation.
    Audit(Common),
    /// Regenerate the data behind a reference figure.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        common: Common,
        /// Also write SVG line plots.
        #[arg(long)]
        svg: bool,
    },
    /// Exact law for lattice noise.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Largest number of lattice atoms kept.
        #[arg(long, default_value_t = sbc_core::oracle::DEFAULT_ATOM_BUDGET)]
        max_atoms: usize,
    },
}

const THEOREMS: [Theorem; 10] = [
    Theorem::TwoAgentBounded,
    Theorem::TwoAgentSubGaussian,
    Theorem::BistarFollower,
    Theorem::SimplifiedBounded,
    Theorem::SimplifiedSubGaussian,
    Theorem::SimplifiedBistarFollower,
    Theorem::SimplifiedBistarCross,
    Theorem::EnvelopeViolationLoose,
    Theorem::EnvelopeViolationTight,
    Theorem::Simplified,
];

fn parse_theorem(id: &str) -> Result<Theorem> {
    THEOREMS.into_iter().find(|t| t.id() == id).ok_or_else(|| {
        let known: Vec<&str> = THEOREMS.iter().map(|t| t.id()).collect();
        AppError::Usage(format!("unknown bound {id:?}; expected one of {}", known.join(", ")))
    })
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        line: None,
        key: path.display().to_string(),
        message: format!("cannot read config: {e}"),
    })?;
    Ok(ExperimentConfig::parse(&text)?)
}

/// The config file with the command-line overrides applied.
pub fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => read_config(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(n) = common.n {
        if n == 0 {
            return Err(AppError::Usage(String::from("--n must be positive")));
        }
        cfg.n = n;
    }
    if let Some(o) = &common.out {
        cfg.out_dir = o.clone();
    }
    if let Some(f) = common.format {
        cfg.format = f.into();
    }
    if let Some(w) = common.workers {
        cfg.workers = w;
    }
    Ok(cfg)
}

fn report_files(w: &mut impl Write, files: &[PathBuf]) -> std::io::Result<()> {
    for f in files {
        writeln!(w, "wrote {}", f.display())?;
    }
    Ok(())
}

/// For each time: upper confidence limit against the clamped bound.
pub fn domination_summary(w: &mut impl Write, rows: &[TailRow]) -> std::io::Result<()> {
    for r in rows {
        let p = &r.estimate.exceed;
        match (&r.bound, r.dominated) {
            (Some(b), Some(d)) => {
                let note = if !b.applicable {
                    " (preconditions fail)"
                } else if b.vacuous {
                    " (vacuous)"
                } else {
                    ""
                };
                writeln!(
                    w,
                    "t={} k={:.4} ci_high={:.6e} bound={:.6e}{} {}",
                    r.estimate.t,
                    r.estimate.k,
                    p.ci_high,
                    b.clamped,
                    note,
                    if d { "pass" } else { "FAIL" }
                )?;
            }
            _ => writeln!(w, "t={} k={:.4} ci_high={:.6e} no bound", r.estimate.t, r.estimate.k, p.ci_high)?,
        }
    }
    Ok(())
}

/// Runs a parsed command, writing progress to `w`.
pub fn execute(cli: Cli, w: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Simulate(c) => {
            let files = runner::simulate(&load(&c)?)?;
            report_files(w, &files)?;
        }
        Command::Tail(c) => {
            let (rows, file) = runner::tail(&load(&c)?)?;
            domination_summary(w, &rows)?;
            report_files(w, &[file])?;
        }
        Command::Run(c) => {
            let (rows, files) = runner::run(&load(&c)?)?;
            domination_summary(w, &rows)?;
            report_files(w, &files)?;
        }
        Command::Bound { common, theorem, k } => {
            let cfg = load(&common)?;
            let th = theorem.as_deref().map(parse_theorem).transpose()?;
            let records = runner::bound_records(&cfg, th, k)?;
            let text = serde_json::to_string_pretty(&records).map_err(std::io::Error::other)?;
            writeln!(w, "{text}")?;
        }
        Command::Audit(c) => {
            let cfg = load(&c)?;
            let engine = runner::engine_for(&cfg)?;
            let rows = audit::audit(&engine, &cfg)?;
            let summary = audit::summarize(&rows);
            let file = output::write_either(Path::new(&cfg.out_dir), "audit", cfg.format, &audit::audit_table(&rows), &rows)?;
            for r in &rows {
                writeln!(w, "t={} {} ({}): {}", r.t, r.link, r.theorem, r.status.label())?;
            }
            writeln!(
                w,
                "{} links: {} pass, {} trivial, {} inapplicable, {} inconclusive, {} fail",
                summary.rows, summary.passed, summary.trivial, summary.inapplicable, summary.inconclusive, summary.failed
            )?;
            if let Some((link, t, gap)) = summary.loosest {
                writeln!(w, "loosest link: {link} at t={t}, bound exceeds the upper confidence limit by a factor e^{gap:.3}")?;
            }
            writeln!(w, "{}", if summary.all_ok { "audit: all links hold" } else { "audit: some links do not hold" })?;
            report_files(w, &[file])?;
        }
        Command::Reproduce { figure, common, svg } => {
            let base = load(&common)?;
            let opts = FigureOptions {
                n: common.n.unwrap_or(FigureOptions::default().n),
                seed: base.seed,
                workers: base.workers,
                out_dir: base.out_dir,
                format: base.format,
                svg,
            };
            let out = figures::reproduce(figure, &opts)?;
            for s in &out.summary {
                writeln!(w, "{s}")?;
            }
            report_files(w, &out.files)?;
        }
        Command::Oracle { common, max_atoms } => {
            let cfg = load(&common)?;
            let budget = OracleBudget { max_atoms, ..OracleBudget::default() };
            let report = runner::oracle_report(&cfg, budget)?;
            for &(t, k, p) in &report.tails {
                writeln!(w, "t={t} k={k:.4} exact_tail={p:.12e}")?;
            }
            writeln!(w, "pruned mass {:.3e}", report.pruned_mass)?;
            report_files(w, &runner::write_oracle(&cfg, &report)?)?;
        }
    }
    Ok(())
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(if code == 0 { out as &mut dyn Write } else { err as &mut dyn Write }, "{}", e.render());
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_theorem_id_parses() {
        for t in THEOREMS {
            assert_eq!(parse_theorem(t.id()).unwrap(), t);
        }
        assert_eq!(parse_theorem("nope").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(main_with(["sbc", "frobnicate"], &mut o, &mut e), 2);
        assert_eq!(main_with(["sbc", "reproduce", "fig9"], &mut o, &mut e), 2);
        assert_eq!(main_with(["sbc", "--help"], &mut o, &mut e), 0);
    }
}
