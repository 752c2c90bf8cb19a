//! Link-by-link comparison of simulation against the bound chain: the
//! moment generating function majorant, the envelope-violation bound and
//! the final tail bound, each at every reported time.

use serde::Serialize;

use sbc_core::bounds::{self, BoundError, EnvelopeEvent, LambdaRule, MgfChain, Theorem};
use sbc_core::PathKind;

use crate::config::{BoundChoice, ExperimentConfig, SystemKind};
use crate::engine::{self, Engine, TailQuery};
use crate::evaluate;
use crate::output::{num, Table};
use crate::runner::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkStatus {
    /// The upper confidence limit is at or below the bound.
    Pass,
    /// The bound is `+inf`, so it holds whatever the estimate.
    Trivial,
    /// The confidence interval straddles the bound.
    Inconclusive,
    /// The lower confidence limit exceeds the bound.
    Fail,
    /// A precondition of the bound fails; no comparison is made.
    Inapplicable,
}

impl LinkStatus {
    pub fn label(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Trivial => "trivial",
            Self::Inconclusive => "inconclusive",
            Self::Fail => "fail",
            Self::Inapplicable => "inapplicable",
        }
    }

    pub fn is_ok(self) -> bool {
        !matches!(self, Self::Fail | Self::Inconclusive)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditRow {
    pub t: u64,
    pub link: &'static str,
    pub theorem: &'static str,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub log_bound: f64,
    /// The bound, clamped to `1` for probabilities.
    pub bound: f64,
    pub applicable: bool,
    pub failed_checks: String,
    pub status: LinkStatus,
    /// `ln(bound / ci_high)` for passing rows: how loose the link is.
    pub log_gap: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn row(
    t: u64,
    link: &'static str,
    theorem: &'static str,
    (estimate, ci_low, ci_high): (f64, f64, f64),
    log_bound: f64,
    probability: bool,
    applicable: bool,
    failed_checks: String,
) -> AuditRow {
    let raw = log_bound.exp();
    let bound = if probability { raw.min(1.0) } else { raw };
    let status = if log_bound == f64::INFINITY {
        LinkStatus::Trivial
    } else if !applicable {
        LinkStatus::Inapplicable
    } else if bound == 0.0 {
        if estimate == 0.0 { LinkStatus::Pass } else { LinkStatus::Fail }
    } else if ci_high <= bound {
        LinkStatus::Pass
    } else if ci_low > bound {
        LinkStatus::Fail
    } else {
        LinkStatus::Inconclusive
    };
    let log_gap = (status == LinkStatus::Pass && ci_high > 0.0 && bound > 0.0).then(|| bound.ln() - ci_high.ln());
    AuditRow { t, link, theorem, estimate, ci_low, ci_high, log_bound, bound, applicable, failed_checks, status, log_gap }
}

fn failed(checks: &[sbc_core::Check]) -> String {
    checks.iter().filter(|c| !c.satisfied).map(|c| c.name).collect::<Vec<_>>().join(";")
}

/// The theorem audited for the tail link: the configured one, or the sharp
/// theorem for the observed path.
pub fn tail_theorem(cfg: &ExperimentConfig) -> Theorem {
    if let BoundChoice::Theorem(t) = cfg.bound {
        return t;
    }
    match (cfg.path, cfg.noise_model().half_width()) {
        (PathKind::Leader, Some(_)) => Theorem::TwoAgentBounded,
        (PathKind::Leader, None) => Theorem::TwoAgentSubGaussian,
        (PathKind::Follower | PathKind::RivalFollower, _) => Theorem::BistarFollower,
        (PathKind::Cross, _) => Theorem::SimplifiedBistarCross,
    }
}

fn mgf_row(engine: &Engine, cfg: &ExperimentConfig, t: u64) -> Result<AuditRow> {
    let noise = cfg.noise_model();
    let g = &cfg.influence;
    let p = &cfg.schedule;
    let (lambda, chain, condition, id) = match noise.half_width() {
        Some(d) => (
            bounds::lambda_star(LambdaRule::Bounded { half_width: d, influence: g }, t),
            MgfChain::Bounded { half_width: d, influence: g },
            None,
            "mgf_chain_bounded",
        ),
        None => {
            let sigma = noise.sub_gaussian_sigma();
            let (envelope_scale, beta_prime) = (p.envelope_scale, p.beta_prime);
            (
                bounds::lambda_star(LambdaRule::SubGaussian { sigma, envelope_scale, beta_prime, influence: g }, t),
                MgfChain::SubGaussian { sigma, envelope_scale, beta_prime, zeta: p.zeta, influence: g },
                Some((EnvelopeEvent::Loose, p)),
                "mgf_chain_sub_gaussian",
            )
        }
    };
    let (log_bound, applicable, checks) = match bounds::mgf_chain_bound(chain, lambda, t) {
        Ok(v) => (v, true, String::new()),
        Err(BoundError::GammaPole { .. }) => (f64::INFINITY, true, String::new()),
        Err(BoundError::Precondition { name, .. }) => (f64::INFINITY, false, name.to_string()),
    };
    if !applicable {
        return Ok(AuditRow {
            t,
            link: "mgf",
            theorem: id,
            estimate: f64::NAN,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
            log_bound,
            bound: f64::INFINITY,
            applicable,
            failed_checks: checks,
            status: LinkStatus::Inapplicable,
            log_gap: None,
        });
    }
    let m = engine::empirical_mgf(engine, &cfg.system(), PathKind::Leader, lambda, t, condition, cfg.n, cfg.seed, cfg.confidence)?;
    let i = m.interval;
    Ok(row(t, "mgf", id, (i.estimate, i.ci_low, i.ci_high), log_bound, false, true, checks))
}

fn envelope_row(engine: &Engine, cfg: &ExperimentConfig, t: u64) -> Result<AuditRow> {
    let (event, theorem) = match cfg.system {
        SystemKind::TwoAgent => (EnvelopeEvent::Loose, Theorem::EnvelopeViolationLoose),
        SystemKind::Bistar => (EnvelopeEvent::Tight, Theorem::EnvelopeViolationTight),
    };
    let b = evaluate::bound_for(cfg, theorem, t, 0.0);
    let e = engine::estimate_envelope_violation(engine, &cfg.system(), event, &cfg.schedule, t, cfg.n, cfg.seed, cfg.confidence)?;
    let v = e.violation;
    Ok(row(t, "envelope", theorem.id(), (v.p_hat, v.ci_low, v.ci_high), b.log_value, true, b.applicable(), failed(&b.validity)))
}

/// Every link at every reported time `t >= 1`.
pub fn audit(engine: &Engine, cfg: &ExperimentConfig) -> Result<Vec<AuditRow>> {
    let times: Vec<u64> = cfg.report_times().into_iter().filter(|&t| t >= 1).collect();
    let theorem = tail_theorem(cfg);
    let queries: Vec<TailQuery> = times.iter().map(|&t| TailQuery { t, k: cfg.threshold(t) }).collect();
    let tails = engine::estimate_tails(engine, &cfg.system(), cfg.path, &queries, cfg.n, cfg.seed, cfg.confidence)?;
    let mut rows = Vec::new();
    for (&t, est) in times.iter().zip(&tails) {
        rows.push(mgf_row(engine, cfg, t)?);
        rows.push(envelope_row(engine, cfg, t)?);
        let b = evaluate::bound_for(cfg, theorem, t, est.k);
        let p = est.exceed;
        rows.push(row(t, "tail", theorem.id(), (p.p_hat, p.ci_low, p.ci_high), b.log_value, true, b.applicable(), failed(&b.validity)));
    }
    Ok(rows)
}

/// Overall verdict and the loosest passing link.
#[derive(Debug, Clone, Serialize)]
pub struct AuditSummary {
    pub rows: usize,
    pub passed: usize,
    pub trivial: usize,
    pub inapplicable: usize,
    pub inconclusive: usize,
    pub failed: usize,
    pub all_ok: bool,
    /// `(link, t, log gap)` with the largest gap.
    pub loosest: Option<(&'static str, u64, f64)>,
}

pub fn summarize(rows: &[AuditRow]) -> AuditSummary {
    let count = |s: LinkStatus| rows.iter().filter(|r| r.status == s).count();
    let loosest = rows
        .iter()
        .filter_map(|r| r.log_gap.filter(|g| g.is_finite()).map(|g| (r.link, r.t, g)))
        .max_by(|a, b| a.2.total_cmp(&b.2));
    AuditSummary {
        rows: rows.len(),
        passed: count(LinkStatus::Pass),
        trivial: count(LinkStatus::Trivial),
        inapplicable: count(LinkStatus::Inapplicable),
        inconclusive: count(LinkStatus::Inconclusive),
        failed: count(LinkStatus::Fail),
        all_ok: rows.iter().all(|r| r.status.is_ok()),
        loosest,
    }
}

pub const AUDIT_HEADER: [&str; 12] = [
    "t",
    "link",
    "theorem",
    "estimate",
    "ci_low",
    "ci_high",
    "log_bound",
    "bound",
    "applicable",
    "failed_checks",
    "status",
    "log_gap",
];

pub fn audit_table(rows: &[AuditRow]) -> Table {
    let mut t = Table::new(&AUDIT_HEADER);
    for r in rows {
        t.push(vec![
            r.t.to_string(),
            r.link.to_string(),
            r.theorem.to_string(),
            num(r.estimate),
            num(r.ci_low),
            num(r.ci_high),
            num(r.log_bound),
            num(r.bound),
            r.applicable.to_string(),
            r.failed_checks.clone(),
            r.status.label().to_string(),
            r.log_gap.map(num).unwrap_or_default(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn status(est: (f64, f64, f64), log_bound: f64, applicable: bool) -> LinkStatus {
        row(1, "x", "x", est, log_bound, true, applicable, String::new()).status
    }

    #[test]
    fn status_rules() {
        assert_eq!(status((0.1, 0.05, 0.2), f64::INFINITY, false), LinkStatus::Trivial);
        assert_eq!(status((0.1, 0.05, 0.2), 0.0, false), LinkStatus::Inapplicable);
        assert_eq!(status((0.1, 0.05, 0.2), 0.3f64.ln(), true), LinkStatus::Pass);
        assert_eq!(status((0.1, 0.05, 0.2), 0.1f64.ln(), true), LinkStatus::Inconclusive);
        assert_eq!(status((0.1, 0.05, 0.2), 0.01f64.ln(), true), LinkStatus::Fail);
        assert_eq!(status((0.0, 0.0, 0.001), f64::NEG_INFINITY, true), LinkStatus::Pass);
        assert_eq!(status((0.01, 0.0, 0.05), f64::NEG_INFINITY, true), LinkStatus::Fail);
    }

    #[test]
    fn loosest_link_has_largest_gap() {
        let rows = vec![
            row(1, "a", "x", (0.1, 0.05, 0.1), 0.5f64.ln(), true, true, String::new()),
            row(2, "b", "x", (0.01, 0.0, 0.01), 0.5f64.ln(), true, true, String::new()),
        ];
        let s = summarize(&rows);
        assert!(s.all_ok);
        assert_eq!(s.loosest.map(|l| (l.0, l.1)), Some(("b", 2)));
    }
}
