//! Evaluates the analytical bound that goes with a configured experiment.

use serde::Serialize;

use sbc_core::bounds::{
    self, BoundError, BoundResult, Check, EnvelopeEvent, SimplifiedForm, Theorem, ValidityInputs,
};

use crate::config::ExperimentConfig;

/// A bound whose expression is undefined for the inputs: `+inf` (no
/// information) with the violated precondition as a failed check.
fn undefined(theorem: Theorem, e: BoundError) -> BoundResult {
    let (name, detail) = match e {
        BoundError::Precondition { name, detail } => (name, detail),
        other @ BoundError::GammaPole { .. } => ("gamma_domain", other.to_string()),
    };
    BoundResult::from_log(theorem, f64::INFINITY, vec![Check::new(name, false, detail)])
}

/// Decay exponent of a simplified form: `ε` for two agents, `ς` for bistar.
pub fn simplified_exponent(cfg: &ExperimentConfig, theorem: Theorem) -> f64 {
    match theorem {
        Theorem::SimplifiedBistarFollower | Theorem::SimplifiedBistarCross => bounds::bistar_exponent(&cfg.schedule),
        _ => cfg.schedule.epsilon,
    }
}

/// The bound for `P(|D(t)| >= k)` under the config.
pub fn bound_for(cfg: &ExperimentConfig, theorem: Theorem, t: u64, k: f64) -> BoundResult {
    let noise = cfg.noise_model();
    let half_width = noise.half_width();
    let g = &cfg.influence;
    let p = &cfg.schedule;
    let no_bounded_noise = || {
        undefined(
            theorem,
            BoundError::Precondition { name: "bounded_noise", detail: String::from("noise support is unbounded") },
        )
    };
    match theorem {
        Theorem::TwoAgentBounded => match half_width {
            Some(d) => bounds::bound_theorem_bounded(t, k, d, g),
            None => no_bounded_noise(),
        },
        Theorem::TwoAgentSubGaussian => bounds::bound_theorem_sg(t, k, noise.sub_gaussian_sigma(), p, g)
            .unwrap_or_else(|e| undefined(theorem, e)),
        Theorem::BistarFollower => match half_width {
            Some(d) => bounds::bound_theorem_bistar(t, k, d, g, &cfg.follower_influence, p)
                .unwrap_or_else(|e| undefined(theorem, e)),
            None => no_bounded_noise(),
        },
        Theorem::EnvelopeViolationLoose => bounds::bound_envelope_violation(EnvelopeEvent::Loose, t, p, g),
        Theorem::EnvelopeViolationTight => bounds::bound_envelope_violation(EnvelopeEvent::Tight, t, p, g),
        Theorem::SimplifiedBounded
        | Theorem::SimplifiedSubGaussian
        | Theorem::SimplifiedBistarFollower
        | Theorem::SimplifiedBistarCross
        | Theorem::Simplified => {
            let e = simplified_exponent(cfg, theorem);
            let r = bounds::simplified_bound(t as f64, p.c1, p.c2, e, SimplifiedForm::Exponential);
            let mut validity = r.validity;
            if theorem != Theorem::Simplified {
                let inputs = ValidityInputs {
                    influence: g,
                    follower_influence: Some(&cfg.follower_influence),
                    half_width,
                    sigma: noise.sub_gaussian_sigma(),
                    params: p,
                    t: Some(t),
                };
                validity.extend(bounds::validity_report(theorem, &inputs));
            }
            BoundResult::from_log(theorem, r.log_value, validity)
        }
    }
}

/// JSON shape of a bound evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRecord {
    pub theorem: &'static str,
    pub t: u64,
    pub k: f64,
    pub log_value: f64,
    /// `None` when the value overflows or is infinite.
    pub value: Option<f64>,
    pub clamped: f64,
    pub vacuous: bool,
    pub applicable: bool,
    pub validity: Vec<Check>,
}

impl BoundRecord {
    pub fn new(r: &BoundResult, t: u64, k: f64) -> Self {
        let v = r.value();
        Self {
            theorem: r.theorem.id(),
            t,
            k,
            log_value: r.log_value,
            value: v.is_finite().then_some(v),
            clamped: r.clamped_value,
            vacuous: r.vacuous,
            applicable: r.applicable(),
            validity: r.validity.clone(),
        }
    }
}

/// Names of failed checks, `;`-separated, for CSV columns.
pub fn failed_names(r: &BoundResult) -> String {
    r.failed_checks().map(|c| c.name).collect::<Vec<_>>().join(";")
}
