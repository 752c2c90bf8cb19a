//! Finite-time concentration bounds for the two-agent and bistar processes.
//!
//! Every evaluator works in log space and returns a [`BoundResult`]: the
//! natural log of the bound as stated (which may exceed one), the value
//! clamped to `[0, 1]`, and one [`Check`] per precondition. Preconditions
//! never abort an evaluation unless the arithmetic itself is undefined;
//! callers decide what to do with a bound whose checks fail.
//!
//! Notation used throughout:
//!
//! * `k = c t^(1/2 - β)` is the exceedance threshold, `k̃ = c t^(1/2 - β̃)`
//!   the follower threshold;
//! * `d_τ = D τ^(1/2 + β')` is the loose envelope (warm-up `h(t) = ⌊t^ζ⌋`);
//! * `d̄_τ = D τ^(1/2 - β)` is the tight leader envelope (warm-up
//!   `l(t) = ⌊t^ξ⌋`) and `d̃_t = 2 D t^(3/2)` the follower drift cap;
//! * `γ̄(λ) = 1 / (1 - λ² s² / 2)` majorizes the noise MGF.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::influence::InfluenceFunction;
use crate::math::{self, log_add_exp, LN_2};

/// Largest horizon a simulation run is expected to reach on one machine.
/// Preconditions that only hold beyond it are reported as infeasible.
pub const DESK_SCALE_MAX_T: f64 = 1e7;

/// Ratios within this distance of one use the arithmetic-series branch.
const RATIO_ONE_TOLERANCE: f64 = 1e-12;

/// Exponents closer to zero than this are treated as exactly zero.
const EXPONENT_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundError {
    /// `λ² s² >= 2`: the MGF majorant has a pole.
    GammaPole { lambda: f64, scale: f64 },
    /// A precondition without which the expression is undefined.
    Precondition { name: &'static str, detail: String },
}

impl fmt::Display for BoundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GammaPole { lambda, scale } => {
                write!(f, "λ = {lambda} with scale {scale} is outside λ²s² < 2")
            }
            Self::Precondition { name, detail } => write!(f, "precondition {name} violated: {detail}"),
        }
    }
}

/// Outcome of one precondition.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Check {
    pub name: &'static str,
    pub satisfied: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &'static str, satisfied: bool, detail: String) -> Self {
        Self { name, satisfied, detail }
    }
}

/// Which result a bound or a validity report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Theorem {
    /// Two agents, bounded noise, deterministic `|Y(t)| <= D t` envelope.
    TwoAgentBounded,
    /// Two agents, sub-Gaussian noise, conditioned on the loose envelope.
    TwoAgentSubGaussian,
    /// Leader/follower difference on the bistar graph.
    BistarFollower,
    /// `c1 t exp(-θ t^ε)` / `c1 exp(-c2 t^ε)` forms for bounded noise.
    SimplifiedBounded,
    /// The same forms for sub-Gaussian noise.
    SimplifiedSubGaussian,
    /// `c1 exp(-c2 t^ς)` for the leader/follower difference.
    SimplifiedBistarFollower,
    /// `c1 exp(-c2 t^ς)` for the cross-group follower difference.
    SimplifiedBistarCross,
    /// Probability that the loose envelope is left after warm-up.
    EnvelopeViolationLoose,
    /// Probability that the tight leader envelope is left after warm-up.
    EnvelopeViolationTight,
    /// A closed form evaluated without reference to a specific result.
    Simplified,
}

impl Theorem {
    pub fn id(self) -> &'static str {
        match self {
            Self::TwoAgentBounded => "two_agent_bounded",
            Self::TwoAgentSubGaussian => "two_agent_sub_gaussian",
            Self::BistarFollower => "bistar_follower",
            Self::SimplifiedBounded => "simplified_bounded",
            Self::SimplifiedSubGaussian => "simplified_sub_gaussian",
            Self::SimplifiedBistarFollower => "simplified_bistar_follower",
            Self::SimplifiedBistarCross => "simplified_bistar_cross",
            Self::EnvelopeViolationLoose => "envelope_violation_loose",
            Self::EnvelopeViolationTight => "envelope_violation_tight",
            Self::Simplified => "simplified",
        }
    }
}

/// A bound value with its validity report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundResult {
    pub theorem: Theorem,
    /// Natural log of the bound as stated. `+inf` when the expression
    /// divides by zero, `-inf` when it is exactly zero.
    pub log_value: f64,
    /// `min(1, bound)`.
    pub clamped_value: f64,
    /// The bound is at least one and carries no information.
    pub vacuous: bool,
    pub validity: Vec<Check>,
}

impl BoundResult {
    pub fn from_log(theorem: Theorem, log_value: f64, validity: Vec<Check>) -> Self {
        let clamped_value = if log_value >= 0.0 { 1.0 } else { math::exp(log_value) };
        Self { theorem, log_value, clamped_value, vacuous: log_value >= 0.0, validity }
    }

    /// Unclamped value; may overflow to `+inf`.
    pub fn value(&self) -> f64 {
        math::exp(self.log_value)
    }

    /// All preconditions hold.
    pub fn applicable(&self) -> bool {
        self.validity.iter().all(|c| c.satisfied)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.validity.iter().filter(|c| !c.satisfied)
    }

    pub fn with_theorem(mut self, theorem: Theorem) -> Self {
        self.theorem = theorem;
        self
    }
}

/// Exponents and constants of the threshold and envelope schedules.
///
/// The existence constants (`θ`, `c'`, `c1`, `c2`) have no canonical values;
/// they are inputs, and their known caps are reported as checks.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduleParams {
    /// Threshold scale `c` in `k = c t^(1/2 - β)`.
    pub c: f64,
    /// Leader threshold exponent `β` (also the tight envelope exponent).
    pub beta: f64,
    /// Follower threshold exponent `β̃`.
    pub beta_tilde: f64,
    /// Loose envelope exponent `β'`.
    pub beta_prime: f64,
    /// Loose warm-up exponent, `h(t) = ⌊t^ζ⌋`.
    pub zeta: f64,
    /// Tight warm-up exponent, `l(t) = ⌊t^ξ⌋`.
    pub xi: f64,
    /// Decay exponent `ε` of the simplified forms.
    pub epsilon: f64,
    pub theta: f64,
    /// Rate in the loose-envelope violation bound.
    pub c_prime: f64,
    pub c1: f64,
    pub c2: f64,
    /// Envelope scale `D`; the noise half-width for bounded noise.
    pub envelope_scale: f64,
}

impl ScheduleParams {
    /// Defaults used by the two-agent and bistar experiments with noise
    /// half-width `d`: `c = d / √3` (random-walk RMS per step),
    /// `β = 1/8`, `β̃ = 0.055`, `β' = 0.1`, `ζ = ξ = 1/2`, `ε = 1/8`,
    /// `θ = 1`, `c' = 1/2`, `c1 = 1`, `c2 = 1/2`.
    pub fn for_half_width(d: f64) -> Self {
        Self {
            c: d / math::sqrt(3.0),
            beta: 0.125,
            beta_tilde: 0.055,
            beta_prime: 0.1,
            zeta: 0.5,
            xi: 0.5,
            epsilon: 0.125,
            theta: 1.0,
            c_prime: 0.5,
            c1: 1.0,
            c2: 0.5,
            envelope_scale: d,
        }
    }

    /// `k = c t^(1/2 - β)`.
    pub fn leader_threshold(&self, t: f64) -> f64 {
        threshold(self.c, self.beta, t)
    }

    /// `k̃ = c t^(1/2 - β̃)`.
    pub fn follower_threshold(&self, t: f64) -> f64 {
        threshold(self.c, self.beta_tilde, t)
    }

    /// `d_τ = D τ^(1/2 + β')`.
    pub fn loose_envelope(&self, tau: f64) -> f64 {
        self.envelope_scale * math::pow(tau, 0.5 + self.beta_prime)
    }

    /// `d̄_τ = D τ^(1/2 - β)`.
    pub fn tight_envelope(&self, tau: f64) -> f64 {
        self.envelope_scale * math::pow(tau, 0.5 - self.beta)
    }

    /// `d̃_t = 2 D t^(3/2)`.
    pub fn follower_drift_cap(&self, t: f64) -> f64 {
        2.0 * self.envelope_scale * math::pow(t, 1.5)
    }

    pub fn loose_warmup(&self, t: u64) -> u64 {
        warmup(t, self.zeta)
    }

    pub fn tight_warmup(&self, t: u64) -> u64 {
        warmup(t, self.xi)
    }

    /// Positivity of every constant that must be positive.
    pub fn positivity_checks(&self) -> Vec<Check> {
        let fields = [
            ("c_positive", self.c),
            ("beta_positive", self.beta),
            ("beta_tilde_positive", self.beta_tilde),
            ("beta_prime_positive", self.beta_prime),
            ("zeta_positive", self.zeta),
            ("xi_positive", self.xi),
            ("epsilon_positive", self.epsilon),
            ("theta_positive", self.theta),
            ("c_prime_positive", self.c_prime),
            ("c1_positive", self.c1),
            ("c2_positive", self.c2),
            ("envelope_scale_positive", self.envelope_scale),
        ];
        fields
            .iter()
            .map(|&(name, v)| Check::new(name, v > 0.0 && v.is_finite(), format!("value {v}")))
            .collect()
    }
}

/// `c t^(1/2 - β)`.
pub fn threshold(c: f64, beta: f64, t: f64) -> f64 {
    c * math::pow(t, 0.5 - beta)
}

/// `⌊t^exponent⌋`, with `0` at `t = 0`.
pub fn warmup(t: u64, exponent: f64) -> u64 {
    if t == 0 {
        return 0;
    }
    math::floor(math::pow(t as f64, exponent)) as u64
}

/// `γ̄(λ) = 1 / (1 - λ² s² / 2)`.
pub fn gamma_bar(lambda: f64, scale: f64) -> Result<f64, BoundError> {
    log_gamma_bar(lambda, scale).map(math::exp)
}

fn log_gamma_bar(lambda: f64, scale: f64) -> Result<f64, BoundError> {
    let q = 0.5 * lambda * lambda * scale * scale;
    if q < 1.0 {
        Ok(-math::log1p(-q))
    } else {
        Err(BoundError::GammaPole { lambda, scale })
    }
}

/// Which prescribed Chernoff parameter to use.
#[derive(Debug, Clone, Copy)]
pub enum LambdaRule<'a> {
    /// `√(2 G(D t)) / D`.
    Bounded { half_width: f64, influence: &'a InfluenceFunction },
    /// `√(2 G(d_t)) / σ` with `d_t = D t^(1/2 + β')`.
    SubGaussian { sigma: f64, envelope_scale: f64, beta_prime: f64, influence: &'a InfluenceFunction },
    /// `2 ln 2 / d̄_t` with `d̄_t = D t^(1/2 - β)`.
    Bistar { half_width: f64, beta: f64 },
}

pub fn lambda_star(rule: LambdaRule<'_>, t: u64) -> f64 {
    let t = t as f64;
    match rule {
        LambdaRule::Bounded { half_width, influence } => {
            math::sqrt(2.0 * influence.at(half_width * t)) / half_width
        }
        LambdaRule::SubGaussian { sigma, envelope_scale, beta_prime, influence } => {
            let d_t = envelope_scale * math::pow(t, 0.5 + beta_prime);
            math::sqrt(2.0 * influence.at(d_t)) / sigma
        }
        LambdaRule::Bistar { half_width, beta } => 2.0 * LN_2 / (half_width * math::pow(t, 0.5 - beta)),
    }
}

/// `ln Σ_{i<n} r^i` for `r >= 0`.
pub(crate) fn ln_geometric_sum(r: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    if r == 0.0 || n == 1 {
        return 0.0;
    }
    let nf = n as f64;
    let dr = r - 1.0;
    if math::abs(dr) < RATIO_ONE_TOLERANCE {
        return math::log(nf);
    }
    let lr = math::log1p(dr);
    if dr > 0.0 {
        nf * lr + math::log1p(-math::exp(-nf * lr)) - math::log(dr)
    } else {
        math::log(-math::expm1(nf * lr)) - math::log(-dr)
    }
}

/// `n ln r` with `0 ln 0 = 0`.
fn ln_power(r: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * math::ln(r)
    }
}

/// Which collapsed MGF recursion to evaluate.
#[derive(Debug, Clone, Copy)]
pub enum MgfChain<'a> {
    /// Majorant of `E_0[e^(λ Y(t))]` under bounded noise:
    /// `γ̄ Σ_{i<t} r^i + r^t` with `r = γ̄ (1 - G(D t))`.
    Bounded { half_width: f64, influence: &'a InfluenceFunction },
    /// Majorant of `E_0[e^(λ Y(t)) | A_{t-1}]` under sub-Gaussian noise:
    /// `γ̄ Σ_{i<t-h} r^i + exp(λ² σ² h / 2) r^(t-h)` with
    /// `r = γ̄ (1 - G(d_t))`.
    SubGaussian { sigma: f64, envelope_scale: f64, beta_prime: f64, zeta: f64, influence: &'a InfluenceFunction },
}

/// Natural log of the collapsed MGF majorant at `λ` and time `t`.
pub fn mgf_chain_bound(chain: MgfChain<'_>, lambda: f64, t: u64) -> Result<f64, BoundError> {
    match chain {
        MgfChain::Bounded { half_width, influence } => {
            let lg = log_gamma_bar(lambda, half_width)?;
            let g = influence.at(half_width * t as f64);
            let r = math::exp(lg) * (1.0 - g);
            Ok(log_add_exp(lg + ln_geometric_sum(r, t), ln_power(r, t)))
        }
        MgfChain::SubGaussian { sigma, envelope_scale, beta_prime, zeta, influence } => {
            let h = warmup(t, zeta);
            if h >= t {
                return Err(warmup_error(h, t));
            }
            let lg = log_gamma_bar(lambda, sigma)?;
            let d_t = envelope_scale * math::pow(t as f64, 0.5 + beta_prime);
            let r = math::exp(lg) * (1.0 - influence.at(d_t));
            let n = t - h;
            let head = 0.5 * lambda * lambda * sigma * sigma * h as f64;
            Ok(log_add_exp(lg + ln_geometric_sum(r, n), head + ln_power(r, n)))
        }
    }
}

fn warmup_error(w: u64, t: u64) -> BoundError {
    BoundError::Precondition { name: "warmup_before_t", detail: format!("warm-up {w} is not below t = {t}") }
}

fn decay_check(g: &InfluenceFunction, p: f64, name: &'static str) -> Check {
    let a = g.tail_exponent();
    Check::new(name, a < p, format!("tail exponent {a} must be below {p}"))
}

fn below_one_check(name: &'static str, g: f64, at: f64) -> Check {
    Check::new(name, g < 1.0, format!("G({at}) = {g} must be below 1"))
}

/// `(4 - 2 G0) / (1 - G0)`; infinite at `G0 = 1`.
fn cap_bounded(g0: f64) -> f64 {
    (4.0 - 2.0 * g0) / (1.0 - g0)
}

/// `2 (3 - 2 G0) / (1 - G0)`.
fn cap_sub_gaussian(g0: f64) -> f64 {
    2.0 * (3.0 - 2.0 * g0) / (1.0 - g0)
}

/// Upper bound on `c1` for the given result; `None` if it has no `c1`.
pub fn c1_cap(theorem: Theorem, g0: f64, follower_g0: Option<f64>) -> Option<f64> {
    let pair = |m: f64| {
        let gt = follower_g0.unwrap_or(g0);
        let (a, b) = (cap_bounded(g0), cap_bounded(gt));
        m * if a > b { a } else { b }
    };
    match theorem {
        Theorem::SimplifiedSubGaussian => Some(cap_sub_gaussian(g0)),
        Theorem::SimplifiedBounded | Theorem::BistarFollower | Theorem::EnvelopeViolationTight => {
            Some(cap_bounded(g0))
        }
        Theorem::SimplifiedBistarFollower => Some(pair(2.0)),
        Theorem::SimplifiedBistarCross => Some(pair(5.0)),
        _ => None,
    }
}

fn c1_check(theorem: Theorem, c1: f64, g0: f64, follower_g0: Option<f64>) -> Option<Check> {
    c1_cap(theorem, g0, follower_g0)
        .map(|cap| Check::new("c1_cap", c1 <= cap, format!("c1 = {c1} must not exceed {cap}")))
}

fn epsilon_check(epsilon: f64, max: f64) -> Check {
    let max = snap(max);
    Check::new(
        "epsilon_admissible",
        epsilon > 0.0 && epsilon <= max + EXPONENT_SNAP,
        format!("ε = {epsilon} must lie in (0, {max}]"),
    )
}

fn snap(x: f64) -> f64 {
    if math::abs(x) < EXPONENT_SNAP {
        0.0
    } else {
        x
    }
}

/// Which family of simplified bounds an exponent is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentRule {
    /// `ε <= δ/2 - β`.
    Bounded,
    /// `ε <= δ/6 - 2β/3`.
    SubGaussian,
    /// `ς = min(ε ξ, β - β̃)` with `ε = δ/2 - β` and `0 < ξ < 1 - 2β`.
    Bistar,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExponentReport {
    /// Largest admissible `ε`.
    pub epsilon: f64,
    /// The decay exponent of the simplified form: `ε`, or `ς` for the bistar rule.
    pub exponent: f64,
    pub nonvacuous: bool,
    pub checks: Vec<Check>,
}

/// Largest admissible decay exponent for the given stability margin `δ` and
/// threshold exponents. Non-positive exponents are reported, not rejected.
pub fn admissible_exponents(
    rule: ExponentRule,
    delta: f64,
    beta: f64,
    delta_tilde: f64,
    beta_tilde: f64,
    xi: f64,
) -> ExponentReport {
    let mut checks = Vec::new();
    checks.push(Check::new("delta_positive", delta > 0.0, format!("δ = {delta}")));
    checks.push(Check::new("beta_positive", beta > 0.0, format!("β = {beta}")));
    let (epsilon, exponent) = match rule {
        ExponentRule::Bounded => {
            let e = snap(delta / 2.0 - beta);
            (e, e)
        }
        ExponentRule::SubGaussian => {
            let e = snap(delta / 6.0 - 2.0 * beta / 3.0);
            (e, e)
        }
        ExponentRule::Bistar => {
            checks.push(Check::new("delta_tilde_positive", delta_tilde > 0.0, format!("δ̃ = {delta_tilde}")));
            checks.push(Check::new("beta_tilde_positive", beta_tilde > 0.0, format!("β̃ = {beta_tilde}")));
            let upper = 1.0 - 2.0 * beta;
            checks.push(Check::new("xi_range", xi > 0.0 && xi < upper, format!("ξ = {xi} must lie in (0, {upper})")));
            let e = snap(delta / 2.0 - beta);
            let a = e * xi;
            let b = snap(beta - beta_tilde);
            (e, if a < b { a } else { b })
        }
    };
    let nonvacuous = exponent > 0.0;
    checks.push(Check::new("exponent_positive", nonvacuous, format!("decay exponent {exponent}")));
    ExponentReport { epsilon, exponent, nonvacuous, checks }
}

/// Shape of a simplified bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SimplifiedForm {
    /// `c1 exp(-rate t^e)`.
    Exponential,
    /// `c1 t exp(-rate t^e)`.
    LinearPrefactor,
}

pub fn simplified_bound(t: f64, c1: f64, rate: f64, exponent: f64, form: SimplifiedForm) -> BoundResult {
    let checks = alloc::vec![
        Check::new("c1_positive", c1 > 0.0, format!("c1 = {c1}")),
        Check::new("rate_positive", rate > 0.0, format!("rate = {rate}")),
        Check::new("exponent_positive", exponent > 0.0, format!("exponent = {exponent}")),
    ];
    let prefactor = match form {
        SimplifiedForm::Exponential => 0.0,
        SimplifiedForm::LinearPrefactor => math::ln(t),
    };
    let log_value = math::ln(c1) + prefactor - rate * math::pow(t, exponent);
    BoundResult::from_log(Theorem::Simplified, log_value, checks)
}

/// Structural preconditions of the bounded-noise two-agent bound.
fn checks_two_agent_bounded(t: u64, half_width: f64, g: &InfluenceFunction) -> Vec<Check> {
    let at = half_width * t as f64;
    alloc::vec![
        decay_check(g, 1.0, "influence_decay"),
        below_one_check("influence_below_one_at_envelope", g.at(at), at),
    ]
}

/// `2 (t / (1 - G(D t)) + 1) exp(-√(2 G(D t)) k / D)`.
pub fn bound_theorem_bounded(t: u64, k: f64, half_width: f64, g: &InfluenceFunction) -> BoundResult {
    let mut checks = checks_two_agent_bounded(t, half_width, g);
    checks.push(Check::new("threshold_nonnegative", k >= 0.0, format!("k = {k}")));
    let gd = g.at(half_width * t as f64);
    let log_value = if gd >= 1.0 {
        f64::INFINITY
    } else {
        let lambda = math::sqrt(2.0 * gd) / half_width;
        LN_2 + math::log(t as f64 / (1.0 - gd) + 1.0) - lambda * k
    };
    BoundResult::from_log(Theorem::TwoAgentBounded, log_value, checks)
}

fn checks_two_agent_sub_gaussian(t: u64, params: &ScheduleParams, g: &InfluenceFunction) -> Vec<Check> {
    let a = g.tail_exponent();
    let delta = 2.0 - a;
    let d_t = params.loose_envelope(t as f64);
    let h = params.loose_warmup(t);
    alloc::vec![
        decay_check(g, 2.0, "influence_decay"),
        Check::new("zeta_range", params.zeta > 0.0 && params.zeta < 1.0, format!("ζ = {}", params.zeta)),
        Check::new(
            "warmup_restriction",
            params.zeta <= 1.0 - delta / 2.0,
            format!("ζ = {} must not exceed 1 - δ/2 = {} (δ = {delta})", params.zeta, 1.0 - delta / 2.0),
        ),
        Check::new("beta_prime_positive", params.beta_prime > 0.0, format!("β' = {}", params.beta_prime)),
        Check::new("c_prime_positive", params.c_prime > 0.0, format!("c' = {}", params.c_prime)),
        Check::new("warmup_before_t", h < t, format!("h(t) = {h}, t = {t}")),
        below_one_check("influence_below_one_at_envelope", g.at(d_t), d_t),
    ]
}

/// `2 (t - h) exp(-c' h^(2β')) + 2 [(t - h)/(1 - G(d_t)) + exp(G(d_t) h)] exp(-√(2 G(d_t)) k / σ)`.
pub fn bound_theorem_sg(
    t: u64,
    k: f64,
    sigma: f64,
    params: &ScheduleParams,
    g: &InfluenceFunction,
) -> Result<BoundResult, BoundError> {
    let h = params.loose_warmup(t);
    if h >= t {
        return Err(warmup_error(h, t));
    }
    let mut checks = checks_two_agent_sub_gaussian(t, params, g);
    checks.push(Check::new("threshold_nonnegative", k >= 0.0, format!("k = {k}")));
    let span = (t - h) as f64;
    let hf = h as f64;
    let envelope = LN_2 + math::log(span) - params.c_prime * math::pow(hf, 2.0 * params.beta_prime);
    let gd = g.at(params.loose_envelope(t as f64));
    let log_value = if gd >= 1.0 {
        f64::INFINITY
    } else {
        let lambda = math::sqrt(2.0 * gd) / sigma;
        let bracket = log_add_exp(math::log(span / (1.0 - gd)), gd * hf);
        log_add_exp(envelope, LN_2 + bracket - lambda * k)
    };
    Ok(BoundResult::from_log(Theorem::TwoAgentSubGaussian, log_value, checks))
}

/// Which envelope event a violation bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EnvelopeEvent {
    /// `A = ∩_{τ=h(t)}^{t-1} {|Y(τ)| <= D τ^(1/2 + β')}`.
    Loose,
    /// `B = ∩_{τ=l(t)}^{t-1} {|Y(τ)| <= D τ^(1/2 - β)}`.
    Tight,
}

fn checks_envelope_tight(t: u64, params: &ScheduleParams, g: &InfluenceFunction) -> Vec<Check> {
    let tf = t as f64;
    let d = params.envelope_scale;
    let at = d * tf;
    let lhs = math::sqrt(2.0 * g.at(at)) / d * params.tight_envelope(tf);
    let rhs = params.theta * math::pow(tf, params.epsilon);
    let delta = 1.0 - g.tail_exponent();
    let mut checks = alloc::vec![
        decay_check(g, 1.0, "influence_decay"),
        Check::new("xi_range", params.xi > 0.0 && params.xi < 1.0, format!("ξ = {}", params.xi)),
        epsilon_check(params.epsilon, delta / 2.0 - params.beta),
        Check::new("envelope_condition", lhs >= rhs, format!("√(2G(Dt))/D · d̄_t = {lhs} must be at least θ t^ε = {rhs}")),
    ];
    checks.extend(c1_check(Theorem::EnvelopeViolationTight, params.c1, g.g0(), None));
    checks
}

/// Upper bound on the probability that the envelope event fails by `t - 1`.
///
/// * loose: `2 (t - h) exp(-c' h^(2β'))`;
/// * tight: `c1 t² exp(-θ l^ε)`.
///
/// An empty window (`h(t) >= t` or `l(t) >= t`) gives exactly zero.
pub fn bound_envelope_violation(
    event: EnvelopeEvent,
    t: u64,
    params: &ScheduleParams,
    g: &InfluenceFunction,
) -> BoundResult {
    match event {
        EnvelopeEvent::Loose => {
            let h = params.loose_warmup(t);
            let checks = alloc::vec![
                Check::new("zeta_range", params.zeta > 0.0 && params.zeta < 1.0, format!("ζ = {}", params.zeta)),
                Check::new("beta_prime_positive", params.beta_prime > 0.0, format!("β' = {}", params.beta_prime)),
                Check::new("c_prime_positive", params.c_prime > 0.0, format!("c' = {}", params.c_prime)),
            ];
            let log_value = if h >= t {
                f64::NEG_INFINITY
            } else {
                LN_2 + math::log((t - h) as f64)
                    - params.c_prime * math::pow(h as f64, 2.0 * params.beta_prime)
            };
            BoundResult::from_log(Theorem::EnvelopeViolationLoose, log_value, checks)
        }
        EnvelopeEvent::Tight => {
            let l = params.tight_warmup(t);
            let checks = checks_envelope_tight(t, params, g);
            let log_value = if l >= t { f64::NEG_INFINITY } else { log_envelope_tight(t, l, params) };
            BoundResult::from_log(Theorem::EnvelopeViolationTight, log_value, checks)
        }
    }
}

fn log_envelope_tight(t: u64, l: u64, params: &ScheduleParams) -> f64 {
    math::ln(params.c1) + 2.0 * math::log(t as f64) - params.theta * math::pow(l as f64, params.epsilon)
}

fn checks_bistar(t: u64, params: &ScheduleParams, g: &InfluenceFunction, gt: &InfluenceFunction) -> Vec<Check> {
    let tf = t as f64;
    let l = params.tight_warmup(t);
    let d_bar = params.tight_envelope(tf);
    let d_tilde = params.follower_drift_cap(tf);
    let (g_bar, gt_tilde) = (g.at(d_bar), gt.at(d_tilde));
    let rational = matches!(g, InfluenceFunction::RationalPowerLaw { .. });
    let a = g.tail_exponent();
    let xi_upper = 1.0 - 2.0 * params.beta;
    let mut checks = alloc::vec![
        Check::new("rational_leader", rational, String::from("leader influence must be G0 / (1 + x^α)")),
        Check::new("leader_convexity", rational && a <= 1.0, format!("α = {a} must not exceed 1")),
        decay_check(gt, 2.0 / 3.0, "follower_decay"),
        Check::new("warmup_before_t", l < t, format!("l(t) = {l}, t = {t}")),
        Check::new(
            "xi_range",
            params.xi > 0.0 && params.xi < xi_upper,
            format!("ξ = {} must lie in (0, {xi_upper})", params.xi),
        ),
        Check::new("xi_drift_cap", params.xi <= 0.75, format!("ξ = {} must not exceed 3/4", params.xi)),
        below_one_check("influence_below_one_at_envelope", gt_tilde, d_tilde),
        Check::new(
            "leader_follower_compatibility",
            g_bar <= gt_tilde,
            format!("G(d̄_t) = {g_bar} must not exceed G̃(d̃_t) = {gt_tilde}"),
        ),
    ];
    // the tight-envelope lemma supplies decay, ε, the envelope condition and the c1 cap
    checks.extend(checks_envelope_tight(t, params, g));
    checks
}

/// `c1 t² exp(-θ l^ε) + 2 ((t - l)/(1 - G̃(d̃_t)) + exp(5/8 λ² D² l)) exp(-λ k̃)`
/// with `λ = 2 ln 2 / d̄_t`.
pub fn bound_theorem_bistar(
    t: u64,
    k_tilde: f64,
    half_width: f64,
    g: &InfluenceFunction,
    g_tilde: &InfluenceFunction,
    params: &ScheduleParams,
) -> Result<BoundResult, BoundError> {
    let l = params.tight_warmup(t);
    if l >= t {
        return Err(warmup_error(l, t));
    }
    let params = ScheduleParams { envelope_scale: half_width, ..*params };
    let mut checks = checks_bistar(t, &params, g, g_tilde);
    checks.push(Check::new("threshold_nonnegative", k_tilde >= 0.0, format!("k̃ = {k_tilde}")));
    let tf = t as f64;
    let lambda = lambda_star(LambdaRule::Bistar { half_width, beta: params.beta }, t);
    let gt = g_tilde.at(params.follower_drift_cap(tf));
    let log_value = if gt >= 1.0 {
        f64::INFINITY
    } else {
        let head = 0.625 * lambda * lambda * half_width * half_width * l as f64;
        let bracket = log_add_exp(math::log((t - l) as f64 / (1.0 - gt)), head);
        log_add_exp(log_envelope_tight(t, l, &params), LN_2 + bracket - lambda * k_tilde)
    };
    Ok(BoundResult::from_log(Theorem::BistarFollower, log_value, checks))
}

/// Inputs for [`validity_report`].
#[derive(Debug, Clone, Copy)]
pub struct ValidityInputs<'a> {
    pub influence: &'a InfluenceFunction,
    pub follower_influence: Option<&'a InfluenceFunction>,
    /// Noise half-width, when the noise is bounded.
    pub half_width: Option<f64>,
    /// Sub-Gaussian parameter of the noise.
    pub sigma: f64,
    pub params: &'a ScheduleParams,
    /// Evaluation time for time-dependent conditions.
    pub t: Option<u64>,
}

fn bounded_noise_check(half_width: Option<f64>) -> Check {
    Check::new(
        "bounded_noise",
        half_width.is_some(),
        String::from(if half_width.is_some() { "noise support is bounded" } else { "noise support is unbounded" }),
    )
}

fn minimal_t_checks(t: Option<u64>, t_min: f64) -> Vec<Check> {
    let mut checks = alloc::vec![Check::new(
        "desk_scale_feasible",
        t_min <= DESK_SCALE_MAX_T,
        format!("minimal t = {t_min:e} (desk scale ends at {DESK_SCALE_MAX_T:e})"),
    )];
    if let Some(t) = t {
        checks.push(Check::new("minimal_t", t as f64 > t_min, format!("t = {t} must exceed {t_min:e}")));
    }
    checks
}

/// Checks every precondition of the named result, each reported
/// individually. Time-dependent conditions are included when `inputs.t` is set.
pub fn validity_report(theorem: Theorem, inputs: &ValidityInputs<'_>) -> Vec<Check> {
    let p = inputs.params;
    let g = inputs.influence;
    let a = g.tail_exponent();
    let follower = inputs.follower_influence;
    let d = inputs.half_width.unwrap_or(p.envelope_scale);
    match theorem {
        Theorem::TwoAgentBounded => {
            let mut c = alloc::vec![bounded_noise_check(inputs.half_width)];
            c.extend(checks_two_agent_bounded(inputs.t.unwrap_or(1), d, g));
            c
        }
        Theorem::TwoAgentSubGaussian => checks_two_agent_sub_gaussian(inputs.t.unwrap_or(2), p, g),
        Theorem::BistarFollower => {
            let mut c = alloc::vec![bounded_noise_check(inputs.half_width)];
            match follower {
                Some(gt) => {
                    let params = ScheduleParams { envelope_scale: d, ..*p };
                    c.extend(checks_bistar(inputs.t.unwrap_or(2), &params, g, gt));
                }
                None => c.push(missing_follower()),
            }
            c
        }
        Theorem::SimplifiedBounded => {
            let delta = 1.0 - a;
            let mut c = alloc::vec![bounded_noise_check(inputs.half_width), decay_check(g, 1.0, "influence_decay")];
            c.push(epsilon_check(p.epsilon, delta / 2.0 - p.beta));
            c.extend(c1_check(theorem, p.c1, g.g0(), None));
            if let Some(t) = inputs.t {
                c.push(large_t_condition(t, p, g.at(d * t as f64), d));
            }
            c.extend(minimal_t_checks(inputs.t, math::pow(1.0 / (p.theta * p.epsilon), 1.0 / p.epsilon)));
            c
        }
        Theorem::SimplifiedSubGaussian => {
            let delta = 2.0 - a;
            let mut c = alloc::vec![decay_check(g, 2.0, "influence_decay")];
            c.push(epsilon_check(p.epsilon, delta / 6.0 - 2.0 * p.beta / 3.0));
            c.push(Check::new(
                "warmup_restriction",
                p.zeta <= 1.0 - delta / 2.0,
                format!("ζ = {} must not exceed 1 - δ/2 = {}", p.zeta, 1.0 - delta / 2.0),
            ));
            c.extend(c1_check(theorem, p.c1, g.g0(), None));
            if let Some(t) = inputs.t {
                c.push(large_t_condition(t, p, g.at(p.loose_envelope(t as f64)), inputs.sigma));
            }
            c.extend(minimal_t_checks(inputs.t, math::pow(1.0 / (p.theta * p.epsilon), 1.0 / p.epsilon)));
            c
        }
        Theorem::SimplifiedBistarFollower | Theorem::SimplifiedBistarCross => {
            let mut c = alloc::vec![bounded_noise_check(inputs.half_width)];
            let Some(gt) = follower else {
                c.push(missing_follower());
                return c;
            };
            let rational = matches!(g, InfluenceFunction::RationalPowerLaw { .. });
            c.push(Check::new("rational_leader", rational, String::from("leader influence must be G0 / (1 + x^α)")));
            c.push(decay_check(g, 1.0, "influence_decay"));
            c.push(decay_check(gt, 2.0 / 3.0, "follower_decay"));
            let report = admissible_exponents(
                ExponentRule::Bistar,
                1.0 - a,
                p.beta,
                2.0 / 3.0 - gt.tail_exponent(),
                p.beta_tilde,
                p.xi,
            );
            c.push(epsilon_check(p.epsilon, report.epsilon));
            c.extend(report.checks.into_iter().filter(|x| x.name != "delta_positive" && x.name != "beta_positive"));
            c.extend(c1_check(theorem, p.c1, g.g0(), Some(gt.g0())));
            let varsigma = bistar_exponent(p);
            c.extend(minimal_t_checks(inputs.t, math::pow(2.0 / (p.theta * varsigma), 1.0 / varsigma)));
            c
        }
        Theorem::EnvelopeViolationLoose => {
            bound_envelope_violation(EnvelopeEvent::Loose, inputs.t.unwrap_or(2), p, g).validity
        }
        Theorem::EnvelopeViolationTight => {
            let params = ScheduleParams { envelope_scale: d, ..*p };
            checks_envelope_tight(inputs.t.unwrap_or(2), &params, g)
        }
        Theorem::Simplified => simplified_bound(1.0, p.c1, p.c2, p.epsilon, SimplifiedForm::Exponential).validity,
    }
}

/// `ς = min(ε ξ, β - β̃)` from the configured `ε`.
pub fn bistar_exponent(p: &ScheduleParams) -> f64 {
    let a = p.epsilon * p.xi;
    let b = snap(p.beta - p.beta_tilde);
    if a < b {
        a
    } else {
        b
    }
}

fn missing_follower() -> Check {
    Check::new("follower_influence_given", false, String::from("no follower influence function supplied"))
}

/// `√(t^(1 - 2β - 2ε) G) >= θ s / (√2 c)`.
fn large_t_condition(t: u64, p: &ScheduleParams, g: f64, scale: f64) -> Check {
    let lhs = math::sqrt(math::pow(t as f64, 1.0 - 2.0 * p.beta - 2.0 * p.epsilon) * g);
    let rhs = p.theta * scale / (math::sqrt(2.0) * p.c);
    Check::new("large_t_condition", lhs >= rhs, format!("{lhs} must be at least {rhs}"))
}
