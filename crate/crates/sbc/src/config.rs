//! Experiment configuration in a flat `key = value` format.
//!
//! ```text
//! # two agents, rational influence with δ = 0.5
//! system.kind = two_agent
//! influence.G.family = rational
//! influence.G.alpha = 0.5
//! noise.kind = uniform
//! noise.half_width = 20
//! run.horizon = 400
//! run.times = 50,100,200,400
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Every key may appear
//! at most once; unknown keys, and keys that do not apply to the chosen
//! family or noise kind, are rejected with their line number. Unset keys take
//! the defaults of [`ExperimentConfig::default`], with schedule defaults
//! derived from the noise. [`ExperimentConfig::render`] writes every key, and
//! parsing the rendered text gives back the same config.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use sbc_core::bounds::{ScheduleParams, Theorem};
use sbc_core::{BistarSystem, InfluenceFunction, NoiseMode, NoiseModel, PathKind, TwoAgentSystem};

use crate::engine::System;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    TwoAgent,
    Bistar,
}

/// Noise as written in the config; kept separately from [`NoiseModel`] so
/// that rendering reproduces the input atoms exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    Uniform { half_width: f64 },
    Gaussian { sigma: f64 },
    Discrete { points: Vec<f64>, masses: Vec<f64> },
}

impl NoiseSpec {
    pub fn model(&self) -> Result<NoiseModel, String> {
        match self {
            Self::Uniform { half_width } => NoiseModel::uniform(*half_width),
            Self::Gaussian { sigma } => NoiseModel::gaussian(*sigma),
            Self::Discrete { points, masses } => NoiseModel::discrete(points, masses),
        }
        .map_err(|e| e.to_string())
    }
}

/// Which analytical bound accompanies the empirical tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundChoice {
    /// Pick from the system, noise and observed path.
    Auto,
    None,
    Theorem(Theorem),
}

const BOUND_CHOICES: [Theorem; 7] = [
    Theorem::TwoAgentBounded,
    Theorem::TwoAgentSubGaussian,
    Theorem::BistarFollower,
    Theorem::SimplifiedBounded,
    Theorem::SimplifiedSubGaussian,
    Theorem::SimplifiedBistarFollower,
    Theorem::SimplifiedBistarCross,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub system: SystemKind,
    pub noise_mode: NoiseMode,
    /// The observed difference.
    pub path: PathKind,
    pub influence: InfluenceFunction,
    pub follower_influence: InfluenceFunction,
    pub noise: NoiseSpec,
    pub schedule: ScheduleParams,
    pub horizon: u64,
    /// Times to report; empty means every `t` in `0..=horizon`.
    pub times: Vec<u64>,
    pub n: u64,
    pub seed: u64,
    pub confidence: f64,
    /// `0` uses every core.
    pub workers: usize,
    pub bound: BoundChoice,
    pub out_dir: String,
    pub format: Format,
}

/// Schedule defaults for a noise law: `c` is the per-step RMS, the envelope
/// scale is the half-width (or `σ` when unbounded) and `c' = D²/(2σ²)` with
/// `σ` the sub-Gaussian parameter.
pub fn default_schedule(noise: &NoiseModel) -> ScheduleParams {
    let sigma = noise.sub_gaussian_sigma();
    let d = noise.half_width().unwrap_or(sigma);
    ScheduleParams {
        c: noise.variance().sqrt(),
        c_prime: d * d / (2.0 * sigma * sigma),
        ..ScheduleParams::for_half_width(d)
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let noise = NoiseSpec::Uniform { half_width: 20.0 };
        let schedule = default_schedule(&noise.model().expect("valid default noise"));
        Self {
            system: SystemKind::TwoAgent,
            noise_mode: NoiseMode::Difference,
            path: PathKind::Leader,
            influence: InfluenceFunction::RationalPowerLaw { g0: 1.0, alpha: 0.5 },
            follower_influence: InfluenceFunction::RationalPowerLaw { g0: 1.0, alpha: 2.0 / 3.0 - 0.55 },
            noise,
            schedule,
            horizon: 100,
            times: Vec::new(),
            n: 1000,
            seed: 0,
            confidence: 0.99,
            workers: 0,
            bound: BoundChoice::Auto,
            out_dir: String::from("out"),
            format: Format::Csv,
        }
    }
}

const SCHEDULE_KEYS: [&str; 12] = [
    "c", "beta", "beta_tilde", "beta_prime", "zeta", "xi", "epsilon", "theta", "c_prime", "c1", "c2", "envelope_scale",
];

fn schedule_field<'a>(p: &'a mut ScheduleParams, name: &str) -> &'a mut f64 {
    match name {
        "c" => &mut p.c,
        "beta" => &mut p.beta,
        "beta_tilde" => &mut p.beta_tilde,
        "beta_prime" => &mut p.beta_prime,
        "zeta" => &mut p.zeta,
        "xi" => &mut p.xi,
        "epsilon" => &mut p.epsilon,
        "theta" => &mut p.theta,
        "c_prime" => &mut p.c_prime,
        "c1" => &mut p.c1,
        "c2" => &mut p.c2,
        "envelope_scale" => &mut p.envelope_scale,
        _ => unreachable!("unknown schedule field {name}"),
    }
}

/// Every key the format knows.
pub fn known_keys() -> Vec<String> {
    let mut keys: Vec<String> = [
        "system.kind",
        "system.noise_mode",
        "system.path",
        "noise.kind",
        "noise.half_width",
        "noise.sigma",
        "noise.points",
        "noise.masses",
        "run.horizon",
        "run.times",
        "run.n",
        "run.seed",
        "run.confidence",
        "run.workers",
        "run.bound",
        "output.dir",
        "output.format",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for g in ["G", "G_tilde"] {
        for f in ["family", "g0", "alpha", "threshold"] {
            keys.push(format!("influence.{g}.{f}"));
        }
    }
    keys.extend(SCHEDULE_KEYS.iter().map(|k| format!("schedule.{k}")));
    keys
}

/// Raw entries with their line numbers, consumed as they are used.
struct Entries {
    map: BTreeMap<String, (String, usize)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let known = known_keys();
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let Some((k, v)) = s.split_once('=') else {
                return Err(err(Some(line), s, "expected `key = value`"));
            };
            let (k, v) = (k.trim(), v.trim());
            if !known.iter().any(|x| x == k) {
                return Err(err(Some(line), k, "unknown key"));
            }
            if let Some((_, first)) = map.get(k) {
                return Err(err(Some(line), k, &format!("duplicate key, first set on line {first}")));
            }
            map.insert(k.to_string(), (v.to_string(), line));
        }
        Ok(Self { map })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.remove(key)
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<(T, usize)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(|x| Some((x, line)))
                .map_err(|_| err(Some(line), key, &format!("cannot parse `{v}`"))),
        }
    }

    fn set<T: FromStr>(&mut self, key: &str, slot: &mut T) -> Result<Option<usize>, ConfigError> {
        Ok(self.get::<T>(key)?.map(|(v, line)| {
            *slot = v;
            line
        }))
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Result<Option<(Vec<T>, usize)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) if v.is_empty() => Ok(Some((Vec::new(), line))),
            Some((v, line)) => v
                .split(',')
                .map(|x| x.trim().parse::<T>().map_err(|_| err(Some(line), key, &format!("cannot parse `{}`", x.trim()))))
                .collect::<Result<Vec<T>, _>>()
                .map(|xs| Some((xs, line))),
        }
    }

    /// Fails on the first key left over, i.e. one that does not apply.
    fn finish(self) -> Result<(), ConfigError> {
        match self.map.into_iter().min_by_key(|(_, (_, line))| *line) {
            None => Ok(()),
            Some((k, (_, line))) => Err(err(Some(line), &k, "not used by the selected family or noise kind")),
        }
    }
}

fn err(line: Option<usize>, key: &str, message: &str) -> ConfigError {
    ConfigError { line, key: key.to_string(), message: message.to_string() }
}

fn parse_enum<T>(e: &mut Entries, key: &str, options: &[(&str, T)], slot: &mut T) -> Result<(), ConfigError>
where
    T: Copy,
{
    if let Some((v, line)) = e.take(key) {
        match options.iter().find(|(name, _)| *name == v) {
            Some(&(_, x)) => *slot = x,
            None => {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                return Err(err(Some(line), key, &format!("`{v}` is not one of {}", names.join(", "))));
            }
        }
    }
    Ok(())
}

fn parse_influence(e: &mut Entries, name: &str, default: InfluenceFunction) -> Result<InfluenceFunction, ConfigError> {
    let key = |f: &str| format!("influence.{name}.{f}");
    let family_line = e.take(&key("family"));
    let family = match &family_line {
        Some((f, _)) => f.as_str(),
        None => family_name(&default),
    };
    let default_g0 = default.g0();
    let mut g0 = default_g0;
    let g0_line = e.set(&key("g0"), &mut g0)?;
    let line = g0_line.or(family_line.as_ref().map(|(_, l)| *l));
    let built = match family {
        "rational" => {
            let mut alpha = match default {
                InfluenceFunction::RationalPowerLaw { alpha, .. } => alpha,
                _ => 1.0,
            };
            e.set(&key("alpha"), &mut alpha)?;
            InfluenceFunction::rational(g0, alpha)
        }
        "threshold" => {
            let mut d = match default {
                InfluenceFunction::HardThreshold { threshold, .. } => threshold,
                _ => 1.0,
            };
            e.set(&key("threshold"), &mut d)?;
            InfluenceFunction::threshold(g0, d)
        }
        "constant" => InfluenceFunction::constant(g0),
        other => {
            return Err(err(family_line.as_ref().map(|(_, l)| *l), &key("family"), &format!("`{other}` is not one of rational, threshold, constant")))
        }
    };
    built.map_err(|x| err(line, &format!("influence.{name}"), &x.to_string()))
}

fn family_name(g: &InfluenceFunction) -> &'static str {
    match g {
        InfluenceFunction::RationalPowerLaw { .. } => "rational",
        InfluenceFunction::HardThreshold { .. } => "threshold",
        InfluenceFunction::Constant { .. } => "constant",
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut e = Entries::parse(text)?;
        let mut cfg = Self::default();

        parse_enum(&mut e, "system.kind", &[("two_agent", SystemKind::TwoAgent), ("bistar", SystemKind::Bistar)], &mut cfg.system)?;
        parse_enum(
            &mut e,
            "system.noise_mode",
            &[("difference", NoiseMode::Difference), ("per_agent", NoiseMode::PerAgent)],
            &mut cfg.noise_mode,
        )?;
        let paths: Vec<(&str, PathKind)> = PathKind::ALL.iter().map(|&k| (k.label(), k)).collect();
        let path_line = e.map.get("system.path").map(|(_, l)| *l);
        parse_enum(&mut e, "system.path", &paths, &mut cfg.path)?;
        if cfg.system == SystemKind::TwoAgent && cfg.path != PathKind::Leader {
            return Err(err(path_line, "system.path", "the two-agent system only has the `y` path"));
        }

        cfg.influence = parse_influence(&mut e, "G", cfg.influence)?;
        cfg.follower_influence = parse_influence(&mut e, "G_tilde", cfg.follower_influence)?;

        let noise_line = e.map.get("noise.kind").map(|(_, l)| *l);
        let mut kind = "uniform";
        let kind_owned = e.take("noise.kind").map(|(v, _)| v);
        if let Some(k) = &kind_owned {
            kind = k.as_str();
        }
        cfg.noise = match kind {
            "uniform" => {
                let mut half_width = 20.0;
                e.set("noise.half_width", &mut half_width)?;
                NoiseSpec::Uniform { half_width }
            }
            "gaussian" => {
                let mut sigma = 1.0;
                e.set("noise.sigma", &mut sigma)?;
                NoiseSpec::Gaussian { sigma }
            }
            "discrete" => {
                let points = e.list::<f64>("noise.points")?.map(|x| x.0);
                let masses = e.list::<f64>("noise.masses")?.map(|x| x.0);
                match (points, masses) {
                    (Some(points), Some(masses)) => NoiseSpec::Discrete { points, masses },
                    _ => return Err(err(noise_line, "noise", "discrete noise needs noise.points and noise.masses")),
                }
            }
            other => return Err(err(noise_line, "noise.kind", &format!("`{other}` is not one of uniform, gaussian, discrete"))),
        };
        let model = cfg.noise.model().map_err(|m| err(noise_line, "noise", &m))?;

        cfg.schedule = default_schedule(&model);
        for name in SCHEDULE_KEYS {
            let key = format!("schedule.{name}");
            let mut v = *schedule_field(&mut cfg.schedule, name);
            if let Some(line) = e.set(&key, &mut v)? {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(err(Some(line), &key, "must be positive and finite"));
                }
            }
            *schedule_field(&mut cfg.schedule, name) = v;
        }

        e.set("run.horizon", &mut cfg.horizon)?;
        if let Some((times, line)) = e.list::<u64>("run.times")? {
            if times.windows(2).any(|w| w[0] >= w[1]) {
                return Err(err(Some(line), "run.times", "times must be strictly increasing"));
            }
            if times.last().is_some_and(|&t| t > cfg.horizon) {
                return Err(err(Some(line), "run.times", "times must not exceed run.horizon"));
            }
            cfg.times = times;
        }
        if let Some(line) = e.set("run.n", &mut cfg.n)? {
            if cfg.n == 0 {
                return Err(err(Some(line), "run.n", "must be at least 1"));
            }
        }
        e.set("run.seed", &mut cfg.seed)?;
        if let Some(line) = e.set("run.confidence", &mut cfg.confidence)? {
            if !(cfg.confidence > 0.0 && cfg.confidence < 1.0) {
                return Err(err(Some(line), "run.confidence", "must lie in (0, 1)"));
            }
        }
        e.set("run.workers", &mut cfg.workers)?;
        let mut bounds: Vec<(&str, BoundChoice)> = vec![("auto", BoundChoice::Auto), ("none", BoundChoice::None)];
        bounds.extend(BOUND_CHOICES.iter().map(|&t| (t.id(), BoundChoice::Theorem(t))));
        parse_enum(&mut e, "run.bound", &bounds, &mut cfg.bound)?;

        if let Some((dir, _)) = e.take("output.dir") {
            cfg.out_dir = dir;
        }
        parse_enum(&mut e, "output.format", &[("csv", Format::Csv), ("json", Format::Json)], &mut cfg.format)?;
        e.finish()?;
        Ok(cfg)
    }

    /// Every key, in a fixed order. `f64` values use the shortest
    /// representation that parses back to the same number.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("system.kind", match self.system {
            SystemKind::TwoAgent => "two_agent",
            SystemKind::Bistar => "bistar",
        }
        .into());
        put("system.noise_mode", match self.noise_mode {
            NoiseMode::Difference => "difference",
            NoiseMode::PerAgent => "per_agent",
        }
        .into());
        put("system.path", self.path.label().into());
        for (name, g) in [("G", &self.influence), ("G_tilde", &self.follower_influence)] {
            put(&format!("influence.{name}.family"), family_name(g).into());
            put(&format!("influence.{name}.g0"), g.g0().to_string());
            match g {
                InfluenceFunction::RationalPowerLaw { alpha, .. } => put(&format!("influence.{name}.alpha"), alpha.to_string()),
                InfluenceFunction::HardThreshold { threshold, .. } => {
                    put(&format!("influence.{name}.threshold"), threshold.to_string())
                }
                InfluenceFunction::Constant { .. } => {}
            }
        }
        let join = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        match &self.noise {
            NoiseSpec::Uniform { half_width } => {
                put("noise.kind", "uniform".into());
                put("noise.half_width", half_width.to_string());
            }
            NoiseSpec::Gaussian { sigma } => {
                put("noise.kind", "gaussian".into());
                put("noise.sigma", sigma.to_string());
            }
            NoiseSpec::Discrete { points, masses } => {
                put("noise.kind", "discrete".into());
                put("noise.points", join(points));
                put("noise.masses", join(masses));
            }
        }
        let mut s = self.schedule;
        for name in SCHEDULE_KEYS {
            put(&format!("schedule.{name}"), schedule_field(&mut s, name).to_string());
        }
        put("run.horizon", self.horizon.to_string());
        put("run.times", self.times.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
        put("run.n", self.n.to_string());
        put("run.seed", self.seed.to_string());
        put("run.confidence", self.confidence.to_string());
        put("run.workers", self.workers.to_string());
        put("run.bound", match self.bound {
            BoundChoice::Auto => "auto".into(),
            BoundChoice::None => "none".into(),
            BoundChoice::Theorem(t) => t.id().into(),
        });
        put("output.dir", self.out_dir.clone());
        put("output.format", match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
        .into());
        out
    }

    pub fn noise_model(&self) -> NoiseModel {
        self.noise.model().expect("noise validated at parse time")
    }

    pub fn system(&self) -> System {
        let noise = self.noise_model();
        match self.system {
            SystemKind::TwoAgent => {
                System::TwoAgent(TwoAgentSystem::new(self.influence, noise).with_noise_mode(self.noise_mode))
            }
            SystemKind::Bistar => System::Bistar(
                BistarSystem::new(self.influence, self.follower_influence, noise).with_noise_mode(self.noise_mode),
            ),
        }
    }

    /// Reported times.
    pub fn report_times(&self) -> Vec<u64> {
        if self.times.is_empty() {
            (0..=self.horizon).collect()
        } else {
            self.times.clone()
        }
    }

    /// `k(t)` for the observed path: `c t^(1/2 - β)` for the leader
    /// difference, `c t^(1/2 - β̃)` for follower differences.
    pub fn threshold(&self, t: u64) -> f64 {
        match self.path {
            PathKind::Leader => self.schedule.leader_threshold(t as f64),
            _ => self.schedule.follower_threshold(t as f64),
        }
    }

    /// The bound compared against the observed tail, if any.
    pub fn resolved_bound(&self) -> Option<Theorem> {
        match self.bound {
            BoundChoice::None => None,
            BoundChoice::Theorem(t) => Some(t),
            BoundChoice::Auto => Some(match (self.path, self.noise_model().half_width()) {
                (PathKind::Leader, Some(_)) => Theorem::TwoAgentBounded,
                (PathKind::Leader, None) => Theorem::TwoAgentSubGaussian,
                (PathKind::Cross, _) => Theorem::SimplifiedBistarCross,
                _ => Theorem::SimplifiedBistarFollower,
            }),
        }
    }
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(ExperimentConfig::parse("").unwrap(), ExperimentConfig::default());
        let d = ExperimentConfig::default();
        assert!((d.schedule.c - 20.0 / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(d.schedule.c_prime, 0.5);
    }

    #[test]
    fn unknown_key_reports_line() {
        let e = ExperimentConfig::parse("run.n = 5\n\nrun.bogus = 1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert_eq!(e.key, "run.bogus");
    }

    #[test]
    fn duplicate_key_reports_both_lines() {
        let e = ExperimentConfig::parse("run.n = 5\nrun.n = 6\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("line 1"));
    }

    #[test]
    fn key_for_other_family_rejected() {
        let text = "influence.G.family = constant\ninfluence.G.g0 = 0.5\ninfluence.G.alpha = 2\n";
        let e = ExperimentConfig::parse(text).unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (Some(3), "influence.G.alpha"));
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(ExperimentConfig::parse("influence.G.g0 = 1.5").is_err());
        assert!(ExperimentConfig::parse("schedule.beta = -1").is_err());
        assert!(ExperimentConfig::parse("run.times = 5,3").is_err());
        assert!(ExperimentConfig::parse("run.horizon = 10\nrun.times = 20").is_err());
        assert!(ExperimentConfig::parse("system.path = y_f1").is_err());
        assert!(ExperimentConfig::parse("noise.kind = discrete\nnoise.points = -1,1\nnoise.masses = 0.3,0.7").is_err());
        assert!(ExperimentConfig::parse("just text").is_err());
    }

    #[test]
    fn discrete_noise_defaults_schedule_from_law() {
        let c = ExperimentConfig::parse("noise.kind = discrete\nnoise.points = -2,0,2\nnoise.masses = 0.25,0.5,0.25").unwrap();
        assert!((c.schedule.c - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.schedule.envelope_scale, 2.0);
    }

    fn arb_influence() -> impl Strategy<Value = InfluenceFunction> {
        prop_oneof![
            (0.01f64..=1.0, 0.01f64..5.0).prop_map(|(g, a)| InfluenceFunction::rational(g, a).unwrap()),
            (0.01f64..=1.0, 0.0f64..100.0).prop_map(|(g, d)| InfluenceFunction::threshold(g, d).unwrap()),
            (0.0f64..=1.0).prop_map(|g| InfluenceFunction::constant(g).unwrap()),
        ]
    }

    fn arb_noise() -> impl Strategy<Value = NoiseSpec> {
        prop_oneof![
            (0.001f64..1e3).prop_map(|half_width| NoiseSpec::Uniform { half_width }),
            (0.001f64..1e3).prop_map(|sigma| NoiseSpec::Gaussian { sigma }),
            (1usize..5, 0.1f64..10.0).prop_map(|(m, s)| {
                let points: Vec<f64> = (1..=m).flat_map(|i| [-(i as f64) * s, i as f64 * s]).collect();
                let masses = vec![1.0 / points.len() as f64; points.len()];
                NoiseSpec::Discrete { points, masses }
            }),
        ]
    }

    fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
        (
            any::<bool>(),
            arb_influence(),
            arb_influence(),
            arb_noise(),
            proptest::collection::vec(1e-6f64..1e3, 12),
            (1u64..10_000, any::<u64>(), 1u64..1_000_000, 0.5f64..0.9999, 0usize..64),
            proptest::sample::select(vec!["auto", "none", "two_agent_bounded", "simplified_bistar_cross"]),
        )
            .prop_map(|(bistar, g, gt, noise, sched, (horizon, seed, n, confidence, workers), bound)| {
                let mut schedule = default_schedule(&noise.model().unwrap());
                for (name, v) in SCHEDULE_KEYS.iter().zip(sched) {
                    *schedule_field(&mut schedule, name) = v;
                }
                let times: Vec<u64> = (1..=horizon).step_by(1 + horizon as usize / 7).collect();
                let bound = match bound {
                    "auto" => BoundChoice::Auto,
                    "none" => BoundChoice::None,
                    id => BoundChoice::Theorem(*BOUND_CHOICES.iter().find(|t| t.id() == id).unwrap()),
                };
                ExperimentConfig {
                    system: if bistar { SystemKind::Bistar } else { SystemKind::TwoAgent },
                    path: if bistar { PathKind::Cross } else { PathKind::Leader },
                    influence: g,
                    follower_influence: gt,
                    noise,
                    schedule,
                    horizon,
                    times,
                    n,
                    seed,
                    confidence,
                    workers,
                    bound,
                    out_dir: format!("out-{seed}"),
                    format: if bistar { Format::Json } else { Format::Csv },
                    ..ExperimentConfig::default()
                }
            })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(cfg in arb_config()) {
            let text = cfg.render();
            let back = ExperimentConfig::parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.render(), text);
        }
    }
}
