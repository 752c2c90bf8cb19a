//! Parallel Monte Carlo estimation over independent trajectories.
//!
//! Trajectory `i` always draws from stream `i` of the master seed. Work is
//! cut into fixed chunks of [`CHUNK`] consecutive trajectories; each chunk
//! folds into its own accumulator in index order, and chunk accumulators are
//! merged in chunk order. The shape of every floating-point sum therefore
//! depends only on `n`, never on the number of workers or on scheduling.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use sbc_core::bounds::{self, EnvelopeEvent, ScheduleParams};
use sbc_core::{BistarState, BistarSystem, PathKind, RandomSource, TwoAgentSystem};

use crate::stats::{self, BatchInterval};

/// Trajectories per work unit.
pub const CHUNK: u64 = 1024;

/// Batches used for batch-means intervals.
pub const BATCHES: u64 = 20;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("the two-agent system has no {0} path")]
    UnsupportedPath(&'static str),
    #[error("need at least {min} trajectories, got {n}")]
    TooFewSamples { n: u64, min: u64 },
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error("no trajectory satisfied the conditioning event in batch {0}")]
    EmptyBatch(u64),
}

/// A process whose differences can be observed along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum System {
    TwoAgent(TwoAgentSystem),
    Bistar(BistarSystem),
}

impl System {
    pub fn supports(&self, kind: PathKind) -> bool {
        matches!(self, Self::Bistar(_)) || kind == PathKind::Leader
    }

    fn check(&self, kind: PathKind) -> Result<(), EngineError> {
        if self.supports(kind) {
            Ok(())
        } else {
            Err(EngineError::UnsupportedPath(kind.label()))
        }
    }

    /// Runs `horizon` steps, calling `visit` on the initial state and after
    /// every step. Two-agent states report zero follower differences.
    pub fn walk(&self, horizon: u64, source: &mut RandomSource, mut visit: impl FnMut(&BistarState)) {
        match self {
            Self::TwoAgent(sys) => {
                let mut s = sbc_core::DiffState::default();
                visit(&BistarState { y: s.y, t: s.t, ..BistarState::default() });
                for _ in 0..horizon {
                    s = sys.step(s, source);
                    visit(&BistarState { y: s.y, t: s.t, ..BistarState::default() });
                }
            }
            Self::Bistar(sys) => {
                let mut s = BistarState::default();
                visit(&s);
                for _ in 0..horizon {
                    s = sys.step(s, source);
                    visit(&s);
                }
            }
        }
    }
}

/// Fixed-size worker pool with the deterministic fold.
pub struct Engine {
    pool: rayon::ThreadPool,
}

impl Engine {
    /// `workers = 0` uses every available core.
    pub fn new(workers: usize) -> Result<Self, EngineError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| EngineError::Pool(e.to_string()))?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Folds trajectories `0..n` into one accumulator. `each` receives the
    /// trajectory index and its random source.
    pub fn fold<A, I, E, M>(&self, n: u64, master_seed: u64, init: I, each: E, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync,
        E: Fn(&mut A, u64, &mut RandomSource) + Sync,
        M: Fn(&mut A, A),
    {
        let chunks = n.div_ceil(CHUNK);
        let parts: Vec<A> = self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut acc = init();
                    for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                        let mut source = RandomSource::new(master_seed, i);
                        each(&mut acc, i, &mut source);
                    }
                    acc
                })
                .collect()
        });
        let mut total = init();
        for p in parts {
            merge(&mut total, p);
        }
        total
    }
}

/// A binomial proportion with its exact interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub hits: u64,
    pub n: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
}

impl Proportion {
    pub fn new(hits: u64, n: u64, confidence: f64) -> Self {
        let (ci_low, ci_high) = stats::clopper_pearson(hits, n, confidence);
        Self { hits, n, p_hat: hits as f64 / n as f64, ci_low, ci_high, confidence }
    }
}

/// Empirical `P(|D(t)| >= k)` for one observed difference `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub t: u64,
    pub k: f64,
    /// Count of `D(t) >= k`.
    pub hits_above: u64,
    /// Count of `D(t) <= -k`.
    pub hits_below: u64,
    pub exceed: Proportion,
}

/// Exceedance query `|D(t)| >= k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailQuery {
    pub t: u64,
    pub k: f64,
}

/// Integer tallies for a list of queries.
#[derive(Debug, Clone, Default)]
struct Tally {
    hits: Vec<u64>,
    above: Vec<u64>,
    below: Vec<u64>,
}

impl Tally {
    fn new(m: usize) -> Self {
        Self { hits: vec![0; m], above: vec![0; m], below: vec![0; m] }
    }

    fn merge(&mut self, o: Self) {
        for (a, b) in [(&mut self.hits, o.hits), (&mut self.above, o.above), (&mut self.below, o.below)] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
}

/// Query indices grouped by time, so one pass answers all queries.
fn by_time(queries: &[TailQuery]) -> (u64, Vec<Vec<usize>>) {
    let horizon = queries.iter().map(|q| q.t).max().unwrap_or(0);
    let mut slots = vec![Vec::new(); horizon as usize + 1];
    for (i, q) in queries.iter().enumerate() {
        slots[q.t as usize].push(i);
    }
    (horizon, slots)
}

fn require(n: u64, min: u64) -> Result<(), EngineError> {
    if n >= min {
        Ok(())
    } else {
        Err(EngineError::TooFewSamples { n, min })
    }
}

/// One pass over `n` trajectories tallying every `|D(t)| >= k` query.
pub fn estimate_tails(
    engine: &Engine,
    system: &System,
    kind: PathKind,
    queries: &[TailQuery],
    n: u64,
    master_seed: u64,
    confidence: f64,
) -> Result<Vec<TailEstimate>, EngineError> {
    system.check(kind)?;
    require(n, 1)?;
    let (horizon, slots) = by_time(queries);
    let m = queries.len();
    let tally = engine.fold(
        n,
        master_seed,
        || Tally::new(m),
        |acc, _, source| {
            system.walk(horizon, source, |s| {
                for &q in &slots[s.t as usize] {
                    let (x, k) = (s.get(kind), queries[q].k);
                    if x >= k {
                        acc.above[q] += 1;
                    }
                    if x <= -k {
                        acc.below[q] += 1;
                    }
                    if x.abs() >= k {
                        acc.hits[q] += 1;
                    }
                }
            })
        },
        Tally::merge,
    );
    Ok(queries
        .iter()
        .enumerate()
        .map(|(i, q)| TailEstimate {
            t: q.t,
            k: q.k,
            hits_above: tally.above[i],
            hits_below: tally.below[i],
            exceed: Proportion::new(tally.hits[i], n, confidence),
        })
        .collect())
}

/// Tail estimates on the schedule `k = c t^(1/2 - β)`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_tail(
    engine: &Engine,
    system: &System,
    kind: PathKind,
    c: f64,
    beta: f64,
    times: &[u64],
    n: u64,
    master_seed: u64,
    confidence: f64,
) -> Result<Vec<TailEstimate>, EngineError> {
    let queries: Vec<TailQuery> =
        times.iter().map(|&t| TailQuery { t, k: bounds::threshold(c, beta, t as f64) }).collect();
    estimate_tails(engine, system, kind, &queries, n, master_seed, confidence)
}

/// Empirical probability that the leader difference leaves the envelope
/// somewhere in the warm-up window before `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub event: EnvelopeEvent,
    pub t: u64,
    /// First time checked; the window is `[warmup, t - 1]`.
    pub warmup: u64,
    pub violation: Proportion,
}

/// `(warm-up, envelope exponent)` of an envelope event.
pub fn envelope_window(event: EnvelopeEvent, params: &ScheduleParams, t: u64) -> (u64, f64) {
    match event {
        EnvelopeEvent::Loose => (params.loose_warmup(t), 0.5 + params.beta_prime),
        EnvelopeEvent::Tight => (params.tight_warmup(t), 0.5 - params.beta),
    }
}

/// Whether `|y(τ)| <= D τ^e` holds for every `τ` in `[warmup, t - 1]`, with
/// `values[τ]` the path.
fn inside_envelope(tau: u64, y: f64, warmup: u64, t: u64, scale: f64, exponent: f64) -> bool {
    tau < warmup || tau >= t || y.abs() <= scale * (tau as f64).powf(exponent)
}

#[allow(clippy::too_many_arguments)]
pub fn estimate_envelope_violation(
    engine: &Engine,
    system: &System,
    event: EnvelopeEvent,
    params: &ScheduleParams,
    t: u64,
    n: u64,
    master_seed: u64,
    confidence: f64,
) -> Result<EnvelopeReport, EngineError> {
    require(n, 1)?;
    let (warmup, exponent) = envelope_window(event, params, t);
    let scale = params.envelope_scale;
    let horizon = t.saturating_sub(1);
    let hits = engine.fold(
        n,
        master_seed,
        || 0u64,
        |acc, _, source| {
            let mut ok = true;
            system.walk(horizon, source, |s| ok &= inside_envelope(s.t, s.y, warmup, t, scale, exponent));
            if !ok {
                *acc += 1;
            }
        },
        |a, b| *a += b,
    );
    Ok(EnvelopeReport { event, t, warmup, violation: Proportion::new(hits, n, confidence) })
}

/// Batch-means estimate of `E[e^(λ D(t))]`, optionally restricted to paths
/// on which the envelope event holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfEstimate {
    pub t: u64,
    pub lambda: f64,
    pub interval: BatchInterval,
    /// Trajectories that entered the average.
    pub kept: u64,
    pub n: u64,
}

/// Per-batch `(sum, count)`.
type BatchSums = Vec<(f64, u64)>;

fn merge_batches(a: &mut BatchSums, b: BatchSums) {
    for (x, y) in a.iter_mut().zip(b) {
        x.0 += y.0;
        x.1 += y.1;
    }
}

fn batch_of(i: u64, n: u64) -> usize {
    (u128::from(i) * u128::from(BATCHES) / u128::from(n)) as usize
}

fn batch_means(sums: &BatchSums) -> Result<Vec<f64>, EngineError> {
    sums.iter()
        .enumerate()
        .map(|(b, &(s, c))| if c == 0 { Err(EngineError::EmptyBatch(b as u64)) } else { Ok(s / c as f64) })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn empirical_mgf(
    engine: &Engine,
    system: &System,
    kind: PathKind,
    lambda: f64,
    t: u64,
    condition: Option<(EnvelopeEvent, &ScheduleParams)>,
    n: u64,
    master_seed: u64,
    confidence: f64,
) -> Result<MgfEstimate, EngineError> {
    system.check(kind)?;
    require(n, BATCHES)?;
    let window = condition.map(|(e, p)| {
        let (w, exponent) = envelope_window(e, p, t);
        (w, exponent, p.envelope_scale)
    });
    let sums = engine.fold(
        n,
        master_seed,
        || vec![(0.0, 0u64); BATCHES as usize],
        |acc, i, source| {
            let mut ok = true;
            let mut end = 0.0;
            system.walk(t, source, |s| {
                if let Some((w, e, d)) = window {
                    ok &= inside_envelope(s.t, s.y, w, t, d, e);
                }
                if s.t == t {
                    end = s.get(kind);
                }
            });
            if ok {
                let b = &mut acc[batch_of(i, n)];
                b.0 += (lambda * end).exp();
                b.1 += 1;
            }
        },
        merge_batches,
    );
    let kept = sums.iter().map(|b| b.1).sum();
    let interval = stats::batch_interval(&batch_means(&sums)?, confidence);
    Ok(MgfEstimate { t, lambda, interval, kept, n })
}

/// Batched moment estimates of `D(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub t: u64,
    pub mean: BatchInterval,
    pub variance: f64,
    /// Interval for `sqrt(E[D(t)^2])`, from the interval for `E[D(t)^2]`.
    pub rms: BatchInterval,
}

pub fn moment_summary(
    engine: &Engine,
    system: &System,
    kind: PathKind,
    times: &[u64],
    n: u64,
    master_seed: u64,
    confidence: f64,
) -> Result<Vec<MomentSummary>, EngineError> {
    system.check(kind)?;
    require(n, BATCHES)?;
    let horizon = times.iter().copied().max().unwrap_or(0);
    let mut slot = vec![None; horizon as usize + 1];
    for (j, &t) in times.iter().enumerate() {
        slot[t as usize] = Some(j);
    }
    let m = times.len();
    let nb = BATCHES as usize;
    // per time: batch sums of D and D^2
    let init = || (vec![vec![0.0; nb]; m], vec![vec![0.0; nb]; m]);
    let (s1, s2) = engine.fold(
        n,
        master_seed,
        init,
        |acc, i, source| {
            let b = batch_of(i, n);
            system.walk(horizon, source, |s| {
                if let Some(j) = slot[s.t as usize] {
                    let x = s.get(kind);
                    acc.0[j][b] += x;
                    acc.1[j][b] += x * x;
                }
            });
        },
        |a, b| {
            for (x, y) in a.0.iter_mut().flatten().zip(b.0.into_iter().flatten()) {
                *x += y;
            }
            for (x, y) in a.1.iter_mut().flatten().zip(b.1.into_iter().flatten()) {
                *x += y;
            }
        },
    );
    let counts: Vec<f64> = (0..nb).map(|b| batch_count(b as u64, n) as f64).collect();
    Ok(times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let mean_b: Vec<f64> = s1[j].iter().zip(&counts).map(|(s, c)| s / c).collect();
            let sq_b: Vec<f64> = s2[j].iter().zip(&counts).map(|(s, c)| s / c).collect();
            let mean = stats::batch_interval(&mean_b, confidence);
            let sq = stats::batch_interval(&sq_b, confidence);
            let nf = n as f64;
            let (sum1, sum2) = (s1[j].iter().sum::<f64>(), s2[j].iter().sum::<f64>());
            let variance = (sum2 - sum1 * sum1 / nf) / (nf - 1.0);
            let rms = BatchInterval {
                estimate: sq.estimate.sqrt(),
                ci_low: sq.ci_low.max(0.0).sqrt(),
                ci_high: sq.ci_high.sqrt(),
                batches: sq.batches,
            };
            MomentSummary { t, mean, variance, rms }
        })
        .collect())
}

/// Trajectories in batch `b`.
fn batch_count(b: u64, n: u64) -> u64 {
    // batch b holds indices i with floor(i B / n) = b
    let first = |b: u64| (u128::from(b) * u128::from(n)).div_ceil(u128::from(BATCHES)) as u64;
    first(b + 1) - first(b)
}

/// `D(t)` for trajectories `0..n`, in trajectory order.
pub fn endpoint_sample(
    engine: &Engine,
    system: &System,
    kind: PathKind,
    t: u64,
    n: u64,
    master_seed: u64,
) -> Result<Vec<f64>, EngineError> {
    let mut cols = path_sample(engine, system, kind, &[t], n, master_seed)?;
    Ok(cols.pop().unwrap_or_default())
}

/// `D(t)` at each requested time for trajectories `0..n`; one column per time.
pub fn path_sample(
    engine: &Engine,
    system: &System,
    kind: PathKind,
    times: &[u64],
    n: u64,
    master_seed: u64,
) -> Result<Vec<Vec<f64>>, EngineError> {
    system.check(kind)?;
    let horizon = times.iter().copied().max().unwrap_or(0);
    let mut slot = vec![Vec::new(); horizon as usize + 1];
    for (j, &t) in times.iter().enumerate() {
        slot[t as usize].push(j);
    }
    let m = times.len();
    Ok(engine.fold(
        n,
        master_seed,
        || vec![Vec::new(); m],
        |acc, _, source| {
            system.walk(horizon, source, |s| {
                for &j in &slot[s.t as usize] {
                    acc[j].push(s.get(kind));
                }
            })
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                x.extend(y);
            }
        },
    ))
}

/// Linear-interpolation quantile of a sorted sample.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Result of comparing `|A|` against `|B|` for `|A| <=_st |B|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceReport {
    pub n_a: usize,
    pub n_b: usize,
    /// `max_x (F_B(x) - F_A(x))` over the pooled sample; positive values
    /// are violations of the ordering.
    pub worst_margin: f64,
    /// Where the worst margin is attained.
    pub at: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Checks that the empirical CDF of `|a|` lies above that of `|b|` at every
/// pooled sample point, up to the two-sample DKW tolerance.
pub fn dominance_check(a: &[f64], b: &[f64], confidence: f64) -> DominanceReport {
    assert!(!a.is_empty() && !b.is_empty(), "dominance check needs two nonempty samples");
    let sorted_abs = |s: &[f64]| {
        let mut v: Vec<f64> = s.iter().map(|x| x.abs()).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let (xa, xb) = (sorted_abs(a), sorted_abs(b));
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0, 0);
    let (mut worst, mut at) = (0.0f64, 0.0);
    while i < na || j < nb {
        let x = match (xa.get(i), xb.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => break,
        };
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        let margin = j as f64 / nb as f64 - i as f64 / na as f64;
        if margin > worst {
            worst = margin;
            at = x;
        }
    }
    let tolerance = stats::dkw_two_sample_tolerance(na, nb, confidence);
    DominanceReport { n_a: na, n_b: nb, worst_margin: worst, at, tolerance, holds: worst <= tolerance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sbc_core::{InfluenceFunction, NoiseModel};

    fn two_agent(g: InfluenceFunction) -> System {
        System::TwoAgent(TwoAgentSystem::new(g, NoiseModel::uniform(20.0).unwrap()))
    }

    #[test]
    fn batch_counts_partition_n() {
        for n in [20u64, 21, 99, 1000, 100_003] {
            let total: u64 = (0..BATCHES).map(|b| batch_count(b, n)).sum();
            assert_eq!(total, n);
            for b in 0..BATCHES {
                let members = (0..n).filter(|&i| batch_of(i, n) == b as usize).count() as u64;
                assert_eq!(members, batch_count(b, n));
            }
        }
    }

    #[test]
    fn fold_is_independent_of_worker_count() {
        let sys = two_agent(InfluenceFunction::rational(1.0, 0.5).unwrap());
        let run = |w| {
            let e = Engine::new(w).unwrap();
            endpoint_sample(&e, &sys, PathKind::Leader, 30, 5000, 7).unwrap()
        };
        let a = run(1);
        assert_eq!(a, run(3));
        assert_eq!(a, run(8));
    }

    #[test]
    fn always_influenced_tail_is_noise_tail() {
        let e = Engine::new(2).unwrap();
        let sys = two_agent(InfluenceFunction::always());
        let q = [TailQuery { t: 5, k: 25.0 }, TailQuery { t: 5, k: 10.0 }, TailQuery { t: 1, k: 10.0 }];
        let r = estimate_tails(&e, &sys, PathKind::Leader, &q, 20_000, 3, 0.99).unwrap();
        assert_eq!(r[0].exceed.hits, 0);
        assert!(r[1].exceed.ci_low <= 0.5 && 0.5 <= r[1].exceed.ci_high);
        assert!(r[2].exceed.ci_low <= 0.5 && 0.5 <= r[2].exceed.ci_high);
    }

    #[test]
    fn follower_paths_rejected_for_two_agents() {
        let e = Engine::new(1).unwrap();
        let sys = two_agent(InfluenceFunction::never());
        let err = estimate_tails(&e, &sys, PathKind::Follower, &[TailQuery { t: 1, k: 0.0 }], 10, 0, 0.99);
        assert_eq!(err.unwrap_err(), EngineError::UnsupportedPath("y_f1"));
    }

    #[test]
    fn mgf_at_zero_is_exactly_one() {
        let e = Engine::new(2).unwrap();
        let sys = two_agent(InfluenceFunction::rational(1.0, 0.5).unwrap());
        let m = empirical_mgf(&e, &sys, PathKind::Leader, 0.0, 10, None, 1000, 1, 0.99).unwrap();
        assert_eq!((m.interval.estimate, m.interval.ci_low, m.interval.ci_high), (1.0, 1.0, 1.0));
    }

    #[test]
    fn mgf_of_random_walk_matches_product_form() {
        let e = Engine::new(0).unwrap();
        let sys = two_agent(InfluenceFunction::never());
        let lambda = 0.02;
        let m = empirical_mgf(&e, &sys, PathKind::Leader, lambda, 5, None, 100_000, 11, 0.99).unwrap();
        let exact = ((lambda * 20.0f64).sinh() / (lambda * 20.0)).powi(5);
        assert!(m.interval.ci_low <= exact && exact <= m.interval.ci_high, "{m:?} vs {exact}");
    }

    #[test]
    fn envelope_beyond_support_is_never_left() {
        let e = Engine::new(2).unwrap();
        let sys = two_agent(InfluenceFunction::never());
        // D τ^(1/2 + 1/2) = D τ is the deterministic bound
        let p = ScheduleParams { beta_prime: 0.5, ..ScheduleParams::for_half_width(20.0) };
        let r = estimate_envelope_violation(&e, &sys, EnvelopeEvent::Loose, &p, 50, 2000, 5, 0.99).unwrap();
        assert_eq!(r.violation.hits, 0);
        // h(1) = 1 = t leaves an empty window
        let r = estimate_envelope_violation(&e, &sys, EnvelopeEvent::Loose, &p, 1, 2000, 5, 0.99).unwrap();
        assert_eq!(r.violation.hits, 0);
    }

    #[test]
    fn dominance_of_identical_samples_has_zero_margin() {
        let x: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let r = dominance_check(&x, &x, 0.99);
        assert_eq!(r.worst_margin, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn dominance_detects_reversed_order() {
        let small: Vec<f64> = (0..2000).map(|i| i as f64 / 2000.0).collect();
        let large: Vec<f64> = small.iter().map(|x| x * 3.0).collect();
        assert!(dominance_check(&small, &large, 0.99).holds);
        let r = dominance_check(&large, &small, 0.99);
        assert!(!r.holds && r.worst_margin > 0.5);
    }

    #[test]
    fn quantile_interpolates() {
        let s = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(quantile(&s, 0.0), 0.0);
        assert_eq!(quantile(&s, 1.0), 3.0);
        assert!((quantile(&s, 0.5) - 1.5).abs() < 1e-15);
    }
}
