//! State machines for the two-agent difference process and the bistar
//! leader/follower process.
//!
//! Only opinion differences are tracked. All trajectories start from zero
//! difference.
//!
//! Variate order per step is fixed:
//!
//! * two-agent: `(u, ñ)`;
//! * bistar: `(u_G, ñ, u_f, ñ_f1, u_g, ñ_g2)`.
//!
//! With [`NoiseMode::PerAgent`] each `ñ` is replaced by the two agent draws
//! it is formed from, giving `(u, n_1, n_2)` and
//! `(u_G, n_1, n_2, u_f, n_f, u_g, n_g)`.

use alloc::vec::Vec;

use crate::influence::InfluenceFunction;
use crate::noise::NoiseModel;
use crate::rng::{RandomSource, Variates};

/// How difference increments are produced from the noise model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NoiseMode {
    /// The model is the law of the difference increment itself; every
    /// difference gets its own independent draw.
    #[default]
    Difference,
    /// The model is the law of each agent's own noise `n_u`; differences are
    /// formed as `n_u - n_v`, so increments sharing an agent are correlated.
    PerAgent,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DiffState {
    /// `Y(t) = X_1(t) - X_2(t)`.
    pub y: f64,
    pub t: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BistarState {
    /// Leader difference `X_1 - X_2`.
    pub y: f64,
    /// `X_f - X_1` for a follower `f` of leader 1.
    pub y_f1: f64,
    /// `X_g - X_2` for a follower `g` of leader 2.
    pub y_g2: f64,
    pub t: u64,
}

impl BistarState {
    /// Cross-group difference `X_f - X_g`, always rebuilt from the stored
    /// differences.
    #[inline]
    pub fn y_fg(&self) -> f64 {
        self.y_f1 + self.y - self.y_g2
    }

    pub fn get(&self, kind: PathKind) -> f64 {
        match kind {
            PathKind::Leader => self.y,
            PathKind::Follower => self.y_f1,
            PathKind::RivalFollower => self.y_g2,
            PathKind::Cross => self.y_fg(),
        }
    }
}

/// Which difference a path records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PathKind {
    /// `Y = X_1 - X_2`.
    Leader,
    /// `Y_f1 = X_f - X_1`.
    Follower,
    /// `Y_g2 = X_g - X_2`.
    RivalFollower,
    /// `Y_fg = X_f - X_g`.
    Cross,
}

impl PathKind {
    pub const ALL: [PathKind; 4] = [Self::Leader, Self::Follower, Self::RivalFollower, Self::Cross];

    pub fn label(self) -> &'static str {
        match self {
            Self::Leader => "y",
            Self::Follower => "y_f1",
            Self::RivalFollower => "y_g2",
            Self::Cross => "y_fg",
        }
    }
}

/// A recorded trajectory, `values[t]` for `t = 0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub kind: PathKind,
    pub values: Vec<f64>,
    /// `(master_seed, stream_id)` of the source that generated the path, when known.
    pub provenance: Option<(u64, u64)>,
}

impl SamplePath {
    pub fn horizon(&self) -> u64 {
        self.values.len().saturating_sub(1) as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoAgentSystem {
    pub influence: InfluenceFunction,
    pub noise: NoiseModel,
    pub noise_mode: NoiseMode,
}

impl TwoAgentSystem {
    pub fn new(influence: InfluenceFunction, noise: NoiseModel) -> Self {
        Self { influence, noise, noise_mode: NoiseMode::Difference }
    }

    pub fn with_noise_mode(mut self, mode: NoiseMode) -> Self {
        self.noise_mode = mode;
        self
    }

    #[inline]
    fn increment<V: Variates>(&self, v: &mut V) -> f64 {
        match self.noise_mode {
            NoiseMode::Difference => v.noise(&self.noise),
            NoiseMode::PerAgent => {
                let n1 = v.noise(&self.noise);
                let n2 = v.noise(&self.noise);
                n1 - n2
            }
        }
    }

    /// One synchronous update: with probability `G(|y|)` the agents meet at
    /// the average and only the noise remains, otherwise the noise is added.
    #[inline]
    pub fn step<V: Variates>(&self, state: DiffState, v: &mut V) -> DiffState {
        let u = v.coin();
        let n = self.increment(v);
        let y = if u < self.influence.at(state.y.abs()) { n } else { state.y + n };
        DiffState { y, t: state.t + 1 }
    }

    pub fn simulate<V: Variates>(&self, horizon: u64, v: &mut V) -> SamplePath {
        let mut values = Vec::with_capacity(horizon as usize + 1);
        let mut state = DiffState::default();
        values.push(state.y);
        for _ in 0..horizon {
            state = self.step(state, v);
            values.push(state.y);
        }
        SamplePath { kind: PathKind::Leader, values, provenance: None }
    }

    /// [`simulate`](Self::simulate) with the provenance recorded.
    pub fn simulate_seeded(&self, horizon: u64, source: &mut RandomSource) -> SamplePath {
        let key = (source.master_seed(), source.stream_id());
        let mut path = self.simulate(horizon, source);
        path.provenance = Some(key);
        path
    }
}

/// The four time-aligned paths of a bistar run.
#[derive(Debug, Clone, PartialEq)]
pub struct BistarPaths {
    pub leader: SamplePath,
    pub follower: SamplePath,
    pub rival_follower: SamplePath,
    pub cross: SamplePath,
}

impl BistarPaths {
    pub fn get(&self, kind: PathKind) -> &SamplePath {
        match kind {
            PathKind::Leader => &self.leader,
            PathKind::Follower => &self.follower,
            PathKind::RivalFollower => &self.rival_follower,
            PathKind::Cross => &self.cross,
        }
    }
}

/// Two leaders interacting through `leader_influence`, each pulling its own
/// followers through `follower_influence`. Followers never influence anyone.
#[derive(Debug, Clone, PartialEq)]
pub struct BistarSystem {
    pub leader_influence: InfluenceFunction,
    pub follower_influence: InfluenceFunction,
    pub noise: NoiseModel,
    pub noise_mode: NoiseMode,
}

impl BistarSystem {
    pub fn new(leader_influence: InfluenceFunction, follower_influence: InfluenceFunction, noise: NoiseModel) -> Self {
        Self { leader_influence, follower_influence, noise, noise_mode: NoiseMode::Difference }
    }

    pub fn with_noise_mode(mut self, mode: NoiseMode) -> Self {
        self.noise_mode = mode;
        self
    }

    /// Synchronous update of all three stored differences.
    ///
    /// When the leaders interact, leader 1 moves by `-y/2` and leader 2 by
    /// `+y/2` (with `y` the pre-step leader difference), which shows up as
    /// `+y/2` in `Y_f1` and `-y/2` in `Y_g2`. A follower that is influenced
    /// jumps to its leader's pre-step opinion plus its own noise.
    #[inline]
    pub fn step<V: Variates>(&self, s: BistarState, v: &mut V) -> BistarState {
        let u_lead = v.coin();
        let (n, n1, n2) = match self.noise_mode {
            NoiseMode::Difference => (v.noise(&self.noise), 0.0, 0.0),
            NoiseMode::PerAgent => {
                let n1 = v.noise(&self.noise);
                let n2 = v.noise(&self.noise);
                (n1 - n2, n1, n2)
            }
        };
        let leaders_meet = u_lead < self.leader_influence.at(s.y.abs());
        let y = if leaders_meet { n } else { s.y + n };

        let u_f = v.coin();
        let n_f1 = match self.noise_mode {
            NoiseMode::Difference => v.noise(&self.noise),
            NoiseMode::PerAgent => v.noise(&self.noise) - n1,
        };
        let f_follows = u_f < self.follower_influence.at(s.y_f1.abs());

        let u_g = v.coin();
        let n_g2 = match self.noise_mode {
            NoiseMode::Difference => v.noise(&self.noise),
            NoiseMode::PerAgent => v.noise(&self.noise) - n2,
        };
        let g_follows = u_g < self.follower_influence.at(s.y_g2.abs());

        let half = s.y / 2.0;
        let y_f1 = follower_update(leaders_meet, f_follows, half, s.y_f1, n_f1);
        let y_g2 = follower_update(leaders_meet, g_follows, -half, s.y_g2, n_g2);
        BistarState { y, y_f1, y_g2, t: s.t + 1 }
    }

    pub fn simulate<V: Variates>(&self, horizon: u64, v: &mut V) -> BistarPaths {
        let cap = horizon as usize + 1;
        let mut cols: [Vec<f64>; 4] = core::array::from_fn(|_| Vec::with_capacity(cap));
        let mut state = BistarState::default();
        let mut record = |s: &BistarState| {
            for (col, kind) in cols.iter_mut().zip(PathKind::ALL) {
                col.push(s.get(kind));
            }
        };
        record(&state);
        for _ in 0..horizon {
            state = self.step(state, v);
            record(&state);
        }
        let [leader, follower, rival_follower, cross] = cols;
        let path = |kind, values| SamplePath { kind, values, provenance: None };
        BistarPaths {
            leader: path(PathKind::Leader, leader),
            follower: path(PathKind::Follower, follower),
            rival_follower: path(PathKind::RivalFollower, rival_follower),
            cross: path(PathKind::Cross, cross),
        }
    }

    pub fn simulate_seeded(&self, horizon: u64, source: &mut RandomSource) -> BistarPaths {
        let key = Some((source.master_seed(), source.stream_id()));
        let mut paths = self.simulate(horizon, source);
        for p in [&mut paths.leader, &mut paths.follower, &mut paths.rival_follower, &mut paths.cross] {
            p.provenance = key;
        }
        paths
    }
}

/// The four follower cases: reset to the leader, drift, reset to the moved
/// leader, drift plus the leader's move.
#[inline]
fn follower_update(leaders_meet: bool, follows: bool, leader_shift: f64, diff: f64, noise: f64) -> f64 {
    match (leaders_meet, follows) {
        (false, true) => noise,
        (false, false) => diff + noise,
        (true, true) => leader_shift + noise,
        (true, false) => leader_shift + diff + noise,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Mirrored;
    use alloc::collections::VecDeque;
    use alloc::vec;
    use proptest::prelude::*;

    /// Replays fixed coins and noise values.
    struct Script {
        coins: VecDeque<f64>,
        noise: VecDeque<f64>,
    }

    impl Script {
        fn new(coins: &[f64], noise: &[f64]) -> Self {
            Self { coins: coins.iter().copied().collect(), noise: noise.iter().copied().collect() }
        }
    }

    impl Variates for Script {
        fn coin(&mut self) -> f64 {
            self.coins.pop_front().expect("script ran out of coins")
        }
        fn noise(&mut self, _: &NoiseModel) -> f64 {
            self.noise.pop_front().expect("script ran out of noise")
        }
    }

    fn uniform20() -> NoiseModel {
        NoiseModel::uniform(20.0).unwrap()
    }

    fn decay_g() -> InfluenceFunction {
        InfluenceFunction::rational(1.0, 0.5).unwrap()
    }

    #[test]
    fn branches_coincide_at_zero() {
        let sys = TwoAgentSystem::new(decay_g(), uniform20());
        for u in [0.01, 0.5, 0.99999] {
            let next = sys.step(DiffState::default(), &mut Script::new(&[u], &[3.25]));
            assert_eq!(next, DiffState { y: 3.25, t: 1 });
        }
    }

    #[test]
    fn certain_influence_resets() {
        let sys = TwoAgentSystem::new(InfluenceFunction::always(), uniform20());
        for u in [0.0001, 0.7, 0.9999] {
            let next = sys.step(DiffState { y: 7.0, t: 3 }, &mut Script::new(&[u], &[-1.0]));
            assert_eq!(next, DiffState { y: -1.0, t: 4 });
        }
    }

    #[test]
    fn coin_below_influence_takes_reset_branch() {
        // G(4) = 1 / (1 + 2) > 0.2
        let sys = TwoAgentSystem::new(decay_g(), uniform20());
        let next = sys.step(DiffState { y: 4.0, t: 0 }, &mut Script::new(&[0.2], &[1.5]));
        assert_eq!(next.y, 1.5);
        let next = sys.step(DiffState { y: 4.0, t: 0 }, &mut Script::new(&[0.4], &[1.5]));
        assert_eq!(next.y, 5.5);
    }

    #[test]
    fn zero_horizon_path() {
        let sys = TwoAgentSystem::new(decay_g(), uniform20());
        let path = sys.simulate(0, &mut RandomSource::new(1, 1));
        assert_eq!(path.values, vec![0.0]);
        let b = BistarSystem::new(decay_g(), decay_g(), uniform20()).simulate(0, &mut RandomSource::new(1, 1));
        for kind in PathKind::ALL {
            assert_eq!(b.get(kind).values, vec![0.0]);
        }
    }

    #[test]
    fn no_influence_is_a_running_sum() {
        let sys = TwoAgentSystem::new(InfluenceFunction::never(), uniform20());
        let path = sys.simulate(50, &mut RandomSource::new(5, 2));
        let mut replay = RandomSource::new(5, 2);
        let mut sum = 0.0;
        for t in 1..=50 {
            let _coin = replay.coin();
            sum += replay.noise(&sys.noise);
            assert_eq!(path.values[t], sum);
        }
    }

    #[test]
    fn bistar_follower_cases() {
        let noise = uniform20();
        let s = BistarState { y: 6.0, y_f1: 1.0, y_g2: -2.0, t: 0 };
        // G ≡ 0, G̃ ≡ 1: followers reset onto their leaders
        let sys = BistarSystem::new(InfluenceFunction::never(), InfluenceFunction::always(), noise.clone());
        let next = sys.step(s, &mut Script::new(&[0.5, 0.5, 0.5], &[0.25, 0.5, 0.75]));
        assert_eq!((next.y, next.y_f1, next.y_g2), (6.25, 0.5, 0.75));
        // G ≡ 1, G̃ ≡ 0: followers drift and feel the leader move
        let sys = BistarSystem::new(InfluenceFunction::always(), InfluenceFunction::never(), noise.clone());
        let next = sys.step(s, &mut Script::new(&[0.5, 0.5, 0.5], &[0.25, 0.5, 0.75]));
        assert_eq!(next.y, 0.25);
        assert_eq!(next.y_f1, 3.0 + 1.0 + 0.5);
        assert_eq!(next.y_g2, -3.0 - 2.0 + 0.75);
        // G ≡ 1, G̃ ≡ 1: reset onto the moved leader
        let sys = BistarSystem::new(InfluenceFunction::always(), InfluenceFunction::always(), noise);
        let next = sys.step(s, &mut Script::new(&[0.5, 0.5, 0.5], &[0.25, 0.5, 0.75]));
        assert_eq!((next.y_f1, next.y_g2), (3.5, -2.25));
    }

    #[test]
    fn follower_resets_every_step_under_full_follower_influence() {
        let sys = BistarSystem::new(InfluenceFunction::never(), InfluenceFunction::always(), uniform20());
        let paths = sys.simulate(30, &mut RandomSource::new(3, 0));
        let mut replay = RandomSource::new(3, 0);
        for t in 1..=30 {
            replay.coin();
            replay.noise(&sys.noise);
            replay.coin();
            let n_f1 = replay.noise(&sys.noise);
            replay.coin();
            replay.noise(&sys.noise);
            assert_eq!(paths.follower.values[t], n_f1);
        }
    }

    /// Raw-opinion simulation of the bistar graph with per-agent noise, kept
    /// deliberately independent of the difference-level update.
    fn raw_opinions(sys: &BistarSystem, horizon: u64, seed: u64) -> Vec<[f64; 4]> {
        let mut v = RandomSource::new(seed, 0);
        let (mut x1, mut x2, mut xf, mut xg) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let mut out = vec![[0.0; 4]];
        for _ in 0..horizon {
            let u = v.coin();
            let n1 = v.noise(&sys.noise);
            let n2 = v.noise(&sys.noise);
            let uf = v.coin();
            let nf = v.noise(&sys.noise);
            let ug = v.coin();
            let ng = v.noise(&sys.noise);
            let meet = u < sys.leader_influence.at((x1 - x2).abs());
            let f_follows = uf < sys.follower_influence.at((xf - x1).abs());
            let g_follows = ug < sys.follower_influence.at((xg - x2).abs());
            let avg = (x1 + x2) / 2.0;
            let (nx1, nx2) = if meet { (avg + n1, avg + n2) } else { (x1 + n1, x2 + n2) };
            let nxf = if f_follows { x1 + nf } else { xf + nf };
            let nxg = if g_follows { x2 + ng } else { xg + ng };
            (x1, x2, xf, xg) = (nx1, nx2, nxf, nxg);
            out.push([x1 - x2, xf - x1, xg - x2, xf - xg]);
        }
        out
    }

    #[test]
    fn difference_update_matches_raw_opinions() {
        let sys = BistarSystem::new(
            InfluenceFunction::rational(1.0, 0.5).unwrap(),
            InfluenceFunction::rational(1.0, 0.2).unwrap(),
            uniform20(),
        )
        .with_noise_mode(NoiseMode::PerAgent);
        for seed in 0..20 {
            let raw = raw_opinions(&sys, 200, seed);
            let paths = sys.simulate(200, &mut RandomSource::new(seed, 0));
            for (t, r) in raw.iter().enumerate() {
                for (k, kind) in PathKind::ALL.iter().enumerate() {
                    let got = paths.get(*kind).values[t];
                    assert!((got - r[k]).abs() < 1e-9 * (1.0 + r[k].abs()), "t={t} {kind:?}: {got} vs {}", r[k]);
                }
            }
        }
    }

    #[test]
    fn seeded_paths_record_provenance() {
        let sys = TwoAgentSystem::new(decay_g(), uniform20());
        let p = sys.simulate_seeded(3, &mut RandomSource::new(11, 4));
        assert_eq!(p.provenance, Some((11, 4)));
        assert_eq!(p.horizon(), 3);
    }

    fn influence() -> impl Strategy<Value = InfluenceFunction> {
        prop_oneof![
            (0.05f64..=1.0, 0.1f64..3.0).prop_map(|(g, a)| InfluenceFunction::rational(g, a).unwrap()),
            (0.05f64..=1.0, 0.0f64..40.0).prop_map(|(g, d)| InfluenceFunction::threshold(g, d).unwrap()),
            (0.0f64..=1.0).prop_map(|g| InfluenceFunction::constant(g).unwrap()),
        ]
    }

    fn noise() -> impl Strategy<Value = NoiseModel> {
        prop_oneof![
            (0.1f64..50.0).prop_map(|d| NoiseModel::uniform(d).unwrap()),
            (0.1f64..10.0).prop_map(|s| NoiseModel::gaussian(s).unwrap()),
            Just(NoiseModel::discrete(&[-2.0, 0.0, 2.0], &[0.25, 0.5, 0.25]).unwrap()),
        ]
    }

    fn mode() -> impl Strategy<Value = NoiseMode> {
        prop_oneof![Just(NoiseMode::Difference), Just(NoiseMode::PerAgent)]
    }

    proptest! {
        #[test]
        fn mirrored_noise_negates_two_agent_paths(g in influence(), n in noise(), m in mode(), seed: u64) {
            let sys = TwoAgentSystem::new(g, n).with_noise_mode(m);
            let a = sys.simulate(60, &mut RandomSource::new(seed, 1));
            let b = sys.simulate(60, &mut Mirrored(RandomSource::new(seed, 1)));
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!(x.to_bits() == (-*y).to_bits() || (*x == 0.0 && *y == 0.0));
            }
        }

        #[test]
        fn mirrored_noise_negates_bistar_paths(g in influence(), gt in influence(), n in noise(), m in mode(), seed: u64) {
            let sys = BistarSystem::new(g, gt, n).with_noise_mode(m);
            let a = sys.simulate(60, &mut RandomSource::new(seed, 2));
            let b = sys.simulate(60, &mut Mirrored(RandomSource::new(seed, 2)));
            for kind in PathKind::ALL {
                for (x, y) in a.get(kind).values.iter().zip(&b.get(kind).values) {
                    prop_assert!(x.to_bits() == (-*y).to_bits() || (*x == 0.0 && *y == 0.0));
                }
            }
        }

        #[test]
        fn bounded_noise_envelope(g in influence(), d in 0.1f64..50.0, seed: u64) {
            let sys = TwoAgentSystem::new(g, NoiseModel::uniform(d).unwrap());
            let p = sys.simulate(200, &mut RandomSource::new(seed, 0));
            for (t, y) in p.values.iter().enumerate() {
                prop_assert!(y.abs() <= d * t as f64);
            }
        }

        #[test]
        fn identical_keys_identical_paths(g in influence(), n in noise(), seed: u64, stream: u64) {
            let sys = BistarSystem::new(g, g, n);
            let a = sys.simulate(40, &mut RandomSource::new(seed, stream));
            let b = sys.simulate(40, &mut RandomSource::new(seed, stream));
            prop_assert_eq!(a, b);
        }

        #[test]
        fn follower_drift_cap_under_leader_envelope(seed: u64, horizon in 4u64..300) {
            let d = 20.0;
            let sys = BistarSystem::new(
                InfluenceFunction::rational(1.0, 0.5).unwrap(),
                InfluenceFunction::rational(1.0, 0.1167).unwrap(),
                NoiseModel::uniform(d).unwrap(),
            );
            let paths = sys.simulate(horizon, &mut RandomSource::new(seed, 0));
            let t = horizon as f64;
            let warmup = libm::floor(libm::pow(t, 0.5)) as usize;
            let leader = &paths.leader.values;
            let envelope_holds = (warmup..horizon as usize).all(|tau| leader[tau].abs() <= d * (tau as f64).sqrt());
            if envelope_holds {
                prop_assert!(paths.follower.values[horizon as usize] <= 2.0 * d * t * t.sqrt());
            }
        }
    }
}
