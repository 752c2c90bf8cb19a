//! Exact laws of the difference processes for lattice noise.
//!
//! The noise atoms must be integer multiples of a grid step `s`. The leader
//! difference then lives on `s ℤ` and the follower difference on
//! `(s/2) ℤ`: the follower's pull adds `y/2` with `y ∈ s ℤ`, and every other
//! term is already on `s ℤ`, so one halving is all the dyadic depth the
//! joint lattice ever needs. Points are stored as exact integer indices.
//!
//! Masses below [`PRUNE_THRESHOLD`] are dropped after each step and the
//! dropped total is reported.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::influence::InfluenceFunction;
use crate::math;
use crate::noise::{DiscreteNoise, NoiseModel};

pub const PRUNE_THRESHOLD: f64 = 1e-18;

/// Default cap on the total mass dropped by pruning.
pub const DEFAULT_PRUNE_BUDGET: f64 = 1e-9;

/// Default cap on the number of atoms of the joint bistar law.
pub const DEFAULT_ATOM_BUDGET: usize = 4_000_000;

/// Relative tolerance for recognising atoms as multiples of the grid step.
const GRID_TOLERANCE: f64 = 1e-9;

/// Largest atom, in grid steps, accepted as a lattice. Incommensurate atoms
/// drive the float Euclid down to a tiny step and land far above this.
const MAX_GRID_OFFSET: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// Only discrete noise has an exact lattice law.
    NotDiscrete,
    /// Atoms are not integer multiples of a common step.
    NotLattice { point: f64, step: f64 },
    /// The joint lattice outgrew the atom budget.
    AtomBudget { requested: usize, allowed: usize },
    /// Pruning dropped more mass than allowed.
    PruneBudget { pruned: f64, allowed: f64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotDiscrete => f.write_str("exact computation needs discrete noise"),
            Self::NotLattice { point, step } => write!(f, "noise atom {point} is not a multiple of grid step {step}"),
            Self::AtomBudget { requested, allowed } => {
                write!(f, "joint lattice needs {requested} atoms, budget is {allowed}")
            }
            Self::PruneBudget { pruned, allowed } => write!(f, "pruned mass {pruned:e} exceeds budget {allowed:e}"),
        }
    }
}

/// Resource limits of the dynamic programs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    pub max_atoms: usize,
    pub max_pruned_mass: f64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { max_atoms: DEFAULT_ATOM_BUDGET, max_pruned_mass: DEFAULT_PRUNE_BUDGET }
    }
}

/// Noise law as integer offsets on a grid of step `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeNoise {
    pub step: f64,
    /// `(offset, mass)` with `offset * step` the atom.
    pub atoms: Vec<(i64, f64)>,
}

impl LatticeNoise {
    pub fn from_model(model: &NoiseModel) -> Result<Self, OracleError> {
        match model {
            NoiseModel::DiscreteSymmetric(d) => Self::from_discrete(d),
            _ => Err(OracleError::NotDiscrete),
        }
    }

    /// Uses the largest step dividing every atom.
    pub fn from_discrete(noise: &DiscreteNoise) -> Result<Self, OracleError> {
        let step = noise
            .points()
            .iter()
            .map(|&x| math::abs(x))
            .filter(|&x| x > 0.0)
            .fold(0.0, float_gcd);
        if step == 0.0 {
            // all mass at zero
            return Ok(Self { step: 1.0, atoms: vec![(0, 1.0)] });
        }
        let mut atoms = Vec::with_capacity(noise.points().len());
        for (x, p) in noise.atoms() {
            let q = x / step;
            let n = libm::round(q);
            if math::abs(q) > MAX_GRID_OFFSET || math::abs(q - n) > GRID_TOLERANCE * math::abs(q).max(1.0) {
                return Err(OracleError::NotLattice { point: x, step });
            }
            if p > 0.0 {
                atoms.push((n as i64, p));
            }
        }
        Ok(Self { step, atoms })
    }

    fn max_offset(&self) -> i64 {
        self.atoms.iter().map(|&(n, _)| n.abs()).max().unwrap_or(0)
    }
}

/// Euclid on floats, treating remainders below the tolerance as zero.
fn float_gcd(a: f64, b: f64) -> f64 {
    let (mut a, mut b) = if a >= b { (a, b) } else { (b, a) };
    let scale = a.max(1.0);
    while b > GRID_TOLERANCE * scale {
        let r = libm::fmod(a, b);
        a = b;
        b = if b - r < GRID_TOLERANCE * scale { 0.0 } else { r };
    }
    a
}

/// Law of a difference on the lattice `step · ℤ`, stored densely over
/// indices `offset .. offset + masses.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDistribution {
    pub t: u64,
    pub step: f64,
    offset: i64,
    masses: Vec<f64>,
    /// Total mass dropped by pruning so far.
    pub pruned_mass: f64,
}

impl LatticeDistribution {
    fn point_mass(step: f64) -> Self {
        Self { t: 0, step, offset: 0, masses: vec![1.0], pruned_mass: 0.0 }
    }

    /// Nonzero atoms as `(lattice index, mass)`.
    pub fn atoms(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(move |(i, &m)| (self.offset + i as i64, m))
    }

    /// Nonzero atoms as `(point, mass)`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms().map(move |(i, m)| (i as f64 * self.step, m))
    }

    /// Mass at lattice index `i`.
    pub fn mass_at(&self, i: i64) -> f64 {
        let j = i - self.offset;
        if j < 0 {
            return 0.0;
        }
        self.masses.get(j as usize).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    fn min_index(&self) -> i64 {
        self.offset
    }

    fn max_index(&self) -> i64 {
        self.offset + self.masses.len() as i64 - 1
    }

    /// Drops masses below the threshold and trims empty ends.
    fn prune(&mut self) {
        for m in &mut self.masses {
            if *m < PRUNE_THRESHOLD {
                self.pruned_mass += *m;
                *m = 0.0;
            }
        }
        let first = self.masses.iter().position(|&m| m > 0.0).unwrap_or(0);
        let last = self.masses.iter().rposition(|&m| m > 0.0).unwrap_or(0);
        self.masses = self.masses[first..=last].to_vec();
        self.offset += first as i64;
    }

    /// Replaces `m(i)` and `m(-i)` with their average. The exact law is
    /// symmetric; this removes the rounding asymmetry of the summation order.
    fn symmetrize(&mut self) {
        let hi = self.max_index().max(-self.min_index());
        let mut sym = vec![0.0; 2 * hi as usize + 1];
        for i in 0..=hi {
            let m = 0.5 * (self.mass_at(i) + self.mass_at(-i));
            sym[(hi + i) as usize] = m;
            sym[(hi - i) as usize] = m;
        }
        self.masses = sym;
        self.offset = -hi;
    }
}

/// `P(|Y| >= k)` under `dist`.
pub fn exact_tail(dist: &LatticeDistribution, k: f64) -> f64 {
    dist.points().filter(|&(x, _)| math::abs(x) >= k).map(|(_, m)| m).sum()
}

/// Exact law of the two-agent difference `Y(horizon)` from `Y(0) = 0`.
///
/// Each atom `y` sends mass `G(|y|)` onto the noise law and `1 - G(|y|)`
/// onto the noise law shifted by `y`.
pub fn exact_diff_distribution(
    g: &InfluenceFunction,
    noise: &NoiseModel,
    horizon: u64,
) -> Result<LatticeDistribution, OracleError> {
    exact_diff_distribution_with(g, noise, horizon, OracleBudget::default())
}

pub fn exact_diff_distribution_with(
    g: &InfluenceFunction,
    noise: &NoiseModel,
    horizon: u64,
    budget: OracleBudget,
) -> Result<LatticeDistribution, OracleError> {
    let lattice = LatticeNoise::from_model(noise)?;
    let reach = lattice.max_offset();
    let mut dist = LatticeDistribution::point_mass(lattice.step);
    for _ in 0..horizon {
        let lo = dist.min_index() - reach;
        let hi = dist.max_index() + reach;
        let width = (hi - lo + 1) as usize;
        if width > budget.max_atoms {
            return Err(OracleError::AtomBudget { requested: width, allowed: budget.max_atoms });
        }
        let mut next = vec![0.0; width];
        let mut reset = 0.0;
        for (y, m) in dist.atoms() {
            let p = g.at(math::abs(y as f64 * lattice.step));
            reset += m * p;
            let keep = m * (1.0 - p);
            if keep > 0.0 {
                for &(n, q) in &lattice.atoms {
                    next[(y + n - lo) as usize] += keep * q;
                }
            }
        }
        for &(n, q) in &lattice.atoms {
            next[(n - lo) as usize] += reset * q;
        }
        dist = LatticeDistribution { t: dist.t + 1, step: dist.step, offset: lo, masses: next, pruned_mass: dist.pruned_mass };
        dist.symmetrize();
        dist.prune();
        if dist.pruned_mass > budget.max_pruned_mass {
            return Err(OracleError::PruneBudget { pruned: dist.pruned_mass, allowed: budget.max_pruned_mass });
        }
    }
    Ok(dist)
}

/// Exact joint law of `(Y, Y_f1)`. `Y` is indexed on `step · ℤ` and `Y_f1`
/// on `(step / 2) · ℤ`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLatticeDistribution {
    pub t: u64,
    pub step: f64,
    /// `(leader index, follower half-index) -> mass`.
    pub masses: BTreeMap<(i64, i64), f64>,
    pub pruned_mass: f64,
}

impl JointLatticeDistribution {
    /// Law of `Y` on `step · ℤ`.
    pub fn leader_marginal(&self) -> LatticeDistribution {
        self.marginal(|&(i, _)| i, self.step)
    }

    /// Law of `Y_f1` on `(step / 2) · ℤ`.
    pub fn follower_marginal(&self) -> LatticeDistribution {
        self.marginal(|&(_, j)| j, self.step / 2.0)
    }

    fn marginal(&self, key: impl Fn(&(i64, i64)) -> i64, step: f64) -> LatticeDistribution {
        let mut acc: BTreeMap<i64, f64> = BTreeMap::new();
        for (k, &m) in &self.masses {
            *acc.entry(key(k)).or_insert(0.0) += m;
        }
        let (lo, hi) = match (acc.keys().next(), acc.keys().next_back()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (0, 0),
        };
        let mut masses = vec![0.0; (hi - lo + 1) as usize];
        for (i, m) in acc {
            masses[(i - lo) as usize] = m;
        }
        LatticeDistribution { t: self.t, step, offset: lo, masses, pruned_mass: self.pruned_mass }
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.values().sum()
    }
}

/// Exact joint law of the leader difference and one follower difference of
/// the bistar process after `horizon` steps, all differences starting at 0.
pub fn exact_bistar_distribution(
    g: &InfluenceFunction,
    g_tilde: &InfluenceFunction,
    noise: &NoiseModel,
    horizon: u64,
    budget: OracleBudget,
) -> Result<JointLatticeDistribution, OracleError> {
    let lattice = LatticeNoise::from_model(noise)?;
    let s = lattice.step;
    let mut dist = JointLatticeDistribution { t: 0, step: s, masses: BTreeMap::new(), pruned_mass: 0.0 };
    dist.masses.insert((0, 0), 1.0);
    for _ in 0..horizon {
        let mut next: BTreeMap<(i64, i64), f64> = BTreeMap::new();
        for (&(i, j), &m) in &dist.masses {
            let pg = g.at(math::abs(i as f64 * s));
            let pf = g_tilde.at(math::abs(j as f64 * s / 2.0));
            // follower half-index before its own noise, per (meet, follows)
            let cases = [
                (false, true, (1.0 - pg) * pf, 0),
                (false, false, (1.0 - pg) * (1.0 - pf), j),
                (true, true, pg * pf, i),
                (true, false, pg * (1.0 - pf), i + j),
            ];
            for (meet, _, w, base) in cases {
                if w == 0.0 {
                    continue;
                }
                for &(n, q) in &lattice.atoms {
                    let leader = if meet { n } else { i + n };
                    for &(nf, qf) in &lattice.atoms {
                        *next.entry((leader, base + 2 * nf)).or_insert(0.0) += m * w * q * qf;
                    }
                }
            }
            if next.len() > budget.max_atoms {
                return Err(OracleError::AtomBudget { requested: next.len(), allowed: budget.max_atoms });
            }
        }
        let mut pruned = 0.0;
        next.retain(|_, m| {
            if *m < PRUNE_THRESHOLD {
                pruned += *m;
                false
            } else {
                true
            }
        });
        dist = JointLatticeDistribution { t: dist.t + 1, step: s, masses: next, pruned_mass: dist.pruned_mass + pruned };
        if dist.pruned_mass > budget.max_pruned_mass {
            return Err(OracleError::PruneBudget { pruned: dist.pruned_mass, allowed: budget.max_pruned_mass });
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_point() -> NoiseModel {
        NoiseModel::discrete(&[-2.0, 0.0, 2.0], &[0.25, 0.5, 0.25]).unwrap()
    }

    fn inv_linear() -> InfluenceFunction {
        InfluenceFunction::rational(1.0, 1.0).unwrap()
    }

    fn law(d: &LatticeDistribution) -> Vec<(f64, f64)> {
        d.points().collect()
    }

    #[test]
    fn one_step_law_is_noise_law() {
        for g in [inv_linear(), InfluenceFunction::never(), InfluenceFunction::always()] {
            let d = exact_diff_distribution(&g, &three_point(), 1).unwrap();
            assert_eq!(law(&d), vec![(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]);
        }
    }

    #[test]
    fn zero_influence_is_convolution() {
        let d = exact_diff_distribution(&InfluenceFunction::never(), &three_point(), 2).unwrap();
        assert_eq!(law(&d), vec![(-4.0, 0.0625), (-2.0, 0.25), (0.0, 0.375), (2.0, 0.25), (4.0, 0.0625)]);
    }

    #[test]
    fn zero_horizon_is_point_mass() {
        let d = exact_diff_distribution(&inv_linear(), &three_point(), 0).unwrap();
        assert_eq!(law(&d), vec![(0.0, 1.0)]);
        assert_eq!(exact_tail(&d, 0.0), 1.0);
    }

    /// All `9^3` coin-branch/noise paths of three steps, enumerated directly.
    fn brute_force_tail(k: f64) -> f64 {
        let g = inv_linear();
        let noise = [(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)];
        fn walk(g: &InfluenceFunction, noise: &[(f64, f64)], y: f64, steps: u32, k: f64) -> f64 {
            if steps == 0 {
                return if y.abs() >= k { 1.0 } else { 0.0 };
            }
            let p = g.at(y.abs());
            noise
                .iter()
                .map(|&(n, q)| q * (p * walk(g, noise, n, steps - 1, k) + (1.0 - p) * walk(g, noise, y + n, steps - 1, k)))
                .sum()
        }
        walk(&g, &noise, 0.0, 3, k)
    }

    #[test]
    fn tail_matches_path_enumeration() {
        let d = exact_diff_distribution(&inv_linear(), &three_point(), 3).unwrap();
        for k in [0.0, 2.0, 4.0, 6.0] {
            assert!((exact_tail(&d, k) - brute_force_tail(k)).abs() < 1e-15, "k = {k}");
        }
        // P(|Y(3)| >= 4) in closed form: 2 · (1/16 · 1/2 · ... ) summed by hand
        assert!((exact_tail(&d, 4.0) - brute_force_tail(4.0)).abs() < 1e-15);
        assert_eq!(exact_tail(&d, 7.0), 0.0);
    }

    #[test]
    fn mass_conserved_and_symmetric() {
        let g = InfluenceFunction::rational(1.0, 0.5).unwrap();
        let d = exact_diff_distribution(&g, &three_point(), 40).unwrap();
        assert!((d.total_mass() + d.pruned_mass - 1.0).abs() < 1e-12);
        for (i, m) in d.atoms() {
            assert_eq!(m, d.mass_at(-i));
        }
    }

    #[test]
    fn influence_dominated_by_random_walk_exactly() {
        let noise = three_point();
        let walk = exact_diff_distribution(&InfluenceFunction::never(), &noise, 20).unwrap();
        for g in [inv_linear(), InfluenceFunction::rational(1.0, 0.5).unwrap(), InfluenceFunction::always()] {
            let d = exact_diff_distribution(&g, &noise, 20).unwrap();
            for k in 0..=40 {
                let k = k as f64;
                assert!(exact_tail(&d, k) <= exact_tail(&walk, k) + 1e-14, "k = {k}");
            }
        }
    }

    #[test]
    fn non_lattice_and_continuous_noise_rejected() {
        let irrational = NoiseModel::discrete(&[-1.0, -core::f64::consts::SQRT_2, 1.0, core::f64::consts::SQRT_2], &[0.25; 4]).unwrap();
        assert!(matches!(exact_diff_distribution(&inv_linear(), &irrational, 2), Err(OracleError::NotLattice { .. })));
        let u = NoiseModel::uniform(1.0).unwrap();
        assert_eq!(exact_diff_distribution(&inv_linear(), &u, 2), Err(OracleError::NotDiscrete));
    }

    #[test]
    fn grid_step_is_common_divisor() {
        let noise = NoiseModel::discrete(&[-3.0, -2.0, 2.0, 3.0], &[0.25; 4]).unwrap();
        let l = LatticeNoise::from_model(&noise).unwrap();
        assert!((l.step - 1.0).abs() < 1e-12);
        let noise = NoiseModel::discrete(&[-0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(LatticeNoise::from_model(&noise).unwrap().step, 0.5);
    }

    #[test]
    fn bistar_one_step_is_noise_product() {
        let g = inv_linear();
        let gt = InfluenceFunction::rational(1.0, 0.1).unwrap();
        let d = exact_bistar_distribution(&g, &gt, &three_point(), 1, OracleBudget::default()).unwrap();
        let q = [(-1, 0.25), (0, 0.5), (1, 0.25)];
        assert_eq!(d.masses.len(), 9);
        for &(a, pa) in &q {
            for &(b, pb) in &q {
                let m = d.masses[&(a, 2 * b)];
                assert!((m - pa * pb).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn bistar_reset_follower_marginal_is_noise_law() {
        let d = exact_bistar_distribution(
            &InfluenceFunction::never(),
            &InfluenceFunction::always(),
            &three_point(),
            2,
            OracleBudget::default(),
        )
        .unwrap();
        let f = d.follower_marginal();
        assert_eq!(law(&f), vec![(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]);
        let l = d.leader_marginal();
        assert_eq!(law(&l), vec![(-4.0, 0.0625), (-2.0, 0.25), (0.0, 0.375), (2.0, 0.25), (4.0, 0.0625)]);
    }

    #[test]
    fn bistar_mass_conserved_and_budget_enforced() {
        let g = InfluenceFunction::rational(1.0, 0.5).unwrap();
        let gt = InfluenceFunction::rational(1.0, 0.1).unwrap();
        let d = exact_bistar_distribution(&g, &gt, &three_point(), 6, OracleBudget::default()).unwrap();
        assert!((d.total_mass() + d.pruned_mass - 1.0).abs() < 1e-12);
        let tight = OracleBudget { max_atoms: 50, ..OracleBudget::default() };
        let err = exact_bistar_distribution(&g, &gt, &three_point(), 6, tight).unwrap_err();
        assert!(matches!(err, OracleError::AtomBudget { allowed: 50, .. }));
    }

    #[test]
    fn bistar_leader_marginal_matches_two_agent_law() {
        let g = inv_linear();
        let gt = InfluenceFunction::rational(1.0, 0.1).unwrap();
        let joint = exact_bistar_distribution(&g, &gt, &three_point(), 5, OracleBudget::default()).unwrap();
        let direct = exact_diff_distribution(&g, &three_point(), 5).unwrap();
        let leader = joint.leader_marginal();
        for (i, m) in direct.atoms() {
            assert!((leader.mass_at(i) - m).abs() < 1e-15);
        }
    }
}
