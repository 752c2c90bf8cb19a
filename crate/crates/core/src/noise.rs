//! Symmetric, zero-mean noise models for opinion-difference increments.

use alloc::vec::Vec;
use core::fmt;

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::math;

const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseError {
    InvalidScale(f64),
    LengthMismatch { points: usize, masses: usize },
    Empty,
    NegativeMass(f64),
    MassNotNormalized(f64),
    NotSymmetric { point: f64 },
    NonFinitePoint(f64),
}

impl fmt::Display for NoiseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidScale(s) => write!(f, "noise scale must be positive and finite, got {s}"),
            Self::LengthMismatch { points, masses } => {
                write!(f, "{points} support points but {masses} masses")
            }
            Self::Empty => f.write_str("discrete noise needs at least one support point"),
            Self::NegativeMass(m) => write!(f, "negative mass {m}"),
            Self::MassNotNormalized(s) => write!(f, "masses sum to {s}, expected 1"),
            Self::NotSymmetric { point } => write!(f, "mass at {point} differs from mass at its negation"),
            Self::NonFinitePoint(x) => write!(f, "support point {x} is not finite"),
        }
    }
}

/// Finite symmetric law on points `x_i` with masses `p_i`, stored sorted.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DiscreteNoise {
    points: Vec<f64>,
    masses: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(skip))]
    cumulative: Vec<f64>,
}

impl DiscreteNoise {
    pub fn new(points: &[f64], masses: &[f64]) -> Result<Self, NoiseError> {
        if points.len() != masses.len() {
            return Err(NoiseError::LengthMismatch { points: points.len(), masses: masses.len() });
        }
        if points.is_empty() {
            return Err(NoiseError::Empty);
        }
        let mut pairs: Vec<(f64, f64)> = points.iter().copied().zip(masses.iter().copied()).collect();
        for &(x, p) in &pairs {
            if !x.is_finite() {
                return Err(NoiseError::NonFinitePoint(x));
            }
            if p.is_nan() || p < 0.0 {
                return Err(NoiseError::NegativeMass(p));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // merge duplicate points; -0.0 and 0.0 are the same atom
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (x, p) in pairs {
            let x = if x == 0.0 { 0.0 } else { x };
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += p,
                _ => merged.push((x, p)),
            }
        }
        let total: f64 = merged.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(NoiseError::MassNotNormalized(total));
        }
        let n = merged.len();
        for i in 0..n {
            let (x, p) = merged[i];
            let (xm, pm) = merged[n - 1 - i];
            if x != -xm || (p - pm).abs() > MASS_TOLERANCE {
                return Err(NoiseError::NotSymmetric { point: x });
            }
        }
        let points: Vec<f64> = merged.iter().map(|&(x, _)| x).collect();
        let masses: Vec<f64> = merged.iter().map(|&(_, p)| p / total).collect();
        let mut cumulative = Vec::with_capacity(n);
        let mut acc = 0.0;
        for &p in &masses {
            acc += p;
            cumulative.push(acc);
        }
        Ok(Self { points, masses, cumulative })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.masses.iter().copied())
    }

    fn max_abs(&self) -> f64 {
        self.points.iter().fold(0.0, |m, &x| if math::abs(x) > m { math::abs(x) } else { m })
    }

    /// Inverse-CDF draw. Symmetric pairs are looked up from the matching end
    /// so that `u` and `1 - u` give exactly opposite atoms.
    fn quantile(&self, u: f64) -> f64 {
        if u <= 0.5 {
            let i = self.cumulative.iter().position(|&c| u <= c).unwrap_or(self.points.len() - 1);
            self.points[i]
        } else {
            -self.quantile(1.0 - u)
        }
    }
}

/// Law of the per-step increment of an opinion difference.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum NoiseModel {
    /// Uniform on `[-half_width, half_width]`.
    UniformBounded { half_width: f64 },
    Gaussian { sigma: f64 },
    DiscreteSymmetric(DiscreteNoise),
}

impl NoiseModel {
    pub fn uniform(half_width: f64) -> Result<Self, NoiseError> {
        if half_width > 0.0 && half_width.is_finite() {
            Ok(Self::UniformBounded { half_width })
        } else {
            Err(NoiseError::InvalidScale(half_width))
        }
    }

    pub fn gaussian(sigma: f64) -> Result<Self, NoiseError> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(Self::Gaussian { sigma })
        } else {
            Err(NoiseError::InvalidScale(sigma))
        }
    }

    pub fn discrete(points: &[f64], masses: &[f64]) -> Result<Self, NoiseError> {
        DiscreteNoise::new(points, masses).map(Self::DiscreteSymmetric)
    }

    /// Half-width `D` of the support for bounded families.
    pub fn half_width(&self) -> Option<f64> {
        match self {
            Self::UniformBounded { half_width } => Some(*half_width),
            Self::Gaussian { .. } => None,
            Self::DiscreteSymmetric(d) => Some(d.max_abs()),
        }
    }

    /// Variance parameter `s` with `M(λ) <= exp(λ² s² / 2)`.
    ///
    /// Bounded families use the Hoeffding value from the support width, `D`,
    /// which is what the bounded-noise concentration bounds are stated with.
    pub fn sub_gaussian_sigma(&self) -> f64 {
        match self {
            Self::UniformBounded { half_width } => *half_width,
            Self::Gaussian { sigma } => *sigma,
            Self::DiscreteSymmetric(d) => d.max_abs(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::UniformBounded { half_width } => half_width * half_width / 3.0,
            Self::Gaussian { sigma } => sigma * sigma,
            Self::DiscreteSymmetric(d) => d.atoms().map(|(x, p)| p * x * x).sum(),
        }
    }

    /// `ln E[exp(λ ñ)]`.
    pub fn log_mgf(&self, lambda: f64) -> f64 {
        match self {
            Self::UniformBounded { half_width } => {
                let z = math::abs(lambda * half_width);
                if z == 0.0 {
                    0.0
                } else if z < 20.0 {
                    math::log(math::sinh(z) / z)
                } else {
                    // sinh z = e^z (1 - e^{-2z}) / 2
                    z - math::LN_2 + math::log1p(-math::exp(-2.0 * z)) - math::log(z)
                }
            }
            Self::Gaussian { sigma } => 0.5 * lambda * lambda * sigma * sigma,
            Self::DiscreteSymmetric(d) => {
                d.atoms().fold(f64::NEG_INFINITY, |acc, (x, p)| math::log_add_exp(acc, math::ln(p) + lambda * x))
            }
        }
    }

    pub fn mgf(&self, lambda: f64) -> f64 {
        math::exp(self.log_mgf(lambda))
    }

    /// One draw. Uniform and discrete families consume exactly one 64-bit
    /// word; the Gaussian uses the ziggurat sampler.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::UniformBounded { half_width } => half_width * (2.0 * open_unit(rng.next_u64()) - 1.0),
            Self::Gaussian { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
            Self::DiscreteSymmetric(d) => d.quantile(open_unit(rng.next_u64())),
        }
    }
}

/// Maps a 64-bit word to the midpoint grid `(k + 1/2) / 2^52`, which lies in
/// the open unit interval and is symmetric about `1/2`. Every grid point
/// and its mirror `1 - u` are exact doubles.
#[inline]
pub fn open_unit(word: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    ((word >> 12) as f64 + 0.5) * SCALE
}
