//! Influence functions: the probability that one agent adopts the pairwise
//! average, as a non-increasing function of the opinion distance.

use core::fmt;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InfluenceError {
    /// Evaluated at a negative or NaN distance.
    NegativeDistance(f64),
    /// `G(0)` outside `[0, 1]`, or zero where the family needs it positive.
    InvalidG0(f64),
    InvalidExponent(f64),
    InvalidThreshold(f64),
}

impl fmt::Display for InfluenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegativeDistance(x) => write!(f, "influence evaluated at negative distance {x}"),
            Self::InvalidG0(g) => write!(f, "G(0) = {g} is not a probability in the allowed range"),
            Self::InvalidExponent(a) => write!(f, "decay exponent must be positive and finite, got {a}"),
            Self::InvalidThreshold(d) => write!(f, "threshold must be non-negative and finite, got {d}"),
        }
    }
}

/// Stability of the two-agent dynamics driven by an influence function,
/// classified from the tail exponent of the parametric family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Stability {
    /// `G(x)` decays no faster than `x^-(2-δ)` for some `δ > 0`.
    Stable,
    /// `G(x)` decays at least as fast as `x^-(2+δ)` for some `δ > 0`.
    Unstable,
    /// Exactly `x^-2` tails: neither criterion applies.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum InfluenceFunction {
    /// `g0 / (1 + x^alpha)`.
    RationalPowerLaw { g0: f64, alpha: f64 },
    /// `g0` for `x <= threshold`, zero beyond (classical bounded confidence).
    HardThreshold { g0: f64, threshold: f64 },
    /// `g0` everywhere. `g0 = 0` is the pure random walk.
    Constant { g0: f64 },
}

fn check_g0(g0: f64, allow_zero: bool) -> Result<f64, InfluenceError> {
    let lower_ok = if allow_zero { g0 >= 0.0 } else { g0 > 0.0 };
    if lower_ok && g0 <= 1.0 {
        Ok(g0)
    } else {
        Err(InfluenceError::InvalidG0(g0))
    }
}

impl InfluenceFunction {
    pub fn rational(g0: f64, alpha: f64) -> Result<Self, InfluenceError> {
        let g0 = check_g0(g0, false)?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(InfluenceError::InvalidExponent(alpha));
        }
        Ok(Self::RationalPowerLaw { g0, alpha })
    }

    pub fn threshold(g0: f64, threshold: f64) -> Result<Self, InfluenceError> {
        let g0 = check_g0(g0, false)?;
        if !(threshold >= 0.0 && threshold.is_finite()) {
            return Err(InfluenceError::InvalidThreshold(threshold));
        }
        Ok(Self::HardThreshold { g0, threshold })
    }

    pub fn constant(g0: f64) -> Result<Self, InfluenceError> {
        Ok(Self::Constant { g0: check_g0(g0, true)? })
    }

    /// `G ≡ 0`: no interaction ever happens.
    pub const fn never() -> Self {
        Self::Constant { g0: 0.0 }
    }

    /// `G ≡ 1`: the agents always interact.
    pub const fn always() -> Self {
        Self::Constant { g0: 1.0 }
    }

    /// Re-run the constructor checks, e.g. after deserializing.
    pub fn validate(&self) -> Result<(), InfluenceError> {
        match *self {
            Self::RationalPowerLaw { g0, alpha } => Self::rational(g0, alpha).map(drop),
            Self::HardThreshold { g0, threshold } => Self::threshold(g0, threshold).map(drop),
            Self::Constant { g0 } => Self::constant(g0).map(drop),
        }
    }

    pub fn g0(&self) -> f64 {
        match *self {
            Self::RationalPowerLaw { g0, .. } | Self::HardThreshold { g0, .. } | Self::Constant { g0 } => g0,
        }
    }

    /// Checked evaluation at distance `x >= 0`.
    pub fn eval(&self, x: f64) -> Result<f64, InfluenceError> {
        if x >= 0.0 {
            Ok(self.at(x))
        } else {
            Err(InfluenceError::NegativeDistance(x))
        }
    }

    /// Evaluation on the hot path; callers pass `|y|`.
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0, "influence evaluated at {x}");
        match *self {
            Self::RationalPowerLaw { g0, alpha } => {
                if x == f64::INFINITY {
                    0.0
                } else {
                    g0 / (1.0 + math::pow(x, alpha))
                }
            }
            Self::HardThreshold { g0, threshold } => {
                if x <= threshold {
                    g0
                } else {
                    0.0
                }
            }
            Self::Constant { g0 } => g0,
        }
    }

    /// Power-law tail exponent `a` with `G(x) ≍ x^-a`; `0` for a positive
    /// constant and `+inf` for tails that vanish.
    pub fn tail_exponent(&self) -> f64 {
        match *self {
            Self::RationalPowerLaw { alpha, .. } => alpha,
            Self::HardThreshold { .. } => f64::INFINITY,
            Self::Constant { g0 } if g0 > 0.0 => 0.0,
            Self::Constant { .. } => f64::INFINITY,
        }
    }

    /// Whether `G(x) ≳ x^-(p - δ)` holds for some `δ > 0`, i.e. the tail
    /// exponent is strictly below `p`.
    pub fn decays_slower_than(&self, p: f64) -> bool {
        self.tail_exponent() < p
    }

    pub fn stability(&self) -> Stability {
        let a = self.tail_exponent();
        if a < 2.0 {
            Stability::Stable
        } else if a > 2.0 {
            Stability::Unstable
        } else {
            Stability::Boundary
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_power_law_values() {
        let g = InfluenceFunction::rational(1.0, 0.5).unwrap();
        assert_eq!(g.eval(0.0).unwrap(), 1.0);
        assert_eq!(g.eval(1.0).unwrap(), 0.5);
        assert!((g.eval(4.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn negative_distance_rejected() {
        let g = InfluenceFunction::rational(1.0, 0.5).unwrap();
        assert_eq!(g.eval(-1.0), Err(InfluenceError::NegativeDistance(-1.0)));
        assert!(g.eval(f64::NAN).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(InfluenceFunction::rational(0.0, 0.5).is_err());
        assert!(InfluenceFunction::rational(1.5, 0.5).is_err());
        assert!(InfluenceFunction::rational(1.0, 0.0).is_err());
        assert!(InfluenceFunction::threshold(1.0, -1.0).is_err());
        assert!(InfluenceFunction::constant(0.0).is_ok());
        assert!(InfluenceFunction::constant(-0.1).is_err());
    }

    #[test]
    fn stability_classes() {
        let class = |a| InfluenceFunction::rational(1.0, a).unwrap().stability();
        assert_eq!(class(0.5), Stability::Stable);
        assert_eq!(class(2.0), Stability::Boundary);
        assert_eq!(class(3.0), Stability::Unstable);
        assert_eq!(InfluenceFunction::threshold(1.0, 5.0).unwrap().stability(), Stability::Unstable);
        assert_eq!(InfluenceFunction::always().stability(), Stability::Stable);
        assert_eq!(InfluenceFunction::never().stability(), Stability::Unstable);
    }

    #[test]
    fn hard_threshold_is_closed_at_d() {
        let g = InfluenceFunction::threshold(0.8, 2.0).unwrap();
        assert_eq!(g.at(2.0), 0.8);
        assert_eq!(g.at(2.0 + 1e-12), 0.0);
    }

    fn any_influence() -> impl Strategy<Value = InfluenceFunction> {
        prop_oneof![
            (0.01f64..=1.0, 0.05f64..4.0).prop_map(|(g0, a)| InfluenceFunction::rational(g0, a).unwrap()),
            (0.01f64..=1.0, 0.0f64..50.0).prop_map(|(g0, d)| InfluenceFunction::threshold(g0, d).unwrap()),
            (0.0f64..=1.0).prop_map(|g0| InfluenceFunction::constant(g0).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn non_increasing_with_unit_range(g in any_influence(), mut xs in proptest::collection::vec(0.0f64..1e6, 2..64)) {
            xs.sort_by(f64::total_cmp);
            prop_assert_eq!(g.at(0.0), g.g0());
            let mut prev = g.at(0.0);
            for x in xs {
                let v = g.at(x);
                prop_assert!((0.0..=1.0).contains(&v));
                prop_assert!(v <= prev);
                prev = v;
            }
        }
    }
}
