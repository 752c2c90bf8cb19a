//! Thin wrappers over `libm` so the rest of the crate reads like `std` code.

pub(crate) use libm::{exp, expm1, floor, log, log1p, pow, sinh, sqrt};

pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// `ln(e^a + e^b)` without overflow; `-inf` operands are absorbing zeros.
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a == f64::INFINITY || b == f64::INFINITY {
        return f64::INFINITY;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + log1p(exp(lo - hi))
}

/// `ln(x)` for `x >= 0`, mapping zero to `-inf`.
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        log(x)
    }
}
