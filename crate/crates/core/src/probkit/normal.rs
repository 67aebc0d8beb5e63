//! Standard normal density, distribution function and quantile.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Complementary error function.
///
/// For `0 <= x < 2.5` this is `1 - erf(x)` with `erf` from its positive-term
/// series `erf(x) = 2/√π · e^{-x²} Σ_k (2x²)^k x / (2k+1)!!`, which has no
/// cancellation. Beyond that the Laplace continued fraction
/// `erfc(x) = e^{-x²}/√π / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))` is
/// evaluated with the modified Lentz method and keeps full relative precision
/// in the tail. Negative arguments use `erfc(-x) = 2 - erfc(x)`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
    if x < 2.5 {
        let two_x2 = 2.0 * x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        while term > 1e-17 * sum {
            k += 1.0;
            term *= two_x2 / (2.0 * k + 1.0);
            sum += term;
        }
        return 1.0 - FRAC_2_SQRT_PI * (-x * x).exp() * sum;
    }
    if x > 27.3 {
        // e^{-x²} underflows past here.
        return 0.0;
    }
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for j in 1..500 {
        let a = 0.5 * j as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    0.5 * FRAC_2_SQRT_PI * (-x * x).exp() / f
}

pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `Φ(x) = erfc(-x / √2) / 2`.
///
/// The complementary error function keeps full relative precision in the
/// lower tail, so `Φ(-37)` is still a meaningful nonzero number.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Inverse of [`normal_cdf`], found by bracketed root-finding.
///
/// The lower-tail probability `min(u, 1 - u)` is solved for and the sign is
/// restored at the end; `1 - u` is exact for `u >= 1/2`. The search starts
/// from a rational-approximation guess, expands a bracket around it until
/// `Φ` changes sign across it, then runs Newton steps that fall back to
/// bisection whenever a step would leave the bracket.
pub fn normal_quantile(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain("u", u, "strictly between 0 and 1"));
    }
    if u == 0.5 {
        return Ok(0.0);
    }
    let (target, sign) = if u < 0.5 { (u, -1.0) } else { (1.0 - u, 1.0) };
    let z = lower_tail_root(target)?;
    Ok(sign * z.abs())
}

/// Solves `Φ(x) = target` for `x <= 0`, `0 < target < 1/2`.
fn lower_tail_root(target: f64) -> Result<f64> {
    let f = |x: f64| normal_cdf(x) - target;

    let guess = (-SQRT_2 * erfc_inv(2.0 * target)).min(0.0);
    let mut step = 1e-8 * guess.abs().max(1.0);
    let (mut lo, mut hi) = (guess - step, (guess + step).min(0.0));
    while f(lo) > 0.0 {
        step *= 4.0;
        lo = guess - step;
        if lo < -40.0 {
            lo = -40.0;
            break;
        }
    }
    while f(hi) < 0.0 {
        step *= 4.0;
        hi = (guess + step).min(0.0);
        if hi == 0.0 {
            break;
        }
    }
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::NoConvergence(format!(
            "could not bracket the normal quantile of {target}"
        )));
    }

    let mut x = guess.clamp(lo, hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = normal_pdf(x);
        let newton = if slope > 0.0 {
            x - fx / slope
        } else {
            f64::NAN
        };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE)
            || hi - lo <= 2.0 * f64::EPSILON * lo.abs()
        {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Inverse-CDF transform used by the simulation sampler.
///
/// Same map as [`normal_quantile`] but without the root-finding polish;
/// agreement between the two is part of the test suite.
#[inline]
pub(crate) fn standard_normal_from_uniform(u: f64) -> f64 {
    if u <= 0.5 {
        -SQRT_2 * erfc_inv(2.0 * u)
    } else {
        SQRT_2 * erfc_inv(2.0 * (1.0 - u))
    }
}
