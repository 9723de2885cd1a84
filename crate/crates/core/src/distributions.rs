//! Standard normal and half-normal evaluation.
//!
//! The CDF is routed through `erfc` so that upper-tail quantities keep their
//! relative accuracy; every tail-sensitive caller in the crate works with
//! [`normal_sf`] rather than `1 - cap_phi(x)`.

use crate::error::{domain, Result};

/// `1 / sqrt(2 pi)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// `sqrt(2 / pi)`, the mean of the half-normal law.
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
/// `Phi^{-1}(3/4)`, the median of the half-normal law.
pub const Z_075: f64 = 0.674_489_750_196_081_7;

/// Standard normal density.
#[inline]
pub fn phi(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF.
#[inline]
pub fn cap_phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal survival function `1 - Phi(x)`, accurate in the upper tail.
#[inline]
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// `int_t^inf (1 - Phi(s)) ds = phi(t) - t (1 - Phi(t))`.
#[inline]
pub fn normal_sf_integral(t: f64) -> f64 {
    phi(t) - t * normal_sf(t)
}

#[allow(clippy::excessive_precision)]
fn acklam_lower(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Quantile for a lower-tail probability `p <= 1/2`, polished by Halley steps.
fn lower_quantile(p: f64) -> f64 {
    let mut x = acklam_lower(p);
    for _ in 0..3 {
        let density = phi(x);
        if density == 0.0 {
            break;
        }
        let u = (cap_phi(x) - p) / density;
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Standard normal quantile `Phi^{-1}(p)` for `0 < p < 1`.
pub fn inv_cap_phi(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("normal quantile needs 0 < p < 1, got {p}"));
    }
    if p <= 0.5 {
        Ok(lower_quantile(p))
    } else {
        Ok(-lower_quantile(1.0 - p))
    }
}

/// Upper-tail quantile: the `x` with `1 - Phi(x) = q`, accurate for tiny `q`.
pub fn inv_normal_sf(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("normal upper quantile needs 0 < q < 1, got {q}"));
    }
    if q <= 0.5 {
        Ok(-lower_quantile(q))
    } else {
        Ok(lower_quantile(1.0 - q))
    }
}

/// Mill's-ratio sandwich `(x/(1+x^2) phi(x), phi(x)/x)` around `1 - Phi(x)`.
pub fn mill_bounds(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("Mill's ratio bounds need x > 0, got {x}"));
    }
    let density = phi(x);
    Ok((x / (1.0 + x * x) * density, density / x))
}

/// The half-normal law of `|Z|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfNormal;

impl HalfNormal {
    pub const MEAN: f64 = SQRT_2_OVER_PI;
    pub const MEDIAN: f64 = Z_075;

    /// `p(x) = 2 phi(x)` on `(0, inf)`, zero elsewhere.
    pub fn pdf(x: f64) -> f64 {
        if x > 0.0 {
            2.0 * phi(x)
        } else {
            0.0
        }
    }

    /// `F(x) = 2 Phi(x) - 1` on `(0, inf)`, zero elsewhere.
    pub fn cdf(x: f64) -> f64 {
        if x > 0.0 {
            libm::erf(x * std::f64::consts::FRAC_1_SQRT_2)
        } else {
            0.0
        }
    }

    /// `1 - F(x) = 2 (1 - Phi(x))` on `(0, inf)`, one elsewhere.
    pub fn sf(x: f64) -> f64 {
        if x > 0.0 {
            2.0 * normal_sf(x)
        } else {
            1.0
        }
    }

    /// `psi(x) = p'(x) / p(x) = -x`.
    pub fn log_derivative(x: f64) -> f64 {
        -x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0), INV_SQRT_2PI);
        assert_relative_eq!(phi(1.0), 0.241_970_724_519_143_37, max_relative = 1e-14);
        assert_eq!(phi(-2.0), phi(2.0));
    }

    #[test]
    fn cap_phi_values() {
        assert_eq!(cap_phi(0.0), 0.5);
        assert!((cap_phi(5.0) - 0.999_999_713_348_428_1).abs() <= 1e-15);
        assert!((cap_phi(Z_075) - 0.75).abs() <= 1e-15);
        assert!((cap_phi(-1.3) - (1.0 - cap_phi(1.3))).abs() <= 1e-15);
    }

    #[test]
    fn quantile_values() {
        assert_eq!(inv_cap_phi(0.5).unwrap(), 0.0);
        assert!((inv_cap_phi(0.75).unwrap() - 0.674_489_750_196_081_7).abs() < 1e-15);
        assert!(inv_cap_phi(1.0).is_err());
        assert!(inv_cap_phi(0.0).is_err());
        assert!(inv_cap_phi(f64::NAN).is_err());
    }

    #[test]
    fn upper_quantile_tiny_tail() {
        for &q in &[1e-300, 1e-100, 1e-20, 1e-5, 0.3, 0.7, 0.999] {
            let x = inv_normal_sf(q).unwrap();
            let rel = (normal_sf(x) - q).abs() / q;
            assert!(rel < 1e-13, "q = {q}: x = {x}, rel = {rel}");
        }
    }

    #[test]
    fn mill_values() {
        let (lo, hi) = mill_bounds(1.0).unwrap();
        assert_relative_eq!(lo, 0.120_985_362_259_571_7, max_relative = 1e-14);
        assert_relative_eq!(hi, 0.241_970_724_519_143_37, max_relative = 1e-14);
        let tail = normal_sf(1.0);
        assert!(lo < tail && tail < hi);

        let (lo, hi) = mill_bounds(10.0).unwrap();
        let tail = normal_sf(10.0);
        assert!(lo < tail && tail < hi);
        assert!(hi - lo < 2e-24);

        assert!(mill_bounds(0.0).is_err());
        assert!(mill_bounds(-1.0).is_err());
    }

    #[test]
    fn half_normal_edges() {
        assert_eq!(HalfNormal::pdf(0.0), 0.0);
        assert_eq!(HalfNormal::pdf(-1.0), 0.0);
        assert_eq!(HalfNormal::cdf(0.0), 0.0);
        assert_eq!(HalfNormal::sf(0.0), 1.0);
        assert!((HalfNormal::cdf(HalfNormal::MEDIAN) - 0.5).abs() < 1e-12);
        assert_eq!(HalfNormal::log_derivative(2.5), -2.5);
        assert_relative_eq!(
            SQRT_2_OVER_PI,
            (2.0 / std::f64::consts::PI).sqrt(),
            max_relative = 1e-16
        );
    }
}
