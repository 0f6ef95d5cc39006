//! Standard normal tail function and its inverse.
//!
//! `Q(x) = P(eta > x)` for `eta ~ N(0, 1)`. Everything here goes through the
//! complementary error function, so `Phi(x) = Q(-x)` keeps full relative
//! precision in the lower tail as well.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use statrs::function::erf::erfc;

use crate::error::{invalid, Result};

/// Upper-tail probability `Q(x)`.
pub fn normal_tail(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal CDF `Phi(x) = 1 - Q(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    normal_tail(-x)
}

/// `Q^{-1}(p)`: the `x` with `Q(x) = p`. Note `Q^{-1}(p) < 0` for `p > 1/2`.
pub fn normal_tail_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("probability must lie in (0, 1), got {p}")));
    }
    Ok(-normal_quantile_unchecked(p))
}

/// `Phi^{-1}(u)` for `u` in (0, 1). Acklam's rational approximation followed
/// by one Halley step.
pub(crate) fn normal_quantile_unchecked(u: f64) -> f64 {
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
    const LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if u < LOW {
        tail((-2.0 * u.ln()).sqrt())
    } else if u > 1.0 - LOW {
        -tail((-2.0 * (1.0 - u).ln()).sqrt())
    } else {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    // Halley refinement; the residual is taken on whichever tail is smaller.
    let e = if x < 0.0 {
        normal_cdf(x) - u
    } else {
        (1.0 - u) - normal_tail(x)
    };
    let g = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - g / (1.0 + 0.5 * x * g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_is_zero() {
        assert!(normal_tail_inv(0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn upper_tail_convention() {
        // -2.5758293035489004 = Phi^{-1}(0.005), Wichura AS241 to 16 digits
        let x = normal_tail_inv(0.995).unwrap();
        assert!((x + 2.5758293035489004).abs() < 1e-9, "{x}");
        assert!((normal_tail_inv(0.975).unwrap() + 1.959963984540054).abs() < 1e-9);
    }

    #[test]
    fn round_trip() {
        let mut u = 0.123456789_f64;
        for _ in 0..1000 {
            u = (u * 7919.0 + 0.31).fract().clamp(1e-12, 1.0 - 1e-12);
            let x = normal_tail_inv(u).unwrap();
            assert!((normal_tail(x) - u).abs() <= 1e-9 * u.max(1e-3), "u = {u}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(normal_tail_inv(p).is_err());
        }
    }

    #[test]
    fn cdf_and_tail_are_complementary() {
        for x in [-5.0, -1.0, 0.0, 0.3, 2.0, 7.0] {
            assert!((normal_cdf(x) + normal_tail(x) - 1.0).abs() < 1e-15);
        }
    }
}
