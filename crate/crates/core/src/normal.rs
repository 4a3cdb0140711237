//! Standard normal CDF and its inverse.

use std::f64::consts::{PI, SQRT_2};

/// Complementary error function (libm, sub-ulp accuracy).
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Standard normal cumulative distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Inverse of [`norm_cdf`] for `p` in `(0, 1)`.
///
/// Acklam's rational approximation (relative error ~1e-9) polished with
/// Halley steps against [`norm_cdf`]. Returns infinities at the endpoints and
/// NaN outside `[0, 1]`.
pub fn norm_inv_cdf(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let mut x = acklam(p);
    for _ in 0..3 {
        let err = norm_cdf(x) - p;
        let u = err / norm_pdf(x);
        let step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

#[allow(clippy::excessive_precision)]
fn acklam(p: f64) -> f64 {
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

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    // (x, erf x, erfc x) evaluated with 40-digit arithmetic
    #[allow(clippy::excessive_precision)]
    const TABLE: [(f64, f64, f64); 25] = [
        (-5.5, -0.99999999999999264215, 1.9999999999999926422),
        (-3.1, -0.99998835134263280041, 1.9999883513426328004),
        (-2.5, -0.99959304798255504106, 1.9995930479825550411),
        (-1.3, -0.93400794494065244585, 1.9340079449406524459),
        (-0.507, -0.52662977589503154293, 1.5266297758950315429),
        (-0.01, -0.011283415555849617151, 1.0112834155558496172),
        (0.0, 0.0, 1.0000000000000000000),
        (0.01, 0.011283415555849617151, 0.98871658444415038285),
        (0.3, 0.32862675945912741619, 0.67137324054087258381),
        (0.507, 0.52662977589503154293, 0.47337022410496845707),
        (0.99, 0.83850806955536979982, 0.16149193044463020018),
        (1.7, 0.98379045859077456084, 0.016209541409225439159),
        (2.2, 0.99813715370201811014, 0.0018628462979818898586),
        (2.49, 0.99957071213226608709, 0.00042928786773391290559),
        (2.5, 0.99959304798255504106, 0.00040695201744495893956),
        (2.51, 0.99961429451827572022, 0.00038570548172427977972),
        (2.971, 0.99997349982369054281, 0.000026500176309457188698),
        (3.6, 0.99999964413700699231, 3.5586299300768506304e-7),
        (4.4, 0.99999999951082897294, 4.8917102706058727478e-10),
        (5.0, 0.99999999999846254021, 1.5374597944280348502e-12),
        (6.3, 0.99999999999999999949, 5.1242216873957155494e-19),
        (8.0, 1.0000000000000000000, 1.1224297172982927080e-29),
        (10.0, 1.0000000000000000000, 2.0884875837625447570e-45),
        (12.0, 1.0000000000000000000, 1.3562611692059042128e-64),
        (20.0, 1.0000000000000000000, 5.3958656116079009289e-176),
    ];

    #[test]
    fn matches_high_precision_table() {
        for (x, erf_x, erfc_x) in TABLE {
            assert!((erf(x) - erf_x).abs() < 2.3e-16, "erf({x}) = {} vs {erf_x}", erf(x));
            let rel = ((erfc(x) - erfc_x) / erfc_x).abs();
            assert!(rel < 1e-14, "erfc({x}) = {} vs {erfc_x}, rel {rel:e}", erfc(x));
        }
    }

    #[test]
    fn reflection_is_exact() {
        let mut x = 0.0;
        while x <= 8.0 {
            assert!((erfc(-x) - (2.0 - erfc(x))).abs() <= 4.5e-16);
            assert_eq!(erf(-x), -erf(x));
            x += 0.013;
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(erfc(0.0), 1.0);
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((norm_cdf(1.6448536269514722) - 0.95).abs() < 1e-15);
        assert!((norm_inv_cdf(0.95) - 1.6448536269514722).abs() < 1e-12);
        assert!((norm_inv_cdf(0.975) - 1.959963984540054).abs() < 1e-12);
        assert_eq!(norm_inv_cdf(0.5), 0.0);
        assert!(norm_inv_cdf(1.5).is_nan());
        assert_eq!(norm_inv_cdf(1.0), f64::INFINITY);
    }

    #[test]
    fn inverse_matches_reference() {
        let n = Normal::standard();
        for i in 1..2000 {
            let p = i as f64 / 2000.0;
            assert!((norm_inv_cdf(p) - n.inverse_cdf(p)).abs() < 1e-9, "p={p}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn cdf_and_inverse_round_trip(k in (0.5 + 1e-6)..(1.0 - 1e-9)) {
                prop_assert!((norm_cdf(norm_inv_cdf(k)) - k).abs() < 1e-9);
            }

            #[test]
            fn cdf_is_monotone(a in -8.0f64..8.0, b in -8.0f64..8.0) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                prop_assert!(norm_cdf(lo) <= norm_cdf(hi));
            }
        }
    }
}
