//! Analytic amplitude and averaging-time bounds, plus the two-state jump model
//! used to derive and validate the upper bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::C64;
use crate::me_dynamics::expected_jump_interval;
use crate::noise::NoiseStream;
use crate::normal::{norm_cdf, norm_inv_cdf};
use crate::params::KpoParams;

/// Largest per-step jump probability accepted by [`simulate_telegraph`].
pub const MAX_JUMP_PROBABILITY: f64 = 0.01;

/// Stationary coherent amplitude of the pumped, lossy Kerr oscillator:
/// `|alpha|^4 = (4 beta^2 - kappa^2/4) / chi^2`, `arg alpha = asin(-kappa / 4 beta) / 2`.
pub fn alpha_stationary(params: &KpoParams) -> Result<C64> {
    let KpoParams { chi, beta, kappa, .. } = *params;
    if !(chi > 0.0) || beta < 0.0 || kappa < 0.0 {
        return Err(Error::Domain("need chi > 0, beta >= 0, kappa >= 0".into()));
    }
    if kappa > 4.0 * beta {
        return Err(Error::Domain(format!(
            "no stationary amplitude: 4 beta^2 = {} < kappa^2/4 = {}",
            4.0 * beta * beta,
            kappa * kappa / 4.0
        )));
    }
    let modulus = ((4.0 * beta * beta - kappa * kappa / 4.0).max(0.0) / (chi * chi)).powf(0.25);
    // `+ 0.0` turns the -0.0 from asin(-0) into 0
    let arg = if beta > 0.0 {
        0.5 * (-kappa / (4.0 * beta)).asin() + 0.0
    } else {
        0.0
    };
    Ok(C64::from_polar(modulus, arg))
}

/// Signal-to-noise rate `2 |alpha| sqrt(kappa) |sin(delta_theta)| sqrt(eta)`; the
/// averaged record separates the two states by `rate * sqrt(T_a)` standard deviations.
fn discrimination_rate(alpha: C64, kappa: f64, eta: f64, delta_theta: f64) -> f64 {
    2.0 * alpha.norm() * kappa.sqrt() * delta_theta.sin().abs() * eta.sqrt()
}

/// Success probability of sign estimation limited by Gaussian noise only:
/// `Phi(2 |alpha| sqrt(kappa) sin(delta_theta) sqrt(eta T_a))`.
pub fn noise_limited_success(alpha: C64, kappa: f64, eta: f64, delta_theta: f64, t_a: f64) -> f64 {
    norm_cdf(discrimination_rate(alpha, kappa, eta, delta_theta) * t_a.max(0.0).sqrt())
}

/// Shortest averaging time reaching success probability `k_target` against
/// measurement noise: `Phi^{-1}(K)^2 / (4 |alpha|^2 kappa sin^2(delta_theta) eta)`.
pub fn lower_bound_ta(alpha: C64, kappa: f64, k_target: f64, eta: f64, delta_theta: f64) -> Result<f64> {
    if !(k_target > 0.5 && k_target < 1.0) {
        return Err(Error::Domain(format!(
            "target success must lie in (0.5, 1), got {k_target}"
        )));
    }
    lower_bound_ta_with_quantile(norm_inv_cdf(k_target), alpha, kappa, eta, delta_theta)
}

/// [`lower_bound_ta`] with the normal quantile supplied directly (e.g. a
/// rounded table value such as 1.65).
pub fn lower_bound_ta_with_quantile(quantile: f64, alpha: C64, kappa: f64, eta: f64, delta_theta: f64) -> Result<f64> {
    if !(quantile >= 0.0 && quantile.is_finite()) {
        return Err(Error::Domain(format!(
            "quantile must be finite and non-negative, got {quantile}"
        )));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("eta must lie in (0, 1], got {eta}")));
    }
    let rate = discrimination_rate(alpha, kappa, eta, delta_theta);
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Domain(
            "signal vanishes: need alpha != 0, kappa > 0, sin(delta_theta) != 0".into(),
        ));
    }
    Ok((quantile / rate).powi(2))
}

/// Longest averaging time keeping the smearing error below `1 - K`: `2 (1 - K) / Omega`.
pub fn upper_bound_ta(omega: f64, k_target: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("jump rate must be positive, got {omega}")));
    }
    if !(k_target > 0.0 && k_target <= 1.0) {
        return Err(Error::Domain(format!(
            "target success must lie in (0, 1], got {k_target}"
        )));
    }
    Ok(2.0 * (1.0 - k_target) / omega)
}

/// `<x>` of the two-state jump model started in `|alpha>`: `Re[alpha] exp(-2 Omega t)`.
pub fn binomial_mean_x(re_alpha: f64, omega: f64, t: f64) -> f64 {
    re_alpha * (-2.0 * omega * t).exp()
}

/// Finite-step form `Re[alpha] (1 - 2 Omega dt)^(t/dt)` of [`binomial_mean_x`].
pub fn binomial_mean_x_discrete(re_alpha: f64, omega: f64, t: f64, dt: f64) -> f64 {
    let n = (t / dt).round();
    re_alpha * (1.0 - 2.0 * omega * dt).powf(n)
}

/// Averaging-time window for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub k_target: f64,
    /// Lower bound on the averaging time, us.
    pub t_lower: f64,
    /// Jump rate, rad/us.
    pub omega: f64,
    /// Mean time between jumps, us.
    pub e_t_i: f64,
    /// Upper bound on the averaging time, us.
    pub t_upper: f64,
    pub eta: f64,
    pub delta_theta: f64,
}

impl BoundReport {
    /// Both bounds for `params`, with the upper one taken from a fitted jump rate.
    /// `quantile` overrides `Phi^{-1}(k_target)` in the lower bound.
    pub fn new(params: &KpoParams, omega: f64, k_target: f64, quantile: Option<f64>) -> Result<Self> {
        let alpha = alpha_stationary(params)?;
        let delta_theta = alpha.arg() - params.theta_lo;
        let t_lower = match quantile {
            Some(z) => {
                if !(k_target > 0.5 && k_target < 1.0) {
                    return Err(Error::Domain(format!(
                        "target success must lie in (0.5, 1), got {k_target}"
                    )));
                }
                lower_bound_ta_with_quantile(z, alpha, params.kappa, params.eta, delta_theta)?
            }
            None => lower_bound_ta(alpha, params.kappa, k_target, params.eta, delta_theta)?,
        };
        let e_t_i = expected_jump_interval(omega)?;
        Ok(Self {
            alpha_re: alpha.re,
            alpha_im: alpha.im,
            k_target,
            t_lower,
            omega,
            e_t_i,
            t_upper: upper_bound_ta(omega, k_target)?,
            eta: params.eta,
            delta_theta,
        })
    }
}

/// Sample path of the two-state jump process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TelegraphPath {
    /// Strictly increasing jump times in `(0, duration]`.
    pub jump_times: Vec<f64>,
    pub initial_sign: i8,
    pub omega: f64,
    pub duration: f64,
}

impl TelegraphPath {
    /// Number of jumps at or before `t`.
    pub fn jumps_until(&self, t: f64) -> usize {
        self.jump_times.partition_point(|&j| j <= t)
    }

    /// State sign (+1 for `|alpha>`, -1 for `|-alpha>`) at time `t`.
    pub fn sign_at(&self, t: f64) -> i8 {
        if self.jumps_until(t).is_multiple_of(2) {
            self.initial_sign
        } else {
            -self.initial_sign
        }
    }

    /// `int_0^t s(u) du`.
    fn integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut last = 0.0;
        let mut sign = self.initial_sign as f64;
        for &j in &self.jump_times {
            if j > t {
                break;
            }
            acc += sign * (j - last);
            last = j;
            sign = -sign;
        }
        acc + sign * (t - last)
    }
}

/// Bernoulli jump process with probability `Omega dt` per step, started in `+alpha`.
pub fn simulate_telegraph(omega: f64, duration: f64, dt: f64, noise: &mut NoiseStream) -> Result<TelegraphPath> {
    if !(omega >= 0.0) {
        return Err(Error::NonPositiveRate(omega));
    }
    if !(dt > 0.0 && duration >= 0.0) {
        return Err(Error::Domain("need dt > 0 and duration >= 0".into()));
    }
    let p = omega * dt;
    if p > MAX_JUMP_PROBABILITY {
        return Err(Error::StepSize {
            step: dt,
            limit: MAX_JUMP_PROBABILITY / omega,
        });
    }
    let steps = (duration / dt).round() as usize;
    let mut jump_times = Vec::new();
    if p > 0.0 {
        for i in 0..steps {
            if noise.uniform() < p {
                jump_times.push((i + 1) as f64 * dt);
            }
        }
    }
    Ok(TelegraphPath {
        jump_times,
        initial_sign: 1,
        omega,
        duration,
    })
}

/// Fraction of the record during which the sign of the boxcar-averaged,
/// noise-free signal disagrees with the true state.
///
/// The average at time `t` runs over `[max(0, t - t_a), t]`; a zero average
/// counts as `+alpha`. The signal is piecewise constant, so the error time is
/// computed exactly from the jump times.
pub fn error_rate_of_window(path: &TelegraphPath, t_a: f64) -> Result<f64> {
    let d = path.duration;
    if !(t_a > 0.0) {
        return Err(Error::Domain(format!("averaging time must be positive, got {t_a}")));
    }
    if !(t_a < d) {
        return Err(Error::WindowTooLong {
            window: t_a,
            duration: d,
        });
    }
    let mut breaks: Vec<f64> = vec![0.0, t_a, d];
    for &j in &path.jump_times {
        breaks.push(j);
        breaks.push(j + t_a);
    }
    breaks.retain(|&b| b <= d);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let windowed = |t: f64| path.integral(t) - path.integral((t - t_a).max(0.0));
    let mut wrong = 0.0;
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        let truth = path.sign_at(0.5 * (a + b));
        let (ia, ib) = (windowed(a), windowed(b));
        let negative = if ia >= 0.0 && ib >= 0.0 {
            0.0
        } else if ia < 0.0 && ib < 0.0 {
            b - a
        } else {
            let root = a + (b - a) * ia / (ia - ib);
            if ia < 0.0 {
                root - a
            } else {
                b - root
            }
        };
        wrong += if truth > 0 { negative } else { (b - a) - negative };
    }
    Ok(wrong / d)
}
