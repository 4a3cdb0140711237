use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of a homodyne-monitored Kerr parametric oscillator.
///
/// Rates are angular frequencies in rad/us, times are in us. The detuning is
/// measured in the frame rotating at half the pump frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpoParams {
    /// Kerr anharmonicity.
    pub chi: f64,
    /// Two-photon pump amplitude.
    pub beta: f64,
    /// Single-photon decay rate into the detected line.
    pub kappa: f64,
    /// Detuning of the oscillator from half the pump frequency.
    pub delta: f64,
    /// Local-oscillator phase relative to the pump.
    pub theta_lo: f64,
    /// Detection efficiency.
    pub eta: f64,
    /// Detector scale; records are in units of `1/epsilon`.
    pub epsilon: f64,
}

impl KpoParams {
    /// Ideal detection (`eta = 1`, `epsilon = 1`, no detuning) with the local
    /// oscillator aligned so that `arg(alpha) - theta_lo = pi/2`.
    pub fn ideal(chi: f64, beta: f64, kappa: f64) -> Result<Self> {
        let mut p = Self {
            chi,
            beta,
            kappa,
            delta: 0.0,
            theta_lo: 0.0,
            eta: 1.0,
            epsilon: 1.0,
        };
        p.validate()?;
        p.align_local_oscillator(FRAC_PI_2)?;
        Ok(p)
    }

    /// Builds ideal parameters from `f/2pi` values in MHz.
    pub fn ideal_from_mhz(chi_mhz: f64, beta_mhz: f64, kappa_mhz: f64) -> Result<Self> {
        Self::ideal(
            mhz_to_rad_per_us(chi_mhz),
            mhz_to_rad_per_us(beta_mhz),
            mhz_to_rad_per_us(kappa_mhz),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.chi,
            self.beta,
            self.kappa,
            self.delta,
            self.theta_lo,
            self.eta,
            self.epsilon,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("parameters must be finite".into()));
        }
        if self.chi <= 0.0 {
            return Err(Error::Domain(format!("chi must be positive, got {}", self.chi)));
        }
        if self.beta < 0.0 || self.kappa < 0.0 {
            return Err(Error::Domain("beta and kappa must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Domain(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::Domain(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Sets `theta_lo = arg(alpha) - delta_theta` for the stationary amplitude.
    pub fn align_local_oscillator(&mut self, delta_theta: f64) -> Result<()> {
        let alpha = crate::bounds::alpha_stationary(self)?;
        self.theta_lo = alpha.arg() - delta_theta;
        Ok(())
    }

    /// `arg(alpha) - theta_lo` for the stationary amplitude.
    pub fn delta_theta(&self) -> Result<f64> {
        Ok(crate::bounds::alpha_stationary(self)?.arg() - self.theta_lo)
    }

    /// Largest admissible fixed step: 5% of the fastest of `1/chi`, `1/beta`, `1/kappa`.
    pub fn max_step(&self) -> f64 {
        let fastest = [self.chi, self.beta, self.kappa]
            .into_iter()
            .filter(|r| *r > 0.0)
            .fold(0.0_f64, f64::max);
        if fastest > 0.0 {
            0.05 / fastest
        } else {
            f64::INFINITY
        }
    }

    pub(crate) fn check_step(&self, step: f64) -> Result<()> {
        let limit = self.max_step();
        if !(step > 0.0 && step <= limit) {
            return Err(Error::StepSize { step, limit });
        }
        Ok(())
    }
}

/// `2 pi f` for `f` in MHz, i.e. rad/us.
pub fn mhz_to_rad_per_us(f_mhz: f64) -> f64 {
    TAU * f_mhz
}

pub fn rad_per_us_to_mhz(omega: f64) -> f64 {
    omega / TAU
}
