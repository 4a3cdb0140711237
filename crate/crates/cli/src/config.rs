//! Run configuration: one flat JSON document. Frequencies are `f/2pi` in MHz,
//! times are in us, angles in radians.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use kpo_core::estimator::EstimatorConfig;
use kpo_core::params::mhz_to_rad_per_us;
use kpo_core::KpoParams;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub chi_mhz: f64,
    pub beta_mhz: f64,
    pub kappa_mhz: f64,
    pub delta_mhz: f64,
    /// Local-oscillator phase. When absent it is aligned so that
    /// `arg(alpha) - theta_lo = delta_theta`.
    pub theta_lo: Option<f64>,
    pub delta_theta: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub k_target: f64,
    /// Replaces `Phi^{-1}(k_target)` in the lower bound (e.g. 1.65).
    pub quantile_override: Option<f64>,

    pub fock_dim: usize,
    pub tau_us: f64,
    pub t_end_us: f64,
    pub me_dt_us: f64,
    pub me_t_max_us: f64,
    pub snapshot_stride: usize,

    pub ta_list_us: Vec<f64>,
    pub ensemble: usize,
    pub seed: u64,
    /// Axis values for `sweep --axis eta | delta_theta | beta` (beta in MHz).
    pub sweep_values: Vec<f64>,
    /// Averaging time scored by the non-`ta` sweeps.
    pub fixed_ta_us: Option<f64>,

    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            chi_mhz: 3.0,
            beta_mhz: 3.0,
            kappa_mhz: 3.0,
            delta_mhz: 0.0,
            theta_lo: None,
            delta_theta: FRAC_PI_2,
            eta: 1.0,
            epsilon: 1.0,
            k_target: 0.95,
            quantile_override: None,
            fock_dim: 30,
            tau_us: kpo_core::sme_dynamics::DEFAULT_TAU,
            t_end_us: 200.0,
            me_dt_us: kpo_core::me_dynamics::DEFAULT_ME_DT,
            me_t_max_us: 40.0,
            snapshot_stride: 0,
            ta_list_us: vec![0.1],
            ensemble: 1,
            seed: 0,
            sweep_values: Vec::new(),
            fixed_ta_us: None,
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Physical parameters in rad/us. Fails on invalid values.
    pub fn params(&self) -> Result<KpoParams> {
        let mut p = KpoParams {
            chi: mhz_to_rad_per_us(self.chi_mhz),
            beta: mhz_to_rad_per_us(self.beta_mhz),
            kappa: mhz_to_rad_per_us(self.kappa_mhz),
            delta: mhz_to_rad_per_us(self.delta_mhz),
            theta_lo: self.theta_lo.unwrap_or(0.0),
            eta: self.eta,
            epsilon: self.epsilon,
        };
        p.validate()?;
        if self.theta_lo.is_none() {
            p.align_local_oscillator(self.delta_theta)?;
        }
        Ok(p)
    }

    /// Checks the numerical settings shared by every command.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau_us", self.tau_us),
            ("t_end_us", self.t_end_us),
            ("me_dt_us", self.me_dt_us),
            ("me_t_max_us", self.me_t_max_us),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.k_target > 0.5 && self.k_target < 1.0) {
            return Err(CliError::Config(format!(
                "k_target must lie in (0.5, 1), got {}",
                self.k_target
            )));
        }
        if self.fock_dim < 2 {
            return Err(CliError::Config(format!(
                "fock_dim must be at least 2, got {}",
                self.fock_dim
            )));
        }
        self.params()?;
        Ok(())
    }

    /// Estimator settings for every requested averaging time.
    pub fn estimators(&self) -> Result<Vec<EstimatorConfig>> {
        if self.ta_list_us.is_empty() {
            return Err(CliError::Config("ta_list_us is empty".into()));
        }
        self.ta_list_us
            .iter()
            .map(|&t_a| EstimatorConfig::new(t_a, self.tau_us).map_err(CliError::from))
            .collect()
    }

    pub fn require_ensemble(&self) -> Result<usize> {
        if self.ensemble == 0 {
            return Err(CliError::Config("ensemble must be at least 1".into()));
        }
        Ok(self.ensemble)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kpo_core::params::rad_per_us_to_mhz;

    #[test]
    fn missing_keys_take_defaults() {
        let c = RunConfig::from_json(r#"{"eta": 0.5}"#).unwrap();
        assert_eq!(c.eta, 0.5);
        assert_eq!(c.fock_dim, 30);
        assert_eq!(c.k_target, 0.95);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RunConfig::from_json(r#"{"chi": 3.0}"#),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn megahertz_round_trip() {
        let c =
            RunConfig::from_json(r#"{"chi_mhz": 3.0, "beta_mhz": 1.7, "kappa_mhz": 0.31, "delta_mhz": -0.2}"#).unwrap();
        let p = c.params().unwrap();
        assert_eq!(p.chi, 2.0 * std::f64::consts::PI * 3.0);
        for (mhz, rad) in [(3.0, p.chi), (1.7, p.beta), (0.31, p.kappa), (-0.2, p.delta)] {
            assert!((rad_per_us_to_mhz(rad) - mhz).abs() <= 1e-12 * mhz.abs());
        }
    }

    #[test]
    fn local_oscillator_is_aligned_unless_given() {
        let c = RunConfig::from_json(r#"{"delta_theta": 1.2}"#).unwrap();
        assert!((c.params().unwrap().delta_theta().unwrap() - 1.2).abs() < 1e-15);
        let c = RunConfig::from_json(r#"{"theta_lo": 0.25}"#).unwrap();
        assert_eq!(c.params().unwrap().theta_lo, 0.25);
    }

    #[test]
    fn invalid_settings_are_config_errors() {
        for bad in [
            r#"{"tau_us": 0}"#,
            r#"{"k_target": 1.0}"#,
            r#"{"eta": 2}"#,
            r#"{"fock_dim": 1}"#,
        ] {
            let err = RunConfig::from_json(bad).unwrap().validate().unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}");
        }
        let c = RunConfig::from_json(r#"{"ta_list_us": [0.00015]}"#).unwrap();
        assert_eq!(c.estimators().unwrap_err().exit_code(), 2);
        let c = RunConfig::from_json(r#"{"ensemble": 0}"#).unwrap();
        assert!(c.require_ensemble().is_err());
    }
}
