//! The five subcommands. Each returns the data files it wrote.

use std::path::PathBuf;

use serde::Serialize;

use kpo_core::estimator::{estimate_state, moving_average, sweep_ta, EstimatorConfig, SweepSettings};
use kpo_core::hilbert::FockSpace;
use kpo_core::me_dynamics::{expected_jump_interval, measure_jump_rate, OmegaFit};
use kpo_core::params::mhz_to_rad_per_us;
use kpo_core::sme_dynamics::{default_initial_state, simulate_trajectory_with, SmeOptions};
use kpo_core::{alpha_stationary, lower_bound_ta, upper_bound_ta, BoundReport, KpoParams, NoiseStream};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{float, ta_label, Sink};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Ta,
    Eta,
    DeltaTheta,
    Beta,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Ta => "ta",
            Axis::Eta => "eta",
            Axis::DeltaTheta => "delta_theta",
            Axis::Beta => "beta",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AlphaOutput {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub abs: f64,
    pub arg: f64,
}

pub fn alpha(config: &RunConfig, sink: &Sink) -> Result<(AlphaOutput, PathBuf)> {
    let a = alpha_stationary(&config.params()?)?;
    let out = AlphaOutput {
        alpha_re: a.re,
        alpha_im: a.im,
        abs: a.norm(),
        arg: a.arg(),
    };
    let path = sink.json("alpha.json", &out)?;
    Ok((out, path))
}

pub fn trajectory(config: &RunConfig, sink: &Sink) -> Result<PathBuf> {
    config.validate()?;
    let estimators = config.estimators()?;
    let p = config.params()?;
    let space = FockSpace::new(config.fock_dim)?;
    let model = kpo_core::model::KpoModel::new(space, p)?;
    let rho0 = default_initial_state(space, &p)?;
    let options = SmeOptions {
        snapshot_stride: config.snapshot_stride,
        ..SmeOptions::default()
    };
    let mut noise = NoiseStream::new(config.seed, 0);
    let rec = simulate_trajectory_with(&model, &rho0, config.t_end_us, config.tau_us, &mut noise, options)?;

    let averages = estimators
        .iter()
        .map(|e| moving_average(&rec, e))
        .collect::<kpo_core::Result<Vec<_>>>()?;

    let mut header: Vec<String> = ["t_us", "f_plus", "f_minus", "dN"].map(String::from).to_vec();
    for prefix in ["nbar", "est_sign", "est_fid"] {
        header.extend(config.ta_list_us.iter().map(|&t| format!("{prefix}_{}", ta_label(t))));
    }
    let rows = (0..rec.len()).map(|i| {
        let mut row = vec![
            float(rec.times[i]),
            float(rec.f_plus[i]),
            float(rec.f_minus[i]),
            float(rec.dn[i]),
        ];
        let windowed: Vec<Option<f64>> = estimators
            .iter()
            .zip(&averages)
            .map(|(e, avg)| i.checked_sub(e.window()).map(|j| avg[j]))
            .collect();
        row.extend(windowed.iter().map(|n| n.map(float).unwrap_or_default()));
        row.extend(
            windowed
                .iter()
                .map(|n| n.map(|x| estimate_state(x).to_string()).unwrap_or_default()),
        );
        row.extend(windowed.iter().map(|n| {
            n.map(|x| {
                float(if estimate_state(x) > 0 {
                    rec.f_plus[i]
                } else {
                    rec.f_minus[i]
                })
            })
            .unwrap_or_default()
        }));
        row
    });
    sink.csv("trajectory.csv", &header, rows)
}

/// Bounds for one parameter set; `None` where the bound is undefined.
fn analytic_bounds(config: &RunConfig, p: &KpoParams, omega: Option<f64>) -> (Option<f64>, Option<f64>) {
    let lower = alpha_stationary(p).ok().and_then(|a| {
        let dtheta = a.arg() - p.theta_lo;
        match config.quantile_override {
            Some(z) => kpo_core::bounds::lower_bound_ta_with_quantile(z, a, p.kappa, p.eta, dtheta).ok(),
            None => lower_bound_ta(a, p.kappa, config.k_target, p.eta, dtheta).ok(),
        }
    });
    let upper = omega.and_then(|w| upper_bound_ta(w, config.k_target).ok());
    (lower, upper)
}

fn jump_rate(config: &RunConfig, p: &KpoParams) -> Result<OmegaFit> {
    let space = FockSpace::new(config.fock_dim)?;
    Ok(measure_jump_rate(space, p, config.me_dt_us, config.me_t_max_us)?)
}

/// One row of a sweep table; bounds are `None` where undefined.
struct SweepLine {
    value: f64,
    mean: f64,
    stderr: f64,
    lower: Option<f64>,
    upper: Option<f64>,
}

pub fn sweep(config: &RunConfig, axis: Axis, sink: &Sink) -> Result<PathBuf> {
    config.validate()?;
    let ensemble = config.require_ensemble()?;
    let base = config.params()?;
    let settings = SweepSettings {
        dim: config.fock_dim,
        tau: config.tau_us,
        t_end: config.t_end_us,
        ensemble,
        seed: config.seed,
        options: SmeOptions::default(),
    };

    let mut table: Vec<SweepLine> = Vec::new();
    if axis == Axis::Ta {
        config.estimators()?;
        let omega = jump_rate(config, &base).ok().map(|f| f.omega);
        let (lower, upper) = analytic_bounds(config, &base, omega);
        for row in sweep_ta(&base, &config.ta_list_us, &settings)? {
            table.push(SweepLine {
                value: row.t_a,
                mean: row.success_mean,
                stderr: row.success_stderr,
                lower,
                upper,
            });
        }
    } else {
        let t_a = config
            .fixed_ta_us
            .ok_or_else(|| CliError::Config(format!("sweep over {} needs fixed_ta_us", axis.name())))?;
        EstimatorConfig::new(t_a, config.tau_us)?;
        if config.sweep_values.is_empty() {
            return Err(CliError::Config("sweep_values is empty".into()));
        }
        // The jump rate depends on the oscillator only, not on how it is watched.
        let shared_omega = match axis {
            Axis::Beta => None,
            _ => jump_rate(config, &base).ok().map(|f| f.omega),
        };
        for &v in &config.sweep_values {
            let mut p = base;
            match axis {
                Axis::Eta => p.eta = v,
                Axis::DeltaTheta => {}
                Axis::Beta => p.beta = mhz_to_rad_per_us(v),
                Axis::Ta => unreachable!(),
            }
            p.validate()?;
            if axis == Axis::DeltaTheta {
                p.align_local_oscillator(v)?;
            } else if config.theta_lo.is_none() {
                p.align_local_oscillator(config.delta_theta)?;
            }
            let omega = match axis {
                Axis::Beta => jump_rate(config, &p).ok().map(|f| f.omega),
                _ => shared_omega,
            };
            let (lower, upper) = analytic_bounds(config, &p, omega);
            let row = sweep_ta(&p, &[t_a], &settings)?[0];
            table.push(SweepLine {
                value: v,
                mean: row.success_mean,
                stderr: row.success_stderr,
                lower,
                upper,
            });
        }
    }

    let header = [
        "axis_value",
        "success_mean",
        "success_stderr",
        "t_lower_analytic",
        "t_upper_analytic",
    ]
    .map(String::from);
    let cell = |x: Option<f64>| x.map(float).unwrap_or_default();
    let rows = table.into_iter().map(|l| {
        vec![
            float(l.value),
            float(l.mean),
            float(l.stderr),
            cell(l.lower),
            cell(l.upper),
        ]
    });
    sink.csv(&format!("sweep_{}.csv", axis.name()), &header, rows)
}

#[derive(Debug, Serialize)]
pub struct OmegaOutput {
    pub omega_rad_per_us: f64,
    pub omega_over_2pi_khz: f64,
    pub e_t_i_us: f64,
    pub t_upper_us: f64,
    pub fit_rms: f64,
    pub fit_samples: usize,
    pub fit_window_end_us: f64,
}

pub fn fit_omega(config: &RunConfig, sink: &Sink) -> Result<(OmegaOutput, PathBuf)> {
    config.validate()?;
    let fit = jump_rate(config, &config.params()?)?;
    let out = OmegaOutput {
        omega_rad_per_us: fit.omega,
        omega_over_2pi_khz: fit.omega / (2.0 * std::f64::consts::PI) * 1e3,
        e_t_i_us: expected_jump_interval(fit.omega)?,
        t_upper_us: upper_bound_ta(fit.omega, config.k_target)?,
        fit_rms: fit.rms,
        fit_samples: fit.samples,
        fit_window_end_us: fit.window_end,
    };
    let path = sink.json("omega.json", &out)?;
    Ok((out, path))
}

#[derive(Debug, Serialize)]
pub struct BoundsOutput {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub k_target: f64,
    pub quantile_override: Option<f64>,
    pub eta: f64,
    pub delta_theta: f64,
    pub t_lower_us: f64,
    pub omega_rad_per_us: f64,
    pub e_t_i_us: f64,
    pub t_upper_us: f64,
}

pub fn bounds(config: &RunConfig, sink: &Sink) -> Result<(BoundsOutput, PathBuf)> {
    config.validate()?;
    let p = config.params()?;
    let fit = jump_rate(config, &p)?;
    let r = BoundReport::new(&p, fit.omega, config.k_target, config.quantile_override)?;
    let out = BoundsOutput {
        alpha_re: r.alpha_re,
        alpha_im: r.alpha_im,
        k_target: r.k_target,
        quantile_override: config.quantile_override,
        eta: r.eta,
        delta_theta: r.delta_theta,
        t_lower_us: r.t_lower,
        omega_rad_per_us: r.omega,
        e_t_i_us: r.e_t_i,
        t_upper_us: r.t_upper,
    };
    let path = sink.json("bounds.json", &out)?;
    Ok((out, path))
}
