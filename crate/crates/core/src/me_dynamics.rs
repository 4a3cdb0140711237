//! Deterministic Lindblad evolution of the unmonitored oscillator and the
//! jump-rate fit built on it.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bounds::alpha_stationary;
use crate::error::{Error, Result};
use crate::hilbert::{coherent_ket, hermitize_in_place, DensityMatrix, FockSpace, Operator, C64};
use crate::model::KpoModel;
use crate::params::KpoParams;

/// Fraction of `Re[alpha]` below which samples are left out of the rate fit.
pub const FIT_THRESHOLD: f64 = 0.1;
/// Minimum number of samples inside the fit window.
pub const MIN_FIT_SAMPLES: usize = 10;
/// Default master-equation step in microseconds. RK4 error turns into small
/// negative eigenvalues (growing like dt^5) when starting from a pure state;
/// at this step they stay below 1e-9 at the standard operating points.
pub const DEFAULT_ME_DT: f64 = 2e-4;

/// Fixed-step integration scheme for the master equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum MeScheme {
    /// Classical RK4 in the interaction frame of the Fock-diagonal part of the
    /// generator (integrating-factor RK4). Stable for large truncations.
    #[default]
    InteractionRk4,
    /// Classical RK4 on the full generator. Only stable while
    /// `dt * chi * dim^2 / 2` stays of order one.
    Rk4,
}

/// Time series of the unmonitored evolution.
#[derive(Debug, Clone)]
pub struct MeTrajectory {
    pub times: Vec<f64>,
    /// `<x>` with `x = (a + a^dagger)/2`, one entry per time.
    pub mean_x: Vec<f64>,
    /// States kept every `snapshot_stride` steps.
    pub snapshots: Vec<(f64, DensityMatrix)>,
    pub final_state: DensityMatrix,
    /// Largest `|Tr rho - 1|` seen before renormalization.
    pub max_trace_drift: f64,
    /// Largest `max |rho - rho^dagger|` seen before hermitization.
    pub max_hermiticity_error: f64,
}

/// Right-hand side of the master equation,
/// `-i[H, rho] + kappa (a rho a^dagger - {a^dagger a, rho}/2)`.
pub fn lindblad_rhs(params: &KpoParams, rho: &DensityMatrix) -> Result<Operator> {
    let model = KpoModel::new(rho.space(), *params)?;
    Operator::new(rho.space(), model.rhs(rho.matrix()))
}

/// Stepper for the master equation with renormalization after every step.
pub struct MeIntegrator {
    model: KpoModel,
    scheme: MeScheme,
    dt: f64,
    time: f64,
    rho: DMatrix<C64>,
    full: DMatrix<C64>,
    half: DMatrix<C64>,
    max_trace_drift: f64,
    max_hermiticity_error: f64,
}

impl MeIntegrator {
    pub fn new(model: KpoModel, rho0: &DensityMatrix, dt: f64, scheme: MeScheme) -> Result<Self> {
        if rho0.space() != model.space() {
            return Err(Error::DimensionMismatch {
                expected: model.space().dim(),
                found: rho0.space().dim(),
            });
        }
        model.params().check_step(dt)?;
        let full = model.phase_propagator(dt);
        let half = model.phase_propagator(dt / 2.0);
        Ok(Self {
            model,
            scheme,
            dt,
            time: 0.0,
            rho: rho0.matrix().clone(),
            full,
            half,
            max_trace_drift: 0.0,
            max_hermiticity_error: 0.0,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn state(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.model.space(), self.rho.clone())
    }

    pub fn mean_x(&self) -> f64 {
        self.model.mean_position(&self.rho)
    }

    pub fn step(&mut self) -> Result<()> {
        let next = match self.scheme {
            MeScheme::InteractionRk4 => self.interaction_rk4(),
            MeScheme::Rk4 => self.rk4(),
        };
        let trace = next.trace().re;
        self.max_trace_drift = self.max_trace_drift.max((trace - 1.0).abs());
        self.max_hermiticity_error = self
            .max_hermiticity_error
            .max(DensityMatrix::from_matrix_unchecked(self.model.space(), next.clone()).hermiticity_error());
        self.rho = next;
        hermitize_in_place(&mut self.rho)?;
        self.time += self.dt;
        Ok(())
    }

    fn rk4(&self) -> DMatrix<C64> {
        let h = self.dt;
        let rho = &self.rho;
        let k1 = self.model.rhs(rho);
        let k2 = self.model.rhs(&(rho + &k1 * C64::new(h / 2.0, 0.0)));
        let k3 = self.model.rhs(&(rho + &k2 * C64::new(h / 2.0, 0.0)));
        let k4 = self.model.rhs(&(rho + &k3 * C64::new(h, 0.0)));
        rho + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
    }

    // Lawson RK4: RK4 applied to v = exp(-tG) rho, mapped back to the lab frame.
    // G holds only the Kerr and detuning phases, so the frame change is unitary
    // and every stage stays traceless.
    fn interaction_rk4(&self) -> DMatrix<C64> {
        let h = self.dt;
        let rho = &self.rho;
        let m = &self.model;
        let n0 = m.dissipative_rhs(rho);
        let a = self.half.component_mul(&(rho + &n0 * C64::new(h / 2.0, 0.0)));
        let na = m.dissipative_rhs(&a);
        let b = self.half.component_mul(rho) + &na * C64::new(h / 2.0, 0.0);
        let nb = m.dissipative_rhs(&b);
        let c = self.full.component_mul(rho) + self.half.component_mul(&nb) * C64::new(h, 0.0);
        let nc = m.dissipative_rhs(&c);
        let mut incr = self.full.component_mul(&n0);
        incr += self.half.component_mul(&(na + nb)) * C64::new(2.0, 0.0);
        incr += nc;
        self.full.component_mul(rho) + incr * C64::new(h / 6.0, 0.0)
    }
}

/// Options for [`evolve_me_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct MeOptions {
    pub scheme: MeScheme,
    /// Keep a state snapshot every this many steps (0 keeps none).
    pub snapshot_stride: usize,
}

/// Integrates the master equation from `rho0` to `t_end` with fixed step `dt`.
pub fn evolve_me(params: &KpoParams, rho0: &DensityMatrix, t_end: f64, dt: f64) -> Result<MeTrajectory> {
    let model = KpoModel::new(rho0.space(), *params)?;
    evolve_me_with(model, rho0, t_end, dt, MeOptions::default())
}

pub fn evolve_me_with(
    model: KpoModel,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
    options: MeOptions,
) -> Result<MeTrajectory> {
    if !(t_end >= 0.0) {
        return Err(Error::Domain(format!("t_end must be non-negative, got {t_end}")));
    }
    let mut integrator = MeIntegrator::new(model, rho0, dt, options.scheme)?;
    let steps = step_count(t_end, dt);
    let mut times = Vec::with_capacity(steps + 1);
    let mut mean_x = Vec::with_capacity(steps + 1);
    let mut snapshots = Vec::new();
    for k in 0..=steps {
        if k > 0 {
            integrator.step()?;
        }
        let t = k as f64 * dt;
        times.push(t);
        mean_x.push(integrator.mean_x());
        if options.snapshot_stride > 0 && k % options.snapshot_stride == 0 {
            snapshots.push((t, integrator.state()));
        }
    }
    Ok(MeTrajectory {
        times,
        mean_x,
        snapshots,
        final_state: integrator.state(),
        max_trace_drift: integrator.max_trace_drift,
        max_hermiticity_error: integrator.max_hermiticity_error,
    })
}

pub(crate) fn step_count(t_end: f64, dt: f64) -> usize {
    (t_end / dt - 1e-9).ceil().max(0.0) as usize
}

/// Long-time state reached from `rho0` after `20 / kappa`.
pub fn steady_state(model: KpoModel, rho0: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
    let kappa = model.params().kappa;
    if kappa <= 0.0 {
        return Err(Error::Domain("steady state needs kappa > 0".into()));
    }
    Ok(evolve_me_with(model, rho0, 20.0 / kappa, dt, MeOptions::default())?.final_state)
}

/// Result of fitting `<x>(t) = Re[alpha] exp(-2 Omega t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaFit {
    /// Jump rate in rad/us.
    pub omega: f64,
    /// RMS residual of `ln(<x>/Re[alpha]) + 2 Omega t` over the window.
    pub rms: f64,
    pub samples: usize,
    /// Last time included in the window.
    pub window_end: f64,
}

/// Least-squares fit of `ln(<x>(t)/Re[alpha]) = -2 Omega t` over the samples
/// with `<x> >= 0.1 Re[alpha]`.
pub fn fit_omega(traj: &MeTrajectory, re_alpha: f64) -> Result<OmegaFit> {
    fit_decay(&traj.times, &traj.mean_x, re_alpha)
}

pub fn fit_decay(times: &[f64], mean_x: &[f64], re_alpha: f64) -> Result<OmegaFit> {
    if !(re_alpha > 0.0) {
        return Err(Error::Domain(format!("Re[alpha] must be positive, got {re_alpha}")));
    }
    if times.len() != mean_x.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: mean_x.len(),
        });
    }
    let threshold = FIT_THRESHOLD * re_alpha;
    let window: Vec<(f64, f64)> = times
        .iter()
        .zip(mean_x)
        .filter(|(_, x)| **x >= threshold)
        .map(|(t, x)| (*t, (x / re_alpha).ln()))
        .collect();
    if window.len() < MIN_FIT_SAMPLES {
        return Err(Error::FitWindow {
            qualifying: window.len(),
            required: MIN_FIT_SAMPLES,
        });
    }
    let window_end = window.last().map(|w| w.0).unwrap_or(0.0);
    if let Some((t, _)) = times.iter().zip(mean_x).find(|(t, x)| **t <= window_end && **x <= 0.0) {
        return Err(Error::NonPositiveSignal { time: *t });
    }
    let stt: f64 = window.iter().map(|(t, _)| t * t).sum();
    let sty: f64 = window.iter().map(|(t, y)| t * y).sum();
    if stt <= 0.0 {
        return Err(Error::FitWindow {
            qualifying: 0,
            required: MIN_FIT_SAMPLES,
        });
    }
    let slope = sty / stt;
    let rms = (window.iter().map(|(t, y)| (y - slope * t).powi(2)).sum::<f64>() / window.len() as f64).sqrt();
    Ok(OmegaFit {
        omega: -slope / 2.0,
        rms,
        samples: window.len(),
        window_end,
    })
}

/// Evolves `|alpha><alpha|` until `<x>` has decayed past the fit window (or
/// `t_max`), then fits the jump rate.
pub fn measure_jump_rate(space: FockSpace, params: &KpoParams, dt: f64, t_max: f64) -> Result<OmegaFit> {
    let alpha = alpha_stationary(params)?;
    let rho0 = coherent_ket(space, alpha)?.projector();
    let model = KpoModel::new(space, *params)?;
    let mut integrator = MeIntegrator::new(model, &rho0, dt, MeScheme::InteractionRk4)?;
    let stop = 0.5 * FIT_THRESHOLD * alpha.re;
    let mut times = vec![0.0];
    let mut mean_x = vec![integrator.mean_x()];
    let steps = step_count(t_max, dt);
    for k in 1..=steps {
        integrator.step()?;
        let x = integrator.mean_x();
        times.push(k as f64 * dt);
        mean_x.push(x);
        if x < stop {
            break;
        }
    }
    fit_decay(&times, &mean_x, alpha.re)
}

/// Mean time between bit flips, `1 / Omega`.
pub fn expected_jump_interval(omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveRate(omega));
    }
    Ok(1.0 / omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Ket;

    fn set_a() -> KpoParams {
        KpoParams::ideal_from_mhz(3.0, 3.0, 3.0).unwrap()
    }

    #[test]
    fn rhs_is_traceless() {
        let s = FockSpace::new(16).unwrap();
        let p = set_a();
        for alpha in [C64::new(0.4, 0.2), C64::new(1.2, -0.7)] {
            let rho = coherent_ket(s, alpha).unwrap().projector();
            let d = lindblad_rhs(&p, &rho).unwrap();
            assert!(d.matrix().trace().norm() < 1e-10);
        }
    }

    #[test]
    fn kerr_eigenstates_are_stationary_without_loss_or_pump() {
        let s = FockSpace::new(10).unwrap();
        let mut p = set_a();
        p.beta = 0.0;
        p.kappa = 0.0;
        let a = Ket::fock(s, 2).unwrap().projector();
        let b = Ket::fock(s, 5).unwrap().projector();
        let rho = DensityMatrix::mixture(&[(0.25, &a), (0.75, &b)]).unwrap();
        assert!(lindblad_rhs(&p, &rho).unwrap().matrix().norm() < 1e-14);
    }

    #[test]
    fn vacuum_stays_vacuum() {
        let s = FockSpace::new(12).unwrap();
        let mut p = set_a();
        p.beta = 0.0;
        p.kappa = 0.0;
        let vac = Ket::fock(s, 0).unwrap().projector();
        let traj = evolve_me(&p, &vac, 1.0, 2e-3).unwrap();
        assert!((traj.final_state.matrix() - vac.matrix()).norm() < 1e-14);
    }

    #[test]
    fn step_size_is_checked() {
        let s = FockSpace::new(8).unwrap();
        let rho = Ket::fock(s, 0).unwrap().projector();
        let err = evolve_me(&set_a(), &rho, 1.0, 0.01).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
    }

    #[test]
    fn schemes_agree_at_small_truncation() {
        let s = FockSpace::new(10).unwrap();
        let mut p = KpoParams::ideal_from_mhz(1.0, 0.4, 1.0).unwrap();
        p.delta = 0.3;
        let rho0 = coherent_ket(s, C64::new(0.6, 0.1)).unwrap().projector();
        let run = |scheme| {
            let model = KpoModel::new(s, p).unwrap();
            evolve_me_with(
                model,
                &rho0,
                0.5,
                1e-3,
                MeOptions {
                    scheme,
                    snapshot_stride: 0,
                },
            )
            .unwrap()
        };
        let a = run(MeScheme::InteractionRk4);
        let b = run(MeScheme::Rk4);
        assert!(a.final_state.frobenius_distance(&b.final_state).unwrap() < 1e-8);
    }

    #[test]
    fn integrator_preserves_trace_and_hermiticity() {
        let s = FockSpace::new(30).unwrap();
        let p = set_a();
        let alpha = alpha_stationary(&p).unwrap();
        let rho0 = coherent_ket(s, alpha).unwrap().projector();
        let model = KpoModel::new(s, p).unwrap();
        let traj = evolve_me_with(
            model,
            &rho0,
            2.0,
            DEFAULT_ME_DT,
            MeOptions {
                scheme: MeScheme::InteractionRk4,
                snapshot_stride: 1000,
            },
        )
        .unwrap();
        assert!(traj.max_trace_drift < 1e-8, "{}", traj.max_trace_drift);
        assert!(traj.max_hermiticity_error < 1e-8);
        for (_, rho) in &traj.snapshots {
            assert!(rho.min_eigenvalue() > -1e-8, "{}", rho.min_eigenvalue());
            assert!((rho.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_mixture_has_zero_mean_x() {
        let s = FockSpace::new(30).unwrap();
        let p = set_a();
        let alpha = alpha_stationary(&p).unwrap();
        let rho0 = DensityMatrix::coherent_mixture(s, alpha).unwrap();
        let traj = evolve_me(&p, &rho0, 10.0, 2e-3).unwrap();
        assert!(traj.mean_x.iter().all(|x| x.abs() < 0.02));
    }

    #[test]
    fn fit_recovers_synthetic_rate() {
        let omega0 = 0.1257;
        let times: Vec<f64> = (0..2000).map(|k| k as f64 * 0.01).collect();
        let xs: Vec<f64> = times.iter().map(|t| 1.38 * (-2.0 * omega0 * t).exp()).collect();
        let fit = fit_decay(&times, &xs, 1.38).unwrap();
        assert!((fit.omega / omega0 - 1.0).abs() < 1e-6);
        assert!(fit.rms < 1e-10);
        // the window stops where <x> falls below 0.1 Re[alpha]
        assert!((fit.window_end - (10f64).ln() / (2.0 * omega0)).abs() < 0.011);
    }

    #[test]
    fn fit_error_paths() {
        let times: Vec<f64> = (0..5).map(|k| k as f64).collect();
        let xs = vec![1.0; 5];
        assert!(matches!(
            fit_decay(&times, &xs, 1.0),
            Err(Error::FitWindow { qualifying: 5, .. })
        ));

        let times: Vec<f64> = (0..40).map(|k| k as f64 * 0.1).collect();
        let mut xs: Vec<f64> = times.iter().map(|t| (-0.1 * t).exp()).collect();
        xs[10] = -0.2;
        assert!(matches!(
            fit_decay(&times, &xs, 1.0),
            Err(Error::NonPositiveSignal { .. })
        ));
        assert!(fit_decay(&times, &xs, 0.0).is_err());
    }

    #[test]
    fn jump_interval() {
        assert!((expected_jump_interval(2.0 * std::f64::consts::PI * 0.02).unwrap() - 7.957747154594767).abs() < 1e-12);
        assert_eq!(expected_jump_interval(1.0).unwrap(), 1.0);
        assert_eq!(
            expected_jump_interval(4.0).unwrap() * 2.0,
            expected_jump_interval(2.0).unwrap()
        );
        assert!(matches!(expected_jump_interval(0.0), Err(Error::NonPositiveRate(_))));
    }
}
