//! Python bindings: `import kpo_homodyne`.

use std::f64::consts::FRAC_PI_2;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use kpo_core::estimator::{score_estimation, EstimatorConfig, SweepSettings};
use kpo_core::hilbert::{FockSpace, C64};
use kpo_core::me_dynamics::{measure_jump_rate, DEFAULT_ME_DT};
use kpo_core::params::mhz_to_rad_per_us;
use kpo_core::sme_dynamics::{
    default_initial_state, simulate_trajectory_with, SmeOptions, TrajectoryRecord, DEFAULT_TAU,
};
use kpo_core::{bounds, BoundReport, Error, NoiseStream};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Divergence { .. }
        | Error::FitWindow { .. }
        | Error::NonPositiveSignal { .. }
        | Error::NonPositiveRate(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for kpo_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Oscillator and detector parameters. Rates in rad/us.
#[pyclass(name = "KpoParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyParams(kpo_core::KpoParams);

#[pymethods]
impl PyParams {
    /// Builds parameters from `f/2pi` in MHz, with the local oscillator set
    /// so that `arg(alpha) - theta_lo = delta_theta`.
    #[staticmethod]
    #[pyo3(signature = (chi, beta, kappa, delta=0.0, eta=1.0, epsilon=1.0, delta_theta=FRAC_PI_2))]
    fn from_mhz(
        chi: f64,
        beta: f64,
        kappa: f64,
        delta: f64,
        eta: f64,
        epsilon: f64,
        delta_theta: f64,
    ) -> PyResult<Self> {
        let mut p = kpo_core::KpoParams {
            chi: mhz_to_rad_per_us(chi),
            beta: mhz_to_rad_per_us(beta),
            kappa: mhz_to_rad_per_us(kappa),
            delta: mhz_to_rad_per_us(delta),
            theta_lo: 0.0,
            eta,
            epsilon,
        };
        p.validate().py()?;
        p.align_local_oscillator(delta_theta).py()?;
        Ok(Self(p))
    }

    #[getter]
    fn chi(&self) -> f64 {
        self.0.chi
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta
    }
    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta
    }
    #[getter]
    fn theta_lo(&self) -> f64 {
        self.0.theta_lo
    }
    #[getter]
    fn eta(&self) -> f64 {
        self.0.eta
    }
    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }

    fn delta_theta(&self) -> PyResult<f64> {
        self.0.delta_theta().py()
    }

    /// Stationary coherent amplitude.
    fn alpha(&self) -> PyResult<C64> {
        bounds::alpha_stationary(&self.0).py()
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "KpoParams(chi={}, beta={}, kappa={}, delta={}, theta_lo={}, eta={}, epsilon={})",
            p.chi, p.beta, p.kappa, p.delta, p.theta_lo, p.eta, p.epsilon
        )
    }
}

#[pyfunction]
fn alpha_stationary(params: PyParams) -> PyResult<C64> {
    bounds::alpha_stationary(&params.0).py()
}

/// Shortest averaging time (us) reaching `k_target` against detector noise.
#[pyfunction]
#[pyo3(signature = (params, k_target=0.95))]
fn lower_bound_ta(params: PyParams, k_target: f64) -> PyResult<f64> {
    let p = params.0;
    let a = bounds::alpha_stationary(&p).py()?;
    bounds::lower_bound_ta(a, p.kappa, k_target, p.eta, p.delta_theta().py()?).py()
}

/// Longest averaging time (us) keeping jump smearing below `1 - k_target`.
#[pyfunction]
#[pyo3(signature = (omega, k_target=0.95))]
fn upper_bound_ta(omega: f64, k_target: f64) -> PyResult<f64> {
    bounds::upper_bound_ta(omega, k_target).py()
}

/// Jump rate fitted to master-equation relaxation from `|alpha>`.
#[pyfunction]
#[pyo3(signature = (params, dim=30, dt=DEFAULT_ME_DT, t_max=40.0))]
fn fit_omega<'py>(py: Python<'py>, params: PyParams, dim: usize, dt: f64, t_max: f64) -> PyResult<Bound<'py, PyDict>> {
    let space = FockSpace::new(dim).py()?;
    let fit = py.detach(|| measure_jump_rate(space, &params.0, dt, t_max)).py()?;
    let d = PyDict::new(py);
    d.set_item("omega", fit.omega)?;
    d.set_item("rms", fit.rms)?;
    d.set_item("samples", fit.samples)?;
    d.set_item("window_end", fit.window_end)?;
    Ok(d)
}

/// Full averaging-time window as a dict.
#[pyfunction]
#[pyo3(signature = (params, omega, k_target=0.95, quantile=None))]
fn bound_report<'py>(
    py: Python<'py>,
    params: PyParams,
    omega: f64,
    k_target: f64,
    quantile: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let r = BoundReport::new(&params.0, omega, k_target, quantile).py()?;
    let d = PyDict::new(py);
    d.set_item("alpha_re", r.alpha_re)?;
    d.set_item("alpha_im", r.alpha_im)?;
    d.set_item("k_target", r.k_target)?;
    d.set_item("t_lower", r.t_lower)?;
    d.set_item("omega", r.omega)?;
    d.set_item("e_t_i", r.e_t_i)?;
    d.set_item("t_upper", r.t_upper)?;
    d.set_item("eta", r.eta)?;
    d.set_item("delta_theta", r.delta_theta)?;
    Ok(d)
}

/// Two-state jump process: returns `(jump_times, error_rate)` for a boxcar of length `t_a`.
#[pyfunction]
#[pyo3(signature = (omega, duration, dt, t_a, seed=0, stream=0))]
fn telegraph(omega: f64, duration: f64, dt: f64, t_a: f64, seed: u64, stream: u64) -> PyResult<(Vec<f64>, f64)> {
    let path = bounds::simulate_telegraph(omega, duration, dt, &mut NoiseStream::new(seed, stream)).py()?;
    let rate = bounds::error_rate_of_window(&path, t_a).py()?;
    Ok((path.jump_times, rate))
}

/// One conditioned trajectory and its detector record.
#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory(TrajectoryRecord);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }
    #[getter]
    fn f_plus(&self) -> Vec<f64> {
        self.0.f_plus.clone()
    }
    #[getter]
    fn f_minus(&self) -> Vec<f64> {
        self.0.f_minus.clone()
    }
    #[getter]
    fn dn(&self) -> Vec<f64> {
        self.0.dn.clone()
    }
    #[getter]
    fn dw(&self) -> Vec<f64> {
        self.0.dw.clone()
    }
    #[getter]
    fn tau(&self) -> f64 {
        self.0.tau
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }
    #[getter]
    fn min_eigenvalue(&self) -> f64 {
        self.0.min_eigenvalue
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Boxcar estimation with averaging time `t_a`, scored against the fidelities.
    fn score<'py>(&self, py: Python<'py>, t_a: f64) -> PyResult<Bound<'py, PyDict>> {
        let config = EstimatorConfig::new(t_a, self.0.tau).py()?;
        let s = score_estimation(&self.0, &config).py()?;
        let d = PyDict::new(py);
        d.set_item("t_a", s.t_a)?;
        d.set_item("success_probability", s.success_probability)?;
        d.set_item("times", s.times)?;
        d.set_item("n_bar", s.n_bar)?;
        d.set_item("est_sign", s.est_sign)?;
        d.set_item("est_fidelity", s.est_fidelity)?;
        Ok(d)
    }
}

/// Simulates one trajectory from the symmetric coherent mixture.
#[pyfunction]
#[pyo3(signature = (params, t_end, dim=20, tau=DEFAULT_TAU, seed=0, stream=0))]
fn simulate_trajectory(
    py: Python<'_>,
    params: PyParams,
    t_end: f64,
    dim: usize,
    tau: f64,
    seed: u64,
    stream: u64,
) -> PyResult<PyTrajectory> {
    let space = FockSpace::new(dim).py()?;
    let model = kpo_core::KpoModel::new(space, params.0).py()?;
    let rho0 = default_initial_state(space, &params.0).py()?;
    let rec = py
        .detach(|| {
            simulate_trajectory_with(
                &model,
                &rho0,
                t_end,
                tau,
                &mut NoiseStream::new(seed, stream),
                SmeOptions::default(),
            )
        })
        .py()?;
    Ok(PyTrajectory(rec))
}

/// Success probability versus averaging time over one shared ensemble:
/// list of `(t_a, mean, stderr)`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (params, ta_list, t_end, ensemble, dim=20, tau=DEFAULT_TAU, seed=0))]
fn sweep_ta(
    py: Python<'_>,
    params: PyParams,
    ta_list: Vec<f64>,
    t_end: f64,
    ensemble: usize,
    dim: usize,
    tau: f64,
    seed: u64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let settings = SweepSettings {
        dim,
        tau,
        t_end,
        ensemble,
        seed,
        options: SmeOptions::default(),
    };
    let rows = py.detach(|| kpo_core::sweep_ta(&params.0, &ta_list, &settings)).py()?;
    Ok(rows
        .into_iter()
        .map(|r| (r.t_a, r.success_mean, r.success_stderr))
        .collect())
}

#[pymodule]
fn kpo_homodyne(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(alpha_stationary, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_ta, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_ta, m)?)?;
    m.add_function(wrap_pyfunction!(fit_omega, m)?)?;
    m.add_function(wrap_pyfunction!(bound_report, m)?)?;
    m.add_function(wrap_pyfunction!(telegraph, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_ta, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
