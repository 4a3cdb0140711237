//! Conditional (stochastic master equation) evolution under homodyne detection
//! and the detector record it produces.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::alpha_stationary;
use crate::error::{Error, Result};
use crate::hilbert::{coherent_ket, hermitize_with_drift, DensityMatrix, FockSpace, C64};
use crate::ladder::Banded;
use crate::me_dynamics::step_count;
use crate::model::KpoModel;
use crate::noise::NoiseStream;
use crate::params::KpoParams;

/// Default SME step in microseconds.
pub const DEFAULT_TAU: f64 = 1e-4;
/// The conditioned state is checked for negative eigenvalues this often.
pub const POSITIVITY_STRIDE: usize = 1000;

/// Update rule for one step of the conditioned state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SmeScheme {
    /// First-order completely positive step: the Fock-diagonal generator is
    /// applied exactly on both half steps around the measurement operator
    /// `I - i beta tau P + sqrt(eta) dy L + eta/2 (dy^2 - tau) L^2`, plus the
    /// unobserved share `(1 - eta) tau L rho L^dagger`.
    #[default]
    Kraus,
    /// The literal Euler-Maruyama update. Only usable for small truncations
    /// and steps; it loses positivity quickly at the oscillator's Kerr scales.
    EulerMaruyama,
}

/// Steps one conditioned state. Holds the precomputed propagators and scratch space.
#[derive(Debug, Clone)]
pub struct SmeStepper {
    model: KpoModel,
    tau: f64,
    scheme: SmeScheme,
    half: DMatrix<C64>,
    sqrt1: Vec<f64>,
    sqrt2: Vec<f64>,
    /// `L = c a` with `c = -i sqrt(kappa) e^{-i theta}`.
    c: C64,
    scratch: DMatrix<C64>,
    out: DMatrix<C64>,
}

impl SmeStepper {
    pub fn new(model: KpoModel, tau: f64, scheme: SmeScheme) -> Result<Self> {
        model.params().check_step(tau)?;
        let d = model.space().dim();
        let p = *model.params();
        Ok(Self {
            half: model.diagonal_propagator(0.5 * tau),
            sqrt1: (0..d).map(|r| ((r + 1) as f64).sqrt()).collect(),
            sqrt2: (0..d).map(|r| (((r + 1) * (r + 2)) as f64).sqrt()).collect(),
            c: C64::new(0.0, -p.kappa.sqrt()) * C64::from_polar(1.0, -p.theta_lo),
            scratch: DMatrix::zeros(d, d),
            out: DMatrix::zeros(d, d),
            model,
            tau,
            scheme,
        })
    }

    pub fn model(&self) -> &KpoModel {
        &self.model
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn scheme(&self) -> SmeScheme {
        self.scheme
    }

    /// `Tr[rho A]` for the homodyne observable.
    pub fn homodyne_mean(&self, rho: &DMatrix<C64>) -> f64 {
        self.model.homodyne_mean(rho)
    }

    /// Detector increment `(sqrt(eta) dW + eta tau Tr[rho A]) / epsilon` for the
    /// pre-step state.
    pub fn measurement_increment(&self, rho: &DMatrix<C64>, dw: f64) -> f64 {
        let p = self.model.params();
        (p.eta.sqrt() * dw + p.eta * self.tau * self.homodyne_mean(rho)) / p.epsilon
    }

    /// Advances `rho` in place by one step driven by `dw`. Returns the trace
    /// before renormalization.
    pub fn step(&mut self, rho: &mut DMatrix<C64>, dw: f64) -> Result<f64> {
        if !dw.is_finite() {
            return Err(Error::Domain(format!("Wiener increment must be finite, got {dw}")));
        }
        match self.scheme {
            SmeScheme::Kraus => self.kraus_update(rho, dw),
            SmeScheme::EulerMaruyama => self.euler_update(rho, dw),
        }
        let trace = self.out.trace().re;
        std::mem::swap(rho, &mut self.out);
        // The Kraus trace carries the measurement likelihood, so only a
        // non-positive or non-finite trace signals a breakdown there.
        let max_drift = match self.scheme {
            SmeScheme::Kraus => f64::INFINITY,
            SmeScheme::EulerMaruyama => 0.5,
        };
        hermitize_with_drift(rho, max_drift)?;
        Ok(trace)
    }

    fn kraus_update(&mut self, rho: &DMatrix<C64>, dw: f64) {
        let p = *self.model.params();
        let tau = self.tau;
        let sqrt_eta = p.eta.sqrt();
        let dy = dw + sqrt_eta * tau * self.homodyne_mean(rho);
        let first = self.c * (sqrt_eta * dy);
        let second = self.c * self.c * (0.5 * p.eta * (dy * dy - tau));
        let pump = C64::new(0.0, -p.beta * tau);
        let (s1, s2) = (&self.sqrt1, &self.sqrt2);
        // M = I + B; the identity is applied by copying rather than as a band.
        let b = Banded::zero(self.model.space())
            .with_band(1, |r| first * s1[r])
            .with_band(2, |r| (pump + second) * s2[r])
            .with_band(-2, |r| pump * s2[r - 2]);

        // sigma = U(tau/2) rho U(tau/2)^dagger
        let mut sigma = std::mem::replace(&mut self.out, DMatrix::zeros(0, 0));
        sigma.copy_from(rho);
        sigma.component_mul_assign(&self.half);
        // scratch = M sigma, next = M sigma M^dagger
        self.scratch.copy_from(&sigma);
        b.mul_left_acc(&sigma, &mut self.scratch);
        let mut next = self.scratch.clone();
        b.mul_right_adjoint_acc(&self.scratch, &mut next);
        let unobserved = (1.0 - p.eta) * tau * p.kappa;
        if unobserved > 0.0 {
            self.scratch.fill(C64::new(0.0, 0.0));
            self.model.lowering().mul_left_acc(&sigma, &mut self.scratch);
            self.scratch.scale_mut(unobserved);
            self.model.lowering().mul_right_adjoint_acc(&self.scratch, &mut next);
        }
        next.component_mul_assign(&self.half);
        self.out = next;
    }

    fn euler_update(&mut self, rho: &DMatrix<C64>, dw: f64) {
        let p = *self.model.params();
        let mut next = self.model.rhs(rho);
        next.scale_mut(self.tau);
        if p.eta > 0.0 {
            let mean = self.homodyne_mean(rho);
            let lowering = self.model.lowering();
            let mut kick = lowering.mul_left(rho) * self.c;
            kick += lowering.mul_right_adjoint(rho) * self.c.conj();
            kick -= rho * C64::new(mean, 0.0);
            next += kick * C64::new(p.eta.sqrt() * dw, 0.0);
        }
        next += rho;
        self.out = next;
    }
}

/// One literal Euler-Maruyama step of the SME followed by hermitization and
/// renormalization. Trajectory runs use [`SmeScheme::Kraus`] by default; see
/// [`sme_step_with`].
pub fn sme_step(params: &KpoParams, rho: &DensityMatrix, tau: f64, dw: f64) -> Result<DensityMatrix> {
    sme_step_with(params, rho, tau, dw, SmeScheme::EulerMaruyama)
}

pub fn sme_step_with(
    params: &KpoParams,
    rho: &DensityMatrix,
    tau: f64,
    dw: f64,
    scheme: SmeScheme,
) -> Result<DensityMatrix> {
    let space = rho.space();
    let mut stepper = SmeStepper::new(KpoModel::new(space, *params)?, tau, scheme)?;
    let mut m = rho.matrix().clone();
    stepper.step(&mut m, dw)?;
    Ok(DensityMatrix::from_matrix_unchecked(space, m))
}

/// Detector increment `(sqrt(eta) dW + eta tau Tr[rho A]) / epsilon`.
pub fn measurement_increment(params: &KpoParams, rho: &DensityMatrix, tau: f64, dw: f64) -> Result<f64> {
    params.validate()?;
    params.check_step(tau)?;
    if !dw.is_finite() {
        return Err(Error::Domain(format!("Wiener increment must be finite, got {dw}")));
    }
    let model = KpoModel::new(rho.space(), *params)?;
    Ok((params.eta.sqrt() * dw + params.eta * tau * model.homodyne_mean(rho.matrix())) / params.epsilon)
}

/// A conditioned trajectory and its detector record.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub params: KpoParams,
    pub tau: f64,
    pub times: Vec<f64>,
    /// `<alpha|rho|alpha>` at each time.
    pub f_plus: Vec<f64>,
    /// `<-alpha|rho|-alpha>` at each time.
    pub f_minus: Vec<f64>,
    /// `dn[i]` is the detector increment over `[times[i], times[i] + tau)`.
    pub dn: Vec<f64>,
    /// Wiener increments that drove each step.
    pub dw: Vec<f64>,
    pub seed: u64,
    pub stream_id: u64,
    pub rho_final: DensityMatrix,
    pub snapshots: Vec<(f64, DensityMatrix)>,
    /// Largest `|Tr rho - 1|` seen before renormalization. For the Kraus step
    /// this includes the O(sqrt(tau)) measurement likelihood, not only error.
    pub max_trace_drift: f64,
    /// Smallest eigenvalue seen at the periodic positivity checks.
    pub min_eigenvalue: f64,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Knobs for [`simulate_trajectory_with`].
#[derive(Debug, Clone, Copy)]
pub struct SmeOptions {
    pub scheme: SmeScheme,
    /// Keep a state snapshot every this many steps (0 keeps none).
    pub snapshot_stride: usize,
    /// Check positivity every this many steps (0 disables).
    pub positivity_stride: usize,
}

impl Default for SmeOptions {
    fn default() -> Self {
        Self {
            scheme: SmeScheme::default(),
            snapshot_stride: 0,
            positivity_stride: POSITIVITY_STRIDE,
        }
    }
}

/// Integrates one conditioned trajectory from `rho0` to `t_end`.
pub fn simulate_trajectory(
    params: &KpoParams,
    rho0: &DensityMatrix,
    t_end: f64,
    tau: f64,
    noise: &mut NoiseStream,
    snapshot_stride: usize,
) -> Result<TrajectoryRecord> {
    let model = KpoModel::new(rho0.space(), *params)?;
    let options = SmeOptions {
        snapshot_stride,
        ..SmeOptions::default()
    };
    simulate_trajectory_with(&model, rho0, t_end, tau, noise, options)
}

pub fn simulate_trajectory_with(
    model: &KpoModel,
    rho0: &DensityMatrix,
    t_end: f64,
    tau: f64,
    noise: &mut NoiseStream,
    options: SmeOptions,
) -> Result<TrajectoryRecord> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!(
            "t_end must be finite and non-negative, got {t_end}"
        )));
    }
    let space = rho0.space();
    let params = *model.params();
    let alpha = alpha_stationary(&params)?;
    let plus = coherent_ket(space, alpha)?;
    let mut stepper = SmeStepper::new(model.clone(), tau, options.scheme)?;

    let steps = step_count(t_end, tau);
    let mut record = TrajectoryRecord {
        params,
        tau,
        times: Vec::with_capacity(steps),
        f_plus: Vec::with_capacity(steps),
        f_minus: Vec::with_capacity(steps),
        dn: Vec::with_capacity(steps),
        dw: Vec::with_capacity(steps),
        seed: noise.seed(),
        stream_id: noise.stream_id(),
        rho_final: rho0.clone(),
        snapshots: Vec::new(),
        max_trace_drift: 0.0,
        min_eigenvalue: rho0.min_eigenvalue(),
    };
    let mut rho = rho0.matrix().clone();
    for i in 0..steps {
        let t = i as f64 * tau;
        if options.snapshot_stride > 0 && i % options.snapshot_stride == 0 {
            record
                .snapshots
                .push((t, DensityMatrix::from_matrix_unchecked(space, rho.clone())));
        }
        if options.positivity_stride > 0 && i > 0 && i % options.positivity_stride == 0 {
            let eig = DensityMatrix::from_matrix_unchecked(space, rho.clone()).min_eigenvalue();
            record.min_eigenvalue = record.min_eigenvalue.min(eig);
        }
        let dw = noise.wiener_increment(tau);
        record.times.push(t);
        let (f_plus, f_minus) = pair_fidelities(plus.amplitudes(), &rho);
        record.f_plus.push(f_plus.clamp(0.0, 1.0));
        record.f_minus.push(f_minus.clamp(0.0, 1.0));
        record.dn.push(stepper.measurement_increment(&rho, dw));
        record.dw.push(dw);
        let trace = stepper.step(&mut rho, dw)?;
        record.max_trace_drift = record.max_trace_drift.max((trace - 1.0).abs());
    }
    let final_state = DensityMatrix::from_matrix_unchecked(space, rho);
    record.min_eigenvalue = record.min_eigenvalue.min(final_state.min_eigenvalue());
    record.rho_final = final_state;
    Ok(record)
}

/// `(<v|rho|v>, <Pv|rho|Pv>)` where `P = (-1)^n` is photon-number parity,
/// so `P|alpha> = |-alpha>`. One pass: the two differ only in the sign of
/// the terms with `r + c` odd.
fn pair_fidelities(v: &DVector<C64>, rho: &DMatrix<C64>) -> (f64, f64) {
    let d = v.len();
    let (mut even, mut odd) = (0.0, 0.0);
    for c in 0..d {
        let col = &rho.as_slice()[c * d..(c + 1) * d];
        let (mut e, mut o) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (r, (x, vr)) in col.iter().zip(v.iter()).enumerate() {
            let term = vr.conj() * x;
            if (r + c) % 2 == 0 {
                e += term;
            } else {
                o += term;
            }
        }
        even += (e * v[c]).re;
        odd += (o * v[c]).re;
    }
    (even + odd, even - odd)
}

/// Runs `count` independent trajectories-worth of work, member `i` driven by
/// `NoiseStream::new(seed, i)`. Results come back in stream order regardless
/// of scheduling.
pub fn run_ensemble<T, F>(seed: u64, count: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(NoiseStream) -> Result<T> + Sync,
{
    (0..count as u64)
        .into_par_iter()
        .map(|id| work(NoiseStream::new(seed, id)))
        .collect()
}

/// Final state of one trajectory without keeping the record.
pub fn final_state(
    model: &KpoModel,
    rho0: &DensityMatrix,
    t_end: f64,
    tau: f64,
    noise: &mut NoiseStream,
    scheme: SmeScheme,
) -> Result<DensityMatrix> {
    let mut stepper = SmeStepper::new(model.clone(), tau, scheme)?;
    let mut rho = rho0.matrix().clone();
    for _ in 0..step_count(t_end, tau) {
        let dw = noise.wiener_increment(tau);
        stepper.step(&mut rho, dw)?;
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho0.space(), rho))
}

/// Sample mean of conditioned states with its sampling error.
#[derive(Debug, Clone)]
pub struct EnsembleAverage {
    pub mean: DensityMatrix,
    /// Frobenius-norm standard error of the mean, `sqrt(sum_ij var_ij / N)`.
    pub std_error: f64,
    pub count: usize,
}

/// Averages `count` trajectories at `t_end`.
pub fn ensemble_average(
    model: &KpoModel,
    rho0: &DensityMatrix,
    t_end: f64,
    tau: f64,
    seed: u64,
    count: usize,
    scheme: SmeScheme,
) -> Result<EnsembleAverage> {
    if count < 2 {
        return Err(Error::Domain(format!("need at least two trajectories, got {count}")));
    }
    let states = run_ensemble(seed, count, |mut noise| {
        final_state(model, rho0, t_end, tau, &mut noise, scheme).map(DensityMatrix::into_matrix)
    })?;
    let d = rho0.space().dim();
    let n = count as f64;
    let mut mean = DMatrix::<C64>::zeros(d, d);
    for s in &states {
        mean += s;
    }
    mean.unscale_mut(n);
    let mut sum_var = 0.0;
    for s in &states {
        sum_var += (s - &mean).norm_squared();
    }
    let variance = sum_var / (n - 1.0);
    Ok(EnsembleAverage {
        mean: DensityMatrix::from_matrix_unchecked(rho0.space(), mean),
        std_error: (variance / n).sqrt(),
        count,
    })
}

/// The symmetric mixture of the two stationary coherent states, the default
/// starting point of every trajectory.
pub fn default_initial_state(space: FockSpace, params: &KpoParams) -> Result<DensityMatrix> {
    DensityMatrix::coherent_mixture(space, alpha_stationary(params)?)
}
