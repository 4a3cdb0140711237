//! Sign estimation from a boxcar-averaged detector record.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::FockSpace;
use crate::model::KpoModel;
use crate::params::KpoParams;
use crate::sme_dynamics::{
    default_initial_state, run_ensemble, simulate_trajectory_with, SmeOptions, TrajectoryRecord,
};

/// Averaging time expressed as a whole number of record steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorConfig {
    t_a: f64,
    tau: f64,
    window: usize,
}

impl EstimatorConfig {
    /// `t_a / tau` must be a positive integer up to a relative rounding of 1e-9.
    pub fn new(t_a: f64, tau: f64) -> Result<Self> {
        if !(t_a > 0.0 && tau > 0.0 && t_a.is_finite() && tau.is_finite()) {
            return Err(Error::Domain(format!("need positive T_a and tau, got {t_a} and {tau}")));
        }
        let ratio = t_a / tau;
        let window = ratio.round();
        if window < 1.0 || ((ratio - window) / ratio).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "averaging time {t_a} is not a positive multiple of the step {tau}"
            )));
        }
        Ok(Self {
            t_a,
            tau,
            window: window as usize,
        })
    }

    pub fn t_a(&self) -> f64 {
        self.t_a
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `W = T_a / tau`; each average spans `W + 1` samples.
    pub fn window(&self) -> usize {
        self.window
    }
}

/// Sign estimate of the state from the averaged record: `+1` for `|alpha>`,
/// `-1` for `|-alpha>`. An exact zero counts as `+1`.
pub fn estimate_state(n_bar: f64) -> i8 {
    if n_bar < 0.0 {
        -1
    } else {
        1
    }
}

/// Prefix sums carried in double-double precision, so window sums do not
/// inherit the rounding of a long running total.
struct PrefixSums {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl PrefixSums {
    fn new(xs: &[f64]) -> Self {
        let mut hi = Vec::with_capacity(xs.len() + 1);
        let mut lo = Vec::with_capacity(xs.len() + 1);
        let (mut h, mut l) = (0.0_f64, 0.0_f64);
        hi.push(h);
        lo.push(l);
        for &x in xs {
            let (s, e) = two_sum(h, x);
            let (s2, e2) = quick_two_sum(s, e + l);
            h = s2;
            l = e2;
            hi.push(h);
            lo.push(l);
        }
        Self { hi, lo }
    }

    /// `sum xs[from..to]`.
    fn range(&self, from: usize, to: usize) -> f64 {
        let (s, e) = two_sum(self.hi[to], -self.hi[from]);
        s + (e + (self.lo[to] - self.lo[from]))
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Trailing averages `(tau / T_a) sum_{k=0}^{W} dn[i - k]` for every `i >= W`.
/// Entry `j` of the result belongs to sample `W + j`.
pub fn moving_average_of(dn: &[f64], config: &EstimatorConfig) -> Result<Vec<f64>> {
    let w = config.window;
    if dn.len() < w + 1 {
        return Err(Error::Window {
            needed: w + 1,
            available: dn.len(),
        });
    }
    let prefix = PrefixSums::new(dn);
    let gain = config.tau / config.t_a;
    Ok((w..dn.len()).map(|i| gain * prefix.range(i - w, i + 1)).collect())
}

/// [`moving_average_of`] applied to a trajectory's detector record.
pub fn moving_average(record: &TrajectoryRecord, config: &EstimatorConfig) -> Result<Vec<f64>> {
    check_step(record, config)?;
    moving_average_of(&record.dn, config)
}

/// Estimates scored over the part of a record where they are defined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateSeries {
    pub t_a: f64,
    pub times: Vec<f64>,
    pub n_bar: Vec<f64>,
    pub est_sign: Vec<i8>,
    /// Fidelity of the estimated coherent state with the conditioned state.
    pub est_fidelity: Vec<f64>,
    /// Mean of `est_fidelity`.
    pub success_probability: f64,
}

/// First sample scored: the window must be full and the first `3 / kappa`
/// of transients are skipped.
pub fn scoring_start(record: &TrajectoryRecord, config: &EstimatorConfig) -> usize {
    let kappa = record.params.kappa;
    let settle = if kappa > 0.0 { 3.0 / kappa } else { 0.0 };
    let skip = settle.max(config.t_a);
    let first = ((skip / record.tau) - 1e-9).ceil().max(0.0) as usize;
    first.max(config.window)
}

fn check_step(record: &TrajectoryRecord, config: &EstimatorConfig) -> Result<()> {
    if ((record.tau - config.tau) / config.tau).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "estimator step {} does not match the record step {}",
            config.tau, record.tau
        )));
    }
    Ok(())
}

/// Runs the estimator over a record and scores it against the conditioned fidelities.
pub fn score_estimation(record: &TrajectoryRecord, config: &EstimatorConfig) -> Result<EstimateSeries> {
    let n_bar_all = moving_average(record, config)?;
    let start = scoring_start(record, config);
    if start >= record.len() {
        return Err(Error::Window {
            needed: start + 1,
            available: record.len(),
        });
    }
    let w = config.window;
    let n_bar = n_bar_all[start - w..].to_vec();
    let est_sign: Vec<i8> = n_bar.iter().map(|&x| estimate_state(x)).collect();
    let est_fidelity: Vec<f64> = est_sign
        .iter()
        .zip(start..)
        .map(|(&s, i)| if s > 0 { record.f_plus[i] } else { record.f_minus[i] })
        .collect();
    let success_probability = est_fidelity.iter().sum::<f64>() / est_fidelity.len() as f64;
    Ok(EstimateSeries {
        t_a: config.t_a,
        times: record.times[start..].to_vec(),
        n_bar,
        est_sign,
        est_fidelity,
        success_probability,
    })
}

/// Just the success probability, without materializing the series.
pub fn success_probability(record: &TrajectoryRecord, config: &EstimatorConfig) -> Result<f64> {
    Ok(score_estimation(record, config)?.success_probability)
}

/// Success statistics at one averaging time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub t_a: f64,
    pub success_mean: f64,
    /// Standard error across trajectories (0 for a single trajectory).
    pub success_stderr: f64,
    pub trajectories: usize,
}

/// Shared settings of an averaging-time sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepSettings {
    pub dim: usize,
    pub tau: f64,
    pub t_end: f64,
    pub ensemble: usize,
    pub seed: u64,
    pub options: SmeOptions,
}

/// Mean and standard error of per-trajectory success probabilities.
pub fn summarize(t_a: f64, values: &[f64]) -> SweepRow {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    SweepRow {
        t_a,
        success_mean: mean,
        success_stderr: stderr,
        trajectories: n,
    }
}

/// Simulates one ensemble and scores every trajectory at each averaging time.
/// Member `i` uses `NoiseStream::new(seed, i)`; each record is dropped once scored.
pub fn sweep_ta(params: &KpoParams, ta_list: &[f64], settings: &SweepSettings) -> Result<Vec<SweepRow>> {
    if settings.ensemble == 0 || ta_list.is_empty() {
        return Err(Error::Domain(
            "sweep needs at least one trajectory and one averaging time".into(),
        ));
    }
    let configs = ta_list
        .iter()
        .map(|&t| EstimatorConfig::new(t, settings.tau))
        .collect::<Result<Vec<_>>>()?;
    let space = FockSpace::new(settings.dim)?;
    let model = KpoModel::new(space, *params)?;
    let rho0 = default_initial_state(space, params)?;
    let per_trajectory = run_ensemble(settings.seed, settings.ensemble, |mut noise| {
        let record = simulate_trajectory_with(
            &model,
            &rho0,
            settings.t_end,
            settings.tau,
            &mut noise,
            settings.options,
        )?;
        configs
            .iter()
            .map(|c| success_probability(&record, c))
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(configs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let column: Vec<f64> = per_trajectory.iter().map(|row| row[k]).collect();
            summarize(c.t_a, &column)
        })
        .collect())
}
