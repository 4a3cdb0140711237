//! Measurement-based state estimation for a Kerr parametric oscillator read
//! out by homodyne detection.
//!
//! Conditioned (stochastic) and unconditioned master equations are integrated
//! on a truncated Fock space. A boxcar filter turns the simulated detector
//! record into sign estimates, and `bounds` gives the analytic window of
//! useful averaging times along with the two-state jump model behind it.

// Guards are written `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod estimator;
pub mod hilbert;
pub mod ladder;
pub mod me_dynamics;
pub mod model;
pub mod noise;
pub mod normal;
pub mod params;
pub mod sme_dynamics;

pub use bounds::{
    alpha_stationary, error_rate_of_window, lower_bound_ta, noise_limited_success, simulate_telegraph, upper_bound_ta,
    BoundReport, TelegraphPath,
};
pub use error::{Error, Result};
pub use estimator::{
    estimate_state, moving_average, score_estimation, sweep_ta, EstimateSeries, EstimatorConfig, SweepRow,
    SweepSettings,
};
pub use hilbert::{coherent_ket, pure_fidelity, DensityMatrix, FockSpace, Ket, Operator, C64};
pub use me_dynamics::{evolve_me, fit_omega, lindblad_rhs, MeScheme, MeTrajectory, OmegaFit};
pub use model::KpoModel;
pub use noise::NoiseStream;
pub use params::KpoParams;
pub use sme_dynamics::{measurement_increment, simulate_trajectory, sme_step, SmeOptions, SmeScheme, TrajectoryRecord};
