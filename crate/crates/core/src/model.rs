//! The oscillator generator shared by the deterministic and stochastic integrators.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::hilbert::{annihilation_op, number_op, DensityMatrix, FockSpace, Operator, C64};
use crate::ladder::Banded;
use crate::params::KpoParams;

/// Precomputed pieces of the master-equation generator on a fixed truncation.
///
/// The generator splits into a part that is diagonal in the Fock basis,
/// `rho[m,n] -> (-i (h_m - h_n) - kappa (m+n)/2) rho[m,n]` with
/// `h_n = delta n - chi/2 n(n-1)`, and the remainder
/// `-i beta [a^2 + a^dagger^2, rho] + kappa a rho a^dagger`.
#[derive(Debug, Clone)]
pub struct KpoModel {
    space: FockSpace,
    params: KpoParams,
    diagonal: DMatrix<C64>,
    phase: DMatrix<C64>,
    two_photon: Banded,
    lowering: Banded,
}

impl KpoModel {
    pub fn new(space: FockSpace, params: KpoParams) -> Result<Self> {
        params.validate()?;
        let d = space.dim();
        let energy: Vec<f64> = (0..d)
            .map(|n| {
                let n = n as f64;
                params.delta * n - 0.5 * params.chi * n * (n - 1.0)
            })
            .collect();
        let diagonal = DMatrix::from_fn(d, d, |m, n| {
            C64::new(-0.5 * params.kappa * (m + n) as f64, -(energy[m] - energy[n]))
        });
        let phase = diagonal.map(|g| C64::new(0.0, g.im));
        Ok(Self {
            space,
            params,
            diagonal,
            phase,
            two_photon: Banded::two_photon(space),
            lowering: Banded::lowering(space),
        })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn params(&self) -> &KpoParams {
        &self.params
    }

    pub(crate) fn lowering(&self) -> &Banded {
        &self.lowering
    }

    /// Elementwise propagator `exp(t G)` of the diagonal part of the generator.
    pub(crate) fn diagonal_propagator(&self, t: f64) -> DMatrix<C64> {
        self.diagonal.map(|g| (g * t).exp())
    }

    /// Elementwise `exp(-i t (h_m - h_n))`: the unitary, trace-preserving share
    /// of [`Self::diagonal_propagator`].
    pub(crate) fn phase_propagator(&self, t: f64) -> DMatrix<C64> {
        self.phase.map(|g| (g * t).exp())
    }

    /// Everything except the Fock-diagonal phases:
    /// `-i beta [P, rho] + kappa (a rho a^dagger - {n, rho}/2)`. Traceless.
    pub(crate) fn dissipative_rhs(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = self.off_diagonal_rhs(rho);
        let half_kappa = 0.5 * self.params.kappa;
        let d = self.space.dim();
        for n in 0..d {
            for m in 0..d {
                out[(m, n)] -= rho[(m, n)] * (half_kappa * (m + n) as f64);
            }
        }
        out
    }

    /// Off-diagonal part of the generator: `-i beta [P, rho] + kappa a rho a^dagger`.
    pub(crate) fn off_diagonal_rhs(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = self.lowering.sandwich(rho);
        out.scale_mut(self.params.kappa);
        if self.params.beta != 0.0 {
            let mut comm = self.two_photon.mul_left(rho);
            // [P, rho] = P rho - rho P^dagger since P is Hermitian
            let right = self.two_photon.mul_right_adjoint(rho);
            comm -= right;
            out += comm * C64::new(0.0, -self.params.beta);
        }
        out
    }

    /// Full Lindblad right-hand side on a raw matrix.
    pub(crate) fn rhs(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = self.off_diagonal_rhs(rho);
        out += self.diagonal.component_mul(rho);
        out
    }

    /// `Tr[rho a]`.
    pub(crate) fn mean_lowering(&self, rho: &DMatrix<C64>) -> C64 {
        (1..self.space.dim()).map(|n| rho[(n, n - 1)] * (n as f64).sqrt()).sum()
    }

    /// `Tr[rho A]` for the homodyne observable, `2 sqrt(kappa) Im(e^{-i theta} <a>)`.
    pub(crate) fn homodyne_mean(&self, rho: &DMatrix<C64>) -> f64 {
        let w = C64::from_polar(1.0, -self.params.theta_lo) * self.mean_lowering(rho);
        2.0 * self.params.kappa.sqrt() * w.im
    }

    /// `<x> = Re Tr[rho a]`.
    pub(crate) fn mean_position(&self, rho: &DMatrix<C64>) -> f64 {
        self.mean_lowering(rho).re
    }

    /// Dense rotating-frame Hamiltonian
    /// `delta a^dagger a - chi/2 a^dagger^2 a^2 + beta (a^dagger^2 + a^2)`.
    pub fn hamiltonian(&self) -> Operator {
        let s = self.space;
        let p = &self.params;
        let a = annihilation_op(s).into_matrix();
        let ad = a.adjoint();
        let n = number_op(s).into_matrix();
        let kerr = &ad * &ad * &a * &a;
        let pump = &ad * &ad + &a * &a;
        let h = n * C64::new(p.delta, 0.0) - kerr * C64::new(0.5 * p.chi, 0.0) + pump * C64::new(p.beta, 0.0);
        Operator::new(s, h).expect("dimensions agree")
    }

    /// Dense evaluation of the master-equation generator, for cross-checks.
    pub fn rhs_dense(&self, rho: &DensityMatrix) -> DMatrix<C64> {
        let s = self.space;
        let h = self.hamiltonian().into_matrix();
        let a = annihilation_op(s).into_matrix();
        let ad = a.adjoint();
        let n = &ad * &a;
        let r = rho.matrix();
        let comm = &h * r - r * &h;
        let anti = &n * r + r * &n;
        comm * C64::new(0.0, -1.0) + (&a * r * &ad) * C64::new(self.params.kappa, 0.0)
            - anti * C64::new(0.5 * self.params.kappa, 0.0)
    }
}
