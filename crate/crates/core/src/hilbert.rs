//! Truncated Fock-space linear algebra.
//!
//! Everything here is dense: the spaces used by the oscillator model have at
//! most a few dozen levels, so `nalgebra` dense matrices are both the simplest
//! and the fastest representation. Structured (banded) products used inside
//! the integrators live in [`crate::ladder`].

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

pub use nalgebra::Complex;

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;

/// Tolerance on `max |rho - rho^dagger|` for a valid density matrix.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Tolerance on `|Tr rho - 1|` for a valid density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted as numerically positive.
pub const POSITIVITY_TOL: f64 = -1e-8;
/// Largest tolerated norm deficit of a truncated coherent state.
pub const TRUNCATION_TOL: f64 = 1e-6;

/// Bosonic Hilbert space truncated to the Fock levels `0..dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("Fock dimension must be >= 2, got {dim}")));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, other: FockSpace) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// A linear operator on a [`FockSpace`], stored as a dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: FockSpace,
    entries: DMatrix<C64>,
}

impl Operator {
    pub fn new(space: FockSpace, entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != space.dim() || entries.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(Self { space, entries })
    }

    pub fn identity(space: FockSpace) -> Self {
        Self {
            space,
            entries: DMatrix::identity(space.dim(), space.dim()),
        }
    }

    pub fn zeros(space: FockSpace) -> Self {
        Self {
            space,
            entries: DMatrix::zeros(space.dim(), space.dim()),
        }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            entries: self.entries.adjoint(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            space: self.space,
            entries: self.entries.map(|z| z * factor),
        }
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        max_antihermitian_entry(&self.entries)
    }

    pub fn try_mul(&self, rhs: &Operator) -> Result<Operator> {
        self.space.check(rhs.space)?;
        Ok(Self {
            space: self.space,
            entries: &self.entries * &rhs.entries,
        })
    }

    pub fn try_add(&self, rhs: &Operator) -> Result<Operator> {
        self.space.check(rhs.space)?;
        Ok(Self {
            space: self.space,
            entries: &self.entries + &rhs.entries,
        })
    }

    pub fn try_sub(&self, rhs: &Operator) -> Result<Operator> {
        self.space.check(rhs.space)?;
        Ok(Self {
            space: self.space,
            entries: &self.entries - &rhs.entries,
        })
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    space: FockSpace,
    amplitudes: DVector<C64>,
}

impl Ket {
    /// Builds a ket from raw amplitudes, normalizing them.
    pub fn new(space: FockSpace, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState(format!("ket norm is {norm}")));
        }
        Ok(Self {
            space,
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Fock basis state `|n>`.
    pub fn fock(space: FockSpace, n: usize) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::Domain(format!(
                "Fock level {n} outside truncation dim {}",
                space.dim()
            )));
        }
        let mut amplitudes = DVector::zeros(space.dim());
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        self.space.check(other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            space: self.space,
            entries: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// A quantum state on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Rejects matrices that are not Hermitian positive with unit trace.
    pub fn new(space: FockSpace, entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != space.dim() || entries.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: entries.nrows().max(entries.ncols()),
            });
        }
        let rho = Self { space, entries };
        let herm = rho.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let trace = rho.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}")));
        }
        let min_eig = rho.min_eigenvalue();
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(space: FockSpace, entries: DMatrix<C64>) -> Self {
        debug_assert_eq!(entries.nrows(), space.dim());
        Self { space, entries }
    }

    pub fn from_ket(ket: &Ket) -> Self {
        ket.projector()
    }

    /// Convex combination `sum_i w_i rho_i`; weights must be non-negative and sum to one.
    pub fn mixture(components: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Domain("empty mixture".into()))?;
        let space = first.1.space;
        let mut total = 0.0;
        let mut entries = DMatrix::zeros(space.dim(), space.dim());
        for (w, rho) in components {
            space.check(rho.space)?;
            if *w < 0.0 {
                return Err(Error::Domain(format!("negative mixture weight {w}")));
            }
            total += w;
            entries += rho.entries.map(|z| z * *w);
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("mixture weights sum to {total}")));
        }
        Ok(Self { space, entries })
    }

    /// The symmetric cat mixture `(|alpha><alpha| + |-alpha><-alpha|)/2`.
    pub fn coherent_mixture(space: FockSpace, alpha: C64) -> Result<Self> {
        let plus = coherent_ket(space, alpha)?.projector();
        let minus = coherent_ket(space, -alpha)?.projector();
        Self::mixture(&[(0.5, &plus), (0.5, &minus)])
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_antihermitian_entry(&self.entries)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()).unscale(2.0);
        herm.symmetric_eigenvalues().min()
    }

    /// Population of Fock level `n`.
    pub fn population(&self, n: usize) -> f64 {
        self.entries[(n, n)].re
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.space.check(other.space)?;
        Ok((&self.entries - &other.entries).norm())
    }
}

fn max_antihermitian_entry(m: &DMatrix<C64>) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0_f64;
    for c in 0..d {
        for r in 0..=c {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Lowering operator `a`, with `a[n-1, n] = sqrt(n)`.
pub fn annihilation_op(space: FockSpace) -> Operator {
    let d = space.dim();
    let mut entries = DMatrix::zeros(d, d);
    for n in 1..d {
        entries[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator { space, entries }
}

pub fn creation_op(space: FockSpace) -> Operator {
    annihilation_op(space).adjoint()
}

/// Number operator `a^dagger a`, exact on every retained level.
pub fn number_op(space: FockSpace) -> Operator {
    let d = space.dim();
    let mut entries = DMatrix::zeros(d, d);
    for n in 0..d {
        entries[(n, n)] = C64::new(n as f64, 0.0);
    }
    Operator { space, entries }
}

/// Quadrature `x = (a + a^dagger)/2`.
pub fn position_op(space: FockSpace) -> Operator {
    let a = annihilation_op(space);
    let entries = (a.matrix() + a.matrix().adjoint()).unscale(2.0);
    Operator { space, entries }
}

/// Homodyne observable `A = i sqrt(kappa) (e^{i theta} a^dagger - e^{-i theta} a)`.
pub fn homodyne_op(space: FockSpace, kappa: f64, theta_lo: f64) -> Operator {
    let a = annihilation_op(space);
    let phase = C64::from_polar(1.0, theta_lo);
    let entries = (a.matrix().adjoint() * phase - a.matrix() * phase.conj()) * (C64::i() * kappa.sqrt());
    Operator { space, entries }
}

/// Coherent state `|alpha>` built from its Fock expansion and renormalized.
///
/// Fails with [`Error::Truncation`] when more than [`TRUNCATION_TOL`] of the
/// norm falls outside the retained levels.
pub fn coherent_ket(space: FockSpace, alpha: C64) -> Result<Ket> {
    let d = space.dim();
    let mut amplitudes = DVector::zeros(d);
    let mut term = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amplitudes[0] = term;
    for n in 1..d {
        term = term * alpha / (n as f64).sqrt();
        amplitudes[n] = term;
    }
    let norm = amplitudes.norm();
    let deficit = (1.0 - norm).abs();
    if deficit > TRUNCATION_TOL {
        return Err(Error::Truncation { deficit });
    }
    Ok(Ket {
        space,
        amplitudes: amplitudes.unscale(norm),
    })
}

/// `Tr[rho op]`.
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<C64> {
    op.space.check(rho.space)?;
    Ok(trace_of_product(&rho.entries, &op.entries))
}

pub(crate) fn trace_of_product(x: &DMatrix<C64>, y: &DMatrix<C64>) -> C64 {
    let d = x.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// Fidelity `<psi|rho|psi>` of a state against a pure reference.
pub fn pure_fidelity(psi: &Ket, rho: &DensityMatrix) -> Result<f64> {
    psi.space.check(rho.space)?;
    Ok(sandwich(&psi.amplitudes, &rho.entries).clamp(0.0, 1.0))
}

/// Real part of `v^dagger m v`.
pub(crate) fn sandwich(v: &DVector<C64>, m: &DMatrix<C64>) -> f64 {
    let d = v.len();
    let mut acc = 0.0;
    for c in 0..d {
        let col = m.column(c);
        let mut inner = C64::new(0.0, 0.0);
        for r in 0..d {
            inner += v[r].conj() * col[r];
        }
        acc += (inner * v[c]).re;
    }
    acc
}

/// Returns `(rho + rho^dagger)/2` scaled to unit trace.
pub fn hermitize_and_renormalize(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut entries = rho.entries.clone();
    hermitize_in_place(&mut entries)?;
    Ok(DensityMatrix {
        space: rho.space,
        entries,
    })
}

pub(crate) fn hermitize_in_place(m: &mut DMatrix<C64>) -> Result<()> {
    hermitize_with_drift(m, 0.5)
}

/// Hermitizes and renormalizes, rejecting traces that are not finite and
/// positive or that moved further than `max_drift` from one.
pub(crate) fn hermitize_with_drift(m: &mut DMatrix<C64>, max_drift: f64) -> Result<()> {
    let d = m.nrows();
    for c in 0..d {
        for r in 0..c {
            let avg = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
            m[(r, c)] = avg;
            m[(c, r)] = avg.conj();
        }
        m[(c, c)].im = 0.0;
    }
    let trace = m.trace().re;
    if !trace.is_finite() || trace <= 0.0 || (trace - 1.0).abs() > max_drift {
        return Err(Error::Divergence { trace });
    }
    m.unscale_mut(trace);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(d: usize) -> FockSpace {
        FockSpace::new(d).unwrap()
    }

    #[test]
    fn dimension_below_two_is_rejected() {
        assert!(FockSpace::new(1).is_err());
        assert!(FockSpace::new(2).is_ok());
    }

    #[test]
    fn annihilation_small_dims() {
        let a = annihilation_op(space(2));
        let expected = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert_eq!(a.matrix(), &expected);
        let a3 = annihilation_op(space(3));
        assert_eq!(a3.matrix()[(1, 2)], C64::new(2f64.sqrt(), 0.0));
    }

    #[test]
    fn number_operator_counts_quanta() {
        let s = space(8);
        let a = annihilation_op(s);
        let n = a.adjoint().try_mul(&a).unwrap();
        for k in 0..8 {
            let e = Ket::fock(s, k).unwrap();
            let out = n.matrix() * e.amplitudes();
            for j in 0..8 {
                let want = if j == k { k as f64 } else { 0.0 };
                assert!((out[j] - C64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn canonical_commutator_away_from_cutoff() {
        let s = space(12);
        let a = annihilation_op(s);
        let ad = a.adjoint();
        let comm = a.try_mul(&ad).unwrap().try_sub(&ad.try_mul(&a).unwrap()).unwrap();
        for r in 0..11 {
            for c in 0..11 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((comm.matrix()[(r, c)] - C64::new(want, 0.0)).norm() < 1e-13);
            }
        }
        assert!((comm.matrix()[(11, 11)].re - (1.0 - 12.0)).abs() < 1e-12);
    }

    #[test]
    fn vacuum_from_zero_displacement() {
        let k = coherent_ket(space(10), C64::new(0.0, 0.0)).unwrap();
        assert_eq!(k.amplitudes()[0], C64::new(1.0, 0.0));
        assert!(k.amplitudes().iter().skip(1).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn coherent_state_is_eigenvector_of_a() {
        let s = space(30);
        let alpha = C64::new(1.38, -0.18);
        let k = coherent_ket(s, alpha).unwrap();
        let a = annihilation_op(s);
        let mean = k.amplitudes().dotc(&(a.matrix() * k.amplitudes()));
        assert!((mean - alpha).norm() < 1e-6);
        assert!((k.amplitudes().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn opposite_coherent_overlap() {
        let s = space(30);
        for &alpha in &[
            C64::new(0.3, 0.1),
            C64::new(1.38, -0.18),
            C64::new(0.0, 2.0),
            C64::new(-1.2, 1.1),
        ] {
            let p = coherent_ket(s, alpha).unwrap();
            let m = coherent_ket(s, -alpha).unwrap();
            let overlap = p.inner(&m).unwrap().norm_sqr();
            let expected = (-4.0 * alpha.norm_sqr()).exp();
            assert!((overlap - expected).abs() < 1e-8, "{alpha}: {overlap} vs {expected}");
        }
    }

    #[test]
    fn truncation_leak_is_reported() {
        let err = coherent_ket(space(6), C64::new(2.5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn expectation_values() {
        let s = space(30);
        let alpha = C64::new(1.38, -0.18);
        let rho = coherent_ket(s, alpha).unwrap().projector();
        let one = expectation(&Operator::identity(s), &rho).unwrap();
        assert!((one - C64::new(1.0, 0.0)).norm() < 1e-12);

        let x = expectation(&position_op(s), &rho).unwrap();
        assert!((x.re - 1.38).abs() < 1e-6);
        assert!(x.im.abs() < 1e-10);

        let kappa = 2.0 * std::f64::consts::PI * 3.0;
        for &theta in &[0.0, 0.4, -1.1, alpha.arg() - std::f64::consts::FRAC_PI_2] {
            let a = expectation(&homodyne_op(s, kappa, theta), &rho).unwrap();
            let want = 2.0 * alpha.norm() * kappa.sqrt() * (alpha.arg() - theta).sin();
            assert!((a.re - want).abs() < 1e-5, "theta {theta}: {} vs {want}", a.re);
            assert!(a.im.abs() < 1e-10);
        }
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let rho = Ket::fock(space(4), 0).unwrap().projector();
        let err = expectation(&Operator::identity(space(5)), &rho).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 5, found: 4 });
    }

    #[test]
    fn fidelity_examples() {
        let s = space(30);
        let alpha = C64::new(1.1, 0.4);
        let p = coherent_ket(s, alpha).unwrap();
        let m = coherent_ket(s, -alpha).unwrap();
        let overlap = (-4.0 * alpha.norm_sqr()).exp();
        assert!((pure_fidelity(&p, &p.projector()).unwrap() - 1.0).abs() < 1e-12);
        assert!((pure_fidelity(&p, &m.projector()).unwrap() - overlap).abs() < 1e-10);
        let mix = DensityMatrix::coherent_mixture(s, alpha).unwrap();
        assert!((pure_fidelity(&p, &mix).unwrap() - (1.0 + overlap) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn hermitize_examples() {
        let s = space(6);
        let rho = coherent_ket(s, C64::new(0.5, 0.2)).unwrap().projector();
        let same = hermitize_and_renormalize(&rho).unwrap();
        assert!((same.matrix() - rho.matrix()).norm() < 1e-14);

        let scaled = DensityMatrix::from_matrix_unchecked(s, rho.matrix() * C64::new(1.001, 0.0));
        let fixed = hermitize_and_renormalize(&scaled).unwrap();
        assert!((fixed.trace() - 1.0).abs() < 1e-15);

        // rho + i eps K with K Hermitian is anti-Hermitian in the perturbation.
        let k = position_op(s).into_matrix();
        let bent = rho.matrix() + k * C64::new(0.0, 1e-3);
        let out = hermitize_and_renormalize(&DensityMatrix::from_matrix_unchecked(s, bent)).unwrap();
        assert!(out.hermiticity_error() < 1e-16);
        assert!((out.matrix() - rho.matrix()).norm() < 1e-12);

        let broken = DensityMatrix::from_matrix_unchecked(s, rho.matrix() * C64::new(1.7, 0.0));
        assert!(matches!(
            hermitize_and_renormalize(&broken),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let s = space(3);
        let mut m = DMatrix::<C64>::zeros(3, 3);
        m[(0, 0)] = C64::new(1.0, 0.0);
        assert!(DensityMatrix::new(s, m.clone()).is_ok());
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(s, m.clone()).is_err());
        let mut neg = DMatrix::<C64>::zeros(3, 3);
        neg[(0, 0)] = C64::new(1.2, 0.0);
        neg[(1, 1)] = C64::new(-0.2, 0.0);
        assert!(DensityMatrix::new(s, neg).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_pure(s: FockSpace, re: &[f64], im: &[f64]) -> DensityMatrix {
            let v = DVector::from_iterator(s.dim(), re.iter().zip(im).map(|(a, b)| C64::new(*a, *b)));
            Ket::new(s, v).unwrap().projector()
        }

        proptest! {
            #[test]
            fn fidelity_is_linear_in_rho(
                re1 in proptest::collection::vec(-1.0f64..1.0, 6),
                im1 in proptest::collection::vec(-1.0f64..1.0, 6),
                re2 in proptest::collection::vec(-1.0f64..1.0, 6),
                im2 in proptest::collection::vec(-1.0f64..1.0, 6),
                ar in -1.0f64..1.0, ai in -1.0f64..1.0,
                p in 0.0f64..1.0,
            ) {
                let s = FockSpace::new(6).unwrap();
                prop_assume!(re1.iter().chain(&im1).any(|x| x.abs() > 1e-3));
                prop_assume!(re2.iter().chain(&im2).any(|x| x.abs() > 1e-3));
                let r1 = random_pure(s, &re1, &im1);
                let r2 = random_pure(s, &re2, &im2);
                let psi = Ket::new(s, DVector::from_fn(6, |n, _| C64::new(ar, ai).powu(n as u32) + 0.1)).unwrap();
                let mix = DensityMatrix::mixture(&[(p, &r1), (1.0 - p, &r2)]).unwrap();
                let lhs = pure_fidelity(&psi, &mix).unwrap();
                let rhs = p * pure_fidelity(&psi, &r1).unwrap() + (1.0 - p) * pure_fidelity(&psi, &r2).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-12);
            }

            #[test]
            fn hermitian_expectations_are_real(
                re in proptest::collection::vec(-1.0f64..1.0, 8),
                im in proptest::collection::vec(-1.0f64..1.0, 8),
                kappa in 0.0f64..40.0, theta in -3.2f64..3.2,
            ) {
                let s = FockSpace::new(8).unwrap();
                prop_assume!(re.iter().chain(&im).any(|x| x.abs() > 1e-3));
                let rho = random_pure(s, &re, &im);
                for op in [position_op(s), number_op(s), homodyne_op(s, kappa, theta)] {
                    prop_assert!(expectation(&op, &rho).unwrap().im.abs() < 1e-10);
                }
            }

            #[test]
            fn coherent_norm_is_one(ar in -2.0f64..2.0, ai in -2.0f64..2.0) {
                let k = coherent_ket(FockSpace::new(40).unwrap(), C64::new(ar, ai)).unwrap();
                prop_assert!((k.amplitudes().norm() - 1.0).abs() < 1e-14);
            }
        }
    }
}
