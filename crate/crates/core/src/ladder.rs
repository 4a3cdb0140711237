//! Banded operators built from ladder operators.
//!
//! `a`, `a^2` and the pump term only touch a few diagonals, so products with
//! a dense density matrix cost O(bands * dim^2) instead of O(dim^3).

use nalgebra::DMatrix;

use crate::hilbert::{FockSpace, Operator, C64};

#[derive(Debug, Clone)]
struct Band {
    /// Entry `(r, r + offset)` holds `coef[r]`.
    offset: isize,
    coef: Vec<C64>,
}

/// Sparse operator made of a handful of diagonals.
#[derive(Debug, Clone)]
pub struct Banded {
    dim: usize,
    bands: Vec<Band>,
}

impl Banded {
    pub fn zero(space: FockSpace) -> Self {
        Self {
            dim: space.dim(),
            bands: Vec::new(),
        }
    }

    /// `a`.
    pub fn lowering(space: FockSpace) -> Self {
        Self::zero(space).with_band(1, |r| C64::new(((r + 1) as f64).sqrt(), 0.0))
    }

    /// `a^2`.
    pub fn lowering_squared(space: FockSpace) -> Self {
        Self::zero(space).with_band(2, |r| C64::new((((r + 1) * (r + 2)) as f64).sqrt(), 0.0))
    }

    /// `a^2 + a^dagger^2`.
    pub fn two_photon(space: FockSpace) -> Self {
        let coef = |k: usize| C64::new((((k + 1) * (k + 2)) as f64).sqrt(), 0.0);
        Self::zero(space).with_band(2, coef).with_band(-2, move |r| coef(r - 2))
    }

    /// Adds `f(r)` on the diagonal with the given offset (accumulating if present).
    pub fn with_band(mut self, offset: isize, f: impl Fn(usize) -> C64) -> Self {
        let d = self.dim;
        let coef: Vec<C64> = (0..d)
            .map(|r| {
                let c = r as isize + offset;
                if c >= 0 && (c as usize) < d {
                    f(r)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        match self.bands.iter_mut().find(|b| b.offset == offset) {
            Some(b) => b.coef.iter_mut().zip(coef).for_each(|(x, y)| *x += y),
            None => self.bands.push(Band { offset, coef }),
        }
        self
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(mut self, factor: C64) -> Self {
        for band in &mut self.bands {
            band.coef.iter_mut().for_each(|z| *z *= factor);
        }
        self
    }

    /// `self + other`.
    pub fn plus(mut self, other: &Banded) -> Self {
        for band in &other.bands {
            let coef = band.coef.clone();
            self = self.with_band(band.offset, |r| coef[r]);
        }
        self
    }

    /// `self` as an identity-plus-bands operator: adds `value` on the main diagonal.
    pub fn plus_identity(self, value: C64) -> Self {
        self.with_band(0, |_| value)
    }

    /// `out += self * x`.
    pub fn mul_left_acc(&self, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let d = self.dim;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for band in &self.bands {
            let k = band.offset;
            let (r_lo, r_hi) = row_range(d, k);
            if r_lo >= r_hi {
                continue;
            }
            let coef = &band.coef[r_lo..r_hi];
            let src_lo = (r_lo as isize + k) as usize;
            for c in 0..d {
                let base = c * d;
                let dst = &mut os[base + r_lo..base + r_hi];
                let src = &xs[base + src_lo..base + src_lo + (r_hi - r_lo)];
                for ((o, w), v) in dst.iter_mut().zip(coef).zip(src) {
                    *o += w * v;
                }
            }
        }
    }

    /// `out += x * self^dagger`.
    pub fn mul_right_adjoint_acc(&self, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let d = self.dim;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for band in &self.bands {
            let k = band.offset;
            let (c_lo, c_hi) = row_range(d, k);
            for c in c_lo..c_hi {
                let w = band.coef[c].conj();
                let src_col = (c as isize + k) as usize;
                let dst = &mut os[c * d..(c + 1) * d];
                let src = &xs[src_col * d..(src_col + 1) * d];
                for (o, v) in dst.iter_mut().zip(src) {
                    *o += v * w;
                }
            }
        }
    }

    pub fn mul_left(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        self.mul_left_acc(x, &mut out);
        out
    }

    pub fn mul_right_adjoint(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        self.mul_right_adjoint_acc(x, &mut out);
        out
    }

    /// `self * x * self^dagger`.
    pub fn sandwich(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        self.mul_right_adjoint(&self.mul_left(x))
    }

    pub fn to_operator(&self, space: FockSpace) -> Operator {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for band in &self.bands {
            let (lo, hi) = row_range(d, band.offset);
            for r in lo..hi {
                m[(r, (r as isize + band.offset) as usize)] += band.coef[r];
            }
        }
        Operator::new(space, m).expect("band dimension matches its space")
    }
}

/// Rows `r` for which `r + k` is a valid column.
fn row_range(d: usize, k: isize) -> (usize, usize) {
    let lo = if k < 0 { (-k) as usize } else { 0 };
    let hi = if k > 0 { d.saturating_sub(k as usize) } else { d };
    (lo.min(d), hi)
}
