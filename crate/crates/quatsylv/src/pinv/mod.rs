//! Moore–Penrose inverses of quaternion matrices and tensors, and the
//! projectors `L_A = I − A†A`, `R_A = I − AA†`.
//!
//! Route: flatten, take the complex adjoint `χ`, pseudo-invert by complex SVD
//! with a relative rank cutoff, check that the result is again a χ-image and
//! map it back.

pub mod adjoint;
pub mod svd;

use num_complex::Complex;

pub use adjoint::{complex_adjoint, from_complex_adjoint, ComplexMatrix};
pub use svd::{svd, Svd};

use crate::error::{Error, Result};
use crate::qtensor::{QMatrix, QTensor, Shape};
use crate::Real;

/// Allowed block-structure deviation of `pinv(χ(M))`, relative to its norm:
/// `1e-11` in double precision, `1000·ε` for coarser scalars.
fn adjoint_structure_rtol<T: Real>() -> T {
    T::lit(1e-11).max(T::epsilon() * T::lit(1e3))
}

/// Relative numerical-rank cutoff: singular values below
/// `rtol·σ_max·max(rows, cols)` of the complex adjoint are treated as zero
/// (`σ_max` raised to a reference magnitude where one is given).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankTolerance {
    pub rtol: f64,
}

impl Default for RankTolerance {
    fn default() -> Self {
        RankTolerance { rtol: 1e-12 }
    }
}

impl RankTolerance {
    pub fn new(rtol: f64) -> Result<Self> {
        if !(rtol > 0.0 && rtol < 1.0) {
            return Err(Error::parse("rank tolerance", format!("rtol must lie in (0, 1), got {rtol}")));
        }
        Ok(RankTolerance { rtol })
    }
}

/// SVD of `χ(M)` with its numerical rank.
struct Truncated<T> {
    d: Svd<T>,
    rank: usize,
    rows: usize,
    cols: usize,
}

fn truncate<T: Real>(m: &QMatrix<T>, tol: RankTolerance, reference: T) -> Truncated<T> {
    let chi = complex_adjoint(m);
    let d = svd(&chi);
    let (rows, cols) = (chi.rows(), chi.cols());
    let top = d.s.first().copied().unwrap_or(T::zero()).max(reference);
    let cutoff = top * T::lit(tol.rtol) * T::lit(rows.max(cols) as f64);

    // singular values of a χ-image come in equal pairs; keep or drop each pair as a unit
    let mut rank = 0;
    while rank + 1 < d.s.len() {
        let mean = (d.s[rank] + d.s[rank + 1]) * T::lit(0.5);
        if mean > cutoff && mean > T::zero() {
            rank += 2;
        } else {
            break;
        }
    }
    Truncated { d, rank, rows, cols }
}

impl<T: Real> Truncated<T> {
    fn pinv(&self) -> Result<QMatrix<T>> {
        let Truncated { d, rank, rows, cols } = self;
        let mut x = ComplexMatrix::zeros(*cols, *rows);
        for k in 0..*rank {
            let inv = Complex::new(d.s[k].recip(), T::zero());
            for i in 0..*cols {
                let vik = d.v.get(i, k) * inv;
                for j in 0..*rows {
                    x.set(i, j, x.get(i, j) + vik * d.u.get(j, k).conj());
                }
            }
        }
        from_complex_adjoint(&x, adjoint_structure_rtol())
    }

    /// `I − B_r B_rᴴ` for the leading `rank` columns of `basis`; exactly zero
    /// at full rank, so that projectors of surjective maps carry no rounding.
    fn complement(&self, basis: &ComplexMatrix<T>) -> Result<QMatrix<T>> {
        let n = basis.rows();
        if self.rank >= n {
            return Ok(QMatrix::zeros(n / 2, n / 2));
        }
        let mut x = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            x.set(i, i, Complex::new(T::one(), T::zero()));
        }
        for k in 0..self.rank {
            for i in 0..n {
                let bik = basis.get(i, k);
                for j in 0..n {
                    x.set(i, j, x.get(i, j) - bik * basis.get(j, k).conj());
                }
            }
        }
        from_complex_adjoint(&x, adjoint_structure_rtol())
    }
}

/// Moore–Penrose inverse of a quaternion matrix.
pub fn pinv_matrix<T: Real>(m: &QMatrix<T>, tol: RankTolerance) -> Result<QMatrix<T>> {
    truncate(m, tol, T::zero()).pinv()
}

/// Moore–Penrose inverse of a tensor; shape `col_dims × row_dims`.
pub fn pinv_tensor<T: Real>(a: &QTensor<T>, tol: RankTolerance) -> Result<QTensor<T>> {
    let p = pinv_matrix(&a.flatten(), tol)?;
    QTensor::unflatten(&p, a.shape().transposed())
}

/// `L_A = I − A†*A`, square over `a`'s column modes.
pub fn left_projector<T: Real>(a: &QTensor<T>, tol: RankTolerance) -> Result<QTensor<T>> {
    Ok(Projectors::new(a, tol)?.left)
}

/// `R_A = I − A*A†`, square over `a`'s row modes.
pub fn right_projector<T: Real>(a: &QTensor<T>, tol: RankTolerance) -> Result<QTensor<T>> {
    Ok(Projectors::new(a, tol)?.right)
}

/// `A†`, `L_A` and `R_A` from a single decomposition. The projectors are
/// formed from the retained singular vectors rather than as `I − A†A`, so a
/// map of full column (row) rank has `L_A` (`R_A`) exactly zero.
#[derive(Clone, Debug)]
pub struct Projectors<T> {
    pub pinv: QTensor<T>,
    pub left: QTensor<T>,
    pub right: QTensor<T>,
    /// Numerical rank of the flattening.
    pub rank: usize,
}

impl<T: Real> Projectors<T> {
    pub fn new(a: &QTensor<T>, tol: RankTolerance) -> Result<Self> {
        Self::with_reference(a, tol, T::zero())
    }

    /// As [`Projectors::new`], with the rank cutoff taken relative to
    /// `max(σ_max, reference)`. A tensor computed from factors of magnitude
    /// `reference` carries rounding of order `ε·reference`; passing it keeps
    /// a tensor that is zero up to rounding from being inverted.
    pub fn with_reference(a: &QTensor<T>, tol: RankTolerance, reference: T) -> Result<Self> {
        let t = truncate(&a.flatten(), tol, reference);
        let pinv = QTensor::unflatten(&t.pinv()?, a.shape().transposed())?;
        let left = QTensor::unflatten(&t.complement(&t.d.v)?, Shape::square(a.col_dims())?)?;
        let right = QTensor::unflatten(&t.complement(&t.d.u)?, Shape::square(a.row_dims())?)?;
        Ok(Projectors { pinv, left, right, rank: t.rank / 2 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;

    type Q = Quaternion<f64>;

    #[test]
    fn identity_and_zero() {
        let id = QMatrix::<f64>::identity(3);
        assert!(pinv_matrix(&id, RankTolerance::default()).unwrap().sub(&id).unwrap().fro_norm() < 1e-14);
        let z = QMatrix::<f64>::zeros(2, 3);
        let p = pinv_matrix(&z, RankTolerance::default()).unwrap();
        assert_eq!((p.rows(), p.cols()), (3, 2));
        assert_eq!(p.fro_norm(), 0.0);
    }

    #[test]
    fn diagonal_with_zero() {
        let m = QMatrix::new(2, 2, vec![Q::i(), Q::zero(), Q::zero(), Q::zero()]).unwrap();
        let p = pinv_matrix(&m, RankTolerance::default()).unwrap();
        assert!(p.get(0, 0).approx_eq(-Q::i(), 1e-15, 0.0));
        for (r, c) in [(0, 1), (1, 0), (1, 1)] {
            assert!(p.get(r, c).norm() < 1e-15);
        }
    }

    #[test]
    fn projectors_of_identity_and_zero() {
        let tol = RankTolerance::default();
        let id = QTensor::<f64>::identity(&[2, 2]).unwrap();
        assert!(left_projector(&id, tol).unwrap().fro_norm() < 1e-14);
        let z = QTensor::<f64>::zeros(id.shape().clone());
        assert_eq!(left_projector(&z, tol).unwrap(), id);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(RankTolerance::new(0.0).is_err());
        assert!(RankTolerance::new(1.5).is_err());
    }
}
