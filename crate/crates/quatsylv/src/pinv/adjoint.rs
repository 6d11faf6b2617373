//! Complex matrices and the complex adjoint representation
//! `χ(M₁ + M₂j) = [[M₁, M₂], [−conj(M₂), conj(M₁)]]`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qtensor::QMatrix;
use crate::quat::Quaternion;
use crate::Real;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape("ComplexMatrix::new", format!("{rows}x{cols} vs {} entries", data.len())));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex<T>) {
        self.data[r * self.cols + c] = v;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::shape("ComplexMatrix::matmul", "inner dimensions differ"));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx] + a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn fro_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }
}

/// `χ(M)` for an `m×n` quaternion matrix, a `2m×2n` complex matrix.
pub fn complex_adjoint<T: Real>(m: &QMatrix<T>) -> ComplexMatrix<T> {
    let (r, c) = (m.rows(), m.cols());
    let mut out = ComplexMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let (m1, m2) = m.get(i, j).to_complex_pair();
            out.set(i, j, m1);
            out.set(i, c + j, m2);
            out.set(r + i, j, -m2.conj());
            out.set(r + i, c + j, m1.conj());
        }
    }
    out
}

/// Maps a `2m×2n` matrix of χ-image shape back to its quaternion preimage,
/// averaging the redundant blocks. Fails when the block structure deviates by
/// more than `rel_limit·max(1, ‖x‖)`.
pub fn from_complex_adjoint<T: Real>(x: &ComplexMatrix<T>, rel_limit: T) -> Result<QMatrix<T>> {
    if !x.rows().is_multiple_of(2) || !x.cols().is_multiple_of(2) {
        return Err(Error::shape("from_complex_adjoint", format!("{}x{} is not even", x.rows(), x.cols())));
    }
    let (r, c) = (x.rows() / 2, x.cols() / 2);
    let half = T::lit(0.5);
    let mut deviation = T::zero();
    let m = QMatrix::from_fn(r, c, |i, j| {
        let (p, q) = (x.get(i, j), x.get(i, c + j));
        let (mq, pc) = (x.get(r + i, j), x.get(r + i, c + j));
        deviation = deviation.max((p - pc.conj()).norm()).max((q + mq.conj()).norm());
        let ps = (p + pc.conj()).scale(half);
        let qs = (q - mq.conj()).scale(half);
        Quaternion::from_complex_pair(ps, qs)
    });
    let limit = rel_limit * x.fro_norm().max(T::one());
    if deviation > limit {
        return Err(Error::AdjointStructure { deviation: deviation.to_f64_lossy(), limit: limit.to_f64_lossy() });
    }
    Ok(m)
}
