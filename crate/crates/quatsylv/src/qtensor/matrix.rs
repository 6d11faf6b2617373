use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::Real;

/// Dense row-major quaternion matrix, the flattened image of a [`QTensor`](super::QTensor).
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion<T>>,
}

impl<T: Real> QMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Quaternion<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                "QMatrix::new",
                format!("{rows}x{cols} needs {} entries, got {}", rows * cols, data.len()),
            ));
        }
        Ok(QMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Quaternion::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Quaternion::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Quaternion<T>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Quaternion<T>> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Quaternion<T> {
        self.data[r * self.cols + c]
    }

    pub fn matmul(&self, other: &QMatrix<T>) -> Result<QMatrix<T>> {
        if self.cols != other.rows {
            return Err(Error::shape(
                "QMatrix::matmul",
                format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        Ok(QMatrix {
            rows: self.rows,
            cols: other.cols,
            data: matmul_raw(&self.data, &other.data, self.rows, self.cols, other.cols),
        })
    }

    pub fn conj_transpose(&self) -> QMatrix<T> {
        QMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn fro_norm(&self) -> T {
        fro_norm_raw(&self.data)
    }

    pub fn sub(&self, other: &QMatrix<T>) -> Result<QMatrix<T>> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::shape("QMatrix::sub", "dimension mismatch"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect();
        Ok(QMatrix { rows: self.rows, cols: self.cols, data })
    }
}

/// `(m×n)·(n×p)` product on row-major slices.
pub(crate) fn matmul_raw<T: Real>(
    a: &[Quaternion<T>],
    b: &[Quaternion<T>],
    m: usize,
    n: usize,
    p: usize,
) -> Vec<Quaternion<T>> {
    let mut out = vec![Quaternion::zero(); m * p];
    for i in 0..m {
        let row = &mut out[i * p..(i + 1) * p];
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == Quaternion::zero() {
                continue;
            }
            let brow = &b[k * p..(k + 1) * p];
            for (o, bkj) in row.iter_mut().zip(brow) {
                *o += aik * *bkj;
            }
        }
    }
    out
}

pub(crate) fn fro_norm_raw<T: Real>(data: &[Quaternion<T>]) -> T {
    // scaled accumulation avoids overflow in the sum of squares
    let m = data.iter().fold(T::zero(), |acc, q| acc.max(q.w.abs()).max(q.x.abs()).max(q.y.abs()).max(q.z.abs()));
    if m == T::zero() {
        return T::zero();
    }
    let inv = m.recip();
    let s = data.iter().fold(T::zero(), |acc, q| acc + q.scale(inv).norm_sqr());
    m * s.sqrt()
}
