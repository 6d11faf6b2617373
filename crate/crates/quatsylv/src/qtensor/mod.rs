//! Dense even-order quaternion tensors with split row/column modes.
//!
//! A tensor in `H^{I₁×…×I_N × J₁×…×J_M}` stores its entries lexicographically:
//! first index most significant, row multi-index major, column multi-index
//! minor. Under this layout the flattening to a `(∏I)×(∏J)` quaternion matrix
//! is a plain reinterpretation of the data, and the Einstein product
//! `A *_N B` (contracting `A`'s column modes with `B`'s row modes) becomes
//! the matrix product.

mod block;
mod json;
mod matrix;

pub use json::{ShapeJson, TensorJson};
pub use matrix::QMatrix;

use std::fmt;

use crate::error::{Error, Result};
use crate::quat::{EtaAxis, Quaternion};
use crate::Real;
use matrix::{fro_norm_raw, matmul_raw};

/// Row and column mode dimensions `I(N) × J(M)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
}

impl Shape {
    pub fn new(row_dims: Vec<usize>, col_dims: Vec<usize>) -> Result<Self> {
        if row_dims.is_empty() || col_dims.is_empty() {
            return Err(Error::InvalidShape(format!(
                "need at least one row and one column mode, got {row_dims:?} x {col_dims:?}"
            )));
        }
        if row_dims.iter().chain(&col_dims).any(|&d| d == 0) {
            return Err(Error::InvalidShape(format!("zero dimension in {row_dims:?} x {col_dims:?}")));
        }
        Ok(Shape { row_dims, col_dims })
    }

    /// Square shape `dims × dims`.
    pub fn square(dims: &[usize]) -> Result<Self> {
        Self::new(dims.to_vec(), dims.to_vec())
    }

    pub fn row_dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn col_dims(&self) -> &[usize] {
        &self.col_dims
    }

    pub fn total_rows(&self) -> usize {
        self.row_dims.iter().product()
    }

    pub fn total_cols(&self) -> usize {
        self.col_dims.iter().product()
    }

    pub fn len(&self) -> usize {
        self.total_rows() * self.total_cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn transposed(&self) -> Shape {
        Shape { row_dims: self.col_dims.clone(), col_dims: self.row_dims.clone() }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}x{:?}", self.row_dims, self.col_dims)
    }
}

/// Lexicographic offset of `idx` within `dims` (first index most significant).
pub fn ravel(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// Inverse of [`ravel`].
pub fn unravel(mut offset: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for (slot, &d) in idx.iter_mut().zip(dims).rev() {
        *slot = offset % d;
        offset /= d;
    }
    idx
}

#[derive(Clone, Debug, PartialEq)]
pub struct QTensor<T> {
    shape: Shape,
    data: Vec<Quaternion<T>>,
}

impl<T: Real> QTensor<T> {
    pub fn new(shape: Shape, data: Vec<Quaternion<T>>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::shape(
                "QTensor::new",
                format!("shape {shape} needs {} entries, got {}", shape.len(), data.len()),
            ));
        }
        Ok(QTensor { shape, data })
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.len();
        QTensor { shape, data: vec![Quaternion::zero(); n] }
    }

    /// Unit tensor over `dims`: `δ_{i₁j₁}⋯δ_{i_Nj_N}`.
    pub fn identity(dims: &[usize]) -> Result<Self> {
        let shape = Shape::square(dims)?;
        let n = shape.total_rows();
        let mut t = Self::zeros(shape);
        for i in 0..n {
            t.data[i * n + i] = Quaternion::one();
        }
        Ok(t)
    }

    /// Builds a tensor from a function of the (row, column) multi-indices.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize], &[usize]) -> Quaternion<T>) -> Self {
        let (nr, nc) = (shape.total_rows(), shape.total_cols());
        let mut data = Vec::with_capacity(nr * nc);
        for r in 0..nr {
            let ri = unravel(r, &shape.row_dims);
            for c in 0..nc {
                data.push(f(&ri, &unravel(c, &shape.col_dims)));
            }
        }
        QTensor { shape, data }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn row_dims(&self) -> &[usize] {
        &self.shape.row_dims
    }

    pub fn col_dims(&self) -> &[usize] {
        &self.shape.col_dims
    }

    pub fn data(&self) -> &[Quaternion<T>] {
        &self.data
    }

    /// Entry at row multi-index `row` and column multi-index `col`.
    pub fn get(&self, row: &[usize], col: &[usize]) -> Result<Quaternion<T>> {
        let in_range =
            |idx: &[usize], dims: &[usize]| idx.len() == dims.len() && idx.iter().zip(dims).all(|(i, d)| i < d);
        if !in_range(row, &self.shape.row_dims) || !in_range(col, &self.shape.col_dims) {
            return Err(Error::shape("QTensor::get", format!("index {row:?},{col:?} outside {}", self.shape)));
        }
        let r = ravel(row, &self.shape.row_dims);
        let c = ravel(col, &self.shape.col_dims);
        Ok(self.data[r * self.shape.total_cols() + c])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    /// Einstein product `self *_N other`, contracting all of `self`'s column
    /// modes against `other`'s row modes.
    pub fn einstein(&self, other: &QTensor<T>) -> Result<QTensor<T>> {
        if self.shape.col_dims != other.shape.row_dims {
            return Err(Error::shape(
                "einstein_product",
                format!("left columns {:?} vs right rows {:?}", self.shape.col_dims, other.shape.row_dims),
            ));
        }
        let shape = Shape { row_dims: self.shape.row_dims.clone(), col_dims: other.shape.col_dims.clone() };
        let data = matmul_raw(
            &self.data,
            &other.data,
            self.shape.total_rows(),
            self.shape.total_cols(),
            other.shape.total_cols(),
        );
        Ok(QTensor { shape, data })
    }

    pub fn conj_transpose(&self) -> QTensor<T> {
        let (nr, nc) = (self.shape.total_rows(), self.shape.total_cols());
        let mut data = Vec::with_capacity(nr * nc);
        for c in 0..nc {
            for r in 0..nr {
                data.push(self.data[r * nc + c].conj());
            }
        }
        QTensor { shape: self.shape.transposed(), data }
    }

    /// `A^{η*} = −η A^* η`.
    pub fn eta_conj_transpose(&self, eta: EtaAxis) -> QTensor<T> {
        let mut t = self.conj_transpose();
        let e = eta.unit::<T>();
        for q in &mut t.data {
            *q = -(e * *q * e);
        }
        t
    }

    pub fn add(&self, other: &QTensor<T>) -> Result<QTensor<T>> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &QTensor<T>) -> Result<QTensor<T>> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> QTensor<T> {
        self.map(|q| q.scale(s))
    }

    pub fn neg(&self) -> QTensor<T> {
        self.map(|q| -q)
    }

    pub fn map(&self, f: impl Fn(Quaternion<T>) -> Quaternion<T>) -> QTensor<T> {
        QTensor { shape: self.shape.clone(), data: self.data.iter().map(|&q| f(q)).collect() }
    }

    fn zip_with(
        &self,
        other: &QTensor<T>,
        op: &'static str,
        f: impl Fn(Quaternion<T>, Quaternion<T>) -> Quaternion<T>,
    ) -> Result<QTensor<T>> {
        if self.shape != other.shape {
            return Err(Error::shape(op, format!("{} vs {}", self.shape, other.shape)));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(QTensor { shape: self.shape.clone(), data })
    }

    /// Frobenius norm `sqrt(Σ |entry|²)`.
    pub fn fro_norm(&self) -> T {
        fro_norm_raw(&self.data)
    }

    pub fn flatten(&self) -> QMatrix<T> {
        QMatrix::new(self.shape.total_rows(), self.shape.total_cols(), self.data.clone())
            .expect("tensor data length matches its shape")
    }

    pub fn unflatten(m: &QMatrix<T>, shape: Shape) -> Result<QTensor<T>> {
        if m.rows() != shape.total_rows() || m.cols() != shape.total_cols() {
            return Err(Error::shape("unflatten", format!("{}x{} matrix for shape {shape}", m.rows(), m.cols())));
        }
        Ok(QTensor { shape, data: m.data().to_vec() })
    }

    /// Converts every component to another real type.
    pub fn cast<U: Real>(&self) -> QTensor<U> {
        let c = |v: T| U::from(v).expect("real conversion");
        QTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|q| Quaternion::new(c(q.w), c(q.x), c(q.y), c(q.z))).collect(),
        }
    }
}

/// Einstein product of a chain `t₀ * t₁ * …`, evaluated left to right.
pub fn chain<T: Real>(factors: &[&QTensor<T>]) -> Result<QTensor<T>> {
    let (first, rest) = factors.split_first().ok_or_else(|| Error::shape("chain", "empty product"))?;
    rest.iter().try_fold((*first).clone(), |acc, f| acc.einstein(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Quaternion<f64>;

    fn sh(r: &[usize], c: &[usize]) -> Shape {
        Shape::new(r.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn ravel_round_trip() {
        let dims = [2, 3, 4];
        for off in 0..24 {
            assert_eq!(ravel(&unravel(off, &dims), &dims), off);
        }
        assert_eq!(ravel(&[1, 0, 0], &dims), 12);
    }

    #[test]
    fn identity_norm_and_flatten() {
        let id = QTensor::<f64>::identity(&[2, 2]).unwrap();
        assert_eq!(id.fro_norm(), 2.0);
        assert_eq!(id.flatten(), QMatrix::identity(4));
        assert_eq!(QTensor::<f64>::zeros(sh(&[2], &[3])).fro_norm(), 0.0);
    }

    #[test]
    fn identity_is_unit_for_einstein() {
        let b = QTensor::from_fn(sh(&[2, 3], &[2]), |r, c| Q::new(r[0] as f64, r[1] as f64, c[0] as f64, 1.0));
        let il = QTensor::identity(&[2, 3]).unwrap();
        let ir = QTensor::identity(&[2]).unwrap();
        assert_eq!(il.einstein(&b).unwrap(), b);
        assert_eq!(b.einstein(&ir).unwrap(), b);
    }

    #[test]
    fn einstein_rejects_mismatched_modes() {
        let a = QTensor::<f64>::zeros(sh(&[2], &[2, 3]));
        let b = QTensor::<f64>::zeros(sh(&[3, 2], &[1]));
        assert!(matches!(a.einstein(&b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn get_uses_lexicographic_layout() {
        let t = QTensor::from_fn(sh(&[2, 2], &[2, 2]), |r, c| {
            Q::real((1000 * r[0] + 100 * r[1] + 10 * c[0] + c[1]) as f64)
        });
        assert_eq!(t.get(&[1, 0], &[0, 1]).unwrap(), Q::real(1001.0));
        assert_eq!(t.data()[(2 * 4) + 1], Q::real(1001.0));
        assert!(t.get(&[2, 0], &[0, 0]).is_err());
    }

    #[test]
    fn conj_transpose_swaps_shape_and_conjugates() {
        let t = QTensor::from_fn(sh(&[2], &[3, 1]), |r, c| Q::new(r[0] as f64, c[0] as f64, 1.0, 2.0));
        let h = t.conj_transpose();
        assert_eq!(h.shape(), &sh(&[3, 1], &[2]));
        assert_eq!(h.get(&[2, 0], &[1]).unwrap(), t.get(&[1], &[2, 0]).unwrap().conj());
        assert_eq!(h.conj_transpose(), t);
    }

    #[test]
    fn eta_conj_transpose_fixes_identity() {
        let id = QTensor::<f64>::identity(&[2, 2]).unwrap();
        for eta in EtaAxis::ALL {
            assert_eq!(id.eta_conj_transpose(eta), id);
        }
    }

    #[test]
    fn unflatten_checks_dimensions() {
        let m = QMatrix::<f64>::zeros(3, 4);
        assert!(QTensor::unflatten(&m, sh(&[2, 2], &[2, 2])).is_err());
        assert!(QTensor::unflatten(&m, sh(&[3], &[2, 2])).is_ok());
    }
}
