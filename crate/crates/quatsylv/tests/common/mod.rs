//! Helpers shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;
use quatsylv::pinv::{complex_adjoint, from_complex_adjoint, ComplexMatrix};
use quatsylv::{QMatrix, Quat, Shape, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn quat(rng: &mut impl Rng) -> Quat {
    let mut c = || rng.sample::<f64, _>(StandardNormal);
    Quat::new(c(), c(), c(), c())
}

pub fn tensor(rng: &mut impl Rng, rows: &[usize], cols: &[usize]) -> Tensor {
    let shape = Shape::new(rows.to_vec(), cols.to_vec()).unwrap();
    Tensor::from_fn(shape, |_, _| quat(rng))
}

/// Random tensor whose flattening has rank at most `rank`.
pub fn low_rank(rng: &mut impl Rng, rows: &[usize], cols: &[usize], rank: usize) -> Tensor {
    let shape = Shape::new(rows.to_vec(), cols.to_vec()).unwrap();
    let l = QMatrix::from_fn(shape.total_rows(), rank, |_, _| quat(rng));
    let r = QMatrix::from_fn(rank, shape.total_cols(), |_, _| quat(rng));
    Tensor::unflatten(&l.matmul(&r).unwrap(), shape).unwrap()
}

/// `‖a − b‖ / max(1, ‖b‖)`.
pub fn rel(a: &Tensor, b: &Tensor) -> f64 {
    a.sub(b).unwrap().fro_norm() / b.fro_norm().max(1.0)
}

pub fn dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=3)
}

/// Row and column mode lists of equal order, each mode of size 1..=3.
pub fn square_order() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (1usize..=3).prop_flat_map(|n| (prop::collection::vec(1usize..=3, n), prop::collection::vec(1usize..=3, n)))
}

/// Independent oracle: nalgebra's SVD-based pseudo-inverse of the complex
/// adjoint, mapped back to a quaternion tensor.
pub fn oracle_pinv(a: &Tensor) -> Tensor {
    let chi = complex_adjoint(&a.flatten());
    let m = DMatrix::from_fn(chi.rows(), chi.cols(), |r, c| chi.get(r, c));
    let norm = m.norm();
    let p = m.pseudo_inverse(1e-10 * norm.max(1e-300)).unwrap();
    let data: Vec<Complex<f64>> =
        (0..p.nrows()).flat_map(|r| (0..p.ncols()).map(move |c| (r, c))).map(|(r, c)| p[(r, c)]).collect();
    let x = ComplexMatrix::new(p.nrows(), p.ncols(), data).unwrap();
    Tensor::unflatten(&from_complex_adjoint(&x, 1e-8).unwrap(), a.shape().transposed()).unwrap()
}
