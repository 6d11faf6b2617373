//! Quaternion tensor algebra and solvers for coupled two-sided Sylvester-like
//! quaternion tensor equations.
//!
//! The numeric core ([`quat`], [`qtensor`], [`pinv`], [`sylvester`]) is generic
//! over the real scalar through [`Real`]; [`Quat`] and [`Tensor`] fix it to
//! `f64`, which is what the fixtures, generators and CLI use.
//!
//! ```
//! use quatsylv::pinv::{pinv_tensor, RankTolerance};
//! use quatsylv::{Quat, Shape, Tensor};
//!
//! // a 2×2×2×2 tensor whose flattening is i times the identity
//! let a = Tensor::from_fn(Shape::square(&[2, 2]).unwrap(), |r, c| if r == c { Quat::i() } else { Quat::zero() });
//! let x = pinv_tensor(&a, RankTolerance::default()).unwrap();
//! let back = a.einstein(&x).unwrap();
//! assert!(back.sub(&Tensor::identity(&[2, 2]).unwrap()).unwrap().fro_norm() < 1e-12);
//! ```

pub mod cli;
pub mod error;
pub mod instances;
pub mod pinv;
pub mod qtensor;
pub mod quat;
pub mod sylvester;

use std::fmt::{Debug, Display};

pub use error::{Error, Result};
pub use qtensor::{QMatrix, QTensor, Shape};
pub use quat::{EtaAxis, Quaternion};

/// Real scalar field for quaternion components.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant (tolerances, random draws).
    fn lit(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("f64 constant representable")
    }

    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: num_traits::Float + num_traits::FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

pub type Quat = Quaternion<f64>;
pub type Tensor = QTensor<f64>;
pub type Matrix = QMatrix<f64>;
pub type Quat32 = Quaternion<f32>;
pub type Tensor32 = QTensor<f32>;
