//! Tensors paired with a bound on the magnitude of what they were computed
//! from. Rounding in a computed tensor is of order `ε` times that bound, so
//! the bound rather than the tensor's own norm decides what counts as zero:
//! `R_A C` with `range C ⊂ range A` is pure rounding, and its own largest
//! singular value says nothing about that.

use crate::error::Result;
use crate::pinv::Projectors;
use crate::qtensor::QTensor;
use crate::Real;

#[derive(Clone, Debug)]
pub(crate) struct Tracked<T> {
    pub t: QTensor<T>,
    /// Upper bound on `‖t‖` in exact arithmetic and scale of its rounding.
    pub mag: f64,
}

impl<T: Real> Tracked<T> {
    /// Input data, exact as given.
    pub fn data(t: QTensor<T>) -> Self {
        let mag = t.fro_norm().to_f64_lossy();
        Tracked { t, mag }
    }

    /// Identity over `dims`; magnitude 1 in operator norm.
    pub fn identity(dims: &[usize]) -> Result<Self> {
        Ok(Tracked { t: QTensor::identity(dims)?, mag: 1.0 })
    }

    pub fn mul(&self, o: &Tracked<T>) -> Result<Self> {
        Ok(Tracked { t: self.t.einstein(&o.t)?, mag: self.mag * o.mag })
    }

    pub fn add(&self, o: &Tracked<T>) -> Result<Self> {
        Ok(Tracked { t: self.t.add(&o.t)?, mag: self.mag + o.mag })
    }

    pub fn sub(&self, o: &Tracked<T>) -> Result<Self> {
        Ok(Tracked { t: self.t.sub(&o.t)?, mag: self.mag + o.mag })
    }

    pub fn neg(&self) -> Self {
        Tracked { t: self.t.neg(), mag: self.mag }
    }

    pub fn scale(&self, s: T) -> Self {
        Tracked { t: self.t.scale(s), mag: self.mag * s.abs().to_f64_lossy() }
    }

    pub fn row_block(&self, o: &Tracked<T>) -> Result<Self> {
        Ok(Tracked { t: self.t.row_block(&o.t)?, mag: self.mag + o.mag })
    }

    pub fn column_block(&self, o: &Tracked<T>) -> Result<Self> {
        Ok(Tracked { t: self.t.column_block(&o.t)?, mag: self.mag + o.mag })
    }

    /// Part of `self` with the same magnitude bound.
    pub fn part(&self, t: QTensor<T>) -> Self {
        Tracked { t, mag: self.mag }
    }
}

/// Product of the factors, left to right.
pub(crate) fn product<T: Real>(factors: &[&Tracked<T>]) -> Result<Tracked<T>> {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter().try_fold((*first).clone(), |acc, f| acc.mul(f))
}

/// `A†`, `L_A`, `R_A` with magnitude bounds: the projectors have operator
/// norm 1 (or are zero), the inverse is bounded by its own norm.
pub(crate) struct TrackedProjectors<T> {
    pub pinv: Tracked<T>,
    pub left: Tracked<T>,
    pub right: Tracked<T>,
}

impl<T: Real> TrackedProjectors<T> {
    pub fn new(p: Projectors<T>) -> Self {
        let unit = |t: QTensor<T>| {
            let mag = if t.fro_norm() > T::zero() { 1.0 } else { 0.0 };
            Tracked { t, mag }
        };
        TrackedProjectors { pinv: Tracked::data(p.pinv), left: unit(p.left), right: unit(p.right) }
    }
}
