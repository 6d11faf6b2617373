//! Bundled fixtures and random instance generation.
//!
//! Consistent instances are built forward: coefficients and a ground-truth
//! solution are drawn first and every right-hand side is evaluated from them.
//! Inconsistent ones add a perturbation that no choice of unknowns can
//! produce.

mod io;
#[cfg(test)]
mod slices;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

pub use io::{solution_from_json, solution_to_json, spec_from_json, spec_to_json, tensor_from_value};

use crate::error::{Error, Result};
use crate::pinv::{Projectors, RankTolerance};
use crate::qtensor::{QMatrix, QTensor, Shape};
use crate::quat::{EtaAxis, Quaternion};
use crate::sylvester::{keyed_rng, random_tensor, Factor, FreeParams, Solution, SystemSpec, Variant};

/// A bundled fixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureId {
    /// The worked example of the full system: 2×2×2×2 tensors throughout.
    Example33,
}

impl FixtureId {
    pub const ALL: [FixtureId; 1] = [FixtureId::Example33];

    pub fn as_str(self) -> &'static str {
        match self {
            FixtureId::Example33 => "example-3.3",
        }
    }

    /// Entries of the spec transcribed from a garbled source and therefore
    /// reviewed by hand: `(slot, description)`.
    pub fn low_confidence(self) -> &'static [(&'static str, &'static str)] {
        match self {
            FixtureId::Example33 => &[
                ("E1", "entry (2,1) of slice (:,:,2,1), printed without the sign before 5j"),
                ("E3", "slice (:,:,2,2), printed under the label (:,:,2,1) a second time"),
            ],
        }
    }

    fn files(self) -> (&'static str, &'static str) {
        match self {
            FixtureId::Example33 => (
                include_str!("../../fixtures/example-3.3/spec.json"),
                include_str!("../../fixtures/example-3.3/solution.json"),
            ),
        }
    }
}

impl fmt::Display for FixtureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FixtureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FixtureId::ALL.into_iter().find(|id| id.as_str() == s).ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

/// The fixture's spec and the solution listed with it.
pub fn load_fixture(id: FixtureId) -> Result<(SystemSpec<f64>, Solution<f64>)> {
    let (spec, sol) = id.files();
    Ok((spec_from_json(spec)?, solution_from_json(sol)?))
}

/// Shapes of the coefficient slots and unknowns of one variant. Right-hand
/// sides are not listed; their shapes follow from the forward evaluation,
/// as do the `η*` factors of the eta variant.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeProfile {
    pub variant: Variant,
    pub coefficients: BTreeMap<String, Shape>,
    pub unknowns: BTreeMap<String, Shape>,
}

impl ShapeProfile {
    /// Every coefficient and unknown square with modes `dims`.
    pub fn uniform(variant: Variant, dims: &[usize]) -> Result<Self> {
        let shape = Shape::square(dims)?;
        let rhs: Vec<String> = variant.equations().into_iter().map(|e| e.rhs).collect();
        let coefficients =
            variant.slots().into_iter().filter(|s| !rhs.contains(s)).map(|s| (s, shape.clone())).collect();
        let unknowns = variant.unknowns().into_iter().map(|u| (u, shape.clone())).collect();
        Ok(ShapeProfile { variant, coefficients, unknowns })
    }

    /// All modes of size 2, two row and two column modes.
    pub fn all_dims_two(variant: Variant) -> Self {
        Self::uniform(variant, &[2, 2]).expect("valid dims")
    }
}

/// Coefficient drawn with standard-normal components; with probability 1/2
/// its flattening is replaced by a product of random `m×r` and `r×n` factors
/// with `r < min(m, n)`, so that its projectors are nontrivial.
fn coefficient(seed: u64, name: &str, shape: &Shape) -> Result<QTensor<f64>> {
    let mut rng = keyed_rng(seed, &format!("rank/{name}"));
    let (m, n) = (shape.total_rows(), shape.total_cols());
    if !rng.random_bool(0.5) {
        return Ok(random_tensor(seed, &format!("coef/{name}"), shape));
    }
    let r = rng.random_range(0..m.min(n));
    let mut draw = || {
        let mut c = || rng.sample::<f64, _>(StandardNormal);
        Quaternion::new(c(), c(), c(), c())
    };
    let left = QMatrix::from_fn(m, r, |_, _| draw());
    let right = QMatrix::from_fn(r, n, |_, _| draw());
    QTensor::unflatten(&left.matmul(&right)?, shape.clone())
}

/// Draws a consistent instance and its ground truth; `eta` is required for
/// the eta variant, whose ground-truth unknowns are η-Hermitian.
pub fn generate_consistent(
    profile: &ShapeProfile,
    eta: Option<EtaAxis>,
    seed: u64,
) -> Result<(SystemSpec<f64>, Solution<f64>)> {
    let variant = profile.variant;
    if (variant == Variant::Eta) != eta.is_some() {
        return Err(Error::parse("generate", "an eta axis is required for the eta variant and only there"));
    }
    let mut coefs = BTreeMap::new();
    for (name, shape) in &profile.coefficients {
        coefs.insert(name.clone(), coefficient(seed, name, shape)?);
    }
    let mut unknowns = BTreeMap::new();
    for (name, shape) in &profile.unknowns {
        let mut t = random_tensor(seed, &format!("truth/{name}"), shape);
        if let Some(axis) = eta {
            // averaging with a sign-permuted transpose is exact in floating point
            t = t.add(&t.eta_conj_transpose(axis))?.scale(0.5);
        }
        unknowns.insert(name.clone(), t);
    }
    let truth = Solution { unknowns, free_params_used: FreeParams::zero() };
    let mut partial = SystemSpec { variant, eta, tensors: coefs };
    for eq in variant.equations() {
        let rhs = partial.lhs(&eq, &truth)?;
        partial.tensors.insert(eq.rhs, rhs);
    }
    let spec = SystemSpec::new(variant, eta, partial.tensors)?;
    Ok((spec, truth))
}

/// Adds a unit-norm perturbation to `which_rhs` that lies outside the range
/// of its equation's left-hand side, so that one consistency condition of
/// that equation has residual 1.
///
/// With `K` the coefficients that begin a term and `K'` those that end a term
/// beginning with an unknown, the perturbation is `R_K P L_K'` for a random
/// `P`. For the eta variant it is `R_K S R_K^{η*}` with `S` η-Hermitian, which
/// keeps the right-hand side η-Hermitian.
pub fn perturb_inconsistent(spec: &SystemSpec<f64>, which_rhs: &str, seed: u64) -> Result<SystemSpec<f64>> {
    let eq = spec
        .variant
        .equations()
        .into_iter()
        .find(|e| e.rhs == which_rhs)
        .ok_or_else(|| Error::MissingSlot(which_rhs.to_string()))?;
    let coef = |f: &Factor| -> Result<Option<QTensor<f64>>> {
        Ok(match f {
            Factor::Coef(s) => Some(spec.get(s)?.clone()),
            Factor::EtaCoef(s) => {
                let axis = spec.eta.ok_or_else(|| Error::parse("spec", "missing eta axis"))?;
                Some(spec.get(s)?.eta_conj_transpose(axis))
            }
            Factor::Unknown(_) => None,
        })
    };
    let e = spec.get(which_rhs)?;
    // range of a row block [K₁ K₂ …] is the range of Σ K_k K_k^*
    let mut gram_left = QTensor::zeros(Shape::square(e.row_dims())?);
    let mut gram_right = QTensor::zeros(Shape::square(e.col_dims())?);
    for term in &eq.terms {
        match coef(&term[0])? {
            Some(k) => gram_left = gram_left.add(&k.einstein(&k.conj_transpose())?)?,
            None => {
                let k = coef(term.last().expect("nonempty term"))?
                    .ok_or_else(|| Error::shape("perturb", format!("term of {which_rhs} has no coefficient")))?;
                gram_right = gram_right.add(&k.conj_transpose().einstein(&k)?)?;
            }
        }
    }
    let tol = RankTolerance::default();
    let r_k = Projectors::new(&gram_left, tol)?.right;
    let l_k = Projectors::new(&gram_right, tol)?.left;
    let p = random_tensor::<f64>(seed, &format!("perturb/{which_rhs}"), e.shape());
    let delta = match spec.eta {
        Some(axis) => {
            let s = p.add(&p.eta_conj_transpose(axis))?;
            r_k.einstein(&s)?.einstein(&r_k.eta_conj_transpose(axis))?
        }
        None => r_k.einstein(&p)?.einstein(&l_k)?,
    };
    let norm = delta.fro_norm();
    if norm <= 1e-8 * p.fro_norm() {
        return Err(Error::NoNullSpace { slot: which_rhs.to_string() });
    }
    let mut tensors = spec.tensors.clone();
    tensors.insert(which_rhs.to_string(), e.add(&delta.scale(1.0 / norm))?);
    SystemSpec::new(spec.variant, spec.eta, tensors)
}
