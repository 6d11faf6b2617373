use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qtensor::{QTensor, Shape};
use crate::quat::Quaternion;
use crate::Real;

/// How parameters without an explicit value are filled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FreePolicy {
    #[default]
    Zero,
    /// Standard-normal components from a generator keyed by seed and parameter name.
    Random(u64),
}

impl fmt::Display for FreePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreePolicy::Zero => write!(f, "zero"),
            FreePolicy::Random(s) => write!(f, "random:{s}"),
        }
    }
}

impl FromStr for FreePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "zero" {
            return Ok(FreePolicy::Zero);
        }
        match s.strip_prefix("random:") {
            Some(seed) => seed
                .parse()
                .map(FreePolicy::Random)
                .map_err(|e| Error::parse("free policy", format!("bad seed `{seed}`: {e}"))),
            None => Err(Error::parse("free policy", format!("expected zero or random:<seed>, got `{s}`"))),
        }
    }
}

/// Values for the arbitrary tensors of a general solution.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeParams<T> {
    pub policy: FreePolicy,
    pub values: BTreeMap<String, QTensor<T>>,
}

impl<T> Default for FreeParams<T> {
    fn default() -> Self {
        FreeParams { policy: FreePolicy::Zero, values: BTreeMap::new() }
    }
}

impl<T: Real> FreeParams<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn random(seed: u64) -> Self {
        FreeParams { policy: FreePolicy::Random(seed), values: BTreeMap::new() }
    }

    pub fn with_policy(policy: FreePolicy) -> Self {
        FreeParams { policy, values: BTreeMap::new() }
    }

    /// Pins one parameter to an explicit value.
    pub fn with(mut self, name: &str, value: QTensor<T>) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    /// Value of `name`, which must have `shape`.
    pub fn value(&self, name: &str, shape: &Shape) -> Result<QTensor<T>> {
        if let Some(v) = self.values.get(name) {
            if v.shape() != shape {
                return Err(Error::shape(
                    "free parameter",
                    format!("{name} has shape {} but needs {shape}", v.shape()),
                ));
            }
            return Ok(v.clone());
        }
        Ok(match self.policy {
            FreePolicy::Zero => QTensor::zeros(shape.clone()),
            FreePolicy::Random(seed) => random_tensor(seed, name, shape),
        })
    }
}

/// Generator for one named stream under `seed`; distinct names give
/// independent streams.
pub(crate) fn keyed_rng(seed: u64, key: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(key));
    rng
}

/// Deterministic standard-normal tensor for one named stream.
pub(crate) fn random_tensor<T: Real>(seed: u64, key: &str, shape: &Shape) -> QTensor<T> {
    let mut rng = keyed_rng(seed, key);
    QTensor::from_fn(shape.clone(), |_, _| {
        let mut draw = || T::lit(rng.sample::<f64, _>(StandardNormal));
        Quaternion::new(draw(), draw(), draw(), draw())
    })
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}
