//! Consistency checks and general solutions for the equation classes built on
//! two-sided Sylvester-like quaternion tensor equations.
//!
//! Every solver follows the same pattern: build the projector conditions of
//! its stage, record them in a [`ConsistencyReport`], and express each unknown
//! as an affine function of named free parameters. Later stages equate two
//! expressions of the same unknown, which pins some parameters down in terms
//! of fresh ones. Only parameters that are never pinned down are drawn from
//! [`FreeParams`].

mod affine;
mod chain;
mod params;
mod solvers;
mod spec;
mod stage;
mod tracked;

use std::collections::BTreeMap;

use serde::Serialize;

pub(crate) use params::{keyed_rng, random_tensor};
pub use params::{FreeParams, FreePolicy};
pub use solvers::{
    check, check_full, solve, solve_ax_yb, solve_axb, solve_eta, solve_full, solve_lemma24, solve_reduced,
    solve_two_term,
};
pub use spec::{verify, Equation, Factor, SystemSpec, Variant};

use crate::error::{Error, Result};
use crate::pinv::RankTolerance;
use crate::qtensor::QTensor;

/// Tolerances shared by every stage of a solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol {
    /// Numerical-rank cutoff for every pseudo-inverse.
    pub rank: RankTolerance,
    /// Relative threshold for projector conditions.
    pub cond: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { rank: RankTolerance::default(), cond: 1e-9 }
    }
}

impl Tol {
    pub fn new(rank: f64, cond: f64) -> Result<Self> {
        if !(cond > 0.0 && cond.is_finite()) {
            return Err(Error::parse("condition tolerance", format!("must be positive, got {cond}")));
        }
        Ok(Tol { rank: RankTolerance::new(rank)?, cond })
    }

    /// Relative residual accepted by [`verify`].
    pub fn verify_threshold(&self) -> f64 {
        10.0 * self.cond
    }
}

/// One evaluated condition: a projector identity or an equation residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    /// Equation number of the condition family, or the right-hand side slot for residual checks.
    pub condition_id: String,
    pub label: String,
    pub stage: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub conditions: Vec<Condition>,
    pub overall: bool,
}

impl ConsistencyReport {
    pub fn new(conditions: Vec<Condition>) -> Self {
        let overall = conditions.iter().all(|c| c.pass);
        ConsistencyReport { conditions, overall }
    }

    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| !c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.pass)
    }

    /// Largest residual among conditions with the given id.
    pub fn max_residual(&self, id: &str) -> Option<f64> {
        self.conditions.iter().filter(|c| c.condition_id == id).map(|c| c.residual).reduce(f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.conditions {
            out.push_str(&format!(
                "{:<5} {:<8} {:<14} {:<44} residual {:.3e} threshold {:.3e}\n",
                if c.pass { "ok" } else { "FAIL" },
                c.condition_id,
                c.stage,
                c.label,
                c.residual,
                c.threshold
            ));
        }
        out.push_str(if self.overall { "overall: pass\n" } else { "overall: FAIL\n" });
        out
    }
}

/// Named unknowns plus the free parameters that were actually consulted.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<T> {
    pub unknowns: BTreeMap<String, QTensor<T>>,
    pub free_params_used: FreeParams<T>,
}

impl<T> Solution<T> {
    pub fn get(&self, name: &str) -> Result<&QTensor<T>> {
        self.unknowns.get(name).ok_or_else(|| Error::MissingSlot(name.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CacheEntry<T> {
    pub stage: String,
    pub tensor: QTensor<T>,
}

/// Every intermediate tensor of a staged solve, keyed `stage/symbol`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationCache<T> {
    pub entries: BTreeMap<String, CacheEntry<T>>,
}

impl<T> Default for DerivationCache<T> {
    fn default() -> Self {
        DerivationCache { entries: BTreeMap::new() }
    }
}

impl<T: Clone> DerivationCache<T> {
    pub(crate) fn insert(&mut self, stage: &str, symbol: &str, tensor: &QTensor<T>) {
        self.entries
            .insert(format!("{stage}/{symbol}"), CacheEntry { stage: stage.to_string(), tensor: tensor.clone() });
    }

    pub fn get(&self, stage: &str, symbol: &str) -> Option<&QTensor<T>> {
        self.entries.get(&format!("{stage}/{symbol}")).map(|e| &e.tensor)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Result of a solve: the condition report, a solution when every condition
/// passed, and the intermediates.
#[derive(Clone, Debug)]
pub struct SolveOutcome<T> {
    pub report: ConsistencyReport,
    pub solution: Option<Solution<T>>,
    pub cache: DerivationCache<T>,
}

impl<T> SolveOutcome<T> {
    /// The solution, or [`Error::Inconsistent`] naming the first failed condition.
    pub fn into_solution(self) -> Result<Solution<T>> {
        match self.solution {
            Some(s) => Ok(s),
            None => Err(inconsistent(&self.report)),
        }
    }
}

/// The error for a report with a failing condition, naming the first one.
pub fn inconsistent(report: &ConsistencyReport) -> Error {
    match report.first_failure() {
        Some(c) => {
            Error::Inconsistent { stage: c.stage.clone(), condition: format!("{} ({})", c.condition_id, c.label) }
        }
        None => Error::Inconsistent { stage: "unknown".into(), condition: "unknown".into() },
    }
}
