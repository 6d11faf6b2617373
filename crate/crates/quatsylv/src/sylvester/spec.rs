//! System specifications: which equations a variant consists of, the named
//! coefficient slots, and residual verification.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{Condition, ConsistencyReport, Solution, Tol};
use crate::error::{Error, Result};
use crate::qtensor::{QTensor, Shape};
use crate::quat::EtaAxis;
use crate::Real;

/// Supported equation classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// `A X B = E`.
    Single,
    /// `A X + Y B = E`.
    AxYb,
    /// `C₃ X₃ D₃ + C₄ X₄ D₄ = E`.
    TwoTerm,
    /// `A₁X₁B₁ + A₂X₂B₂ + A₂(C₃X₃D₃ + C₄X₄D₄)B₁ = E`.
    Quad,
    /// The coupled system with unknowns `X_i, Y_i, Z_j`.
    Full,
    /// The chain in `Z₁..Z₄` alone.
    Reduced,
    /// The chain with `G = F^{η*}`, `J = H^{η*}` and η-Hermitian unknowns.
    Eta,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Single,
        Variant::AxYb,
        Variant::TwoTerm,
        Variant::Quad,
        Variant::Full,
        Variant::Reduced,
        Variant::Eta,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Single => "single",
            Variant::AxYb => "ax_yb",
            Variant::TwoTerm => "two_term",
            Variant::Quad => "quad",
            Variant::Full => "full",
            Variant::Reduced => "reduced",
            Variant::Eta => "eta",
        }
    }

    /// The defining equations, in report order.
    pub fn equations(self) -> Vec<Equation> {
        use Factor::{Coef as C, EtaCoef as H, Unknown as U};
        let c = |s: &str| C(s.to_string());
        let h = |s: &str| H(s.to_string());
        let u = |s: &str| U(s.to_string());
        let eq = |rhs: &str, terms: Vec<Vec<Factor>>| Equation { rhs: rhs.to_string(), terms };
        match self {
            Variant::Single => vec![eq("E", vec![vec![c("A"), u("X"), c("B")]])],
            Variant::AxYb => vec![eq("E", vec![vec![c("A"), u("X")], vec![u("Y"), c("B")]])],
            Variant::TwoTerm => {
                vec![eq("E", vec![vec![c("C3"), u("X3"), c("D3")], vec![c("C4"), u("X4"), c("D4")]])]
            }
            Variant::Quad => vec![eq(
                "E",
                vec![
                    vec![c("A1"), u("X1"), c("B1")],
                    vec![c("A2"), u("X2"), c("B2")],
                    vec![c("A2"), c("C3"), u("X3"), c("D3"), c("B1")],
                    vec![c("A2"), c("C4"), u("X4"), c("D4"), c("B1")],
                ],
            )],
            Variant::Full => {
                let mut v = vec![eq("E4", vec![vec![c("F4"), u("Z1"), c("G4")]])];
                for i in 1..=3 {
                    let n = |s: &str| format!("{s}{i}");
                    let z = |k: usize| format!("Z{k}");
                    v.push(eq(
                        &n("E"),
                        vec![
                            vec![c(&n("A")), u(&n("X")), c(&n("B"))],
                            vec![c(&n("C")), u(&n("Y")), c(&n("D"))],
                            vec![c(&n("C")), c(&n("F")), u(&z(i)), c(&n("G")), c(&n("B"))],
                            vec![c(&n("C")), c(&n("H")), u(&z(i + 1)), c(&n("J")), c(&n("B"))],
                        ],
                    ));
                }
                v.push(eq("E5", vec![vec![c("H4"), u("Z4"), c("J4")]]));
                v
            }
            Variant::Reduced => {
                let mut v = vec![eq("E4", vec![vec![c("F4"), u("Z1"), c("G4")]])];
                for i in 1..=3 {
                    v.push(eq(
                        &format!("E{i}"),
                        vec![
                            vec![c(&format!("F{i}")), u(&format!("Z{i}")), c(&format!("G{i}"))],
                            vec![c(&format!("H{i}")), u(&format!("Z{}", i + 1)), c(&format!("J{i}"))],
                        ],
                    ));
                }
                v.push(eq("E5", vec![vec![c("H4"), u("Z4"), c("J4")]]));
                v
            }
            Variant::Eta => {
                let mut v = vec![eq("E4", vec![vec![c("F4"), u("Z1"), h("F4")]])];
                for i in 1..=3 {
                    let (f, hh) = (format!("F{i}"), format!("H{i}"));
                    v.push(eq(
                        &format!("E{i}"),
                        vec![vec![c(&f), u(&format!("Z{i}")), h(&f)], vec![c(&hh), u(&format!("Z{}", i + 1)), h(&hh)]],
                    ));
                }
                v.push(eq("E5", vec![vec![c("H4"), u("Z4"), h("H4")]]));
                v
            }
        }
    }

    /// Coefficient and right-hand side slots, sorted.
    pub fn slots(self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in self.equations() {
            for f in e.terms.iter().flatten() {
                if let Factor::Coef(s) | Factor::EtaCoef(s) = f {
                    out.push(s.clone());
                }
            }
            out.push(e.rhs);
        }
        out.sort();
        out.dedup();
        out
    }

    /// Unknown names, sorted.
    pub fn unknowns(self) -> Vec<String> {
        let mut out: Vec<String> = self
            .equations()
            .iter()
            .flat_map(|e| e.terms.iter().flatten())
            .filter_map(|f| match f {
                Factor::Unknown(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::parse("variant", format!("unknown variant `{s}`")))
    }
}

/// One factor of a product term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Coef(String),
    /// η-conjugate transpose of a coefficient.
    EtaCoef(String),
    Unknown(String),
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Coef(s) | Factor::Unknown(s) => f.write_str(s),
            Factor::EtaCoef(s) => write!(f, "{s}^η*"),
        }
    }
}

/// `Σ_terms Π factors = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub rhs: String,
    pub terms: Vec<Vec<Factor>>,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> =
            self.terms.iter().map(|t| t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect();
        write!(f, "{} = {}", terms.join(" + "), self.rhs)
    }
}

/// Coefficients and right-hand sides of one system.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec<T> {
    pub variant: Variant,
    /// Required for [`Variant::Eta`], absent otherwise.
    pub eta: Option<EtaAxis>,
    pub tensors: BTreeMap<String, QTensor<T>>,
}

impl<T: Real> SystemSpec<T> {
    /// Builds a spec, checking that the slots are exactly the variant's and
    /// that every product in its equations is shape-valid.
    pub fn new(variant: Variant, eta: Option<EtaAxis>, tensors: BTreeMap<String, QTensor<T>>) -> Result<Self> {
        if (variant == Variant::Eta) != eta.is_some() {
            return Err(Error::parse("spec", "an eta axis is required for the eta variant and only there"));
        }
        let slots = variant.slots();
        if let Some(missing) = slots.iter().find(|s| !tensors.contains_key(*s)) {
            return Err(Error::MissingSlot(missing.clone()));
        }
        if let Some(extra) = tensors.keys().find(|k| !slots.contains(k)) {
            return Err(Error::parse("spec", format!("slot `{extra}` does not belong to variant {variant}")));
        }
        if let Some((name, _)) = tensors.iter().find(|(_, t)| !t.is_finite()) {
            return Err(Error::parse("spec", format!("tensor `{name}` has non-finite entries")));
        }
        let spec = SystemSpec { variant, eta, tensors };
        spec.unknown_shapes()?;
        Ok(spec)
    }

    pub fn get(&self, slot: &str) -> Result<&QTensor<T>> {
        self.tensors.get(slot).ok_or_else(|| Error::MissingSlot(slot.to_string()))
    }

    fn factor(&self, f: &Factor, sol: Option<&Solution<T>>) -> Result<QTensor<T>> {
        match f {
            Factor::Coef(s) => self.get(s).cloned(),
            Factor::EtaCoef(s) => {
                let eta = self.eta.ok_or_else(|| Error::parse("spec", "missing eta axis"))?;
                Ok(self.get(s)?.eta_conj_transpose(eta))
            }
            Factor::Unknown(s) => match sol {
                Some(sol) => sol.get(s).cloned(),
                None => Err(Error::MissingSlot(s.clone())),
            },
        }
    }

    fn factor_shape(&self, f: &Factor) -> Result<Shape> {
        Ok(match f {
            Factor::Coef(s) => self.get(s)?.shape().clone(),
            Factor::EtaCoef(s) => self.get(s)?.shape().transposed(),
            Factor::Unknown(s) => return Err(Error::MissingSlot(s.clone())),
        })
    }

    /// Shapes of the unknowns implied by the coefficients; errors when the
    /// equations are not conformable.
    pub fn unknown_shapes(&self) -> Result<BTreeMap<String, Shape>> {
        let mut shapes: BTreeMap<String, Shape> = BTreeMap::new();
        for eq in self.variant.equations() {
            let rhs = self.get(&eq.rhs)?.shape().clone();
            for term in &eq.terms {
                for (p, f) in term.iter().enumerate() {
                    let Factor::Unknown(name) = f else { continue };
                    let rows = match p {
                        0 => rhs.row_dims().to_vec(),
                        _ => self.factor_shape(&term[p - 1])?.col_dims().to_vec(),
                    };
                    let cols = match term.get(p + 1) {
                        Some(next) => self.factor_shape(next)?.row_dims().to_vec(),
                        None => rhs.col_dims().to_vec(),
                    };
                    let s = Shape::new(rows, cols)?;
                    match shapes.get(name) {
                        Some(prev) if *prev != s => {
                            return Err(Error::shape("spec", format!("{name} needs both {prev} and {s}")));
                        }
                        _ => {
                            shapes.insert(name.clone(), s);
                        }
                    }
                }
            }
        }
        // evaluating with zero unknowns checks every product and sum
        let zeros = Solution {
            unknowns: shapes.iter().map(|(k, s)| (k.clone(), QTensor::zeros(s.clone()))).collect(),
            free_params_used: Default::default(),
        };
        for eq in self.variant.equations() {
            let lhs = self.lhs(&eq, &zeros)?;
            let rhs = self.get(&eq.rhs)?;
            if lhs.shape() != rhs.shape() {
                return Err(Error::shape("spec", format!("{}: left side {} vs {}", eq.rhs, lhs.shape(), rhs.shape())));
            }
        }
        Ok(shapes)
    }

    /// Left-hand side of `eq` with the unknowns taken from `sol`; only the
    /// coefficient slots of `self` are read.
    pub fn lhs(&self, eq: &Equation, sol: &Solution<T>) -> Result<QTensor<T>> {
        let mut acc: Option<QTensor<T>> = None;
        for term in &eq.terms {
            let mut prod = self.factor(&term[0], Some(sol))?;
            for f in &term[1..] {
                prod = prod.einstein(&self.factor(f, Some(sol))?)?;
            }
            acc = Some(match acc {
                Some(a) => a.add(&prod)?,
                None => prod,
            });
        }
        acc.ok_or_else(|| Error::shape("spec", format!("{} has no terms", eq.rhs)))
    }

    /// Largest `‖E − E^{η*}‖` violation over the right-hand sides, as an error.
    pub fn check_eta_hermitian(&self, tol: &Tol) -> Result<()> {
        let Some(eta) = self.eta else { return Ok(()) };
        for eq in self.variant.equations() {
            let e = self.get(&eq.rhs)?;
            let norm = e.fro_norm().to_f64_lossy();
            let deviation = match e.sub(&e.eta_conj_transpose(eta)) {
                Ok(d) => d.fro_norm().to_f64_lossy(),
                Err(_) => f64::INFINITY,
            };
            if deviation > tol.cond * norm.max(1.0) {
                return Err(Error::NotEtaHermitianRhs { slot: eq.rhs.clone(), deviation });
            }
        }
        Ok(())
    }
}

/// Substitutes `sol` into every equation of `spec`; each residual is
/// `‖LHS − RHS‖ / max(1, ‖RHS‖)`.
pub fn verify<T: Real>(spec: &SystemSpec<T>, sol: &Solution<T>, tol: &Tol) -> Result<ConsistencyReport> {
    let shapes = spec.unknown_shapes()?;
    for (name, shape) in &shapes {
        let got = sol.get(name)?;
        if got.shape() != shape {
            return Err(Error::shape("verify", format!("{name} has shape {} but the spec needs {shape}", got.shape())));
        }
    }
    let threshold = tol.verify_threshold();
    let mut conditions = Vec::new();
    for eq in spec.variant.equations() {
        let rhs = spec.get(&eq.rhs)?;
        let lhs = spec.lhs(&eq, sol)?;
        let rel = lhs.sub(rhs)?.fro_norm().to_f64_lossy() / rhs.fro_norm().to_f64_lossy().max(1.0);
        conditions.push(Condition {
            condition_id: eq.rhs.clone(),
            label: eq.to_string(),
            stage: "verify".into(),
            residual: rel,
            threshold,
            pass: rel <= threshold,
        });
    }
    Ok(ConsistencyReport::new(conditions))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_lists() {
        assert_eq!(Variant::Single.slots(), ["A", "B", "E"]);
        assert_eq!(Variant::Full.slots().len(), 33);
        assert_eq!(Variant::Full.unknowns(), ["X1", "X2", "X3", "Y1", "Y2", "Y3", "Z1", "Z2", "Z3", "Z4"]);
        assert_eq!(Variant::Reduced.slots().len(), 21);
        assert_eq!(
            Variant::Eta.slots(),
            ["E1", "E2", "E3", "E4", "E5", "F1", "F2", "F3", "F4", "H1", "H2", "H3", "H4"]
        );
        assert_eq!(Variant::Quad.unknowns(), ["X1", "X2", "X3", "X4"]);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("triple".parse::<Variant>().is_err());
    }

    #[test]
    fn equation_display() {
        let eqs = Variant::Eta.equations();
        assert_eq!(eqs[0].to_string(), "F4 Z1 F4^η* = E4");
        assert_eq!(Variant::AxYb.equations()[0].to_string(), "A X + Y B = E");
    }
}
