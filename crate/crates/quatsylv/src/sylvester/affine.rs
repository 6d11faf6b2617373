//! Tensors that depend affinely on named free parameters.

use std::collections::BTreeMap;

use super::tracked::Tracked;
use super::FreeParams;
use crate::error::{Error, Result};
use crate::qtensor::{QTensor, Shape};
use crate::Real;

/// `scale · left * P * right`; a missing factor is the identity.
#[derive(Clone, Debug)]
pub(crate) struct Term<T> {
    pub scale: T,
    pub left: Option<Tracked<T>>,
    pub param: String,
    pub shape: Shape,
    pub right: Option<Tracked<T>>,
}

impl<T: Real> Term<T> {
    /// `scale · left`, materializing the identity when absent.
    pub fn left_coefficient(&self) -> Result<Tracked<T>> {
        Ok(match &self.left {
            Some(l) => l.scale(self.scale),
            None => Tracked::identity(self.shape.row_dims())?.scale(self.scale),
        })
    }

    /// `scale · right`, materializing the identity when absent.
    pub fn right_coefficient(&self) -> Result<Tracked<T>> {
        Ok(match &self.right {
            Some(r) => r.scale(self.scale),
            None => Tracked::identity(self.shape.col_dims())?.scale(self.scale),
        })
    }

    fn eval(&self, p: &QTensor<T>) -> Result<QTensor<T>> {
        let mut v = match &self.left {
            Some(l) => l.t.einstein(p)?,
            None => p.clone(),
        };
        if let Some(r) = &self.right {
            v = v.einstein(&r.t)?;
        }
        Ok(if self.scale == T::one() { v } else { v.scale(self.scale) })
    }
}

/// `constant + Σ terms`.
#[derive(Clone, Debug)]
pub(crate) struct Affine<T> {
    pub constant: Tracked<T>,
    pub terms: Vec<Term<T>>,
}

impl<T: Real> Affine<T> {
    pub fn new(constant: Tracked<T>) -> Self {
        Affine { constant, terms: Vec::new() }
    }

    /// Adds `scale · left * param * right`.
    pub fn term(
        mut self,
        scale: f64,
        left: Option<&Tracked<T>>,
        param: &str,
        shape: &Shape,
        right: Option<&Tracked<T>>,
    ) -> Self {
        self.terms.push(Term {
            scale: T::lit(scale),
            left: left.cloned(),
            param: param.to_string(),
            shape: shape.clone(),
            right: right.cloned(),
        });
        self
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.constant = out.constant.neg();
        for t in &mut out.terms {
            t.scale = -t.scale;
        }
        out
    }

    pub fn add(&self, other: &Affine<T>) -> Result<Self> {
        let mut out = self.clone();
        out.constant = out.constant.add(&other.constant)?;
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn sub(&self, other: &Affine<T>) -> Result<Self> {
        self.add(&other.neg())
    }

    /// `l * self`.
    pub fn premul(&self, l: &Tracked<T>) -> Result<Self> {
        let mut out = Affine::new(l.mul(&self.constant)?);
        for t in &self.terms {
            let left = match &t.left {
                Some(x) => l.mul(x)?,
                None => {
                    if l.t.col_dims() != t.shape.row_dims() {
                        return Err(Error::shape(
                            "affine premul",
                            format!("{} against parameter {}", l.t.shape(), t.param),
                        ));
                    }
                    l.clone()
                }
            };
            out.terms.push(Term { left: Some(left), ..t.clone() });
        }
        Ok(out)
    }

    /// `self * r`.
    pub fn postmul(&self, r: &Tracked<T>) -> Result<Self> {
        let mut out = Affine::new(self.constant.mul(r)?);
        for t in &self.terms {
            let right = match &t.right {
                Some(x) => x.mul(r)?,
                None => {
                    if r.t.row_dims() != t.shape.col_dims() {
                        return Err(Error::shape(
                            "affine postmul",
                            format!("parameter {} against {}", t.param, r.t.shape()),
                        ));
                    }
                    r.clone()
                }
            };
            out.terms.push(Term { right: Some(right), ..t.clone() });
        }
        Ok(out)
    }

    /// Splits a column block tensor into its top and bottom parts.
    pub fn split_rows(&self, top: &[usize]) -> Result<(Self, Self)> {
        let (c0, c1) = self.constant.t.split_column_block(top)?;
        let (mut a, mut b) = (Affine::new(self.constant.part(c0)), Affine::new(self.constant.part(c1)));
        for t in &self.terms {
            let l = t.left_coefficient()?;
            let (l0, l1) = l.t.split_column_block(top)?;
            let one = T::one();
            a.terms.push(Term { scale: one, left: Some(l.part(l0)), ..t.clone() });
            b.terms.push(Term { scale: one, left: Some(l.part(l1)), ..t.clone() });
        }
        Ok((a, b))
    }

    /// Splits a row block tensor into its left and right parts.
    pub fn split_cols(&self, left: &[usize]) -> Result<(Self, Self)> {
        let (c0, c1) = self.constant.t.split_row_block(left)?;
        let (mut a, mut b) = (Affine::new(self.constant.part(c0)), Affine::new(self.constant.part(c1)));
        for t in &self.terms {
            let r = t.right_coefficient()?;
            let (r0, r1) = r.t.split_row_block(left)?;
            let one = T::one();
            a.terms.push(Term { scale: one, right: Some(r.part(r0)), ..t.clone() });
            b.terms.push(Term { scale: one, right: Some(r.part(r1)), ..t.clone() });
        }
        Ok((a, b))
    }

    /// The unique term carrying `param`.
    pub fn take(&self, param: &str) -> Result<&Term<T>> {
        let mut found = self.terms.iter().filter(|t| t.param == param);
        match (found.next(), found.next()) {
            (Some(t), None) => Ok(t),
            _ => Err(Error::shape("affine", format!("expected exactly one term in {param}"))),
        }
    }

    pub fn eval(&self, r: &mut Resolver<'_, T>) -> Result<QTensor<T>> {
        let mut acc = self.constant.t.clone();
        for t in &self.terms {
            let p = r.param(&t.param, &t.shape)?;
            acc = acc.add(&t.eval(&p)?)?;
        }
        Ok(acc)
    }
}

/// Evaluates parameters: defined ones through their affine definition,
/// the rest from [`FreeParams`].
pub(crate) struct Resolver<'a, T> {
    defs: &'a BTreeMap<String, Affine<T>>,
    fp: &'a FreeParams<T>,
    memo: BTreeMap<String, QTensor<T>>,
    pub used: BTreeMap<String, QTensor<T>>,
}

impl<'a, T: Real> Resolver<'a, T> {
    pub fn new(defs: &'a BTreeMap<String, Affine<T>>, fp: &'a FreeParams<T>) -> Self {
        Resolver { defs, fp, memo: BTreeMap::new(), used: BTreeMap::new() }
    }

    pub fn param(&mut self, name: &str, shape: &Shape) -> Result<QTensor<T>> {
        if let Some(v) = self.memo.get(name) {
            return Ok(v.clone());
        }
        let v = match self.defs.get(name) {
            Some(def) => def.eval(self)?,
            None => {
                let v = self.fp.value(name, shape)?;
                self.used.insert(name.to_string(), v.clone());
                v
            }
        };
        if v.shape() != shape {
            return Err(Error::shape("parameter definition", format!("{name}: {} vs {shape}", v.shape())));
        }
        self.memo.insert(name.to_string(), v.clone());
        Ok(v)
    }

    /// Parameters consulted so far, with an error for supplied values that no
    /// stage consumed.
    pub fn finish(self) -> Result<FreeParams<T>> {
        if let Some(extra) = self.fp.values.keys().find(|k| !self.used.contains_key(*k)) {
            return Err(Error::parse("free parameters", format!("`{extra}` is not a free parameter of this solve")));
        }
        Ok(FreeParams { policy: self.fp.policy, values: self.used })
    }
}
