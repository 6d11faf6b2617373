//! Building blocks shared by every staged solve: condition bookkeeping, the
//! single and two-term solution families, and the linking step that equates
//! two expressions of the same unknown.

use std::collections::BTreeMap;

use super::affine::{Affine, Term};
use super::tracked::{product, Tracked, TrackedProjectors};
use super::{Condition, DerivationCache, Tol};
use crate::error::{Error, Result};
use crate::pinv::Projectors;
use crate::qtensor::Shape;
use crate::Real;

/// Mutable state of one solve.
pub(crate) struct Ctx<T> {
    pub tol: Tol,
    pub conditions: Vec<Condition>,
    pub cache: DerivationCache<T>,
    /// Parameters expressed through later, fresher parameters.
    pub defs: BTreeMap<String, Affine<T>>,
}

impl<T: Real> Ctx<T> {
    pub fn new(tol: Tol) -> Self {
        Ctx { tol, conditions: Vec::new(), cache: DerivationCache::default(), defs: BTreeMap::new() }
    }

    /// Projectors with the rank cutoff relative to the magnitude bound of `a`.
    pub fn proj(&self, a: &Tracked<T>) -> Result<TrackedProjectors<T>> {
        Ok(TrackedProjectors::new(Projectors::with_reference(&a.t, self.tol.rank, T::lit(a.mag))?))
    }

    pub fn record(&mut self, stage: &str, symbol: &str, t: &Tracked<T>) {
        self.cache.insert(stage, symbol, &t.t);
    }

    /// Records `‖Π factors‖ ≤ cond · max(1, Π magnitude bounds)`.
    pub fn condition(&mut self, id: &str, stage: &str, label: String, factors: &[&Tracked<T>]) -> Result<()> {
        let p = product(factors)?;
        let residual = p.t.fro_norm().to_f64_lossy();
        let threshold = self.tol.cond * p.mag.max(1.0);
        self.conditions.push(Condition {
            condition_id: id.to_string(),
            label,
            stage: stage.to_string(),
            residual,
            threshold,
            pass: residual <= threshold,
        });
        Ok(())
    }

    pub fn define(&mut self, name: &str, value: Affine<T>) -> Result<()> {
        if self.defs.insert(name.to_string(), value).is_some() {
            return Err(Error::shape("parameter definition", format!("{name} defined twice")));
        }
        Ok(())
    }
}

/// Tensor together with the symbol used for it in labels and the cache.
#[derive(Clone, Copy)]
pub(crate) struct Sym<'a, T> {
    pub t: &'a Tracked<T>,
    pub name: &'a str,
}

pub(crate) fn sym<'a, T>(t: &'a Tracked<T>, name: &'a str) -> Sym<'a, T> {
    Sym { t, name }
}

fn param_shape<T: Real>(rows_of: &Tracked<T>, cols_of: &Tracked<T>) -> Result<Shape> {
    Shape::new(rows_of.t.col_dims().to_vec(), cols_of.t.row_dims().to_vec())
}

/// General solution of `C X D = E`: `X = C†ED† + L_C W₁ + W₂ R_D`, valid iff
/// `R_C E = 0` and `E L_D = 0`. With `id = None` the conditions are skipped.
pub(crate) fn single_family<T: Real>(
    ctx: &mut Ctx<T>,
    stage: &str,
    id: Option<&str>,
    c: Sym<'_, T>,
    d: Sym<'_, T>,
    e: Sym<'_, T>,
    names: [&str; 2],
) -> Result<Affine<T>> {
    let pc = ctx.proj(c.t)?;
    let pd = ctx.proj(d.t)?;
    if let Some(id) = id {
        ctx.condition(id, stage, format!("R_{} {}", c.name, e.name), &[&pc.right, e.t])?;
        ctx.condition(id, stage, format!("{} L_{}", e.name, d.name), &[e.t, &pd.left])?;
    }
    let shape = param_shape(c.t, d.t)?;
    Ok(Affine::new(product(&[&pc.pinv, e.t, &pd.pinv])?).term(1.0, Some(&pc.left), names[0], &shape, None).term(
        1.0,
        None,
        names[1],
        &shape,
        Some(&pd.right),
    ))
}

/// Symbols for the intermediates `M̂ = R_{C₃}C₄`, `N̂ = D₄L_{D₃}`, `Ŝ = C₄L_{M̂}`.
pub(crate) struct PairSyms<'a> {
    pub m: &'a str,
    pub n: &'a str,
    pub s: &'a str,
}

/// General solution of `C₃X₃D₃ + C₄X₄D₄ = E`.
///
/// `names` are the arbitrary tensors `Û₁..Û₅`; `X₃` uses `Û₂, Û₄, Û₅` and `X₄`
/// uses `Û₁, Û₂, Û₃`. With `ids = None` the four conditions are skipped.
#[allow(clippy::too_many_arguments)]
pub(crate) fn two_term_family<T: Real>(
    ctx: &mut Ctx<T>,
    stage: &str,
    ids: Option<(&str, &str)>,
    c3: Sym<'_, T>,
    d3: Sym<'_, T>,
    c4: Sym<'_, T>,
    d4: Sym<'_, T>,
    e: Sym<'_, T>,
    syms: &PairSyms<'_>,
    names: [&str; 5],
) -> Result<(Affine<T>, Affine<T>)> {
    let pc3 = ctx.proj(c3.t)?;
    let pd3 = ctx.proj(d3.t)?;
    let pc4 = ctx.proj(c4.t)?;
    let pd4 = ctx.proj(d4.t)?;
    let m = pc3.right.mul(c4.t)?;
    let n = d4.t.mul(&pd3.left)?;
    let pm = ctx.proj(&m)?;
    let pn = ctx.proj(&n)?;
    let s = c4.t.mul(&pm.left)?;
    let ps = ctx.proj(&s)?;
    ctx.record(stage, syms.m, &m);
    ctx.record(stage, syms.n, &n);
    ctx.record(stage, syms.s, &s);

    if let Some((id_a, id_b)) = ids {
        let (cn, dn, en) = (c3.name, d3.name, e.name);
        ctx.condition(id_a, stage, format!("R_{} R_{cn} {en}", syms.m), &[&pm.right, &pc3.right, e.t])?;
        ctx.condition(id_a, stage, format!("{en} L_{dn} L_{}", syms.n), &[e.t, &pd3.left, &pn.left])?;
        ctx.condition(id_b, stage, format!("R_{cn} {en} L_{}", d4.name), &[&pc3.right, e.t, &pd4.left])?;
        ctx.condition(id_b, stage, format!("R_{} {en} L_{dn}", c4.name), &[&pc4.right, e.t, &pd3.left])?;
    }

    let x3_shape = param_shape(c3.t, d3.t)?;
    let x4_shape = param_shape(c4.t, d4.t)?;
    // X₃ = C₃†ED₃† − C₃†C₄M̂†ED₃† − C₃†ŜC₄†EN̂†D₄D₃† − C₃†ŜÛ₂R_N̂D₄D₃† + L_C₃Û₄ + Û₅R_D₃
    let x3_const = product(&[&pc3.pinv, e.t, &pd3.pinv])?
        .sub(&product(&[&pc3.pinv, c4.t, &pm.pinv, e.t, &pd3.pinv])?)?
        .sub(&product(&[&pc3.pinv, &s, &pc4.pinv, e.t, &pn.pinv, d4.t, &pd3.pinv])?)?;
    let u2_left = pc3.pinv.mul(&s)?;
    let u2_right = product(&[&pn.right, d4.t, &pd3.pinv])?;
    let x3 = Affine::new(x3_const)
        .term(-1.0, Some(&u2_left), names[1], &x4_shape, Some(&u2_right))
        .term(1.0, Some(&pc3.left), names[3], &x3_shape, None)
        .term(1.0, None, names[4], &x3_shape, Some(&pd3.right));
    // X₄ = M̂†ED₄† + Ŝ†ŜC₄†EN̂† + L_M̂L_ŜÛ₁ + L_M̂Û₂R_N̂ + Û₃R_D₄
    let x4_const = product(&[&pm.pinv, e.t, &pd4.pinv])?.add(&product(&[&ps.pinv, &s, &pc4.pinv, e.t, &pn.pinv])?)?;
    let lml = pm.left.mul(&ps.left)?;
    let x4 = Affine::new(x4_const)
        .term(1.0, Some(&lml), names[0], &x4_shape, None)
        .term(1.0, Some(&pm.left), names[1], &x4_shape, Some(&pn.right))
        .term(1.0, None, names[2], &x4_shape, Some(&pd4.right));
    Ok((x3, x4))
}

/// How the parameters shared with other stages are eliminated in a link.
pub(crate) enum Shared<'a> {
    /// No shared parameter: only `R_A E L_B = 0` remains.
    None,
    /// One shared parameter `P` with `C' P D' = Ê` after projection.
    Single { param: &'a str, c: &'a str, d: &'a str, e: &'a str, names: [&'a str; 2] },
    /// Two shared parameters forming a two-term equation after projection.
    Pair {
        params: [&'a str; 2],
        /// Symbols of `C₃, D₃, C₄, D₄, Ê` in the reduced equation.
        coeffs: [&'a str; 5],
        syms: PairSyms<'a>,
        names: [&'a str; 5],
    },
}

/// One linking step: `lhs = rhs` is rearranged to `A X + Y B + Σ C_k P_k D_k = E`
/// where `X` stacks the two parameters in `x` (left factors only), `Y` places
/// the two in `y` side by side (right factors only) and `P_k` are shared.
pub(crate) struct Link<'a> {
    pub stage: &'a str,
    /// Condition ids; the pair variant uses both, the others only the first.
    pub ids: (&'a str, &'a str),
    /// Symbols for `A`, `B`, `E`.
    pub syms: [&'a str; 3],
    pub x: [&'a str; 2],
    pub y: [&'a str; 2],
    pub shared: Shared<'a>,
}

/// `R_A C` and `D L_B` for a shared term `C P D`.
fn reduce<T: Real>(t: &Term<T>, ra: &Tracked<T>, lb: &Tracked<T>) -> Result<(Tracked<T>, Tracked<T>)> {
    let c = ra.mul(&t.left_coefficient()?)?;
    let d = match &t.right {
        Some(r) => r.mul(lb)?,
        None => lb.clone(),
    };
    Ok((c, d))
}

/// Solves a link, defines the four local parameters and returns the solution
/// families of the shared parameters (one or two, none for [`Shared::None`]).
pub(crate) fn link<T: Real>(
    ctx: &mut Ctx<T>,
    spec: Link<'_>,
    lhs: &Affine<T>,
    rhs: &Affine<T>,
) -> Result<Vec<Affine<T>>> {
    let stage = spec.stage;
    let eq = lhs.sub(rhs)?;
    let e = eq.constant.neg();

    let a0 = eq.take(spec.x[0])?;
    let a1 = eq.take(spec.x[1])?;
    let b0 = eq.take(spec.y[0])?;
    let b1 = eq.take(spec.y[1])?;
    if a0.right.is_some() || a1.right.is_some() || b0.left.is_some() || b1.left.is_some() {
        return Err(Error::shape("link", format!("{stage}: local parameters must be one-sided")));
    }
    let a = a0.left_coefficient()?.row_block(&a1.left_coefficient()?)?;
    let b = b0.right_coefficient()?.column_block(&b1.right_coefficient()?)?;
    let (x_top, y_left) = (a0.shape.row_dims().to_vec(), b0.shape.col_dims().to_vec());
    let [an, bn, en] = spec.syms;
    ctx.record(stage, an, &a);
    ctx.record(stage, bn, &b);
    ctx.record(stage, en, &e);

    let pa = ctx.proj(&a)?;
    let pb = ctx.proj(&b)?;
    let mut known: Vec<&str> = spec.x.iter().chain(&spec.y).copied().collect();
    let mut families = Vec::new();
    // E' = E − Σ C_k P_k D_k, still affine in the shared parameters
    let mut e_rest = Affine::new(e.clone());

    match &spec.shared {
        Shared::None => {
            ctx.condition(spec.ids.0, stage, format!("R_{an} {en} L_{bn}"), &[&pa.right, &e, &pb.left])?;
        }
        Shared::Single { param, c, d, e: e_sym, names } => {
            let t = eq.take(param)?;
            let (c_t, d_t) = reduce(t, &pa.right, &pb.left)?;
            let e_hat = product(&[&pa.right, &e, &pb.left])?;
            ctx.record(stage, c, &c_t);
            ctx.record(stage, d, &d_t);
            ctx.record(stage, e_sym, &e_hat);
            families.push(single_family(
                ctx,
                stage,
                Some(spec.ids.0),
                sym(&c_t, c),
                sym(&d_t, d),
                sym(&e_hat, e_sym),
                *names,
            )?);
            e_rest.terms.push(negated(t));
            known.push(param);
        }
        Shared::Pair { params, coeffs, syms, names } => {
            let t3 = eq.take(params[0])?;
            let t4 = eq.take(params[1])?;
            let (c3, d3) = reduce(t3, &pa.right, &pb.left)?;
            let (c4, d4) = reduce(t4, &pa.right, &pb.left)?;
            let e_hat = product(&[&pa.right, &e, &pb.left])?;
            for (sym_name, t) in coeffs.iter().zip([&c3, &d3, &c4, &d4, &e_hat]) {
                ctx.record(stage, sym_name, t);
            }
            let (f3, f4) = two_term_family(
                ctx,
                stage,
                Some(spec.ids),
                sym(&c3, coeffs[0]),
                sym(&d3, coeffs[1]),
                sym(&c4, coeffs[2]),
                sym(&d4, coeffs[3]),
                sym(&e_hat, coeffs[4]),
                syms,
                *names,
            )?;
            families.push(f3);
            families.push(f4);
            e_rest.terms.push(negated(t3));
            e_rest.terms.push(negated(t4));
            known.extend(params.iter().copied());
        }
    }
    if let Some(t) = eq.terms.iter().find(|t| !known.contains(&t.param.as_str())) {
        return Err(Error::shape("link", format!("{stage}: unexpected parameter {}", t.param)));
    }

    // X = A†E' − V₁B + L_A V₂,  Y = R_A E' B† + A V₁ + V₃ R_B
    let v1 = format!("{stage}:V1");
    let v2 = format!("{stage}:V2");
    let v3 = format!("{stage}:V3");
    let v1_shape = Shape::new(a.t.col_dims().to_vec(), b.t.row_dims().to_vec())?;
    let v2_shape = Shape::new(a.t.col_dims().to_vec(), e.t.col_dims().to_vec())?;
    let v3_shape = Shape::new(e.t.row_dims().to_vec(), b.t.row_dims().to_vec())?;
    let x = e_rest.premul(&pa.pinv)?.term(-1.0, None, &v1, &v1_shape, Some(&b)).term(
        1.0,
        Some(&pa.left),
        &v2,
        &v2_shape,
        None,
    );
    let y = e_rest.premul(&pa.right)?.postmul(&pb.pinv)?.term(1.0, Some(&a), &v1, &v1_shape, None).term(
        1.0,
        None,
        &v3,
        &v3_shape,
        Some(&pb.right),
    );
    let (x0, x1) = x.split_rows(&x_top)?;
    let (y0, y1) = y.split_cols(&y_left)?;
    ctx.define(spec.x[0], x0)?;
    ctx.define(spec.x[1], x1)?;
    ctx.define(spec.y[0], y0)?;
    ctx.define(spec.y[1], y1)?;
    Ok(families)
}

fn negated<T: Real>(t: &Term<T>) -> Term<T> {
    let mut n = t.clone();
    n.scale = -n.scale;
    n
}
