//! Public solvers for every variant.

use std::collections::BTreeMap;

use super::affine::{Affine, Resolver};
use super::chain::{self, ChainData, Numbering};
use super::stage::{single_family, sym, two_term_family, Ctx, PairSyms, Sym};
use super::tracked::{product, Tracked};
use super::{ConsistencyReport, FreeParams, Solution, SolveOutcome, SystemSpec, Tol, Variant};
use crate::error::{Error, Result};
use crate::qtensor::{QTensor, Shape};
use crate::Real;

type Values<T> = BTreeMap<String, QTensor<T>>;

/// Report plus, when consistent and requested, the evaluated unknowns.
fn finish<T: Real>(
    mut ctx: Ctx<T>,
    fp: &FreeParams<T>,
    evaluate: bool,
    unknowns: Vec<(String, Affine<T>)>,
    back: impl FnOnce(&mut Ctx<T>, &mut Resolver<'_, T>, &mut Values<T>) -> Result<()>,
) -> Result<SolveOutcome<T>> {
    let report = ConsistencyReport::new(std::mem::take(&mut ctx.conditions));
    if !report.overall || !evaluate {
        return Ok(SolveOutcome { report, solution: None, cache: ctx.cache });
    }
    let defs = std::mem::take(&mut ctx.defs);
    let mut r = Resolver::new(&defs, fp);
    let mut values = BTreeMap::new();
    for (name, aff) in unknowns {
        let v = aff.eval(&mut r)?;
        values.insert(name, v);
    }
    back(&mut ctx, &mut r, &mut values)?;
    let used = r.finish()?;
    let solution = Solution { unknowns: values, free_params_used: used };
    Ok(SolveOutcome { report, solution: Some(solution), cache: ctx.cache })
}

fn no_back<T: Real>(_: &mut Ctx<T>, _: &mut Resolver<'_, T>, _: &mut Values<T>) -> Result<()> {
    Ok(())
}

fn data<T: Real>(t: &QTensor<T>) -> Tracked<T> {
    Tracked::data(t.clone())
}

/// `A X B = E`: consistent iff `R_A E = 0` and `E L_B = 0`; then
/// `X = A†EB† + L_A W₁ + W₂ R_B`.
pub fn solve_axb<T: Real>(
    a: &QTensor<T>,
    b: &QTensor<T>,
    e: &QTensor<T>,
    fp: &FreeParams<T>,
    tol: &Tol,
) -> Result<SolveOutcome<T>> {
    axb(a, b, e, fp, tol, true)
}

fn axb<T: Real>(
    a: &QTensor<T>,
    b: &QTensor<T>,
    e: &QTensor<T>,
    fp: &FreeParams<T>,
    tol: &Tol,
    evaluate: bool,
) -> Result<SolveOutcome<T>> {
    let mut ctx = Ctx::new(*tol);
    let (a, b, e) = (data(a), data(b), data(e));
    let x = single_family(&mut ctx, "single", Some("3.6"), sym(&a, "A"), sym(&b, "B"), sym(&e, "E"), ["W1", "W2"])?;
    finish(ctx, fp, evaluate, vec![("X".into(), x)], no_back)
}

/// `A X + Y B = E`: consistent iff `R_A E L_B = 0`; then
/// `X = A†E − V₁B + L_A V₂`, `Y = R_A E B† + A V₁ + V₃ R_B`.
pub fn solve_ax_yb<T: Real>(
    a: &QTensor<T>,
    b: &QTensor<T>,
    e: &QTensor<T>,
    fp: &FreeParams<T>,
    tol: &Tol,
) -> Result<SolveOutcome<T>> {
    ax_yb(a, b, e, fp, tol, true)
}

fn ax_yb<T: Real>(
    a: &QTensor<T>,
    b: &QTensor<T>,
    e: &QTensor<T>,
    fp: &FreeParams<T>,
    tol: &Tol,
    evaluate: bool,
) -> Result<SolveOutcome<T>> {
    let mut ctx = Ctx::new(*tol);
    let (a, b, e) = (data(a), data(b), data(e));
    let pa = ctx.proj(&a)?;
    let pb = ctx.proj(&b)?;
    ctx.condition("3.14", "ax-yb", "R_A E L_B".into(), &[&pa.right, &e, &pb.left])?;
    let v1 = Shape::new(a.t.col_dims().to_vec(), b.t.row_dims().to_vec())?;
    let v2 = Shape::new(a.t.col_dims().to_vec(), e.t.col_dims().to_vec())?;
    let v3 = Shape::new(e.t.row_dims().to_vec(), b.t.row_dims().to_vec())?;
    let x =
        Affine::new(pa.pinv.mul(&e)?).term(-1.0, None, "V1", &v1, Some(&b)).term(1.0, Some(&pa.left), "V2", &v2, None);
    let y = Affine::new(product(&[&pa.right, &e, &pb.pinv])?).term(1.0, Some(&a), "V1", &v1, None).term(
        1.0,
        None,
        "V3",
        &v3,
        Some(&pb.right),
    );
    finish(ctx, fp, evaluate, vec![("X".into(), x), ("Y".into(), y)], no_back)
}

/// `C₃X₃D₃ + C₄X₄D₄ = E` with the four projector conditions and the
/// closed-form family in `U1..U5`.
pub fn solve_two_term<T: Real>(
    c3: &QTensor<T>,
    d3: &QTensor<T>,
    c4: &QTensor<T>,
    d4: &QTensor<T>,
    e: &QTensor<T>,
    fp: &FreeParams<T>,
    tol: &Tol,
) -> Result<SolveOutcome<T>> {
    two_term([c3, d3, c4, d4], e, fp, tol, true)
}

fn two_term<T: Real>(
    coefs: [&QTensor<T>; 4],
    e: &QTensor<T>,
    fp: &FreeParams<T>,
    tol: &Tol,
    evaluate: bool,
) -> Result<SolveOutcome<T>> {
    let mut ctx = Ctx::new(*tol);
    let [c3, d3, c4, d4] = coefs.map(data);
    let e = data(e);
    let (x3, x4) = two_term_family(
        &mut ctx,
        "two-term",
        Some(("3.4", "3.5")),
        sym(&c3, "C3"),
        sym(&d3, "D3"),
        sym(&c4, "C4"),
        sym(&d4, "D4"),
        sym(&e, "E"),
        &PairSyms { m: "Mhat", n: "Nhat", s: "Shat" },
        ["U1", "U2", "U3", "U4", "U5"],
    )?;
    finish(ctx, fp, evaluate, vec![("X3".into(), x3), ("X4".into(), x4)], no_back)
}

/// Data of the two-term equation left over after the first level.
struct Hatted<T> {
    a1: Tracked<T>,
    b1: Tracked<T>,
    a2: Tracked<T>,
    b2: Tracked<T>,
    e: Tracked<T>,
}

/// Symbols of the intermediates of one first-level reduction.
struct LevelSyms {
    m: String,
    n: String,
    s: String,
    hat: [String; 5],
}

/// For `A₁X₁B₁ + A₂X₂B₂ + A₂(C₃X₃D₃ + C₄X₄D₄)B₁ = E`: records
/// `M = R_{A₁}A₂`, `N = B₂L_{B₁}`, `S = A₂L_M`, the three conditions on `E`
/// alone, and returns the data of the two-term equation in `(X₃, X₄)`:
/// `(MC₃)X₃(D₃B₁L_{B₂}) + (MC₄)X₄(D₄B₁L_{B₂}) = R_{A₁}EL_{B₂}`.
fn first_level<T: Real>(
    ctx: &mut Ctx<T>,
    stage: &str,
    id: &str,
    [a1, b1, a2, b2]: [Sym<'_, T>; 4],
    [c3, d3, c4, d4]: [&Tracked<T>; 4],
    e: Sym<'_, T>,
    syms: &LevelSyms,
) -> Result<Hatted<T>> {
    let pa1 = ctx.proj(a1.t)?;
    let pb1 = ctx.proj(b1.t)?;
    let pa2 = ctx.proj(a2.t)?;
    let pb2 = ctx.proj(b2.t)?;
    let m = pa1.right.mul(a2.t)?;
    let n = b2.t.mul(&pb1.left)?;
    let pm = ctx.proj(&m)?;
    let pn = ctx.proj(&n)?;
    let s = a2.t.mul(&pm.left)?;
    ctx.record(stage, &syms.m, &m);
    ctx.record(stage, &syms.n, &n);
    ctx.record(stage, &syms.s, &s);
    let (an, bn, en) = (a1.name, b1.name, e.name);
    ctx.condition(id, stage, format!("R_{} R_{an} {en}", syms.m), &[&pm.right, &pa1.right, e.t])?;
    ctx.condition(id, stage, format!("{en} L_{bn} L_{}", syms.n), &[e.t, &pb1.left, &pn.left])?;
    ctx.condition(id, stage, format!("R_{} {en} L_{bn}", a2.name), &[&pa2.right, e.t, &pb1.left])?;

    let b1_lb2 = b1.t.mul(&pb2.left)?;
    let h = Hatted {
        a1: m.mul(c3)?,
        b1: d3.mul(&b1_lb2)?,
        a2: m.mul(c4)?,
        b2: d4.mul(&b1_lb2)?,
        e: product(&[&pa1.right, e.t, &pb2.left])?,
    };
    for (name, t) in syms.hat.iter().zip([&h.a1, &h.b1, &h.a2, &h.b2, &h.e]) {
        ctx.record(stage, name, t);
    }
    Ok(h)
}

/// `Ė = E − A₂(C₃X₃D₃ + C₄X₄D₄)B₁`, then `(X₁, X₂)` from the two-term family
/// of `A₁X₁B₁ + A₂X₂B₂ = Ė`, whose conditions hold once the first level and
/// the hatted equation are satisfied.
struct Back<'a, T> {
    stage: &'a str,
    outer: [Sym<'a, T>; 4],
    inner: [&'a Tracked<T>; 4],
    e: &'a Tracked<T>,
    edot: &'a str,
    syms: [&'a str; 3],
    names: [&'a str; 5],
}

fn back_substitute<T: Real>(
    ctx: &mut Ctx<T>,
    r: &mut Resolver<'_, T>,
    b: Back<'_, T>,
    x3: &QTensor<T>,
    x4: &QTensor<T>,
) -> Result<(QTensor<T>, QTensor<T>)> {
    let [a1, b1, a2, b2] = b.outer;
    let [c3, d3, c4, d4] = b.inner;
    let (x3, x4) = (Tracked::data(x3.clone()), Tracked::data(x4.clone()));
    let inner = product(&[c3, &x3, d3])?.add(&product(&[c4, &x4, d4])?)?;
    let e_dot = b.e.sub(&product(&[a2.t, &inner, b1.t])?)?;
    ctx.record(b.stage, b.edot, &e_dot);
    let (f1, f2) = two_term_family(
        ctx,
        b.stage,
        None,
        a1,
        b1,
        a2,
        b2,
        sym(&e_dot, b.edot),
        &PairSyms { m: b.syms[0], n: b.syms[1], s: b.syms[2] },
        b.names,
    )?;
    Ok((f1.eval(r)?, f2.eval(r)?))
}

/// The quadruple equation `A₁X₁B₁ + A₂X₂B₂ + A₂(C₃X₃D₃ + C₄X₄D₄)B₁ = E`:
/// three conditions on `E` plus the two-term conditions on the reduced data.
#[allow(clippy::too_many_arguments)]
pub fn solve_lemma24<T: Real>(
    a1: &QTensor<T>,
    b1: &QTensor<T>,
    a2: &QTensor<T>,
    b2: &QTensor<T>,
    c3: &QTensor<T>,
    d3: &QTensor<T>,
    c4: &QTensor<T>,
    d4: &QTensor<T>,
    e: &QTensor<T>,
    fp: &FreeParams<T>,
    tol: &Tol,
) -> Result<SolveOutcome<T>> {
    quad([a1, b1, a2, b2], [c3, d3, c4, d4], e, fp, tol, true)
}

fn quad<T: Real>(
    outer: [&QTensor<T>; 4],
    inner: [&QTensor<T>; 4],
    e: &QTensor<T>,
    fp: &FreeParams<T>,
    tol: &Tol,
    evaluate: bool,
) -> Result<SolveOutcome<T>> {
    let mut ctx = Ctx::new(*tol);
    let outer = outer.map(data);
    let inner = inner.map(data);
    let e = data(e);
    let [a1, b1, a2, b2] = &outer;
    let outer_syms = [sym(a1, "A1"), sym(b1, "B1"), sym(a2, "A2"), sym(b2, "B2")];
    let inner_refs = [&inner[0], &inner[1], &inner[2], &inner[3]];
    let level = LevelSyms {
        m: "M1".into(),
        n: "N1".into(),
        s: "S1".into(),
        hat: ["Ahat1", "Bhat1", "Ahat2", "Bhat2", "Ehat1"].map(String::from),
    };
    let h = first_level(&mut ctx, "first-level", "3.3", outer_syms, inner_refs, sym(&e, "E"), &level)?;
    let (x3, x4) = two_term_family(
        &mut ctx,
        "hatted",
        Some(("3.4", "3.5")),
        sym(&h.a1, "Ahat1"),
        sym(&h.b1, "Bhat1"),
        sym(&h.a2, "Ahat2"),
        sym(&h.b2, "Bhat2"),
        sym(&h.e, "Ehat1"),
        &PairSyms { m: "Mhat1", n: "Nhat1", s: "Shat1" },
        ["Uh1", "Uh2", "Uh3", "Uh4", "Uh5"],
    )?;
    finish(ctx, fp, evaluate, vec![("X3".into(), x3), ("X4".into(), x4)], |ctx, r, values| {
        let back = Back {
            stage: "back",
            outer: outer_syms,
            inner: inner_refs,
            e: &e,
            edot: "Edot1",
            syms: ["M1", "N1", "S1"],
            names: ["U1", "U2", "U3", "U4", "U5"],
        };
        let (x1, x2) = back_substitute(ctx, r, back, &values["X3"], &values["X4"])?;
        values.insert("X1".into(), x1);
        values.insert("X2".into(), x2);
        Ok(())
    })
}

/// Every slot of `spec` as input data.
fn tracked_slots<T: Real>(spec: &SystemSpec<T>) -> BTreeMap<String, Tracked<T>> {
    spec.tensors.iter().map(|(k, t)| (k.clone(), Tracked::data(t.clone()))).collect()
}

fn slot<'a, T>(slots: &'a BTreeMap<String, Tracked<T>>, name: &str) -> Result<&'a Tracked<T>> {
    slots.get(name).ok_or_else(|| Error::MissingSlot(name.to_string()))
}

fn indexed<'a, T>(slots: &'a BTreeMap<String, Tracked<T>>, role: &str) -> Result<[&'a Tracked<T>; 3]> {
    Ok([slot(slots, &format!("{role}1"))?, slot(slots, &format!("{role}2"))?, slot(slots, &format!("{role}3"))?])
}

fn expect_variant<T: Real>(spec: &SystemSpec<T>, v: Variant) -> Result<()> {
    if spec.variant != v {
        return Err(Error::parse("spec", format!("expected variant {v}, got {}", spec.variant)));
    }
    spec.unknown_shapes()?;
    Ok(())
}

fn z_unknowns<T>(z: [Affine<T>; 4]) -> Vec<(String, Affine<T>)> {
    z.into_iter().enumerate().map(|(k, a)| (format!("Z{}", k + 1), a)).collect()
}

fn full<T: Real>(spec: &SystemSpec<T>, fp: &FreeParams<T>, tol: &Tol, evaluate: bool) -> Result<SolveOutcome<T>> {
    expect_variant(spec, Variant::Full)?;
    let slots = tracked_slots(spec);
    let mut ctx = Ctx::new(*tol);
    let roles = ["A", "B", "C", "D", "E", "F", "G", "H", "J"].map(|r| indexed(&slots, r));
    let [a, b, c, d, e, f, g, h, j] = roles;
    let (a, b, c, d, e, f, g, h, j) = (a?, b?, c?, d?, e?, f?, g?, h?, j?);
    let names: Vec<[String; 5]> = (1..=3).map(|k| ["A", "B", "C", "D", "E"].map(|r| format!("{r}{k}"))).collect();

    let mut hatted = Vec::with_capacity(3);
    for i in 0..3 {
        let k = i + 1;
        let level = LevelSyms {
            m: format!("M{k}"),
            n: format!("N{k}"),
            s: format!("S{k}"),
            hat: ["Ahat", "Bhat", "Chat", "Dhat", "Ehat"].map(|r| format!("{r}{k}")),
        };
        let n = &names[i];
        hatted.push(first_level(
            &mut ctx,
            &format!("first-level{k}"),
            "3.3",
            [sym(a[i], &n[0]), sym(b[i], &n[1]), sym(c[i], &n[2]), sym(d[i], &n[3])],
            [f[i], g[i], h[i], j[i]],
            sym(e[i], &n[4]),
            &level,
        )?);
    }
    let data = ChainData {
        f: [&hatted[0].a1, &hatted[1].a1, &hatted[2].a1],
        g: [&hatted[0].b1, &hatted[1].b1, &hatted[2].b1],
        h: [&hatted[0].a2, &hatted[1].a2, &hatted[2].a2],
        j: [&hatted[0].b2, &hatted[1].b2, &hatted[2].b2],
        e: [&hatted[0].e, &hatted[1].e, &hatted[2].e],
        f4: slot(&slots, "F4")?,
        g4: slot(&slots, "G4")?,
        h4: slot(&slots, "H4")?,
        j4: slot(&slots, "J4")?,
        e4: slot(&slots, "E4")?,
        e5: slot(&slots, "E5")?,
        prefix: ["Ahat", "Bhat", "Chat", "Dhat", "Ehat"],
    };
    let z = chain::run(&mut ctx, &data, Numbering::Full)?;
    finish(ctx, fp, evaluate, z_unknowns(z), |ctx, r, values| {
        for i in 0..3 {
            let k = i + 1;
            let n = &names[i];
            let stage = format!("back{k}");
            let edot = format!("Edot{k}");
            let syms = [format!("M{k}"), format!("N{k}"), format!("S{k}")];
            let params: Vec<String> = (1..=5).map(|u| format!("U{u}_{k}")).collect();
            let back = Back {
                stage: &stage,
                outer: [sym(a[i], &n[0]), sym(b[i], &n[1]), sym(c[i], &n[2]), sym(d[i], &n[3])],
                inner: [f[i], g[i], h[i], j[i]],
                e: e[i],
                edot: &edot,
                syms: [&syms[0], &syms[1], &syms[2]],
                names: [&params[0], &params[1], &params[2], &params[3], &params[4]],
            };
            let (zi, zn) = (values[&format!("Z{k}")].clone(), values[&format!("Z{}", k + 1)].clone());
            let (x, y) = back_substitute(ctx, r, back, &zi, &zn)?;
            values.insert(format!("X{k}"), x);
            values.insert(format!("Y{k}"), y);
        }
        Ok(())
    })
}

/// Every condition of the full system, evaluated through the staged construction.
pub fn check_full<T: Real>(spec: &SystemSpec<T>, tol: &Tol) -> Result<ConsistencyReport> {
    Ok(full(spec, &FreeParams::zero(), tol, false)?.report)
}

/// Solves the full system: per-equation reduction to the chain in `Z`, the
/// chain cascade, then back-substitution for `X_i`, `Y_i`.
pub fn solve_full<T: Real>(spec: &SystemSpec<T>, fp: &FreeParams<T>, tol: &Tol) -> Result<SolveOutcome<T>> {
    full(spec, fp, tol, true)
}

fn run_chain<T: Real>(
    ctx: &mut Ctx<T>,
    slots: &BTreeMap<String, Tracked<T>>,
    num: Numbering,
) -> Result<[Affine<T>; 4]> {
    let data = ChainData {
        f: indexed(slots, "F")?,
        g: indexed(slots, "G")?,
        h: indexed(slots, "H")?,
        j: indexed(slots, "J")?,
        e: indexed(slots, "E")?,
        f4: slot(slots, "F4")?,
        g4: slot(slots, "G4")?,
        h4: slot(slots, "H4")?,
        j4: slot(slots, "J4")?,
        e4: slot(slots, "E4")?,
        e5: slot(slots, "E5")?,
        prefix: ["F", "G", "H", "J", "E"],
    };
    chain::run(ctx, &data, num)
}

fn reduced<T: Real>(spec: &SystemSpec<T>, fp: &FreeParams<T>, tol: &Tol, evaluate: bool) -> Result<SolveOutcome<T>> {
    expect_variant(spec, Variant::Reduced)?;
    let mut ctx = Ctx::new(*tol);
    let z = run_chain(&mut ctx, &tracked_slots(spec), Numbering::Reduced)?;
    finish(ctx, fp, evaluate, z_unknowns(z), no_back)
}

/// Solves the chain `F₄Z₁G₄ = E₄`, `F_iZ_iG_i + H_iZ_{i+1}J_i = E_i`, `H₄Z₄J₄ = E₅`.
pub fn solve_reduced<T: Real>(spec: &SystemSpec<T>, fp: &FreeParams<T>, tol: &Tol) -> Result<SolveOutcome<T>> {
    reduced(spec, fp, tol, true)
}

fn eta<T: Real>(spec: &SystemSpec<T>, fp: &FreeParams<T>, tol: &Tol, evaluate: bool) -> Result<SolveOutcome<T>> {
    expect_variant(spec, Variant::Eta)?;
    spec.check_eta_hermitian(tol)?;
    let axis = spec.eta.ok_or_else(|| Error::parse("spec", "missing eta axis"))?;
    let mut slots = tracked_slots(spec);
    for (from, to) in [("F", "G"), ("H", "J")] {
        for k in 1..=4 {
            let t = slot(&slots, &format!("{from}{k}"))?;
            let star = t.part(t.t.eta_conj_transpose(axis));
            slots.insert(format!("{to}{k}"), star);
        }
    }
    let mut ctx = Ctx::new(*tol);
    let z = run_chain(&mut ctx, &slots, Numbering::Reduced)?;
    let mut out = finish(ctx, fp, evaluate, z_unknowns(z), no_back)?;
    if let Some(sol) = &mut out.solution {
        for (name, zdot) in sol.unknowns.iter_mut() {
            out.cache.insert("symmetrize", &format!("{name}dot"), zdot);
            *zdot = zdot.add(&zdot.eta_conj_transpose(axis))?.scale(T::lit(0.5));
        }
    }
    Ok(out)
}

/// η-Hermitian solutions: solve the chain with `G = F^{η*}`, `J = H^{η*}`,
/// then average each `Ż` with its η-conjugate transpose.
pub fn solve_eta<T: Real>(spec: &SystemSpec<T>, fp: &FreeParams<T>, tol: &Tol) -> Result<SolveOutcome<T>> {
    eta(spec, fp, tol, true)
}

fn run<T: Real>(spec: &SystemSpec<T>, fp: &FreeParams<T>, tol: &Tol, evaluate: bool) -> Result<SolveOutcome<T>> {
    spec.unknown_shapes()?;
    let g = |s: &str| spec.get(s);
    match spec.variant {
        Variant::Single => axb(g("A")?, g("B")?, g("E")?, fp, tol, evaluate),
        Variant::AxYb => ax_yb(g("A")?, g("B")?, g("E")?, fp, tol, evaluate),
        Variant::TwoTerm => two_term([g("C3")?, g("D3")?, g("C4")?, g("D4")?], g("E")?, fp, tol, evaluate),
        Variant::Quad => quad(
            [g("A1")?, g("B1")?, g("A2")?, g("B2")?],
            [g("C3")?, g("D3")?, g("C4")?, g("D4")?],
            g("E")?,
            fp,
            tol,
            evaluate,
        ),
        Variant::Full => full(spec, fp, tol, evaluate),
        Variant::Reduced => reduced(spec, fp, tol, evaluate),
        Variant::Eta => eta(spec, fp, tol, evaluate),
    }
}

/// Consistency report for any variant.
pub fn check<T: Real>(spec: &SystemSpec<T>, tol: &Tol) -> Result<ConsistencyReport> {
    Ok(run(spec, &FreeParams::zero(), tol, false)?.report)
}

/// Solves any variant.
pub fn solve<T: Real>(spec: &SystemSpec<T>, fp: &FreeParams<T>, tol: &Tol) -> Result<SolveOutcome<T>> {
    run(spec, fp, tol, true)
}
