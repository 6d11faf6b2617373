//! The chain `F₄Z₁G₄ = E₄`, `F_iZ_iG_i + H_iZ_{i+1}J_i = E_i` (i = 1..3),
//! `H₄Z₄J₄ = E₅`, solved stage by stage.
//!
//! Each middle equation is a two-term equation with its own family for the
//! pair `(Z_i, Z_{i+1})`; the end equations give single families for `Z₁`
//! and `Z₄`. Every unknown then has two expressions, and each link below
//! equates two of them. A link pins its local parameters down and leaves one
//! or two shared parameters constrained by a smaller equation; those
//! constraints are themselves linked until nothing shared is left.
//!
//! Parameter names: `Uh*`, `Vh*`, `Kh*` belong to the pair families of
//! equations 1, 2, 3; `W1..W4` to the end families; the rest to the families
//! produced inside links.

use super::affine::Affine;
use super::stage::{link, single_family, sym, two_term_family, Ctx, Link, PairSyms, Shared};
use super::tracked::Tracked;
use crate::error::Result;
use crate::Real;

/// Which display the condition ids refer to: the chain embedded in the full
/// system or the chain on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Numbering {
    Full,
    Reduced,
}

impl Numbering {
    /// Id of the condition numbered `n` in the full-system list.
    pub fn id(self, n: u32) -> String {
        match self {
            Numbering::Full => format!("3.{n}"),
            Numbering::Reduced => format!("4.{}", n - 1),
        }
    }
}

/// Coefficients of the chain and the symbols used for them in labels.
pub(crate) struct ChainData<'a, T> {
    pub f: [&'a Tracked<T>; 3],
    pub g: [&'a Tracked<T>; 3],
    pub h: [&'a Tracked<T>; 3],
    pub j: [&'a Tracked<T>; 3],
    pub e: [&'a Tracked<T>; 3],
    pub f4: &'a Tracked<T>,
    pub g4: &'a Tracked<T>,
    pub h4: &'a Tracked<T>,
    pub j4: &'a Tracked<T>,
    pub e4: &'a Tracked<T>,
    pub e5: &'a Tracked<T>,
    /// Symbol prefixes for the roles F, G, H, J, E of the middle equations.
    pub prefix: [&'a str; 5],
}

const PAIR_PARAMS: [[&str; 5]; 3] =
    [["Uh1", "Uh2", "Uh3", "Uh4", "Uh5"], ["Vh1", "Vh2", "Vh3", "Vh4", "Vh5"], ["Kh1", "Kh2", "Kh3", "Kh4", "Kh5"]];

/// Runs every stage, recording conditions and parameter definitions in `ctx`,
/// and returns affine expressions for `Z₁..Z₄`.
pub(crate) fn run<T: Real>(ctx: &mut Ctx<T>, d: &ChainData<'_, T>, num: Numbering) -> Result<[Affine<T>; 4]> {
    let id = |n| num.id(n);
    let [pf, pg, ph, pj, pe] = d.prefix;

    // pair families: (Z_i, Z_{i+1}) from equation i
    let mut pair = Vec::with_capacity(3);
    for (i, params) in PAIR_PARAMS.into_iter().enumerate() {
        let k = i + 1;
        let stage = format!("pair{k}");
        let names =
            [format!("{pf}{k}"), format!("{pg}{k}"), format!("{ph}{k}"), format!("{pj}{k}"), format!("{pe}{k}")];
        let syms = [format!("Mhat{k}"), format!("Nhat{k}"), format!("Shat{k}")];
        let (zl, zr) = two_term_family(
            ctx,
            &stage,
            Some((&id(4), &id(5))),
            sym(d.f[i], &names[0]),
            sym(d.g[i], &names[1]),
            sym(d.h[i], &names[2]),
            sym(d.j[i], &names[3]),
            sym(d.e[i], &names[4]),
            &PairSyms { m: &syms[0], n: &syms[1], s: &syms[2] },
            params,
        )?;
        ctx.record(&stage, &format!("Z{k}"), &zl.constant);
        ctx.record(&stage, &format!("Z{}", k + 1), &zr.constant);
        pair.push((zl, zr));
    }

    // end families for Z₁ and Z₄; Z₄'s right parameter is fresh, not Z₁'s W₂
    let z1 = single_family(ctx, "end", Some(&id(6)), sym(d.f4, "F4"), sym(d.g4, "G4"), sym(d.e4, "E4"), ["W1", "W2"])?;
    let z4 = single_family(ctx, "end", Some(&id(6)), sym(d.h4, "H4"), sym(d.j4, "J4"), sym(d.e5, "E5"), ["W4", "W3"])?;
    ctx.record("end", "Z1", &z1.constant);
    ctx.record("end", "Z4", &z4.constant);

    // Z₁: end family against pair 1; leaves a single equation in Uh2
    let uh2 = link(
        ctx,
        Link {
            stage: "link-z1",
            ids: (&id(7), &id(7)),
            syms: ["A11", "D11", "E11"],
            x: ["W1", "Uh4"],
            y: ["W2", "Uh5"],
            shared: Shared::Single { param: "Uh2", c: "Ahat11", d: "Bhat11", e: "Ehat11", names: ["V77", "V88"] },
        },
        &z1,
        &pair[0].0,
    )?
    .remove(0);
    ctx.define("Uh2", uh2.clone())?;

    // Z₄: end family against pair 3; leaves a single equation in Kh2
    let kh2 = link(
        ctx,
        Link {
            stage: "link-z4",
            ids: (&id(7), &id(7)),
            syms: ["A22", "D22", "E22"],
            x: ["W4", "Kh1"],
            y: ["W3", "Kh3"],
            shared: Shared::Single { param: "Kh2", c: "Ahat22", d: "Bhat22", e: "Ehat22", names: ["V99", "W11"] },
        },
        &z4,
        &pair[2].1,
    )?
    .remove(0);
    ctx.define("Kh2", kh2.clone())?;

    // Z₂: pair 2 against pair 1; two-term equation in (Vh2, Uh2)
    let mut fam = link(
        ctx,
        Link {
            stage: "link-z2",
            ids: (&id(8), &id(9)),
            syms: ["Abar1", "Bbar1", "Ebar1"],
            x: ["Uh1", "Vh4"],
            y: ["Uh3", "Vh5"],
            shared: Shared::Pair {
                params: ["Vh2", "Uh2"],
                coeffs: ["Fbar11", "Gbar11", "Hbar11", "Jbar11", "Ebar11"],
                syms: PairSyms { m: "Mbar11", n: "Nbar11", s: "Sbar11" },
                names: ["Q44", "P44", "Q66", "P55", "P66"],
            },
        },
        &pair[1].0,
        &pair[0].1,
    )?;
    let uh2_pair = fam.pop().expect("two families");
    let vh2 = fam.pop().expect("two families");
    ctx.define("Vh2", vh2.clone())?;

    // Z₃: pair 3 against pair 2; two-term equation in (Kh2, Vh2)
    let mut fam = link(
        ctx,
        Link {
            stage: "link-z3",
            ids: (&id(8), &id(9)),
            syms: ["Abar2", "Bbar2", "Ebar2"],
            x: ["Vh1", "Kh4"],
            y: ["Vh3", "Kh5"],
            shared: Shared::Pair {
                params: ["Kh2", "Vh2"],
                coeffs: ["Fbar22", "Gbar22", "Hbar22", "Jbar22", "Ebar22"],
                syms: PairSyms { m: "Mbar22", n: "Nbar22", s: "Sbar22" },
                names: ["Q77", "Q55", "Q88", "P77", "P88"],
            },
        },
        &pair[2].0,
        &pair[1].1,
    )?;
    let vh2_pair = fam.pop().expect("two families");
    let kh2_pair = fam.pop().expect("two families");

    // Vh2 from both links; two-term equation in (P44, Q55)
    let mut fam = link(
        ctx,
        Link {
            stage: "link-v2",
            ids: (&id(10), &id(11)),
            syms: ["Abb1", "Bbb1", "Ebb1"],
            x: ["P55", "Q77"],
            y: ["P66", "Q88"],
            shared: Shared::Pair {
                params: ["P44", "Q55"],
                coeffs: ["Fbb11", "Gbb11", "Hbb11", "Jbb11", "Ebb11"],
                syms: PairSyms { m: "Mbb11", n: "Nbb11", s: "Sbb11" },
                names: ["K77", "K44", "K88", "K55", "K66"],
            },
        },
        &vh2,
        &vh2_pair,
    )?;
    let q55 = fam.pop().expect("two families");
    let p44 = fam.pop().expect("two families");
    ctx.define("P44", p44.clone())?;
    ctx.define("Q55", q55.clone())?;

    // Uh2 from link-z1 and link-z2; single equation in P44
    let p44_single = link(
        ctx,
        Link {
            stage: "fit-u2",
            ids: (&id(12), &id(12)),
            syms: ["Atilde1", "Btilde1", "Etilde1"],
            x: ["Q44", "V77"],
            y: ["Q66", "V88"],
            shared: Shared::Single { param: "P44", c: "Ctilde11", d: "Dtilde11", e: "Etilde11", names: ["W88", "W99"] },
        },
        &uh2_pair,
        &uh2,
    )?
    .remove(0);

    // Kh2 from link-z4 and link-z3; single equation in Q55
    let q55_single = link(
        ctx,
        Link {
            stage: "fit-k2",
            ids: (&id(12), &id(12)),
            syms: ["Atilde2", "Btilde2", "Etilde2"],
            x: ["V99", "P77"],
            y: ["W11", "P88"],
            shared: Shared::Single { param: "Q55", c: "Ctilde22", d: "Dtilde22", e: "Etilde22", names: ["T11", "T22"] },
        },
        &kh2,
        &kh2_pair,
    )?
    .remove(0);

    // P44 both ways; single equation in K44
    let k44 = link(
        ctx,
        Link {
            stage: "fit-p44",
            ids: (&id(13), &id(13)),
            syms: ["Ftilde1", "Gtilde1", "Etilde1'"],
            x: ["W88", "K55"],
            y: ["W99", "K66"],
            shared: Shared::Single {
                param: "K44",
                c: "Htilde11",
                d: "Jtilde11",
                e: "Etilde11'",
                names: ["T33", "T44"],
            },
        },
        &p44_single,
        &p44,
    )?
    .remove(0);
    ctx.define("K44", k44.clone())?;

    // Q55 both ways; another single equation in K44
    let k44_alt = link(
        ctx,
        Link {
            stage: "fit-q55",
            ids: (&id(13), &id(13)),
            syms: ["Ftilde2", "Gtilde2", "Etilde2'"],
            x: ["K77", "T11"],
            y: ["K88", "T22"],
            shared: Shared::Single {
                param: "K44",
                c: "Htilde22",
                d: "Jtilde22",
                e: "Etilde22'",
                names: ["T55", "T66"],
            },
        },
        &q55,
        &q55_single,
    )?
    .remove(0);

    // the two K44 families must meet
    link(
        ctx,
        Link {
            stage: "close",
            ids: (&id(14), &id(14)),
            syms: ["Atilde", "Btilde", "Etilde"],
            x: ["T33", "T55"],
            y: ["T44", "T66"],
            shared: Shared::None,
        },
        &k44,
        &k44_alt,
    )?;

    let (_, z2) = pair.remove(0);
    let (_, z3) = pair.remove(0);
    Ok([z1, z2, z3, z4])
}
