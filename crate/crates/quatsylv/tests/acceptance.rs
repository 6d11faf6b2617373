//! Acceptance criteria 1–7, one line each.
//!
//! Runs without the test harness so the lines always reach the output. The
//! process fails when a criterion's outcome differs from the expected one:
//! every criterion is expected to pass except the worked example, whose
//! listed solution does not satisfy its listed data (see README).

mod common;

use std::time::Instant;

use common::{low_rank, rng, tensor};
use quatsylv::instances::{
    generate_consistent, load_fixture, perturb_inconsistent, solution_to_json, spec_to_json, FixtureId, ShapeProfile,
};
use quatsylv::pinv::{Projectors, RankTolerance};
use quatsylv::sylvester::{check, check_full, solve, verify, FreeParams, Tol, Variant};
use quatsylv::{Error, EtaAxis, Shape, Tensor};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel_to(a: &Tensor, b: &Tensor, scale: f64) -> f64 {
    a.sub(b).unwrap().fro_norm() / scale.max(f64::MIN_POSITIVE)
}

/// Worked example: conditions at `1e-8·scale`, equation residuals at `1e-8`
/// relative, with the garbled-entry allowance for `E1` and `E3`.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let tol = Tol::default();
    let (spec, sol) = load_fixture(FixtureId::Example33).unwrap();
    let report = check_full(&spec, &tol).unwrap();
    // thresholds are tol.cond·scale
    let failed_conditions: Vec<String> = report
        .conditions
        .iter()
        .filter(|c| c.residual > 1e-8 * c.threshold / tol.cond)
        .map(|c| format!("{} {} ({:.2e})", c.condition_id, c.label, c.residual))
        .collect();

    let mut failed_equations = Vec::new();
    let low_confidence = FixtureId::Example33.low_confidence();
    for eq in Variant::Full.equations() {
        let rhs = spec.get(&eq.rhs).unwrap();
        let lhs = spec.lhs(&eq, &sol).unwrap();
        let residual = rel_to(&lhs, rhs, rhs.fro_norm().max(1.0));
        if residual <= 1e-8 {
            continue;
        }
        // entries off by more than rounding
        let shape = rhs.shape();
        let mut bad = Vec::new();
        for (n, (l, r)) in lhs.data().iter().zip(rhs.data()).enumerate() {
            if (*l - *r).norm() > 1e-8 * rhs.fro_norm() {
                let nc = shape.total_cols();
                bad.push((
                    quatsylv::qtensor::unravel(n / nc, shape.row_dims()),
                    quatsylv::qtensor::unravel(n % nc, shape.col_dims()),
                ));
            }
        }
        let allowed = |row: &[usize], col: &[usize]| match eq.rhs.as_str() {
            // entry (2,1) of slice (:,:,2,1), and the whole of slice (:,:,2,2)
            "E1" => row == [1, 0] && col == [1, 0],
            "E3" => col == [1, 1],
            _ => false,
        };
        let traced = low_confidence.iter().any(|(slot, _)| *slot == eq.rhs) && bad.iter().all(|(r, c)| allowed(r, c));
        if !traced {
            failed_equations.push(format!(
                "{} ({:.3e}, {} of {} entries off)",
                eq.rhs,
                residual,
                bad.len(),
                shape.len()
            ));
        }
        // when traced, the back-solved entries equal the left-hand side there,
        // so the substituted equation holds by construction
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = failed_conditions.is_empty() && failed_equations.is_empty() && elapsed < 1.0;
    let detail = format!(
        "conditions failing: [{}]; equations failing: [{}]; {:.3} s",
        failed_conditions.join(", "),
        failed_equations.join(", "),
        elapsed
    );
    outcome(pass, detail)
}

/// Penrose axioms and the identities relating `†`, `*`, `η*`, `L`, `R`.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let tol = RankTolerance::default();
    let mut r = rng(2);
    let (mut worst_axiom, mut worst_identity) = (0.0f64, 0.0f64);
    for n in 0..200 {
        let order = if n % 2 == 0 { 2 } else { 3 };
        let rows: Vec<usize> = (0..order).map(|_| r.random_range(1..=3)).collect();
        let cols: Vec<usize> = (0..order).map(|_| r.random_range(1..=3)).collect();
        let shape = Shape::new(rows.clone(), cols.clone()).unwrap();
        let full = shape.total_rows().min(shape.total_cols());
        let rank = r.random_range(0..=full);
        let d = if r.random_bool(0.5) { tensor(&mut r, &rows, &cols) } else { low_rank(&mut r, &rows, &cols, rank) };
        let eta = [EtaAxis::I, EtaAxis::J, EtaAxis::K][n % 3];
        let p = Projectors::new(&d, tol).unwrap();
        let x = &p.pinv;
        let (dn, xn) = (d.fro_norm().max(1.0), x.fro_norm().max(1.0));
        let dx = d.einstein(x).unwrap();
        let xd = x.einstein(&d).unwrap();
        for v in [
            rel_to(&dx.einstein(&d).unwrap(), &d, dn),
            rel_to(&xd.einstein(x).unwrap(), x, xn),
            rel_to(&dx.conj_transpose(), &dx, dx.fro_norm().max(1.0)),
            rel_to(&xd.conj_transpose(), &xd, xd.fro_norm().max(1.0)),
        ] {
            worst_axiom = worst_axiom.max(v);
        }

        let zero_l = Tensor::zeros(p.left.einstein(x).unwrap().shape().clone());
        let zero_r = Tensor::zeros(p.right.einstein(&d).unwrap().shape().clone());
        let ds = d.conj_transpose();
        let de = d.eta_conj_transpose(eta);
        let pinv = |t: &Tensor| Projectors::new(t, tol).unwrap();
        let (ps, pe) = (pinv(&ds), pinv(&de));
        let dsd = ds.einstein(&d).unwrap();
        let dds = d.einstein(&ds).unwrap();
        for v in [
            // (1)
            rel_to(&p.left.einstein(x).unwrap(), &zero_l, xn),
            rel_to(&d.einstein(&p.left).unwrap(), &Tensor::zeros(d.shape().clone()), dn),
            rel_to(&p.right.einstein(&d).unwrap(), &zero_r, dn),
            rel_to(&x.einstein(&p.right).unwrap(), &Tensor::zeros(x.shape().clone()), xn),
            // (2)
            rel_to(&ps.pinv, &x.conj_transpose(), xn),
            rel_to(&pe.pinv, &x.eta_conj_transpose(eta), xn),
            // (3)
            rel_to(&p.left.eta_conj_transpose(eta), &pe.right, 1.0),
            rel_to(&p.right.eta_conj_transpose(eta), &pe.left, 1.0),
            // (4)
            rel_to(&pinv(&dsd).pinv, &x.einstein(&ps.pinv).unwrap(), xn * xn),
            rel_to(&pinv(&dds).pinv, &ps.pinv.einstein(x).unwrap(), xn * xn),
        ] {
            worst_identity = worst_identity.max(v);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_axiom <= 1e-10 && worst_identity <= 1e-9 && elapsed < 30.0;
    outcome(
        pass,
        format!("200 tensors; worst axiom {worst_axiom:.2e}, worst identity {worst_identity:.2e}; {elapsed:.2} s"),
    )
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let modes = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<usize> {
            let n = r.random_range(1..=3);
            (0..n).map(|_| r.random_range(1..=3)).collect()
        };
        let (rows, mid, cols) = (modes(&mut r), modes(&mut r), modes(&mut r));
        let a = tensor(&mut r, &rows, &mid);
        let b = tensor(&mut r, &mid, &cols);
        let lhs = a.einstein(&b).unwrap().flatten();
        let rhs = a.flatten().matmul(&b.flatten()).unwrap();
        worst = worst.max(lhs.sub(&rhs).unwrap().fro_norm() / (a.fro_norm() * b.fro_norm()));
    }
    outcome(worst <= 1e-12, format!("100 pairs; worst {worst:.2e} of ‖A‖‖B‖"))
}

fn criterion_4() -> Outcome {
    let tol = Tol::default();
    let variants = [Variant::Single, Variant::AxYb, Variant::TwoTerm, Variant::Quad, Variant::Full, Variant::Reduced];
    let (mut runs, mut failures, mut worst) = (0, Vec::new(), 0.0f64);
    for variant in variants {
        for seed in 1..=20 {
            let (spec, _) = generate_consistent(&ShapeProfile::all_dims_two(variant), None, seed).unwrap();
            for fp in [FreeParams::zero(), FreeParams::random(seed)] {
                runs += 1;
                let ok = check(&spec, &tol).unwrap().overall
                    && match solve(&spec, &fp, &tol).unwrap().into_solution() {
                        Ok(sol) => {
                            let v = verify(&spec, &sol, &tol).unwrap();
                            worst = v.conditions.iter().map(|c| c.residual).fold(worst, f64::max);
                            v.conditions.iter().all(|c| c.residual <= 1e-8)
                        }
                        Err(_) => false,
                    };
                if !ok {
                    failures.push(format!("{variant}/{seed}/{}", fp.policy));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{runs} solves; failures [{}]; worst residual {worst:.2e}", failures.join(", ")),
    )
}

fn criterion_5() -> Outcome {
    let tol = Tol::default();
    let mut summary = Vec::new();
    let mut pass = true;
    for variant in Variant::ALL {
        let eta = (variant == Variant::Eta).then_some(EtaAxis::J);
        let target = if variant.slots().iter().any(|s| s == "E4") { "E4" } else { "E" };
        let (mut collected, mut rejected, mut skipped) = (0, 0, 0);
        let mut seed = 0;
        while collected < 20 && seed < 10_000 {
            seed += 1;
            let (spec, _) = generate_consistent(&ShapeProfile::all_dims_two(variant), eta, seed).unwrap();
            let bad = match perturb_inconsistent(&spec, target, seed) {
                Ok(b) => b,
                Err(Error::NoNullSpace { .. }) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => panic!("{variant} seed {seed}: {e}"),
            };
            collected += 1;
            let report = check(&bad, &tol).unwrap();
            let err = solve(&bad, &FreeParams::zero(), &tol).unwrap().into_solution().err();
            let named = matches!(&err, Some(Error::Inconsistent { condition, .. }) if !condition.is_empty());
            if !report.overall && named {
                rejected += 1;
            }
        }
        pass &= collected == 20 && rejected == 20;
        summary.push(format!("{variant} {rejected}/{collected} ({skipped} surjective skipped)"));
    }
    outcome(pass, summary.join(", "))
}

fn criterion_6() -> Outcome {
    let tol = Tol::default();
    let (mut worst_sym, mut worst_eq, mut failures) = (0.0f64, 0.0f64, 0);
    for axis in [EtaAxis::I, EtaAxis::J, EtaAxis::K] {
        for seed in 1..=10 {
            let (spec, _) = generate_consistent(&ShapeProfile::all_dims_two(Variant::Eta), Some(axis), seed).unwrap();
            let sol = match solve(&spec, &FreeParams::random(seed), &tol).unwrap().into_solution() {
                Ok(s) => s,
                Err(_) => {
                    failures += 1;
                    continue;
                }
            };
            for k in 1..=4 {
                let z = sol.get(&format!("Z{k}")).unwrap();
                worst_sym = worst_sym.max(rel_to(z, &z.eta_conj_transpose(axis), z.fro_norm()));
            }
            let v = verify(&spec, &sol, &tol).unwrap();
            worst_eq = v.conditions.iter().map(|c| c.residual).fold(worst_eq, f64::max);
        }
    }
    let pass = failures == 0 && worst_sym <= 1e-12 && worst_eq <= 1e-8;
    outcome(
        pass,
        format!(
            "30 instances; worst ‖Z − Z^η*‖/‖Z‖ {worst_sym:.2e}, worst equation {worst_eq:.2e}, {failures} unsolved"
        ),
    )
}

fn criterion_7() -> Outcome {
    let tol = Tol::default();
    let mut differing = Vec::new();
    for variant in Variant::ALL {
        let eta = (variant == Variant::Eta).then_some(EtaAxis::K);
        let files: Vec<(String, String)> = (0..2)
            .map(|_| {
                let (spec, _) = generate_consistent(&ShapeProfile::all_dims_two(variant), eta, 7).unwrap();
                let sol = solve(&spec, &FreeParams::random(7), &tol).unwrap().into_solution().unwrap();
                (spec_to_json(&spec), solution_to_json(&sol))
            })
            .collect();
        if files[0] != files[1] {
            differing.push(variant.to_string());
        }
    }
    outcome(
        differing.is_empty(),
        format!("spec and solution files of 7 variants; differing [{}]", differing.join(", ")),
    )
}

/// Name, check, and whether it is expected to pass.
type Criterion = (&'static str, fn() -> Outcome, bool);

fn main() {
    let criteria: [Criterion; 7] = [
        ("worked example", criterion_1, false),
        ("Penrose axioms and identities", criterion_2, true),
        ("flattening homomorphism", criterion_3, true),
        ("round-trip solving", criterion_4, true),
        ("negative detection", criterion_5, true),
        ("eta-Hermitian suite", criterion_6, true),
        ("determinism", criterion_7, true),
    ];
    let mut unexpected = Vec::new();
    for (n, (name, run, expected)) in criteria.into_iter().enumerate() {
        let o = run();
        println!("criterion {}: {} {}: {}", n + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
        if o.pass != expected {
            unexpected.push(n + 1);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
