//! End-to-end acceptance checks, one line per criterion.

mod common;

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use common::Gen;
use diffiety_core::cli::{parse_expr, ModelKind, Vocabulary};
use diffiety_core::expr::{Atom, Q};
use diffiety_core::fields::{
    check_variation, commutator, contact_check, group_check, poisson_bracket, ContactVerdict, GroupVerdict,
};
use diffiety_core::forms::{self, represent, Representation};
use diffiety_core::kdv;
use diffiety_core::reduce::order::{order_preservation_check, OrderVerdict};
use diffiety_core::reduce::{involutive, ode2, pde1};
use diffiety_core::{Diffiety, Expr, JetSpec, MultiIndex, OneForm, VectorField};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Criteria whose printed target values are contradicted by the exact
/// computation; their lines are reported but do not fail the run.
const DIVERGENT: &[usize] = &[4];

fn e(a: Atom) -> Expr {
    Expr::atom(a)
}

fn ode(s: &str) -> Expr {
    parse_expr(s, &Vocabulary::new(ModelKind::Ode2)).expect("ode2 expression")
}

fn lift<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn u0v1() -> Result<ode2::StandardBasis, String> {
    lift(ode2::standard_basis(&ode("u0*v1")))
}

fn standard_basis_golden() -> Outcome {
    let sb = u0v1()?;
    let (u0, u1, v1) = (ode("u0"), ode("u1"), ode("v1"));
    let checks = [
        ("A", sb.a == u0),
        ("beta", sb.beta == sb.alpha1.sub(&sb.beta0.scale(&u0))),
        ("gamma", sb.gamma == sb.alpha0),
        ("pi0", sb.pi0 == sb.beta.scale(&u0).add(&sb.gamma.scale(&u1))),
        (
            "pi1",
            sb.pi1 == sb.beta.scale(&ode("2*u1")).add(&sb.gamma.scale(&ode("2*u0").mul(&v1))),
        ),
        ("Delta", sb.det == ode("2*u0^2*v1-2*u1^2")),
    ];
    let bad: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    Ok((bad.is_empty(), format!("mismatched: {bad:?}")))
}

fn structure_identities() -> Outcome {
    let mut gen = Gen::new(2);
    let args = ode2::f_args();
    let mut failures = Vec::new();
    for _ in 0..20 {
        let f = gen.poly(&args, 3, 2);
        let sb = lift(ode2::standard_basis(&f))?;
        let d = &sb.diffiety;
        let fp = |a: Atom| f.partial(&a);
        let ld_beta = lift(forms::lie_total(d, &sb.beta, 1))?;
        let r1 = ld_beta.sub(
            &sb.gamma
                .scale(&fp(ode2::u(0)))
                .add(&sb.beta.scale(&fp(ode2::u(1))))
                .add(&sb.beta0.scale(&sb.b)),
        );
        let ld_gamma = lift(forms::lie_total(d, &sb.gamma, 1))?;
        let r2 = ld_gamma.sub(&sb.beta.add(&sb.beta0.scale(&sb.c)));
        let r3 = lift(forms::lie_total(d, &sb.pi0, 1))?.sub(&sb.pi1);
        if !(r1.is_zero() && r2.is_zero() && r3.is_zero()) {
            failures.push(f.text());
        }
    }
    Ok((failures.is_empty(), format!("20 random F, failures {failures:?}")))
}

fn variation_soundness() -> Outcome {
    let sb = u0v1()?;
    let d = sb.diffiety.clone();
    let dd = |x: &Expr| lift(d.total(1, x));
    let mut gen = Gen::new(3);
    let mut cases: Vec<(Expr, Expr)> = ["1", "x", "u0", "u0^2", "v0"]
        .iter()
        .map(|p| (ode(p), Expr::zero()))
        .collect();
    let pargs = ode2::p_args_reduced();
    for _ in 0..3 {
        let p = gen.poly(&pargs, 2, 2);
        let z = gen.poly(&pargs, 1, 1);
        cases.push((p, z));
    }
    let (u0, u1, v1) = (ode("u0"), ode("u1"), ode("v1"));
    let delta = sb.det.clone();
    let mut failures = Vec::new();
    for (p, z) in &cases {
        let (z0, zv) = lift(sb.variation_solution(p))?;
        let dp = dd(p)?;
        // closed form of the solution
        let z0_closed = lift(Expr::int(-2).mul(&u1).mul(p).add(&u0.mul(&dp)).div(&delta))?;
        let zv_closed = lift(dd(&z0_closed)?.div(&u0))?
            .sub(&lift(Expr::int(2).mul(&v1).mul(p).div(&delta))?)
            .add(&lift(u1.mul(&dp).div(&u0.mul(&delta)))?);
        let eq = dd(&dd(&z0)?)?.sub(&v1.mul(&z0)).sub(&u0.mul(&dd(&zv)?));
        let field = lift(sb.variation(p, z))?;
        let report = lift(check_variation(&d, &field, &sb.generating_basis(), 6))?;
        if !(z0 == z0_closed && zv == zv_closed && eq.is_zero() && report.passed()) {
            failures.push(p.text());
        }
    }
    Ok((
        failures.is_empty(),
        format!("{} generators to order 6, failures {failures:?}", cases.len()),
    ))
}

fn symmetry_end_to_end() -> Outcome {
    let sb = u0v1()?;
    let p = ode("u0^2");
    // the conditions as printed: 2u1z + p_u1 = λu0, 2u0v1z + p_u0 = λu1
    let (u0, u1, v1) = (ode("u0"), ode("u1"), ode("v1"));
    let (p_u0, p_u1) = (p.partial(&ode2::u(0)), p.partial(&ode2::u(1)));
    let m = vec![
        vec![Expr::int(2).mul(&u1), u0.neg()],
        vec![Expr::int(2).mul(&u0).mul(&v1), u1.neg()],
    ];
    let sol = diffiety_core::linalg::solve(m, vec![p_u1.neg(), p_u0.neg()]).ok_or("printed system is singular")?;
    let printed_z = lift(ode("-2*u0^2").div(&sb.det))?;
    let printed_l = lift(ode("-4*u0*u1").div(&sb.det))?;
    let printed_consistent = sol[0] == printed_z && sol[1] == printed_l;
    let printed_residual = lift(ode2::symmetry_residual(&sb, &p, &printed_z, &printed_l))?;

    let sys = lift(ode2::symmetry_system(&sb, &p))?;
    let z = sys.solved("z").cloned().ok_or("no z")?;
    let lambda = sys.solved("lambda").cloned().ok_or("no lambda")?;
    let residual = lift(ode2::symmetry_residual(&sb, &p, &z, &lambda))?;
    let field = lift(sb.variation(&p, &z))?;
    let verdict = lift(group_check(&sb.diffiety, &field, std::slice::from_ref(&sb.pi0), 0))?;
    let pass = z == printed_z && lambda == printed_l && residual.is_zero() && verdict == GroupVerdict::Generates;
    Ok((
        pass,
        format!(
            "derived z = {}, lambda = {}, residual zero = {}, group check = {:?}; printed values solve the printed conditions = {}, their residual zero = {}",
            z,
            lambda,
            residual.is_zero(),
            verdict,
            printed_consistent,
            printed_residual.is_zero()
        ),
    ))
}

fn determining_comparison() -> Outcome {
    let sb = u0v1()?;
    let ds = lift(ode2::determining(&sb))?;
    let cmp = lift(ode2::compare_residual(&ds))?;
    let again = lift(ode2::compare_residual(&lift(ode2::determining(&sb))?))?;
    let p = ode2::formal_p(ode2::p_args_reduced());
    let pd = |a: Atom| p.partial(&a);
    let (u0, u1) = (ode("u0"), ode("u1"));
    // β0 coefficient of 𝓛_Zπ0 times Δ, by hand
    let hand = u0
        .mul(&u0)
        .mul(&pd(ode2::x()).add(&u1.mul(&pd(ode2::u(0)))))
        .add(&u1.mul(&u1).mul(&u0.mul(&pd(ode2::u(1))).add(&pd(ode2::v(0)))))
        .sub(&Expr::int(2).mul(&u0).mul(&u1).mul(&p));
    let hand_ok = ode2::Comparison::new(cmp.derived.clone(), hand).map_err(|e| e.to_string())?.matches();
    let sat = lift(ds.instantiate("p", &ode("u0^2")))?.is_satisfied();
    let verdict = if cmp.matches() {
        "exact match with the printed equation".to_string()
    } else {
        format!(
            "discrepancy: derived {} = 0 is not proportional to the printed {} = 0",
            cmp.derived, cmp.printed
        )
    };
    Ok((
        cmp == again && hand_ok && sat,
        format!("{verdict}; deterministic = {}; p = u0^2 satisfies = {sat}", cmp == again),
    ))
}

fn pde(s: &str) -> Expr {
    parse_expr(s, &Vocabulary::new(ModelKind::Pde1)).expect("pde1 expression")
}

fn pde_reduction() -> Outcome {
    let generic = lift(pde1::reduce(&pde1::formal_f()))?;
    let mut gen = Gen::new(6);
    let args = pde1::f_args();
    let mut random_ok = true;
    for _ in 0..10 {
        let f = gen.poly(&args, 3, 2);
        random_ok &= lift(pde1::reduce(&f))?.residual.is_zero();
    }
    let ds = lift(pde1::determining(&pde1::formal_f()))?;
    let a = "(x,y,u0,v,u1,vx,vy)";
    let expected = [
        ("beta:alpha1", format!("b_u1{a}")),
        ("beta:betax", format!("z1{a}+b_vx{a}")),
        ("beta:betay", format!("z2{a}+b_vy{a}")),
        ("gamma:betay", format!("b{a}*F_vy_vy{a}+c_vy{a}")),
        ("gamma:alpha1", format!("z1{a}+z2{a}*F_u1{a}+b{a}*F_vy_u1{a}+c_u1{a}")),
        ("gamma:betax", format!("-z1{a}*F_vy{a}+z2{a}*F_vx{a}+b{a}*F_vy_vx{a}+c_vx{a}")),
    ];
    let mut bad = Vec::new();
    for (label, text) in &expected {
        let want = pde(text);
        match ds.equation(label) {
            Some(got) if *got == want || *got == want.neg() => {}
            _ => bad.push(*label),
        }
    }
    let extra = ds.equations.len() - expected.len();
    let ok = generic.residual.is_zero() && random_ok && bad.is_empty() && extra == 1 && ds.equation("variation").is_some();
    Ok((
        ok,
        format!(
            "generic residual zero = {}, 10 random F = {random_ok}, relations mismatched {bad:?}, plus the variation requirement",
            generic.residual.is_zero()
        ),
    ))
}

fn jets(m: usize, n: usize) -> Arc<Diffiety> {
    Diffiety::free(JetSpec::jets(m, n))
}

fn w(d: &Diffiety, j: usize, dirs: &[u8]) -> Expr {
    e(d.coord(&format!("w{j}"), MultiIndex::new(dirs.to_vec())))
}

fn lie_backlund() -> Outcome {
    let d = jets(2, 2);
    let mut gen = Gen::new(7);
    let point: Vec<Atom> = vec![d.x(1), d.x(2), d.coord("w1", MultiIndex::empty()), d.coord("w2", MultiIndex::empty())];
    let mut point_ok = true;
    for _ in 0..3 {
        let z: Vec<Expr> = (0..2).map(|_| gen.poly(&point, 2, 2)).collect();
        let zj: Vec<Expr> = (0..2).map(|_| gen.poly(&point, 2, 2)).collect();
        let field = lift(VectorField::from_point_generators(&d, z, zj))?;
        for l in 0..=1 {
            point_ok &= lift(order_preservation_check(&d, &field, l))?
                == OrderVerdict::Preserved { point_form: Some(true) };
        }
    }
    let shifted = lift(VectorField::evolutionary(&d, vec![w(&d, 2, &[1]), Expr::zero()]))?;
    let violated = matches!(lift(order_preservation_check(&d, &shifted, 0))?, OrderVerdict::Violated { .. });

    let d1 = jets(1, 1);
    let first: Vec<Atom> = vec![d1.x(1), d1.coord("w1", MultiIndex::empty()), d1.coord("w1", MultiIndex::new(vec![1]))];
    let mut contact_ok = true;
    for _ in 0..3 {
        let phi = gen.poly(&first, 2, 2);
        let field = lift(VectorField::contact_from_characteristic(&d1, &phi))?;
        contact_ok &= matches!(lift(contact_check(&d1, &field))?, ContactVerdict::Contact(_));
    }
    let square = lift(VectorField::evolutionary(&d1, vec![w(&d1, 1, &[1]).mul(&w(&d1, 1, &[1]))]))?;
    let second = lift(VectorField::evolutionary(&d1, vec![w(&d1, 1, &[1, 1])]))?;
    let rejected = matches!(lift(contact_check(&d1, &square))?, ContactVerdict::NotContact { .. })
        && matches!(lift(contact_check(&d1, &second))?, ContactVerdict::NotContact { .. });
    Ok((
        point_ok && violated && contact_ok && rejected,
        format!("point fields preserved = {point_ok}, w2_1 generator violated = {violated}, contact fields accepted = {contact_ok}, w1^2 and w11 generators rejected = {rejected}"),
    ))
}

fn random_evolutionary(gen: &mut Gen, d: &Arc<Diffiety>) -> Result<Arc<VectorField>, String> {
    let mut vars = d.indep_atoms();
    for fam in d.families() {
        vars.push(d.coord(&fam.name, MultiIndex::empty()));
        for i in 1..=d.n() {
            vars.push(d.coord(&fam.name, MultiIndex::repeat(i, 1)));
        }
    }
    let phi = d.families().iter().map(|_| gen.poly(&vars, 2, 2)).collect();
    lift(VectorField::evolutionary(d, phi))
}

fn bracket_closure() -> Outcome {
    let mut gen = Gen::new(8);
    let mut closed = true;
    for (m, n) in [(1, 1), (2, 2)] {
        let d = jets(m, n);
        let basis: Vec<OneForm> = (1..=m)
            .map(|j| forms::contact_form(&d, &w(&d, j, &[])))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let x = random_evolutionary(&mut gen, &d)?;
            let y = random_evolutionary(&mut gen, &d)?;
            closed &= lift(check_variation(&d, &commutator(&x, &y), &basis, 4))?.passed();
        }
    }
    let d = jets(1, 1);
    let w0 = w(&d, 1, &[]);
    let sq = w0.mul(&w0);
    let value = lift(poisson_bracket(&sq, &w0, &w0, &d))?;
    let mut antisymmetric = true;
    let vars = vec![d.coord("w1", MultiIndex::empty()), d.coord("w1", MultiIndex::new(vec![1]))];
    for _ in 0..5 {
        let (f, g) = (gen.poly(&vars, 2, 2), gen.poly(&vars, 2, 2));
        let fg = lift(poisson_bracket(&f, &g, &w0, &d))?;
        let gf = lift(poisson_bracket(&g, &f, &w0, &d))?;
        antisymmetric &= fg == gf.neg();
    }
    Ok((
        closed && antisymmetric && value == sq.neg(),
        format!("commutators are variations = {closed}, antisymmetric = {antisymmetric}, {{w^2, w}} = {value}"),
    ))
}

fn involutivity() -> Outcome {
    let d = jets(1, 2);
    let basis: Vec<(Atom, OneForm)> = lift(forms::contact_basis(&d, 1))?;
    let forms_only: Vec<OneForm> = basis.iter().map(|(_, f)| f.clone()).collect();
    let mut ok = true;
    let mut sigmas = Vec::new();
    for seed in 0..3 {
        let fam = lift(involutive::for_level(&d, 1, seed))?;
        ok &= fam.stable && fam.verified && fam.sigma == vec![2, 1];
        // independent exact check of the selected images
        let mut span = forms_only.clone();
        for (step, chosen) in fam.selected.iter().enumerate() {
            for &k in chosen {
                let img = lift(forms::lie_total(&d, &forms_only[k], fam.directions[step]))?;
                ok &= represent(&img, &span, false) == Representation::NotInSpan;
                span.push(img);
            }
        }
        sigmas.push(fam.sigma);
    }
    Ok((ok, format!("sigma per seed {sigmas:?}")))
}

fn kdv_hierarchy() -> Outcome {
    let kv = |s: &str| parse_expr(s, &Vocabulary::new(ModelKind::Kdv)).expect("kdv expression");
    let h = lift(kdv::hierarchy(2))?;
    let coeffs = h.b == vec![kv("1"), kv("-q0/2"), kv("(q2+3*q0^2)/8")];
    let q0 = lift(kdv::hierarchy(0))?.q == kv("q1");
    let dq = kdv::q_derivation();
    let h1 = lift(kdv::hierarchy(1))?;
    let q1 = h1.q == lift(dq.apply(&kv("q2+3*q0^2")))?.scale(&Q::new((-1).into(), 4.into()));
    let mut flows = true;
    for level in 0..=2 {
        flows &= lift(kdv::verify_flow(&lift(kdv::hierarchy(level))?, 4))?.passed();
    }
    let h3 = lift(kdv::hierarchy(3))?;
    let f3 = lift(kdv::verify_flow(&h3, 4))?.passed();
    let cmp = lift(kdv::compare_third_entry(&h.q))?;
    let single = cmp.single == Some(Q::new(1.into(), 16.into()));
    let factored = lift(kdv::proportional_form(&h3.q))?
        .map(|(c, g)| format!("{} D({})", Expr::rational(c), g))
        .unwrap_or_else(|| h3.q.to_string());
    Ok((
        coeffs && q0 && q1 && flows && f3 && single && cmp.double.is_none(),
        format!(
            "B0..B2 = {coeffs}, Q0 = {q0}, Q1 = {q1}, flows to order 4 = {}; level-2 flow is 1/16 D of the printed third entry (single derivative, the printed double derivative is not proportional); level-3 flow = {factored}",
            flows && f3
        ),
    ))
}

fn adjoint_probe() -> Outcome {
    let sb = u0v1()?;
    let d = &sb.diffiety;
    let phis = [ode("u0/u1"), ode("u0*v0-u1*ln(u0)"), ode("2*x-u0*u1")];
    let dphi: Vec<OneForm> = phis
        .iter()
        .map(|p| forms::differential(d, p))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let show = |r: Representation| match r {
        Representation::Coefficients(c) => {
            let c: Vec<String> = c.iter().map(Expr::text).collect();
            format!("coefficients {c:?}")
        }
        Representation::NotInSpan => "NotInSpan".to_string(),
    };
    let verdict = format!(
        "{}; modulo dx: {}",
        show(represent(&sb.pi0, &dphi, false)),
        show(represent(&sb.pi0, &dphi, true))
    );
    Ok((true, format!("pi0 against d(u0/u1), d(u0v0-u1 ln u0), d(2x-u0u1): {verdict}")))
}

fn cli_round_trip() -> Outcome {
    let dir = env!("CARGO_MANIFEST_DIR");
    let run = |args: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_diffiety"))
            .args(args)
            .current_dir(dir)
            .output()
            .map_err(|e| e.to_string())?;
        Ok(out.stdout)
    };
    let golden = |name: &str| std::fs::read(format!("{dir}/tests/golden/{name}")).map_err(|e| e.to_string());
    let sb = run(&["--model", "tests/golden/ode2_u0v1.model", "standard-basis"])? == golden("standard_basis_u0v1.txt")?;
    let kd = run(&["kdv", "--levels", "2"])? == golden("kdv_levels2.txt")?;
    let vocab = Vocabulary::new(ModelKind::Ode2);
    let g = e(Atom::func("G", vec![ode2::x(), ode2::u(0)]));
    let leaves = [
        ode("x"),
        ode("u0"),
        ode("u1"),
        ode("v0"),
        ode("v1"),
        ode("v2"),
        ode("ln(u0)"),
        g.clone(),
        g.partial(&ode2::u(0)),
    ];
    let mut gen = Gen::new(12);
    let mut failures = 0;
    for _ in 0..200 {
        let ex = gen.expr(&leaves, 3);
        if parse_expr(&ex.text(), &vocab).ok() != Some(ex) {
            failures += 1;
        }
    }
    Ok((
        sb && kd && failures == 0,
        format!("standard-basis golden = {sb}, kdv golden = {kd}, 200 round trips with {failures} failures"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("standard basis golden", standard_basis_golden),
        ("structure identities", structure_identities),
        ("variation soundness", variation_soundness),
        ("symmetry end to end", symmetry_end_to_end),
        ("determining equation comparison", determining_comparison),
        ("pde reduction identity", pde_reduction),
        ("order preservation and contact", lie_backlund),
        ("bracket closure", bracket_closure),
        ("involutivity", involutivity),
        ("kdv hierarchy", kdv_hierarchy),
        ("adjoint probe", adjoint_probe),
        ("cli round trip", cli_round_trip),
    ];
    // numeric arguments select criteria
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let n = k + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(err) => (false, format!("error: {err}")),
        };
        let status = if pass { "PASS" } else { "FAIL" };
        let note = if !pass && DIVERGENT.contains(&n) { " (documented divergence)" } else { "" };
        println!(
            "criterion {n:>2} {status} {name}{note} [{:.1}s]: {detail}",
            start.elapsed().as_secs_f64()
        );
        if !pass && !DIVERGENT.contains(&n) {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
