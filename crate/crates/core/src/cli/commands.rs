//! Pipeline commands over a parsed model.

use crate::cli::parse::{parse_expr, Model, ModelKind, ParseError};
use crate::cli::render::{Item, Named, Report};
use crate::error::Error;
use crate::expr::{Atom, Expr};
use crate::fields::{check_variation, poisson_bracket, VectorField};
use crate::forms::{self, Representation};
use crate::jet::{Diffiety, JetSpec};
use crate::kdv;
use crate::reduce::{involutive, ode2, order, pde1, pencil, DeterminingSystem};

/// Why a command could not produce a report.
#[derive(Debug)]
pub enum Failure {
    /// Bad model, flag or expression text (exit status 1).
    Usage(String),
    /// The computation itself failed (exit status 2).
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Usage(format!("parse error at {e}"))
    }
}

pub type Outcome = Result<Report, Failure>;

fn require_kind(model: &Model, ok: bool, what: &str) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "this command needs a {what} model, got `{}`",
            model.kind.name()
        )))
    }
}

fn definition(model: &Model, name: &str) -> Result<Expr, Failure> {
    model
        .definition(name)
        .cloned()
        .ok_or_else(|| Failure::Usage(format!("model does not define `{name}`")))
}

fn expr(model: &Model, text: &str) -> Result<Expr, Failure> {
    Ok(parse_expr(text, &model.vocab)?)
}

fn named_in(w: &forms::OneForm, basis: &[forms::OneForm], names: &[&str]) -> Item {
    match forms::represent(w, basis, false) {
        Representation::Coefficients(c) => Item::Named(Named::new(&c, names)),
        Representation::NotInSpan => Item::Form(w.clone()),
    }
}

fn ode2_basis(model: &Model) -> Result<ode2::StandardBasis, Failure> {
    require_kind(model, model.kind == ModelKind::Ode2, "ode2")?;
    Ok(ode2::standard_basis(&definition(model, "F")?)?)
}

fn classification_text(c: ode2::Classification) -> &'static str {
    match c {
        ode2::Classification::Controllable => "controllable",
        ode2::Classification::DegenerateFirstOrder => "degenerate (first order)",
        ode2::Classification::DegenerateSecondOrder => "degenerate (second order)",
    }
}

pub fn standard_basis(model: &Model) -> Outcome {
    let sb = ode2_basis(model)?;
    let mut r = Report::new("standard-basis", &model.kind.name());
    r.expr("F", &sb.f);
    r.expr("A", &sb.a);
    r.expr("B", &sb.b);
    r.expr("C", &sb.c);
    r.expr("M", &sb.m);
    r.expr("N", &sb.n);
    r.expr("Delta", &sb.det);
    let coords = [
        sb.alpha0.clone(),
        sb.alpha1.clone(),
        sb.beta0.clone(),
        sb.beta_r(1)?,
    ];
    let names = ["alpha0", "alpha1", "beta0", "beta1"];
    r.push("alpha", named_in(&sb.alpha, &coords, &names));
    r.push("beta", named_in(&sb.beta, &coords, &names));
    r.push("gamma", named_in(&sb.gamma, &coords, &names));
    r.push("pi0", Item::Named(Named::new(&[sb.c.clone(), sb.b.neg()], &["beta", "gamma"])));
    r.push("pi1", Item::Named(Named::new(&[sb.m.clone(), sb.n.clone()], &["beta", "gamma"])));
    r.text("classification", classification_text(sb.classification));
    let identities = sb.identity_residuals()?.iter().all(|(_, f)| f.is_zero());
    r.check("identities", identities);
    if sb.classification == ode2::Classification::Controllable {
        let dict = sb.dictionary()?;
        let pis: Vec<String> = (0..8).map(|k| format!("pi{k}")).collect();
        let pis: Vec<&str> = pis.iter().map(String::as_str).collect();
        for (name, c) in [
            ("beta", &dict.beta),
            ("gamma", &dict.gamma),
            ("beta0", &dict.beta0),
            ("alpha0", &dict.alpha0),
            ("alpha1", &dict.alpha1),
        ] {
            r.push(format!("{name} (in pi)"), Item::Named(Named::new(c, &pis[..c.len()])));
        }
        r.check("dictionary round trip", sb.dictionary_roundtrip()?);
    }
    Ok(r)
}

pub fn variation(model: &Model, p: &str, z: &str, order_k: usize) -> Outcome {
    let sb = ode2_basis(model)?;
    let (p, z) = (expr(model, p)?, expr(model, z)?);
    let field = sb.variation(&p, &z)?;
    let (a0, b0) = sb.variation_solution(&p)?;
    let mut r = Report::new("variation", &model.kind.name());
    r.expr("p", &p);
    r.expr("z", &z);
    r.expr("alpha0(Z)", &a0);
    r.expr("beta0(Z)", &b0);
    r.expr("Zx", &field.component(&ode2::x())?);
    r.expr("Zu0", &field.component(&ode2::u(0))?);
    r.expr("Zv0", &field.component(&ode2::v(0))?);
    let report = check_variation(&sb.diffiety, &field, &sb.generating_basis(), order_k)?;
    r.text("conditions checked", report.entries.len().to_string());
    if let Some(f) = report.first_failure() {
        r.expr("first nonzero residual", &f.residual);
    }
    r.check(format!("variation to order {order_k}"), report.passed());
    Ok(r)
}

fn push_system(r: &mut Report, ds: &DeterminingSystem, solved: &[&str]) {
    for (name, args) in &ds.unknowns {
        let args: Vec<String> = args.iter().map(Atom::text).collect();
        r.text(format!("unknown {name}"), format!("{name}({})", args.join(",")));
    }
    for eq in ds.nontrivial() {
        r.expr(format!("eq[{}]", eq.label), &eq.expr);
    }
    for name in solved {
        if let Some(e) = ds.solved(name) {
            r.expr(*name, e);
        }
    }
}

pub fn determining(model: &Model, evolutionary: bool, candidate: Option<&str>) -> Outcome {
    let sb = ode2_basis(model)?;
    let full = ode2::determining(&sb)?;
    let ds = if evolutionary {
        ode2::evolutionary_restriction(&full)?
    } else {
        full.clone()
    };
    let mut r = Report::new(
        if evolutionary { "determining --evolutionary" } else { "determining" },
        &model.kind.name(),
    );
    push_system(&mut r, &ds, &["z", "lambda"]);
    let u0v1 = Expr::atom(ode2::u(0)).mul(&Expr::atom(ode2::v(1)));
    if !evolutionary && sb.f == u0v1 {
        let cmp = ode2::compare_residual(&full)?;
        r.expr("printed residual", &cmp.printed);
        r.text(
            "comparison",
            match &cmp.factor {
                Some(f) => format!("match (factor {})", f.text()),
                None => "discrepancy (not proportional)".to_string(),
            },
        );
    }
    if let Some(c) = candidate {
        let p = expr(model, c)?;
        let inst = ds.instantiate("p", &p)?;
        let z = inst.solved("z").cloned().unwrap_or_default();
        let lambda = inst.solved("lambda").cloned().unwrap_or_default();
        r.expr("candidate p", &p);
        r.expr("candidate z", &z);
        r.expr("candidate lambda", &lambda);
        for eq in inst.failures() {
            r.expr(format!("candidate residual[{}]", eq.label), &eq.expr);
        }
        r.check("candidate satisfies system", inst.is_satisfied());
        let end = ode2::symmetry_residual(&sb, &p, &z, &lambda)?;
        r.check("L_Z pi0 = lambda pi0", end.is_zero());
    }
    Ok(r)
}

fn pde_model(model: &Model) -> Result<Expr, Failure> {
    require_kind(model, model.kind == ModelKind::Pde1, "pde1")?;
    definition(model, "F")
}

pub fn pde_reduce(model: &Model) -> Outcome {
    let red = pde1::reduce(&pde_model(model)?)?;
    let mut r = Report::new("pde-reduce", &model.kind.name());
    r.expr("F", &red.f);
    r.expr("A", &red.a);
    r.expr("B", &red.b);
    let fvy = red.f.partial(&pde1::v(&[2]));
    r.push("gamma", Item::Named(Named::new(&[Expr::one(), fvy.neg()], &["alpha", "beta"])));
    r.check("identity", red.residual.is_zero());
    Ok(r)
}

pub fn pde_determining(model: &Model, evolutionary: bool) -> Outcome {
    let f = pde_model(model)?;
    if evolutionary {
        let ev = pde1::evolutionary(&f)?;
        let mut r = Report::new("pde-determining --evolutionary", &model.kind.name());
        push_system(&mut r, &ev.system, &[]);
        r.check("frobenius compatible", ev.compatible);
        return Ok(r);
    }
    let ds = pde1::determining(&f)?;
    let mut r = Report::new("pde-determining", &model.kind.name());
    push_system(&mut r, &ds, &[]);
    Ok(r)
}

pub fn pencil_cmd(model: &Model, a: &str, z1: Option<&str>, z2: Option<&str>) -> Outcome {
    require_kind(model, model.kind == ModelKind::Pencil, "pencil")?;
    let n = model.option_usize("n").unwrap_or(2);
    let a = expr(model, a)?;
    let mut r = Report::new("pencil", &model.kind.name());
    r.expr("a", &a);
    match (z1, z2) {
        (Some(z1), Some(z2)) => {
            let (z1, z2) = (expr(model, z1)?, expr(model, z2)?);
            let ds = pencil::check(n, &a, &z1, &z2)?;
            for (name, e) in &ds.solved {
                r.expr(name.clone(), e);
            }
            for eq in ds.failures() {
                r.expr(format!("residual[{}]", eq.label), &eq.expr);
            }
            r.check("conditions", ds.is_satisfied());
            r.check("pencil preserved", pencil::verify(n, &a, &z1, &z2)?);
        }
        (None, None) => {
            let ds = pencil::conditions_m2(n, &a)?;
            push_system(&mut r, &ds, &[]);
            for (name, e) in &ds.solved {
                r.expr(name.clone(), e);
            }
        }
        _ => return Err(Failure::Usage("--z1 and --z2 go together".into())),
    }
    Ok(r)
}

fn jets(model: &Model) -> Result<std::sync::Arc<Diffiety>, Failure> {
    match model.kind {
        ModelKind::Jets { m, n } => Ok(Diffiety::free(JetSpec::jets(m, n))),
        _ => Err(Failure::Usage(format!(
            "this command needs a jets model, got `{}`",
            model.kind.name()
        ))),
    }
}

pub fn involutive_cmd(model: &Model, level: usize, seed: u64) -> Outcome {
    let d = jets(model)?;
    let fam = involutive::for_level(&d, level, seed)?;
    let names: Vec<String> = forms::contact_basis(&d, level)?
        .iter()
        .map(|(a, _)| a.text())
        .collect();
    let list = |v: &[usize]| {
        let s: Vec<String> = v.iter().map(ToString::to_string).collect();
        format!("({})", s.join(", "))
    };
    let mut r = Report::new("involutive", &model.kind.name());
    r.text("level", level.to_string());
    r.text("sigma", list(&fam.sigma));
    for (step, chosen) in fam.selected.iter().enumerate() {
        let s: Vec<String> = chosen.iter().map(|&k| format!("omega[{}]", names[k])).collect();
        r.text(format!("step {}", fam.directions[step]), s.join(", "));
    }
    for t in &fam.trials {
        r.text(format!("trial seed {}", t.seed), list(&t.sigma));
    }
    r.check("stable", fam.stable);
    r.check("exact independence", fam.verified);
    Ok(r)
}

pub fn kdv_cmd(model: &Model, levels: usize, order_k: usize) -> Outcome {
    require_kind(model, model.kind == ModelKind::Kdv, "kdv")?;
    let iso = kdv::build_isospectral()?;
    let mut r = Report::new("kdv", &model.kind.name());
    r.check("standard basis", iso.verified());
    let top = kdv::hierarchy(levels)?;
    for (k, b) in top.b.iter().enumerate() {
        r.expr(format!("B{k}"), b);
    }
    r.expr("A", &top.a);
    for level in 0..=levels {
        let h = if level == levels { top.clone() } else { kdv::hierarchy(level)? };
        r.expr(format!("Q{level}"), &h.q);
        if let Some((c, g)) = kdv::proportional_form(&h.q)? {
            r.push(
                format!("Q{level} factored"),
                Item::TotalDerivative {
                    factor: Expr::rational(c),
                    inner: g,
                },
            );
        }
        if level == 2 {
            let cmp = kdv::compare_third_entry(&h.q)?;
            let show = |c: &Option<crate::expr::Q>| c.as_ref().map_or("not proportional".to_string(), |c| format!("factor {}", Expr::rational(c.clone()).text()));
            r.text("printed third entry, single derivative", show(&cmp.single));
            r.text("printed third entry, double derivative", show(&cmp.double));
        }
        let flow = kdv::verify_flow(&h, order_k)?;
        r.check(format!("flow {level} to order {order_k}"), flow.passed());
    }
    Ok(r)
}

pub fn bracket(model: &Model, f_expr: &str, g_expr: &str, f: &str) -> Outcome {
    let d = jets(model)?;
    let (fv, gv, fc) = (expr(model, f_expr)?, expr(model, g_expr)?, expr(model, f)?);
    let b = poisson_bracket(&fv, &gv, &fc, &d)?;
    let back = poisson_bracket(&gv, &fv, &fc, &d)?;
    let mut r = Report::new("bracket", &model.kind.name());
    r.expr("F", &fv);
    r.expr("G", &gv);
    r.expr("{F,G}", &b);
    r.check("antisymmetry", b.add(&back).is_zero());
    Ok(r)
}

pub fn check_point(model: &Model, l: usize) -> Outcome {
    let d = jets(model)?;
    let get = |name: String| model.definition(&name).cloned().unwrap_or_default();
    let z: Vec<Expr> = (1..=d.n()).map(|i| get(format!("zx{i}"))).collect();
    let zj: Vec<Expr> = (1..=d.families().len()).map(|j| get(format!("zw{j}"))).collect();
    let field = VectorField::from_point_generators(&d, z, zj)?;
    let verdict = order::order_preservation_check(&d, &field, l)?;
    let mut r = Report::new("check-point", &model.kind.name());
    r.text("level", l.to_string());
    match &verdict {
        order::OrderVerdict::Preserved { point_form } => {
            if let Some(p) = point_form {
                r.text("point form", if *p { "yes" } else { "no" });
            }
        }
        order::OrderVerdict::Violated { form, image } => {
            r.text("witness", format!("omega[{}]", form.text()));
            r.push("image", Item::Form(image.clone()));
        }
    }
    r.check("order preserved", verdict.preserved());
    Ok(r)
}
