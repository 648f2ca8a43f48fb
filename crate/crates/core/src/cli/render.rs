//! Text, LaTeX and JSON presentations of command results.

use serde_json::{json, Value};

use crate::expr::{Atom, Expr, Monomial, Poly, Q};
use crate::forms::{render_terms, OneForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

/// A linear combination over named forms, e.g. `u0*beta+u1*gamma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Named {
    pub terms: Vec<(Expr, String)>,
}

impl Named {
    pub fn new(coeffs: &[Expr], names: &[&str]) -> Self {
        Named {
            terms: coeffs
                .iter()
                .zip(names)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, n)| (c.clone(), n.to_string()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Expr(Expr),
    Form(OneForm),
    Named(Named),
    /// `factor · 𝒟(inner)` for a total `x`-derivative.
    TotalDerivative { factor: Expr, inner: Expr },
    Text(String),
    Check(bool),
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub model: String,
    pub lines: Vec<(String, Item)>,
    /// False when a verification inside the command failed.
    pub ok: bool,
}

impl Report {
    pub fn new(command: &str, model: &str) -> Self {
        Report {
            command: command.into(),
            model: model.into(),
            lines: Vec::new(),
            ok: true,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, item: Item) {
        self.lines.push((name.into(), item));
    }

    pub fn expr(&mut self, name: impl Into<String>, e: &Expr) {
        self.push(name, Item::Expr(e.clone()));
    }

    pub fn text(&mut self, name: impl Into<String>, s: impl Into<String>) {
        self.push(name, Item::Text(s.into()));
    }

    /// Record a check; a failing check makes the command exit with status 2.
    pub fn check(&mut self, name: impl Into<String>, passed: bool) {
        self.ok &= passed;
        self.push(name, Item::Check(passed));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_lines(false),
            Format::Latex => self.render_lines(true),
            Format::Json => {
                let lines: Vec<Value> = self
                    .lines
                    .iter()
                    .map(|(n, it)| json!({"name": n, "value": item_json(it)}))
                    .collect();
                let v = json!({
                    "command": self.command,
                    "model": self.model,
                    "ok": self.ok,
                    "results": lines,
                });
                let mut s = serde_json::to_string_pretty(&v).expect("serializable");
                s.push('\n');
                s
            }
        }
    }

    fn render_lines(&self, latex: bool) -> String {
        let mut out = String::new();
        for (name, item) in &self.lines {
            let name = if latex { latex_name(name) } else { name.clone() };
            let body = match item {
                Item::Expr(e) => {
                    if latex {
                        e.latex()
                    } else {
                        e.text()
                    }
                }
                Item::Form(f) => {
                    if latex {
                        f.latex()
                    } else {
                        f.text()
                    }
                }
                Item::Named(n) => render_named(n, latex),
                Item::TotalDerivative { factor, inner } => total_derivative(factor, inner, latex),
                Item::Text(s) => s.clone(),
                Item::Check(b) => if *b { "pass" } else { "FAIL" }.to_string(),
            };
            out.push_str(&format!("{name} = {body}\n"));
        }
        out
    }
}

fn total_derivative(factor: &Expr, inner: &Expr, latex: bool) -> String {
    let (op, body) = if latex {
        ("\\mathcal{D}", format!("\\left({}\\right)", inner.latex()))
    } else {
        ("D", format!("({})", inner.text()))
    };
    if factor.is_one() {
        format!("{op}{body}")
    } else if *factor == Expr::int(-1) {
        format!("-{op}{body}")
    } else if latex {
        format!("{}{op}{body}", factor.latex())
    } else {
        format!("{}*{op}{body}", factor.text())
    }
}

pub fn render_named(n: &Named, latex: bool) -> String {
    render_terms(
        n.terms.iter().map(|(c, name)| {
            let shown = if latex { latex_name(name) } else { name.clone() };
            (c, shown)
        }),
        latex,
    )
}

const GREEK: [&str; 8] = ["alpha", "beta", "gamma", "pi", "lambda", "omega", "sigma", "mu"];

/// `beta0` ↦ `\beta_0`, `pi1` ↦ `\pi_1`, `Delta` ↦ `\Delta`, others verbatim.
pub fn latex_name(name: &str) -> String {
    if name == "Delta" {
        return "\\Delta".into();
    }
    let stem_alpha: String = name.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
    let rest = &name[stem_alpha.len()..];
    if GREEK.contains(&stem_alpha.as_str()) {
        if rest.is_empty() {
            return format!("\\{stem_alpha}");
        }
        if rest.chars().all(|c| c.is_ascii_alphanumeric()) {
            return format!("\\{stem_alpha}_{{{rest}}}");
        }
    }
    name.to_string()
}

fn item_json(item: &Item) -> Value {
    match item {
        Item::Expr(e) => json!({"text": e.text(), "tree": expr_json(e)}),
        Item::Form(f) => json!({
            "text": f.text(),
            "terms": f.terms().map(|(h, g)| json!({"d": h.text(), "coeff": expr_json(g)})).collect::<Vec<_>>(),
        }),
        Item::Named(n) => json!({
            "text": render_named(n, false),
            "terms": n.terms.iter().map(|(c, name)| json!({"form": name, "coeff": expr_json(c)})).collect::<Vec<_>>(),
        }),
        Item::TotalDerivative { factor, inner } => json!({
            "text": total_derivative(factor, inner, false),
            "factor": expr_json(factor),
            "derivative_of": expr_json(inner),
        }),
        Item::Text(s) => Value::String(s.clone()),
        Item::Check(b) => Value::Bool(*b),
    }
}

fn rational_json(c: &Q) -> Value {
    let s = if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    };
    json!({"op": "const", "value": s})
}

fn atom_json(a: &Atom) -> Value {
    match a {
        Atom::Fn(f) => json!({
            "op": "fn",
            "name": &*f.name,
            "derivs": f.derivs.iter().map(|&d| f.args[d as usize].text()).collect::<Vec<_>>(),
            "args": f.args.iter().map(atom_json).collect::<Vec<_>>(),
        }),
        Atom::Elem(e) => json!({"op": e.kind.name(), "args": [atom_json(&e.arg)]}),
        Atom::Param(p) => json!({"op": "param", "name": &**p}),
        _ => json!({"op": "coord", "name": a.text()}),
    }
}

fn monomial_json(m: &Monomial, c: &Q) -> Value {
    let mut args = Vec::new();
    if !(c == &Q::from_integer(1.into())) || m.is_one() {
        args.push(rational_json(c));
    }
    for (a, e) in m.factors() {
        let base = atom_json(a);
        if *e == 1 {
            args.push(base);
        } else {
            args.push(json!({"op": "pow", "args": [base, {"op": "const", "value": e.to_string()}]}));
        }
    }
    if args.len() == 1 {
        args.pop().expect("one factor")
    } else {
        json!({"op": "mul", "args": args})
    }
}

fn poly_json(p: &Poly) -> Value {
    if p.is_zero() {
        return json!({"op": "const", "value": "0"});
    }
    let mut terms: Vec<Value> = p.terms().rev().map(|(m, c)| monomial_json(m, c)).collect();
    if terms.len() == 1 {
        terms.pop().expect("one term")
    } else {
        json!({"op": "add", "args": terms})
    }
}

/// Nested `{op, args}` tree of an expression.
pub fn expr_json(e: &Expr) -> Value {
    if e.denom().is_one() {
        poly_json(e.numer())
    } else {
        json!({"op": "div", "args": [poly_json(e.numer()), poly_json(e.denom())]})
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::NameStyle;
    use crate::jet::MultiIndex;

    #[test]
    fn zero_json() {
        assert_eq!(expr_json(&Expr::zero()), json!({"op": "const", "value": "0"}));
    }

    #[test]
    fn names_to_latex() {
        assert_eq!(latex_name("beta0"), "\\beta_{0}");
        assert_eq!(latex_name("gamma"), "\\gamma");
        assert_eq!(latex_name("A"), "A");
    }

    #[test]
    fn named_combination() {
        let u = |r| Expr::atom(Atom::jet("u", MultiIndex::repeat(1, r), NameStyle::Numbered));
        let n = Named::new(&[u(0), u(1)], &["beta", "gamma"]);
        assert_eq!(render_named(&n, false), "u0*beta+u1*gamma");
        assert_eq!(render_named(&n, true), "u_0\\beta+u_1\\gamma");
    }
}
