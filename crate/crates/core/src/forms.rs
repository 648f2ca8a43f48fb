//! One-forms over coordinate differentials and their Lie derivatives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::Result;
use crate::expr::{Atom, Expr};
use crate::fields::VectorField;
use crate::jet::Diffiety;
use crate::linalg;

/// `Σ g_h dh` over coordinate differentials `dh` (`dx_i`, `dw^j_I`, `dλ`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OneForm {
    terms: BTreeMap<Atom, Expr>,
}

impl OneForm {
    pub fn zero() -> Self {
        OneForm::default()
    }

    /// The bare differential `dh` of a coordinate.
    pub fn d(h: Atom) -> Self {
        OneForm::term(h, Expr::one())
    }

    pub fn term(h: Atom, g: Expr) -> Self {
        let mut f = OneForm::zero();
        f.add_term(h, g);
        f
    }

    pub fn add_term(&mut self, h: Atom, g: Expr) {
        if g.is_zero() {
            return;
        }
        match self.terms.get_mut(&h) {
            Some(c) => {
                *c = c.add(&g);
                if c.is_zero() {
                    self.terms.remove(&h);
                }
            }
            None => {
                self.terms.insert(h, g);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, h: &Atom) -> Expr {
        self.terms.get(h).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Atom, &Expr)> {
        self.terms.iter()
    }

    pub fn support(&self) -> BTreeSet<Atom> {
        self.terms.keys().cloned().collect()
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        let mut out = self.clone();
        for (h, g) in &other.terms {
            out.add_term(h.clone(), g.clone());
        }
        out
    }

    pub fn sub(&self, other: &OneForm) -> OneForm {
        self.add(&other.scale(&Expr::int(-1)))
    }

    pub fn scale(&self, g: &Expr) -> OneForm {
        if g.is_zero() {
            return OneForm::zero();
        }
        OneForm {
            terms: self.terms.iter().map(|(h, c)| (h.clone(), c.mul(g))).collect(),
        }
    }

    /// Drop the `dx_i` terms.
    pub fn without_dx(&self) -> OneForm {
        OneForm {
            terms: self
                .terms
                .iter()
                .filter(|(h, _)| !h.is_indep())
                .map(|(h, c)| (h.clone(), c.clone()))
                .collect(),
        }
    }

    /// `Σ c_k f_k`.
    pub fn combination(coeffs: &[Expr], forms: &[OneForm]) -> OneForm {
        coeffs
            .iter()
            .zip(forms)
            .fold(OneForm::zero(), |acc, (c, f)| acc.add(&f.scale(c)))
    }

    pub fn text(&self) -> String {
        render_terms(self.terms.iter().map(|(h, g)| (g, format!("d{}", h.text()))), false)
    }

    pub fn latex(&self) -> String {
        render_terms(
            self.terms.iter().map(|(h, g)| (g, format!("\\mathrm{{d}}{}", h.latex()))),
            true,
        )
    }
}

/// Render `Σ g_k · name_k` with coefficient-aware signs.
pub fn render_terms<'a>(terms: impl Iterator<Item = (&'a Expr, String)>, latex: bool) -> String {
    let mut out = String::new();
    for (g, name) in terms {
        let neg = -g.clone();
        let (sign, c) = if g.is_polynomial() && g.numer().len() == 1 && is_negative_lead(g) {
            ("-", neg)
        } else {
            ("+", g.clone())
        };
        if !out.is_empty() || sign == "-" {
            out.push_str(sign);
        }
        if c.is_one() {
            out.push_str(&name);
            continue;
        }
        let body = if latex { c.latex() } else { c.text() };
        let simple = c.is_polynomial() && c.numer().len() == 1;
        match (simple, latex) {
            (true, true) => out.push_str(&format!("{body}{name}")),
            (true, false) => out.push_str(&format!("{body}*{name}")),
            (false, true) => out.push_str(&format!("\\left({body}\\right){name}")),
            (false, false) => out.push_str(&format!("({body})*{name}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn is_negative_lead(g: &Expr) -> bool {
    use num_traits::Signed;
    g.numer().leading().is_some_and(|(_, c)| c.is_negative())
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// `dh` for an atom in internal coordinates; non-internal jets are resolved
/// and compound atoms expand by the chain rule.
fn d_atom(d: &Diffiety, a: &Atom) -> Result<OneForm> {
    match a {
        Atom::Jet(j) if !d.is_internal(a) => differential(d, &d.resolve(&j.family, &j.index)?),
        _ if a.is_coordinate() => Ok(OneForm::d(a.clone())),
        _ => {
            let mut out = OneForm::zero();
            for arg in a.arguments() {
                let p = a.partial_by(&arg).expect("argument partial");
                out = out.add(&d_atom(d, &arg)?.scale(&p));
            }
            Ok(out)
        }
    }
}

/// Exterior differential of a function, over coordinate differentials.
pub fn differential(d: &Diffiety, e: &Expr) -> Result<OneForm> {
    let mut out = OneForm::zero();
    for a in e.atoms() {
        let p = e.partial_atom(&a);
        if !p.is_zero() {
            out = out.add(&d_atom(d, &a)?.scale(&p));
        }
    }
    Ok(out)
}

/// `ω_f = df − Σ (D_i f) dx_i`.
pub fn contact_form(d: &Diffiety, f: &Expr) -> Result<OneForm> {
    let mut out = differential(d, f)?;
    for i in 1..=d.n() {
        let di = d.total(i, f)?;
        out = out.sub(&OneForm::term(d.x(i), di));
    }
    Ok(out)
}

/// Contact forms `ω^j_I` of all internal coordinates with `|I| ≤ l`, in
/// family then order.
pub fn contact_basis(d: &Diffiety, l: usize) -> Result<Vec<(Atom, OneForm)>> {
    let mut out = Vec::new();
    for fam in d.families() {
        for r in 0..=l {
            for a in d.internal_of_order(&fam.name, r) {
                let w = contact_form(d, &Expr::atom(a.clone()))?;
                out.push((a, w));
            }
        }
    }
    Ok(out)
}

/// `𝓛_{D_i}(Σ g dh) = Σ (D_i g) dh + g d(D_i h)`.
pub fn lie_total(d: &Diffiety, w: &OneForm, i: usize) -> Result<OneForm> {
    let mut out = OneForm::zero();
    for (h, g) in w.terms() {
        out.add_term(h.clone(), d.total(i, g)?);
        let dh = d.total_atom(i, h)?;
        if !dh.is_zero() {
            out = out.add(&differential(d, &dh)?.scale(g));
        }
    }
    Ok(out)
}

/// `ω(Z) = Σ g · Zh`.
pub fn contract(w: &OneForm, z: &VectorField) -> Result<Expr> {
    let mut acc = Expr::zero();
    for (h, g) in w.terms() {
        let zh = z.component(h)?;
        if !zh.is_zero() {
            acc = acc.add(&g.mul(&zh));
        }
    }
    Ok(acc)
}

/// `𝓛_Z(Σ g dh) = Σ (Zg) dh + g d(Zh)`.
pub fn lie_field(d: &Diffiety, w: &OneForm, z: &VectorField) -> Result<OneForm> {
    let mut out = OneForm::zero();
    for (h, g) in w.terms() {
        out.add_term(h.clone(), z.apply(g)?);
        let zh = z.component(h)?;
        if !zh.is_zero() {
            out = out.add(&differential(d, &zh)?.scale(g));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Representation {
    Coefficients(Vec<Expr>),
    NotInSpan,
}

impl Representation {
    pub fn coefficients(&self) -> Option<&[Expr]> {
        match self {
            Representation::Coefficients(c) => Some(c),
            Representation::NotInSpan => None,
        }
    }

    pub fn in_span(&self) -> bool {
        matches!(self, Representation::Coefficients(_))
    }
}

/// Coefficients `c_k` with `ω = Σ c_k basis_k`, optionally ignoring `dx_i`.
pub fn represent(w: &OneForm, basis: &[OneForm], modulo_dx: bool) -> Representation {
    let prep = |f: &OneForm| if modulo_dx { f.without_dx() } else { f.clone() };
    let w = prep(w);
    let basis: Vec<OneForm> = basis.iter().map(prep).collect();
    let mut rows: BTreeSet<Atom> = w.support();
    for b in &basis {
        rows.extend(b.support());
    }
    let m: Vec<Vec<Expr>> = rows
        .iter()
        .map(|h| basis.iter().map(|b| b.coeff(h)).collect())
        .collect();
    let rhs: Vec<Expr> = rows.iter().map(|h| w.coeff(h)).collect();
    if basis.is_empty() {
        return if w.is_zero() {
            Representation::Coefficients(Vec::new())
        } else {
            Representation::NotInSpan
        };
    }
    match linalg::solve(m, rhs) {
        Some(c) => Representation::Coefficients(c),
        None => Representation::NotInSpan,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{JetSpec, MultiIndex};

    #[test]
    fn contact_form_annihilates_total_derivative() {
        let d = Diffiety::free(JetSpec::jets(1, 1));
        let w0 = Expr::atom(d.coord("w1", MultiIndex::empty()));
        let f = w0.pow(3).unwrap() * Expr::atom(d.x(1));
        let omega = contact_form(&d, &f).unwrap();
        let dx = VectorField::total(&d, 1);
        assert!(contract(&omega, &dx).unwrap().is_zero());
    }

    #[test]
    fn lie_total_of_contact_form_is_next_contact_form() {
        let d = Diffiety::free(JetSpec::jets(1, 1));
        let w0 = Expr::atom(d.coord("w1", MultiIndex::empty()));
        let w1 = Expr::atom(d.coord("w1", MultiIndex::new(vec![1])));
        let lw = lie_total(&d, &contact_form(&d, &w0).unwrap(), 1).unwrap();
        assert_eq!(lw, contact_form(&d, &w1).unwrap());
    }

    #[test]
    fn represent_finds_coefficients_or_reports_outside() {
        let d = Diffiety::free(JetSpec::jets(2, 1));
        let a = d.coord("w1", MultiIndex::empty());
        let b = d.coord("w2", MultiIndex::empty());
        let x = Expr::atom(d.x(1));
        let basis = [OneForm::d(a.clone()), OneForm::d(a.clone()).add(&OneForm::d(b.clone()))];
        let target = OneForm::term(a.clone(), x.clone()).add(&OneForm::term(b.clone(), Expr::int(3)));
        let c = represent(&target, &basis, false);
        assert_eq!(c.coefficients().unwrap(), &[x.sub(&Expr::int(3)), Expr::int(3)]);
        assert_eq!(represent(&OneForm::d(d.x(1)), &basis, false), Representation::NotInSpan);
        assert!(represent(&OneForm::d(d.x(1)), &basis, true).in_span());
    }

    #[test]
    fn text_rendering_signs() {
        let d = Diffiety::free(JetSpec::jets(1, 1));
        let a = d.coord("w1", MultiIndex::empty());
        let f = OneForm::term(d.x(1), Expr::int(-1)).add(&OneForm::term(a, Expr::int(2)));
        assert_eq!(f.text(), "-dx1+2*dw[1]");
    }
}
