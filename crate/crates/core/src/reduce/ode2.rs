//! Second-order ODE `u'' = F(x, u, v, u', v', v'')` with one free function:
//! standard basis, variations and symmetry conditions.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, NameStyle};
use crate::fields::VectorField;
use crate::forms::{self, OneForm, Representation};
use crate::jet::{Diffiety, JetSpec, MultiIndex};
use crate::reduce::DeterminingSystem;

pub fn x() -> Atom {
    Atom::indep("x")
}

pub fn u(r: usize) -> Atom {
    Atom::jet("u", MultiIndex::repeat(1, r), NameStyle::Numbered)
}

pub fn v(r: usize) -> Atom {
    Atom::jet("v", MultiIndex::repeat(1, r), NameStyle::Numbered)
}

/// Arguments `(x, u0, v0, u1, v1, v2)` of the right-hand side.
pub fn f_args() -> Vec<Atom> {
    vec![x(), u(0), v(0), u(1), v(1), v(2)]
}

/// The right-hand side as an unspecified function of its arguments.
pub fn formal_f() -> Expr {
    Expr::atom(Atom::func("F", f_args()))
}

pub fn diffiety(f: &Expr) -> Result<Arc<Diffiety>> {
    let spec = JetSpec::new(&["x"])
        .family("u", NameStyle::Numbered)
        .family("v", NameStyle::Numbered);
    Diffiety::build(spec, vec![(u(2), f.clone())])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Controllable,
    /// `det = 0` with `(B, C) ≠ 0`: `F` is a total derivative.
    DegenerateFirstOrder,
    /// `B = C = 0`: `F` is a second total derivative.
    DegenerateSecondOrder,
}

/// Coefficients on `π_0, π_1, …` expressing the original basis forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dictionary {
    pub beta: Vec<Expr>,
    pub gamma: Vec<Expr>,
    pub beta0: Vec<Expr>,
    pub alpha0: Vec<Expr>,
    pub alpha1: Vec<Expr>,
}

#[derive(Clone, Debug)]
pub struct StandardBasis {
    pub diffiety: Arc<Diffiety>,
    pub f: Expr,
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub m: Expr,
    pub n: Expr,
    /// `det(C, −B; M, N) = CN + BM`.
    pub det: Expr,
    pub alpha0: OneForm,
    pub alpha1: OneForm,
    pub beta0: OneForm,
    pub alpha: OneForm,
    pub beta: OneForm,
    pub gamma: OneForm,
    pub pi0: OneForm,
    pub pi1: OneForm,
    pub classification: Classification,
    dictionary: OnceLock<Dictionary>,
}

fn dd(d: &Diffiety, e: &Expr) -> Result<Expr> {
    d.total(1, e)
}

/// `𝓛_D(Σ c_r π_r) = Σ (D c_r) π_r + c_r π_{r+1}`.
fn shift(d: &Diffiety, c: &[Expr]) -> Result<Vec<Expr>> {
    let mut out = vec![Expr::zero(); c.len() + 1];
    for (r, cr) in c.iter().enumerate() {
        out[r] = out[r].add(&dd(d, cr)?);
        out[r + 1] = out[r + 1].add(cr);
    }
    trim(&mut out);
    Ok(out)
}

fn trim(v: &mut Vec<Expr>) {
    while v.len() > 1 && v.last().is_some_and(Expr::is_zero) {
        v.pop();
    }
}

fn lin(terms: &[(&Expr, &[Expr])]) -> Vec<Expr> {
    let len = terms.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
    let mut out = vec![Expr::zero(); len];
    for (k, c) in terms {
        for (r, cr) in c.iter().enumerate() {
            out[r] = out[r].add(&k.mul(cr));
        }
    }
    trim(&mut out);
    out
}

pub fn standard_basis(f: &Expr) -> Result<StandardBasis> {
    let d = diffiety(f)?;
    let fp = |a: Atom| f.partial(&a);
    let (f_u0, f_v0, f_u1, f_v1, f_v2) = (fp(u(0)), fp(v(0)), fp(u(1)), fp(v(1)), fp(v(2)));
    let alpha0 = forms::contact_form(&d, &Expr::atom(u(0)))?;
    let alpha1 = forms::contact_form(&d, &Expr::atom(u(1)))?;
    let beta0 = forms::contact_form(&d, &Expr::atom(v(0)))?;
    let beta1 = forms::contact_form(&d, &Expr::atom(v(1)))?;

    let dfv2 = dd(&d, &f_v2)?;
    let a = f_v1.add(&f_u1.mul(&f_v2)).sub(&dfv2);
    let alpha = alpha1.sub(&beta1.scale(&f_v2));
    let beta = alpha.sub(&beta0.scale(&a));
    let gamma = alpha0.sub(&beta0.scale(&f_v2));
    let b = f_u0
        .mul(&f_v2)
        .add(&f_u1.mul(&a))
        .add(&f_v0)
        .sub(&dd(&d, &a)?);
    let c = a.sub(&dfv2);
    let pi0 = beta.scale(&c).sub(&gamma.scale(&b));
    let lpi0 = forms::lie_total(&d, &pi0, 1)?;
    let (m, n) = match forms::represent(&lpi0, &[beta.clone(), gamma.clone()], false) {
        Representation::Coefficients(k) => (k[0].clone(), k[1].clone()),
        Representation::NotInSpan => {
            return Err(Error::Invalid(
                "𝓛_D π₀ does not reduce to β, γ; inconsistent reduction".into(),
            ))
        }
    };
    let pi1 = beta.scale(&m).add(&gamma.scale(&n));
    let det = c.mul(&n).add(&b.mul(&m));
    let classification = if b.is_zero() && c.is_zero() {
        Classification::DegenerateSecondOrder
    } else if det.is_zero() {
        Classification::DegenerateFirstOrder
    } else {
        Classification::Controllable
    };
    Ok(StandardBasis {
        diffiety: d,
        f: f.clone(),
        a,
        b,
        c,
        m,
        n,
        det,
        alpha0,
        alpha1,
        beta0,
        alpha,
        beta,
        gamma,
        pi0,
        pi1,
        classification,
        dictionary: OnceLock::new(),
    })
}

impl StandardBasis {
    fn build_dictionary(&self) -> Result<Dictionary> {
        let d = &self.diffiety;
        let inv = self.det.inv()?;
        // β = (Nπ0 + Bπ1)/det, γ = (−Mπ0 + Cπ1)/det
        let beta = vec![self.n.mul(&inv), self.b.mul(&inv)];
        let gamma = vec![self.m.neg().mul(&inv), self.c.mul(&inv)];
        let beta0 = if !self.c.is_zero() {
            // 𝓛_Dγ = β + Cβ0
            let k = self.c.inv()?;
            let s = shift(d, &gamma)?;
            lin(&[(&k, &s), (&k.neg(), &beta)])
        } else {
            // 𝓛_Dβ = F_u0 γ + F_u1 β + Bβ0
            let k = self.b.inv()?;
            let s = shift(d, &beta)?;
            let fu0 = self.f.partial(&u(0));
            let fu1 = self.f.partial(&u(1));
            lin(&[
                (&k, &s),
                (&k.mul(&fu0).neg(), &gamma),
                (&k.mul(&fu1).neg(), &beta),
            ])
        };
        let fv2 = self.f.partial(&v(2));
        let one = Expr::one();
        let alpha0 = lin(&[(&one, &gamma), (&fv2, &beta0)]);
        let alpha1 = shift(d, &alpha0)?;
        Ok(Dictionary {
            beta,
            gamma,
            beta0,
            alpha0,
            alpha1,
        })
    }

    /// `β_r = dv_r − v_{r+1} dx`.
    pub fn beta_r(&self, r: usize) -> Result<OneForm> {
        forms::contact_form(&self.diffiety, &Expr::atom(v(r)))
    }

    /// `π_r = 𝓛_D^r π_0`.
    pub fn pi(&self, r: usize) -> Result<OneForm> {
        let mut cur = self.pi0.clone();
        for _ in 0..r {
            cur = forms::lie_total(&self.diffiety, &cur, 1)?;
        }
        Ok(cur)
    }

    /// Forms generating the diffiety under `𝓛_D`.
    pub fn generating_basis(&self) -> Vec<OneForm> {
        vec![self.alpha0.clone(), self.beta0.clone()]
    }

    /// Residuals of `𝓛_Dβ = F_u0 γ + F_u1 β + Bβ0`, `𝓛_Dγ = β + Cβ0`,
    /// `𝓛_Dπ0 = π1`; all zero for a correct reduction.
    pub fn identity_residuals(&self) -> Result<Vec<(&'static str, OneForm)>> {
        let d = &self.diffiety;
        let fu0 = self.f.partial(&u(0));
        let fu1 = self.f.partial(&u(1));
        let lb = forms::lie_total(d, &self.beta, 1)?;
        let rb = self
            .gamma
            .scale(&fu0)
            .add(&self.beta.scale(&fu1))
            .add(&self.beta0.scale(&self.b));
        let lg = forms::lie_total(d, &self.gamma, 1)?;
        let rg = self.beta.add(&self.beta0.scale(&self.c));
        let lp = forms::lie_total(d, &self.pi0, 1)?;
        Ok(vec![
            ("beta", lb.sub(&rb)),
            ("gamma", lg.sub(&rg)),
            ("pi", lp.sub(&self.pi1)),
        ])
    }

    /// `β, γ, β0, α0, α1` in terms of the `π_r`, built on first use.
    pub fn dictionary(&self) -> Result<&Dictionary> {
        if self.classification != Classification::Controllable {
            return Err(Error::Degenerate(format!("{:?}", self.classification)));
        }
        if let Some(dict) = self.dictionary.get() {
            return Ok(dict);
        }
        let dict = self.build_dictionary()?;
        Ok(self.dictionary.get_or_init(|| dict))
    }

    /// `Σ c_r D^r p`.
    fn eval_combo(&self, c: &[Expr], p: &Expr) -> Result<Expr> {
        let mut acc = Expr::zero();
        let mut dp = p.clone();
        for (r, cr) in c.iter().enumerate() {
            if r > 0 {
                dp = dd(&self.diffiety, &dp)?;
            }
            if !cr.is_zero() {
                acc = acc.add(&cr.mul(&dp));
            }
        }
        Ok(acc)
    }

    /// `(α0(Z), β0(Z))` for the variation with `π_r(Z) = D^r p`.
    pub fn variation_solution(&self, p: &Expr) -> Result<(Expr, Expr)> {
        let dict = self.dictionary()?;
        Ok((self.eval_combo(&dict.alpha0, p)?, self.eval_combo(&dict.beta0, p)?))
    }

    /// Variation with `Zx = z` and `π_r(Z) = D^r p`.
    pub fn variation(&self, p: &Expr, z: &Expr) -> Result<Arc<VectorField>> {
        let (z0, zv) = self.variation_solution(p)?;
        let zu = z0.add(&Expr::atom(u(1)).mul(z));
        let zv = zv.add(&Expr::atom(v(1)).mul(z));
        VectorField::from_point_generators(&self.diffiety, vec![z.clone()], vec![zu, zv])
    }

    /// Reassemble `α0, α1, β0` from the dictionary; true when exact.
    pub fn dictionary_roundtrip(&self) -> Result<bool> {
        let dict = self.dictionary()?;
        let len = [&dict.alpha0, &dict.alpha1, &dict.beta0]
            .iter()
            .map(|c| c.len())
            .max()
            .unwrap_or(0);
        let pis: Vec<OneForm> = (0..len).map(|r| self.pi(r)).collect::<Result<_>>()?;
        let re = |c: &[Expr]| OneForm::combination(c, &pis[..c.len()]);
        Ok(re(&dict.alpha0) == self.alpha0
            && re(&dict.alpha1) == self.alpha1
            && re(&dict.beta0) == self.beta0)
    }
}

/// Coefficients of `𝓛_{Z_p} π0` (with `Zx = 0`) in the basis
/// `dx, β, γ, β0, β1, …`, labelled by form name.
pub fn lie_pi0_coefficients(sb: &StandardBasis, p: &Expr) -> Result<Vec<(String, Expr)>> {
    let d = &sb.diffiety;
    let z = sb.variation(p, &Expr::zero())?;
    let l = forms::lie_field(d, &sb.pi0, &z)?;
    let mut top = 0;
    for h in l.support().iter().chain(sb.pi0.support().iter()) {
        if let Some(j) = h.as_jet() {
            if &*j.family == "v" {
                top = top.max(j.index.order());
            }
        }
    }
    let mut labels = vec!["dx".to_string(), "beta".into(), "gamma".into()];
    let mut basis = vec![OneForm::d(x()), sb.beta.clone(), sb.gamma.clone()];
    for r in 0..=top.max(2) {
        labels.push(format!("beta{r}"));
        basis.push(sb.beta_r(r)?);
    }
    match forms::represent(&l, &basis, false) {
        Representation::Coefficients(c) => Ok(labels.into_iter().zip(c).collect()),
        Representation::NotInSpan => Err(Error::Invalid("basis does not span the cotangent forms".into())),
    }
}

fn coeff<'a>(c: &'a [(String, Expr)], label: &str) -> &'a Expr {
    &c.iter().find(|(l, _)| l == label).expect("label present").1
}

/// `z`, `λ` solving the `β`, `γ` components of `𝓛_Zπ0 = λπ0`, with the
/// remaining components as equations on `p`.
pub fn symmetry_system(sb: &StandardBasis, p: &Expr) -> Result<DeterminingSystem> {
    let coeffs = lie_pi0_coefficients(sb, p)?;
    let (ab, ag) = (coeff(&coeffs, "beta"), coeff(&coeffs, "gamma"));
    // [M −C; N B]·(z, λ) = −(a_β, a_γ)
    let det = sb.m.mul(&sb.b).add(&sb.c.mul(&sb.n));
    if det.is_zero() {
        return Err(Error::PivotVanishes("MB + CN".into()));
    }
    let inv = det.inv()?;
    let z = ab.mul(&sb.b).add(&sb.c.mul(ag)).neg().mul(&inv);
    let lambda = sb.n.mul(ab).sub(&sb.m.mul(ag)).mul(&inv);
    let mut ds = DeterminingSystem::default();
    for (label, e) in &coeffs {
        if label != "beta" && label != "gamma" {
            ds.push(label.clone(), e.clone());
        }
    }
    ds.solved = vec![
        ("z".into(), z),
        ("lambda".into(), lambda),
        ("a_beta".into(), ab.clone()),
        ("a_gamma".into(), ag.clone()),
        ("B".into(), sb.b.clone()),
        ("C".into(), sb.c.clone()),
    ];
    Ok(ds)
}

/// Generic symmetry generator `p` on the given arguments.
pub fn formal_p(args: Vec<Atom>) -> Expr {
    Expr::atom(Atom::func("p", args))
}

pub fn p_args_full() -> Vec<Atom> {
    vec![x(), u(0), u(1), v(0), v(1), v(2)]
}

pub fn p_args_reduced() -> Vec<Atom> {
    vec![x(), u(0), u(1), v(0)]
}

/// Symmetry conditions on `p`: vanishing of the `β_r` components (r ≥ 1)
/// for `p` on `(x, u0, u1, v0, v1, v2)`, then the remaining components for
/// `p` on `(x, u0, u1, v0)` with `z`, `λ` eliminated.
pub fn determining(sb: &StandardBasis) -> Result<DeterminingSystem> {
    let full = symmetry_system(sb, &formal_p(p_args_full()))?;
    let reduced = symmetry_system(sb, &formal_p(p_args_reduced()))?;
    let mut ds = DeterminingSystem {
        unknowns: vec![("p".into(), p_args_reduced())],
        ..Default::default()
    };
    for e in &full.equations {
        if e.label.starts_with("beta") && e.label != "beta0" {
            ds.push(e.label.clone(), e.expr.clone());
        }
    }
    for e in &reduced.equations {
        if e.label == "beta0" || e.label == "dx" {
            ds.push(e.label.clone(), e.expr.clone());
        }
    }
    ds.solved = reduced.solved;
    Ok(ds)
}

/// `z = 0` in the symmetry conditions: `λ` from the `β` relation, the `γ`
/// relation kept as an equation.
pub fn evolutionary_restriction(ds: &DeterminingSystem) -> Result<DeterminingSystem> {
    let get = |n: &str| {
        ds.solved(n)
            .cloned()
            .ok_or_else(|| Error::Invalid(format!("system lacks `{n}`")))
    };
    let (ab, ag, b, c) = (get("a_beta")?, get("a_gamma")?, get("B")?, get("C")?);
    let lambda = if !c.is_zero() {
        ab.div(&c)?
    } else if !b.is_zero() {
        ag.neg().div(&b)?
    } else {
        return Err(Error::PivotVanishes("B and C".into()));
    };
    let mut out = DeterminingSystem {
        unknowns: ds.unknowns.clone(),
        ..Default::default()
    };
    out.push("relation-beta", ab.sub(&lambda.mul(&c)));
    out.push("relation-gamma", ag.add(&lambda.mul(&b)));
    for e in &ds.equations {
        out.push(e.label.clone(), e.expr.clone());
    }
    out.solved = vec![("z".into(), Expr::zero()), ("lambda".into(), lambda)];
    Ok(out)
}

/// `𝓛_Zπ0 − λπ0` for the variation with generator `p` and `Zx = z`.
pub fn symmetry_residual(sb: &StandardBasis, p: &Expr, z: &Expr, lambda: &Expr) -> Result<OneForm> {
    let zf = sb.variation(p, z)?;
    let l = forms::lie_field(&sb.diffiety, &sb.pi0, &zf)?;
    Ok(l.sub(&sb.pi0.scale(lambda)))
}

/// Outcome of comparing a derived equation with a printed one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub derived: Expr,
    pub printed: Expr,
    /// `derived / printed` when it is free of the unknown function.
    pub factor: Option<Expr>,
}

impl Comparison {
    pub fn matches(&self) -> bool {
        self.factor.is_some()
    }

    pub fn new(derived: Expr, printed: Expr) -> Result<Comparison> {
        let factor = if printed.is_zero() {
            derived.is_zero().then(Expr::one)
        } else {
            let r = derived.div(&printed)?;
            let formal = r.atoms().iter().any(|a| matches!(a, Atom::Fn(_)));
            (!formal).then_some(r)
        };
        Ok(Comparison {
            derived,
            printed,
            factor,
        })
    }
}

/// The residual equation for `F = u0·v1` as printed in the literature:
/// `u0²(p_x + u1 p_u0) + 2u1²(p_v0 + u1 p_u1) − 2u0u1 p`.
pub fn printed_residual_u0v1() -> Expr {
    let p = formal_p(p_args_reduced());
    let e = |a: Atom| Expr::atom(a);
    let pd = |a: Atom| p.partial(&a);
    let u0 = e(u(0));
    let u1 = e(u(1));
    let sq = |a: &Expr| a.mul(a);
    sq(&u0)
        .mul(&pd(x()).add(&u1.mul(&pd(u(0)))))
        .add(&Expr::int(2).mul(&sq(&u1)).mul(&pd(v(0)).add(&u1.mul(&pd(u(1))))))
        .sub(&Expr::int(2).mul(&u0).mul(&u1).mul(&p))
}

/// Compare the mechanically derived `β0` condition with the printed one.
pub fn compare_residual(ds: &DeterminingSystem) -> Result<Comparison> {
    let derived = ds
        .equation("beta0")
        .ok_or_else(|| Error::Invalid("system has no beta0 equation".into()))?;
    Comparison::new(Expr::poly(derived.numer().clone()), printed_residual_u0v1())
}

/// Formal `p` atoms present in an expression.
pub fn formal_atoms(e: &Expr) -> BTreeSet<Atom> {
    e.atoms().into_iter().filter(|a| matches!(a, Atom::Fn(_))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: Atom) -> Expr {
        Expr::atom(a)
    }

    fn u0v1() -> Expr {
        e(u(0)) * e(v(1))
    }

    #[test]
    fn u0v1_basis_matches_hand_reduction() {
        let sb = standard_basis(&u0v1()).unwrap();
        assert_eq!(sb.a, e(u(0)));
        assert_eq!(sb.c, e(u(0)));
        assert_eq!(sb.b, -e(u(1)));
        assert_eq!(sb.m, Expr::int(2) * e(u(1)));
        assert_eq!(sb.n, Expr::int(2) * e(u(0)) * e(v(1)));
        assert_eq!(sb.gamma, sb.alpha0);
        assert_eq!(sb.beta, sb.alpha1.sub(&sb.beta0.scale(&e(u(0)))));
        let delta = Expr::int(2) * e(u(0)).pow(2).unwrap() * e(v(1)) - Expr::int(2) * e(u(1)).pow(2).unwrap();
        assert_eq!(sb.det, delta);
        assert_eq!(sb.classification, Classification::Controllable);
        for (_, r) in sb.identity_residuals().unwrap() {
            assert!(r.is_zero());
        }
        assert!(sb.dictionary_roundtrip().unwrap());
    }

    #[test]
    fn degenerate_cases_detected() {
        let sb = standard_basis(&e(v(2))).unwrap();
        assert_eq!(sb.classification, Classification::DegenerateSecondOrder);
        let sb = standard_basis(&(e(v(1)) + e(u(1)))).unwrap();
        assert!(!sb.b.is_zero() || !sb.c.is_zero());
        assert_eq!(sb.classification, Classification::DegenerateFirstOrder);
    }

    #[test]
    fn variation_solution_for_p_one_and_u0_squared() {
        let sb = standard_basis(&u0v1()).unwrap();
        let (z0, _) = sb.variation_solution(&Expr::one()).unwrap();
        assert_eq!(z0, (Expr::int(-2) * e(u(1))).div(&sb.det).unwrap());
        let (z0, _) = sb.variation_solution(&e(u(0)).pow(2).unwrap()).unwrap();
        assert!(z0.is_zero());
    }

    #[test]
    fn formal_generator_satisfies_variation_equation() {
        let sb = standard_basis(&u0v1()).unwrap();
        let d = &sb.diffiety;
        let p = formal_p(vec![x(), u(0), u(1), v(0)]);
        let (z0, zv) = sb.variation_solution(&p).unwrap();
        let lhs = d.iterated(&MultiIndex::repeat(1, 2), &z0).unwrap();
        let rhs = e(v(1)).mul(&z0).add(&e(u(0)).mul(&d.total(1, &zv).unwrap()));
        assert!(lhs.sub(&rhs).is_zero());
    }
}

