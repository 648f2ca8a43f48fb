//! First-order system `u_y = F(x, y, u, v, u_x, v_x, v_y)` in two
//! independent variables with one free function `v`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, NameStyle};
use crate::fields::VectorField;
use crate::forms::{self, OneForm, Representation};
use crate::jet::{Diffiety, JetSpec, MultiIndex};
use crate::reduce::DeterminingSystem;

pub fn x() -> Atom {
    Atom::indep("x")
}

pub fn y() -> Atom {
    Atom::indep("y")
}

/// `u` differentiated `r` times in `x`.
pub fn u(r: usize) -> Atom {
    Atom::jet("u", MultiIndex::repeat(1, r), NameStyle::Numbered)
}

/// `v` with the given directions (1 = x, 2 = y).
pub fn v(dirs: &[u8]) -> Atom {
    Atom::jet("v", MultiIndex::new(dirs.to_vec()), NameStyle::Letters)
}

/// Arguments `(x, y, u0, v, u1, vx, vy)` of the right-hand side.
pub fn f_args() -> Vec<Atom> {
    vec![x(), y(), u(0), v(&[]), u(1), v(&[1]), v(&[2])]
}

pub fn formal_f() -> Expr {
    Expr::atom(Atom::func("F", f_args()))
}

pub fn diffiety(f: &Expr) -> Result<Arc<Diffiety>> {
    let spec = JetSpec::new(&["x", "y"])
        .family("u", NameStyle::Numbered)
        .family("v", NameStyle::Letters);
    Diffiety::build(spec, vec![(Atom::jet("u", MultiIndex::new(vec![2]), NameStyle::Numbered), f.clone())])
}

#[derive(Clone, Debug)]
pub struct PdeReduction {
    pub diffiety: Arc<Diffiety>,
    pub f: Expr,
    pub alpha: OneForm,
    pub beta: OneForm,
    /// `γ = α − F_vy β`.
    pub gamma: OneForm,
    pub a: Expr,
    pub b: Expr,
    /// `𝓛_{D_y}γ − (F_u γ + Aβ + Bβ_x + F_u1 𝓛_{D_x}γ)`.
    pub residual: OneForm,
}

fn contact(d: &Diffiety, a: Atom) -> Result<OneForm> {
    forms::contact_form(d, &Expr::atom(a))
}

pub fn reduce(f: &Expr) -> Result<PdeReduction> {
    let d = diffiety(f)?;
    let fp = |a: Atom| f.partial(&a);
    let (f_u, f_v, f_u1, f_vx, f_vy) = (fp(u(0)), fp(v(&[])), fp(u(1)), fp(v(&[1])), fp(v(&[2])));
    let alpha = contact(&d, u(0))?;
    let beta = contact(&d, v(&[]))?;
    let beta_x = contact(&d, v(&[1]))?;
    let gamma = alpha.sub(&beta.scale(&f_vy));
    let a = f_v
        .add(&f_u.mul(&f_vy))
        .sub(&d.total(2, &f_vy)?)
        .add(&f_u1.mul(&d.total(1, &f_vy)?));
    let b = f_vx.add(&f_u1.mul(&f_vy));
    let lhs = forms::lie_total(&d, &gamma, 2)?;
    let rhs = gamma
        .scale(&f_u)
        .add(&beta.scale(&a))
        .add(&beta_x.scale(&b))
        .add(&forms::lie_total(&d, &gamma, 1)?.scale(&f_u1));
    Ok(PdeReduction {
        diffiety: d,
        f: f.clone(),
        alpha,
        beta,
        gamma,
        a,
        b,
        residual: lhs.sub(&rhs),
    })
}

fn formal(name: &str) -> Expr {
    Expr::atom(Atom::func(name, f_args()))
}

/// Field with `β(Z) = b`, `γ(Z) = c`, `Zx = z1`, `Zy = z2`.
pub fn field(red: &PdeReduction, b: &Expr, c: &Expr, z1: &Expr, z2: &Expr) -> Result<Arc<VectorField>> {
    let f_vy = red.f.partial(&v(&[2]));
    let zu = c
        .add(&f_vy.mul(b))
        .add(&Expr::atom(u(1)).mul(z1))
        .add(&red.f.mul(z2));
    let zv = b
        .add(&Expr::atom(v(&[1])).mul(z1))
        .add(&Expr::atom(v(&[2])).mul(z2));
    VectorField::from_point_generators(&red.diffiety, vec![z1.clone(), z2.clone()], vec![zu, zv])
}

/// Conditions for `𝓛_Zβ, 𝓛_Zγ ∈ span(β, γ)` modulo `dx, dy`, with
/// `b, c, z1, z2` formal on `(x, y, u0, v, u1, vx, vy)`, and the variation
/// requirement on the initial terms (`z1 = z2 = 0`).
pub fn determining(f: &Expr) -> Result<DeterminingSystem> {
    let red = reduce(f)?;
    let d = &red.diffiety;
    let (b, c, z1, z2) = (formal("b"), formal("c"), formal("z1"), formal("z2"));
    let z = field(&red, &b, &c, &z1, &z2)?;
    let names = ["alpha1", "betax", "betay"];
    let basis = [
        red.beta.clone(),
        red.gamma.clone(),
        contact(d, u(1))?,
        contact(d, v(&[1]))?,
        contact(d, v(&[2]))?,
    ];
    let mut ds = DeterminingSystem {
        unknowns: ["b", "c", "z1", "z2"].iter().map(|n| (n.to_string(), f_args())).collect(),
        ..Default::default()
    };
    for (name, form) in [("beta", &red.beta), ("gamma", &red.gamma)] {
        let l = forms::lie_field(d, form, &z)?;
        let k = match forms::represent(&l, &basis, true) {
            Representation::Coefficients(k) => k,
            Representation::NotInSpan => {
                return Err(Error::Invalid(format!("𝓛_Z{name} leaves the first-order forms")))
            }
        };
        ds.solved.push((format!("lambda_{name}"), k[0].clone()));
        ds.solved.push((format!("mu_{name}"), k[1].clone()));
        for (label, e) in names.iter().zip(&k[2..]) {
            ds.push(format!("{name}:{label}"), e.clone());
        }
    }
    ds.push("variation", variation_requirement(&red, &b, &c)?);
    ds.solved.push(("A".into(), red.a.clone()));
    ds.solved.push(("B".into(), red.b.clone()));
    Ok(ds)
}

/// `γ(𝓛_{D_y}Z)`-style requirement for an evolutionary field:
/// `(𝓛_{D_y}γ)(Z) − D_y c`.
pub fn variation_requirement(red: &PdeReduction, b: &Expr, c: &Expr) -> Result<Expr> {
    let zero = Expr::zero();
    let z = field(red, b, c, &zero, &zero)?;
    let l = forms::lie_total(&red.diffiety, &red.gamma, 2)?;
    Ok(forms::contract(&l, &z)?.sub(&red.diffiety.total(2, c)?))
}

/// `D_y c − (F_u c + Ab + B D_x b + F_u1 D_x c)`.
pub fn variation_requirement_closed(red: &PdeReduction, b: &Expr, c: &Expr) -> Result<Expr> {
    let d = &red.diffiety;
    let f_u = red.f.partial(&u(0));
    let f_u1 = red.f.partial(&u(1));
    let rhs = f_u
        .mul(c)
        .add(&red.a.mul(b))
        .add(&red.b.mul(&d.total(1, b)?))
        .add(&f_u1.mul(&d.total(1, c)?));
    Ok(d.total(2, c)?.sub(&rhs))
}

/// Evolutionary restriction `z1 = z2 = 0`: `b` on `(x, y, u0, v)`, the
/// first derivatives `c_s = R_s` (s ∈ {u1, vx, vy}) and their
/// cross-derivative compatibility conditions.
#[derive(Clone, Debug)]
pub struct Evolutionary {
    pub system: DeterminingSystem,
    /// `(s, R_s)`.
    pub gradient: Vec<(Atom, Expr)>,
    pub compatible: bool,
}

pub fn evolutionary(f: &Expr) -> Result<Evolutionary> {
    let red = reduce(f)?;
    let b = Expr::atom(Atom::func("b", vec![x(), y(), u(0), v(&[])]));
    let c = formal("c");
    let f_vy = f.partial(&v(&[2]));
    let vars = [u(1), v(&[1]), v(&[2])];
    let gradient: Vec<(Atom, Expr)> = vars
        .iter()
        .map(|s| (s.clone(), b.mul(&f_vy.partial(s)).neg()))
        .collect();
    let mut system = DeterminingSystem {
        unknowns: vec![
            ("b".into(), vec![x(), y(), u(0), v(&[])]),
            ("c".into(), f_args()),
        ],
        ..Default::default()
    };
    for (s, r) in &gradient {
        system.push(format!("c_{}", s.text()), c.partial(s).sub(r));
    }
    let mut compatible = true;
    for i in 0..gradient.len() {
        for j in i + 1..gradient.len() {
            let (si, ri) = &gradient[i];
            let (sj, rj) = &gradient[j];
            let cross = ri.partial(sj).sub(&rj.partial(si));
            compatible &= cross.is_zero();
            system.push(format!("frobenius:{}:{}", si.text(), sj.text()), cross);
        }
    }
    system.push("variation", variation_requirement(&red, &b, &c)?);
    Ok(Evolutionary {
        system,
        gradient,
        compatible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: Atom) -> Expr {
        Expr::atom(a)
    }

    #[test]
    fn generic_identity_vanishes() {
        let red = reduce(&formal_f()).unwrap();
        assert!(red.residual.is_zero(), "{}", red.residual);
    }

    #[test]
    fn linear_examples() {
        let red = reduce(&e(v(&[2]))).unwrap();
        assert_eq!(red.gamma, red.alpha.sub(&red.beta));
        assert!(red.a.is_zero() && red.b.is_zero());
        assert!(forms::lie_total(&red.diffiety, &red.gamma, 2).unwrap().is_zero());
        let red = reduce(&e(v(&[1]))).unwrap();
        assert_eq!(red.gamma, red.alpha);
        assert!(red.a.is_zero());
        assert_eq!(red.b, Expr::one());
    }

    #[test]
    fn determining_relations_generic() {
        let f = formal_f();
        let ds = determining(&f).unwrap();
        let p = |n: &str, a: Atom| formal(n).partial(&a);
        let fvy = f.partial(&v(&[2]));
        assert_eq!(ds.equation("beta:alpha1").unwrap(), &p("b", u(1)));
        assert_eq!(ds.equation("beta:betax").unwrap(), &(formal("z1") + p("b", v(&[1]))));
        assert_eq!(ds.equation("beta:betay").unwrap(), &(formal("z2") + p("b", v(&[2]))));
        let gy = ds.equation("gamma:betay").unwrap();
        let expect = formal("b") * fvy.partial(&v(&[2])) + p("c", v(&[2]));
        assert!(gy.add(&expect).is_zero() || gy.sub(&expect).is_zero(), "{gy}");
    }

    #[test]
    fn variation_requirement_matches_closed_form() {
        let red = reduce(&formal_f()).unwrap();
        let b = Expr::atom(Atom::func("b", vec![x(), y(), u(0), v(&[])]));
        let c = formal("c");
        let mech = variation_requirement(&red, &b, &c).unwrap();
        let closed = variation_requirement_closed(&red, &b, &c).unwrap();
        assert!(mech.add(&closed).is_zero() || mech.sub(&closed).is_zero());
    }

    #[test]
    fn evolutionary_is_compatible() {
        assert!(evolutionary(&formal_f()).unwrap().compatible);
    }
}
