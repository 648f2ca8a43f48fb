//! Symmetries of `M(2, n)` preserving the pencil `π = ω¹ + aω²` in the sense
//! `𝓛_Zπ = λπ`, `𝓛_Zω² ∈ span(ω¹, ω², 𝓛_{D_i}π)`.

use std::sync::Arc;

use crate::error::Result;
use crate::expr::{Atom, Expr};
use crate::fields::VectorField;
use crate::forms::{self, OneForm};
use crate::jet::{Diffiety, JetSpec, MultiIndex};
use crate::reduce::DeterminingSystem;

pub fn diffiety(n: usize) -> Arc<Diffiety> {
    Diffiety::free(JetSpec::jets(2, n))
}

fn w(d: &Diffiety, j: usize, index: MultiIndex) -> Atom {
    d.coord(&format!("w{j}"), index)
}

/// Coordinates `x_i, w^j, w^j_i` on which the generators may depend.
pub fn first_order_args(d: &Diffiety) -> Vec<Atom> {
    let mut args = d.indep_atoms();
    for j in 1..=2 {
        args.push(w(d, j, MultiIndex::empty()));
    }
    for j in 1..=2 {
        for i in 1..=d.n() {
            args.push(w(d, j, MultiIndex::repeat(i, 1)));
        }
    }
    args
}

/// `𝒟 = a∂_{w¹} − ∂_{w²}` (`dir = None`) or `𝒟_i = a∂_{w¹_i} − ∂_{w²_i}`.
fn pencil_derivative(d: &Diffiety, a: &Expr, dir: Option<usize>, f: &Expr) -> Expr {
    let index = dir.map_or_else(MultiIndex::empty, |i| MultiIndex::repeat(i, 1));
    let p1 = f.partial(&w(d, 1, index.clone()));
    let p2 = f.partial(&w(d, 2, index));
    a.mul(&p1).sub(&p2)
}

/// `Za = Σ z_i D_i a + Σ D_I z^j ∂a/∂w^j_I`.
fn z_of_a(d: &Diffiety, a: &Expr, zi: &[Expr], zj: &[Expr; 2]) -> Result<Expr> {
    let mut acc = Expr::zero();
    for (i, z) in zi.iter().enumerate() {
        acc = acc.add(&z.mul(&d.total(i + 1, a)?));
    }
    for atom in a.atoms() {
        let Some(j) = atom.as_jet() else { continue };
        let k: usize = j.family.trim_start_matches('w').parse().unwrap_or(0);
        if !(1..=2).contains(&k) {
            continue;
        }
        let dz = d.iterated(&j.index, &zj[k - 1])?;
        acc = acc.add(&dz.mul(&a.partial(&atom)));
    }
    Ok(acc)
}

fn conditions(d: &Diffiety, a: &Expr, z1: &Expr, z2: &Expr) -> Result<DeterminingSystem> {
    let n = d.n();
    let zi: Vec<Expr> = (1..=n).map(|i| pencil_derivative(d, a, Some(i), z2)).collect();
    let za = z_of_a(d, a, &zi, &[z1.clone(), z2.clone()])?;
    let mut ds = DeterminingSystem::default();
    ds.push(
        "D",
        pencil_derivative(d, a, None, z1)
            .add(&a.mul(&pencil_derivative(d, a, None, z2)))
            .sub(&za),
    );
    for i in 1..=n {
        ds.push(
            format!("D{i}"),
            pencil_derivative(d, a, Some(i), z1).sub(&a.mul(&pencil_derivative(d, a, Some(i), z2))),
        );
    }
    for (i, z) in zi.into_iter().enumerate() {
        ds.solved.push((format!("z_{}", i + 1), z));
    }
    Ok(ds)
}

/// Conditions on formal first-order generators `z¹, z²` (`z^j = ω^j(Z)`),
/// with `z_i = Zx_i = 𝒟_i z²` eliminated.
pub fn conditions_m2(n: usize, a: &Expr) -> Result<DeterminingSystem> {
    let d = diffiety(n);
    let args = first_order_args(&d);
    let z1 = Expr::atom(Atom::func("z1", args.clone()));
    let z2 = Expr::atom(Atom::func("z2", args.clone()));
    let mut ds = conditions(&d, a, &z1, &z2)?;
    ds.unknowns = vec![("z1".into(), args.clone()), ("z2".into(), args)];
    Ok(ds)
}

/// Whether an expression depends on coordinates of order at most one.
pub fn is_first_order(e: &Expr) -> bool {
    Diffiety::coordinates_in(e)
        .iter()
        .all(|a| a.as_jet().is_none_or(|j| j.index.order() <= 1))
}

/// Conditions for concrete generators, including the first-order
/// restriction (`order:z1`, `order:z2` are 0 when it holds, 1 otherwise).
pub fn check(n: usize, a: &Expr, z1: &Expr, z2: &Expr) -> Result<DeterminingSystem> {
    let d = diffiety(n);
    let mut ds = conditions(&d, a, z1, z2)?;
    for (name, z) in [("order:z1", z1), ("order:z2", z2)] {
        ds.push(name, Expr::int(if is_first_order(z) { 0 } else { 1 }));
    }
    Ok(ds)
}

/// Field with `Zx_i = 𝒟_i z²` and `ω^j(Z) = z^j`.
pub fn field(n: usize, a: &Expr, z1: &Expr, z2: &Expr) -> Result<Arc<VectorField>> {
    let d = diffiety(n);
    let zi: Vec<Expr> = (1..=n).map(|i| pencil_derivative(&d, a, Some(i), z2)).collect();
    let mut gens = Vec::new();
    for (j, z) in [(1, z1), (2, z2)] {
        let mut g = z.clone();
        for (i, zx) in zi.iter().enumerate() {
            g = g.add(&Expr::atom(w(&d, j, MultiIndex::repeat(i + 1, 1))).mul(zx));
        }
        gens.push(g);
    }
    VectorField::from_point_generators(&d, zi, gens)
}

/// Direct check of `𝓛_Zπ ∈ span(π)` and `𝓛_Zω² ∈ span(ω¹, ω², 𝓛_{D_i}π)`.
pub fn verify(n: usize, a: &Expr, z1: &Expr, z2: &Expr) -> Result<bool> {
    let z = field(n, a, z1, z2)?;
    let d = z.diffiety().clone();
    let w1 = forms::contact_form(&d, &Expr::atom(w(&d, 1, MultiIndex::empty())))?;
    let w2 = forms::contact_form(&d, &Expr::atom(w(&d, 2, MultiIndex::empty())))?;
    let pi = w1.add(&w2.scale(a));
    let first = forms::represent(&forms::lie_field(&d, &pi, &z)?, std::slice::from_ref(&pi), false).in_span();
    let mut basis: Vec<OneForm> = vec![w1, w2];
    for i in 1..=n {
        basis.push(forms::lie_total(&d, &pi, i)?);
    }
    let second = forms::represent(&forms::lie_field(&d, &basis[1], &z)?, &basis, false).in_span();
    Ok(first && second)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_pencil_solution() {
        let d = diffiety(2);
        let a = Expr::int(3);
        let z2 = Expr::atom(w(&d, 1, MultiIndex::empty())) + a.clone() * Expr::atom(w(&d, 2, MultiIndex::empty()));
        let z1 = a.clone() * z2.clone();
        let ds = check(2, &a, &z1, &z2).unwrap();
        assert!(ds.is_satisfied(), "{ds}");
        assert!(ds.solved("z_1").unwrap().is_zero());
        assert!(verify(2, &a, &z1, &z2).unwrap());
    }

    #[test]
    fn zero_generators() {
        let a = Expr::atom(Atom::indep("x1"));
        assert!(check(2, &a, &Expr::zero(), &Expr::zero()).unwrap().is_satisfied());
    }

    #[test]
    fn base_dependent_pencil_emits_base_term_only() {
        let a = Expr::atom(Atom::indep("x1"));
        let ds = conditions_m2(2, &a).unwrap();
        let eq = ds.equation("D").unwrap();
        let d = diffiety(2);
        let z2 = Expr::atom(Atom::func("z2", first_order_args(&d)));
        let z_1 = pencil_derivative(&d, &a, Some(1), &z2);
        let expect = pencil_derivative(&d, &a, None, &Expr::atom(Atom::func("z1", first_order_args(&d))))
            .add(&a.mul(&pencil_derivative(&d, &a, None, &z2)))
            .sub(&z_1);
        assert_eq!(eq, &expect);
    }

    #[test]
    fn higher_order_generator_rejected() {
        let d = diffiety(1);
        let z = Expr::atom(w(&d, 1, MultiIndex::repeat(1, 2)));
        let ds = check(1, &Expr::one(), &z, &Expr::zero()).unwrap();
        assert!(!ds.is_satisfied());
    }
}
