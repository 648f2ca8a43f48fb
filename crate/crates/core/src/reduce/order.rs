//! Whether a variation of a trivial jet space preserves the order filtration.

use crate::error::Result;
use crate::expr::{Atom, Expr};
use crate::fields::VectorField;
use crate::forms::{self, OneForm, Representation};
use crate::jet::Diffiety;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderVerdict {
    /// `point_form` reports (for `m > 1`) whether `Zx_i`, `Zw^j` depend on
    /// `x`, `w` only.
    Preserved { point_form: Option<bool> },
    /// `𝓛_Z ω` leaves the filtration term for the contact form of `form`.
    Violated { form: Atom, image: OneForm },
}

impl OrderVerdict {
    pub fn preserved(&self) -> bool {
        matches!(self, OrderVerdict::Preserved { .. })
    }
}

fn is_point_function(d: &Diffiety, e: &Expr) -> bool {
    Diffiety::coordinates_in(e).iter().all(|a| match a {
        Atom::Indep(_) | Atom::Param(_) => true,
        Atom::Jet(j) => j.index.order() == 0 && d.has_family(&j.family),
        _ => false,
    })
}

/// Test `𝓛_Z Ω_l ⊆ Ω_l` modulo `dx` over the contact basis of level `l`.
pub fn order_preservation_check(d: &Diffiety, z: &VectorField, l: usize) -> Result<OrderVerdict> {
    let basis = forms::contact_basis(d, l)?;
    let forms_only: Vec<OneForm> = basis.iter().map(|(_, w)| w.clone()).collect();
    for (a, w) in &basis {
        let image = forms::lie_field(d, w, z)?;
        if let Representation::NotInSpan = forms::represent(&image, &forms_only, true) {
            return Ok(OrderVerdict::Violated {
                form: a.clone(),
                image,
            });
        }
    }
    let point_form = if d.families().len() > 1 {
        let mut ok = true;
        for x in d.indep_atoms() {
            ok &= is_point_function(d, &z.component(&x)?);
        }
        for fam in d.families() {
            let w = d.coord(&fam.name, crate::jet::MultiIndex::empty());
            ok &= is_point_function(d, &z.component(&w)?);
        }
        Some(ok)
    } else {
        None
    };
    Ok(OrderVerdict::Preserved { point_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{JetSpec, MultiIndex};

    fn w(d: &Diffiety, j: usize, dirs: Vec<u8>) -> Expr {
        Expr::atom(d.coord(&format!("w{j}"), MultiIndex::new(dirs)))
    }

    #[test]
    fn point_field_preserves_order() {
        let d = Diffiety::free(JetSpec::jets(2, 2));
        let x1 = Expr::atom(d.x(1));
        let z = VectorField::from_point_generators(
            &d,
            vec![w(&d, 1, vec![]), x1.clone()],
            vec![x1.mul(&w(&d, 2, vec![])), w(&d, 1, vec![]).pow(2).unwrap()],
        )
        .unwrap();
        for l in 0..=1 {
            let v = order_preservation_check(&d, &z, l).unwrap();
            assert_eq!(v, OrderVerdict::Preserved { point_form: Some(true) });
        }
    }

    #[test]
    fn derivative_generator_violates() {
        let d = Diffiety::free(JetSpec::jets(2, 2));
        let z = VectorField::from_point_generators(
            &d,
            vec![Expr::zero(), Expr::zero()],
            vec![w(&d, 2, vec![1]), Expr::zero()],
        )
        .unwrap();
        match order_preservation_check(&d, &z, 0).unwrap() {
            OrderVerdict::Violated { form, image } => {
                assert_eq!(form, d.coord("w1", MultiIndex::empty()));
                assert!(!image.coeff(&d.coord("w2", MultiIndex::new(vec![1]))).is_zero());
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn total_derivative_raises_order() {
        let d = Diffiety::free(JetSpec::jets(1, 1));
        let z = VectorField::total(&d, 1);
        assert!(!order_preservation_check(&d, &z, 0).unwrap().preserved());
    }
}
