use super::{Atom, Expr};
use crate::error::{Error, Result};
use crate::jet::{Derivation, MultiIndex};

/// Variational derivative `Σ_r (−𝒟)^r ∂e/∂q_r` for a one-direction family.
///
/// The result vanishes (and `e` has no constant term) exactly when `e` is a
/// total derivative of a differential polynomial.
pub fn euler_operator(e: &Expr, family: &str, derivation: &Derivation) -> Result<Expr> {
    let mut max_order = None;
    for a in e.atoms() {
        match &a {
            Atom::Jet(j) if &*j.family == family => {
                let o = j.index.order();
                max_order = Some(max_order.map_or(o, |m: usize| m.max(o)));
            }
            Atom::Param(_) => {}
            _ => return Err(Error::OutOfScope(a.clone())),
        }
    }
    let Some(top) = max_order else {
        return Ok(Expr::zero());
    };
    let style = e
        .atoms()
        .into_iter()
        .find_map(|a| a.as_jet().map(|j| j.style))
        .expect("family atom present");
    let mut acc = Expr::zero();
    for r in (0..=top).rev() {
        // Horner form: acc = ∂e/∂q_r − 𝒟 acc
        let q_r = Atom::jet(family, MultiIndex::repeat(derivation.direction(), r), style);
        acc = e.partial(&q_r).sub(&derivation.apply(&acc)?);
    }
    Ok(acc)
}
