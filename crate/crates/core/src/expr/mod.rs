//! Exact rational-function kernel over symbolic atoms.

mod atom;
mod euler;
mod gcd;
mod poly;
mod value;

pub use atom::{Atom, ElemFn, ElemKind, FnSymbol, JetCoord, NameStyle};
pub use euler::euler_operator;
pub use gcd::gcd;
pub use poly::{q, q_frac, Monomial, Poly, Q};
pub use value::Expr;
