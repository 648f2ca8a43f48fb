use thiserror::Error;

use crate::expr::Atom;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by an expression that normalizes to zero")]
    ZeroDenominator,
    #[error("expression is not polynomial in {0}")]
    NotPolynomial(Atom),
    #[error("atom {0} is outside the scope of this derivation")]
    OutOfScope(Atom),
    #[error("substitution did not reach a fixed point within {0} passes")]
    DepthExceeded(usize),
    #[error("prolongation order {order} exceeds the bound {bound}")]
    OrderBound { order: usize, bound: usize },
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("direction {0} out of range")]
    BadDirection(usize),
    #[error("standard basis is degenerate ({0})")]
    Degenerate(String),
    #[error("elimination pivot vanishes identically: {0}")]
    PivotVanishes(String),
    #[error("expression is not a total derivative (Euler residual {residual})")]
    NotExact { residual: String },
    #[error("{0}")]
    Invalid(String),
}
