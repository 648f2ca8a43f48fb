//! Exact symbolic computation on diffieties.

pub mod cli;
pub mod error;
pub mod expr;
pub mod fields;
pub mod forms;
pub mod jet;
pub mod kdv;
pub mod linalg;
pub mod reduce;

pub use error::{Error, Result};
pub use expr::{Atom, Expr};
pub use fields::VectorField;
pub use forms::OneForm;
pub use jet::{Derivation, Diffiety, JetSpec, MultiIndex};
