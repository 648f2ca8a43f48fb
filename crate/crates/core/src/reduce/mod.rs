//! Reduction algorithms: standard bases, determining systems, pencils,
//! involutive families and order preservation.

pub mod involutive;
pub mod ode2;
pub mod order;
pub mod pde1;
pub mod pencil;
mod system;

pub use system::{DeterminingSystem, Equation};
