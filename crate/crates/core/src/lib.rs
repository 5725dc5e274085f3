//! Numerical laboratory for radial solutions of `-Δu = λ f(u)` on the unit
//! ball of `ℝᴺ`, `N ≥ 3`: shooting and continuation of solution branches,
//! semi-stability, explicit singular solutions, sub/supersolution iteration and
//! checks of a priori bounds.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dimension;
pub mod error;
pub mod exec;
pub mod nonlinearity;
pub mod profiles;
pub mod approximation;
pub mod bounds;
pub mod cli;
pub mod continuation;
pub mod singular;
pub mod shooting;
pub mod stability;

mod discrete;

pub use dimension::Dimension;
pub use error::{Error, Result};
pub use exec::Execution;
pub use nonlinearity::{Family, NonlinearitySpec};
pub use profiles::{RadialGrid, RadialProfile};
