//! Exact set systems and a discretized nest-operator laboratory for
//! triangular operator algebras.
//!
//! * [`borel`]: finite unions of half-open rational intervals in `[0,1)`.
//! * [`tsys`]: triangular systems, cuts, maximality and completion.
//! * [`nestlab`]: block operators on a grid × block × channel model space and
//!   the diagonal, liminal and subset seminorms.
//! * [`lemmas`]: finite-horizon selection procedures and factorizations.

pub mod borel;
pub mod error;
pub mod lemmas;
pub mod nestlab;
pub mod tsys;

pub use error::{Error, Result};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
