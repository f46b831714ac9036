//! Multi-valued algebroid functions and algebroid curves into projective space.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: exact Q(i)(z) coefficients and evaluable expression trees.
//! - [`defining`]: defining polynomials, Sylvester resultants, discriminants,
//!   the field operations on algebroid functions, critical sets.
//! - [`continuation`]: fibers, path tracking, monodromy, Puiseux expansions.
//! - [`covering`]: the branched-covering model, value divisors, the `J_k` check.
//! - [`nevanlinna`]: characteristic, proximity and counting functions on the flat plane.
//! - [`smt`]: second-main-theorem slack and defect accounting.
//! - [`curvature`]: comparison functions for curved base manifolds.
//! - [`problem`]: the JSON problem-file schema shared by the CLI and the web demo.

pub mod continuation;
pub mod covering;
pub mod curvature;
pub mod defining;
pub mod error;
pub mod field;
pub mod nevanlinna;
pub mod problem;
pub mod quad;
pub mod roots;
pub mod settings;
pub mod smt;
pub mod zeros;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use settings::NumericSettings;
