//! Local standard bases over the rationals: Hironaka division, Becker's
//! s-series criterion, diagrams of initial exponents, Hilbert-Samuel
//! functions, jet perturbations and generalized-discriminant towers.
//!
//! Every result computed from truncated series is certified only up to an
//! explicit L-value window; see [`kernel::Precision`].

pub mod approx;
pub mod diagram;
pub mod division;
pub mod equising;
pub mod error;
pub mod kernel;
pub mod order;
pub mod stdbasis;
pub mod syntax;

pub use error::{Error, Result};
pub use kernel::{Exponent, Expr, IdealPresentation, Precision, PrecisionSeries};
pub use order::{LinearForm, WeightedSplitForm};
