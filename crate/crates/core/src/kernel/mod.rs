//! Exact sparse arithmetic on truncated multivariate power series over `ℚ`.

mod exponent;
mod expr;
mod ideal;
mod series;

pub use exponent::Exponent;
pub(crate) use exponent::enumerate_sublevel;
pub use expr::Expr;
pub use ideal::IdealPresentation;
pub(crate) use series::accumulate;
pub use series::{determinant, Precision, PrecisionSeries, SeriesRepr};
