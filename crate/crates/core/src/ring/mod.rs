//! Exact arithmetic substrate: rationals, graded truncated series over the
//! parameter alphabet, Laurent polynomials in the torus variables, and the
//! q-Pochhammer constructors built on top of them.

pub mod alphabet;
pub mod aux;
pub mod laurent;
pub mod qpoch;
pub mod series;

pub use alphabet::{Alphabet, Ctx, Symbol};
pub use aux::AuxLaurent;
pub use laurent::{divide_stats, LaurentPoly};
pub use qpoch::{inv_qpoch_inf, qpoch_finite, qpoch_inf, qq_reciprocal};
pub use series::GradedSeries;
