//! Exact computer-algebra kernel for inhomogeneous spin q-Whittaker
//! polynomials, spin Hall-Littlewood rational functions, their torus scalar
//! products, q-difference operators, and the Grothendieck / interpolation
//! q-Whittaker specializations.
//!
//! Everything is computed over exact scalars with zero numerical error.
//! Torus integrals are constant-term extractions of truncated graded Laurent
//! expansions: `q` and every inhomogeneity parameter has weight 1, and terms
//! above a configurable total degree cap are discarded, which turns every
//! infinite product of the theory into a finite object.
//!
//! The evaluators are generic over the [`scalar::Scalar`] ring, so one
//! implementation serves all modes: exact rational points ([`Rational`]),
//! symbolic parameters ([`GradedSeries`]), torus variables ([`LaurentPoly`]),
//! and the epsilon-Laurent ring backing the dual-operator limits
//! ([`ring::AuxLaurent`]).

pub mod error;
pub mod qdiff;
pub mod ring;
pub mod rng;
pub mod scalar;
pub mod shapes;
pub mod shl;
pub mod special;
pub mod sqw;
pub mod suites;
pub mod torus;

/// The coefficient atom: arbitrary-precision exact rational numbers.
/// Reduced form with positive denominator is maintained by construction.
pub type Rational = num_rational::BigRational;

pub use error::{Error, Result};
pub use ring::{Alphabet, Ctx, GradedSeries, LaurentPoly, Symbol};
pub use scalar::Scalar;
pub use shapes::{Partition, Signature};
