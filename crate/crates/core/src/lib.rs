//! Exact heights, places and log-gcd machinery for Q and quadratic fields,
//! with desk-scale diagnostics for linear recurrence sequences.

pub mod error;
pub mod factor;
pub mod field;
pub mod heights;
pub mod hilbert;
pub mod interval;
pub mod logvalue;
pub mod matrix;
pub mod multipoly;
pub mod places;
pub mod recurrence;
pub mod subspace;

pub use error::{Error, Result};
pub use field::{Field, FieldElement};
pub use heights::{LinearForm, ProjectivePoint};
pub use interval::{Dyadic, Interval};
pub use logvalue::{LogValue, DEFAULT_PRECISION, MAX_PRECISION};
pub use multipoly::{Monomial, MultiPoly};
pub use places::Place;
pub use recurrence::{ExponentLattice, LaurentForm, Recurrence};
