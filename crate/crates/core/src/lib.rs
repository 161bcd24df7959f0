//! Exact arithmetic over `F_q[t]` for counting points on diagonal quadrics
//! via the function-field circle method, with brute-force oracles.

pub mod characters;
pub mod cyclotomic;
pub mod error;
pub mod expsums;
pub mod field;
pub mod formulas;
pub mod oracle;
pub mod polyring;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use characters::LaurentTail;
pub use cyclotomic::{Cyclotomic, ExponentTally, QScaled};
pub use error::{Error, Result};
pub use expsums::{CaseTag, QuadForm};
pub use field::{FieldCtx, FqElem};
pub use polyring::{Degree, Factorization, Poly, PolyRing};

/// Cyclotomic integers with arbitrary-precision coefficients.
pub type CycInt = Cyclotomic<BigInt>;
/// Exact rationals used by the closed-form evaluators.
pub type Rational = BigRational;
