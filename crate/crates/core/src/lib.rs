//! Exact and floating-point machinery for symmetric beta moment identities and
//! the return probabilities of simple random walks on `ℤᵏ`.
//!
//! The multinomial kernels are generic over [`Scalar`]: exact rationals for
//! proofs by evaluation, `f64`/`f32` with compensated summation for arbitrary
//! real shape parameters.
//!
//! ```
//! use betawalk_core::{return_probability, Rational};
//!
//! let p = return_probability(3, 2).unwrap();
//! assert_eq!(p, Rational::new(5.into(), 72.into()));
//! ```

pub mod catalog;
pub mod compositions;
pub mod error;
pub mod exact;
pub mod expansion;
pub mod format;
pub mod moments;
pub mod numeric;
pub mod report;
pub mod scalar;
pub mod series;
pub mod simulate;
pub mod walk;

pub use catalog::{entry, CatalogEntry, Variant, CATALOG};
pub use compositions::{weak_compositions, Composition, WeakCompositions};
pub use error::{Error, Result};
pub use exact::{beta_half, binomial, factorial, gamma_half, multinomial, pochhammer, HalfInt, PiRational};
pub use expansion::{composition_product_sum, exact_composition_product_sum};
pub use format::{decimal_string, parse_rational, rational_string};
pub use moments::{
    lhs_master, moment_u2n, rhs_master, verify_equal_coeff_form, verify_master, BetaParams,
    CoefficientVector,
};
pub use numeric::{float_master_sides, log_beta, log_gamma, verify_master_float, FloatMasterSides, FloatVerification};
pub use report::{IdentityReport, Mode, PrintedForm, SideValue};
pub use scalar::{Accumulator, CompensatedSum, ExactSum, Scalar};
pub use series::{evaluate_series, SeriesEvaluation, SeriesOutcome, SeriesVariant};
pub use simulate::{simulate_beta_moment, simulate_walk, SimulationKind, SimulationResult};
pub use walk::{brute_force_return, return_probability, returning_paths, PathCount, WalkSpec};

/// Arbitrary-precision rational.
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;

pub type ExactRationalSum = ExactSum<Rational>;
pub type CompensatedSum64 = CompensatedSum<f64>;
pub type CompensatedSum32 = CompensatedSum<f32>;
pub type MasterSides64 = FloatMasterSides<f64>;
pub type MasterSides32 = FloatMasterSides<f32>;
