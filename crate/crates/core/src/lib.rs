//! Exact real numbers represented as oracles.
//!
//! A real number is a rule answering Yes or No to the question "does this
//! inclusive rational interval contain the number?". Every query is made
//! under a [`Budget`] of refinement rounds and answers [`QueryResult::Yes`],
//! [`QueryResult::No`], or [`QueryResult::Exhausted`]; definitive answers never
//! change when the budget grows.
//!
//! The interval kernels in [`interval`] are generic over any exact ordered
//! field through [`Scalar`]; the oracle layer is instantiated on
//! arbitrary-precision [`Rational`] only, since every answer it gives must be
//! exact.

pub mod cli;
pub mod combinators;
pub mod constructors;
mod error;
pub mod expr;
pub mod funoracle;
pub mod harness;
pub mod interval;
pub mod oracle;
pub mod rational;
pub mod refine;


pub use combinators::{compare, o_abs, o_add, o_mul, o_neg, o_recip, o_sub, CompareResult};
pub use constructors::{
    cauchy_oracle, ivt_oracle, lub_oracle, nth_root_oracle, rational_oracle, CauchySpec, Sign,
    SignFunction, UpperBoundTest,
};
pub use error::{OracleError, Result};
pub use funoracle::{apply, poly_extension, recip_extension, rect_decide, FunctionOracle, Rectangle};
pub use harness::{check_axioms, AxiomReport, Counterexample, Property, Verdict};
pub use refine::{best_approx, bisect_step, mediant_expand, to_decimal, CFExpansion, DecimalEnclosure};
pub use interval::{ArithOp, Interval, Relation, Scalar};
pub use oracle::{oracle_from_fonsi, Budget, FonsiSource, Oracle, Position, QueryResult};

/// Arbitrary-precision exact fraction in canonical form.
pub type Rational = num_rational::BigRational;

/// Inclusive interval with exact rational endpoints.
pub type RInterval = Interval<Rational>;

/// Interval over machine-word fractions; exact until the words overflow.
pub type SmallInterval = Interval<num_rational::Rational64>;
