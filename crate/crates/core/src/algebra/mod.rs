//! Exact noncommutative operator algebra over the function field generated
//! by `r^{±1}` and `s = sqrt(1 + lam r^2)`.

pub mod coeff;
pub mod expr;
pub mod gauss;
pub mod invariants;
pub mod poly;
pub mod radial;
pub mod syntax;

pub use coeff::Coeff;
pub use expr::{sum, Atom, Ctx, Exps, Mono, OperatorExpr, Term, MAX_DIM};
pub use gauss::{fmt_rational, rat, rational_sqrt, rational_to_f64, GaussianRational, Rational};
pub use invariants::{angular, collect_invariants, dilation, lsq_half, p_squared, InvariantForm};
pub use poly::{Monomial, Poly};
pub use radial::{Lambda, RadialCoefficient};
pub use syntax::{parse, print};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operands carry different lambda values")]
    LambdaMismatch,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("a denominator vanishes at lambda = {0}")]
    DegenerateSubstitution(String),
    #[error("coefficient is not invertible")]
    NotInvertible,
    #[error("operator is not of the form c_psq p^2 + c_d x.p + c_lsq L^2 + c_1; residual {0}")]
    IrreducibleToInvariants(String),
    #[error("parse error: {0}")]
    Parse(String),
}
