//! Expression kernel for symbolic verification.
//!
//! Expressions are immutable trees over named symbols with exact rational
//! constants and exponents. The kernel parses and renders a small grammar,
//! differentiates and substitutes exactly, evaluates at arbitrary precision
//! over the complex numbers, and decides identities by deterministic sampling.
//!
//! ```
//! use symkern::{parse, differentiate, is_identically_zero, ZeroTestConfig};
//!
//! let h = parse("e^u + w^2/2").unwrap();
//! let d = differentiate(&h, "u");
//! let residual = d - parse("exp(u)").unwrap();
//! assert!(is_identically_zero(&residual, &ZeroTestConfig::default()).unwrap().is_zero());
//! ```

mod diff;
mod display;
mod eval;
mod expr;
mod matrix;
mod parse;
mod poly;
mod zero;

pub use diff::{derivative_tensors, differentiate, substitute};
pub use eval::{evaluate, evaluate_tracked, EvalError, EvalPoint, Evaluation, MIN_PRECISION};
pub use expr::{Expr, Kind};
pub use matrix::{MatrixError, SymMatrix, MAX_DIM, MAX_INVERSE_DIM};
pub use parse::{parse, ParseError};
pub use poly::{collect_powers, expand, simplify, PolyError};
pub use zero::{
    format_complex, is_identically_zero, ConfigError, SamplePoint, Witness, ZeroTestConfig, ZeroTestError, ZeroVerdict,
    DEFAULT_SEED,
};

pub use rug::{Complex, Rational};
