//! Symbolic verification of bihamiltonian systems of hydrodynamic type and of
//! their linear reciprocal transformations.
//!
//! * [`geometry`]: Christoffel symbols, curvature, flatness and flat pencils of
//!   contravariant metrics.
//! * [`hydro`]: flows generated by the two Hamiltonian structures and the
//!   identities they satisfy.
//! * [`reciprocal`]: the linear reciprocal transformation of flows, metrics
//!   and Hamiltonians, with the verification of the transformed structures.
//! * [`fixtures`]: the dispersionless KdV and Toda systems.
//! * [`pipeline`]: end-to-end runs over a [`pipeline::SystemDefinition`].

pub mod fixtures;
pub mod geometry;
pub mod hydro;
pub mod pipeline;
pub mod reciprocal;
pub mod report;

use symkern::{MatrixError, PolyError, ZeroTestError};
use thiserror::Error;

pub use report::{Check, Report, Status};

#[derive(Debug, Error)]
pub enum CoreError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid coordinates: {0}")]
    Coords(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{what} is not constant: {detail}")]
    NotConstant { what: String, detail: String },
    #[error("metric is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("the pencil g - λη is degenerate: det(g - λη) = {det} vanishes identically")]
    PencilDegenerate { det: String },
    #[error("transformation constants violate aq - bp != 0")]
    DegenerateTransform,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
