//! Exact linear algebra over prime fields.
//!
//! Subspaces are stored by the reduced row-echelon form of a basis, so two
//! [`Subspace`] values compare equal exactly when they are the same set of
//! vectors. The lattice operations (sum, intersection, image, preimage,
//! kernel) and quotients all return canonical values.

mod enumerate;
mod matrix;
mod quotient;
mod subspace;

use thiserror::Error;

use crate::field::FieldError;

pub use enumerate::{
    enumerate_between, enumerate_subspaces, gaussian_binomial, pivot_patterns, PatternIter, SubspaceIter,
};
pub use matrix::{Matrix, MatrixJson};
pub use quotient::{quotient_by, Quotient};
pub use subspace::{image, kernel, preimage, Subspace, SubspaceJson};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u32, right: u32 },
    #[error("dimension mismatch in {op}: {left} vs {right}")]
    DimensionMismatch { op: &'static str, left: usize, right: usize },
    #[error("row {row} has length {found}, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("entry ({row}, {col}) = {value} is not reduced mod {p}")]
    EntryOutOfRange { row: usize, col: usize, value: u32, p: u32 },
    #[error("index ({row}, {col}) outside {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("requested dimension {r} exceeds ambient dimension {d}")]
    RankTooLarge { r: usize, d: usize },
    #[error("subspace is not contained in the ambient space")]
    NotContained,
    #[error("count overflows 128 bits")]
    Overflow,
}
