use super::{image, LinalgError, Matrix, Subspace};
use crate::field::PrimeField;

/// `F_p^source / kernel`, realised by an explicit surjection onto
/// `F_p^target`.
///
/// The projection rows span the annihilator of the kernel, so the projection
/// has full row rank and its kernel is exactly the declared subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    kernel: Subspace,
    projection: Matrix,
}

impl Quotient {
    pub fn new(ambient: usize, kernel: &Subspace) -> Result<Self, LinalgError> {
        if kernel.ambient_dim() != ambient {
            return Err(LinalgError::NotContained);
        }
        let ann = kernel.annihilator();
        Ok(Self {
            kernel: kernel.clone(),
            projection: ann.basis().clone(),
        })
    }

    pub fn field(&self) -> PrimeField {
        self.kernel.field()
    }

    pub fn source_dim(&self) -> usize {
        self.kernel.ambient_dim()
    }

    pub fn target_dim(&self) -> usize {
        self.projection.rows()
    }

    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    pub fn projection(&self) -> &Matrix {
        &self.projection
    }

    /// Image of `s` in the quotient.
    pub fn push(&self, s: &Subspace) -> Result<Subspace, LinalgError> {
        image(&self.projection, s)
    }

    pub fn push_vector(&self, v: &[u32]) -> Result<Vec<u32>, LinalgError> {
        self.projection.apply(v)
    }
}

/// Shorthand for [`Quotient::new`].
pub fn quotient_by(ambient: usize, kernel: &Subspace) -> Result<Quotient, LinalgError> {
    Quotient::new(ambient, kernel)
}
