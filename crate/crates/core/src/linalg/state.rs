use alloc::format;

use super::{eigh, require_hermitian, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tol;

/// A density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        require_hermitian(&m)?;
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
            return Err(Error::InvalidState(format!("trace {} + {}i is not 1", tr.re, tr.im)));
        }
        let min = eigh(&m)?.min_value();
        if min < -tol::PSD {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self(m))
    }

    /// Pure state `|ψ⟩⟨ψ|` from a (not necessarily normalized) vector.
    pub fn pure(psi: &[num_complex::Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState(format!("vector norm {norm}")));
        }
        Ok(Self(ComplexMatrix::projector(psi).scale(1.0 / norm)))
    }

    /// Maximally mixed state `1/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self(ComplexMatrix::identity(d).scale(1.0 / d as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Outcome probability `tr[ρ E]`.
    pub fn expectation(&self, effect: &ComplexMatrix) -> f64 {
        self.0.trace_product(effect).re
    }

    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    #[test]
    fn rejects_bad_states() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(&ComplexMatrix::identity(2).scale(0.5) + &pauli::z()).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(2).scale(0.5)).is_ok());
    }
}
