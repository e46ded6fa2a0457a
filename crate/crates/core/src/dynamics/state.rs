use nalgebra::SymmetricEigen;

use super::operator::max_abs_diff;
use super::{HilbertSpace, Operator};
use crate::{CMatrix, Error, Result, C64};

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = -1e-8;

/// Density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates the matrix against the density-operator invariants.
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let rho = Self::unchecked(space, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn unchecked(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} density matrix on a space of dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space, matrix })
    }

    /// Projector onto a product basis state.
    pub fn basis(space: &HilbertSpace, levels: &[usize]) -> Result<Self> {
        let i = space.index_of(levels)?;
        let d = space.dim();
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = C64::new(1.0, 0.0);
        Ok(Self { space: space.clone(), matrix: m })
    }

    /// Statistical mixture of basis states; weights are normalised by their sum.
    pub fn mixture(space: &HilbertSpace, weighted: &[(f64, &[usize])]) -> Result<Self> {
        let total: f64 = weighted.iter().map(|(w, _)| *w).sum();
        if weighted.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) || total <= 0.0 {
            return Err(Error::InvalidState(format!("mixture weights must be non-negative with positive sum, got total {total}")));
        }
        let d = space.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, levels) in weighted {
            let i = space.index_of(levels)?;
            m[(i, i)] += C64::new(w / total, 0.0);
        }
        Ok(Self { space: space.clone(), matrix: m })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(herm).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        if self.matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// `B ρ` as a plain matrix (not a state).
    pub fn left_multiplied(&self, b: &Operator) -> Result<CMatrix> {
        b.check_space(&self.space)?;
        Ok(b.matrix() * &self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_and_mixture_are_valid() {
        let s = HilbertSpace::new(vec![3, 2]).unwrap();
        DensityOperator::basis(&s, &[1, 0]).unwrap().validate().unwrap();
        let m = DensityOperator::mixture(&s, &[(0.3, &[1, 0]), (0.9, &[2, 0])]).unwrap();
        m.validate().unwrap();
        assert!((m.matrix()[(4, 4)].re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid() {
        let s = HilbertSpace::new(vec![2]).unwrap();
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(1.5, 0.0);
        m[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(DensityOperator::new(s.clone(), m).is_err());
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityOperator::new(s, m).is_err());
    }
}
