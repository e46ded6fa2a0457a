use crate::{CVector, Error, Result, C64};

/// Tensor-product Hilbert space, first subsystem slowest in the basis ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    dims: Vec<usize>,
}

impl HilbertSpace {
    /// Upper bound on the total dimension accepted by the dense methods.
    pub const MAX_DIM: usize = 64;

    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("Hilbert space needs at least one subsystem".into()));
        }
        if let Some(bad) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidParameter(format!("subsystem dimension {bad} < 1")));
        }
        let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        match total {
            Some(t) if t <= Self::MAX_DIM => Ok(Self { dims }),
            _ => Err(Error::InvalidParameter(format!(
                "total dimension of {dims:?} exceeds {}",
                Self::MAX_DIM
            ))),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total dimension (product of subsystem dimensions).
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Flat basis index of the product state `|levels[0]> ⊗ |levels[1]> ⊗ ...`.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} levels given for {} subsystems",
                levels.len(),
                self.dims.len()
            )));
        }
        let mut idx = 0;
        for (&l, &d) in levels.iter().zip(&self.dims) {
            if l >= d {
                return Err(Error::InvalidParameter(format!("level {l} outside subsystem of dimension {d}")));
            }
            idx = idx * d + l;
        }
        Ok(idx)
    }

    pub fn basis_ket(&self, levels: &[usize]) -> Result<CVector> {
        let mut v = CVector::zeros(self.dim());
        v[self.index_of(levels)?] = C64::new(1.0, 0.0);
        Ok(v)
    }

    /// The space with one more subsystem of dimension `dim` appended.
    pub fn extended(&self, dim: usize) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.push(dim);
        Self::new(dims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dims() {
        assert!(HilbertSpace::new(vec![]).is_err());
        assert!(HilbertSpace::new(vec![2, 0]).is_err());
        assert!(HilbertSpace::new(vec![8, 9]).is_err());
        assert_eq!(HilbertSpace::new(vec![8, 8]).unwrap().dim(), 64);
    }

    #[test]
    fn index_ordering() {
        let s = HilbertSpace::new(vec![3, 2]).unwrap();
        assert_eq!(s.index_of(&[0, 0]).unwrap(), 0);
        assert_eq!(s.index_of(&[0, 1]).unwrap(), 1);
        assert_eq!(s.index_of(&[2, 1]).unwrap(), 5);
        assert!(s.index_of(&[3, 0]).is_err());
    }
}
