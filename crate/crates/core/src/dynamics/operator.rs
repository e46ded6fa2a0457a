use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use super::HilbertSpace;
use crate::{CMatrix, Error, Result, C64};

/// Dense operator on a [`HilbertSpace`].
///
/// Arithmetic through `+`, `-` and `*` panics when the operands live on
/// different spaces; that is a construction bug, not a runtime condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a space of dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn zero(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self { space: space.clone(), matrix: CMatrix::zeros(d, d) }
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self { space: space.clone(), matrix: CMatrix::identity(d, d) }
    }

    /// Embeds a single-subsystem matrix into the full space (identity elsewhere).
    pub fn local(space: &HilbertSpace, subsystem: usize, local: &CMatrix) -> Result<Self> {
        let dims = space.dims();
        if subsystem >= dims.len() {
            return Err(Error::DimensionMismatch(format!("no subsystem {subsystem}")));
        }
        if local.nrows() != dims[subsystem] || local.ncols() != dims[subsystem] {
            return Err(Error::DimensionMismatch(format!(
                "local operator is {}x{}, subsystem {subsystem} has dimension {}",
                local.nrows(),
                local.ncols(),
                dims[subsystem]
            )));
        }
        let mut m = CMatrix::identity(1, 1);
        for (k, &d) in dims.iter().enumerate() {
            let factor = if k == subsystem { local.clone() } else { CMatrix::identity(d, d) };
            m = m.kronecker(&factor);
        }
        Ok(Self { space: space.clone(), matrix: m })
    }

    /// Bosonic annihilation operator on `subsystem`, truncated at its dimension.
    pub fn annihilation(space: &HilbertSpace, subsystem: usize) -> Result<Self> {
        let d = *space
            .dims()
            .get(subsystem)
            .ok_or_else(|| Error::DimensionMismatch(format!("no subsystem {subsystem}")))?;
        let mut a = CMatrix::zeros(d, d);
        for n in 1..d {
            a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        Self::local(space, subsystem, &a)
    }

    /// Transition operator `|to><from|` on `subsystem`.
    pub fn transition(space: &HilbertSpace, subsystem: usize, to: usize, from: usize) -> Result<Self> {
        let d = *space
            .dims()
            .get(subsystem)
            .ok_or_else(|| Error::DimensionMismatch(format!("no subsystem {subsystem}")))?;
        if to >= d || from >= d {
            return Err(Error::InvalidParameter(format!("levels {to},{from} outside dimension {d}")));
        }
        let mut m = CMatrix::zeros(d, d);
        m[(to, from)] = C64::new(1.0, 0.0);
        Self::local(space, subsystem, &m)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dag(&self) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { space: self.space.clone(), matrix: &self.matrix * c }
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    /// The same operator acting as `self ⊗ I` on `target`, whose leading
    /// subsystems must coincide with this operator's space.
    pub fn extend_to(&self, target: &HilbertSpace) -> Result<Self> {
        let own = self.space.dims();
        if target.dims().len() < own.len() || &target.dims()[..own.len()] != own {
            return Err(Error::DimensionMismatch(format!(
                "cannot extend {own:?} to {:?}",
                target.dims()
            )));
        }
        let extra: usize = target.dims()[own.len()..].iter().product();
        Ok(Self {
            space: target.clone(),
            matrix: self.matrix.kronecker(&CMatrix::identity(extra, extra)),
        })
    }

    pub(crate) fn check_space(&self, other: &HilbertSpace) -> Result<()> {
        if &self.space != other {
            return Err(Error::DimensionMismatch(format!(
                "operator on {:?} used with space {:?}",
                self.space.dims(),
                other.dims()
            )));
        }
        Ok(())
    }
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn assert_same(a: &Operator, b: &Operator) {
    assert_eq!(a.space, b.space, "operators act on different Hilbert spaces");
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_same(self, rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_same(self, rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_same(self, rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix * &rhs.matrix }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Mul<&Operator> for f64 {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        rhs * self
    }
}

/// Column-stacking vectorisation helpers.
///
/// With `vec(X)` stacking columns, `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. nalgebra
/// stores matrices column-major, so `vec` is a plain copy of the storage.
pub mod vectorize {
    use super::*;
    use crate::CVector;

    pub fn vec(m: &CMatrix) -> CVector {
        CVector::from_column_slice(m.as_slice())
    }

    pub fn unvec(v: &CVector, d: usize) -> CMatrix {
        DMatrix::from_column_slice(d, d, v.as_slice())
    }

    /// Superoperator of `X -> A X`.
    pub fn left(a: &CMatrix) -> CMatrix {
        let d = a.nrows();
        CMatrix::identity(d, d).kronecker(a)
    }

    /// Superoperator of `X -> X B`.
    pub fn right(b: &CMatrix) -> CMatrix {
        let d = b.nrows();
        b.transpose().kronecker(&CMatrix::identity(d, d))
    }

    /// Row functional `X -> Tr[A X]` as the vector `u` with `Tr[A X] = u^H vec(X)`.
    pub fn trace_functional(a: &CMatrix) -> CVector {
        vec(&a.adjoint())
    }
}
