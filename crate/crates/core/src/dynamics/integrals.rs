//! Closed-form time integrals over the full decay of an undriven model.
//!
//! An undriven dissipative model relaxes to a unique steady state `ρ_ss`. Any
//! quantity that vanishes on `ρ_ss` can be integrated to `t = ∞` exactly with
//! the deflated generator `L' = L − s·vec(ρ_ss)·1ᵀ`, where `1ᵀ` is the trace
//! functional: `L'` agrees with `L` on trace-free vectors and moves the zero
//! eigenvalue to `−s`, so it is invertible and stable.

use super::solve_lyapunov;
use super::vectorize::{left, trace_functional, unvec, vec};
use super::{DensityOperator, Operator, Superoperator};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Relative size below which a steady-state overlap counts as zero.
const OVERLAP_TOL: f64 = 1e-9;

/// `L'` together with the steady state it was deflated on.
pub struct DeflatedGenerator {
    matrix: CMatrix,
    steady: CVector,
    dim: usize,
}

impl DeflatedGenerator {
    pub fn new(l: &Superoperator) -> Result<Self> {
        let d = l.space().dim();
        let n = d * d;
        let trace_row = trace_functional(&CMatrix::identity(d, d));
        // Replace the first row (|0><0| population balance, which takes part in
        // the trace dependency among the rows) with the normalisation condition.
        let mut m = l.matrix().clone();
        for k in 0..n {
            m[(0, k)] = trace_row[k].conj();
        }
        let mut rhs = CVector::zeros(n);
        rhs[0] = C64::new(1.0, 0.0);
        let steady = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::SteadyState("generator has more than one stationary state".into()))?;
        let scale = l.rate_scale();
        let residual = (l.matrix() * &steady).norm() / (scale * steady.norm());
        if !residual.is_finite() || residual > 1e-8 {
            return Err(Error::SteadyState(format!("stationary state residual {residual:.2e}")));
        }
        let deflation = &steady * trace_row.adjoint() * C64::new(scale, 0.0);
        Ok(Self { matrix: l.matrix() - deflation, steady, dim: d })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn steady_state(&self) -> CMatrix {
        unvec(&self.steady, self.dim)
    }

    /// `ρ0 − ρ_ss` as a vector (trace zero).
    fn transient(&self, rho0: &DensityOperator) -> CVector {
        vec(rho0.matrix()) - &self.steady
    }

    /// `∫₀^∞ e^{L't} x dt = −L'^{-1} x`.
    fn integrate(&self, x: &CVector) -> Result<CVector> {
        let sol = self
            .matrix
            .clone()
            .lu()
            .solve(x)
            .ok_or_else(|| Error::Singular("deflated generator is singular".into()))?;
        Ok(-sol)
    }

    fn check_vanishes(&self, what: &str, value: C64, reference: f64) -> Result<()> {
        if value.norm() > OVERLAP_TOL * reference.max(1.0) {
            return Err(Error::SteadyState(format!(
                "{what} does not vanish on the stationary state ({value}); its time integral diverges"
            )));
        }
        Ok(())
    }
}

/// `∫₀^∞ Tr[A ρ(t)] dt`, requiring `Tr[A ρ_ss] = 0`.
pub fn integrated_expectation(l: &Superoperator, rho0: &DensityOperator, a: &Operator) -> Result<C64> {
    a.check_space(l.space())?;
    let gen = DeflatedGenerator::new(l)?;
    let u = trace_functional(a.matrix());
    let a_norm = a.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    gen.check_vanishes("observable", u.dotc(&gen.steady), a_norm)?;
    let integral = gen.integrate(&gen.transient(rho0))?;
    Ok(u.dotc(&integral))
}

/// Exact emission integrals of the output channel `O`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionIntegrals {
    /// `∫₀^∞ ⟨O†O⟩ dt`.
    pub population: f64,
    /// `∫₀^∞∫₀^∞ |⟨O†(t₁) O(t₂)⟩|² dt₁ dt₂` over the full quadrant.
    pub coherence: f64,
}

impl EmissionIntegrals {
    /// Photon number leaving through a port of the given rate.
    pub fn photon_number(&self, rate: f64) -> f64 {
        rate * self.population
    }

    /// Normalised two-photon overlap; independent of the port rate.
    pub fn indistinguishability(&self) -> Result<f64> {
        if !(self.population > 1e-300) {
            return Err(Error::VanishingPower { power: self.population });
        }
        Ok(self.coherence / (self.population * self.population))
    }
}

/// Computes [`EmissionIntegrals`] without a time grid.
///
/// With `C(t, t+τ) = u^H e^{L'τ} (I⊗O) e^{L't} δρ0` the half-quadrant integral
/// of `|C|²` is `u^H X u`, where `L'Y + YL'^H = −δρ0 δρ0^H` and
/// `L'X + XL'^H = −(I⊗O) Y (I⊗O)^H`. Requires `O ρ_ss = 0`.
pub fn emission_integrals(l: &Superoperator, rho0: &DensityOperator, o: &Operator) -> Result<EmissionIntegrals> {
    o.check_space(l.space())?;
    if rho0.space() != l.space() {
        return Err(Error::DimensionMismatch("initial state and generator differ".into()));
    }
    let gen = DeflatedGenerator::new(l)?;
    let apply_o = left(o.matrix());
    let o_norm = o.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let annihilated = (&apply_o * &gen.steady).norm();
    gen.check_vanishes("emission operator", C64::new(annihilated, 0.0), o_norm)?;

    let number = trace_functional(&(o.matrix().adjoint() * o.matrix()));
    let delta = gen.transient(rho0);
    let population = number.dotc(&gen.integrate(&delta)?).re;

    let y = solve_lyapunov(gen.matrix(), &(&delta * delta.adjoint()))?;
    let w = &apply_o * y * apply_o.adjoint();
    let x = solve_lyapunov(gen.matrix(), &w)?;
    let u = trace_functional(&o.matrix().adjoint());
    let half = u.dotc(&(x * &u)).re;
    Ok(EmissionIntegrals { population, coherence: 2.0 * half })
}
