//! Dense Lindblad master-equation engine.
//!
//! Density operators are vectorised by column stacking, so a superoperator is a
//! `d² × d²` matrix with `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. Every routine here is a
//! pure function of its inputs.

mod correlator;
mod integrals;
mod lyapunov;
mod operator;
mod space;
mod state;

pub use correlator::{two_time_correlator, uniform_axis, CorrelatorGrid};
pub use integrals::{emission_integrals, integrated_expectation, DeflatedGenerator, EmissionIntegrals};
pub use lyapunov::solve_lyapunov;
pub use operator::{vectorize, Operator};
pub use space::HilbertSpace;
pub use state::DensityOperator;

use operator::max_abs_diff;
use vectorize::{left, right, unvec, vec};

use crate::{CMatrix, Error, Result, C64};

/// One Lindblad dissipator `rate · L_O[ρ]` with `L_O[ρ] = OρO† − ½{O†O, ρ}`.
#[derive(Debug, Clone)]
pub struct CollapseChannel {
    pub rate: f64,
    pub operator: Operator,
}

impl CollapseChannel {
    pub fn new(rate: f64, operator: Operator) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!("collapse rate {rate} must be finite and >= 0")));
        }
        Ok(Self { rate, operator })
    }
}

/// Liouvillian acting on column-stacked density operators.
#[derive(Debug, Clone)]
pub struct Superoperator {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn from_matrix(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.dim() * space.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!("superoperator must be {n}x{n}")));
        }
        Ok(Self { space, matrix })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `L ρ` as a plain matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvec(&(&self.matrix * vec(rho)), self.space.dim())
    }

    /// Largest entry magnitude; used as the natural rate scale of the model.
    pub fn rate_scale(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `exp(L t)` as a dense matrix.
    pub fn propagator(&self, t: f64) -> Result<CMatrix> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("propagation time {t} must be finite and >= 0")));
        }
        if t == 0.0 {
            let n = self.matrix.nrows();
            return Ok(CMatrix::identity(n, n));
        }
        let p = (&self.matrix * C64::new(t, 0.0)).exp();
        if p.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Propagation { time: t });
        }
        Ok(p)
    }
}

/// Builds `L = −i[H,·] + Σ rate · L_O`.
pub fn build_liouvillian(h: &Operator, channels: &[CollapseChannel]) -> Result<Superoperator> {
    let space = h.space().clone();
    for ch in channels {
        ch.operator.check_space(&space)?;
    }
    let hm = h.matrix();
    let scale = hm.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let herm = max_abs_diff(hm, &hm.adjoint());
    if herm > 1e-10 * scale {
        return Err(Error::NotHermitian { deviation: herm });
    }
    let mi = C64::new(0.0, -1.0);
    let mut l = (left(hm) - right(hm)) * mi;
    for ch in channels {
        if ch.rate == 0.0 {
            continue;
        }
        let o = ch.operator.matrix();
        let odo = o.adjoint() * o;
        let half = C64::new(0.5, 0.0);
        let diss = o.conjugate().kronecker(o) - (left(&odo) + right(&odo)) * half;
        l += diss * C64::new(ch.rate, 0.0);
    }
    Ok(Superoperator { space, matrix: l })
}

/// `ρ(t) = exp(L t) ρ0`.
pub fn evolve(l: &Superoperator, rho0: &DensityOperator, t: f64) -> Result<DensityOperator> {
    check_pair(l, rho0)?;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let p = l.propagator(t)?;
    propagate_with(&p, l, rho0)
}

fn propagate_with(p: &CMatrix, l: &Superoperator, rho: &DensityOperator) -> Result<DensityOperator> {
    let v = p * vec(rho.matrix());
    DensityOperator::unchecked(l.space.clone(), unvec(&v, l.space.dim()))
}

/// Fixed-step propagator `exp(L dt)` for repeated stepping on uniform grids.
pub struct Propagator<'a> {
    generator: &'a Superoperator,
    step: CMatrix,
    dt: f64,
}

impl<'a> Propagator<'a> {
    pub fn new(generator: &'a Superoperator, dt: f64) -> Result<Self> {
        Ok(Self { generator, step: generator.propagator(dt)?, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_matrix(&self) -> &CMatrix {
        &self.step
    }

    /// States at `0, dt, 2dt, …, (n−1)dt`.
    pub fn trajectory(&self, rho0: &DensityOperator, n: usize) -> Result<Vec<DensityOperator>> {
        check_pair(self.generator, rho0)?;
        let mut out = Vec::with_capacity(n);
        let mut cur = rho0.clone();
        for k in 0..n {
            if k > 0 {
                cur = propagate_with(&self.step, self.generator, &cur)?;
                if cur.matrix().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Propagation { time: k as f64 * self.dt });
                }
            }
            out.push(cur.clone());
        }
        Ok(out)
    }
}

/// `Tr[A ρ]`.
pub fn expectation(a: &Operator, rho: &DensityOperator) -> Result<C64> {
    a.check_space(rho.space())?;
    Ok((a.matrix() * rho.matrix()).trace())
}

/// Smallest time (within 2 %) after which `⟨obs⟩` has dropped below
/// `tolerance · ⟨obs⟩(0)`. `obs` must be non-increasing along the flow
/// (e.g. the total excitation number of an undriven model).
pub fn settle_time(l: &Superoperator, rho0: &DensityOperator, obs: &Operator, tolerance: f64) -> Result<f64> {
    let initial = expectation(obs, rho0)?.re;
    if initial <= 0.0 {
        return Ok(0.0);
    }
    let target = tolerance * initial;
    let remaining = |t: f64| -> Result<f64> { Ok(expectation(obs, &evolve(l, rho0, t)?)?.re) };
    let scale = l.rate_scale();
    if scale == 0.0 {
        return Err(Error::InvalidParameter("generator is zero; nothing decays".into()));
    }
    let mut hi = 1.0 / scale;
    let mut lo = 0.0;
    let mut doublings = 0;
    while remaining(hi)? > target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::InvalidParameter("observable does not decay".into()));
        }
    }
    while hi - lo > 0.02 * hi {
        let mid = 0.5 * (lo + hi);
        if remaining(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn check_pair(l: &Superoperator, rho: &DensityOperator) -> Result<()> {
    if l.space() != rho.space() {
        return Err(Error::DimensionMismatch(format!(
            "generator on {:?}, state on {:?}",
            l.space().dims(),
            rho.space().dims()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit() -> HilbertSpace {
        HilbertSpace::new(vec![2]).unwrap()
    }

    #[test]
    fn pure_decay() {
        let s = qubit();
        let sigma = Operator::transition(&s, 0, 0, 1).unwrap();
        let gamma = 2.5e8;
        let l = build_liouvillian(&Operator::zero(&s), &[CollapseChannel::new(gamma, sigma.clone()).unwrap()]).unwrap();
        let rho0 = DensityOperator::basis(&s, &[1]).unwrap();
        let n = &sigma.dag() * &sigma;
        for &t in &[0.0, 0.3 / gamma, 1.0 / gamma, 4.0 / gamma] {
            let pe = expectation(&n, &evolve(&l, &rho0, t).unwrap()).unwrap().re;
            assert!((pe - (-gamma * t).exp()).abs() < 1e-10, "t={t}: {pe}");
        }
    }

    #[test]
    fn dephasing_halves_coherence_rate() {
        let s = qubit();
        let sigma = Operator::transition(&s, 0, 0, 1).unwrap();
        let n = &sigma.dag() * &sigma;
        let gs = 3.0e11;
        let l = build_liouvillian(&Operator::zero(&s), &[CollapseChannel::new(gs, n).unwrap()]).unwrap();
        let half = C64::new(0.5, 0.0);
        let rho0 = DensityOperator::new(s, CMatrix::from_element(2, 2, half)).unwrap();
        let t = 2.0 / gs;
        let rho = evolve(&l, &rho0, t).unwrap();
        assert!((rho.matrix()[(0, 1)].re - 0.5 * (-gs * t / 2.0).exp()).abs() < 1e-12);
        assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((rho.matrix()[(1, 1)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn vacuum_rabi_period() {
        // |e,0> <-> |g,1> exchange with H = g X, populations return after π/g
        let s = HilbertSpace::new(vec![2, 2]).unwrap();
        let sigma = Operator::transition(&s, 0, 0, 1).unwrap();
        let a = Operator::annihilation(&s, 1).unwrap();
        let g = 1.0e11;
        let x = &(&sigma.dag() * &a) + &(&sigma * &a.dag());
        let l = build_liouvillian(&(&x * g), &[]).unwrap();
        let rho0 = DensityOperator::basis(&s, &[1, 0]).unwrap();
        let ne = &sigma.dag() * &sigma;
        let period = std::f64::consts::PI / g;
        let back = expectation(&ne, &evolve(&l, &rho0, period).unwrap()).unwrap().re;
        let half = expectation(&ne, &evolve(&l, &rho0, period / 2.0).unwrap()).unwrap().re;
        assert!((back - 1.0).abs() < 1e-9);
        assert!(half.abs() < 1e-9);
    }

    #[test]
    fn rejects_non_hermitian_and_mismatch() {
        let s = qubit();
        let sigma = Operator::transition(&s, 0, 0, 1).unwrap();
        assert!(matches!(build_liouvillian(&sigma, &[]), Err(Error::NotHermitian { .. })));
        let other = HilbertSpace::new(vec![3]).unwrap();
        let ch = CollapseChannel::new(1.0, Operator::identity(&other)).unwrap();
        assert!(matches!(build_liouvillian(&Operator::zero(&s), &[ch]), Err(Error::DimensionMismatch(_))));
        assert!(CollapseChannel::new(-1.0, sigma).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let s = qubit();
        let sigma = Operator::transition(&s, 0, 0, 1).unwrap();
        let l = build_liouvillian(&Operator::zero(&s), &[CollapseChannel::new(1e9, sigma).unwrap()]).unwrap();
        let rho0 = DensityOperator::basis(&s, &[1]).unwrap();
        assert_eq!(evolve(&l, &rho0, 0.0).unwrap(), rho0);
    }

    #[test]
    fn settle_time_brackets_decay() {
        let s = qubit();
        let sigma = Operator::transition(&s, 0, 0, 1).unwrap();
        let gamma = 1e9;
        let l = build_liouvillian(&Operator::zero(&s), &[CollapseChannel::new(gamma, sigma.clone()).unwrap()]).unwrap();
        let rho0 = DensityOperator::basis(&s, &[1]).unwrap();
        let t = settle_time(&l, &rho0, &(&sigma.dag() * &sigma), 1e-6).unwrap();
        let exact = 1e6f64.ln() / gamma;
        assert!(t >= exact && t < exact * 1.03, "{t} vs {exact}");
    }
}
