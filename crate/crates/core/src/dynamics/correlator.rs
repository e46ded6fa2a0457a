use super::vectorize::{left, trace_functional, vec};
use super::{DensityOperator, Operator, Propagator, Superoperator};
use crate::{CMatrix, CVector, Error, Result};

/// Two-time correlator `G[t, τ] = ⟨A(t+τ) B(t)⟩` on uniform axes.
#[derive(Debug, Clone)]
pub struct CorrelatorGrid {
    pub t_axis: Vec<f64>,
    pub tau_axis: Vec<f64>,
    /// `values[(i, j)]` holds `G[t_axis[i], tau_axis[j]]`.
    pub values: CMatrix,
}

impl CorrelatorGrid {
    /// Spacing of the `t` axis (zero for a single sample).
    pub fn dt(&self) -> f64 {
        axis_step(&self.t_axis)
    }

    pub fn dtau(&self) -> f64 {
        axis_step(&self.tau_axis)
    }
}

/// `0, dt, …, (n−1)dt`.
pub fn uniform_axis(n: usize, dt: f64) -> Vec<f64> {
    (0..n).map(|k| k as f64 * dt).collect()
}

fn axis_step(axis: &[f64]) -> f64 {
    if axis.len() < 2 {
        0.0
    } else {
        axis[1] - axis[0]
    }
}

pub(crate) fn check_uniform(axis: &[f64], name: &str) -> Result<f64> {
    if axis.is_empty() {
        return Err(Error::InvalidAxis(format!("{name} axis is empty")));
    }
    if axis[0] != 0.0 {
        return Err(Error::InvalidAxis(format!("{name} axis must start at 0, starts at {}", axis[0])));
    }
    let dt = axis_step(axis);
    if axis.len() > 1 && !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidAxis(format!("{name} axis must be strictly increasing")));
    }
    for (k, &t) in axis.iter().enumerate() {
        let expect = k as f64 * dt;
        if (t - expect).abs() > 1e-9 * expect.max(dt) {
            return Err(Error::InvalidAxis(format!("{name} axis is not uniform at index {k}")));
        }
    }
    Ok(dt)
}

/// Two-time correlator by the quantum regression theorem:
/// `⟨A(t+τ) B(t)⟩ = Tr[A e^{Lτ}(B ρ(t))]`.
///
/// Both axes are stepped with a single precomputed propagator each, and the
/// grid is assembled as one matrix product of the `B ρ(t)` columns against the
/// back-propagated `A` functionals.
pub fn two_time_correlator(
    l: &Superoperator,
    rho0: &DensityOperator,
    a: &Operator,
    b: &Operator,
    t_axis: &[f64],
    tau_axis: &[f64],
) -> Result<CorrelatorGrid> {
    let space = l.space();
    a.check_space(space)?;
    b.check_space(space)?;
    if rho0.space() != space {
        return Err(Error::DimensionMismatch("initial state and generator differ".into()));
    }
    let dt = check_uniform(t_axis, "t")?;
    let dtau = check_uniform(tau_axis, "tau")?;
    let n2 = space.dim() * space.dim();

    let left_b = left(b.matrix());
    let mut sources = CMatrix::zeros(n2, t_axis.len());
    let step_t = Propagator::new(l, if t_axis.len() > 1 { dt } else { 0.0 })?;
    let mut r = vec(rho0.matrix());
    for i in 0..t_axis.len() {
        if i > 0 {
            r = step_t.step_matrix() * &r;
            if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Propagation { time: t_axis[i] });
            }
        }
        sources.set_column(i, &(&left_b * &r));
    }

    // w_j = (e^{L τ_j})^H u  so that  Tr[A e^{Lτ_j} X] = w_j^H vec(X)
    let step_tau = Propagator::new(l, if tau_axis.len() > 1 { dtau } else { 0.0 })?;
    let back = step_tau.step_matrix().adjoint();
    let mut w: CVector = trace_functional(a.matrix());
    let mut functionals = CMatrix::zeros(n2, tau_axis.len());
    for j in 0..tau_axis.len() {
        if j > 0 {
            w = &back * &w;
            if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Propagation { time: tau_axis[j] });
            }
        }
        functionals.set_column(j, &w);
    }

    let values = sources.transpose() * functionals.conjugate();
    Ok(CorrelatorGrid { t_axis: t_axis.to_vec(), tau_axis: tau_axis.to_vec(), values })
}
