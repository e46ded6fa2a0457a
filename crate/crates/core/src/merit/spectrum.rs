use std::f64::consts::PI;

use rustfft::FftPlanner;

use super::filter::FilterSpec;
use crate::dynamics::CorrelatorGrid;
use crate::{CMatrix, Error, Result, C64};

/// Largest padded transform length accepted (memory grows as its square).
pub const MAX_TRANSFORM: usize = 4096;

/// `S(ω, ν)` on a shared uniform angular-frequency axis.
#[derive(Debug, Clone)]
pub struct TwoColourSpectrum {
    pub omega_axis: Vec<f64>,
    pub values: CMatrix,
    /// Position of the zero-phonon line on `omega_axis`.
    pub zpl_offset: f64,
}

impl TwoColourSpectrum {
    pub fn d_omega(&self) -> f64 {
        self.omega_axis[1] - self.omega_axis[0]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.omega_axis.len()).map(|k| self.values[(k, k)].re).collect()
    }

    /// Largest `|S(ω,ν) − S(ν,ω)*|` relative to `max |S|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.omega_axis.len();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let v = self.values[(i, j)];
                scale = scale.max(v.norm());
                worst = worst.max((v - self.values[(j, i)].conj()).norm());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }

    /// `S_f(ω,ν) = h(ω) h*(ν) S(ω,ν)` for a filter centred relative to the ZPL.
    pub fn filtered(&self, filter: &FilterSpec) -> Self {
        let shifted = FilterSpec { kappa: filter.kappa, center: filter.center + self.zpl_offset };
        let h: Vec<C64> = self.omega_axis.iter().map(|&w| shifted.amplitude(w)).collect();
        let n = h.len();
        let values = CMatrix::from_fn(n, n, |i, j| h[i] * h[j].conj() * self.values[(i, j)]);
        Self { omega_axis: self.omega_axis.clone(), values, zpl_offset: self.zpl_offset }
    }
}

/// Trapezoid weights on `n` nodes (unit spacing).
fn trapezoid(n: usize) -> Vec<f64> {
    let mut w = vec![1.0; n];
    if n > 0 {
        w[0] = 0.5;
        w[n - 1] = 0.5;
    }
    w
}

/// Validates a square correlator grid and returns `(n, dt)`.
fn square_grid(grid: &CorrelatorGrid) -> Result<(usize, f64)> {
    let n = grid.t_axis.len();
    if n < 2 || grid.tau_axis.len() != n || grid.values.nrows() != n || grid.values.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "spectrum needs an N×N correlator on shared axes, got {}×{}",
            grid.values.nrows(),
            grid.values.ncols()
        )));
    }
    let dt = grid.dt();
    if (grid.dtau() - dt).abs() > 1e-9 * dt || grid.t_axis[0].abs() > 1e-12 * dt || grid.tau_axis[0].abs() > 1e-12 * dt {
        return Err(Error::InvalidAxis("t and τ axes must coincide and start at 0".into()));
    }
    Ok((n, dt))
}

/// `C(t_i, t_k) = ⟨a†(t_i) a(t_k)⟩`, the lower triangle from the
/// regression grid `G[t, τ] = ⟨a†(t+τ) a(t)⟩` and the rest by conjugation.
fn full_correlator(grid: &CorrelatorGrid, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, k| if i >= k { grid.values[(k, i - k)] } else { grid.values[(i, k - i)].conj() })
}

/// Two-colour spectrum of the emitted field,
/// `S(ω,ν) = κ ∬ e^{−iωt₁} e^{iνt₂} ⟨a†(t₁) a(t₂)⟩ dt₁ dt₂`, so that spectral
/// features sit at their model-frame frequencies.
///
/// The trapezoid-weighted correlator is zero-padded to `pad·N` points and
/// transformed by FFT; the frequency axis is the FFT grid, spanning `±π/dt`
/// with spacing `2π/(pad·N·dt)`. `max_rate`, when given, is checked against
/// the Nyquist limit.
pub fn two_colour_spectrum(grid: &CorrelatorGrid, rate: f64, pad: usize, max_rate: Option<f64>) -> Result<TwoColourSpectrum> {
    let (n, dt) = square_grid(grid)?;
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!("output rate {rate} must be >= 0")));
    }
    if pad < 1 {
        return Err(Error::InvalidParameter("padding factor must be >= 1".into()));
    }
    let m = pad * n + (pad * n) % 2;
    if m > MAX_TRANSFORM {
        return Err(Error::CoarseGrid(format!("transform length {m} exceeds {MAX_TRANSFORM}")));
    }
    if let Some(r) = max_rate {
        if PI / dt < 2.0 * r {
            return Err(Error::CoarseGrid(format!(
                "time step {dt:.3e} s resolves only |ω| < {:.3e} rad/s, model rates reach {r:.3e}",
                PI / dt
            )));
        }
    }

    let c = full_correlator(grid, n);
    let w = trapezoid(n);
    // column-major m×m buffer: column k (t₂ index), row i (t₁ index)
    let mut data = vec![C64::new(0.0, 0.0); m * m];
    for k in 0..n {
        for i in 0..n {
            data[k * m + i] = c[(i, k)] * (w[i] * w[k]);
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(m).process(&mut data);
    let mut rows = vec![C64::new(0.0, 0.0); m * m];
    for k in 0..m {
        for p in 0..m {
            rows[p * m + k] = data[k * m + p];
        }
    }
    drop(data);
    planner.plan_fft_inverse(m).process(&mut rows);

    let d_omega = 2.0 * PI / (m as f64 * dt);
    let half = m / 2;
    let unshift = |s: usize| (s + half) % m;
    let norm = rate * dt * dt;
    let values = CMatrix::from_fn(m, m, |a, b| rows[unshift(a) * m + unshift(b)] * norm);
    let omega_axis = (0..m).map(|s| (s as f64 - half as f64) * d_omega).collect();
    Ok(TwoColourSpectrum { omega_axis, values, zpl_offset: 0.0 })
}

/// `F = (1/2π) ∫ S(ω,ω) dω`.
pub fn zpl_power(s: &TwoColourSpectrum) -> f64 {
    s.diagonal().iter().sum::<f64>() * s.d_omega() / (2.0 * PI)
}

/// `I = ∬ |S(ω,ν)|² dω dν / (2π F)²`.
pub fn zpl_indistinguishability(s: &TwoColourSpectrum) -> Result<f64> {
    let f = zpl_power(s);
    if !(f > 1e-9) {
        return Err(Error::VanishingPower { power: f });
    }
    let dw = s.d_omega();
    let total: f64 = s.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dw * dw;
    Ok(total / (2.0 * PI * f).powi(2))
}

/// Time-domain partner of the spectral figures: `F = κ ∫⟨a†a⟩dt` and
/// `I = κ² ∬ |⟨a†(t₁)a(t₂)⟩|² dt₁dt₂ / F²`, trapezoid rule on the grid.
pub fn time_domain_zpl(grid: &CorrelatorGrid, rate: f64) -> Result<(f64, f64)> {
    let (n, dt) = square_grid(grid)?;
    let c = full_correlator(grid, n);
    let w = trapezoid(n);
    let f = rate * dt * (0..n).map(|i| w[i] * c[(i, i)].re).sum::<f64>();
    if !(f > 1e-9) {
        return Err(Error::VanishingPower { power: f });
    }
    let mut total = 0.0;
    for k in 0..n {
        for i in 0..n {
            total += w[i] * w[k] * c[(i, k)].norm_sqr();
        }
    }
    Ok((f, rate * rate * dt * dt * total / (f * f)))
}
