use std::f64::consts::PI;

use crate::models::SidebandModel;
use crate::{Error, Result, C64};

/// Lorentzian spectral filter of full width `kappa`, centred at `center`
/// (angular offset from the zero-phonon line).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub kappa: f64,
    pub center: f64,
}

impl FilterSpec {
    pub fn new(kappa: f64, center: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidParameter(format!("filter width {kappa} must be > 0")));
        }
        Ok(Self { kappa, center })
    }

    /// Amplitude response `h(ω) = (iκ/2) / (i(ω − c) − κ/2)`.
    pub fn amplitude(&self, omega: f64) -> C64 {
        let half = 0.5 * self.kappa;
        C64::new(0.0, half) / C64::new(-half, omega - self.center)
    }

    /// Power transmission `|h(ω)|² = (κ/2)² / ((ω − c)² + (κ/2)²)`.
    pub fn transmission(&self, omega: f64) -> f64 {
        let half = 0.5 * self.kappa;
        let x = omega - self.center;
        half * half / (x * x + half * half)
    }
}

/// Filters applied in series; power transmissions multiply.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterChain(pub Vec<FilterSpec>);

impl FilterChain {
    pub fn then(mut self, f: FilterSpec) -> Self {
        self.0.push(f);
        self
    }

    pub fn transmission(&self, omega: f64) -> f64 {
        self.0.iter().map(|f| f.transmission(omega)).product()
    }
}

/// Sideband power transmitted by the cavity acting as a filter:
/// `F_SB = ∫ |h_c(ω)|² S⁰_SB(ω) dω`.
pub fn sideband_power(model: &SidebandModel, cavity_filter: &FilterSpec) -> f64 {
    // Lorentzian ⊗ Lorentzian: half widths add.
    let half_c = 0.5 * cavity_filter.kappa;
    model
        .components()
        .iter()
        .map(|l| {
            let half = 0.5 * l.fwhm + half_c;
            let x = l.center - cavity_filter.center;
            l.weight * half_c * half / (x * x + half * half)
        })
        .sum()
}

/// Sideband power through an arbitrary filter chain, evaluated exactly by
/// residues of the rational integrand.
pub fn sideband_power_through(model: &SidebandModel, filters: &FilterChain) -> f64 {
    model
        .components()
        .iter()
        .map(|l| {
            let mut poles: Vec<(f64, f64)> = Vec::with_capacity(filters.0.len() + 1);
            poles.push((l.center, 0.5 * l.fwhm));
            let mut prefactor = l.weight * l.fwhm / (2.0 * PI);
            for f in &filters.0 {
                let half = 0.5 * f.kappa;
                poles.push((f.center, half));
                prefactor *= half * half;
            }
            prefactor * lorentzian_product_integral(&poles)
        })
        .sum()
}

/// `∫ Π_k 1/((x − c_k)² + a_k²) dx` over the real line, all `a_k > 0`.
///
/// Closing the contour in the upper half-plane picks up the simple poles
/// `z_k = c_k + i a_k`. Coincident poles are split by a relative 1e-7 so that
/// the simple-pole formula applies.
pub fn lorentzian_product_integral(terms: &[(f64, f64)]) -> f64 {
    let mut terms = terms.to_vec();
    for k in 1..terms.len() {
        for j in 0..k {
            let (cj, aj) = terms[j];
            let (ck, ak) = terms[k];
            let scale = aj.max(ak);
            if (ck - cj).abs() < 1e-7 * scale && (ak - aj).abs() < 1e-7 * scale {
                terms[k].1 = ak * (1.0 + 1e-7 * (k as f64 + 1.0));
            }
        }
    }
    let mut total = C64::new(0.0, 0.0);
    for (k, &(ck, ak)) in terms.iter().enumerate() {
        let z = C64::new(ck, ak);
        let mut term = C64::new(1.0 / ak, 0.0);
        for (j, &(cj, aj)) in terms.iter().enumerate() {
            if j != k {
                let d = z - cj;
                term /= d * d + aj * aj;
            }
        }
        total += term;
    }
    PI * total.re
}
