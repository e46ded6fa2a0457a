use std::f64::consts::PI;

use crate::models::{CavityCoupling, EmitterParams};
use crate::units::{wavelength, C_LIGHT};
use crate::{Error, Result};

/// Cavity description in the units used by photonic design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Mode volume in units of `(λ/n)³`, with λ the ZPL vacuum wavelength.
    pub v_m_rel: f64,
    /// Quality factor; the field decays as `exp(−ω_c t / 2Q)`.
    pub q: f64,
    /// Resonance angular frequency.
    pub omega_c: f64,
    /// Refractive index of the host material.
    pub n: f64,
}

impl CavityParams {
    pub fn new(v_m_rel: f64, q: f64, omega_c: f64, n: f64) -> Result<Self> {
        let p = Self { v_m_rel, q, omega_c, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_m_rel > 0.0 && self.v_m_rel.is_finite()) {
            return Err(Error::InvalidParameter(format!("mode volume {} must be > 0", self.v_m_rel)));
        }
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return Err(Error::InvalidParameter(format!("Q = {} must be >= 1", self.q)));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega_c = {} must be > 0", self.omega_c)));
        }
        if !(self.n >= 1.0 && self.n.is_finite()) {
            return Err(Error::InvalidParameter(format!("refractive index {} must be >= 1", self.n)));
        }
        Ok(())
    }

    /// Cavity energy decay rate `κ_c = ω_c / Q`.
    pub fn kappa(&self) -> f64 {
        self.omega_c / self.q
    }

    /// Mode volume in m³ given the emitter's ZPL frequency.
    pub fn mode_volume(&self, em: &EmitterParams) -> f64 {
        self.v_m_rel * (wavelength(em.omega0) / self.n).powi(3)
    }

    /// `(g, κ_c)` for an emitter at the field maximum with aligned dipole.
    pub fn coupling(&self, em: &EmitterParams) -> Result<CavityCoupling> {
        let g = coupling_from_geometry(self, em, &CouplingGeometry::ideal())?;
        CavityCoupling::new(g, self.kappa())
    }
}

/// Position and orientation dependence of the coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingGeometry {
    /// Field-magnitude structure factor `f(r)` in `[0, 1]`.
    pub f_r: f64,
    /// Polarisation overlap `|ε̂_d · ε̂_c|` in `[0, 1]`.
    pub eta: f64,
    /// Mode volume (m³), if known.
    pub v_m: f64,
    /// Effective mode volume `V_m / f(r)²` (infinite when `f(r) = 0`).
    pub v_m_eff: f64,
}

impl CouplingGeometry {
    /// Emitter at the field maximum, dipole along the field.
    pub fn ideal() -> Self {
        Self { f_r: 1.0, eta: 1.0, v_m: f64::NAN, v_m_eff: f64::NAN }
    }

    pub fn new(f_r: f64, eta: f64, v_m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f_r) || !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!("f(r) = {f_r} and eta = {eta} must lie in [0, 1]")));
        }
        let v_m_eff = if f_r > 0.0 { v_m / (f_r * f_r) } else { f64::INFINITY };
        Ok(Self { f_r, eta, v_m, v_m_eff })
    }
}

/// Coupling rate `g = η f(r) √(3π c³ γ_zpl / (2 ω₀² n³ V_m))` with
/// `γ_zpl = D_W γ`.
///
/// The prefactor is fixed so that the weak-coupling Purcell factor
/// `4g²/(κ_c γ_zpl)` equals `(3/4π²)(λ/n)³ Q/V_m` on resonance.
pub fn coupling_from_geometry(cav: &CavityParams, em: &EmitterParams, geom: &CouplingGeometry) -> Result<f64> {
    coupling_for_rate(cav, em, geom, em.zpl_rate())
}

/// As [`coupling_from_geometry`] with an explicit radiative rate of the
/// cavity-coupled dipole in place of `D_W γ`.
pub fn coupling_for_rate(cav: &CavityParams, em: &EmitterParams, geom: &CouplingGeometry, radiative_rate: f64) -> Result<f64> {
    cav.validate()?;
    em.validate()?;
    if !(radiative_rate > 0.0 && radiative_rate.is_finite()) {
        return Err(Error::InvalidParameter(format!("radiative rate {radiative_rate} must be > 0")));
    }
    let v_m = cav.mode_volume(em);
    if !(v_m > 0.0) {
        return Err(Error::InvalidParameter("zero mode volume".into()));
    }
    let bare = (3.0 * PI * C_LIGHT.powi(3) * radiative_rate / (2.0 * em.omega0.powi(2) * cav.n.powi(3) * v_m)).sqrt();
    Ok(geom.eta * geom.f_r * bare)
}

/// Closed-form Purcell factor `(3/4π²)(λ/n)³ Q / V_m`.
pub fn purcell_factor(cav: &CavityParams) -> f64 {
    3.0 / (4.0 * PI * PI) * cav.q / cav.v_m_rel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{to_angular, MHZ, THZ};

    fn nv() -> EmitterParams {
        EmitterParams::new(to_angular(30.0, MHZ, false), 1e12, 0.02, to_angular(470.0, THZ, false)).unwrap()
    }

    #[test]
    fn bow_tie_purcell_factor() {
        let em = nv();
        let cav = CavityParams::new(0.001, 200.0, em.omega0, 2.0).unwrap();
        let c = cav.coupling(&em).unwrap();
        let fp = 4.0 * c.g * c.g / (c.kappa * em.zpl_rate());
        let closed = 3.0 / (4.0 * PI * PI) * 200.0 / 0.001;
        assert!((fp - closed).abs() < 1e-10 * closed);
        assert!((closed - 1.5198e4).abs() < 1.0);
    }

    #[test]
    fn inverse_square_root_scaling() {
        let em = nv();
        let g1 = CavityParams::new(0.01, 500.0, em.omega0, 2.0).unwrap().coupling(&em).unwrap().g;
        let g4 = CavityParams::new(0.04, 500.0, em.omega0, 2.0).unwrap().coupling(&em).unwrap().g;
        let g_half = CavityParams::new(0.005, 500.0, em.omega0, 2.0).unwrap().coupling(&em).unwrap().g;
        assert!((g4 - g1 / 2.0).abs() < 1e-12 * g1);
        assert!((g_half / g1 - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn misaligned_dipole_decouples() {
        let em = nv();
        let cav = CavityParams::new(0.01, 500.0, em.omega0, 2.0).unwrap();
        let geom = CouplingGeometry::new(1.0, 0.0, 1e-21).unwrap();
        assert_eq!(coupling_from_geometry(&cav, &em, &geom).unwrap(), 0.0);
        let off = CouplingGeometry::new(0.0, 1.0, 1e-21).unwrap();
        assert!(off.v_m_eff.is_infinite());
    }

    #[test]
    fn rejects_bad_cavity() {
        assert!(CavityParams::new(0.0, 100.0, 1e15, 2.0).is_err());
        assert!(CavityParams::new(0.1, 0.5, 1e15, 2.0).is_err());
        assert!(CavityParams::new(0.1, 100.0, 1e15, 0.9).is_err());
    }
}
