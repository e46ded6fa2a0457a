//! Photon-source figures of merit: ZPL power and indistinguishability,
//! sideband power through the cavity and external filters, total
//! indistinguishability and filter efficiency.

mod exact;
mod filter;
mod pipeline;
mod spectrum;

pub use exact::{evaluate_exact, zpl_metrics, Evaluation, ZplMetrics};
pub use filter::{lorentzian_product_integral, sideband_power, sideband_power_through, FilterChain, FilterSpec};
pub use pipeline::{evaluate_grid, grid_spectrum, GridOptions, GridSpectrum};
pub use spectrum::{
    time_domain_zpl, two_colour_spectrum, zpl_indistinguishability, zpl_power, TwoColourSpectrum, MAX_TRANSFORM,
};

use crate::models::SidebandModel;
use crate::{Error, Result};

/// Summary metrics of a single-photon source.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FigureOfMerit {
    pub i_zpl: f64,
    pub f_zpl: f64,
    pub f_sb: f64,
    pub i_total: f64,
    /// Fraction of the unfiltered power that survives filtering (1 unfiltered).
    pub beta: f64,
}

impl FigureOfMerit {
    /// Unfiltered figures from ZPL metrics and transmitted sideband power.
    pub fn unfiltered(i_zpl: f64, f_zpl: f64, f_sb: f64) -> Result<Self> {
        let i_total = total_indistinguishability(i_zpl, f_zpl, f_sb)?;
        Ok(Self { i_zpl, f_zpl, f_sb, i_total, beta: 1.0 })
    }

    /// Filtered figures; `beta` is taken relative to `reference`.
    pub fn filtered(i_zpl: f64, f_zpl: f64, f_sb: f64, reference: &FigureOfMerit) -> Result<Self> {
        let i_total = total_indistinguishability(i_zpl, f_zpl, f_sb)?;
        let beta = (f_zpl + f_sb) / (reference.f_zpl + reference.f_sb);
        Ok(Self { i_zpl, f_zpl, f_sb, i_total, beta })
    }
}

/// `I = I_ZPL · (F_ZPL / (F_ZPL + F_SB))²`; the sideband is incoherent.
pub fn total_indistinguishability(i_zpl: f64, f_zpl: f64, f_sb: f64) -> Result<f64> {
    let total = f_zpl + f_sb;
    if !(total > 0.0) {
        return Err(Error::VanishingPower { power: total });
    }
    Ok(i_zpl * (f_zpl / total).powi(2))
}

/// Sideband power through the cavity (if any) followed by `extra` filters.
pub(crate) fn transmitted_sideband(sideband: &SidebandModel, cavity: Option<&FilterSpec>, extra: &[FilterSpec]) -> f64 {
    let mut chain = FilterChain::default();
    if let Some(c) = cavity {
        chain = chain.then(*c);
    }
    for f in extra {
        chain = chain.then(*f);
    }
    match chain.0.len() {
        0 => sideband.total_weight(),
        1 => sideband_power(sideband, &chain.0[0]),
        _ => sideband_power_through(sideband, &chain),
    }
}

/// Output filter formed by the cavity of a cavity model: width `κ_c`,
/// centred at the cavity (frame origin) relative to the ZPL.
pub fn cavity_filter(kappa: f64, model: &crate::models::EmitterCavityModel) -> Result<FilterSpec> {
    FilterSpec::new(kappa, -model.zpl_offset)
}
