use std::f64::consts::PI;

use super::spectrum::{two_colour_spectrum, zpl_indistinguishability, zpl_power, TwoColourSpectrum, MAX_TRANSFORM};
use super::{transmitted_sideband, Evaluation, FigureOfMerit, FilterSpec};
use crate::dynamics::{integrated_expectation, settle_time, two_time_correlator, uniform_axis, CorrelatorGrid};
use crate::models::{EmitterCavityModel, SidebandModel};
use crate::{Error, Result};

/// Sampling of the grid route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Half-width of the frequency window in units of the model's largest rate.
    pub window: f64,
    pub min_points: usize,
    pub max_points: usize,
    /// Zero-padding factor of the time grid before transforming.
    pub pad: usize,
    /// Remaining excitation at which the time axis is truncated.
    pub tail: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { window: 10.0, min_points: 1024, max_points: 2048, pad: 2, tail: 1e-6 }
    }
}

/// Correlator and two-colour spectrum of a model's output port.
#[derive(Debug, Clone)]
pub struct GridSpectrum {
    pub grid: CorrelatorGrid,
    pub spectrum: TwoColourSpectrum,
    pub rate: f64,
}

/// Samples `⟨a†(t+τ)a(t)⟩` on a square grid with `dt = π/(window·max_rate)`,
/// long enough for the excitation to fall below `tail`, and transforms it.
pub fn grid_spectrum(model: &EmitterCavityModel, opts: &GridOptions) -> Result<GridSpectrum> {
    if !(opts.window >= 2.0) || opts.pad < 1 || opts.min_points < 2 || !(opts.tail > 0.0 && opts.tail < 1.0) {
        return Err(Error::InvalidParameter(format!("invalid grid options {opts:?}")));
    }
    let l = model.liouvillian()?;
    let dt = PI / (opts.window * model.max_rate);
    let t_end = settle_time(&l, &model.initial_state, &model.excitation, opts.tail)?;
    let n = opts.min_points.max((t_end / dt).ceil() as usize + 1);
    let cap = opts.max_points.min(MAX_TRANSFORM / opts.pad);
    if n > cap {
        return Err(Error::CoarseGrid(format!(
            "decay over {t_end:.3e} s needs {n} steps of {dt:.3e} s, limit {cap}; use the exact route"
        )));
    }
    let axis = uniform_axis(n, dt);
    let port = model.emission();
    let grid = two_time_correlator(&l, &model.initial_state, &port.operator.dag(), &port.operator, &axis, &axis)?;
    let mut spectrum = two_colour_spectrum(&grid, port.rate, opts.pad, Some(model.max_rate))?;
    spectrum.zpl_offset = model.zpl_offset;
    Ok(GridSpectrum { grid, spectrum, rate: port.rate })
}

/// Figures of merit by the grid route; the external filter acts on the
/// two-colour spectrum as `h_f(ω) h_f*(ν) S(ω,ν)`.
pub fn evaluate_grid(
    model: &EmitterCavityModel,
    sideband: &SidebandModel,
    cavity: Option<&FilterSpec>,
    external: Option<&FilterSpec>,
    opts: &GridOptions,
) -> Result<Evaluation> {
    let gs = grid_spectrum(model, opts)?;
    let s = &gs.spectrum;
    let f_sb = transmitted_sideband(sideband, cavity, &[]);
    let unfiltered = FigureOfMerit::unfiltered(zpl_indistinguishability(s)?, zpl_power(s), f_sb)?;
    let l = model.liouvillian()?;
    let emission_rate = 1.0 / integrated_expectation(&l, &model.initial_state, &model.excitation)?.re;
    let Some(ext) = external else {
        return Ok(Evaluation { fom: unfiltered, unfiltered, emission_rate, coherent_sideband_caveat: false });
    };
    let sf = s.filtered(ext);
    let f_sb_f = transmitted_sideband(sideband, cavity, std::slice::from_ref(ext));
    let fom = FigureOfMerit::filtered(zpl_indistinguishability(&sf)?, zpl_power(&sf), f_sb_f, &unfiltered)?;
    Ok(Evaluation { fom, unfiltered, emission_rate, coherent_sideband_caveat: ext.kappa < emission_rate })
}
