//! Electromagnetic post-processing: mode volume and coupling structure from
//! field exports, the (V_m, Q) to (g, κ_c) mapping, Purcell spectra and
//! ringdown resonance extraction.

mod coupling;
mod field;
mod harminv;
mod purcell;

pub use coupling::{coupling_for_rate, coupling_from_geometry, purcell_factor, CavityParams, CouplingGeometry};
pub use field::{field_structure, mode_volume, peak_polarisation, FieldGrid};
pub use harminv::{harmonic_inversion, read_ringdown, synthesize, Resonance};
pub use purcell::{purcell_enhancement, PowerSpectrum, PurcellSpectrum};
