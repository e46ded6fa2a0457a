//! Modelling toolkit for single-photon sources built from a dephased solid-state
//! emitter coupled to a small mode volume optical cavity.
//!
//! The crate is organised bottom-up:
//!
//! - [`dynamics`]: dense Lindblad engine (Liouvillians, propagation, two-time
//!   correlators and closed-form emission integrals).
//! - [`models`]: the two-level and three-level emitter-cavity models, the bare
//!   emitter estimate and the Lorentzian phonon sideband.
//! - [`merit`]: two-colour spectra, ZPL power and indistinguishability, sideband
//!   filtering and the external-filter trade-off.
//! - [`photonics`]: mode volume and field structure from solver exports, the
//!   (V_m, Q) to (g, kappa) mapping, Purcell spectra and harmonic inversion.

pub mod dynamics;
pub mod error;
pub mod merit;
pub mod models;
pub mod photonics;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for operators and superoperators.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector (vectorised density operators).
pub type CVector = nalgebra::DVector<C64>;
