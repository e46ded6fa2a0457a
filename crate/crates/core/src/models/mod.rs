//! Emitter models: the dephased two-level emitter in a cavity, the
//! three-level polarisation-dephasing variant, the bare-emitter estimate and
//! the Lorentzian phonon sideband.

mod sideband;
mod three_level;
mod two_level;

pub use sideband::{LorentzianLine, SidebandComponent, SidebandConfig, SidebandModel};
pub use three_level::{build_three_level_model, detailed_balance_factor, Branch, InitialExcitation, ThreeLevelLayout, ThreeLevelParams};
pub use two_level::{bare_emitter_model, build_two_level_model};

use crate::dynamics::{build_liouvillian, CollapseChannel, DensityOperator, HilbertSpace, Operator, Superoperator};
use crate::{Error, Result, C64};

/// Physical constants of the two-level emitter. All rates angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterParams {
    /// Spontaneous decay rate γ.
    pub gamma: f64,
    /// Pure dephasing rate γ*.
    pub gamma_star: f64,
    /// Debye–Waller factor: fraction of emission in the zero-phonon line.
    pub debye_waller: f64,
    /// Zero-phonon-line angular frequency ω₀.
    pub omega0: f64,
}

impl EmitterParams {
    pub fn new(gamma: f64, gamma_star: f64, debye_waller: f64, omega0: f64) -> Result<Self> {
        let p = Self { gamma, gamma_star, debye_waller, omega0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma = {} must be > 0", self.gamma)));
        }
        if !(self.gamma_star >= 0.0 && self.gamma_star.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma_star = {} must be >= 0", self.gamma_star)));
        }
        if !(self.debye_waller > 0.0 && self.debye_waller <= 1.0) {
            return Err(Error::InvalidParameter(format!("debye_waller = {} outside (0, 1]", self.debye_waller)));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega0 = {} must be > 0", self.omega0)));
        }
        Ok(())
    }

    /// Radiative rate of the zero-phonon line, `D_W · γ`.
    pub fn zpl_rate(&self) -> f64 {
        self.debye_waller * self.gamma
    }
}

/// Lifetime-to-linewidth estimate of an emitter without a cavity:
/// `I = D_W² γ / (γ + γ*)`.
pub fn bare_indistinguishability(params: &EmitterParams) -> Result<f64> {
    params.validate()?;
    Ok(params.debye_waller.powi(2) * params.gamma / (params.gamma + params.gamma_star))
}

/// Emitter–cavity coupling `g` and cavity field decay `κ_c` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityCoupling {
    pub g: f64,
    pub kappa: f64,
}

impl CavityCoupling {
    pub fn new(g: f64, kappa: f64) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!("g = {g} must be >= 0")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa = {kappa} must be > 0")));
        }
        Ok(Self { g, kappa })
    }

    /// Weak-coupling emitter-to-cavity transfer rate `4g²/κ_c`.
    pub fn purcell_rate(&self) -> f64 {
        4.0 * self.g * self.g / self.kappa
    }
}

/// Truncation of bosonic modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelOptions {
    /// Highest photon number kept in each mode.
    pub photon_cutoff: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self { photon_cutoff: 1 }
    }
}

/// An output channel: the operator whose flux `rate·⟨O†O⟩` is the emitted light.
#[derive(Debug, Clone)]
pub struct Port {
    pub operator: Operator,
    pub rate: f64,
}

/// A fully assembled open model ready for the dynamics engine.
#[derive(Debug, Clone)]
pub struct EmitterCavityModel {
    pub space: HilbertSpace,
    pub hamiltonian: Operator,
    pub channels: Vec<CollapseChannel>,
    pub initial_state: DensityOperator,
    /// Index into `channels` of the output port.
    pub emission_channel: usize,
    /// Total excitation number; non-increasing along the flow.
    pub excitation: Operator,
    /// Largest coherent or dissipative rate in the model, for grid sizing.
    pub max_rate: f64,
    /// Angular position of the zero-phonon line in the model frame.
    pub zpl_offset: f64,
}

impl EmitterCavityModel {
    pub fn liouvillian(&self) -> Result<Superoperator> {
        build_liouvillian(&self.hamiltonian, &self.channels)
    }

    pub fn emission(&self) -> Port {
        let ch = &self.channels[self.emission_channel];
        Port { operator: ch.operator.clone(), rate: ch.rate }
    }

    /// Appends a Lorentzian transmission filter (width `kappa_f`, centred at
    /// `detuning` in the model frame) that is driven by the output port in a
    /// cascaded configuration. The filter's transmitted light becomes the new
    /// output, so its amplitude response is `(κ_f/2)/(κ_f/2 − i(ω − detuning))`.
    pub fn with_output_filter(&self, kappa_f: f64, detuning: f64) -> Result<Self> {
        if !(kappa_f > 0.0 && kappa_f.is_finite()) {
            return Err(Error::InvalidParameter(format!("filter width {kappa_f} must be > 0")));
        }
        let cutoff = *self.space.dims().last().unwrap_or(&2);
        let space = self.space.extended(cutoff.max(2))?;
        let ext = |o: &Operator| o.extend_to(&space);
        let filter_index = space.subsystems() - 1;
        let b = Operator::annihilation(&space, filter_index)?;
        let port = self.emission();
        let source = ext(&port.operator)?;
        let half = 0.5 * kappa_f;
        let coupling = (port.rate * half).sqrt();

        // H_casc = (i/2)√(κ_src κ_in)(a†b − b†a) removes the back-action of the
        // shared collapse operator √κ_src a + √κ_in b on the source.
        let exchange = &(&source.dag() * &b) - &(&b.dag() * &source);
        let h_casc = exchange.scale(C64::new(0.0, 0.5 * coupling));
        let hamiltonian = &(&ext(&self.hamiltonian)? + &h_casc) + &(&(&b.dag() * &b) * detuning);

        let mut channels = Vec::with_capacity(self.channels.len() + 1);
        for (k, ch) in self.channels.iter().enumerate() {
            if k == self.emission_channel {
                let joint = &(&source * port.rate.sqrt()) + &(&b * half.sqrt());
                channels.push(CollapseChannel::new(1.0, joint)?);
            } else {
                channels.push(CollapseChannel::new(ch.rate, ext(&ch.operator)?)?);
            }
        }
        channels.push(CollapseChannel::new(half, b.clone())?);
        let emission_channel = channels.len() - 1;

        let d_f = space.dims()[filter_index];
        let mut vacuum = crate::CMatrix::zeros(d_f, d_f);
        vacuum[(0, 0)] = C64::new(1.0, 0.0);
        let rho = self.initial_state.matrix().kronecker(&vacuum);
        let initial_state = DensityOperator::new(space.clone(), rho)?;
        let excitation = &ext(&self.excitation)? + &(&b.dag() * &b);
        Ok(Self {
            space,
            hamiltonian,
            channels,
            initial_state,
            emission_channel,
            excitation,
            max_rate: self.max_rate.max(kappa_f).max(detuning.abs()),
            zpl_offset: self.zpl_offset,
        })
    }
}
