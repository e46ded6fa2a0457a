use std::f64::consts::FRAC_PI_2;

use super::{CavityCoupling, EmitterCavityModel, EmitterParams, ModelOptions};
use crate::dynamics::{CollapseChannel, DensityOperator, HilbertSpace, Operator};
use crate::units::{HBAR, K_B};
use crate::{Error, Result};

const GROUND: usize = 0;
const E_X: usize = 1;
const E_Y: usize = 2;

/// One of the two orthogonally polarised excited states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    X,
    Y,
}

impl Branch {
    fn level(self) -> usize {
        match self {
            Branch::X => E_X,
            Branch::Y => E_Y,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Branch::X => Branch::Y,
            Branch::Y => Branch::X,
        }
    }
}

/// Initial excited-state population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialExcitation {
    /// `(sinθ |e_x⟩⟨e_x| + cosθ |e_y⟩⟨e_y|) / (sinθ + cosθ)`, following the
    /// excitation polarisation.
    FollowTheta,
    Only(Branch),
}

/// Level arrangement: which excited state sits higher by `Δ` and which one the
/// cavity is resonant with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelLayout {
    pub upper: Branch,
    pub resonant: Branch,
    pub initial: InitialExcitation,
}

impl Default for ThreeLevelLayout {
    fn default() -> Self {
        Self { upper: Branch::X, resonant: Branch::Y, initial: InitialExcitation::FollowTheta }
    }
}

/// Parameters of the polarisation-dephasing three-level emitter.
///
/// The pure-dephasing rate of `base` is not used: dephasing enters only
/// through the population exchange `γ*_xy` between the excited states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelParams {
    pub base: EmitterParams,
    /// Excited-state splitting Δ (rad/s).
    pub delta: f64,
    /// Downhill polarisation relaxation rate γ*_xy (rad/s).
    pub gamma_star_xy: f64,
    /// Temperature in kelvin.
    pub temperature: f64,
    /// Angle between the cavity polarisation and the `y` dipole, in `[0, π/2]`.
    pub theta: f64,
}

impl ThreeLevelParams {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta = {} must be >= 0", self.delta)));
        }
        if !(self.gamma_star_xy >= 0.0 && self.gamma_star_xy.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma_star_xy = {} must be >= 0", self.gamma_star_xy)));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!("temperature = {} must be > 0", self.temperature)));
        }
        if !(0.0..=FRAC_PI_2 + 1e-12).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!("theta = {} outside [0, π/2]", self.theta)));
        }
        Ok(())
    }

    /// Uphill suppression `e^{−ħΔ/k_B T}`.
    pub fn detailed_balance(&self) -> f64 {
        detailed_balance_factor(self.delta, self.temperature)
    }
}

/// `exp(−ħΔ / k_B T)` for an angular splitting `delta`.
pub fn detailed_balance_factor(delta: f64, temperature: f64) -> f64 {
    (-HBAR * delta / (K_B * temperature)).exp()
}

/// Three-level emitter `{g, e_x, e_y}` in a cavity that couples to the dipole
/// `σ_m(θ) = sinθ σ_x + cosθ σ_y`.
///
/// Channels: `γ L_{σ_x}`, `γ L_{σ_y}`, `γ*_xy L_{down}`,
/// `e^{−Δβ} γ*_xy L_{up}` and `κ_c L_a`, where `down = |lower⟩⟨upper|`.
/// The Hamiltonian, in the frame of the cavity-resonant state, is
/// `±Δ |other⟩⟨other| + g(σ_m†a + σ_m a†)`.
pub fn build_three_level_model(
    params: &ThreeLevelParams,
    cav: &CavityCoupling,
    layout: ThreeLevelLayout,
    opts: ModelOptions,
) -> Result<EmitterCavityModel> {
    params.validate()?;
    let cav = CavityCoupling::new(cav.g, cav.kappa)?;
    if opts.photon_cutoff == 0 {
        return Err(Error::InvalidParameter("photon cutoff must be >= 1".into()));
    }
    let space = HilbertSpace::new(vec![3, opts.photon_cutoff + 1])?;
    let sigma_x = Operator::transition(&space, 0, GROUND, E_X)?;
    let sigma_y = Operator::transition(&space, 0, GROUND, E_Y)?;
    let a = Operator::annihilation(&space, 1)?;
    let (s, c) = params.theta.sin_cos();
    let sigma_m = &(&sigma_x * s) + &(&sigma_y * c);
    let exchange = &(&sigma_m.dag() * &a) + &(&sigma_m * &a.dag());

    let upper = layout.upper.level();
    let lower = layout.upper.other().level();
    // energy of the non-resonant excited state relative to the resonant one
    let (offset_level, offset) = if layout.resonant == layout.upper {
        (lower, -params.delta)
    } else {
        (upper, params.delta)
    };
    let shift = Operator::transition(&space, 0, offset_level, offset_level)?;
    let hamiltonian = &(&shift * offset) + &(&exchange * cav.g);

    let down = Operator::transition(&space, 0, lower, upper)?;
    let up = Operator::transition(&space, 0, upper, lower)?;
    let channels = vec![
        CollapseChannel::new(params.base.gamma, sigma_x.clone())?,
        CollapseChannel::new(params.base.gamma, sigma_y.clone())?,
        CollapseChannel::new(params.gamma_star_xy, down)?,
        CollapseChannel::new(params.detailed_balance() * params.gamma_star_xy, up)?,
        CollapseChannel::new(cav.kappa, a.clone())?,
    ];

    let initial_state = match layout.initial {
        InitialExcitation::FollowTheta => {
            DensityOperator::mixture(&space, &[(s.max(0.0), &[E_X, 0]), (c.max(0.0), &[E_Y, 0])])?
        }
        InitialExcitation::Only(b) => DensityOperator::basis(&space, &[b.level(), 0])?,
    };
    let excitation = &(&(&sigma_x.dag() * &sigma_x) + &(&sigma_y.dag() * &sigma_y)) + &(&a.dag() * &a);
    let max_rate = [cav.g, cav.kappa, params.gamma_star_xy, params.delta, params.base.gamma]
        .into_iter()
        .fold(0.0, f64::max);
    Ok(EmitterCavityModel {
        space,
        hamiltonian,
        channels,
        initial_state,
        emission_channel: 4,
        excitation,
        max_rate,
        zpl_offset: 0.0,
    })
}
