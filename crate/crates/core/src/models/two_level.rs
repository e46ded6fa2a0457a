use super::{CavityCoupling, EmitterCavityModel, EmitterParams, ModelOptions};
use crate::dynamics::{CollapseChannel, DensityOperator, HilbertSpace, Operator};
use crate::{Error, Result};

const GROUND: usize = 0;
const EXCITED: usize = 1;

/// Dephased two-level emitter in a one-sided single-mode cavity.
///
/// `H = δ σ†σ + g(σ†a + σa†)` in the cavity frame, with dissipators
/// `γ L_σ`, `γ* L_{σ†σ}` and `κ_c L_a`; the output port is the cavity. The
/// system starts in `|e, 0⟩`.
pub fn build_two_level_model(
    em: &EmitterParams,
    cav: &CavityCoupling,
    detuning: f64,
    opts: ModelOptions,
) -> Result<EmitterCavityModel> {
    em.validate()?;
    let cav = CavityCoupling::new(cav.g, cav.kappa)?;
    if !detuning.is_finite() {
        return Err(Error::InvalidParameter("detuning must be finite".into()));
    }
    if opts.photon_cutoff == 0 {
        return Err(Error::InvalidParameter("photon cutoff must be >= 1".into()));
    }
    let space = HilbertSpace::new(vec![2, opts.photon_cutoff + 1])?;
    let sigma = Operator::transition(&space, 0, GROUND, EXCITED)?;
    let a = Operator::annihilation(&space, 1)?;
    let ne = &sigma.dag() * &sigma;
    let exchange = &(&sigma.dag() * &a) + &(&sigma * &a.dag());
    let hamiltonian = &(&ne * detuning) + &(&exchange * cav.g);
    let channels = vec![
        CollapseChannel::new(em.gamma, sigma)?,
        CollapseChannel::new(em.gamma_star, ne.clone())?,
        CollapseChannel::new(cav.kappa, a.clone())?,
    ];
    let initial_state = DensityOperator::basis(&space, &[EXCITED, 0])?;
    let excitation = &ne + &(&a.dag() * &a);
    let max_rate = [cav.g, cav.kappa, em.gamma_star, em.gamma, detuning.abs()]
        .into_iter()
        .fold(0.0, f64::max);
    Ok(EmitterCavityModel {
        space,
        hamiltonian,
        channels,
        initial_state,
        emission_channel: 2,
        excitation,
        max_rate,
        zpl_offset: detuning,
    })
}

/// The emitter alone, radiating through its own `γ` port.
pub fn bare_emitter_model(em: &EmitterParams) -> Result<EmitterCavityModel> {
    em.validate()?;
    let space = HilbertSpace::new(vec![2])?;
    let sigma = Operator::transition(&space, 0, GROUND, EXCITED)?;
    let ne = &sigma.dag() * &sigma;
    let channels = vec![
        CollapseChannel::new(em.gamma, sigma)?,
        CollapseChannel::new(em.gamma_star, ne.clone())?,
    ];
    Ok(EmitterCavityModel {
        hamiltonian: Operator::zero(&space),
        initial_state: DensityOperator::basis(&space, &[EXCITED])?,
        space,
        channels,
        emission_channel: 0,
        excitation: ne,
        max_rate: em.gamma.max(em.gamma_star),
        zpl_offset: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, expectation, integrated_expectation};

    fn emitter(gamma: f64, gamma_star: f64) -> EmitterParams {
        EmitterParams::new(gamma, gamma_star, 0.02, 2.95e15).unwrap()
    }

    #[test]
    fn decoupled_cavity_stays_empty() {
        let em = emitter(1e9, 1e11);
        let m = build_two_level_model(&em, &CavityCoupling::new(0.0, 1e12).unwrap(), 0.0, ModelOptions::default()).unwrap();
        let l = m.liouvillian().unwrap();
        let a = m.emission().operator;
        let n = &a.dag() * &a;
        let sigma = &m.channels[0].operator;
        let ne = &sigma.dag() * sigma;
        for &t in &[0.0, 1e-10, 1e-9, 5e-9] {
            let rho = evolve(&l, &m.initial_state, t).unwrap();
            assert!(expectation(&n, &rho).unwrap().norm() < 1e-14);
            assert!((expectation(&ne, &rho).unwrap().re - (-1e9 * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn excitation_leaves_through_ports() {
        let em = emitter(2e8, 1e12);
        let cav = CavityCoupling::new(3e11, 2e12).unwrap();
        let m = build_two_level_model(&em, &cav, 0.0, ModelOptions::default()).unwrap();
        let l = m.liouvillian().unwrap();
        let sigma = &m.channels[0].operator;
        let a = &m.channels[2].operator;
        let via_emitter = integrated_expectation(&l, &m.initial_state, &(&sigma.dag() * sigma)).unwrap().re;
        let via_cavity = integrated_expectation(&l, &m.initial_state, &(&a.dag() * a)).unwrap().re;
        let total = em.gamma * via_emitter + cav.kappa * via_cavity;
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let em = emitter(1e8, 0.0);
        assert!(build_two_level_model(&em, &CavityCoupling { g: 1.0, kappa: 0.0 }, 0.0, ModelOptions::default()).is_err());
        assert!(build_two_level_model(&em, &CavityCoupling { g: 1.0, kappa: 1.0 }, 0.0, ModelOptions { photon_cutoff: 0 }).is_err());
    }
}
