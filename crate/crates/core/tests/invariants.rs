//! Property tests over randomly drawn physical parameters.

use std::f64::consts::PI;

use proptest::prelude::*;

use nvsource_core::dynamics::{evolve, expectation, integrated_expectation, two_time_correlator, uniform_axis};
use nvsource_core::merit::{sideband_power, sideband_power_through, zpl_metrics, FilterChain, FilterSpec};
use nvsource_core::models::{
    build_three_level_model, build_two_level_model, CavityCoupling, EmitterParams, InitialExcitation, LorentzianLine,
    ModelOptions, SidebandModel, ThreeLevelLayout, ThreeLevelParams,
};
use nvsource_core::photonics::{
    coupling_from_geometry, field_structure, harmonic_inversion, mode_volume, synthesize, CavityParams, CouplingGeometry,
    FieldGrid, Resonance,
};
use nvsource_core::C64;

const OMEGA0: f64 = 2.0 * PI * 470e12;

fn log_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

fn two_level(g: f64, kappa: f64, gamma: f64, gamma_star: f64) -> nvsource_core::models::EmitterCavityModel {
    let em = EmitterParams::new(gamma, gamma_star, 0.02, OMEGA0).unwrap();
    build_two_level_model(&em, &CavityCoupling::new(g, kappa).unwrap(), 0.0, ModelOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evolution_keeps_a_density_operator(
        g in log_range(1e8, 1e12), kappa in log_range(1e9, 1e12),
        gamma_star in log_range(1e8, 1e12), t in log_range(1e-13, 1e-9),
    ) {
        let m = two_level(g, kappa, 1e9, gamma_star);
        let l = m.liouvillian().unwrap();
        let rho = evolve(&l, &m.initial_state, t).unwrap();
        prop_assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(rho.hermiticity_error() <= 1e-10);
        prop_assert!(rho.min_eigenvalue() >= -1e-8);
    }

    #[test]
    fn evolution_is_a_semigroup(
        g in log_range(1e8, 1e11), kappa in log_range(1e9, 1e11),
        t1 in log_range(1e-12, 1e-10), t2 in log_range(1e-12, 1e-10),
    ) {
        let m = two_level(g, kappa, 1e9, 1e10);
        let l = m.liouvillian().unwrap();
        let split = evolve(&l, &evolve(&l, &m.initial_state, t1).unwrap(), t2).unwrap();
        let joint = evolve(&l, &m.initial_state, t1 + t2).unwrap();
        prop_assert!((split.matrix() - joint.matrix()).camax() < 1e-10);
    }

    #[test]
    fn excitation_leaves_only_through_decay_ports(
        g in log_range(1e7, 1e13), kappa in log_range(1e8, 1e14),
        gamma in log_range(1e6, 1e10), gamma_star in log_range(1e6, 1e13),
    ) {
        let m = two_level(g, kappa, gamma, gamma_star);
        let l = m.liouvillian().unwrap();
        let mut total = 0.0;
        for k in [0, 2] {
            let ch = &m.channels[k];
            let n = &ch.operator.dag() * &ch.operator;
            total += ch.rate * integrated_expectation(&l, &m.initial_state, &n).unwrap().re;
        }
        prop_assert!((total - 1.0).abs() < 1e-6, "sum = {total}");
    }

    #[test]
    fn regression_at_zero_delay_is_an_expectation(g in log_range(1e9, 1e11), kappa in log_range(1e9, 1e11)) {
        let m = two_level(g, kappa, 1e9, 1e10);
        let l = m.liouvillian().unwrap();
        let port = m.emission();
        let (ad, a) = (port.operator.dag(), port.operator.clone());
        let axis = uniform_axis(16, 2e-12);
        let grid = two_time_correlator(&l, &m.initial_state, &ad, &a, &axis, &axis[..1]).unwrap();
        let n = &ad * &a;
        for (i, &t) in axis.iter().enumerate() {
            let direct = expectation(&n, &evolve(&l, &m.initial_state, t).unwrap()).unwrap();
            prop_assert!((grid.values[(i, 0)] - direct).norm() < 1e-10);
        }
    }

    // Holds while the cavity is broader than the dephased line. In the
    // bad-emitter corner (κ_c < γ*) dephasing throttles the feeding rate
    // 4g²/γ* and the narrow cavity filters harder; see the test below.
    #[test]
    fn dephasing_strictly_lowers_zpl_indistinguishability(
        g in log_range(1e9, 1e12), kappa in log_range(2e12, 1e14),
    ) {
        let mut last = f64::INFINITY;
        for k in 0..9 {
            let gamma_star = 1e8 * 10f64.powf(0.5 * k as f64);
            let i = zpl_metrics(&two_level(g, kappa, 2.0 * PI * 30e6, gamma_star)).unwrap().indistinguishability;
            prop_assert!(i < last, "I = {i} at gamma* = {gamma_star:e} not below {last}");
            last = i;
        }
    }

    #[test]
    fn theta_mirror_symmetry(theta in 0.0..(PI / 2.0), g in log_range(1e10, 1e12), kappa in log_range(1e11, 1e13)) {
        let base = EmitterParams::new(2.0 * PI * 30e6, 0.0, 0.02, OMEGA0).unwrap();
        let cav = CavityCoupling::new(g, kappa).unwrap();
        let params = |t| ThreeLevelParams { base, delta: 2.0 * PI * 100e9, gamma_star_xy: 2.0 * PI * 1e12, temperature: 200.0, theta: t };
        let a = ThreeLevelLayout::default();
        let b = ThreeLevelLayout { upper: a.upper.other(), resonant: a.resonant.other(), initial: InitialExcitation::FollowTheta };
        let ma = build_three_level_model(&params(theta), &cav, a, ModelOptions::default()).unwrap();
        let mb = build_three_level_model(&params(PI / 2.0 - theta), &cav, b, ModelOptions::default()).unwrap();
        let (za, zb) = (zpl_metrics(&ma).unwrap(), zpl_metrics(&mb).unwrap());
        prop_assert!((za.indistinguishability - zb.indistinguishability).abs() < 1e-8);
        prop_assert!((za.photon_number - zb.photon_number).abs() < 1e-8);
    }

    #[test]
    fn filter_chains_compose(
        k1 in log_range(1e11, 1e15), k2 in log_range(1e11, 1e15),
        c1 in -1e14..1e14f64, c2 in -1e14..1e14f64, w in -3e14..3e14f64,
    ) {
        let (f1, f2) = (FilterSpec::new(k1, c1).unwrap(), FilterSpec::new(k2, c2).unwrap());
        let chain = FilterChain(vec![f1, f2]);
        prop_assert!((chain.transmission(w) - f1.transmission(w) * f2.transmission(w)).abs() < 1e-10);
        let sb = SidebandModel::new(
            vec![
                LorentzianLine { center: -2.0 * PI * 20e12, fwhm: 2.0 * PI * 8e12, weight: 0.6 },
                LorentzianLine { center: -2.0 * PI * 45e12, fwhm: 2.0 * PI * 14e12, weight: 0.4 },
            ],
            0.02,
        ).unwrap();
        let forward = sideband_power_through(&sb, &chain);
        let reverse = sideband_power_through(&sb, &FilterChain(vec![f2, f1]));
        prop_assert!((forward - reverse).abs() <= 1e-10 * forward.max(1e-300) + 1e-300);
        let single = sideband_power_through(&sb, &FilterChain(vec![f1]));
        prop_assert!((single - sideband_power(&sb, &f1)).abs() <= 1e-10 * single.max(1e-300));
    }

    #[test]
    fn purcell_consistency(v in log_range(1e-3, 10.0), q in log_range(10.0, 1e6), dw in 0.01..1.0f64, n in 1.0..3.5f64) {
        let em = EmitterParams::new(2.0 * PI * 30e6, 0.0, dw, OMEGA0).unwrap();
        let cav = CavityParams::new(v, q, OMEGA0, n).unwrap();
        let g = coupling_from_geometry(&cav, &em, &CouplingGeometry::ideal()).unwrap();
        let purcell = 3.0 * q / (4.0 * PI * PI * v);
        let r = 4.0 * g * g / cav.kappa();
        prop_assert!((r / (purcell * em.zpl_rate()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn field_scale_leaves_geometry_unchanged(re in -5.0..5.0f64, im in -5.0..5.0f64, dx in -2e-8..2e-8f64) {
        prop_assume!(re.hypot(im) > 1e-3);
        let c = C64::new(re, im);
        let base = gaussian_grid(21, 1.0);
        let scaled = gaussian_grid(21, 1.0).scaled(c);
        let r = [dx, 0.3 * dx, 0.0];
        let axis = [0.8, 0.6, 0.0];
        let (a, b) = (field_structure(&base, r, axis).unwrap(), field_structure(&scaled, r, axis).unwrap());
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
        prop_assert!(rel(mode_volume(&scaled).unwrap(), mode_volume(&base).unwrap()) < 1e-12);
        prop_assert!(rel(b.f_r, a.f_r) < 1e-12);
        prop_assert!(rel(b.eta, a.eta) < 1e-12);
    }

    #[test]
    fn harmonic_inversion_round_trip(
        f1 in 300e12..400e12f64, f2 in 550e12..700e12f64,
        q1 in 100.0..2000.0f64, q2 in 100.0..2000.0f64,
        a2 in 0.2..1.0f64, phase in -3.0..3.0f64,
    ) {
        let mode = |f: f64, q: f64, a: C64| Resonance { frequency: f, q, amplitude: a, decay_rate: PI * f / q };
        let truth = [mode(f1, q1, C64::new(1.0, 0.0)), mode(f2, q2, C64::from_polar(a2, phase))];
        let dt = 1.0 / (8.0 * 700e12);
        let found = harmonic_inversion(&synthesize(&truth, dt, 1500), dt, 4, 1e-3).unwrap();
        prop_assert_eq!(found.len(), 2);
        for t in &truth {
            let m = found.iter().min_by(|a, b| (a.frequency - t.frequency).abs().total_cmp(&(b.frequency - t.frequency).abs())).unwrap();
            prop_assert!((m.frequency / t.frequency - 1.0).abs() < 1e-6);
            prop_assert!((m.q / t.q - 1.0).abs() < 1e-4);
            prop_assert!((m.amplitude - t.amplitude).norm() / t.amplitude.norm() < 1e-4);
        }
    }
}

#[test]
fn bad_emitter_regime_reverses_dephasing_trend() {
    let i = |gamma_star| zpl_metrics(&two_level(1.6e11, 1e9, 2.0 * PI * 30e6, gamma_star)).unwrap().indistinguishability;
    assert!(i(1e12) > i(3e11));
}

trait Scaled {
    fn scaled(self, c: C64) -> Self;
}

impl Scaled for FieldGrid {
    fn scaled(mut self, c: C64) -> Self {
        for e in &mut self.e_field {
            for comp in e.iter_mut() {
                *comp *= c;
            }
        }
        self
    }
}

/// Gaussian mode of standard deviation 20 nm (energy density), x-polarised
/// with a small y component, on `n³` nodes spanning ±6σ.
fn gaussian_grid(n: usize, amplitude: f64) -> FieldGrid {
    let sigma = 20e-9;
    let axis: Vec<f64> = (0..n).map(|k| -6.0 * sigma + 12.0 * sigma * k as f64 / (n - 1) as f64).collect();
    let mut eps = Vec::new();
    let mut e = Vec::new();
    for &x in &axis {
        for &y in &axis {
            for &z in &axis {
                let v = amplitude * (-(x * x + y * y + z * z) / (4.0 * sigma * sigma)).exp();
                eps.push(4.0);
                e.push([C64::new(v, 0.0), C64::new(0.2 * v * x / sigma, 0.0), C64::new(0.0, 0.0)]);
            }
        }
    }
    FieldGrid::new(axis.clone(), axis.clone(), axis, eps, e).unwrap()
}
