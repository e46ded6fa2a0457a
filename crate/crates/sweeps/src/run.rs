//! Turning a resolved configuration into model evaluations.

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;

use nvsource_core::merit::{cavity_filter, evaluate_exact, evaluate_grid, Evaluation, FilterSpec, GridOptions};
use nvsource_core::models::{
    build_three_level_model, build_two_level_model, Branch, CavityCoupling, EmitterCavityModel, EmitterParams,
    InitialExcitation, ModelOptions, SidebandModel, ThreeLevelLayout, ThreeLevelParams,
};
use nvsource_core::photonics::{coupling_for_rate, CavityParams, CouplingGeometry};
use nvsource_core::units::{to_angular, GHZ, MHZ, THZ};

use crate::config::{BranchName, CouplingRate, InitialName, Method, ModelKind, Resolved};

/// Physical inputs derived once from a configuration.
pub struct Setup {
    pub emitter: EmitterParams,
    pub sideband: SidebandModel,
    pub omega_c: f64,
    pub n: f64,
    pub rate: CouplingRate,
    pub geometry: CouplingGeometry,
    pub external: Option<FilterSpec>,
    pub method: Method,
    pub options: ModelOptions,
    pub grid: GridOptions,
    pub three_level: Option<(ThreeLevelParams, ThreeLevelLayout)>,
}

fn branch(b: BranchName) -> Branch {
    match b {
        BranchName::X => Branch::X,
        BranchName::Y => Branch::Y,
    }
}

impl Setup {
    pub fn new(r: &Resolved) -> nvsource_core::Result<Self> {
        use nvsource_core::Error;
        let c = &r.config;
        let e = &c.emitter;
        let omega0 = to_angular(e.zpl_thz, THZ, false);
        let emitter = EmitterParams::new(
            to_angular(e.gamma_mhz, MHZ, e.angular),
            to_angular(e.gamma_star_thz, THZ, e.angular),
            e.debye_waller,
            omega0,
        )?;
        let sideband = match &r.sideband {
            Some(sb) => sb.to_model(emitter.debye_waller)?,
            None => SidebandModel::empty(),
        };
        let omega_c = c.cavity.omega_c_thz.map_or(omega0, |f| to_angular(f, THZ, false));
        let external = match &c.filter {
            Some(f) => match f.kappa_f_thz {
                Some(k) => Some(FilterSpec::new(to_angular(k, THZ, f.angular), to_angular(f.center_thz, THZ, f.angular))?),
                None => None,
            },
            None => None,
        };
        let n = &c.numerics;
        let grid = GridOptions { window: n.window, min_points: n.min_points, max_points: n.max_points, pad: n.pad, tail: n.tail };
        let three_level = match (c.model, &c.three_level) {
            (ModelKind::ThreeLevel, Some(t)) => {
                if (omega_c - omega0).abs() > 1e-12 * omega0 {
                    return Err(Error::Config("three-level model requires the cavity on the ZPL".into()));
                }
                let params = ThreeLevelParams {
                    base: emitter,
                    delta: to_angular(t.delta_ghz, GHZ, t.angular),
                    gamma_star_xy: to_angular(t.gamma_star_xy_thz, THZ, t.angular),
                    temperature: t.temperature_k,
                    theta: t.theta,
                };
                params.validate()?;
                let initial = match t.initial {
                    InitialName::Theta => InitialExcitation::FollowTheta,
                    InitialName::X => InitialExcitation::Only(Branch::X),
                    InitialName::Y => InitialExcitation::Only(Branch::Y),
                };
                Some((params, ThreeLevelLayout { upper: branch(t.upper), resonant: branch(t.resonant), initial }))
            }
            (ModelKind::ThreeLevel, None) => return Err(Error::Config("missing [three_level] section".into())),
            _ => None,
        };
        Ok(Self {
            emitter,
            sideband,
            omega_c,
            n: c.cavity.n,
            rate: c.cavity.coupling_rate,
            geometry: CouplingGeometry::new(c.cavity.f_r, c.cavity.eta, f64::NAN)?,
            external,
            method: n.method,
            options: ModelOptions { photon_cutoff: n.photon_cutoff },
            grid,
            three_level,
        })
    }

    pub fn coupling(&self, v_m_rel: f64, q: f64) -> nvsource_core::Result<CavityCoupling> {
        let cav = CavityParams::new(v_m_rel, q, self.omega_c, self.n)?;
        let radiative = match self.rate {
            CouplingRate::Zpl => self.emitter.zpl_rate(),
            CouplingRate::Total => self.emitter.gamma,
        };
        let g = coupling_for_rate(&cav, &self.emitter, &self.geometry, radiative)?;
        CavityCoupling::new(g, cav.kappa())
    }

    pub fn model(&self, coupling: &CavityCoupling, theta: Option<f64>) -> nvsource_core::Result<EmitterCavityModel> {
        match &self.three_level {
            Some((params, layout)) => {
                let mut p = *params;
                if let Some(t) = theta {
                    p.theta = t;
                }
                build_three_level_model(&p, coupling, *layout, self.options)
            }
            None => build_two_level_model(&self.emitter, coupling, self.emitter.omega0 - self.omega_c, self.options),
        }
    }

    pub fn evaluate(
        &self,
        v_m_rel: f64,
        q: f64,
        theta: Option<f64>,
        external: Option<&FilterSpec>,
    ) -> nvsource_core::Result<(CavityCoupling, Evaluation)> {
        let coupling = self.coupling(v_m_rel, q)?;
        let model = self.model(&coupling, theta)?;
        let cavity = cavity_filter(coupling.kappa, &model)?;
        let eval = match self.method {
            Method::Exact => evaluate_exact(&model, &self.sideband, Some(&cavity), external)?,
            Method::Grid => evaluate_grid(&model, &self.sideband, Some(&cavity), external, &self.grid)?,
        };
        Ok((coupling, eval))
    }
}

/// One sweep row; numeric fields are `None` for failed points.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub v_m_rel: f64,
    pub q: f64,
    pub g: Option<f64>,
    pub kappa_c: Option<f64>,
    pub i_zpl: Option<f64>,
    pub f_zpl: Option<f64>,
    pub f_sb: Option<f64>,
    pub i_total: Option<f64>,
    pub beta: Option<f64>,
    pub beta_times_i: Option<f64>,
    pub status: String,
}

pub const ROW_COLUMNS: [&str; 11] =
    ["v_m_rel", "q", "g", "kappa_c", "i_zpl", "f_zpl", "f_sb", "i_total", "beta", "beta_times_i", "status"];

impl Row {
    pub fn from_result(v_m_rel: f64, q: f64, g: Option<f64>, res: &nvsource_core::Result<(CavityCoupling, Evaluation)>) -> Self {
        match res {
            Ok((c, e)) => {
                let f = e.fom;
                let status = if e.coherent_sideband_caveat { "ok:narrow_filter" } else { "ok" };
                Row {
                    v_m_rel,
                    q,
                    g: Some(c.g),
                    kappa_c: Some(c.kappa),
                    i_zpl: Some(f.i_zpl),
                    f_zpl: Some(f.f_zpl),
                    f_sb: Some(f.f_sb),
                    i_total: Some(f.i_total),
                    beta: Some(f.beta),
                    beta_times_i: Some(f.beta * f.i_total),
                    status: status.into(),
                }
            }
            Err(err) => Row {
                v_m_rel,
                q,
                g,
                kappa_c: None,
                i_zpl: None,
                f_zpl: None,
                f_sb: None,
                i_total: None,
                beta: None,
                beta_times_i: None,
                status: format!("failed:{}", err.code()),
            },
        }
    }

    pub fn fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.v_m_rel.to_string(),
            self.q.to_string(),
            opt(self.g),
            opt(self.kappa_c),
            opt(self.i_zpl),
            opt(self.f_zpl),
            opt(self.f_sb),
            opt(self.i_total),
            opt(self.beta),
            opt(self.beta_times_i),
            self.status.clone(),
        ]
    }
}

/// Evaluates the full `v_m_rel × q` grid; rows ordered with `v_m_rel`
/// outermost regardless of how the points were scheduled.
pub fn sweep(setup: &Setup, v_axis: &[f64], q_axis: &[f64]) -> Vec<Row> {
    let points: Vec<(f64, f64)> = v_axis.iter().flat_map(|&v| q_axis.iter().map(move |&q| (v, q))).collect();
    points
        .par_iter()
        .map(|&(v, q)| {
            let res = setup.evaluate(v, q, None, setup.external.as_ref());
            let g = setup.coupling(v, q).ok().map(|c| c.g);
            Row::from_result(v, q, g, &res)
        })
        .collect()
}

/// `(κ_f, result)` over a list of filter widths at one cavity point.
pub fn filter_scan(
    setup: &Setup,
    v: f64,
    q: f64,
    widths: &[f64],
    center: f64,
) -> Result<Vec<(f64, Evaluation)>> {
    let results: Vec<nvsource_core::Result<(f64, Evaluation)>> = widths
        .par_iter()
        .map(|&k| {
            let f = FilterSpec::new(k, center)?;
            setup.evaluate(v, q, None, Some(&f)).map(|(_, e)| (k, e))
        })
        .collect();
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        out.push(r?);
    }
    let mut sorted: Vec<&(f64, Evaluation)> = out.iter().collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in sorted.windows(2) {
        if w[1].1.fom.beta < w[0].1.fom.beta - 1e-9 {
            bail!(
                "filter efficiency decreased from {} to {} as the width grew from {} to {}",
                w[0].1.fom.beta,
                w[1].1.fom.beta,
                w[0].0,
                w[1].0
            );
        }
    }
    Ok(out)
}
