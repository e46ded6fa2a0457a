//! Run configuration: TOML file plus `--set section.key=value` overrides.
//!
//! Rates carry their unit in the key name (`gamma_MHz`, `gamma_star_THz`,
//! ...). A section's `angular` flag states whether its rates are angular
//! (`value × unit` rad/s) or ordinary frequencies (`2π × value × unit`).
//! Optical carrier frequencies (`zpl_THz`, `omega_c_THz`) are always
//! ordinary frequencies.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use nvsource_core::models::{SidebandComponent, SidebandConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    TwoLevel,
    ThreeLevel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub model: ModelKind,
    pub emitter: EmitterSection,
    pub cavity: CavitySection,
    #[serde(default)]
    pub sideband: SidebandSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub filter: Option<FilterSection>,
    #[serde(default)]
    pub three_level: Option<ThreeLevelSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSection {
    #[serde(default)]
    pub angular: bool,
    #[serde(rename = "gamma_MHz")]
    pub gamma_mhz: f64,
    #[serde(rename = "gamma_star_THz")]
    pub gamma_star_thz: f64,
    pub debye_waller: f64,
    #[serde(rename = "zpl_THz", default = "default_zpl")]
    pub zpl_thz: f64,
}

fn default_zpl() -> f64 {
    470.0
}

/// A sweep axis: a single value, an explicit list, or log-spaced points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Value(f64),
    List(Vec<f64>),
    Log { start: f64, stop: f64, points: usize },
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Axis::Value(x) => vec![*x],
            Axis::List(v) => v.clone(),
            Axis::Log { start, stop, points } => {
                if *points == 0 || !(*start > 0.0 && *stop > 0.0) {
                    bail!("log axis needs points >= 1 and positive bounds");
                }
                if *points == 1 {
                    vec![*start]
                } else {
                    let ratio = (stop / start).ln() / (*points - 1) as f64;
                    (0..*points).map(|k| start * (ratio * k as f64).exp()).collect()
                }
            }
        };
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            bail!("axis must hold at least one finite value");
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingRate {
    /// Only the zero-phonon dipole (`D_W γ`) couples to the cavity.
    #[default]
    Zpl,
    /// The full radiative rate `γ` feeds the cavity coupling.
    Total,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub v_m_rel: Axis,
    pub q: Axis,
    #[serde(default = "default_index")]
    pub n: f64,
    /// Cavity resonance; the ZPL when absent.
    #[serde(rename = "omega_c_THz", default)]
    pub omega_c_thz: Option<f64>,
    #[serde(default)]
    pub coupling_rate: CouplingRate,
    #[serde(default = "one")]
    pub f_r: f64,
    #[serde(default = "one")]
    pub eta: f64,
}

fn default_index() -> f64 {
    2.0
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidebandSection {
    /// Sideband file, relative to the configuration file.
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub angular: Option<bool>,
    #[serde(rename = "zpl_THz", default)]
    pub zpl_thz: Option<f64>,
    #[serde(default)]
    pub components: Option<Vec<SidebandComponent>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Closed-form time integrals (Lyapunov route).
    #[default]
    Exact,
    /// Sampled correlator and FFT two-colour spectrum.
    Grid,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_cutoff")]
    pub photon_cutoff: usize,
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default = "default_min_points")]
    pub min_points: usize,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
    #[serde(default = "default_pad")]
    pub pad: usize,
    #[serde(default = "default_tail")]
    pub tail: f64,
}

fn default_cutoff() -> usize {
    1
}
fn default_window() -> f64 {
    10.0
}
fn default_min_points() -> usize {
    1024
}
fn default_max_points() -> usize {
    2048
}
fn default_pad() -> usize {
    2
}
fn default_tail() -> f64 {
    1e-6
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self {
            method: Method::default(),
            photon_cutoff: default_cutoff(),
            window: default_window(),
            min_points: default_min_points(),
            max_points: default_max_points(),
            pad: default_pad(),
            tail: default_tail(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    #[serde(default)]
    pub angular: bool,
    /// External filter width applied by `fom` and `sweep`; none when absent.
    #[serde(rename = "kappa_f_THz", default)]
    pub kappa_f_thz: Option<f64>,
    /// Filter centre relative to the ZPL.
    #[serde(rename = "center_THz", default)]
    pub center_thz: f64,
    /// Filter widths (THz) scanned by `filter-scan`.
    #[serde(default)]
    pub scan: Option<Axis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchName {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialName {
    #[default]
    Theta,
    X,
    Y,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeLevelSection {
    #[serde(default)]
    pub angular: bool,
    #[serde(rename = "delta_GHz")]
    pub delta_ghz: f64,
    #[serde(rename = "gamma_star_xy_THz")]
    pub gamma_star_xy_thz: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    /// Dipole orientation (radians) used by `fom` and `sweep`.
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Points on `[0, π/2]` for `theta-scan`.
    #[serde(default = "default_theta_points")]
    pub theta_points: usize,
    /// Excited state carrying the splitting.
    #[serde(default = "branch_x")]
    pub upper: BranchName,
    /// Excited state resonant with the cavity.
    #[serde(default = "branch_y")]
    pub resonant: BranchName,
    #[serde(default)]
    pub initial: InitialName,
}

fn default_theta() -> f64 {
    std::f64::consts::FRAC_PI_4
}
fn default_theta_points() -> usize {
    11
}
fn branch_x() -> BranchName {
    BranchName::X
}
fn branch_y() -> BranchName {
    BranchName::Y
}

/// A configuration with its sideband resolved and its provenance hash.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: Config,
    pub sideband: Option<SidebandConfig>,
    pub sha256: String,
}

#[derive(Serialize)]
struct HashInput<'a> {
    config: &'a Config,
    sideband: &'a Option<SidebandConfig>,
}

/// Parses the value of a `--set` override as TOML, falling back to a string.
fn parse_value(text: &str) -> toml::Value {
    let doc = format!("v = {text}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(text.to_string()),
    }
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (path, value) = spec.split_once('=').ok_or_else(|| anyhow!("override '{spec}' is not key=value"))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        bail!("override '{spec}' has an empty key");
    }
    let mut node = table;
    for k in &keys[..keys.len() - 1] {
        let entry = node.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry.as_table_mut().ok_or_else(|| anyhow!("override '{spec}': '{k}' is not a section"))?;
    }
    node.insert(keys[keys.len() - 1].to_string(), parse_value(value.trim()));
    Ok(())
}

pub fn load(path: &Path, overrides: &[String]) -> Result<Resolved> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    from_str(&text, base, overrides).with_context(|| format!("in {}", path.display()))
}

/// Parses configuration text; relative sideband paths resolve against `base`.
pub fn from_str(text: &str, base: &Path, overrides: &[String]) -> Result<Resolved> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| anyhow!("{e}"))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let config: Config = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| anyhow!("{e}"))?;
    validate(&config)?;
    let sideband = resolve_sideband(&config.sideband, base)?;
    let json = serde_json::to_vec(&HashInput { config: &config, sideband: &sideband })?;
    let sha256 = hex::encode(Sha256::digest(&json));
    Ok(Resolved { config, sideband, sha256 })
}

fn resolve_sideband(s: &SidebandSection, base: &Path) -> Result<Option<SidebandConfig>> {
    let inline = s.components.is_some() || s.zpl_thz.is_some() || s.angular.is_some();
    match (&s.file, inline) {
        (Some(_), true) => bail!("[sideband] takes either `file` or inline components, not both"),
        (Some(file), false) => {
            let path = base.join(file);
            let sb = SidebandConfig::load(&path).map_err(|e| anyhow!("sideband file {}: {e}", path.display()))?;
            Ok(Some(sb))
        }
        (None, true) => {
            let components = s.components.clone().ok_or_else(|| anyhow!("[sideband] inline form needs `components`"))?;
            let zpl_thz = s.zpl_thz.ok_or_else(|| anyhow!("[sideband] inline form needs `zpl_THz`"))?;
            Ok(Some(SidebandConfig { angular: s.angular.unwrap_or(false), zpl_thz, components }))
        }
        (None, false) => Ok(None),
    }
}

fn validate(c: &Config) -> Result<()> {
    c.cavity.v_m_rel.values().context("cavity.v_m_rel")?;
    c.cavity.q.values().context("cavity.q")?;
    if let Some(f) = &c.filter {
        if let Some(scan) = &f.scan {
            scan.values().context("filter.scan")?;
        }
    }
    if c.model == ModelKind::ThreeLevel && c.three_level.is_none() {
        bail!("model = \"three_level\" needs a [three_level] section");
    }
    if let Some(t) = &c.three_level {
        if t.theta_points == 0 {
            bail!("three_level.theta_points must be >= 1");
        }
    }
    Ok(())
}
