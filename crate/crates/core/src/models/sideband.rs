use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::units::{to_angular, THZ};
use crate::{Error, Result};

/// One Lorentzian emission line. `center` is the angular offset from the
/// zero-phonon line (negative for red-shifted lines), `fwhm` its full width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianLine {
    pub center: f64,
    pub fwhm: f64,
    pub weight: f64,
}

impl LorentzianLine {
    /// Area-normalised line shape times `weight`.
    pub fn density(&self, omega: f64) -> f64 {
        let half = 0.5 * self.fwhm;
        let x = omega - self.center;
        self.weight * (self.fwhm / (2.0 * PI)) / (x * x + half * half)
    }

    pub fn peak(&self) -> f64 {
        self.weight * 2.0 / (PI * self.fwhm)
    }
}

/// Phonon sideband as a sum of incoherent Lorentzian lines whose weights sum
/// to `1 − D_W`.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandModel {
    components: Vec<LorentzianLine>,
}

impl SidebandModel {
    /// Rescales the given weights so they sum to `1 − debye_waller`.
    pub fn new(lines: Vec<LorentzianLine>, debye_waller: f64) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::InvalidParameter("sideband needs at least one line".into()));
        }
        if !(debye_waller > 0.0 && debye_waller <= 1.0) {
            return Err(Error::InvalidParameter(format!("debye_waller = {debye_waller} outside (0, 1]")));
        }
        for (k, l) in lines.iter().enumerate() {
            if !(l.weight > 0.0 && l.weight.is_finite()) {
                return Err(Error::InvalidParameter(format!("sideband line {k}: weight must be > 0")));
            }
            if !(l.fwhm > 0.0 && l.fwhm.is_finite()) {
                return Err(Error::InvalidParameter(format!("sideband line {k}: width must be > 0")));
            }
            if !l.center.is_finite() {
                return Err(Error::InvalidParameter(format!("sideband line {k}: center must be finite")));
            }
        }
        let total: f64 = lines.iter().map(|l| l.weight).sum();
        let target = 1.0 - debye_waller;
        let components = lines
            .into_iter()
            .map(|l| LorentzianLine { weight: l.weight * target / total, ..l })
            .collect();
        Ok(Self { components })
    }

    /// No sideband at all (`D_W = 1`).
    pub fn empty() -> Self {
        Self { components: Vec::new() }
    }

    pub fn components(&self) -> &[LorentzianLine] {
        &self.components
    }

    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|l| l.weight).sum()
    }

    /// Spectral density `S⁰_SB(ω)` per unit angular frequency.
    pub fn spectrum(&self, omega: f64) -> f64 {
        self.components.iter().map(|l| l.density(omega)).sum()
    }
}

/// On-disk sideband description (TOML or JSON).
///
/// ```toml
/// angular = false      # values are ordinary frequencies in THz
/// zpl_THz = 470.4      # reference for the line centres
/// [[components]]
/// center_THz = 452.0
/// fwhm_THz = 9.0
/// weight = 0.11
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidebandConfig {
    #[serde(default)]
    pub angular: bool,
    #[serde(rename = "zpl_THz")]
    pub zpl_thz: f64,
    pub components: Vec<SidebandComponent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidebandComponent {
    #[serde(rename = "center_THz")]
    pub center_thz: f64,
    #[serde(rename = "fwhm_THz")]
    pub fwhm_thz: f64,
    pub weight: f64,
}

impl SidebandConfig {
    /// Reads a `.toml` or `.json` file (chosen by extension, TOML otherwise).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path.extension().map(|e| e.eq_ignore_ascii_case("json")).unwrap_or(false);
        if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("sideband file: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("sideband file: {e}")))
    }

    /// Converts to a [`SidebandModel`] normalised against `debye_waller`.
    pub fn to_model(&self, debye_waller: f64) -> Result<SidebandModel> {
        let zpl = to_angular(self.zpl_thz, THZ, self.angular);
        let lines = self
            .components
            .iter()
            .map(|c| LorentzianLine {
                center: to_angular(c.center_thz, THZ, self.angular) - zpl,
                fwhm: to_angular(c.fwhm_thz, THZ, self.angular),
                weight: c.weight,
            })
            .collect();
        SidebandModel::new(lines, debye_waller).map_err(|e| Error::Config(format!("sideband file: {e}")))
    }
}
