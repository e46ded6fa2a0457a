use std::f64::consts::PI;
use std::path::Path;

use crate::units::THZ;
use crate::{Error, Result};

/// Power emitted by a dipole as a function of angular frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    pub omega: Vec<f64>,
    pub power: Vec<f64>,
}

impl PowerSpectrum {
    pub fn new(omega: Vec<f64>, power: Vec<f64>) -> Result<Self> {
        if omega.len() != power.len() || omega.len() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "spectrum needs >= 2 matching samples, got {} frequencies and {} powers",
                omega.len(),
                power.len()
            )));
        }
        if !omega.windows(2).all(|w| w[1] > w[0]) || omega.iter().chain(&power).any(|v| !v.is_finite()) {
            return Err(Error::InvalidAxis("frequencies must be finite and strictly increasing".into()));
        }
        Ok(Self { omega, power })
    }

    /// Reads `frequency_THz, power` rows (header row required).
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_path(path).map_err(
            |e| Error::Format { offset: 0, message: e.to_string() },
        )?;
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Format { offset: e.position().map_or(0, |p| p.byte()), message: e.to_string() })?;
            let offset = record.position().map_or(0, |p| p.byte());
            let parse = |k: usize| record.get(k).and_then(|f| f.parse::<f64>().ok());
            match (parse(0), parse(1), record.len()) {
                (Some(f), Some(p), 2) => rows.push((2.0 * PI * f * THZ, p)),
                _ => return Err(Error::Format { offset, message: "expected two numeric columns".into() }),
            }
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::new(rows.iter().map(|r| r.0).collect(), rows.iter().map(|r| r.1).collect())
    }

    /// Linear interpolation; `None` outside the sampled range.
    pub fn at(&self, omega: f64) -> Option<f64> {
        let n = self.omega.len();
        if omega < self.omega[0] || omega > self.omega[n - 1] {
            return None;
        }
        let k = self.omega.partition_point(|&w| w <= omega).clamp(1, n - 1);
        let (w0, w1) = (self.omega[k - 1], self.omega[k]);
        let t = (omega - w0) / (w1 - w0);
        Some(self.power[k - 1] * (1.0 - t) + self.power[k] * t)
    }
}

/// Enhancement `F_P(ω) = P_wg(ω) / P_0(ω)` on the samples of `p_wg` inside
/// the common range.
#[derive(Debug, Clone, PartialEq)]
pub struct PurcellSpectrum {
    pub omega_axis: Vec<f64>,
    pub f_p: Vec<f64>,
    /// Samples dropped because the reference power was not positive.
    pub excluded: usize,
}

pub fn purcell_enhancement(p_wg: &PowerSpectrum, p_0: &PowerSpectrum) -> Result<PurcellSpectrum> {
    let lo = p_wg.omega[0].max(p_0.omega[0]);
    let hi = p_wg.omega[p_wg.omega.len() - 1].min(p_0.omega[p_0.omega.len() - 1]);
    if !(lo <= hi) {
        return Err(Error::DisjointRanges(format!("[{lo:.4e}, {hi:.4e}] is empty")));
    }
    let mut out = PurcellSpectrum { omega_axis: Vec::new(), f_p: Vec::new(), excluded: 0 };
    for (&w, &p) in p_wg.omega.iter().zip(&p_wg.power) {
        if w < lo || w > hi {
            continue;
        }
        match p_0.at(w) {
            Some(r) if r > 0.0 => {
                out.omega_axis.push(w);
                out.f_p.push(p / r);
            }
            _ => out.excluded += 1,
        }
    }
    if out.omega_axis.is_empty() {
        return Err(Error::DisjointRanges("no usable samples in the common range".into()));
    }
    Ok(out)
}
