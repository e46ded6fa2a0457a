//! Resonance extraction from ringdown signals by the matrix pencil method.
//!
//! The signal is modelled as `s_k = Σ_j A_j z_j^k` with
//! `z_j = exp(−i2πf_j dt − πf_j dt/Q_j)`. The signal poles are the
//! eigenvalues of the shift-invariance pencil of the dominant right singular
//! subspace of the Hankel data matrix; amplitudes follow by least squares.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::linalg::Schur;

use crate::{CMatrix, CVector, Error, Result, C64};

/// Relative singular-value threshold separating signal from round-off.
const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    /// Hz.
    pub frequency: f64,
    pub q: f64,
    pub amplitude: C64,
    /// Field-amplitude decay rate `π f / Q` (1/s).
    pub decay_rate: f64,
}

/// Extracts up to `max_modes` decaying resonances with positive frequency.
/// Modes whose amplitude is below `noise_floor · max|A|` are dropped; the
/// rest are sorted by `|A|`, largest first.
pub fn harmonic_inversion(signal: &[C64], dt: f64, max_modes: usize, noise_floor: f64) -> Result<Vec<Resonance>> {
    let n = signal.len();
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Signal(format!("sample spacing {dt} must be > 0")));
    }
    if max_modes == 0 || n < 4 * max_modes {
        return Err(Error::Signal(format!("{n} samples cannot resolve {max_modes} modes (need 4 per mode)")));
    }
    if !(0.0..1.0).contains(&noise_floor) {
        return Err(Error::Signal(format!("noise floor {noise_floor} outside [0, 1)")));
    }
    if signal.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
        return Err(Error::Signal("non-finite sample".into()));
    }
    if signal.iter().all(|s| s.norm() == 0.0) {
        return Ok(Vec::new());
    }

    // A real ringdown carries each mode at ±f, so allow twice the poles.
    let poles_wanted = 2 * max_modes;
    let l = (n / 3).clamp(poles_wanted, (4 * poles_wanted).max(64).min(n / 2));
    let hankel = CMatrix::from_fn(n - l, l + 1, |r, c| signal[r + c]);
    let svd = hankel.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Signal("singular value decomposition failed".into()))?;
    let sigma = &svd.singular_values;
    // singular values are not guaranteed sorted
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let top = sigma[order[0]];
    let rank = order.iter().take_while(|&&k| sigma[k] > RANK_TOL * top).count().min(poles_wanted);
    if rank == 0 {
        return Ok(Vec::new());
    }
    // Rows of the Hankel matrix lie in the span of the leading rows of V^H,
    // which therefore inherit the shift structure (z^c)_c.
    let v = CMatrix::from_fn(l + 1, rank, |r, c| v_t[(order[c], r)]);
    let v1 = v.rows(0, l).into_owned();
    let v2 = v.rows(1, l).into_owned();
    let pencil = v1
        .pseudo_inverse(1e-14)
        .map_err(|e| Error::Signal(format!("pencil inversion failed: {e}")))?
        * v2;
    let (_, t) = Schur::new(pencil).unpack();
    let poles: Vec<C64> = (0..rank).map(|k| t[(k, k)]).collect();

    // amplitudes of all poles jointly, so that ±f partners share the fit
    let vander = CMatrix::from_fn(n, rank, |k, j| poles[j].powu(k as u32));
    let data = CVector::from_column_slice(signal);
    let amps = vander
        .svd(true, true)
        .solve(&data, 1e-14)
        .map_err(|e| Error::Signal(format!("amplitude fit failed: {e}")))?;

    let mut modes: Vec<Resonance> = poles
        .iter()
        .zip(amps.iter())
        .filter_map(|(z, a)| {
            let ln = z.ln();
            let frequency = -ln.im / (2.0 * PI * dt);
            let decay_rate = -ln.re / dt;
            (frequency > 0.0 && decay_rate > 0.0 && a.norm() > 0.0).then(|| Resonance {
                frequency,
                q: PI * frequency / decay_rate,
                amplitude: *a,
                decay_rate,
            })
        })
        .collect();
    let largest = modes.iter().map(|m| m.amplitude.norm()).fold(0.0, f64::max);
    modes.retain(|m| m.amplitude.norm() >= noise_floor * largest);
    modes.sort_by(|a, b| b.amplitude.norm().total_cmp(&a.amplitude.norm()));
    modes.truncate(max_modes);
    Ok(modes)
}

/// `s_k = Σ A_j exp(−i2πf_j k dt − πf_j k dt/Q_j)`.
pub fn synthesize(modes: &[Resonance], dt: f64, n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            modes
                .iter()
                .map(|m| m.amplitude * C64::new(-PI * m.frequency * t / m.q, -2.0 * PI * m.frequency * t).exp())
                .sum()
        })
        .collect()
}

/// Reads a ringdown CSV with columns `time, Re` or `time, Re, Im` (an
/// optional header row is skipped). Returns the samples and their spacing.
pub fn read_ringdown(path: &Path) -> Result<(Vec<C64>, f64)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Format { offset: 0, message: e.to_string() })?;
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format { offset: e.position().map_or(0, |p| p.byte()), message: e.to_string() })?;
        let offset = record.position().map_or(0, |p| p.byte());
        let parsed: Option<Vec<f64>> = record.iter().map(|f| f.parse::<f64>().ok()).collect();
        let Some(values) = parsed else {
            if row == 0 {
                continue;
            }
            return Err(Error::Format { offset, message: "non-numeric field".into() });
        };
        match values[..] {
            [t, re] => {
                times.push(t);
                samples.push(C64::new(re, 0.0));
            }
            [t, re, im] => {
                times.push(t);
                samples.push(C64::new(re, im));
            }
            _ => return Err(Error::Format { offset, message: format!("expected 2 or 3 columns, found {}", values.len()) }),
        }
    }
    if times.len() < 2 {
        return Err(Error::Signal("ringdown needs at least two samples".into()));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if let Some(k) = times.windows(2).position(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt.abs()) {
        return Err(Error::Signal(format!("time axis is not uniform at sample {}", k + 1)));
    }
    Ok((samples, dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(frequency: f64, q: f64, amplitude: C64) -> Resonance {
        Resonance { frequency, q, amplitude, decay_rate: PI * frequency / q }
    }

    #[test]
    fn zero_signal() {
        assert!(harmonic_inversion(&vec![C64::new(0.0, 0.0); 64], 1.0, 2, 0.0).unwrap().is_empty());
    }

    #[test]
    fn input_validation() {
        let s = vec![C64::new(1.0, 0.0); 7];
        assert!(harmonic_inversion(&s, 1.0, 2, 0.0).is_err());
        let mut s = vec![C64::new(1.0, 0.0); 64];
        s[3] = C64::new(f64::NAN, 0.0);
        assert!(harmonic_inversion(&s, 1.0, 2, 0.0).is_err());
        assert!(harmonic_inversion(&vec![C64::new(1.0, 0.0); 64], 0.0, 2, 0.0).is_err());
    }

    #[test]
    fn real_cosine_gives_one_mode() {
        let (f, q, dt) = (0.11, 80.0, 1.0);
        let s: Vec<C64> = (0..400)
            .map(|k| {
                let t = k as f64 * dt;
                C64::new((-PI * f * t / q).exp() * (2.0 * PI * f * t).cos(), 0.0)
            })
            .collect();
        let modes = harmonic_inversion(&s, dt, 1, 0.01).unwrap();
        assert_eq!(modes.len(), 1);
        assert!((modes[0].frequency / f - 1.0).abs() < 1e-8);
        assert!((modes[0].q / q - 1.0).abs() < 1e-6);
        assert!((modes[0].amplitude.norm() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn synthesize_round_trip() {
        let dt = 0.5;
        let truth = vec![mode(0.3, 150.0, C64::new(1.0, 0.5)), mode(0.7, 40.0, C64::new(-0.3, 0.2))];
        let s = synthesize(&truth, dt, 300);
        let got = harmonic_inversion(&s, dt, 4, 1e-6).unwrap();
        assert_eq!(got.len(), 2);
        for (g, t) in got.iter().zip(&truth) {
            assert!((g.frequency / t.frequency - 1.0).abs() < 1e-9);
            assert!((g.q / t.q - 1.0).abs() < 1e-7);
            assert!((g.amplitude - t.amplitude).norm() < 1e-8);
        }
    }
}
