//! Rectilinear field exports: mode volume and local coupling structure.
//!
//! Binary container: one line of JSON header, then little-endian `f64`
//! values in the order `x[nx]`, `y[ny]`, `z[nz]`, `eps[N]`, then the field as
//! six values per node (`Re Ex, Im Ex, Re Ey, Im Ey, Re Ez, Im Ez`). Node
//! order is row-major with `x` slowest. The CSV fallback has the columns
//! `x,y,z,eps,ReEx,ImEx,ReEy,ImEy,ReEz,ImEz`, one row per node in any order.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CouplingGeometry;
use crate::{Error, Result, C64};

const MAGIC: &str = "nvsource-field";

/// Complex vector field and permittivity sampled on a rectilinear grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    /// Relative permittivity per node.
    pub epsilon: Vec<f64>,
    pub e_field: Vec<[C64; 3]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    nx: usize,
    ny: usize,
    nz: usize,
    #[serde(default = "default_units")]
    units: String,
}

fn default_units() -> String {
    "m".into()
}

fn unit_scale(units: &str) -> Result<f64> {
    Ok(match units {
        "m" => 1.0,
        "um" => 1e-6,
        "nm" => 1e-9,
        other => return Err(Error::FieldGrid(format!("unknown length unit '{other}'"))),
    })
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[1] > w[0])
}

impl FieldGrid {
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>, epsilon: Vec<f64>, e_field: Vec<[C64; 3]>) -> Result<Self> {
        let g = Self { x, y, z, epsilon, e_field };
        g.validate()?;
        Ok(g)
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.x.len(), self.y.len(), self.z.len()]
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len() * self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.y.len() + j) * self.z.len() + k
    }

    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [("x", &self.x), ("y", &self.y), ("z", &self.z)] {
            if axis.len() < 2 || !strictly_increasing(axis) {
                return Err(Error::FieldGrid(format!("axis {name} must have >= 2 strictly increasing values")));
            }
        }
        let n = self.len();
        if self.epsilon.len() != n || self.e_field.len() != n {
            return Err(Error::FieldGrid(format!(
                "{n} nodes but {} permittivities and {} field samples",
                self.epsilon.len(),
                self.e_field.len()
            )));
        }
        if let Some(bad) = self.epsilon.iter().position(|&e| !(e >= 1.0 && e.is_finite())) {
            return Err(Error::FieldGrid(format!("permittivity {} < 1 at node {bad}", self.epsilon[bad])));
        }
        if self.e_field.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::FieldGrid("non-finite field sample".into()));
        }
        if self.energy_density().iter().all(|&u| u == 0.0) {
            return Err(Error::FieldGrid("field is zero everywhere".into()));
        }
        Ok(())
    }

    /// `ε|E|²` per node.
    pub fn energy_density(&self) -> Vec<f64> {
        self.epsilon
            .iter()
            .zip(&self.e_field)
            .map(|(eps, e)| eps * e.iter().map(|c| c.norm_sqr()).sum::<f64>())
            .collect()
    }

    /// Node of maximal `ε|E|²` (first in storage order on ties).
    pub fn peak(&self) -> (usize, f64) {
        self.energy_density()
            .into_iter()
            .enumerate()
            .fold((0, f64::MIN), |best, (k, u)| if u > best.1 { (k, u) } else { best })
    }

    pub fn node_position(&self, index: usize) -> [f64; 3] {
        let nz = self.z.len();
        let ny = self.y.len();
        [self.x[index / (ny * nz)], self.y[(index / nz) % ny], self.z[index % nz]]
    }

    /// Trilinear interpolation of the field at `r`.
    pub fn field_at(&self, r: [f64; 3]) -> Result<[C64; 3]> {
        let mut cells = [(0usize, 0.0f64); 3];
        for (d, axis) in [&self.x, &self.y, &self.z].into_iter().enumerate() {
            let v = r[d];
            let (lo, hi) = (axis[0], axis[axis.len() - 1]);
            if !(v >= lo && v <= hi) {
                return Err(Error::OutsideDomain(r));
            }
            let upper = axis.partition_point(|&a| a <= v).clamp(1, axis.len() - 1);
            let i = upper - 1;
            cells[d] = (i, (v - axis[i]) / (axis[i + 1] - axis[i]));
        }
        let mut out = [C64::new(0.0, 0.0); 3];
        for corner in 0..8 {
            let (di, dj, dk) = (corner >> 2 & 1, corner >> 1 & 1, corner & 1);
            let weight = [di, dj, dk]
                .iter()
                .zip(&cells)
                .map(|(&s, &(_, t))| if s == 1 { t } else { 1.0 - t })
                .product::<f64>();
            if weight == 0.0 {
                continue;
            }
            let e = &self.e_field[self.index(cells[0].0 + di, cells[1].0 + dj, cells[2].0 + dk)];
            for c in 0..3 {
                out[c] += e[c] * weight;
            }
        }
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.first() == Some(&b'{') {
            Self::from_binary(&bytes)
        } else {
            Self::from_csv(&bytes)
        }
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        let end = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or(Error::Format { offset: 0, message: "header line not terminated".into() })?;
        let header: Header = serde_json::from_slice(&bytes[..end])
            .map_err(|e| Error::Format { offset: e.column() as u64, message: format!("header: {e}") })?;
        if header.format != MAGIC || header.version != 1 {
            return Err(Error::Format {
                offset: 0,
                message: format!("unsupported container '{}' v{}", header.format, header.version),
            });
        }
        let scale = unit_scale(&header.units)?;
        let (nx, ny, nz) = (header.nx, header.ny, header.nz);
        let n = nx
            .checked_mul(ny)
            .and_then(|v| v.checked_mul(nz))
            .ok_or(Error::Format { offset: 0, message: "grid size overflows".into() })?;
        let count = nx + ny + nz + 7 * n;
        let body = &bytes[end + 1..];
        let start = (end + 1) as u64;
        if body.len() != 8 * count {
            return Err(Error::Format {
                offset: start + body.len().min(8 * count) as u64,
                message: format!("expected {} payload bytes, found {}", 8 * count, body.len()),
            });
        }
        let mut values = Vec::with_capacity(count);
        for (k, chunk) in body.chunks_exact(8).enumerate() {
            let v = f64::from_le_bytes(chunk.try_into().expect("chunk of 8"));
            if !v.is_finite() {
                return Err(Error::Format { offset: start + 8 * k as u64, message: "non-finite value".into() });
            }
            values.push(v);
        }
        let mut it = values.into_iter();
        let mut take = |m: usize| it.by_ref().take(m).collect::<Vec<f64>>();
        let x: Vec<f64> = take(nx).into_iter().map(|v| v * scale).collect();
        let y: Vec<f64> = take(ny).into_iter().map(|v| v * scale).collect();
        let z: Vec<f64> = take(nz).into_iter().map(|v| v * scale).collect();
        let epsilon = take(n);
        let raw = take(6 * n);
        let e_field = raw
            .chunks_exact(6)
            .map(|c| [C64::new(c[0], c[1]), C64::new(c[2], c[3]), C64::new(c[4], c[5])])
            .collect();
        Self::new(x, y, z, epsilon, e_field)
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let header = Header {
            format: MAGIC.into(),
            version: 1,
            nx: self.x.len(),
            ny: self.y.len(),
            nz: self.z.len(),
            units: "m".into(),
        };
        let mut out = serde_json::to_vec(&header).expect("header serialises");
        out.push(b'\n');
        let mut put = |v: f64| out.extend_from_slice(&v.to_le_bytes());
        self.x.iter().chain(&self.y).chain(&self.z).chain(&self.epsilon).for_each(|&v| put(v));
        for e in &self.e_field {
            for c in e {
                put(c.re);
                put(c.im);
            }
        }
        out
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        std::fs::File::create(path)?.write_all(&self.to_binary())?;
        Ok(())
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self> {
        const COLUMNS: [&str; 10] = ["x", "y", "z", "eps", "ReEx", "ImEx", "ReEy", "ImEy", "ReEz", "ImEz"];
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(bytes);
        let headers = reader.headers().map_err(|e| csv_error(&e))?.clone();
        if headers.iter().collect::<Vec<_>>() != COLUMNS {
            return Err(Error::Format { offset: 0, message: format!("expected columns {}", COLUMNS.join(",")) });
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| csv_error(&e))?;
            let offset = record.position().map_or(0, |p| p.byte());
            let mut v = [0.0; 10];
            for (k, field) in record.iter().enumerate() {
                v[k] = field
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Format { offset, message: format!("bad value '{field}' in column {}", COLUMNS[k]) })?;
            }
            rows.push((offset, v));
        }
        let axis = |d: usize| {
            let mut a: Vec<f64> = rows.iter().map(|(_, v)| v[d]).collect();
            a.sort_by(f64::total_cmp);
            a.dedup();
            a
        };
        let (x, y, z) = (axis(0), axis(1), axis(2));
        let lookup = |a: &[f64]| a.iter().enumerate().map(|(k, v)| (v.to_bits(), k)).collect::<BTreeMap<u64, usize>>();
        let (lx, ly, lz) = (lookup(&x), lookup(&y), lookup(&z));
        let n = x.len() * y.len() * z.len();
        let mut epsilon = vec![f64::NAN; n];
        let mut e_field = vec![[C64::new(0.0, 0.0); 3]; n];
        let mut seen = vec![false; n];
        for (offset, v) in &rows {
            let idx = (lx[&v[0].to_bits()] * y.len() + ly[&v[1].to_bits()]) * z.len() + lz[&v[2].to_bits()];
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::Format { offset: *offset, message: "duplicate grid node".into() });
            }
            epsilon[idx] = v[3];
            e_field[idx] = [C64::new(v[4], v[5]), C64::new(v[6], v[7]), C64::new(v[8], v[9])];
        }
        if rows.len() != n {
            return Err(Error::Format {
                offset: bytes.len() as u64,
                message: format!("{} rows do not fill the {}x{}x{} grid", rows.len(), x.len(), y.len(), z.len()),
            });
        }
        Self::new(x, y, z, epsilon, e_field)
    }
}

fn csv_error(e: &csv::Error) -> Error {
    Error::Format { offset: e.position().map_or(0, |p| p.byte()), message: e.to_string() }
}

/// Trapezoid weights of a (possibly non-uniform) axis.
fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    let mut w = vec![0.0; n];
    for k in 0..n - 1 {
        let h = 0.5 * (axis[k + 1] - axis[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

/// `V_m = ∫ ε|E|² dV / max(ε|E|²)` by the trapezoid rule.
pub fn mode_volume(grid: &FieldGrid) -> Result<f64> {
    grid.validate()?;
    let u = grid.energy_density();
    let (_, peak) = grid.peak();
    let (wx, wy, wz) = (trapezoid_weights(&grid.x), trapezoid_weights(&grid.y), trapezoid_weights(&grid.z));
    let mut total = 0.0;
    for (i, a) in wx.iter().enumerate() {
        for (j, b) in wy.iter().enumerate() {
            for (k, c) in wz.iter().enumerate() {
                total += a * b * c * u[grid.index(i, j, k)];
            }
        }
    }
    Ok(total / peak)
}

/// Field direction at the energy maximum as a unit vector, with the global
/// phase chosen to make its largest component real and positive.
pub fn peak_polarisation(grid: &FieldGrid) -> [C64; 3] {
    let (k, _) = grid.peak();
    unit_polarisation(&grid.e_field[k])
}

fn unit_polarisation(e: &[C64; 3]) -> [C64; 3] {
    let norm = e.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return [C64::new(0.0, 0.0); 3];
    }
    let dominant = e.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("three components");
    let phase = dominant.conj() / dominant.norm();
    [e[0] * phase / norm, e[1] * phase / norm, e[2] * phase / norm]
}

/// Coupling structure of a dipole along `dipole_axis` at `r`.
///
/// `f_r = |E(r)| / |E(r_peak)|` is the field-magnitude ratio to the energy
/// maximum (clipped to 1) and `eta = |d̂ · Ê(r)|` the polarisation overlap
/// with the local field direction, which at `r_peak` is the cavity
/// polarisation `ε̂_c`. The coupling then scales as `eta · f_r`.
pub fn field_structure(grid: &FieldGrid, r: [f64; 3], dipole_axis: [f64; 3]) -> Result<CouplingGeometry> {
    let v_m = mode_volume(grid)?;
    let d_norm = dipole_axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(d_norm > 0.0 && d_norm.is_finite()) {
        return Err(Error::InvalidParameter("dipole axis must be a nonzero finite vector".into()));
    }
    let d = dipole_axis.map(|v| v / d_norm);
    let (k, _) = grid.peak();
    let magnitude = |e: &[C64; 3]| e.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let e_peak = magnitude(&grid.e_field[k]);
    let e_r = grid.field_at(r)?;
    let f_r = (magnitude(&e_r) / e_peak).min(1.0);
    let local = unit_polarisation(&e_r);
    let eta = (0..3).map(|c| local[c] * d[c]).sum::<C64>().norm().min(1.0);
    CouplingGeometry::new(f_r, eta, v_m)
}
