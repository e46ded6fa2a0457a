//! `nvsource`: figures of merit, parameter sweeps and photonics
//! post-processing for cavity-coupled single-photon sources.

mod config;
mod output;
mod run;
#[cfg(test)]
mod tests;

use std::f64::consts::FRAC_PI_2;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use nvsource_core::photonics::{field_structure, harmonic_inversion, mode_volume, peak_polarisation, read_ringdown, FieldGrid};
use nvsource_core::units::{to_angular, wavelength, THZ};

use output::{Destination, Failure, Table};
use run::{Row, Setup, ROW_COLUMNS};

#[derive(Parser)]
#[command(name = "nvsource", version, about = "Cavity-enhanced single-photon source figures of merit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Override a configuration key, e.g. `--set emitter.gamma_star_THz=2`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct Point {
    /// Mode volume in units of (λ/n)³; defaults to the first axis value.
    #[arg(long)]
    v_m_rel: Option<f64>,
    /// Quality factor; defaults to the first axis value.
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Figures of merit at one (V_m, Q) point.
    Fom {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: Point,
    },
    /// Figures of merit over the configured (V_m, Q) grid.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Indistinguishability and efficiency against external filter width.
    FilterScan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: Point,
    },
    /// Three-level model against dipole orientation θ on [0, π/2].
    ThetaScan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: Point,
    },
    /// Mode volume and coupling structure from a field export.
    Modevol {
        #[command(flatten)]
        common: Common,
        field_file: PathBuf,
        /// Emitter position x,y,z in metres; the energy maximum when absent.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        r: Option<Vec<f64>>,
        /// Dipole direction x,y,z; the cavity polarisation when absent.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        dipole_axis: Option<Vec<f64>>,
        /// ZPL wavelength for V_m in (λ/n)³ when no config is given.
        #[arg(long, default_value_t = 637.0)]
        wavelength_nm: f64,
        /// Refractive index for V_m in (λ/n)³ when no config is given.
        #[arg(long, default_value_t = 2.0)]
        n: f64,
    },
    /// Resonances of a ringdown signal by harmonic inversion.
    Harminv {
        #[command(flatten)]
        common: Common,
        signal_file: PathBuf,
        /// Sample spacing in seconds; taken from the time column when absent.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 10)]
        max_modes: usize,
        #[arg(long, default_value_t = 1e-3)]
        noise_floor: f64,
    },
}

fn main() -> ExitCode {
    let code = execute(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}

/// Runs one command line and returns the process exit code. Usage errors
/// count as configuration errors.
fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {:#}", f.error());
            f.exit_code()
        }
    }
}

fn load(common: &Common) -> Result<config::Resolved, Failure> {
    let path = common.config.as_ref().ok_or_else(|| Failure::Config(anyhow!("--config is required")))?;
    if !path.exists() {
        return Err(Failure::Io(anyhow!("config file {} not found", path.display())));
    }
    config::load(path, &common.overrides).map_err(Failure::Config)
}

fn setup(r: &config::Resolved) -> Result<Setup, Failure> {
    Setup::new(r).map_err(Failure::from_core)
}

fn point(p: &Point, r: &config::Resolved) -> Result<(f64, f64), Failure> {
    let first = |a: &config::Axis| a.values().map(|v| v[0]).map_err(Failure::Config);
    let v = match p.v_m_rel {
        Some(v) => v,
        None => first(&r.config.cavity.v_m_rel)?,
    };
    let q = match p.q {
        Some(q) => q,
        None => first(&r.config.cavity.q)?,
    };
    Ok((v, q))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Fom { common, point: p } => {
            let r = load(&common)?;
            let s = setup(&r)?;
            let (v, q) = point(&p, &r)?;
            let (c, e) = s.evaluate(v, q, None, s.external.as_ref()).map_err(Failure::from_core)?;
            let row = Row::from_result(v, q, Some(c.g), &Ok((c, e)));
            match common.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let value = json!({
                        "config_sha256": r.sha256,
                        "v_m_rel": v,
                        "q": q,
                        "g": c.g,
                        "kappa_c": c.kappa,
                        "i_zpl": e.fom.i_zpl,
                        "f_zpl": e.fom.f_zpl,
                        "f_sb": e.fom.f_sb,
                        "i_total": e.fom.i_total,
                        "beta": e.fom.beta,
                        "beta_times_i": e.fom.beta * e.fom.i_total,
                        "unfiltered": e.unfiltered,
                        "emission_rate": e.emission_rate,
                        "coherent_sideband_caveat": e.coherent_sideband_caveat,
                    });
                    output::write_json(&mut dest(&common, out), &value)
                }
                Format::Csv => {
                    let table = Table { columns: ROW_COLUMNS.to_vec(), rows: vec![row.fields()] };
                    output::write_csv(&mut dest(&common, out), &r.sha256, &table)
                }
            }
        }
        Command::Sweep { common } => {
            let r = load(&common)?;
            let s = setup(&r)?;
            let v_axis = r.config.cavity.v_m_rel.values().map_err(Failure::Config)?;
            let q_axis = r.config.cavity.q.values().map_err(Failure::Config)?;
            let rows = run::sweep(&s, &v_axis, &q_axis);
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let table = Table { columns: ROW_COLUMNS.to_vec(), rows: rows.iter().map(Row::fields).collect() };
                    output::write_csv(&mut dest(&common, out), &r.sha256, &table)
                }
                Format::Json => output::write_json(&mut dest(&common, out), &json!({ "config_sha256": r.sha256, "rows": rows })),
            }
        }
        Command::FilterScan { common, point: p } => {
            let r = load(&common)?;
            let s = setup(&r)?;
            let (v, q) = point(&p, &r)?;
            let f = r.config.filter.as_ref().ok_or_else(|| Failure::Config(anyhow!("filter-scan needs a [filter] section")))?;
            let scan = f.scan.as_ref().ok_or_else(|| Failure::Config(anyhow!("filter.scan axis is missing")))?;
            let widths_thz = scan.values().map_err(Failure::Config)?;
            let widths: Vec<f64> = widths_thz.iter().map(|&k| to_angular(k, THZ, f.angular)).collect();
            let center = to_angular(f.center_thz, THZ, f.angular);
            let results = run::filter_scan(&s, v, q, &widths, center).map_err(Failure::from_anyhow)?;
            let columns = vec!["kappa_f_THz", "kappa_f", "i_total", "beta", "i_zpl", "f_zpl", "f_sb", "status"];
            let rows = results
                .iter()
                .zip(&widths_thz)
                .map(|((k, e), k_thz)| {
                    let status = if e.coherent_sideband_caveat { "ok:narrow_filter" } else { "ok" };
                    vec![
                        k_thz.to_string(),
                        k.to_string(),
                        e.fom.i_total.to_string(),
                        e.fom.beta.to_string(),
                        e.fom.i_zpl.to_string(),
                        e.fom.f_zpl.to_string(),
                        e.fom.f_sb.to_string(),
                        status.to_string(),
                    ]
                })
                .collect();
            output::write_table(&mut dest(&common, out), common.format.map(is_json), &r.sha256, &Table { columns, rows })
        }
        Command::ThetaScan { common, point: p } => {
            let r = load(&common)?;
            let s = setup(&r)?;
            let t = r
                .config
                .three_level
                .as_ref()
                .filter(|_| s.three_level.is_some())
                .ok_or_else(|| Failure::Config(anyhow!("theta-scan needs model = \"three_level\" and [three_level]")))?;
            let (v, q) = point(&p, &r)?;
            let n = t.theta_points;
            let thetas: Vec<f64> =
                (0..n).map(|k| if n == 1 { 0.0 } else { FRAC_PI_2 * k as f64 / (n - 1) as f64 }).collect();
            let mut rows = Vec::with_capacity(n);
            for &theta in &thetas {
                let row = match s.evaluate(v, q, Some(theta), s.external.as_ref()) {
                    Ok((_, e)) => {
                        let status = if e.coherent_sideband_caveat { "ok:narrow_filter" } else { "ok" };
                        let f = e.fom;
                        [f.i_zpl, f.i_total, f.f_zpl, f.f_sb, f.beta].iter().map(f64::to_string).chain([status.to_string()]).collect()
                    }
                    Err(err) => {
                        let mut r = vec![String::new(); 5];
                        r.push(format!("failed:{}", err.code()));
                        r
                    }
                };
                rows.push(std::iter::once(theta.to_string()).chain(row).collect());
            }
            let columns = vec!["theta", "i_zpl", "i_total", "f_zpl", "f_sb", "beta", "status"];
            output::write_table(&mut dest(&common, out), common.format.map(is_json), &r.sha256, &Table { columns, rows })
        }
        Command::Modevol { common, field_file, r, dipole_axis, wavelength_nm, n } => {
            let (lambda, index, hash) = match &common.config {
                Some(_) => {
                    let res = load(&common)?;
                    let omega0 = to_angular(res.config.emitter.zpl_thz, THZ, false);
                    (wavelength(omega0), res.config.cavity.n, Some(res.sha256))
                }
                None => (wavelength_nm * 1e-9, n, None),
            };
            let grid = FieldGrid::read(&field_file).map_err(Failure::from_core)?;
            let v_m = mode_volume(&grid).map_err(Failure::from_core)?;
            let (peak_index, _) = grid.peak();
            let position = match r {
                Some(v) => triple(&v, "--r")?,
                None => grid.node_position(peak_index),
            };
            let axis = match dipole_axis {
                Some(v) => triple(&v, "--dipole-axis")?,
                None => peak_polarisation(&grid).map(|c| c.re),
            };
            let geom = field_structure(&grid, position, axis).map_err(Failure::from_core)?;
            let v_m_eff = if geom.v_m_eff.is_finite() { json!(geom.v_m_eff) } else { json!("inf") };
            let value = json!({
                "config_sha256": hash,
                "v_m": v_m,
                "v_m_rel": v_m / (lambda / index).powi(3),
                "f_r": geom.f_r,
                "eta": geom.eta,
                "v_m_eff": v_m_eff,
                "r": position,
                "dipole_axis": axis,
            });
            output::write_json(&mut dest(&common, out), &value)
        }
        Command::Harminv { common, signal_file, dt, max_modes, noise_floor } => {
            let (signal, file_dt) = read_ringdown(&signal_file).map_err(Failure::from_core)?;
            let dt = dt.unwrap_or(file_dt);
            let modes = harmonic_inversion(&signal, dt, max_modes, noise_floor).map_err(Failure::from_core)?;
            let columns = vec!["frequency_THz", "Q", "amp_abs", "amp_phase", "decay_rate"];
            let rows = modes
                .iter()
                .map(|m| {
                    vec![
                        (m.frequency / THZ).to_string(),
                        m.q.to_string(),
                        m.amplitude.norm().to_string(),
                        m.amplitude.arg().to_string(),
                        m.decay_rate.to_string(),
                    ]
                })
                .collect();
            let hash = match &common.config {
                Some(_) => load(&common)?.sha256,
                None => output::input_hash(&signal_file).map_err(Failure::Io)?,
            };
            output::write_table(&mut dest(&common, out), common.format.map(is_json), &hash, &Table { columns, rows })
        }
    }
}

fn dest<'a>(common: &Common, out: &'a mut dyn Write) -> Destination<'a> {
    Destination { path: common.output.clone(), stream: out }
}

fn triple(v: &[f64], flag: &str) -> Result<[f64; 3], Failure> {
    match v {
        [x, y, z] => Ok([*x, *y, *z]),
        _ => Err(Failure::Config(anyhow!("{flag} takes three comma-separated numbers, got {}", v.len()))),
    }
}

fn is_json(f: Format) -> bool {
    matches!(f, Format::Json)
}
