//! Command behaviour, exercised in process through `execute`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nvsource_core::photonics::FieldGrid;
use nvsource_core::C64;

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name).to_string_lossy().into_owned()
}

struct Outcome {
    code: u8,
    stdout: Vec<u8>,
    stderr: Vec<u8>,
}

fn run(args: &[&str]) -> Outcome {
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let code = super::execute(std::iter::once("nvsource").chain(args.iter().copied()), &mut stdout, &mut stderr);
    Outcome { code, stdout, stderr }
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.code, 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&ok(args)).unwrap()
}

/// Data lines of a CSV table as (header, rows), skipping the provenance line.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config_sha256="));
    let split = |l: &str| l.split(',').map(str::to_string).collect::<Vec<_>>();
    let header = split(lines.next().unwrap());
    (header, lines.map(split).collect())
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn no_dephasing_gives_unit_zpl_indistinguishability() {
    let v = json(&["fom", "--config", &config("fig3d.toml"), "--set", "emitter.gamma_star_THz=0", "--q", "3000"]);
    assert!((v["i_zpl"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn single_point_sweep_matches_fom() {
    let c = config("fig3d.toml");
    let sets = ["--set", "cavity.v_m_rel=0.002", "--set", "cavity.q=5000"];
    let mut sweep_args = vec!["sweep", "--config", &c];
    sweep_args.extend(sets);
    let mut fom_args = vec!["fom", "--config", &c, "--format", "csv"];
    fom_args.extend(sets);
    let (sweep, fom) = (ok(&sweep_args), ok(&fom_args));
    assert_eq!(sweep, fom);
    let (header, rows) = table(&sweep);
    assert_eq!(rows.len(), 1);
    let expected = ["v_m_rel", "q", "g", "kappa_c", "i_zpl", "f_zpl", "f_sb", "i_total", "beta", "beta_times_i", "status"];
    assert_eq!(header, expected);
}

#[test]
fn sweep_rows_run_volume_outer_q_inner() {
    let c = config("fig3d.toml");
    let text = ok(&["sweep", "--config", &c, "--set", "cavity.v_m_rel=[0.001, 0.01]", "--set", "cavity.q=[100, 200, 300]"]);
    let (header, rows) = table(&text);
    assert_eq!(column(&header, &rows, "v_m_rel"), [0.001, 0.001, 0.001, 0.01, 0.01, 0.01]);
    assert_eq!(column(&header, &rows, "q"), [100.0, 200.0, 300.0, 100.0, 200.0, 300.0]);
    assert!(rows.iter().all(|r| r.last().unwrap() == "ok"));
}

#[test]
fn doubling_dephasing_lowers_best_zpl_indistinguishability() {
    let c = config("fig3d.toml");
    let best = |extra: &[&str]| {
        let mut args = vec!["sweep", "--config", c.as_str()];
        args.extend_from_slice(extra);
        let (h, r) = table(&ok(&args));
        column(&h, &r, "i_zpl").into_iter().fold(f64::MIN, f64::max)
    };
    assert!(best(&["--set", "emitter.gamma_star_THz=2.0"]) < best(&[]));
}

#[test]
fn provenance_hash_tracks_configuration() {
    let c = config("fig3d.toml");
    let a = ok(&["fom", "--config", &c, "--format", "csv"]);
    let b = ok(&["fom", "--config", &c, "--format", "csv", "--set", "cavity.n=2.4"]);
    let hash = |t: &str| t.lines().next().unwrap().to_string();
    assert_eq!(hash(&a).len(), "# config_sha256=".len() + 64);
    assert_ne!(hash(&a), hash(&b));
    let j = json(&["fom", "--config", &c]);
    assert_eq!(format!("# config_sha256={}", j["config_sha256"].as_str().unwrap()), hash(&a));
}

#[test]
fn wide_filter_is_transparent_and_beta_grows_with_width() {
    let c = config("fig3d.toml");
    let point = ["--v-m-rel", "0.001", "--q", "15848.931924611135"];
    let mut args = vec!["fom", "--config", c.as_str()];
    args.extend(point);
    let base = json(&args);
    let kappa_thz = base["kappa_c"].as_f64().unwrap() / (2.0 * PI * 1e12);
    let wide = format!("filter.kappa_f_THz={}", 1e4 * kappa_thz);
    args.extend(["--set", wide.as_str()]);
    let f = json(&args);
    assert!((f["i_total"].as_f64().unwrap() - base["i_total"].as_f64().unwrap()).abs() < 1e-4);
    assert!((f["beta"].as_f64().unwrap() - 1.0).abs() < 1e-4);

    let mut scan = vec!["filter-scan", "--config", c.as_str()];
    scan.extend(point);
    let (h, rows) = table(&ok(&scan));
    let beta = column(&h, &rows, "beta");
    assert!(beta.windows(2).all(|w| w[1] > w[0]), "{beta:?}");
    let i = column(&h, &rows, "i_total");
    assert!(i[0] > base["i_total"].as_f64().unwrap());
}

#[test]
fn theta_scan_reduces_to_two_level_when_aligned() {
    let c = config("fig5b.toml");
    let text = ok(&[
        "theta-scan",
        "--config",
        &c,
        "--set",
        "three_level.gamma_star_xy_THz=0",
        "--set",
        "three_level.initial=x",
        "--set",
        "three_level.resonant=x",
    ]);
    let (h, rows) = table(&text);
    let theta = column(&h, &rows, "theta");
    assert_eq!(theta.len(), 11);
    assert!((theta[10] - PI / 2.0).abs() < 1e-15);
    // at θ = 0 the cavity sees only e_y, which is never populated
    assert_eq!(rows[0].last().unwrap(), "failed:vanishing_power");
    assert_eq!(rows[10].last().unwrap(), "ok");
    let aligned: f64 = rows[10][h.iter().position(|c| c == "i_zpl").unwrap()].parse().unwrap();
    let two = json(&["fom", "--config", &config("fig3d.toml"), "--set", "emitter.gamma_star_THz=0", "--q", "15848.931924611135"]);
    assert!((aligned - two["i_zpl"].as_f64().unwrap()).abs() < 1e-3);
}

#[test]
fn theta_scan_needs_three_level_model() {
    let out = run(&["theta-scan", "--config", &config("fig3d.toml")]);
    assert_eq!(out.code, 1);
}

#[test]
fn exit_codes_classify_failures() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    assert_eq!(run(&["fom", "--config", missing.to_str().unwrap()]).code, 3);

    let c = config("fig3d.toml");
    let bad_key = run(&["fom", "--config", &c, "--set", "emitter.gama=1"]);
    assert_eq!(bad_key.code, 1);
    assert!(String::from_utf8_lossy(&bad_key.stderr).contains("gama"));

    let bad_value = run(&["fom", "--config", &c, "--set", "emitter.debye_waller=2"]);
    assert_eq!(bad_value.code, 1);

    // the sampled route cannot resolve a 30 MHz lifetime against THz dephasing
    let coarse = run(&["fom", "--config", &c, "--set", "numerics.method=grid"]);
    assert_eq!(coarse.code, 2);
    assert!(String::from_utf8_lossy(&coarse.stderr).contains("exact route"));

    let unwritable = dir.path().join("no/such/dir/out.csv");
    assert_eq!(run(&["fom", "--config", &c, "--output", unwritable.to_str().unwrap()]).code, 3);
}

#[test]
fn failed_points_keep_the_sweep_going() {
    let c = config("fig3d.toml");
    let text = ok(&["sweep", "--config", &c, "--set", "numerics.method=grid", "--set", "cavity.v_m_rel=0.001", "--set", "cavity.q=[10, 100]"]);
    let (_, rows) = table(&text);
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r.last().unwrap(), "failed:coarse_grid");
        assert!(!r.iter().any(|f| f.eq_ignore_ascii_case("nan")));
    }
}

#[test]
fn output_file_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let c = config("fig3d.toml");
    ok(&["sweep", "--config", &c, "--set", "cavity.q=[100, 1000]", "--set", "cavity.v_m_rel=0.01", "--format", "json", "--output", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["config_sha256"].as_str().unwrap().len(), 64);
}

fn write_gaussian_field(path: &Path, sigma: f64) {
    let n = 41;
    let axis: Vec<f64> = (0..n).map(|k| -6.0 * sigma + 12.0 * sigma * k as f64 / (n - 1) as f64).collect();
    let mut eps = Vec::new();
    let mut e = Vec::new();
    for &x in &axis {
        for &y in &axis {
            for &z in &axis {
                eps.push(4.0);
                let v = (-(x * x + y * y + z * z) / (4.0 * sigma * sigma)).exp();
                e.push([C64::new(0.0, 0.0), C64::new(v, 0.0), C64::new(0.0, 0.0)]);
            }
        }
    }
    FieldGrid::new(axis.clone(), axis.clone(), axis, eps, e).unwrap().write_binary(path).unwrap();
}

#[test]
fn modevol_reports_volume_and_structure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.bin");
    let sigma = 20e-9;
    write_gaussian_field(&path, sigma);
    let v = json(&["modevol", path.to_str().unwrap()]);
    let oracle = (2.0 * PI).powf(1.5) * sigma.powi(3);
    assert!((v["v_m"].as_f64().unwrap() / oracle - 1.0).abs() < 1e-3);
    let lambda_n: f64 = 637e-9 / 2.0;
    assert!((v["v_m_rel"].as_f64().unwrap() / (oracle / lambda_n.powi(3)) - 1.0).abs() < 1e-3);
    assert!((v["f_r"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["eta"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    // a node one standard deviation off the peak along x, dipole at 60°
    let r = format!("{},0,0", 6.0 * sigma / 20.0 * 3.0);
    let off = json(&["modevol", path.to_str().unwrap(), "--r", &r, "--dipole-axis", "0,0.5,0.8660254037844386"]);
    let x: f64 = 6.0 * sigma / 20.0 * 3.0;
    assert!((off["f_r"].as_f64().unwrap() - (-(x * x) / (4.0 * sigma * sigma)).exp()).abs() < 1e-9);
    assert!((off["eta"].as_f64().unwrap() - 0.5).abs() < 1e-9);

    let bad = dir.path().join("bad.bin");
    std::fs::write(&bad, b"{\"format\":\"nvsource-field\"").unwrap();
    let out = run(&["modevol", bad.to_str().unwrap()]);
    assert_eq!(out.code, 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte"));
}

#[test]
fn harminv_reads_ringdown_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.csv");
    let (f, q) = (470e12, 800.0);
    let dt = 1.0 / (20.0 * f);
    let mut text = String::from("time,re\n");
    for k in 0..2000 {
        let t = k as f64 * dt;
        text.push_str(&format!("{t:e},{:e}\n", (-PI * f / q * t).exp() * (2.0 * PI * f * t).cos()));
    }
    std::fs::write(&path, text).unwrap();
    let (h, rows) = table(&ok(&["harminv", path.to_str().unwrap(), "--max-modes", "3"]));
    assert_eq!(h, ["frequency_THz", "Q", "amp_abs", "amp_phase", "decay_rate"]);
    assert_eq!(rows.len(), 1);
    assert!((column(&h, &rows, "frequency_THz")[0] / 470.0 - 1.0).abs() < 1e-4);
    assert!((column(&h, &rows, "Q")[0] / q - 1.0).abs() < 1e-2);
}
