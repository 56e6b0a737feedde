use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;
use tempfile::TempDir;

fn stwpa(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stwpa"))
        .args(args)
        .current_dir(root)
        .env("STWPA_OUT_DIR", root.join("out"))
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn ok(root: &Path, args: &[&str]) -> Value {
    let out = stwpa(root, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("summary is JSON")
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Data rows of a CSV written by the tool, split into fields.
fn rows(path: impl AsRef<Path>) -> (Vec<String>, Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut header = Vec::new();
    let mut lines = text.lines();
    let mut columns = Vec::new();
    for line in lines.by_ref() {
        if let Some(h) = line.strip_prefix("# ") {
            header.push(h.to_string());
        } else {
            columns = line.split(',').map(String::from).collect();
            break;
        }
    }
    let data = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, columns, data)
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn coeffs_defaults_pass_through_the_operating_point() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["coeffs"]);
    let run = dir.path().join("out/coeffs");
    let (header, columns, data) = rows(run.join("coeffs.csv"));
    assert_eq!(columns, ["phi_ext", "c3", "c4", "alpha_tilde"]);
    assert_eq!(data.len(), 401);
    let manifest = json(run.join("manifest.json"));
    let digest = manifest["digest"].as_str().unwrap();
    assert!(header.contains(&format!("manifest sha256:{digest}")), "{header:?}");
    assert!(header.iter().any(|h| h == "columns: phi_ext,c3,c4,alpha_tilde"));

    // phi_ext = 1.19 pi is not a grid point; interpolate between neighbours
    let target = 1.19 * std::f64::consts::PI;
    let j = data.iter().position(|r| f(&r[0]) > target).unwrap();
    let (x0, x1) = (f(&data[j - 1][0]), f(&data[j][0]));
    let u = (target - x0) / (x1 - x0);
    let at = |c: usize| f(&data[j - 1][c]) * (1.0 - u) + f(&data[j][c]) * u;
    assert!((at(1) - 0.32).abs() < 0.01, "c3 {}", at(1));
    assert!(at(2).abs() < 0.02, "c4 {}", at(2));
}

#[test]
fn coeffs_single_symmetric_point() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["coeffs", "--points", "1", "--flux-min", "0", "--flux-max", "0"],
    );
    let (_, _, data) = rows(dir.path().join("out/coeffs/coeffs.csv"));
    assert_eq!(data.len(), 1);
    assert_eq!(f(&data[0][0]), 0.0);
    assert_eq!(f(&data[0][1]), 0.0);
    assert!((f(&data[0][2]) + 0.325 / 0.7).abs() < 1e-12);
}

#[test]
fn parameter_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = stwpa(dir.path(), &["coeffs", "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("alpha must lie in (0, 1)"), "{err}");

    for args in [
        &["simulate", "--dt", "0"][..],
        &["collide", "--right-n0", "200", "--left-n0", "100"],
        &["soliton", "--amplitude", "-0.02"],
        &["simulate", "--bogus"],
        &["coeffs", "--sweep", "nope=1,2"],
    ] {
        assert_eq!(stwpa(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numerical_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let out = stwpa(
        dir.path(),
        &["simulate", "--amplitude", "0.5", "--dt", "2", "--t-end", "2000"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn replay_reproduces_bytes_in_another_root() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--binary", "--t-end", "50", "--c4", "-0.01"]);
    let first = dir.path().join("out/simulate");
    let other = dir.path().join("elsewhere");
    ok(
        dir.path(),
        &[
            "replay",
            first.join("manifest.json").to_str().unwrap(),
            "--out-root",
            other.to_str().unwrap(),
        ],
    );
    for name in ["trajectory.csv", "trajectory.stwpa", "report.json", "manifest.json"] {
        let (a, b) = (
            fs::read(first.join(name)).unwrap(),
            fs::read(other.join("simulate").join(name)).unwrap(),
        );
        assert!(a == b, "{name} differs");
    }
}

#[test]
fn replay_rejects_edited_manifest() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["units"]);
    let path = dir.path().join("out/units/manifest.json");
    let edited = fs::read_to_string(&path).unwrap().replace("0.02", "0.03");
    fs::write(&path, edited).unwrap();
    let out = stwpa(dir.path(), &["replay", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn replay_checks_input_files() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "soliton", "--x-min", "-150", "--x-max", "150", "--points", "601", "--out", "pulse",
        ],
    );
    let pulse = dir.path().join("out/pulse/soliton.csv");
    let summary = ok(dir.path(), &["predict", "--input", pulse.to_str().unwrap()]);
    let a = summary["predicted_amplitudes"].as_array().unwrap();
    assert_eq!(a.len(), 1);
    assert!((a[0].as_f64().unwrap() / 0.02 - 1.0).abs() < 0.005);

    let manifest = dir.path().join("out/predict/manifest.json");
    assert_eq!(json(&manifest)["inputs"].as_array().unwrap().len(), 1);
    ok(dir.path(), &["replay", manifest.to_str().unwrap(), "--out", "again"]);
    assert_eq!(
        fs::read(dir.path().join("out/predict/prediction.json")).unwrap(),
        fs::read(dir.path().join("out/again/prediction.json")).unwrap()
    );
    fs::write(&pulse, "x,phi\n0,0\n").unwrap();
    assert_eq!(
        stwpa(dir.path(), &["replay", manifest.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn output_root_precedence() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["units"]);
    assert!(dir.path().join("out/units/units.json").exists());
    let flag_root = dir.path().join("flag");
    ok(
        dir.path(),
        &["units", "--out-root", flag_root.to_str().unwrap(), "--out", "u"],
    );
    assert!(flag_root.join("u/units.json").exists());

    let out = Command::new(env!("CARGO_BIN_EXE_stwpa"))
        .arg("units")
        .current_dir(dir.path())
        .env_remove("STWPA_OUT_DIR")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("stwpa-out/units/units.json").exists());
}

#[test]
fn collide_paper_is_elastic() {
    let dir = TempDir::new().unwrap();
    let s = ok(dir.path(), &["collide", "--paper", "--right-amplitude", "0.1"]);
    assert_eq!(s["paper"], true);
    let after: Vec<f64> = s["amplitudes_after"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!((after[0] / 0.04 - 1.0).abs() < 0.05, "{after:?}");
    assert!((after[1] / 0.02 - 1.0).abs() < 0.05, "{after:?}");
    let (_, columns, _) = rows(dir.path().join("out/collide/trajectory.csv"));
    assert_eq!(columns, ["t_bar", "n", "phi", "phi_dot"]);
}

#[test]
fn horizons_default_pair() {
    let dir = TempDir::new().unwrap();
    let s = ok(dir.path(), &["horizons"]);
    let h = s["report"]["horizons"].as_array().unwrap();
    assert_eq!(h.len(), 2);
    for (hz, sign) in h.iter().zip([-1.0, 1.0]) {
        assert!((hz["eta"].as_f64().unwrap() - sign * 15.7).abs() < 0.1);
    }
    let (_, columns, data) = rows(dir.path().join("out/horizons/profile.csv"));
    assert_eq!(columns, ["eta", "v_over_v0", "region"]);
    let mid = &data[data.len() / 2];
    assert_eq!((f(&mid[0]), mid[2].as_str()), (0.0, "II"));
    assert_eq!(data[0][2], "I");
    assert_eq!(data.last().unwrap()[2], "III");
}

#[test]
fn si_outputs_change_units() {
    let dir = TempDir::new().unwrap();
    let s = ok(dir.path(), &["horizons", "--si"]);
    let m = s["horizons_m"][1].as_f64().unwrap();
    assert!((m - 15.69e-5).abs() < 1e-6, "{m}");
    assert!(s["report"]["horizons"][0]["t_h"].as_f64().unwrap() > 0.0);
    let sol = ok(dir.path(), &["soliton", "--si", "--points", "4001"]);
    let (_, columns, data) = rows(dir.path().join("out/soliton/soliton.csv"));
    assert_eq!(columns, ["x_m", "phi", "voltage_V"]);
    assert!((f(&data[0][0]) + 2e-3).abs() < 1e-15);
    // junction voltage (hbar/2e) dphi/dt peaks at v A k 4/(3 sqrt 3) in units of hbar w0 / 2e
    let units = ok(dir.path(), &["units"]);
    let scale = units["scales"]["omega0"].as_f64().unwrap() * 1.054_571_817e-34 / (2.0 * 1.602_176_634e-19);
    let (v, k) = (sol["velocity"].as_f64().unwrap(), sol["wavenumber"].as_f64().unwrap());
    let expected = scale * v * 0.02 * k * 4.0 / (3.0 * 3f64.sqrt());
    let peak = data.iter().map(|r| f(&r[2])).fold(0.0f64, f64::max);
    assert!((peak / expected - 1.0).abs() < 1e-4, "{peak} vs {expected}");
}

#[test]
fn linear_gaussian_reports_dispersion() {
    let dir = TempDir::new().unwrap();
    let s = ok(
        dir.path(),
        &["simulate", "--c3", "0", "--c4", "0", "--pulse", "gaussian"],
    );
    assert!(s["peak_ratio"].as_f64().unwrap() < 0.97);
    let history = json(dir.path().join("out/simulate/report.json"))["peak_history"].clone();
    let peaks: Vec<f64> = history
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p[1].as_f64().unwrap())
        .collect();
    // a Gaussian is not an exact right mover; compare the halves of the run
    let half = peaks.len() / 2;
    let late = peaks[half..].iter().cloned().fold(0.0f64, f64::max);
    let early = peaks[..half].iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(late < early, "{peaks:?}");
}

#[test]
fn soliton_file_seeds_a_simulation() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "soliton", "--x0", "100", "--x-min", "0", "--x-max", "399", "--points", "400", "--out", "seed",
        ],
    );
    let seed = dir.path().join("out/seed/soliton.csv");
    let from_file = ok(
        dir.path(),
        &[
            "simulate",
            "--pulse",
            "file",
            "--init",
            seed.to_str().unwrap(),
            "--out",
            "a",
        ],
    );
    let direct = ok(dir.path(), &["simulate", "--out", "b"]);
    let v = |s: &Value| s["measurement"]["v_over_v0"].as_f64().unwrap();
    assert!((v(&from_file) - v(&direct)).abs() < 1e-6);
}

#[test]
fn probe_between_horizons_stays_there() {
    let dir = TempDir::new().unwrap();
    let s = ok(dir.path(), &["probe", "--steps", "4000"]);
    assert_eq!(s["initial_region"], "II");
    assert_eq!(s["left_initial_region"], false);
    let audit = json(dir.path().join("out/probe/audit.json"));
    assert_eq!(audit["audit"]["entries"].as_array().unwrap().len(), 41);
}

#[test]
fn sweep_runs_are_isolated_and_replayable() {
    let dir = TempDir::new().unwrap();
    let index = ok(
        dir.path(),
        &[
            "soliton",
            "--sweep",
            "amplitude=0.01,0.02",
            "--sweep",
            "direction=right,left",
        ],
    );
    let runs = index["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 4);
    let base = dir.path().join("out/soliton");
    assert!(base.join("sweep.json").exists());
    let mut digests = Vec::new();
    for r in runs {
        assert_eq!(r["exit_code"], 0);
        let run = base.join(r["dir"].as_str().unwrap());
        let m = json(run.join("manifest.json"));
        assert_eq!(m["params"]["amplitude"], r["assignments"]["amplitude"]);
        assert_eq!(m["params"]["direction"], r["assignments"]["direction"]);
        digests.push(m["digest"].as_str().unwrap().to_string());
    }
    digests.sort();
    digests.dedup();
    assert_eq!(digests.len(), 4);

    let other = dir.path().join("other");
    let m = base.join("run-003/manifest.json");
    ok(
        dir.path(),
        &["replay", m.to_str().unwrap(), "--out-root", other.to_str().unwrap()],
    );
    assert_eq!(
        fs::read(base.join("run-003/soliton.csv")).unwrap(),
        fs::read(other.join("soliton/run-003/soliton.csv")).unwrap()
    );
}

#[test]
fn sweep_reports_failures_per_run() {
    let dir = TempDir::new().unwrap();
    let out = stwpa(dir.path(), &["coeffs", "--points", "3", "--sweep", "alpha=0.2,1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let index = json(dir.path().join("out/coeffs/sweep.json"));
    assert_eq!(index["runs"][0]["exit_code"], 0);
    assert_eq!(index["runs"][1]["exit_code"], 2);
}

#[test]
fn every_subcommand_runs_with_defaults() {
    let dir = TempDir::new().unwrap();
    for cmd in [
        "coeffs", "units", "soliton", "simulate", "collide", "horizons", "probe", "predict",
    ] {
        let start = Instant::now();
        ok(dir.path(), &[cmd]);
        let took = start.elapsed();
        assert!(took < Duration::from_secs(60), "{cmd} took {took:?}");
        let m = json(dir.path().join("out").join(cmd).join("manifest.json"));
        assert_eq!(m["subcommand"], cmd);
        assert!(!m["outputs"].as_array().unwrap().is_empty());
    }
}
