use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn pdcmodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdcmodes")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("{key} missing in {text}"));
    line.split('=').nth(1).unwrap().trim().parse().unwrap()
}

fn ktp_file() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/materials/ktp.mat")
}

#[test]
fn sgvm_find_reports_operating_point() {
    let o = pdcmodes(&["sgvm", "find", "--w", "9", "--h", "9", "--temp", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!((value(&out, "lambda_sgvm_nm") - 1547.9905).abs() < 1e-3);
    assert!((value(&out, "pump_wavelength_nm") - 773.9952).abs() < 1e-3);
    assert!((value(&out, "poling_period_um") - 55.0441).abs() < 1e-3);
    assert!((value(&out, "gamma_s_s_per_um") + value(&out, "gamma_i_s_per_um")).abs() < 1e-22);
    assert!(value(&out, "residual_ratio_25nm") < 0.1);
}

#[test]
fn physics_errors_exit_with_two() {
    let o = pdcmodes(&["sgvm", "find", "--bracket", "1.2", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error:"));
    let o = pdcmodes(&["sgvm", "find", "--temp", "900"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(pdcmodes(&["warp", "drive"]).status.code(), Some(1));
    assert_eq!(pdcmodes(&["sgvm", "find", "--pol", "yq"]).status.code(), Some(1));
    assert_eq!(pdcmodes(&["sgvm", "find", "--material", "unobtainium"]).status.code(), Some(1));
    assert_eq!(pdcmodes(&["figures", "no_such_figure"]).status.code(), Some(1));
    assert_eq!(pdcmodes(&["figures", "hg_overlap", "--workers", "0"]).status.code(), Some(1));
    assert!(pdcmodes(&["--help"]).status.success());
}

#[test]
fn material_validate() {
    let o = pdcmodes(&["material", "validate", ktp_file().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("material: KTP"));
    assert!(out.contains("Kato"));
    assert!((value(&out, "n_z") - 1.815773).abs() < 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mat");
    fs::write(&bad, "format = 1\nname = half\n").unwrap();
    let o = pdcmodes(&["material", "validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.mat"));
}

fn schmidt_json(path: &Path, extra: &[&str]) -> serde_json::Value {
    let mut args = vec!["schmidt", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = pdcmodes(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn jsa_build_then_schmidt() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("jsa.csv");
    let bin = dir.path().join("jsa.bin");
    let common = ["jsa", "build", "--wp", "4", "--points", "201"];
    for (path, format) in [(&csv, "csv"), (&bin, "bin")] {
        let mut args = common.to_vec();
        args.extend(["--format", format, "--out", path.to_str().unwrap()]);
        let o = pdcmodes(&args);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(fs::metadata(&bin).unwrap().len(), 8 + 8 * 201 * 201);

    let modes = dir.path().join("modes.csv");
    let a = schmidt_json(&csv, &["--modes", modes.to_str().unwrap(), "--gain", "2"]);
    let b = schmidt_json(&bin, &[]);
    let ka = a["schmidt_number"].as_f64().unwrap();
    let kb = b["schmidt_number"].as_f64().unwrap();
    assert!((ka - 4.0).abs() < 0.1, "{ka}");
    // CSV cells carry nine significant digits.
    assert!((ka - kb).abs() < 1e-6 * ka);
    let coeffs: Vec<f64> = a["all_coefficients"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((coeffs.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-10);
    assert_eq!(a["gain"], 2.0);
    let retained = a["num_retained"].as_u64().unwrap() as usize;
    let header = fs::read_to_string(&modes).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header.split(',').count(), 1 + 2 * retained);

    let o = pdcmodes(&["schmidt", bin.to_str().unwrap(), "--modes", modes.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = pdcmodes(&["schmidt", csv.to_str().unwrap(), "--truncation", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
}

const SMALL_SWEEP: &str = r#"{
    "process": {"waveguide": {"width_um": 9, "height_um": 9, "length_mm": 10}},
    "pump": {"width_nm": 4},
    "sweep": [{"variable": "temperature_C", "range": [20, 250, 4]}],
    "observables": ["lambda_sgvm", "K"],
    "grid": {"n_points": 101}
}"#;

#[test]
fn sweep_run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("temps.json");
    fs::write(&cfg, SMALL_SWEEP).unwrap();
    let mut csvs = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("out{workers}"));
        let o = pdcmodes(&["sweep", "run", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap(), "--workers", workers]);
        assert!(o.status.success(), "{}", stderr(&o));
        let csv = fs::read_to_string(out.join("temps.csv")).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "temperature_C,status,lambda_sgvm,K");
        assert_eq!(csv.lines().count(), 5);
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("temps.json")).unwrap()).unwrap();
        assert_eq!(json["rows"].as_array().unwrap().len(), 4);
        csvs.push(csv);
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn malformed_sweep_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    for (name, text) in [
        ("typo.json", SMALL_SWEEP.replace("\"observables\"", "\"observabels\"")),
        ("syntax.json", SMALL_SWEEP.replace('}', "")),
        ("range.json", SMALL_SWEEP.replace("[20, 250, 4]", "[20, 250, -4]")),
        ("unknown.json", SMALL_SWEEP.replace("\"K\"", "\"kappa\"")),
    ] {
        let cfg = dir.path().join(name);
        fs::write(&cfg, text).unwrap();
        let o = pdcmodes(&["sweep", "run", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{name}: {}", stderr(&o));
        assert!(!out.exists(), "{name}");
    }
    let o = pdcmodes(&["sweep", "run", dir.path().join("absent.json").to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn figures_list_names_every_figure() {
    let o = pdcmodes(&["figures", "list"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    assert_eq!(names.len(), 15);
    for name in &names {
        assert!(golden_dir().join(format!("{name}.csv")).is_file(), "{name}");
    }
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn cells(line: &str) -> Vec<&str> {
    line.split(',').collect()
}

/// Numeric comparison, relative 1e-6 plus an absolute floor scaled to the file.
fn assert_csv_close(name: &str, got: &str, want: &str) {
    let got: Vec<&str> = got.lines().collect();
    let want: Vec<&str> = want.lines().collect();
    assert_eq!(got.len(), want.len(), "{name}: row count");
    assert_eq!(got[0], want[0], "{name}: header");
    let scale = want[1..]
        .iter()
        .flat_map(|l| cells(l))
        .filter_map(|c| c.parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    for (r, (g, w)) in got[1..].iter().zip(&want[1..]).enumerate() {
        let (g, w) = (cells(g), cells(w));
        assert_eq!(g.len(), w.len(), "{name}: row {r}");
        for (a, b) in g.iter().zip(&w) {
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) if x.is_nan() || y.is_nan() => assert!(x.is_nan() && y.is_nan(), "{name}: row {r}"),
                (Ok(x), Ok(y)) => assert!(
                    (x - y).abs() <= 1e-6 * y.abs() + 1e-9 * scale,
                    "{name}: row {r}: {x} vs {y}"
                ),
                _ => assert_eq!(a, b, "{name}: row {r}"),
            }
        }
    }
}

#[test]
fn figures_match_golden_files() {
    let bless = std::env::var_os("PDCMODES_BLESS").is_some();
    let o = pdcmodes(&["figures", "list"]);
    for line in stdout(&o).lines() {
        let name = line.split_whitespace().next().unwrap();
        let o = pdcmodes(&["figures", name]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let path = golden_dir().join(format!("{name}.csv"));
        if bless {
            fs::write(&path, &o.stdout).unwrap();
            continue;
        }
        assert_csv_close(name, &stdout(&o), &fs::read_to_string(&path).unwrap());
    }
}

#[test]
fn figure_to_file_equals_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hg.csv");
    assert!(pdcmodes(&["figures", "hg_overlap", "-o", path.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(&path).unwrap(), pdcmodes(&["figures", "hg_overlap"]).stdout);
}
