use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "\
[geometry]
r_max = 1 nm
r_step = 0.25 nm
theta_points = 21
d_max = 1 nm
d_step = 0.5 nm
beta_step = 0.5 mrad
displacements = 0, 2 nm

[numerics]
pattern_pixels = 41
";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vortex-emcd"));
    cmd.env_remove("VORTEX_EMCD_THREADS");
    cmd
}

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, config).unwrap();
    bin().arg("--config").arg(&cfg).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn probe_reports_ring_radius_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("probe");
    let out = bin().args(["probe", "--out"]).arg(&out_dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("m = +1: ring radius 0.81"), "{text}");
    let echo = fs::read_to_string(out_dir.join("config.resolved.txt")).unwrap();
    assert!(echo.contains("energy = 200000 eV") && echo.contains("alpha = 1.2 mrad"));
    assert!(echo.contains("rho = 10 bohr") && echo.contains("element = Fe"));
    assert!(out_dir.join("probe_m+1.png").exists());
    let profile = fs::read_to_string(out_dir.join("probe_profile.csv")).unwrap();
    assert!(profile.starts_with("r_nm,intensity_m+1_per_bohr2,intensity_m-1_per_bohr2"));
}

#[test]
fn m_zero_probe_peaks_on_axis() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "[beam]\nm = 0\n[output]\nrender = false\n", &["probe", "--out", dir.path().join("o").to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("o/probe_profile.csv")).unwrap();
    let values: Vec<f64> = column(&csv, "intensity_m+0_per_bohr2").iter().map(|v| v.parse().unwrap()).collect();
    assert!(values.windows(2).take(50).all(|w| w[1] <= w[0]));
    assert!(!dir.path().join("o/probe_m+0.png").exists());
}

#[test]
fn config_errors_exit_with_two_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        ("[beam]\nalpha = 1.2\n", "beam.alpha"),
        ("[edge]\nrho = 10 furlong\n", "edge.rho"),
        ("[geometry]\nfoo = 1 nm\n", "geometry.foo"),
    ] {
        let out = run(dir.path(), text, &["probe"]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(key));
    }
    let out = bin().args(["probe", "--config", "/nonexistent/run.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["probe", "--threads", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[geometry]\ndisplacements = 0 nm\n[numerics]\noracle_extent = 2 nm\n";
    let out = run(dir.path(), text, &["oracle-dump", "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn thread_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("VORTEX_EMCD_THREADS", "2")
        .args(["probe", "--no-render", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin().env("VORTEX_EMCD_THREADS", "many").arg("probe").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn emcd_map_is_deterministic_and_anchored() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out_dir in [&a, &b] {
        let out = run(dir.path(), SMALL, &["emcd-map", "--no-render", "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("EMCD at R = 0, theta = 0: -50.000%"));
    }
    let first = fs::read(a.join("emcd_map.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("emcd_map.csv")).unwrap());
    let csv = String::from_utf8(first).unwrap();
    assert!(csv.starts_with("R_nm,theta_mrad,I_plus_au,I_minus_au,emcd\n"));
    assert_eq!(csv.lines().count(), 1 + 5 * 21);
    assert!(!a.join("emcd_map.png").exists());
}

#[test]
fn unpolarized_override_gives_a_zero_map() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{SMALL}\n[edge]\npolarization = unpolarized\n[output]\nrender = false\n");
    let out = run(dir.path(), &text, &["emcd-map", "--out", dir.path().join("o").to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("o/emcd_map.csv")).unwrap();
    for v in column(&csv, "emcd") {
        let x: f64 = v.parse().unwrap();
        assert!(x.abs() < 1e-12, "{x}");
    }
}

#[test]
fn integrated_map_files_and_rendering() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let out = run(dir.path(), SMALL, &["emcd-integrated", "--render", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("emcd_integrated.csv")).unwrap();
    assert!(csv.starts_with("d_nm,beta_mrad,I_plus_au,I_minus_au,emcd,snr_unit_dose\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 21);
    let best = fs::read_to_string(out_dir.join("optimal_beta.csv")).unwrap();
    let beta: f64 = column(&best, "beta_opt_mrad")[0].parse().unwrap();
    assert!((2.0..=4.0).contains(&beta), "{beta}");
    assert!(out_dir.join("emcd_integrated.png").exists());
}

#[test]
fn emcd_commands_need_both_chiralities() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "[beam]\nm = 1\n", &["emcd-map"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beam.m"));
}

#[test]
fn diffraction_gallery_reports_scales() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let out = run(dir.path(), SMALL, &["diffraction", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("relative L2 difference between m = +1 and m = -1 patterns"), "{text}");
    let peak = |name: &str| -> f64 {
        let csv = fs::read_to_string(out_dir.join(name)).unwrap();
        column(&csv, "intensity_au").iter().map(|v| v.parse::<f64>().unwrap()).fold(0.0, f64::max)
    };
    let ratio = peak("diffraction_m+1_R0.000nm_mu-1.csv") / peak("diffraction_m+1_R2.000nm_mu-1.csv");
    assert!((30.0..=270.0).contains(&ratio), "{ratio}");
    assert!(out_dir.join("diffraction_m-1_R2.000nm_mu-1.png").exists());
    // centered atom: the two chiralities select different outgoing orders
    let diff = peak("diffraction_m+1_R0.000nm_mu-1.csv") / peak("diffraction_m-1_R0.000nm_mu-1.csv");
    assert!(diff > 2.0, "{diff}");
}
