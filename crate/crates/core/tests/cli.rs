use std::path::Path;
use std::process::Command;

use kelvin_kdv::cli_io::{replay_manifest, run, sweep, RunConfig, ScenarioSource};
use kelvin_kdv::LabCase;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kelvin-kdv"))
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn stabilized(out: &Path, steps: u64) -> RunConfig {
    let mut c = RunConfig::new(ScenarioSource::Lab(LabCase::V12000), out).stabilized();
    c.n_steps = steps;
    c.stride = 25;
    c
}

#[test]
fn manifest_replay_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let s = run(&stabilized(&dir.path().join("orig"), 300)).unwrap();
    let r = replay_manifest(&s.manifest, &dir.path().join("replay")).unwrap();
    assert_eq!(
        std::fs::read(&s.trajectory).unwrap(),
        std::fs::read(&r.trajectory).unwrap()
    );
    assert_eq!(read(&s.manifest), read(&r.manifest));
}

#[test]
fn ten_litre_manifest_records_scales() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::new(ScenarioSource::Lab(LabCase::V10000), dir.path());
    c.n_steps = 0;
    run(&c).unwrap();
    let m = read(&dir.path().join("manifest.txt"));
    let value = |key: &str| -> f64 {
        m.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .unwrap_or_else(|| panic!("{key} missing"))
            .parse()
            .unwrap()
    };
    assert!((value("derived.sigma") - 0.0666).abs() < 5e-5);
    assert!(value("derived.froude") > 1.0);
    for key in [
        "step.dt_s",
        "grid.d_theta_rad",
        "coeff.a_disp",
        "coeff.b_nonlin",
        "coeff.c_time",
        "coeff.d_forcing_amp",
    ] {
        assert!(value(key).is_finite());
    }
}

#[test]
fn zero_steps_writes_only_the_initial_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = stabilized(dir.path(), 0);
    c.grid_points = 20;
    run(&c).unwrap();
    let csv = read(&dir.path().join("trajectory.csv"));
    assert_eq!(csv.lines().count(), 1 + 20);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("0,0,")));
}

#[test]
fn sweep_writes_one_directory_per_config() {
    let dir = tempfile::tempdir().unwrap();
    let configs: Vec<RunConfig> = ["a", "b", "c"]
        .iter()
        .map(|name| stabilized(&dir.path().join(name), 50))
        .collect();
    let results = sweep(&configs);
    assert!(results.iter().all(|r| r.is_ok()));
    let a = std::fs::read(dir.path().join("a/trajectory.csv")).unwrap();
    for name in ["b", "c"] {
        assert_eq!(
            a,
            std::fs::read(dir.path().join(name).join("trajectory.csv")).unwrap()
        );
    }
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ok");
    let ok = bin()
        .args([
            "simulate",
            "--case",
            "12000",
            "--paper-stabilized",
            "--steps",
            "20",
            "--stride",
            "10",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(out.join("diagnostics.txt").exists() && out.join("coefficients.txt").exists());

    let bad = bin()
        .args(["simulate", "--case", "12000", "--courant", "1.5", "--out"])
        .arg(dir.path().join("bad"))
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let blow = bin()
        .args(["simulate", "--case", "10000", "--steps", "100000", "--out"])
        .arg(dir.path().join("blow"))
        .output()
        .unwrap();
    assert_eq!(blow.status.code(), Some(3));
    assert!(dir.path().join("blow/last_good.csv").exists());

    let overfill = dir.path().join("overfill.txt");
    std::fs::write(
        &overfill,
        "r_max_m = 0.223\nr_min_m = 0.125\nwall_height_m = 0.26\nz0_m = 0.05\nvolume_m3 = 0.03\n\
         tau = 0.0167\nomega_rad_s = 6.84\ng = 9.81\nnu = 1.03e-6\nepsilon_mode = sigma2\n",
    )
    .unwrap();
    let o = bin()
        .args(["diagnose", "--scenario"])
        .arg(&overfill)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let missing = bin()
        .args(["diagnose", "--scenario"])
        .arg(dir.path().join("absent.txt"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn cli_reports() {
    let coeffs = bin()
        .args([
            "coeffs",
            "--case",
            "10000",
            "--k-min",
            "0",
            "--k-max",
            "4",
            "--k-count",
            "5",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8(coeffs.stdout).unwrap();
    assert!(text.contains("k,omega"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 6);

    let diag = bin().args(["diagnose", "--csv"]).output().unwrap();
    let text = String::from_utf8(diag.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(1).unwrap().starts_with("10000ml,"));

    let kv = bin()
        .args(["diagnose", "--case", "10000", "--c-exp", "1.547"])
        .output()
        .unwrap();
    let text = String::from_utf8(kv.stdout).unwrap();
    assert!(text.contains("regime = turbulent"));
    assert!(text.contains("critical = super"));

    let sech = bin()
        .args([
            "analytic", "--case", "12000", "--kind", "sech2", "--points", "16",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8(sech.stdout).unwrap();
    assert!(text.starts_with("theta_rad,eta_m\n"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn cli_compare_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = bin()
        .args([
            "simulate",
            "--case",
            "12000",
            "--paper-stabilized",
            "--steps",
            "0",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let profile = dir.path().join("clip.txt");
    let rows: String = (-30..=30)
        .map(|i| {
            let s = 3.0 * i as f64;
            let theta = s * 1e-3 / 0.223;
            format!("{s} {}\n", 88.6 * (-(theta / 0.3f64).powi(2)).exp())
        })
        .collect();
    std::fs::write(&profile, rows).unwrap();
    let cmp = bin()
        .args(["compare", "--case", "12000", "--trajectory"])
        .arg(out.join("trajectory.csv"))
        .arg("--profile")
        .arg(&profile)
        .output()
        .unwrap();
    assert!(
        cmp.status.success(),
        "{}",
        String::from_utf8_lossy(&cmp.stderr)
    );
    assert!(String::from_utf8(cmp.stdout)
        .unwrap()
        .contains("n_compared = 61"));

    let plot = bin()
        .args(["plot", "--kind", "waterfall", "--csv"])
        .arg(out.join("trajectory.csv"))
        .output()
        .unwrap();
    assert!(plot.status.success());
    assert!(out.join("plot_trajectory_waterfall.py").exists());

    let bad = bin()
        .args(["plot", "--kind", "radial", "--csv"])
        .arg(out.join("trajectory.csv"))
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
