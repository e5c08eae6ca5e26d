//! End-to-end checks of the `grp-sis` binary: flag/config precedence,
//! byte-identical reruns under a fixed seed, and the file formats.

use std::path::Path;
use std::process::Command;

fn grp_sis() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grp-sis"))
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn reruns_are_byte_identical_under_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (d1, d2, d3) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (out, seed) in [(&d1, "7"), (&d2, "7"), (&d3, "8")] {
        let status = grp_sis()
            .args([
                "--seed", seed, "--out", out.to_str().unwrap(),
                "simulate", "--n", "300", "--k", "6", "--runs", "3",
                "--t-max", "10", "--beta", "0.2",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(read(&d1.join("ensemble.csv")), read(&d2.join("ensemble.csv")));
    assert_eq!(read(&d1.join("final_ages.csv")), read(&d2.join("final_ages.csv")));
    assert_ne!(read(&d1.join("ensemble.csv")), read(&d3.join("ensemble.csv")));
}

#[test]
fn trajectory_csv_has_comment_header_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let status = grp_sis()
        .args([
            "--seed", "3", "--out", dir.path().to_str().unwrap(),
            "simulate", "--n", "100", "--k", "4", "--t-max", "5", "--grid-dt", "0.5",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# "));
    assert!(comment.contains("n=100") && comment.contains("seed=3"));
    assert_eq!(lines.next().unwrap(), "t,rho_I,rho_S");
    assert_eq!(lines.count(), 11);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "n = 120\nk = 4\nt_max = 5\ngrid_dt = 0.5\nbeta = 0.1\n").unwrap();
    let status = grp_sis()
        .args([
            "--seed", "3", "--out", dir.path().to_str().unwrap(),
            "--config", cfg.to_str().unwrap(),
            "simulate", "--k", "6",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let comment = text.lines().next().unwrap();
    assert!(comment.contains("n=120"), "config n used: {comment}");
    assert!(comment.contains("k=6"), "flag k wins: {comment}");
}

#[test]
fn steady_emits_json_with_the_closed_form_values() {
    let output = grp_sis()
        .args([
            "steady", "--dist", "exponential mu=0.5", "--beta", "0.26", "--mean-k", "10",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let rho = json["rho_i_inf"].as_f64().unwrap();
    assert!((rho - (1.0 - 0.5 / 2.6)).abs() < 1e-12);
    assert!((json["threshold"].as_f64().unwrap() - 0.1).abs() < 1e-15);
    assert!((json["expected_age"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn check_exponential_fits_and_scores_waits() {
    let dir = tempfile::tempdir().unwrap();
    let waits = dir.path().join("waits.csv");
    // header plus a tiny sample with mean 2 -> mu_hat = 0.5
    std::fs::write(&waits, "wait\n1.0\n2.0\n3.0\n1.5\n2.5\n").unwrap();
    let output = grp_sis()
        .args(["check-exponential", "--waits", waits.to_str().unwrap(), "--bins", "2"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!((json["mu_hat"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(json["kl"].as_f64().unwrap().is_finite());
    assert_eq!(json["n"].as_u64().unwrap(), 5);
}

#[test]
fn meanfield_grid_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("grid.bin");
    let status = grp_sis()
        .args([
            "--out", dir.path().to_str().unwrap(),
            "meanfield", "--dist", "exponential mu=0.5", "--beta", "0.26",
            "--t-max", "2", "--dt", "0.05", "--tau-max", "8", "--stride", "10",
            "--dump-grid", dump.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let grid = grpsis::meanfield::read_grid_dump(std::fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!(grid.n_steps, 40);
    assert!((grid.rho_i[0] - 0.3).abs() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("meanfield.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("t,rho_I,rho_S"));
}

#[test]
fn edge_list_exports_and_imports_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("net.edges");
    let run = |out: &Path, extra: &[&str]| {
        let mut args = vec![
            "--seed", "5", "--out", out.to_str().unwrap(),
            "simulate", "--n", "100", "--k", "4", "--t-max", "5", "--grid-dt", "0.5",
        ];
        args.extend_from_slice(extra);
        assert!(grp_sis().args(&args).status().unwrap().success());
    };
    let d1 = dir.path().join("gen");
    run(&d1, &["--export-edges", edges.to_str().unwrap()]);
    let d2 = dir.path().join("imp");
    run(&d2, &["--import-edges", edges.to_str().unwrap()]);
    // same graph, same seed: identical trajectories
    assert_eq!(read(&d1.join("trajectory.csv")), read(&d2.join("trajectory.csv")));
}

#[test]
fn age_pdf_tabulates_the_stationary_density() {
    let dir = tempfile::tempdir().unwrap();
    let status = grp_sis()
        .args([
            "--out", dir.path().to_str().unwrap(),
            "age-pdf", "--dist", "powerlaw lambda=4 t0=1", "--tau-max", "4", "--points", "5",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("age_pdf.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 5);
    // plateau value (lambda-2)/((lambda-1) t0) = 2/3 at tau = 0 and tau = 1
    let first: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
    let second: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((first - 2.0 / 3.0).abs() < 1e-12);
    assert!((second - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn empty_initial_infection_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let output = grp_sis()
        .args([
            "--out", dir.path().to_str().unwrap(),
            "simulate", "--n", "10", "--k", "2", "--rho-i0", "0.05",
            "--t-max", "2", "--grid-dt", "0.5",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("empty initial infection"), "stderr: {stderr}");
}

#[test]
fn fast_reproduce_fig3_emits_artifacts_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let output = grp_sis()
        .args([
            "--fast", "--seed", "11", "--out", dir.path().to_str().unwrap(),
            "reproduce", "fig3", "--variant", "exp",
        ])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "stdout: {stdout}");
    assert!(stdout.contains("[PASS]"));
    assert!(dir.path().join("fig3_exp.csv").exists());
    let svg = std::fs::read_to_string(dir.path().join("fig3_exp.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn unknown_distribution_fails_cleanly() {
    let output = grp_sis()
        .args(["steady", "--dist", "weibull shape=2", "--beta", "0.1", "--mean-k", "10"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unknown distribution"), "stderr: {stderr}");
}
