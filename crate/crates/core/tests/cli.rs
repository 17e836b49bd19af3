use std::path::Path;
use std::process::{Command, Output};

use decaycert::linalg::real;
use decaycert::mtx::save_matrix;
use decaycert::report::RunReport;
use decaycert::CMat;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decaycert")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> RunReport {
    RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("valid report on stdout")
}

fn write_scalar(dir: &Path, a: num_complex::Complex64, d: num_complex::Complex64) -> (String, String) {
    let pa = dir.join("A.mtx");
    let pd = dir.join("D.mtx");
    save_matrix(&CMat::from_element(1, 1, a), &pa).unwrap();
    save_matrix(&CMat::from_element(1, 1, d), &pd).unwrap();
    (pa.to_str().unwrap().to_owned(), pd.to_str().unwrap().to_owned())
}

#[test]
fn pinned_certificate_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, d) = write_scalar(dir.path(), real(1.0), real(2.0));
    let out = run(&["certify", "--A", &a, "--D", &d, "--variant", "t1", "--k", "1", "--m", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&out);
    assert_eq!(rep.certificates.len(), 1);
    let entry = &rep.certificates[0];
    assert!(entry.pinned);
    assert!((entry.certificate.omega1_value - 1.0).abs() < 1e-12);
    assert!((entry.certificate.omega2_value - 4.0).abs() < 1e-12);
    assert!((entry.certificate.rate - 0.125).abs() < 1e-12);
    assert!(rep.passed);
}

#[test]
fn report_written_to_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["spectrum", "--generate", "scalar", "--a", "1+1i", "--d", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let rep = RunReport::from_json(&text).unwrap();
    let spec = rep.spectrum.as_ref().expect("spectrum section");
    assert!((spec.spectral_abscissa - (0.5f64.sqrt() - 1.0)).abs() < 1e-12);
    assert_eq!(RunReport::from_json(&rep.to_json().unwrap()).unwrap(), rep);
}

#[test]
fn k_at_least_beta_exits_two() {
    let out = run(&["certify", "--generate", "scalar", "--a", "1", "--d", "2", "--variant", "t1", "--k", "2", "--m", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!report(&out).passed);
}

#[test]
fn failed_assumption_exits_two() {
    // D = 0 violates strict accretivity.
    let out = run(&["certify", "--generate", "scalar", "--a", "1", "--d", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.mtx");
    let missing = missing.to_str().unwrap();
    assert_eq!(run(&["decompose", "--A", missing, "--D", missing]).status.code(), Some(1));

    let bad = dir.path().join("bad.mtx");
    std::fs::write(&bad, "%%MatrixMarket matrix array real general\n2 2\n1\n").unwrap();
    let bad = bad.to_str().unwrap();
    assert_eq!(run(&["decompose", "--A", bad, "--D", bad]).status.code(), Some(1));

    let (a, _) = write_scalar(dir.path(), real(1.0), real(1.0));
    let two = dir.path().join("D2.mtx");
    save_matrix(&CMat::identity(2, 2), &two).unwrap();
    assert_eq!(run(&["decompose", "--A", &a, "--D", two.to_str().unwrap()]).status.code(), Some(1));

    assert_eq!(run(&["certify"]).status.code(), Some(1));
    assert_eq!(run(&["certify", "--generate", "scalar", "--k", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let out = run(&[
        "simulate", "--generate", "random", "--n", "3", "--seed", "4", "--sector-tan-max", "0.2", "--samples", "50", "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,E,re_x0,im_x0,re_x1,im_x1,re_x2,im_x2,re_x3,im_x3,re_x4,im_x4,re_x5,im_x5");
    assert_eq!(lines.count(), 50);
    let sim = report(&out).simulation.expect("simulation section");
    assert_eq!(sim.envelope_holds, Some(true));
}

#[test]
fn generate_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("pair");
    let out = run(&["generate", "--generate", "damped-wave", "--n", "4", "--d", "2", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let a = out_dir.join("A.mtx");
    let d = out_dir.join("D.mtx");
    assert!(a.exists() && d.exists());
    let out = run(&["check", "--A", a.to_str().unwrap(), "--D", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&out);
    assert_eq!(rep.decomposition.as_ref().unwrap().dim, 4);
    assert!(rep.passed);
}

#[test]
fn both_variants_with_one_failing_is_not_fatal() {
    let out = run(&["check", "--generate", "random", "--n", "20", "--seed", "3", "--sector-tan-max", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert!(rep.passed);
    let valid: Vec<bool> = rep.certificates.iter().map(|c| c.certificate.valid).collect();
    assert_eq!(valid, [true]);
    let t2 = rep.errors.iter().find(|e| e.stage == "certify:t2").expect("t2 failure recorded");
    assert_eq!(t2.kind, "NoValidCertificate");
    assert!(!t2.fatal);
}

#[test]
fn decompose_scalar_constants() {
    let out = run(&["decompose", "--generate", "scalar", "--a", "2+1i", "--d", "3-0.5i"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let dec = rep.decomposition.unwrap();
    assert_eq!(dec.a0, 2.0);
    assert_eq!(dec.beta, 3.0);
    assert!((dec.delta - 1.5).abs() < 1e-12);
    assert!((dec.sector_tan - 0.5).abs() < 1e-12);
}
