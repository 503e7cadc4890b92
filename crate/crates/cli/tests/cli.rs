use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quatode"))
}

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("problems")
        .join(name)
}

fn write_problem(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("problem.txt");
    fs::write(&path, text).unwrap();
    path
}

fn solve(args: &[&str]) -> Output {
    bin().arg("solve").args(args).output().unwrap()
}

fn summary(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("summary on stdout is JSON")
}

/// Rows of a CSV trajectory as `(t, q, norm, residual)`.
fn rows(csv: &str) -> Vec<(f64, [f64; 4], f64, Option<f64>)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,q_w,q_x,q_y,q_z,norm,residual"));
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f.len(), 7, "{line}");
            let v = |i: usize| f[i].parse::<f64>().unwrap();
            let residual = (!f[6].is_empty()).then(|| v(6));
            (v(0), [v(1), v(2), v(3), v(4)], v(5), residual)
        })
        .collect()
}

#[test]
fn rotating_frame_uses_closed_form_and_matches_oracle() {
    let dir = TempDir::new().unwrap();
    let csv_path = dir.path().join("out.csv");
    let out = solve(&[
        problem("rotating_frame.txt").to_str().unwrap(),
        "--verify",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = summary(&out);
    assert_eq!(s["strategy"], "special-case-I");
    assert!(s["oracle_deviation"].as_f64().unwrap() <= 1e-6);
    assert!(s["max_residual"].as_f64().unwrap() <= 1e-5);
    assert!(s["wall_time_ms"].as_f64().is_some());
    let rows = rows(&fs::read_to_string(&csv_path).unwrap());
    assert_eq!(rows.len(), 3001);
    let (t, q, _, _) = rows[rows.len() - 1];
    assert_eq!(t, 3.0);
    // e^{j3} e^{k3}
    let (s3, c3) = 3f64.sin_cos();
    let want = [c3 * c3, s3 * s3, s3 * c3, c3 * s3];
    for i in 0..4 {
        assert!((q[i] - want[i]).abs() < 1e-9);
    }
}

#[test]
fn zero_imaginary_part_is_degenerate_commutative() {
    let dir = TempDir::new().unwrap();
    let file = write_problem(
        &dir,
        "a0 = cos(t)\nt_end = 2\nq0 = 0.5 -1 2 0.25\nstep = 0.01\n",
    );
    let out = solve(&[file.to_str().unwrap()]);
    assert!(out.status.success());
    let s: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(s["strategy"], "commutative");
    assert!(s.get("oracle_deviation").is_none());
    for (t, q, _, _) in rows(&String::from_utf8(out.stdout).unwrap()) {
        let g = t.sin().exp();
        let want = [0.5 * g, -g, 2.0 * g, 0.25 * g];
        for i in 0..4 {
            assert!((q[i] - want[i]).abs() < 1e-12, "t = {t}");
        }
    }
}

#[test]
fn fixed_axis_endpoint() {
    let out = solve(&[problem("fixed_axis.txt").to_str().unwrap()]);
    assert!(out.status.success());
    let s: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(s["strategy"], "commutative");
    let rows = rows(&String::from_utf8(out.stdout).unwrap());
    let (t, q, _, _) = *rows.last().unwrap();
    assert_eq!(t, 1.0);
    let r = 14f64.sqrt();
    let (sn, cs) = (r / 2.0).sin_cos();
    let g = (1.0f64 / 3.0).exp();
    let want = [-sn / r, cs, 3.0 * sn / r, -2.0 * sn / r].map(|v| g * v);
    for i in 0..4 {
        assert!((q[i] - want[i]).abs() <= 1e-9, "component {i}");
    }
}

#[test]
fn csv_is_deterministic_and_norm_column_consistent() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = solve(&[
            problem("generic.txt").to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert_eq!(summary(&out)["strategy"], "picard");
    }
    let (a, b) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(a, b);
    let rows = rows(&String::from_utf8(a).unwrap());
    let last = rows.len() - 1;
    for (k, (_, q, norm, residual)) in rows.iter().enumerate() {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((n - norm).abs() <= 1e-12);
        assert_eq!(residual.is_none(), k == 0 || k == last);
    }
}

#[test]
fn flags_override_the_file() {
    let dir = TempDir::new().unwrap();
    let file = write_problem(&dir, "a1 = 1\nt_end = 1\nmethod = special\nstep = 0.5\n");
    let out = solve(&[
        file.to_str().unwrap(),
        "--method",
        "oracle",
        "--step",
        "0.1",
    ]);
    assert!(out.status.success());
    let s: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(s["strategy"], "oracle");
    assert_eq!(rows(&String::from_utf8(out.stdout).unwrap()).len(), 11);
}

#[test]
fn output_key_in_file() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("traj.csv");
    let file = write_problem(
        &dir,
        &format!("a3 = 1\nt_end = 0.5\noutput = {}\n", csv.display()),
    );
    let out = solve(&[file.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(summary(&out)["strategy"], "commutative");
    assert_eq!(rows(&fs::read_to_string(&csv).unwrap()).len(), 501);
}

#[test]
fn forced_problem() {
    let out = solve(&[problem("forced.txt").to_str().unwrap(), "--verify"]);
    assert!(out.status.success());
    let rows = rows(&String::from_utf8(out.stdout).unwrap());
    let (t, q, _, _) = *rows.last().unwrap();
    assert!((q[1] - (t.exp() - 1.0)).abs() < 1e-9);
}

#[test]
fn check_reports_structure() {
    let cases = [
        ("rotating_frame.txt", "special-case-I"),
        ("chirp_k.txt", "special-case-II"),
        ("chirp_j.txt", "special-case-III"),
        ("fixed_axis.txt", "commutative"),
        ("generic.txt", "picard"),
    ];
    for (name, strategy) in cases {
        let out = bin().arg("check").arg(problem(name)).output().unwrap();
        assert!(out.status.success());
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["strategy"], strategy, "{name}");
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();

    let missing = solve(&[dir.path().join("nope.txt").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));

    let bad = write_problem(&dir, "t_end = 1\na1 = sin(t\n");
    let out = solve(&[bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let unknown = write_problem(&dir, "t_end = 1\nb1 = 2\n");
    assert_eq!(solve(&[unknown.to_str().unwrap()]).status.code(), Some(1));

    // Not commutative, so the forced commutative method fails in the solver.
    let generic = problem("generic.txt");
    let out = solve(&[generic.to_str().unwrap(), "--method", "commutative"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver failed"));

    // ln(t) at t = 0 is a domain error during the solve.
    let domain = write_problem(&dir, "a1 = ln(t)\nt_end = 1\nmethod = oracle\n");
    assert_eq!(solve(&[domain.to_str().unwrap()]).status.code(), Some(2));

    let out = bin()
        .args(["decompose", "1", "1", "0", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
