use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn simmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simmap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let p = path(dir, name);
    fs::write(&p, contents).unwrap();
    p
}

fn fixture(dir: &TempDir, kind: &str, extra: &[&str]) -> PathBuf {
    let out = path(dir, &format!("{kind}.obj"));
    let mut args = vec!["fixture", kind, "--out", s(&out)];
    args.extend_from_slice(extra);
    assert_eq!(code(&simmap(&args)), 0);
    out
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

struct Solved {
    out: PathBuf,
    report: PathBuf,
    exit: i32,
    stderr: String,
}

fn solve(dir: &TempDir, mesh: &Path, signature: Option<&Path>, tag: &str) -> Solved {
    let out = path(dir, &format!("{tag}/out.obj"));
    let rep = path(dir, &format!("{tag}/report.json"));
    let mut args = vec!["solve", "--mesh", s(mesh), "--out", s(&out), "--report", s(&rep)];
    if let Some(sig) = signature {
        args.extend_from_slice(&["--signature", s(sig)]);
    }
    let o = simmap(&args);
    Solved {
        out,
        report: rep,
        exit: code(&o),
        stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
    }
}

/// Rewrites every `vt` line through `f`.
fn map_uvs(text: &str, mut f: impl FnMut(f64, f64) -> (f64, f64)) -> String {
    text.lines()
        .map(|line| match line.strip_prefix("vt ") {
            Some(rest) => {
                let v: Vec<f64> = rest.split_whitespace().map(|x| x.parse().unwrap()).collect();
                let (u, w) = f(v[0], v[1]);
                format!("vt {u:.17e} {w:.17e}")
            }
            None => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn tetrahedron_fixed_point() {
    let dir = TempDir::new().unwrap();
    let mesh = fixture(&dir, "tetrahedron", &[]);
    let sig = write(&dir, "k2.json", r#"{"default_k": 2}"#);
    let r = solve(&dir, &mesh, Some(&sig), "run");
    assert_eq!(r.exit, 0, "{}", r.stderr);
    let rep = report(&r.report);
    assert_eq!(rep["status"], "converged");
    assert_eq!(rep["iterations"], 0);
    assert!(path(&dir, "run/trace.csv").exists());
    assert!(r.out.exists());
}

#[test]
fn gauss_bonnet_violation_exits_one() {
    let dir = TempDir::new().unwrap();
    let mesh = fixture(&dir, "tetrahedron", &[]);
    let sig = write(
        &dir,
        "bad.json",
        r#"{"cones": [{"vertex": 0, "k": 2}, {"vertex": 1, "k": 2}, {"vertex": 2, "k": 2}, {"vertex": 3, "k": 3}]}"#,
    );
    let r = solve(&dir, &mesh, Some(&sig), "run");
    assert_eq!(r.exit, 1);
    assert!(r.stderr.contains("Gauss-Bonnet"), "{}", r.stderr);
    assert_eq!(report(&r.report)["status"], "infeasible-signature");

    let zero = write(
        &dir,
        "zero.json",
        r#"{"cones": [{"vertex": 0, "k": 0}, {"vertex": 1, "k": 2}, {"vertex": 2, "k": 2}, {"vertex": 3, "k": 4}]}"#,
    );
    assert_eq!(solve(&dir, &mesh, Some(&zero), "zero").exit, 1);
}

#[test]
fn torus_round_trip_through_verify() {
    let dir = TempDir::new().unwrap();
    let mesh = fixture(&dir, "torus", &["--size", "6"]);
    let r = solve(&dir, &mesh, None, "run");
    assert_eq!(r.exit, 0, "{}", r.stderr);
    let rep = report(&r.report);
    let loops = rep["basis"]["loops"].as_array().unwrap();
    assert_eq!(loops.len(), 2);
    assert!(loops.iter().all(|l| !l["faces"].as_array().unwrap().is_empty()));
    assert_eq!(rep["seamless"]["passes"], true);

    let verified = path(&dir, "verify.json");
    let v = simmap(&["verify", "--mesh", s(&r.out), "--report", s(&verified)]);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));
    assert_eq!(report(&verified)["passes"], true);

    let text = fs::read_to_string(&r.out).unwrap();
    let (c, sn) = (0.3f64.cos(), 0.3f64.sin());
    let moved = write(&dir, "moved.obj", &map_uvs(&text, |u, v| (2.0 * (c * u - sn * v) + 5.0, 2.0 * (sn * u + c * v) - 1.0)));
    assert_eq!(code(&simmap(&["verify", "--mesh", s(&moved)])), 0);

    let mut k = 0u64;
    let perturbed = write(
        &dir,
        "perturbed.obj",
        &map_uvs(&text, |u, v| {
            k += 1;
            let d = 1e-3 * ((k * 7919 % 13) as f64 / 6.0 - 1.0);
            (u + d, v - d)
        }),
    );
    assert_eq!(code(&simmap(&["verify", "--mesh", s(&perturbed)])), 2);
}

#[test]
fn sphere_with_cube_cones() {
    let dir = TempDir::new().unwrap();
    let mesh = fixture(&dir, "icosphere", &["--size", "2"]);
    // The first eight icosphere vertices with k = 3 satisfy Gauss–Bonnet.
    let cones: Vec<String> = (0..8).map(|v| format!(r#"{{"vertex": {v}, "k": 3}}"#)).collect();
    let sig = write(&dir, "cones.json", &format!(r#"{{"cones": [{}]}}"#, cones.join(", ")));
    let r = solve(&dir, &mesh, Some(&sig), "run");
    assert_eq!(r.exit, 0, "{}", r.stderr);
    assert_eq!(code(&simmap(&["verify", "--mesh", s(&r.out), "--signature", s(&sig)])), 0);
    let other = write(&dir, "flat.json", r#"{"cones": [{"vertex": 0, "k": 0}]}"#);
    assert_eq!(code(&simmap(&["verify", "--mesh", s(&r.out), "--signature", s(&other)])), 1);
}

#[test]
fn solve_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let mesh = fixture(&dir, "torus", &["--size", "5", "--jitter", "0.05", "--seed", "3"]);
    let a = solve(&dir, &mesh, None, "a");
    let b = solve(&dir, &mesh, None, "b");
    assert_eq!(a.exit, 0, "{}", a.stderr);
    assert_eq!(fs::read(&a.out).unwrap(), fs::read(&b.out).unwrap());
    let strip = |p: &Path| {
        let mut v = report(p);
        v["timing"] = serde_json::Value::Null;
        v.to_string()
    };
    assert_eq!(strip(&a.report), strip(&b.report));
    assert_eq!(
        fs::read(path(&dir, "a/trace.csv")).unwrap(),
        fs::read(path(&dir, "b/trace.csv")).unwrap()
    );
}

#[test]
fn basis_output() {
    let dir = TempDir::new().unwrap();
    let tet = fixture(&dir, "tetrahedron", &[]);
    let out = simmap(&["basis", "--mesh", s(&tet)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("genus 0\nexcluded_vertex 3\nloops 0\n"), "{text}");

    let torus = fixture(&dir, "torus", &["--size", "4"]);
    let first = simmap(&["basis", "--mesh", s(&torus)]);
    let second = simmap(&["basis", "--mesh", s(&torus)]);
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("loop ")).count(), 2);
    assert!(text.starts_with("genus 1\n"));
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = path(&dir, "missing.obj");
    let r = solve(&dir, &missing, None, "run");
    assert_eq!(r.exit, 3);
    assert!(r.stderr.contains("missing.obj"));

    let quad = write(&dir, "quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    assert_eq!(solve(&dir, &quad, None, "quad").exit, 1);

    let tet = fixture(&dir, "tetrahedron", &[]);
    let v = simmap(&["verify", "--mesh", s(&tet)]);
    assert_eq!(code(&v), 1);
    assert!(String::from_utf8_lossy(&v.stderr).contains("texture"));

    let sig = write(&dir, "k2.json", r#"{"default_k": 2}"#);
    let tight = path(&dir, "tight/report.json");
    let o = simmap(&[
        "solve", "--mesh", s(&tet), "--signature", s(&sig), "--report", s(&tight), "--out",
        s(&path(&dir, "tight/out.obj")), "--max-iters", "0", "--tol", "1e-300",
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(report(&tight)["status"], "max-iterations");
}
