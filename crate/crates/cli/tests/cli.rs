use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn jones(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jones")).args(args).output().unwrap()
}

fn write_points(dir: &Path, name: &str, pts: &[[f64; 3]]) -> PathBuf {
    let path = dir.join(name);
    let text: String = pts.iter().map(|p| format!("{:.16e} {:.16e} {:.16e}\n", p[0], p[1], p[2])).collect();
    std::fs::write(&path, text).unwrap();
    path
}

fn trefoil(n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            [t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()]
        })
        .collect()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn straight_line_gives_one() {
    let dir = tempfile::tempdir().unwrap();
    let line: Vec<[f64; 3]> = (0..5).map(|i| [i as f64, 0.3 * i as f64, 0.1 * i as f64]).collect();
    let path = write_points(dir.path(), "line.xyz", &line);
    let out = jones(&["compute", "--input", path.to_str().unwrap(), "--format", "xyz"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("V(t) = 1\n"), "{text}");
    assert!(text.contains("crossings: 0"));
    assert!(text.contains("elapsed: "));
}

#[test]
fn engines_print_identical_polynomials() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_points(dir.path(), "trefoil.xyz", &trefoil(48));
    let p = path.to_str().unwrap();
    let first_line = |engine: &str| {
        let out = jones(&["compute", "--input", p, "--format", "xyz", "--closed", "--engine", engine]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        stdout(&out).lines().next().unwrap().to_string()
    };
    let oracle = first_line("oracle");
    assert_eq!(first_line("split-rm"), oracle);
    assert_eq!(first_line("split"), oracle);
    assert!(oracle == "V(t) = -t^-4 + t^-3 + t^-1" || oracle == "V(t) = t + t^3 - t^4", "{oracle}");
}

#[test]
fn json_and_variable_options() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_points(dir.path(), "trefoil.xyz", &trefoil(48));
    let p = path.to_str().unwrap();
    let out = jones(&["compute", "--input", p, "--format", "xyz", "--closed", "--json", "--var", "A", "--direction", "0.1,-0.2,1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["polynomial", "poly_t", "poly_a", "n_requested", "n_accepted", "elapsed_s", "rejected_reasons", "projections"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["variable"], "A");
    assert_eq!(v["n_accepted"], 1);
    let out = jones(&["compute", "--input", p, "--format", "xyz", "--projections", "6", "--seed", "3", "--rm-sequence", "RM1,RM3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("projections: "));
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.xyz");
    std::fs::write(&bad, "0 0 0\n1 2\n3 3 3\n").unwrap();
    let out = jones(&["compute", "--input", bad.to_str().unwrap(), "--format", "xyz"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = jones(&["compute", "--input", dir.path().join("none.pdb").to_str().unwrap(), "--format", "pdb"]);
    assert!(!out.status.success());

    let good = write_points(dir.path(), "t.xyz", &trefoil(30));
    let out = jones(&["compute", "--input", good.to_str().unwrap(), "--format", "xyz", "--direction", "0,0,1", "--seed", "2"]);
    assert!(!out.status.success());
    let out = jones(&["compute", "--input", good.to_str().unwrap(), "--format", "xyz", "--rm-sequence", "RM9"]);
    assert!(!out.status.success());
}

#[test]
fn bench_writes_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_points(dir.path(), "a.xyz", &trefoil(40));
    let csv = dir.path().join("bench.csv");
    let input = format!("{},{}", a.display(), a.display());
    let out = jones(&[
        "bench", "--input", &input, "--atoms", "20,30", "--engines", "oracle,split", "--reps", "2", "--csv", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = stdout(&out);
    assert!(table.lines().next().unwrap().starts_with("structure"));
    assert!(table.contains("a:20") && table.contains("a:30"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "structure,engine,crossings,reps,min_s,median_s");
    assert_eq!(lines.count(), 8);
}
