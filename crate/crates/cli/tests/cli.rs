use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sixdpose(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sixdpose")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Seeded pseudo-random Euler rows without pulling in an RNG crate.
fn euler_rows(n: usize, mut state: u64) -> String {
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut out = String::from("id,yaw,pitch,roll\n");
    for i in 0..n {
        let (y, pi, r) = (next() * 358.0 - 179.0, next() * 170.0 - 85.0, next() * 358.0 - 179.0);
        out += &format!("s{i},{y},{pi},{r}\n");
    }
    out
}

#[test]
fn eval_of_identical_files_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.csv");
    fs::write(&g, euler_rows(50, 1)).unwrap();
    let out = sixdpose(&["eval", "--gt", p(&g), "--pred", p(&g)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("     Yaw   Pitch    Roll     MAE    Left    Down   Front    MAEV"));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(row, vec!["0.00"; 8]);

    let out = sixdpose(&["eval", "--gt", p(&g), "--pred", p(&g), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mae"]["overall"], 0.0);
    assert_eq!(v["n"], 50);
}

#[test]
fn convert_round_trip_preserves_angles() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("e.csv");
    let m = dir.path().join("m.csv");
    let back = dir.path().join("back.csv");
    fs::write(&e, euler_rows(200, 2)).unwrap();
    assert!(sixdpose(&["convert", "--input", p(&e), "--output", p(&m), "--to", "matrix"]).status.success());
    assert!(sixdpose(&["convert", "--input", p(&m), "--output", p(&back), "--to", "euler"]).status.success());

    let parse = |path: &Path| -> BTreeMap<String, Vec<f64>> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let (id, rest) = l.split_once(',').unwrap();
                (id.to_string(), rest.split(',').map(|v| v.parse().unwrap()).collect())
            })
            .collect()
    };
    let (a, b) = (parse(&e), parse(&back));
    assert_eq!(a.len(), 200);
    assert!(a.keys().eq(b.keys()));
    for (x, y) in a.values().zip(b.values()) {
        for (u, v) in x.iter().zip(y) {
            assert!((u - v).abs() <= 1e-6, "{x:?} vs {y:?}");
        }
    }
}

#[test]
fn convert_cycle_through_every_representation() {
    let dir = tempfile::tempdir().unwrap();
    let start = dir.path().join("start.csv");
    fs::write(&start, euler_rows(100, 3)).unwrap();
    let mut current = start.clone();
    for tag in ["quat", "sixd", "matrix", "euler"] {
        let next = dir.path().join(format!("{tag}.csv"));
        let out = sixdpose(&["convert", "--input", p(&current), "--output", p(&next), "--to", tag]);
        assert!(out.status.success(), "{}", stderr(&out));
        current = next;
    }
    let out = sixdpose(&["eval", "--gt", p(&start), "--pred", p(&current), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["maev"]["overall"].as_f64().unwrap() < 1e-6);
}

#[test]
fn demo_ambiguity_prints_the_distance() {
    let out = sixdpose(&["demo-ambiguity"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("geodesic distance:")).unwrap();
    let d: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!(d <= 0.20);
    assert!(!text.contains("FAILED"));
}

#[test]
fn usage_errors_exit_with_one() {
    let out = sixdpose(&["eval", "--gt", "a.csv", "--pred", "b.csv", "--wrap", "sideways"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--wrap"));
    assert!(stderr(&out).contains("Usage: sixdpose eval"));

    let out = sixdpose(&["convert", "--input", "a.csv", "--output", "b.csv", "--to", "rodrigues"]);
    assert_eq!(out.status.code(), Some(1));

    let out = sixdpose(&["eval", "--gt", "a.csv", "--pred", "b.csv", "--bin-width", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--bin-width"));

    assert_eq!(sixdpose(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(sixdpose(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.csv");
    let other = dir.path().join("o.csv");
    fs::write(&g, "id,yaw,pitch,roll\na,1,2,3\n").unwrap();
    fs::write(&other, "id,yaw,pitch,roll\nb,1,2,3\n").unwrap();

    let out = sixdpose(&["eval", "--gt", p(&g), "--pred", p(&other)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("id sets differ"));

    let out = sixdpose(&["eval", "--gt", p(&g), "--pred", p(&other), "--intersect"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("missing.csv");
    assert_eq!(sixdpose(&["eval", "--gt", p(&missing), "--pred", p(&g)]).status.code(), Some(2));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "id,yaw,pitch,roll\na,1,2\n").unwrap();
    let out = sixdpose(&["convert", "--input", p(&bad), "--output", p(&other), "--to", "quat"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"));
}

#[test]
fn label_writes_matrix_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("lm.json");
    let output = dir.path().join("labels.csv");
    fs::write(
        &input,
        r#"{"template": [[1,0,0],[0,1,0],[0,0,1],[1,1,1]],
            "cameras": {"c0": {"R": [[1,0,0],[0,1,0],[0,0,1]], "t": [0,0,0]}},
            "frames": [{"subject": "s", "frame": "1", "camera": "c0",
                        "points": [[1,0,0],[0,1,0],[0,0,1],[1,1,1]]}]}"#,
    )
    .unwrap();
    let out = sixdpose(&["label", "--input", p(&input), "--output", p(&output)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&output).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,r11,r12,r13,r21,r22,r23,r31,r32,r33"));
    assert!(lines.next().unwrap().starts_with("s_1_c0,"));

    fs::write(&input, r#"{"template": [], "cameras": {}, "frames": [}"#).unwrap();
    assert_eq!(sixdpose(&["label", "--input", p(&input), "--output", p(&output)]).status.code(), Some(2));
}

#[test]
fn bench_writes_history_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("bench");
    let out = sixdpose(&[
        "bench", "--out-dir", p(&out_dir), "--samples", "100", "--epochs", "3", "--seeds", "2",
        "--heads", "sixd,euler", "--losses", "geodesic,mse", "--hidden", "16",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let history = fs::read_to_string(out_dir.join("history.csv")).unwrap();
    assert_eq!(history.lines().next(), Some("head,loss,seed,epoch,train_loss,heldout_error_deg"));
    assert_eq!(history.lines().count(), 1 + 2 * 2 * 2 * 3);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["runs"].as_array().unwrap().len(), 8);
    assert_eq!(summary["hidden"], serde_json::json!([16]));

    let out = sixdpose(&["bench", "--out-dir", p(&out_dir), "--epochs", "0"]);
    assert_eq!(out.status.code(), Some(1));
}
