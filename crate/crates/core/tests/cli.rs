use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cnn_core::engine::{parse_trace, serialize_trace};
use cnn_core::generators::parse_pair;
use cnn_core::monitor::VerificationReport;
use cnn_core::Scalar;
use tempfile::TempDir;

fn cnn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnn"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_is_deterministic_and_validated() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    for name in ["a.json", "b.json"] {
        let o = cnn(
            d,
            &["generate", "--kind", "random", "--seed", "7", "--out", name],
        );
        assert!(o.status.success());
    }
    assert_eq!(
        fs::read(d.join("a.json")).unwrap(),
        fs::read(d.join("b.json")).unwrap()
    );

    let o = cnn(
        d,
        &[
            "generate", "--kind", "tight1", "--cycles", "3", "--out", "t.json",
        ],
    );
    assert!(o.status.success());
    let pair = parse_pair(&fs::read_to_string(d.join("t.json")).unwrap()).unwrap();
    assert_eq!(
        pair.meta.expected_ratio,
        Some(Scalar::from_parts(3, 1, 2, 1))
    );

    let o = cnn(
        d,
        &[
            "generate", "--kind", "tight1", "--cycles", "0", "--out", "z.json",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(!d.join("z.json").exists());
    assert_eq!(cnn(d, &["generate"]).status.code(), Some(2));
}

#[test]
fn run_prints_exact_and_float_cost() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert!(cnn(d, &["generate", "--kind", "tight2", "--out", "p.json"])
        .status
        .success());
    let o = cnn(d, &["run", "--instance", "p.json", "--trace", "t.json"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("3 + 2·√3"), "{out}");
    assert!(out.contains("6.4641016"), "{out}");
    let text = fs::read_to_string(d.join("t.json")).unwrap();
    assert_eq!(serialize_trace(&parse_trace(&text).unwrap()), text);

    fs::write(d.join("empty.json"), r#"{"start": [0, 0], "segments": []}"#).unwrap();
    let o = cnn(d, &["run", "--instance", "empty.json", "--trace", "e.json"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ell_on = 0 "));
}

#[test]
fn run_requires_epsilon_for_diagonals() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("diag.json"),
        r#"{"start": [0, 0], "segments": [{"dir": [2, 1], "len": 1}, {"dir": [0, -1], "len": 1}]}"#,
    )
    .unwrap();
    let o = cnn(d, &["run", "--instance", "diag.json", "--trace", "t.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!d.join("t.json").exists());
    let o = cnn(
        d,
        &[
            "run",
            "--instance",
            "diag.json",
            "--trace",
            "t.json",
            "--rectify-epsilon",
            "1/8",
        ],
    );
    assert!(o.status.success());

    let o = cnn(
        d,
        &[
            "rectify",
            "--instance",
            "diag.json",
            "--epsilon",
            "0.25",
            "--out",
            "r.json",
        ],
    );
    assert!(o.status.success());
    let o = cnn(d, &["run", "--instance", "r.json", "--trace", "t2.json"]);
    assert!(o.status.success());
    let o = cnn(
        d,
        &[
            "run",
            "--instance",
            "diag.json",
            "--trace",
            "t3.json",
            "--rectify-epsilon",
            "x",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert!(cnn(
        d,
        &["generate", "--kind", "tight1", "--cycles", "2", "--out", "p.json"]
    )
    .status
    .success());
    assert!(
        cnn(d, &["run", "--instance", "p.json", "--trace", "t.json"])
            .status
            .success()
    );
    let o = cnn(
        d,
        &[
            "verify", "--trace", "t.json", "--opt", "p.json", "--report", "r.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let report: VerificationReport =
        serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert!(report.ok && report.first_decrease.is_none());

    // Fault injection: the last event is overcharged.
    let mut trace = parse_trace(&fs::read_to_string(d.join("t.json")).unwrap()).unwrap();
    let n = trace.events.len();
    let last = trace.events[n - 1].clone();
    let s_bad = last.s.clone();
    for e in trace.events.iter_mut().skip(n - 1) {
        e.cost_on = &e.cost_on + &Scalar::from_int(10);
    }
    trace.final_cost = &trace.final_cost + &Scalar::from_int(10);
    fs::write(d.join("bad.json"), serialize_trace(&trace)).unwrap();
    let o = cnn(
        d,
        &[
            "verify", "--trace", "bad.json", "--opt", "p.json", "--report", "rb.json",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    let report: VerificationReport =
        serde_json::from_str(&fs::read_to_string(d.join("rb.json")).unwrap()).unwrap();
    assert_eq!(report.first_decrease.unwrap().s, s_bad);

    fs::write(
        d.join("far.json"),
        cnn_core::instance::serialize_trajectory(&cnn_core::AlignedTrajectory::stationary(
            cnn_core::Point::int(50, 50),
            &trace.total_s(),
        )),
    )
    .unwrap();
    let o = cnn(d, &["verify", "--trace", "t.json", "--opt", "far.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not aligned"));
}

#[test]
fn verify_random_batch() {
    let tmp = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cnn"))
        .current_dir(tmp.path())
        .env("CNN_BENCH_THREADS", "2")
        .args(["verify", "--random-batch", "200", "--seed", "11"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("200 random pairs verified"));
}

#[test]
fn ratio_reports_guarantee() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert!(cnn(
        d,
        &["generate", "--kind", "tight2", "--cycles", "2", "--out", "p.json"]
    )
    .status
    .success());
    assert!(
        cnn(d, &["run", "--instance", "p.json", "--trace", "t.json"])
            .status
            .success()
    );
    let o = cnn(d, &["ratio", "--trace", "t.json", "--opt", "p.json"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ratio = 3 + 2·√3"));
}

#[test]
fn unit_commands() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let o = cnn(
        d,
        &[
            "unit",
            "--algo",
            "adversary",
            "--rounds",
            "30",
            "--out",
            "tr.json",
        ],
    );
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("online = 30"), "{out}");
    let opt: u64 = out
        .lines()
        .find_map(|l| l.strip_prefix("opt = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(opt <= 10);
    let tr: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("tr.json")).unwrap()).unwrap();
    assert_eq!(tr["requests"].as_array().unwrap().len(), 30);

    fs::write(d.join("empty.json"), "[]").unwrap();
    let o = cnn(d, &["unit", "--algo", "opt", "--requests", "empty.json"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("opt = 0"));

    fs::write(
        d.join("twelve.json"),
        "[[1,2],[3,0],[0,0],[2,2],[2,1],[0,3],[1,1],[3,3],[0,2],[1,0],[2,3],[3,1]]",
    )
    .unwrap();
    let cost = |algo: &str, key: &str| -> u64 {
        let o = cnn(d, &["unit", "--algo", algo, "--requests", "twelve.json"]);
        assert!(o.status.success());
        stdout(&o)
            .lines()
            .find_map(|l| l.strip_prefix(key).map(|v| v.parse().unwrap()))
            .unwrap()
    };
    assert!(cost("sweet4", "cost = ") <= 4 * cost("opt", "opt = ") + 4);

    fs::write(d.join("diag.json"), "[[0,0],[1,1]]").unwrap();
    let o = cnn(d, &["unit", "--algo", "ortho3", "--requests", "diag.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cnn(
        d,
        &["unit", "--algo", "sweet4", "--requests", "missing.json"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn render_structure() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert!(cnn(
        d,
        &["generate", "--kind", "tight1", "--cycles", "2", "--out", "p.json"]
    )
    .status
    .success());
    assert!(
        cnn(d, &["run", "--instance", "p.json", "--trace", "t.json"])
            .status
            .success()
    );
    assert!(cnn(d, &["render", "--trace", "t.json", "--out", "a.svg"])
        .status
        .success());
    assert!(cnn(d, &["render", "--trace", "t.json", "--out", "b.svg"])
        .status
        .success());
    let a = fs::read_to_string(d.join("a.svg")).unwrap();
    assert_eq!(a, fs::read_to_string(d.join("b.svg")).unwrap());
    assert_eq!(a.matches("<polyline").count(), 2);
    assert!(a.contains("class=\"cycle-start\""));
    assert!(a.contains("class=\"offset\""));
    assert!(cnn(
        d,
        &["render", "--trace", "t.json", "--opt", "p.json", "--out", "c.svg"]
    )
    .status
    .success());
    let c = fs::read_to_string(d.join("c.svg")).unwrap();
    assert_eq!(c.matches("<polyline").count(), 3);

    assert!(cnn(d, &["generate", "--kind", "fig2", "--out", "f.json"])
        .status
        .success());
    assert!(
        cnn(d, &["run", "--instance", "f.json", "--trace", "ft.json"])
            .status
            .success()
    );
    assert!(cnn(d, &["verify", "--trace", "ft.json", "--opt", "f.json"])
        .status
        .success());
    assert!(cnn(
        d,
        &["render", "--trace", "ft.json", "--opt", "f.json", "--out", "f.svg"]
    )
    .status
    .success());
    let o = cnn(d, &["render", "--trace", "nope.json", "--out", "x.svg"]);
    assert_eq!(o.status.code(), Some(2));
}
