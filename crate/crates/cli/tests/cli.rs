use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qutrit_he::formats::{parse_state, write_state};
use qutrit_he::sampling::{random_state, seeded};
use qutrit_he::{QState, C64};
use tempfile::TempDir;

fn tqhe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tqhe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work {
            dir: TempDir::new().unwrap(),
        }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_state(p: &Path) -> QState {
    parse_state(&fs::read_to_string(p).unwrap()).unwrap().state
}

fn run_ok(args: &[&str]) -> Output {
    let o = tqhe(args);
    assert_eq!(
        code(&o),
        0,
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

#[test]
fn keygen_is_deterministic() {
    let w = Work::new();
    let (a, b) = (w.path("a.key"), w.path("b.key"));
    run_ok(&["keygen", "--n", "1", "--seed", "7", "--out", s(&a)]);
    run_ok(&["keygen", "--n", "1", "--seed", "7", "--out", s(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let o = run_ok(&["keygen", "--n", "2", "--seed", "3"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    for line in text.lines() {
        let digits: Vec<u8> = line
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(digits.len(), 3);
        assert!(digits.iter().all(|&d| d <= 2));
    }
}

#[test]
fn keygen_rejects_zero_qutrits() {
    assert_eq!(code(&tqhe(&["keygen", "--n", "0"])), 2);
}

#[test]
fn encrypt_basis_zero_with_worked_key() {
    let w = Work::new();
    let key = w.file("k", "2 0 1\n");
    let state = w.file("s", "qutrits: 1\n1 0\n0 0\n0 0\n");
    let out = w.path("c");
    run_ok(&[
        "encrypt",
        "--key",
        s(&key),
        "--state",
        s(&state),
        "--out",
        s(&out),
    ]);
    let c = read_state(&out);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let expected = [C64::new(r, 0.0), C64::new(0.0, 0.0), C64::new(r, 0.0)];
    for (x, y) in c.amplitudes().iter().zip(expected) {
        assert!((x - y).norm() < 1e-15);
    }
}

#[test]
fn encrypt_decrypt_round_trip() {
    let w = Work::new();
    let plain = random_state(2, &mut seeded(77));
    let state = w.file("p", &write_state(&plain));
    let key = w.path("k");
    run_ok(&["keygen", "--n", "2", "--seed", "5", "--out", s(&key)]);
    let (c, d) = (w.path("c"), w.path("d"));
    run_ok(&[
        "encrypt",
        "--key",
        s(&key),
        "--state",
        s(&state),
        "--out",
        s(&c),
    ]);
    run_ok(&[
        "decrypt",
        "--key",
        s(&key),
        "--state",
        s(&c),
        "--out",
        s(&d),
    ]);
    assert!(read_state(&d).max_abs_diff(&plain) < 1e-8);
}

#[test]
fn width_mismatch_exits_three() {
    let w = Work::new();
    let key = w.file("k", "0 0 0\n1 1 1\n");
    let state = w.file("s", "qutrits: 1\n1 0\n0 0\n0 0\n");
    let o = tqhe(&["encrypt", "--key", s(&key), "--state", s(&state)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn malformed_inputs_exit_two() {
    let w = Work::new();
    let key = w.file("k", "0 0 9\n");
    let state = w.file("s", "qutrits: 1\n1 0\n0 0\n0 0\n");
    assert_eq!(
        code(&tqhe(&["encrypt", "--key", s(&key), "--state", s(&state)])),
        2
    );
    let key = w.file("k2", "0 0 1\n");
    let job = w.file("j", "scheme1 y\n");
    assert_eq!(
        code(&tqhe(&[
            "evaluate",
            "--key",
            s(&key),
            "--job",
            s(&job),
            "--state",
            s(&state)
        ])),
        2
    );
    assert_eq!(
        code(&tqhe(&[
            "encrypt",
            "--key",
            s(&w.path("missing")),
            "--state",
            s(&state)
        ])),
        2
    );
}

fn evaluate_pipeline(w: &Work, key: &str, job: &str, plain: &str) -> QState {
    let key = w.file("key", key);
    let job = w.file("job", job);
    let plain = w.file("plain", plain);
    let (c, e, d) = (w.path("c"), w.path("e"), w.path("d"));
    run_ok(&[
        "encrypt",
        "--key",
        s(&key),
        "--state",
        s(&plain),
        "--out",
        s(&c),
    ]);
    run_ok(&[
        "evaluate",
        "--key",
        s(&key),
        "--job",
        s(&job),
        "--state",
        s(&c),
        "--out",
        s(&e),
    ]);
    run_ok(&[
        "decrypt",
        "--key",
        s(&key),
        "--state",
        s(&e),
        "--out",
        s(&d),
    ]);
    read_state(&d)
}

#[test]
fn evaluate_rotation_example() {
    let w = Work::new();
    let out = evaluate_pipeline(
        &w,
        "2 0 1\n",
        "scheme1 y 02 pi\n",
        "qutrits: 1\n1 0\n0 0\n0 0\n",
    );
    assert!(out.max_abs_diff(&QState::basis(&[2]).unwrap()) < 1e-12);
}

#[test]
fn evaluate_gcx_example() {
    let w = Work::new();
    let mut plain = String::from("qutrits: 2\n");
    for k in 0..9 {
        plain.push_str(if k == 2 { "1 0\n" } else { "0 0\n" });
    }
    for job in ["scheme3 0 02 0\n", "scheme3 0 02 full\n"] {
        let out = evaluate_pipeline(&w, "1 0 0\n2 2 1\n", job, &plain);
        assert!(out.max_abs_diff(&QState::basis(&[0, 0]).unwrap()) < 1e-10);
    }
}

#[test]
fn evaluate_circuit_job_with_relative_path() {
    let w = Work::new();
    w.file("tsum.circ", "qutrits: 2\nTSUM 0 1\n");
    let mut plain = String::from("qutrits: 2\n");
    for k in 0..9 {
        plain.push_str(if k == 4 { "1 0\n" } else { "0 0\n" });
    }
    let out = evaluate_pipeline(&w, "1 2 0\n0 1 2\n", "scheme4 tsum.circ\n", &plain);
    assert!(out.max_abs_diff(&QState::basis(&[1, 2]).unwrap()) < 1e-10);
}

#[test]
fn identity_job_leaves_ciphertext_unchanged() {
    let w = Work::new();
    let key = w.file("k", "1 2 0\n");
    let job = w.file("j", "scheme2 1 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 1 0\n");
    let c = random_state(1, &mut seeded(2));
    let cfile = w.file("c", &write_state(&c));
    let out = w.path("e");
    run_ok(&[
        "evaluate",
        "--key",
        s(&key),
        "--job",
        s(&job),
        "--state",
        s(&cfile),
        "--out",
        s(&out),
    ]);
    assert!(read_state(&out).max_abs_diff(&c) < 1e-10);
}

#[test]
fn demos() {
    let o = run_ok(&["demo", "sec31"]);
    let text = stdout(&o);
    assert!(text.trim_end().ends_with("PASS"));
    assert!(text.contains("[ 0.500000, -0.707107, -0.500000]"));
    let o = run_ok(&["demo", "sec32"]);
    assert!(stdout(&o).trim_end().ends_with("PASS"));
    assert_eq!(code(&tqhe(&["demo", "sec99"])), 2);
}

#[test]
fn synth_outputs_circuit_lines() {
    let o = run_ok(&["synth", "TSUM"]);
    let text = stdout(&o);
    let gates: Vec<&str> = text.lines().filter(|l| l.starts_with("GCX")).collect();
    assert_eq!(gates.len(), 4);
    let c = qutrit_he::circuit::parse_circuit(&text).unwrap();
    assert_eq!(
        qutrit_he::circuit::circuit_unitary(&c).unwrap(),
        qutrit_he::gates::feynman()
    );
    assert_eq!(code(&tqhe(&["synth", "NOPE"])), 2);
}

#[test]
fn synth_from_target_file() {
    let w = Work::new();
    // |a,b⟩ ↦ |a, b+1⟩ when a = 2
    let t = w.file("t", "0 1 2\n3 4 5\n7 8 6\n");
    let o = run_ok(&["synth", "--target-file", s(&t)]);
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("GCX")).count(),
        2
    );
}

#[test]
fn decompose_identity() {
    let w = Work::new();
    let m = w.file("m", "1 0 0 0 0 0\n0 0 1 0 0 0\n0 0 0 0 1 0\n");
    let o = run_ok(&["decompose", s(&m)]);
    let text = stdout(&o);
    let residual: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("residual "))
        .and_then(|r| r.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-8);
    let bad = w.file("b", "1 0 1 0 0 0\n0 0 1 0 0 0\n0 0 0 0 1 0\n");
    assert_eq!(code(&tqhe(&["decompose", s(&bad)])), 3);
}

#[test]
fn security_report_table() {
    let o = run_ok(&[
        "security-report",
        "--n",
        "1",
        "--seed",
        "4",
        "--samples",
        "2",
    ]);
    assert!(stdout(&o).contains("p_k = 1/27"));
    assert_eq!(code(&tqhe(&["security-report", "--n", "3"])), 2);
}

#[test]
fn state_files_keep_fifteen_digits() {
    let w = Work::new();
    let key = w.file("k", "0 1 2\n");
    let plain = random_state(1, &mut seeded(9));
    let p = w.file("p", &write_state(&plain));
    let (c, d) = (w.path("c"), w.path("d"));
    run_ok(&[
        "encrypt",
        "--key",
        s(&key),
        "--state",
        s(&p),
        "--out",
        s(&c),
    ]);
    run_ok(&[
        "decrypt",
        "--key",
        s(&key),
        "--state",
        s(&c),
        "--out",
        s(&d),
    ]);
    let back = read_state(&d);
    for (a, b) in plain.amplitudes().iter().zip(back.amplitudes()) {
        assert!((a - b).norm() <= 1e-14);
    }
    let reread = read_state(&p);
    for (a, b) in plain.amplitudes().iter().zip(reread.amplitudes()) {
        assert!((a.re - b.re).abs() <= 1e-15 * a.re.abs().max(1e-300));
        assert!((a.im - b.im).abs() <= 1e-15 * a.im.abs().max(1e-300));
    }
}
