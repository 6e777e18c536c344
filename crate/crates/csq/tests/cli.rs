//! End-to-end tests of the `csq` binary: each test spawns the real
//! executable and checks bytes on stdout / in output files, plus the
//! exit-code contract (0 success, 2 usage, 3 numeric).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

fn csq() -> Command {
    Command::new(env!("CARGO_BIN_EXE_csq"))
}

fn run(args: &[&str]) -> Output {
    csq().args(args).output().expect("spawn csq")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "csq failed (code {:?}): {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Scratch directory removed on drop; unique per test invocation.
struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        static COUNTER: AtomicUsize = AtomicUsize::new(0);
        let dir = std::env::temp_dir().join(format!(
            "csq-cli-{tag}-{}-{}",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::create_dir_all(&dir).expect("create scratch dir");
        Scratch(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    fn file_names(&self) -> Vec<String> {
        let mut names: Vec<String> = std::fs::read_dir(&self.0)
            .expect("read scratch dir")
            .map(|e| e.expect("dir entry").file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        names
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn read_bytes(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Parse an operator JSON document into (order, hermitian, provenance, entries).
fn parse_operator_json(text: &str) -> (usize, bool, String, Vec<[f64; 2]>) {
    let v: serde_json::Value = serde_json::from_str(text).expect("operator JSON");
    assert_eq!(v["format_version"], 1);
    let order = v["order"].as_u64().expect("order") as usize;
    let hermitian = v["hermitian"].as_bool().expect("hermitian");
    let provenance = v["provenance"].as_str().expect("provenance").to_owned();
    let entries: Vec<[f64; 2]> = v["entries"]
        .as_array()
        .expect("entries")
        .iter()
        .map(|pair| {
            let p = pair.as_array().expect("entry pair");
            [p[0].as_f64().expect("re"), p[1].as_f64().expect("im")]
        })
        .collect();
    assert_eq!(entries.len(), order * order, "entry count is order^2");
    (order, hermitian, provenance, entries)
}

/// Parse a CSV document into (comment lines, header, numeric rows).
fn parse_csv(text: &str) -> (Vec<String>, String, Vec<Vec<f64>>) {
    let mut comments = Vec::new();
    let mut header = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            assert!(header.is_none(), "comments precede the header");
            comments.push(rest.to_owned());
        } else if header.is_none() {
            header = Some(line.to_owned());
        } else {
            rows.push(
                line.split(',')
                    .map(|f| f.parse::<f64>().unwrap_or_else(|e| panic!("field {f:?}: {e}")))
                    .collect(),
            );
        }
    }
    (comments, header.expect("header line"), rows)
}

#[test]
fn isotropic_quantization_prints_shifted_factorial_diagonal() {
    let out = run(&["quantize", "--isotropic", "u", "--order", "10"]);
    let (order, hermitian, provenance, entries) = parse_operator_json(&stdout_of(&out));
    assert_eq!(order, 10);
    assert!(hermitian);
    assert_eq!(provenance, "isotropic:u");
    for n in 0..order {
        for m in 0..order {
            let [re, im] = entries[n * order + m];
            let want = if n == m { (n + 1) as f64 } else { 0.0 };
            assert!(
                (re - want).abs() <= 1e-10 && im.abs() <= 1e-12,
                "entry ({n},{m}) = {re}+{im}i, want {want}"
            );
        }
    }
}

#[test]
fn dirac_delta_over_pi_is_the_ground_projector_bit_for_bit() {
    let out = run(&[
        "quantize", "--dirac", "1:0,0", "--measure", "pi", "--order", "6",
    ]);
    let (order, hermitian, _, entries) = parse_operator_json(&stdout_of(&out));
    assert!(hermitian);
    let inv_pi = 1.0 / std::f64::consts::PI;
    assert_eq!(
        entries[0][0].to_bits(),
        inv_pi.to_bits(),
        "corner entry must be exactly 1/pi"
    );
    assert_eq!(entries[0][1], 0.0);
    for (k, &[re, im]) in entries.iter().enumerate().skip(1) {
        assert!(
            re == 0.0 && im == 0.0,
            "entry {}/{} of the projector must be exactly zero",
            k / order,
            k % order
        );
    }
}

#[test]
fn operator_files_round_trip_through_the_symbol_command() {
    let dir = Scratch::new("roundtrip");
    let op_path = dir.path("op.json");

    let out = run(&[
        "quantize", "--general", "z*zbar", "--order", "30",
        "--out", op_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        dir.file_names(),
        vec!["op.json".to_owned()],
        "no temporary files may survive an atomic write"
    );

    // A second run to stdout must produce the same bytes as the file.
    let again = run(&["quantize", "--general", "z*zbar", "--order", "30"]);
    assert_eq!(
        read_bytes(&op_path),
        again.stdout,
        "file output and stdout output must be byte-identical"
    );

    let sym = run(&[
        "symbol", op_path.to_str().unwrap(),
        "--r-grid", "0.5:0.5:1", "--theta-grid", "0:0:1",
    ]);
    let (comments, header, rows) = parse_csv(&stdout_of(&sym));
    assert_eq!(comments, vec!["source=general:z*zbar; order=30; pad=0".to_owned()]);
    assert_eq!(header, "r,theta,re,im");
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(row[0], 0.5);
    assert_eq!(row[1], 0.0);
    // The |z|^2 observable maps to a*a^dag whose expectation at z is |z|^2 + 1.
    assert!((row[2] - 1.25).abs() <= 1e-9, "re = {}", row[2]);
    assert!(row[3].abs() <= 1e-12, "im = {}", row[3]);
}

#[test]
fn harmonic_spectrum_is_an_integer_ladder() {
    let out = run(&["spectrum", "--builtin", "harmonic_hamiltonian", "--order", "10"]);
    let (_, header, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(header, "index,eigenvalue");
    assert_eq!(rows.len(), 10);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], k as f64);
        assert!(
            (row[1] - (k + 1) as f64).abs() <= 1e-10,
            "eigenvalue {k} = {}",
            row[1]
        );
    }
}

#[test]
fn figure_outputs_are_byte_identical_across_runs() {
    let a = Scratch::new("fig-a");
    let b = Scratch::new("fig-b");
    for dir in [&a, &b] {
        let out = run(&[
            "figures", "--which", "4", "--order", "40", "--pad", "4",
            "--out", dir.path("fig4.csv").to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(
            dir.file_names(),
            vec!["fig4.csv".to_owned(), "fig4_hist.csv".to_owned()],
            "figure 4 writes the spectrum and its histogram companion"
        );
    }
    for name in ["fig4.csv", "fig4_hist.csv"] {
        assert_eq!(
            read_bytes(&a.path(name)),
            read_bytes(&b.path(name)),
            "{name} must not vary between runs"
        );
    }
    let text = String::from_utf8(read_bytes(&a.path("fig4.csv"))).unwrap();
    let (comments, header, rows) = parse_csv(&text);
    assert!(comments[0].starts_with("source="), "header comment: {comments:?}");
    assert_eq!(header, "index,eigenvalue");
    assert_eq!(rows.len(), 40);
    let hist = String::from_utf8(read_bytes(&a.path("fig4_hist.csv"))).unwrap();
    let (_, hist_header, hist_rows) = parse_csv(&hist);
    assert_eq!(hist_header, "bin_lo,count");
    let total: f64 = hist_rows.iter().map(|r| r[1]).sum();
    assert_eq!(total, 40.0, "histogram counts every eigenvalue once");
}

#[test]
fn thread_count_never_changes_results() {
    let mut single = csq();
    single
        .args(["quantize", "--general", "exp(-u)*cos(theta)", "--order", "20"])
        .env("CSQ_THREADS", "1");
    let mut pooled = csq();
    pooled
        .args(["quantize", "--general", "exp(-u)*cos(theta)", "--order", "20"])
        .env("CSQ_THREADS", "4");
    let one = single.output().expect("spawn csq");
    let four = pooled.output().expect("spawn csq");
    assert!(one.status.success() && four.status.success());
    assert_eq!(
        one.stdout, four.stdout,
        "results must not depend on the worker-thread count"
    );
}

#[test]
fn usage_errors_exit_with_code_two() {
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("two sources", vec!["quantize", "--isotropic", "u", "--angular", "sin(theta)"]),
        ("no source", vec!["quantize"]),
        ("measure without dirac", vec!["quantize", "--isotropic", "u", "--measure", "pi"]),
        ("malformed grid", vec!["symbol", "--builtin", "angle", "--r-grid", "0:4"]),
        ("figure out of range", vec!["figures", "--which", "9", "--out", "/tmp/never-written.csv"]),
        ("unknown flag", vec!["quantize", "--isotropic", "u", "--no-such-flag"]),
        ("bad expression", vec!["quantize", "--isotropic", "u +", "--order", "4"]),
        ("unknown builtin", vec!["quantize", "--builtin", "bogus"]),
    ];
    for (label, args) in cases {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{label}: expected exit 2, got {:?}; stderr: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
    }

    let mut cmd = csq();
    cmd.args(["quantize", "--isotropic", "u", "--order", "4"])
        .env("CSQ_THREADS", "many");
    let out = cmd.output().expect("spawn csq");
    assert_eq!(out.status.code(), Some(2), "bad CSQ_THREADS is a usage error");
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("CSQ_THREADS"),
        "the message names the offending variable"
    );
}

#[test]
fn numeric_failures_exit_with_code_three() {
    // Coherent states at r = 8 live far outside a 10-level basis, so the
    // default truncation policy must refuse to report a symbol value.
    let out = run(&[
        "symbol", "--builtin", "angle", "--order", "10",
        "--r-grid", "8:8:1", "--theta-grid", "0:0:1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "truncation loss: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = run(&[
        "symbol", "--builtin", "angle", "--order", "8",
        "--hbar", "0", "--r-grid", "1:1:1", "--theta-grid", "0:0:1",
    ]);
    assert_eq!(out.status.code(), Some(3), "non-positive scale parameter");

    // A non-Hermitian operator (a single lowering matrix unit) must be
    // refused by the spectrum command, with the honest flag in the file.
    let dir = Scratch::new("nonhermitian");
    let op_path = dir.path("lower.json");
    let out = run(&[
        "quantize", "--dirac", "1:1,0", "--order", "6",
        "--out", op_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, hermitian, _, _) =
        parse_operator_json(&String::from_utf8(read_bytes(&op_path)).unwrap());
    assert!(!hermitian, "a single off-diagonal matrix unit is not Hermitian");
    let out = run(&["spectrum", op_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("Hermitian"),
        "stderr explains the refusal"
    );
}
