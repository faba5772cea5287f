use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const PAIR: &str = "2 2\nmat 0\n0 0 1\nmat 1\n1 1 1\n";

fn sparsify(dir: &Path, args: &[&str], out: &str) -> (Output, String) {
    let output = dir.join(out);
    let result = Command::new(env!("CARGO_BIN_EXE_sparsify"))
        .args(args)
        .arg("--output")
        .arg(&output)
        .env_remove("SPARSIFY_MAX_MINUTES")
        .output()
        .unwrap();
    let text = std::fs::read_to_string(&output).unwrap_or_default();
    (result, text)
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn weight_lines(report: &str) -> usize {
    report
        .lines()
        .skip_while(|l| *l != "weights")
        .skip(1)
        .take_while(|l| *l != "certificate")
        .count()
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pair.txt", PAIR);
    for algo in ["bss", "mmwum-wf", "mmwum-block", "aw-sample", "pe"] {
        let args = [
            "--algo", algo, "--eps", "0.5", "--seed", "7", "--input", &input,
        ];
        let (a, first) = sparsify(dir.path(), &args, "a.txt");
        let (b, second) = sparsify(dir.path(), &args, "b.txt");
        assert!(a.status.success() && b.status.success(), "{algo}");
        assert!(!first.is_empty());
        assert_eq!(first, second, "{algo}");
    }
}

#[test]
fn bss_on_identity_pair() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pair.txt", PAIR);
    let (out, report) = sparsify(
        dir.path(),
        &["--algo", "bss", "--eps", "0.5", "--input", &input],
        "o.txt",
    );
    assert!(out.status.success());
    assert!(weight_lines(&report) <= 32);
    for field in [
        "lambda_min ",
        "lambda_max ",
        "support_size ",
        "epsilon_achieved ",
    ] {
        assert!(report.lines().any(|l| l.starts_with(field)), "{field}");
    }
    assert!(report.contains("param rounds 32\n"));
    assert!(report.contains("passed: true\n"));
}

#[test]
fn pe_reports_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pair.txt", PAIR);
    let (out, report) = sparsify(
        dir.path(),
        &["--algo", "pe", "--eps", "0.5", "--input", &input],
        "o.txt",
    );
    assert!(out.status.success());
    assert!(report.contains("deterministic: true\n"));
    assert!(report.contains("passed: true\n"));
}

#[test]
fn weights_carry_seventeen_significant_digits() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pair.txt", PAIR);
    let (_, report) = sparsify(
        dir.path(),
        &["--algo", "mmwum-wf", "--eps", "0.5", "--input", &input],
        "o.txt",
    );
    let line = report
        .lines()
        .skip_while(|l| *l != "weights")
        .nth(1)
        .unwrap();
    let value = line.split_whitespace().nth(1).unwrap();
    let mantissa = value.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{value}");
}

#[test]
fn graph_inputs_with_costs_and_family() {
    let dir = TempDir::new().unwrap();
    let graph = write(&dir, "g.txt", "4\n1 2 1\n2 3 1\n3 4 1\n4 1 1\n1 3 2\n");
    let costs = write(&dir, "c.txt", "2\n1 0\n0 1\n1 1\n0 0\n2 2\n");
    let family = write(&dir, "f.txt", "sub\n1 2\n2 3\nsub\n1 3\n3 4\n");
    let base = [
        "--algo", "bss", "--eps", "0.5", "--kind", "graph", "--input", &graph,
    ];
    let (out, report) = sparsify(
        dir.path(),
        &[&base[..], &["--costs", &costs]].concat(),
        "c.out",
    );
    assert!(out.status.success());
    assert!(report.contains("check cost_1_ratio"));
    let (out, report) = sparsify(
        dir.path(),
        &[&base[..], &["--family", &family]].concat(),
        "f.out",
    );
    assert!(out.status.success());
    assert!(report.contains("check sub_1_lambda_max"));
}

#[test]
fn other_kinds() {
    let dir = TempDir::new().unwrap();
    let hyper = write(
        &dir,
        "h.txt",
        "5\n3 1 2 3 1\n3 2 3 4 1.5\n3 3 4 5 1\n3 1 4 5 2\n3 1 2 5 1\n",
    );
    let sdp = write(
        &dir,
        "s.txt",
        "2 3\nmat 0\n0 0 1\nmat 1\n1 1 1\nmat 2\n0 0 1\n0 1 1\n1 1 1\ntarget\n0 0 1\n1 1 1\ncost 1 1 1\npoint 1 1 1\n",
    );
    let simplex = write(
        &dir,
        "x.txt",
        "2 3\nmat 0\n0 0 1\nmat 1\n1 1 1\nmat 2\n0 0 1\n0 1 1\n1 1 1\nlambda 0.25 0.25 0.5\n",
    );
    for (kind, input) in [("hypergraph", &hyper), ("sdp", &sdp), ("simplex", &simplex)] {
        let (out, report) = sparsify(
            dir.path(),
            &[
                "--algo", "pe", "--eps", "0.5", "--kind", kind, "--input", input,
            ],
            "o.txt",
        );
        assert!(
            out.status.success(),
            "{kind}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(report.starts_with(&format!("kind {kind}\n")));
    }
}

#[test]
fn errors_exit_nonzero_with_diagnostic() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "2 1\n0 0 1\n");
    let (out, _) = sparsify(
        dir.path(),
        &["--algo", "bss", "--eps", "0.5", "--input", &bad],
        "o.txt",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let input = write(&dir, "pair.txt", PAIR);
    let (out, _) = sparsify(
        dir.path(),
        &["--algo", "bss", "--eps", "1.5", "--input", &input],
        "o.txt",
    );
    assert_eq!(out.status.code(), Some(2));

    let indefinite = write(&dir, "e.txt", "2 1\nmat 0\n0 1 1\n");
    let (out, _) = sparsify(
        dir.path(),
        &["--algo", "bss", "--eps", "0.5", "--input", &indefinite],
        "o.txt",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive semidefinite"));
}

#[test]
fn time_budget_from_environment() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pair.txt", PAIR);
    let out = Command::new(env!("CARGO_BIN_EXE_sparsify"))
        .args([
            "--algo",
            "mmwum-block",
            "--eps",
            "0.1",
            "--input",
            &input,
            "--output",
        ])
        .arg(dir.path().join("o.txt"))
        .env("SPARSIFY_MAX_MINUTES", "1e-9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("time budget"));
}

#[test]
fn pe_falls_back_to_required_rounds() {
    let dir = TempDir::new().unwrap();
    let graph = write(
        &dir,
        "g.txt",
        "5\n1 2 1\n2 3 1\n3 4 1\n4 5 1\n5 1 1\n1 3 2\n2 4 2\n",
    );
    let (out, report) = sparsify(
        dir.path(),
        &[
            "--algo", "pe", "--eps", "0.5", "--kind", "graph", "--input", &graph,
        ],
        "o.txt",
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(report.contains("param rounds 311\nparam t_lower"));
    assert!(report.contains("rounds_used 311\n"));
}
