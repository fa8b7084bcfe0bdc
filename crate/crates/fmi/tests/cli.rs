//! End-to-end tests of the command-line interface and its exit codes.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn fmi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn write_temp(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn classify_kl_negative_at_three() {
    let out = fmi(&["classify", "--generator", "kl", "--order", "12", "--json"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["verdict"]["kind"], "NegativeCoefficient");
    assert_eq!(v["verdict"]["order"], 3);
}

#[test]
fn classify_chi2_psd_generating() {
    let out = fmi(&["classify", "--generator", "chi2", "--json"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["verdict"]["kind"], "PsdGenerating");
}

#[test]
fn classify_tv_non_analytic() {
    let out = fmi(&["classify", "--generator", "tv", "--json"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["verdict"]["kind"], "NonAnalytic");
}

#[test]
fn classify_with_kernel_table() {
    let out = fmi(&[
        "classify",
        "--generator",
        "chi2",
        "--with-kernel",
        "0.3333333333333333",
        "--json",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let t2 = v["kernel_table"]["transfer"][2].as_f64().unwrap();
    assert!((t2 - 81.0 / 64.0).abs() < 1e-9);
}

#[test]
fn classify_unknown_generator_exits_two() {
    let out = fmi(&["classify", "--generator", "hellinger"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn matrix_independent_psd() {
    let dist = write_temp(
        r#"{"alphabet_sizes":[2,2,2],"atoms":[
            {"x":[0,0,0],"p":0.125},{"x":[0,0,1],"p":0.125},
            {"x":[0,1,0],"p":0.125},{"x":[0,1,1],"p":0.125},
            {"x":[1,0,0],"p":0.125},{"x":[1,0,1],"p":0.125},
            {"x":[1,1,0],"p":0.125},{"x":[1,1,1],"p":0.125}]}"#,
    );
    let out = fmi(&[
        "matrix",
        "--dist",
        dist.path().to_str().unwrap(),
        "--generator",
        "kl",
        "--psd",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["psd"], true);
    // off-diagonal entries vanish; the diagonal is the self-information ln 2
    for i in 0..3 {
        for l in 0..3 {
            let entry = v["matrix"][i][l].as_f64().unwrap();
            if i == l {
                assert!((entry - std::f64::consts::LN_2).abs() < 1e-12);
            } else {
                assert!(entry.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn matrix_dependent_chi2_all_ones() {
    let dist = write_temp(
        r#"{"alphabet_sizes":[2,2],"atoms":[{"x":[0,0],"p":0.5},{"x":[1,1],"p":0.5}]}"#,
    );
    let out = fmi(&[
        "matrix",
        "--dist",
        dist.path().to_str().unwrap(),
        "--generator",
        "chi2",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    for i in 0..2 {
        for l in 0..2 {
            assert!((v[i][l].as_f64().unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn matrix_unnormalized_exits_two() {
    let dist = write_temp(
        r#"{"alphabet_sizes":[2],"atoms":[{"x":[0],"p":0.5},{"x":[1],"p":0.4}]}"#,
    );
    let out = fmi(&[
        "matrix",
        "--dist",
        dist.path().to_str().unwrap(),
        "--generator",
        "kl",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn matrix_infinite_divergence_exits_three() {
    let dist = write_temp(
        r#"{"alphabet_sizes":[2,2],"atoms":[{"x":[0,0],"p":0.5},{"x":[1,1],"p":0.5}]}"#,
    );
    let out = fmi(&[
        "matrix",
        "--dist",
        dist.path().to_str().unwrap(),
        "--generator",
        "reverse-kl",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn psd_check_reports_spectrum() {
    let m = write_temp("[[1.0, 0.5], [0.5, 1.0]]");
    let out = fmi(&["psd-check", "--matrix", m.path().to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["psd"], true);
    assert!((v["eigenvalues"][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["eigenvalues"][1].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn latent_preset_kernel_indefinite() {
    let out = fmi(&[
        "latent",
        "--preset",
        "paper-tvd-relu-4",
        "--generator",
        "tv",
        "kernel",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["psd"], false);
    let min = v["min_eigenvalue"].as_f64().unwrap();
    assert!((min - (1.0 - std::f64::consts::SQRT_2) / 9.0).abs() < 1e-12);
}

#[test]
fn latent_preset_block_transition() {
    for (r, psd) in [("7", true), ("8", false)] {
        let out = fmi(&[
            "latent",
            "--preset",
            "paper-tvd-relu-4",
            "--generator",
            "tv",
            "block",
            "--replicas",
            r,
        ]);
        assert!(out.status.success());
        assert_eq!(stdout_json(&out)["psd"], psd, "R = {r}");
    }
}

#[test]
fn latent_inadmissible_family_exits_two() {
    let fam = write_temp(r#"{"a":0.5,"k":1,"loadings":[[0.9],[0.2]]}"#);
    let out = fmi(&[
        "latent",
        "--family",
        fam.path().to_str().unwrap(),
        "--generator",
        "tv",
        "kernel",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn counterexample_tv_found() {
    let out = fmi(&[
        "counterexample",
        "--generator",
        "tv",
        "--n-max",
        "4",
        "--r-max",
        "16",
        "--gamma-steps",
        "2",
        "--random-tries",
        "0",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["outcome"], "found");
    assert_eq!(v["certificate"]["R"], 8);
}

#[test]
fn counterexample_chi2_absent() {
    let out = fmi(&["counterexample", "--generator", "chi2"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["outcome"], "absent");
}

#[test]
fn counterexample_seed_env_reproducible() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_fmi"))
            .args([
                "counterexample",
                "--generator",
                "tv",
                "--n-max",
                "4",
                "--gamma-steps",
                "2",
                "--random-tries",
                "0",
            ])
            .env("FMI_SEED", "42")
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert!(v["certificate"]["provenance"]
        .as_str()
        .unwrap()
        .contains("seed=42"));
}

#[test]
fn verify_paper_all_pass() {
    let out = fmi(&["verify-paper"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("all"));
    assert!(!text.contains("FAIL"));
}
