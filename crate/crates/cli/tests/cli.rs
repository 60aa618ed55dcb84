//! End-to-end tests of the command-line surface: flag spellings, exit codes,
//! and exact round-tripping of emitted CSV.

use std::path::Path;
use std::process::Command;

fn rslab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rslab"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn split_prints_known_quadratic_table() {
    let output = rslab()
        .args(["split", "--conductor", "5", "--order", "2", "--pmax", "20"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,e,f,g"));
    let rows: Vec<&str> = lines.collect();
    // 2,3,7,13,17 inert; 11,19 split; 5 ramified
    assert_eq!(
        rows,
        vec![
            "2,1,2,1", "3,1,2,1", "5,2,1,1", "7,1,2,1", "11,1,1,2", "13,1,2,1", "17,1,2,1",
            "19,1,1,2"
        ]
    );
}

#[test]
fn malformed_json_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("broken.json");
    write(&spec, "{ this is not json");
    let status = rslab()
        .args([
            "coeffs",
            "--spec",
            spec.to_str().unwrap(),
            "--xmax",
            "100",
            "--out",
        ])
        .arg(dir.path().join("out.csv"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn capacity_violation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("pair.json");
    write(
        &spec,
        r#"{"repA": {"kind":"character","conductor":1},
            "repB": {"kind":"character","conductor":1}}"#,
    );
    let output = rslab()
        .args([
            "coeffs",
            "--spec",
            spec.to_str().unwrap(),
            "--xmax",
            "2000000000",
            "--out",
        ])
        .arg(dir.path().join("out.csv"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn coeffs_csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("pair.json");
    write(
        &spec,
        r#"{"repA": {"kind":"character","conductor":5,"order":4},
            "repB": {"kind":"character","conductor":7,"order":3},
            "fieldE": {"conductor":5,"order":2}}"#,
    );
    let out = dir.path().join("coeffs.csv");
    let status = rslab()
        .args([
            "coeffs",
            "--spec",
            spec.to_str().unwrap(),
            "--xmax",
            "5000",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    // reparse and compare bit-for-bit against an in-process recomputation
    use rslab_core::arithmetic::PrimeTable;
    use rslab_core::characters::DirichletCharacter;
    use rslab_core::fields::CyclicExtension;
    use rslab_core::rankin::CoefficientStream;
    use rslab_core::reps::{AutomorphicRepQ, BaseChangedRep};
    let field = CyclicExtension::new(DirichletCharacter::of_order(5, 2).unwrap()).unwrap();
    let a = BaseChangedRep::new(
        AutomorphicRepQ::character_rep(DirichletCharacter::of_order(5, 4).unwrap()),
        field.clone(),
    );
    let b = BaseChangedRep::over_q(AutomorphicRepQ::character_rep(
        DirichletCharacter::of_order(7, 3).unwrap(),
    ));
    let primes = PrimeTable::sieve(5000).unwrap();
    let stream = CoefficientStream::base_change(&a, &b, 5000, &primes).unwrap();

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,re,im"));
    let mut count = 0usize;
    for (line, entry) in lines.zip(stream.entries()) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 3);
        assert_eq!(fields[0].parse::<u64>().unwrap(), entry.n);
        let re: f64 = fields[1].parse().unwrap();
        let im: f64 = fields[2].parse().unwrap();
        assert_eq!(
            re.to_bits(),
            entry.value.re.to_bits(),
            "re mismatch at n = {}",
            entry.n
        );
        assert_eq!(
            im.to_bits(),
            entry.value.im.to_bits(),
            "im mismatch at n = {}",
            entry.n
        );
        count += 1;
    }
    assert_eq!(count, stream.entries().len());
    assert!(count > 100);
}

#[test]
fn factor_check_passes_on_quadratic_instance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("inst.json");
    write(
        &spec,
        r#"{"rep": {"kind":"character","conductor":1}, "field": {"conductor":5,"order":2}}"#,
    );
    let output = rslab()
        .args([
            "factor-check",
            "--spec",
            spec.to_str().unwrap(),
            "--pmax",
            "2000",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(
        text.contains("max residual"),
        "missing residual line: {text}"
    );
}

#[test]
fn equiv_reports_matches_and_group_check() {
    let dir = tempfile::tempdir().unwrap();
    let spec_a = dir.path().join("a.json");
    let spec_b = dir.path().join("b.json");
    let field_e = dir.path().join("e.json");
    let field_f = dir.path().join("f.json");
    write(&spec_a, r#"{"kind":"character","conductor":1}"#);
    // pi' = pi tensor eta^{-1}: single arranged match at (1, 0)
    write(
        &spec_b,
        r#"{"kind":"character","conductor":1,"twist":{"conductor":5,"order":2,"power":1}}"#,
    );
    write(&field_e, r#"{"conductor":5,"order":2}"#);
    write(&field_f, r#"{"conductor":7,"order":3}"#);
    let out = dir.path().join("report.json");
    let status = rslab()
        .args([
            "equiv",
            "--specA",
            spec_a.to_str().unwrap(),
            "--specB",
            spec_b.to_str().unwrap(),
            "--fieldE",
            field_e.to_str().unwrap(),
            "--fieldF",
            field_f.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let matches = report["matches"].as_array().unwrap();
    assert_eq!(matches.len(), 1);
    assert_eq!(matches[0]["i"], 1);
    assert_eq!(matches[0]["j"], 0);
    assert_eq!(report["group_check"]["pass"], true);
    assert!(report["tau0"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn pnt_sum_emits_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("pair.json");
    write(
        &spec,
        r#"{"repA": {"kind":"character","conductor":1},
            "repB": {"kind":"character","conductor":1,"tau":0.7}}"#,
    );
    let out = dir.path().join("report.csv");
    let summary = dir.path().join("summary.json");
    let status = rslab()
        .args([
            "pnt-sum",
            "--spec",
            spec.to_str().unwrap(),
            "--grid",
            "1e3:1e5:geometric",
            "--out",
            out.to_str().unwrap(),
            "--summary",
            summary.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("x,S_re,S_im,M_re,M_im,abs_err\n"));
    assert_eq!(text.lines().count(), 1 + 5); // header + 5 half-decade points
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(report["verdict"], "equivalent");
    assert!((report["tau0"].as_f64().unwrap() - 0.7).abs() < 1e-9);
    assert_eq!(report["metadata"]["restriction"], "none");
    assert_eq!(report["metadata"]["degrees_coprime"], "true");
}

#[test]
fn pnt_sum_split_restriction_over_compositum() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("pair.json");
    write(
        &spec,
        r#"{"repA": {"kind":"character","conductor":1},
            "repB": {"kind":"character","conductor":1},
            "fieldE": {"conductor":5,"order":2},
            "fieldF": {"conductor":7,"order":3}}"#,
    );
    let out = dir.path().join("report.csv");
    let summary = dir.path().join("summary.json");
    let status = rslab()
        .args([
            "pnt-sum",
            "--spec",
            spec.to_str().unwrap(),
            "--grid",
            "1e3:1e4:geometric",
            "--restrict",
            "split-EF",
            "--out",
            out.to_str().unwrap(),
            "--summary",
            summary.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(report["metadata"]["restriction"], "split-EF");
    assert!(report["metadata"]["compositum_hypothesis"].is_string());
}

#[test]
fn hyp_h_emits_partials() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("inst.json");
    write(
        &spec,
        r#"{"rep": {"kind":"character","conductor":1}, "field": {"conductor":5,"order":2}}"#,
    );
    let out = dir.path().join("partials.csv");
    let output = rslab()
        .args([
            "hyp-h",
            "--spec",
            spec.to_str().unwrap(),
            "--k",
            "2",
            "--pmax",
            "100000",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("P,partial\n"));
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(
        values.windows(2).all(|w| w[1] >= w[0]),
        "partials must be nondecreasing"
    );
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("premise violations"), "{stdout}");
    assert!(
        stdout.contains(": 0"),
        "GL(1) instances satisfy the local bound: {stdout}"
    );
}

#[test]
fn explicit_table_rep_via_cli() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("params.csv");
    // rank-2 unit-circle parameters for the primes up to 50
    let mut text = String::from("p,re_1,im_1,re_2,im_2\n");
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let theta = (p as f64).sqrt();
        text.push_str(&format!(
            "{p},{},{},{},{}\n",
            theta.cos(),
            theta.sin(),
            theta.cos(),
            -theta.sin()
        ));
    }
    write(&csv, &text);
    let spec = dir.path().join("pair.json");
    write(
        &spec,
        r#"{"repA": {"kind":"explicit","rank":2,"csv":"params.csv"},
            "repB": {"kind":"explicit","rank":2,"csv":"params.csv"}}"#,
    );
    let out = dir.path().join("coeffs.csv");
    let status = rslab()
        .args([
            "coeffs",
            "--spec",
            spec.to_str().unwrap(),
            "--xmax",
            "50",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().count() > 15);
    // diagonal stream: values real and nonnegative
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let re: f64 = fields[1].parse().unwrap();
        let im: f64 = fields[2].parse().unwrap();
        assert!(im.abs() < 1e-12);
        assert!(re >= -1e-12);
    }
}

#[test]
fn tau_cache_dir_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let spec = dir.path().join("pair.json");
    write(
        &spec,
        r#"{"repA": {"kind":"cuspform","weight":12,"limit":2000},
            "repB": {"kind":"cuspform","weight":12,"limit":2000}}"#,
    );
    let out = dir.path().join("coeffs.csv");
    let status = rslab()
        .env(rslab_cli::CACHE_DIR_ENV, &cache)
        .args([
            "coeffs",
            "--spec",
            spec.to_str().unwrap(),
            "--xmax",
            "2000",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(cache.join("tau_2000.csv").exists());
    let first = std::fs::read(&out).unwrap();
    // second run reads the cache and must emit identical bytes
    let status = rslab()
        .env(rslab_cli::CACHE_DIR_ENV, &cache)
        .args([
            "coeffs",
            "--spec",
            spec.to_str().unwrap(),
            "--xmax",
            "2000",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(first, std::fs::read(&out).unwrap());
}

#[test]
fn field_mismatch_in_split_restriction_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("pair.json");
    write(
        &spec,
        r#"{"repA": {"kind":"character","conductor":1},
            "repB": {"kind":"character","conductor":1},
            "fieldE": {"conductor":5,"order":2},
            "fieldF": {"conductor":7,"order":3}}"#,
    );
    let output = rslab()
        .args([
            "pnt-sum",
            "--spec",
            spec.to_str().unwrap(),
            "--grid",
            "1e3:1e4:geometric",
            "--restrict",
            "split-E",
            "--out",
        ])
        .arg(dir.path().join("r.csv"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8(output.stderr).unwrap();
    assert!(err.contains("field"), "stderr: {err}");
}
