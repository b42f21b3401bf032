use std::process::Command;

fn qgamma(args: &[&str]) -> (i32, String, String) {
    qgamma_env(args, None)
}

fn qgamma_env(args: &[&str], threads: Option<&str>) -> (i32, String, String) {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qgamma"));
    c.args(args);
    if let Some(t) = threads {
        c.env("QGAMMA_THREADS", t);
    }
    let o = c.output().expect("binary runs");
    (
        o.status.code().unwrap_or(-1),
        String::from_utf8(o.stdout).unwrap(),
        String::from_utf8(o.stderr).unwrap(),
    )
}

#[test]
fn gamma_fifty_digits() {
    let (code, out, _) = qgamma(&["gamma", "--digits", "50", "--method", "gosper"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "0.57721566490153286060651209008240243104215933593992");
}

#[test]
fn qlog_thirty_digits() {
    let (code, out, _) = qgamma(&["qlog", "--q", "2", "--z", "1", "--digits", "30"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "0.764499780348444209191319747255");
    let (_, series, _) = qgamma(&["qlog", "--q", "2", "--z", "1", "--digits", "30", "--route", "series"]);
    assert_eq!(series, out);
}

#[test]
fn irrat_json_schema() {
    let (code, out, _) = qgamma(&["irrat", "--base", "2", "--n", "5", "--kind", "eq25", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let o = v.as_object().unwrap();
    for k in [
        "base",
        "n",
        "m",
        "d_bitlen",
        "frac",
        "threshold",
        "kind",
        "passed",
        "excluded",
        "denominator_lower_bound",
        "work_bits",
    ] {
        assert!(o.contains_key(k), "missing {k}");
    }
    assert_eq!(o["frac"], "0.840559982");
    assert_eq!(o["excluded"], "2^32*d_32");
}

#[test]
fn irrat_writes_one_file_per_test() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().to_str().unwrap();
    let (code, _, _) = qgamma(&["irrat", "--base", "2", "--n", "4..5", "--out-dir", p]);
    assert_eq!(code, 0);
    let mut names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["cert_base2_n4_m16_eq25.json", "cert_base2_n5_m32_eq25.json"]);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.txt");
    let (code, out, _) = qgamma(&["gamma", "--digits", "10", "--out", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(p).unwrap().trim(), "0.5772156649");
}

#[test]
fn exit_codes() {
    assert_eq!(qgamma(&["gamma", "--digits", "0"]).0, 2);
    assert_eq!(qgamma(&["gamma", "--digits", "5", "--method", "nope"]).0, 2);
    assert_eq!(qgamma(&["irrat", "--base", "2", "--n", "5", "--m", "15"]).0, 2);
    assert_eq!(qgamma(&["decompose", "--base", "q", "--n", "2", "--m", "1"]).0, 2);
    assert_eq!(qgamma(&["gamma", "--digits", "5", "--format", "csv"]).0, 2);
    assert_eq!(qgamma_env(&["gamma", "--digits", "5"], Some("zero")).0, 2);
    // Vacca cannot reach 30 digits within its term cap: a computation error.
    assert_eq!(qgamma(&["gamma", "--digits", "30", "--method", "vacca"]).0, 1);
    assert_eq!(qgamma(&["--help"]).0, 0);
}

#[test]
fn output_independent_of_thread_count() {
    let args = ["decompose", "--base", "2", "--n", "5", "--m", "64", "--json"];
    let (_, one, _) = qgamma_env(&args, Some("1"));
    let (_, four, _) = qgamma_env(&args, Some("4"));
    assert_eq!(one, four);
    let args = ["irrat", "--base", "2", "--n", "6", "--json"];
    assert_eq!(qgamma_env(&args, Some("1")).1, qgamma_env(&args, Some("3")).1);
}

#[test]
fn verify_suites_pass() {
    for suite in ["chi", "identities", "bounds", "rates"] {
        let (code, out, _) = qgamma(&["verify", "--suite", suite, "--json"]);
        assert_eq!(code, 0, "{suite}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        for r in v.as_array().unwrap() {
            let keys: Vec<_> = r.as_object().unwrap().keys().cloned().collect();
            assert_eq!(keys, ["check", "params", "lower", "value", "upper", "passed"]);
        }
    }
}

#[test]
fn bench_csv_columns() {
    let (code, out, _) = qgamma(&["bench", "--methods", "gosper,asym-28", "--digits", "20", "--csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "method,q,n,m,digits_requested,digits_correct,terms,wall_ms,skipped");
    let row: Vec<_> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "gosper");
    assert_eq!(row[4], "20");
    assert!(row[5].parse::<u32>().unwrap() >= 20);
    assert_eq!(row[8], "");
    assert_eq!(lines.count(), 1);
}

#[test]
fn bench_reports_unreachable_targets() {
    let (code, out, _) = qgamma(&["bench", "--methods", "vacca,gosper", "--digits", "20", "--json"]);
    assert_eq!(code, 0);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(rows[0]["skipped"].as_str().unwrap().contains("2^26"));
    assert_eq!(rows[0]["digits_correct"], 0);
    assert!(rows[1]["skipped"].is_null());
}

#[test]
fn asymptotic_methods_print_requested_digits() {
    for m in ["asym-27", "asym-28", "asym-29", "asym-base3", "asym-baseq", "baseq-accel"] {
        let (code, out, _) = qgamma(&["gamma", "--digits", "25", "--method", m]);
        assert_eq!(code, 0, "{m}");
        assert_eq!(out.trim(), "0.5772156649015328606065120", "{m}");
    }
}
