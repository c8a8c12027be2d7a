use std::fs;
use std::path::Path;

use ffcorr::cli::main_with_args;
use ffcorr::verify;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn ffstat(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ffstat").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn path_arg(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn stat_spot_values() {
    let r = ffstat(&["stat", "error-term", "--q", "3", "--n", "2", "--shift", "1"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out, "-1/3\t-0.333333333333\n");

    let r = ffstat(&["stat", "euler-phi", "--q", "3", "--Q", "0,0,1"]);
    assert_eq!(r.out.split('\t').next(), Some("6"));

    let r = ffstat(&["stat", "autocorr", "--p", "3", "--k", "1", "--n", "2", "--shift", "1", "--format", "json"]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["values"][0]["num"], "2");
    assert_eq!(v["values"][0]["den"], "3");
}

#[test]
fn bad_input_exit_codes() {
    let r = ffstat(&["stat", "mean", "--q", "6", "--n", "2"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("prime power"), "{}", r.err);

    assert_eq!(ffstat(&["stat", "mean", "--p", "4", "--k", "1", "--n", "2"]).code, 2);
    assert_eq!(ffstat(&["stat", "error-term", "--q", "3", "--n", "2", "--shift", "1,x"]).code, 2);
    assert_eq!(ffstat(&["stat", "error-term", "--q", "3", "--n", "2", "--shift", "5"]).code, 2);
    assert_eq!(ffstat(&["stat", "interval-sum", "--q", "3", "--n", "3"]).code, 2);
    assert_eq!(ffstat(&["bogus"]).code, 2);

    let r = ffstat(&["verify", "--suite", "t12", "--n", "4"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("h < n-3"), "{}", r.err);

    let r = ffstat(&["--budget", "1000", "tables", "--q", "3", "--n", "8", "--function", "lambda"]);
    assert_eq!(r.code, 3, "{}", r.err);

    let r = ffstat(&["stat", "progression-sum", "--q", "3", "--n", "3", "--Q", "0,1", "--A", "0"]);
    assert_eq!(r.code, 5, "{}", r.err);
    assert!(r.err.contains("NotCoprime"), "{}", r.err);

    assert_eq!(ffstat(&["sweep", "--config", "/nonexistent/sweep.json"]).code, 4);
}

#[test]
fn tables_cache_hit_keeps_crc() {
    let dir = tempfile::tempdir().unwrap();
    let d = path_arg(dir.path());
    let args = ["--cache-dir", d.as_str(), "tables", "--q", "9", "--n", "3", "--function", "mu"];
    let first = ffstat(&args);
    assert_eq!(first.code, 0, "{}", first.err);
    assert!(first.out.starts_with("wrote "));
    let second = ffstat(&args);
    assert!(second.out.starts_with("cache hit "), "{}", second.out);
    let crc = |s: &str| s.trim().rsplit("crc32=").next().unwrap().to_string();
    assert_eq!(crc(&first.out), crc(&second.out));

    // a damaged file is rebuilt rather than trusted
    let file = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let mut bytes = fs::read(&file).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    fs::write(&file, bytes).unwrap();
    let third = ffstat(&args);
    assert!(third.out.starts_with("wrote "), "{}", third.out);
    assert_eq!(crc(&first.out), crc(&third.out));

    // stat reads through the same directory
    let r = ffstat(&["--cache-dir", d.as_str(), "stat", "mean", "--q", "9", "--n", "3", "--function", "mu"]);
    assert_eq!(r.code, 0);
    assert!(r.out.starts_with("0\t"), "{}", r.out);
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("t12.json");
    let r = ffstat(&["verify", "--suite", "t12-default", "--q-list", "3,5,7", "--output", &path_arg(&json)]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert!(r.out.contains("slope"), "{}", r.out);
    let rows = verify::from_json(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|row| row.theorem == "t12" && row.h == Some(1) && row.ms == 0));

    let csv = dir.path().join("t12.csv");
    ffstat(&["verify", "--suite", "t12", "--q-list", "3,5,7", "--format", "csv", "--output", &path_arg(&csv)]);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), verify::CSV_HEADER.join(","));
    assert_eq!(verify::from_csv(&text).unwrap(), rows);
}

#[test]
fn identities_suite_outcomes() {
    let r = ffstat(&["verify", "--suite", "identities", "--q-list", "3", "--n-max", "5"]);
    assert_eq!(r.code, 0, "{}", r.out);

    // at q = 5 only the identities that assume (q-1)-fold symmetry of monic shifts break
    let r = ffstat(&["verify", "--suite", "identities", "--q-list", "5", "--n-max", "5"]);
    assert_eq!(r.code, 1);
    let rows = verify::from_json(r.out.split("\n# FAIL").next().unwrap()).unwrap();
    let failing: Vec<&str> = rows.iter().filter(|row| !row.pass).map(|row| row.theorem.as_str()).collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|t| t.contains("monic")), "{failing:?}");
}

#[test]
fn sweep_runs_jobs_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    fs::write(
        &config,
        r#"{"jobs": [
            {"suite": "t13", "q_list": [3, 5, 7], "k": 1, "output": "t13.json"},
            {"suite": "chowla", "q_list": [3], "n_list": [3], "samples": 10, "output": "chowla.csv", "format": "csv"}
        ]}"#,
    )
    .unwrap();
    let r = ffstat(&["sweep", "--config", &path_arg(&config)]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    let jobs = manifest["jobs"].as_array().unwrap();
    assert_eq!(jobs.len(), 2);
    assert_eq!(jobs[0]["rows"], 3);
    assert_eq!(jobs[1]["rows"], 1);
    assert!(dir.path().join("chowla.csv").exists());

    fs::write(&config, r#"{"jobs": []}"#).unwrap();
    let r = ffstat(&["sweep", "--config", &path_arg(&config)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("no jobs"));

    fs::write(&config, r#"{"jobs": [{"suite": "t12", "output": "x.json", "colour": "red"}]}"#).unwrap();
    assert_eq!(ffstat(&["sweep", "--config", &path_arg(&config)]).code, 2);
}

#[test]
fn reports_identical_across_thread_counts() {
    let base = ["verify", "--suite", "identities", "--q-list", "3,4", "--n-max", "4"];
    let one: Vec<&str> = ["--threads", "1"].iter().chain(base.iter()).copied().collect();
    let all: Vec<&str> = ["--threads", "0"].iter().chain(base.iter()).copied().collect();
    let a = ffstat(&one);
    let b = ffstat(&all);
    assert_eq!(a.code, b.code);
    assert_eq!(a.out, b.out);
}
