use std::process::{Command, Output};

fn weyl(args: &[&str], cache: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weyl"))
        .args(args)
        .env("WEYL_CACHE_DIR", cache)
        .output()
        .expect("run weyl")
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn lattice_count_matches_bruteforce() {
    let dir = tempfile::tempdir().unwrap();
    let fast = weyl(&["lattice", "count", "--mu", "40,57.3"], dir.path());
    let slow = weyl(&["lattice", "count", "--mu", "40,57.3", "--bruteforce"], dir.path());
    assert!(fast.status.success() && slow.status.success());
    assert_eq!(rows(&fast), rows(&slow));
    assert_eq!(rows(&fast)[0][1], "380");
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["--help"][..], &["lattice", "--help"], &["--version"]] {
        let out = weyl(args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(weyl(&["lattice", "count", "--bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(weyl(&["frobnicate"], dir.path()).status.code(), Some(2));
    // invalid parameter values are reported the same way
    assert_eq!(weyl(&["geometry", "gauss", "--xi1", "1", "--xi2", "-1"], dir.path()).status.code(), Some(2));
}

#[test]
fn guard_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = weyl(&["lattice", "count", "--mu", "1e9"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
}

#[test]
fn output_is_reproducible_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["experiment", "exponent", "--kind", "spectral", "--method", "sampled", "--j-lo", "3", "--j-hi", "7", "--n-random", "50"];
    let a = weyl(&args, dir.path());
    let b = weyl(&args, dir.path());
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "2"]);
    let c = weyl(&threaded, dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    // the config line records --threads; the data must not change
    let body = |o: &Output| String::from_utf8(o.stdout.clone()).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&a), body(&c));
    let seeded = weyl(&[&args[..], &["--seed", "18"]].concat(), dir.path());
    assert!(seeded.status.success());
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = weyl(&["spectral", "count", "--mu", "15", "--bc", "neumann"], dir.path());
    assert!(out.status.success());
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!files.is_empty());
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        assert_eq!(text.lines().next(), Some("weylzeros v1"), "{f:?}");
    }
    // a second run reads the cache and prints the same thing
    let again = weyl(&["spectral", "count", "--mu", "15", "--bc", "neumann"], dir.path());
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn json_lines_with_config_first() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("out.json");
    let out = weyl(
        &["expsum", "wvdc", "--t", "1,10", "--format", "json", "-o", out_file.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_file).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["config"]["seed"], 17);
    assert_eq!(lines[0]["config"]["command"], "expsum");
    assert_eq!(lines[0]["config"]["subcommand"], "wvdc");
    assert_eq!(lines[0]["config"]["flags"]["q"], 1);
    for row in &lines[1..] {
        assert!(row["ratio"].as_f64().unwrap() < 0.5);
        assert_eq!(row["terms"], 7);
    }
}
