use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn orbitlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

const SQUARE_OVER_X: [&str; 12] =
    ["search", "e", "--map", "(1-X)^2/X", "--group", "--", "2", "--height", "7", "--nmax", "3", "--kmax"];

fn square_over_x(extra: &[&str]) -> Output {
    let mut args: Vec<&str> = SQUARE_OVER_X.to_vec();
    args.push("2");
    args.extend(extra);
    orbitlab(&args)
}

#[test]
fn height_example() {
    let o = orbitlab(&["height", "--point", "2/3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "{\"h\":\"log 3\",\"magnitude\":3}\n");
}

#[test]
fn genus_example() {
    let o = orbitlab(&["genus", "--F", "X^3-X", "--G", "1", "--m", "5"]);
    assert!(o.status.success());
    let v = &lines(&o)[0];
    assert_eq!(v["genus"], 4);
    assert_eq!(v["case"], "dF≠dG");
    assert_eq!(v["hypotheses"]["m_large"], true);
}

#[test]
fn square_over_x_witnesses() {
    let o = square_over_x(&[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let all = lines(&o);
    let found = |alpha: &str, u: &str| {
        all.iter().any(|w| w["kind"] == "E-witness" && w["n"] == 1 && w["k"] == 0 && w["alpha"] == alpha && w["u"] == u)
    };
    assert!(found("1/3", "4"));
    assert!(found("1/5", "16"));
    assert_eq!(all.last().unwrap()["kind"], "summary");
}

#[test]
fn worker_count_does_not_change_output() {
    let a = square_over_x(&["--jobs", "1"]);
    let b = square_over_x(&["--jobs", "6"]);
    let c = square_over_x(&["--jobs", "6"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    let p = ["search", "pairwise", "--map", "X^2+1", "--group", "2", "--height", "3", "--nmax", "4"];
    let x = orbitlab(&[&p[..], &["--jobs", "1"]].concat());
    let y = orbitlab(&[&p[..], &["--jobs", "4"]].concat());
    assert!(x.status.success());
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn output_file_embeds_manifest_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.jsonl");
    let two = dir.path().join("two.jsonl");
    assert!(square_over_x(&["--jobs", "1", "--output", one.to_str().unwrap()]).status.success());
    assert!(square_over_x(&["--jobs", "3", "--output", two.to_str().unwrap()]).status.success());
    let a = fs::read(&one).unwrap();
    assert_eq!(a, fs::read(&two).unwrap());
    let text = String::from_utf8(a).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let m = &first["manifest"];
    assert_eq!(m["command"], "search e");
    assert_eq!(m["map"], "(1-X)^2/X");
    assert_eq!(m["group"], "2");
    assert_eq!(m["args"]["height"], 7);
    assert!(m["c1"].is_number());
    assert!(m.get("wall_time_ms").is_none());
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("one.jsonl.manifest.json")).unwrap()).unwrap();
    assert_eq!(&sidecar["manifest"], m);
    assert!(sidecar["wall_time_ms"].is_number());
}

#[test]
fn cache_replay_matches_fresh_run() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = cache.to_str().unwrap();
    let fresh = square_over_x(&[]);
    let first = square_over_x(&["--cache-dir", c]);
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);
    let replay = square_over_x(&["--cache-dir", c, "--jobs", "2"]);
    assert_eq!(fresh.stdout, first.stdout);
    assert_eq!(first.stdout, replay.stdout);
    // replay is served from the entry: tamper with it and observe
    let entry = fs::read_dir(&cache).unwrap().next().unwrap().unwrap().path();
    let mut v: Value = serde_json::from_slice(&fs::read(&entry).unwrap()).unwrap();
    v["lines"] = serde_json::json!(["{\"cached\":true}"]);
    fs::write(&entry, serde_json::to_vec(&v).unwrap()).unwrap();
    assert_eq!(stdout(&square_over_x(&["--cache-dir", c])), "{\"cached\":true}\n");
    // different inputs, different key
    let other = orbitlab(&["height", "--point", "5", "--cache-dir", c]);
    assert!(other.status.success());
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 2);
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "height = 7\nnmax = 3\nkmax = 2\ngroup = \"2\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let via_config = orbitlab(&["search", "e", "--map", "(1-X)^2/X", "--config", cfg]);
    assert!(via_config.status.success(), "{}", String::from_utf8_lossy(&via_config.stderr));
    assert_eq!(via_config.stdout, square_over_x(&[]).stdout);
    let overridden = orbitlab(&["search", "e", "--map", "(1-X)^2/X", "--config", cfg, "--height", "3"]);
    let summary = lines(&overridden).pop().unwrap();
    assert_eq!(summary["height"], 3);
    fs::write(dir.path().join("bad.toml"), "bogus = 1\n").unwrap();
    let bad = orbitlab(&["height", "--point", "1", "--config", dir.path().join("bad.toml").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(orbitlab(&["height", "--point", "abc"]).status.code(), Some(2));
    assert_eq!(orbitlab(&["search", "e", "--map", "X^2+", "--group", "2"]).status.code(), Some(2));
    assert_eq!(orbitlab(&["search", "g", "--map", "X^2", "--group", "2/0"]).status.code(), Some(2));
    assert_eq!(orbitlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(orbitlab(&["genus", "--F", "X^3-X", "--m", "4"]).status.code(), Some(2));

    let capped = orbitlab(&["search", "g", "--map", "X^2", "--group", "2", "--height", "50", "--max-points", "100"]);
    assert_eq!(capped.status.code(), Some(3));
    let summary = lines(&capped).pop().unwrap();
    assert_eq!(summary["height"], 8);
    assert!(String::from_utf8_lossy(&capped.stderr).contains("budget exceeded"));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("capped.jsonl");
    let o = orbitlab(&[
        "search", "g", "--map", "X^2", "--group", "2", "--height", "50", "--max-points", "100",
        "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let first: Value = serde_json::from_str(fs::read_to_string(&out).unwrap().lines().next().unwrap()).unwrap();
    assert!(first["manifest"]["budget_exceeded"].as_str().unwrap().contains("searched height 8"));

    assert_eq!(orbitlab(&["group", "cosets", "--primes", "2,3,5", "--m", "100", "--limit", "10"]).status.code(), Some(3));
}

#[test]
fn negative_values_after_separator() {
    let o = orbitlab(&["group", "check", "--group", "--", "-1,4", "--value", "-16"]);
    assert!(o.status.success());
    let v = &lines(&o)[0];
    assert_eq!(v["member"], true);
    assert_eq!(v["exponents"], serde_json::json!([1, 2]));
}

#[test]
fn every_subcommand_answers() {
    let runs: &[&[&str]] = &[
        &["canonical-height", "--map", "X^2+1", "--point", "1"],
        &["preperiodic", "--map", "X^2-1", "--point", "0"],
        &["ramify", "--map", "X^3-3*X"],
        &["ramify", "--map", "X^2", "--point", "inf"],
        &["exceptional", "--map", "X^2"],
        &["classify", "--map", "3*(X-1)^2"],
        &["reduction", "--map", "X^2/3+5"],
        &["group", "saturate", "--group", "4,12"],
        &["group", "cosets", "--primes", "2,3", "--m", "2"],
        &["search", "g", "--map", "X^2", "--group", "2", "--height", "4"],
        &["search", "f", "--map", "X^2+1", "--group", "2,5", "--height", "4", "--nmax", "3"],
        &["zsigmondy", "--map", "X^2+1", "--point", "1", "--nmax", "5"],
        &["singulars", "--F", "X^3-X", "--m", "5"],
        &["curve-classify", "--map", "X^2+1", "--n", "1"],
        &["bound", "thm19", "--form", "T1 - 2*T2", "--map", "X^3+1"],
        &["bound", "n1", "--form", "T1 - 2*T2", "--map", "X^3+1", "--point", "1", "--cap", "5"],
    ];
    for args in runs {
        let o = orbitlab(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!lines(&o).is_empty(), "{args:?}");
    }
    let o = orbitlab(&["exceptional", "--map", "X^2"]);
    assert_eq!(lines(&o)[0]["exceptional"], serde_json::json!(["0", "inf"]));
    let o = orbitlab(&["curve-classify", "--map", "X^2+1", "--n", "1"]);
    assert_eq!(lines(&o)[0]["genus"], "6");
    let o = orbitlab(&["bound", "n1", "--form", "T1 - 2*T2", "--map", "X^3+1", "--point", "1", "--cap", "5"]);
    assert_eq!(lines(&o)[1]["tuples"], serde_json::json!([[1, 0]]));
}
