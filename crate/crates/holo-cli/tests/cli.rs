use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use holo_cli::{RunConfig, Target};
use serde_json::Value;

fn holo(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holo"))
        .args(args)
        .current_dir(dir)
        .env_remove("HOLOTORUS_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn strip_wall_time(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_time");
            m.values_mut().for_each(strip_wall_time);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}

const ZERO_BY_TYPE: &str = r#"
schema_version = 1
target = "graph-int"

[graph-int]
lattice = { kind = "square", n = 1, scale = 1.0 }
graph = { kind = "banana", edges = 3 }
fake_distances = [{ r0 = 0.2, r1 = 0.4, plateau = 0.25 }]
strategy = { kind = "monte-carlo", samples = 1000 }
"#;

const BANANA: &str = r#"
schema_version = 1
target = "graph-int"

[graph-int]
lattice = { kind = "square", n = 2, scale = 1.0 }
graph = { kind = "banana", edges = 4 }
fake_distances = [{ r0 = 0.2, r1 = 0.4, plateau = 0.25 }]
schedule = { eps_max = 0.05, ratio = 0.5, count = 4 }
strategy = { kind = "monte-carlo", samples = 1500 }
"#;

#[test]
fn pv_builtin_corpus_matches_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = holo(&["pv", "--out-dir", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("o/pv.json"));
    assert_eq!(report["flags"], Value::Array(vec![]));
    let cases = report["results"].as_array().unwrap();
    assert_eq!(cases.len(), 6);
    assert!(cases.iter().all(|c| c["pass"] == Value::Bool(true)));
    let analytic = cases.iter().filter(|c| c["source"] == "analytic").count();
    assert_eq!(analytic, 4);
    let csv = std::fs::read_to_string(dir.path().join("o/pv.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn zero_by_type_graph_reports_zero_with_one_note() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "z.toml", ZERO_BY_TYPE);
    let out = holo(&["graph-int", "--config", cfg.to_str().unwrap(), "--out-dir", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let notes: Vec<&str> = stdout.lines().filter(|l| l.starts_with("note:")).collect();
    assert_eq!(notes.len(), 1, "{stdout}");
    assert!(notes[0].contains("zero-by-type"));
    let report = read_json(&dir.path().join("o/graph-int.json"));
    assert_eq!(report["results"]["value"], serde_json::json!([0.0, 0.0]));
    assert_eq!(report["results"]["verdict"], "zero-by-type");
}

#[test]
fn same_config_and_seed_give_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "b.toml", BANANA);
    let cfg = cfg.to_str().unwrap();
    let runs: Vec<Value> = [("a", "1"), ("b", "2"), ("c", "1")]
        .iter()
        .map(|(out, threads)| {
            let o = holo(&["graph-int", "--config", cfg, "--seed", "11", "--out-dir", out, "--threads", threads], dir.path());
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
            let mut v = read_json(&dir.path().join(out).join("graph-int.json"));
            strip_wall_time(&mut v);
            v
        })
        .collect();
    assert_eq!(serde_json::to_string(&runs[0]).unwrap(), serde_json::to_string(&runs[1]).unwrap());
    assert_eq!(serde_json::to_string(&runs[0]).unwrap(), serde_json::to_string(&runs[2]).unwrap());
    let o = holo(&["graph-int", "--config", cfg, "--seed", "12", "--out-dir", "d"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let mut other = read_json(&dir.path().join("d/graph-int.json"));
    strip_wall_time(&mut other);
    assert_eq!(other["config_hash"], runs[0]["config_hash"]);
    assert_eq!(other["seed"], 12);
    assert_eq!(other["results"]["metadata"]["seed"], 12);
}

#[test]
fn heat_tables_depend_only_on_config_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str, seed: &str| {
        let o = holo(&["heat", "--seed", seed, "--out-dir", out], dir.path());
        assert_eq!(o.status.code(), Some(0));
        let mut v = read_json(&dir.path().join(out).join("heat.json"));
        strip_wall_time(&mut v);
        v
    };
    let (a, b, c) = (run("a", "4"), run("b", "4"), run("c", "5"));
    assert_eq!(a, b);
    assert_ne!(a["results"]["rows"], c["results"]["rows"]);
    assert_eq!(a["results"]["rows"].as_array().unwrap().len(), 80);
}

#[test]
fn flagged_check_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "h.toml",
        "schema_version = 1\ntarget = \"heat\"\n[heat]\ntimes = [0.2]\npairs = 2\nmass_times = [0.1]\nmass_grid = 8\nmass_tolerance = 1e-300\n",
    );
    let out = holo(&["heat", "--config", cfg.to_str().unwrap(), "--out-dir", "o"], dir.path());
    assert_eq!(out.status.code(), Some(holo_cli::EXIT_FLAGGED));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FLAGGED: heat mass"));
    let report = read_json(&dir.path().join("o/heat.json"));
    assert_eq!(report["flags"].as_array().unwrap().len(), 1);
}

#[test]
fn schema_violations_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown-top", "schema_version = 1\ntarget = \"pv\"\ncolour = 3\n", "pv"),
        ("unknown-block-key", "schema_version = 1\ntarget = \"pv\"\n[pv]\nrandom_count = 3\n", "pv"),
        ("version", "schema_version = 2\ntarget = \"pv\"\n", "pv"),
        ("mismatch", "schema_version = 1\ntarget = \"heat\"\n", "pv"),
        ("foreign-block", "schema_version = 1\ntarget = \"pv\"\n[heat]\npairs = 1\n", "pv"),
        ("bad-lattice", "schema_version = 1\ntarget = \"heat\"\n[heat]\nlattice = { kind = \"square\", n = 0, scale = 1.0 }\n", "heat"),
    ];
    for (name, text, cmd) in cases {
        let cfg = write(dir.path(), &format!("{name}.toml"), text);
        let out = holo(&[cmd, "--config", cfg.to_str().unwrap(), "--out-dir", "o"], dir.path());
        assert_eq!(out.status.code(), Some(holo_cli::EXIT_CONFIG), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn config_hash_ignores_seed_and_output_but_not_parameters() {
    let base = RunConfig::parse("schema_version = 1\ntarget = \"heat\"\n").unwrap();
    let explicit = RunConfig::parse(
        "schema_version = 1\ntarget = \"heat\"\nseed = 9\n[output]\ndir = \"x\"\n[heat]\npairs = 20\n",
    )
    .unwrap();
    assert_eq!(base.hash(), explicit.hash());
    let changed = RunConfig::parse("schema_version = 1\ntarget = \"heat\"\n[heat]\npairs = 21\n").unwrap();
    assert_ne!(base.hash(), changed.hash());
    assert_eq!(base.hash().len(), 64);
    assert_eq!(RunConfig::default_for(Target::Heat).hash(), base.hash());
}

#[test]
fn prop_cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "p.toml",
        "schema_version = 1\ntarget = \"prop\"\n[prop]\nsamples = 4\nresidue_check = false\nweak_check = false\n",
    );
    let cfg = cfg.to_str().unwrap();
    let first = holo(&["prop", "--config", cfg, "--cache-dir", "cache", "--out-dir", "a"], dir.path());
    assert_eq!(first.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(dir.path().join("cache")).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = Command::new(env!("CARGO_BIN_EXE_holo"))
        .args(["prop", "--config", cfg, "--out-dir", "b"])
        .current_dir(dir.path())
        .env("HOLOTORUS_CACHE_DIR", dir.path().join("cache"))
        .output()
        .unwrap();
    assert_eq!(second.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache: 4 entries"));
    let mut a = read_json(&dir.path().join("a/prop.json"));
    let mut b = read_json(&dir.path().join("b/prop.json"));
    strip_wall_time(&mut a);
    strip_wall_time(&mut b);
    assert_eq!(a, b);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            RunConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            count += 1;
        }
    }
    assert!(count >= 5);
}

#[test]
fn jets_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "j.toml", "schema_version = 1\ntarget = \"jets\"\n[jets]\nn_max = 1\nmetrics = 1\n");
    let out = holo(&["jets", "--config", cfg.to_str().unwrap(), "--out-dir", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("o/jets.json"));
    let checks = report["results"].as_array().unwrap();
    assert!(checks.len() >= 9);
    assert!(checks.iter().all(|c| c["pass"] == Value::Bool(true)));
}
