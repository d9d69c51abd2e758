use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn stakeless(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stakeless")).args(args).env_remove("STAKELESS_THREADS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

/// CSV text without the `# manifest` line.
fn body(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap().lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn synth(dir: &TempDir, name: &str, seasons: usize, seed: u64) -> String {
    let out = path(dir, name);
    let o = stakeless(&["synth", "--out", &out, "--seasons", &seasons.to_string(), "--seed", &seed.to_string()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

fn kv(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.split_once('=').filter(|(k, _)| k.trim() == key).map(|(_, v)| v.trim().parse().unwrap()))
        .unwrap_or_else(|| panic!("{key} missing"))
}

#[test]
fn synth_mirrors_corpus_size_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = synth(&dir, "a.csv", 17, 5);
    let b = synth(&dir, "b.csv", 17, 5);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 1 + 1632);
    let goalless = text.lines().filter(|l| l.ends_with(",0,0")).count() as f64;
    assert!((goalless - 103.0).abs() <= 3.0 * 9.8, "{goalless} goalless draws");
    assert!(Path::new(&format!("{a}.manifest.json")).exists());
}

#[test]
fn fit_recovers_the_generating_parameters() {
    let dir = TempDir::new().unwrap();
    let data = synth(&dir, "big.csv", 209, 11);
    let out = path(&dir, "fit");
    let o = stakeless(&["fit", "--data", &data, "--family", "4p-pot", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let params = std::fs::read_to_string(dir.path().join("fit/params.txt")).unwrap();
    assert!((kv(&params, "alpha_h") - 0.424).abs() <= 0.02, "{params}");
    assert!((kv(&params, "beta_a") + 0.175).abs() <= 0.02, "{params}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit/fit.json")).unwrap()).unwrap();
    assert_eq!(report["manifest"]["command"], "fit");
    assert_eq!(report["fit"]["converged"], true);
}

#[test]
fn fit_bootstrap_reports_intervals() {
    let dir = TempDir::new().unwrap();
    let data = synth(&dir, "d.csv", 17, 3);
    let out = path(&dir, "fit");
    let o = stakeless(&["fit", "--data", &data, "--family", "4p-pot", "--bootstrap", "200", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let params = std::fs::read_to_string(dir.path().join("fit/params.txt")).unwrap();
    for name in ["alpha_h", "alpha_a", "beta_h", "beta_a"] {
        let (lo, hi) = (kv(&params, &format!("{name}_ci_lower")), kv(&params, &format!("{name}_ci_upper")));
        let v = kv(&params, name);
        assert!(lo < v && v < hi, "{name}: {lo} {v} {hi}");
    }
}

#[test]
fn fit_exit_codes() {
    let dir = TempDir::new().unwrap();
    let data = synth(&dir, "d.csv", 17, 3);
    let text = std::fs::read_to_string(&data).unwrap();

    let bad = path(&dir, "bad.csv");
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let fields: Vec<&str> = lines[10].split(',').collect();
    lines[10] = [&fields[..3], &["5"], &fields[4..]].concat().join(",");
    std::fs::write(&bad, lines.join("\n") + "\n").unwrap();
    let o = stakeless(&["fit", "--data", &bad, "--family", "4p-pot", "--out", &path(&dir, "x")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 11"), "{}", stderr(&o));

    let few = path(&dir, "few.csv");
    std::fs::write(&few, text.lines().take(41).collect::<Vec<_>>().join("\n") + "\n").unwrap();
    let o = stakeless(&["fit", "--data", &few, "--family", "4p-pot", "--out", &path(&dir, "x")]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));

    let o =
        stakeless(&["fit", "--data", &data, "--family", "4p-pot", "--tolerance", "1e-300", "--out", &path(&dir, "x")]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));

    let o = stakeless(&["fit", "--data", &path(&dir, "missing.csv"), "--family", "4p-pot"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn evaluate_reports_model_and_baseline() {
    let dir = TempDir::new().unwrap();
    let data = synth(&dir, "d.csv", 17, 4);
    let out = path(&dir, "fit");
    assert_eq!(code(&stakeless(&["fit", "--data", &data, "--family", "4p-pot", "--out", &out])), 0);
    let params = path(&dir, "fit/params.txt");
    let metrics = path(&dir, "metrics.json");
    let o = stakeless(&["evaluate", "--data", &data, "--params", &params, "--out", &metrics]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&metrics).unwrap()).unwrap();
    assert_eq!(m["manifest"]["command"], "evaluate");
    assert_eq!(m["model"]["hit_probability"]["per_group"].as_array().unwrap().len(), 17);
    let model = m["model"]["hit_probability"]["pooled"].as_f64().unwrap();
    let base = m["baseline"]["hit_probability"]["pooled"].as_f64().unwrap();
    assert!(model > 0.0 && base > 0.0);
    assert!(
        m["model"]["score_and_outcome_distance"]["pooled"].as_f64().unwrap()
            >= m["model"]["score_distance"]["pooled"].as_f64().unwrap()
    );

    let o = stakeless(&["evaluate", "--data", &data, "--params", &params, "--pi", "0.4", "--out", &metrics]);
    assert_eq!(code(&o), 2);
}

#[test]
fn simulate_subset_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let run = |out: &str, threads: &str| {
        let o =
            stakeless(&["simulate", "--runs", "1000", "--schedules", "4112,4113", "--threads", threads, "--out", out]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    };
    let (a, b) = (path(&dir, "a"), path(&dir, "b"));
    run(&a, "1");
    run(&b, "3");
    for f in ["report.csv", "cost_curve.csv"] {
        assert_eq!(body(&dir.path().join("a").join(f)), body(&dir.path().join("b").join(f)), "{f}");
    }
    let csv = body(&dir.path().join("a/report.csv"));
    assert_eq!(csv.lines().count(), 3);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a/report.json")).unwrap()).unwrap();
    assert_eq!(report["manifest"]["seed"], 42);
    assert_eq!(report["report"]["rows"].as_array().unwrap().len(), 2);
    // Standard errors at 1000 runs are about 30 times those at 10^6.
    assert!(report["report"]["rows"][0]["se_weak_md6"].as_f64().unwrap() > 0.01);
    let first = std::fs::read_to_string(dir.path().join("a/cost_curve.csv")).unwrap();
    assert!(first.starts_with("# manifest: "));
    assert_eq!(first.lines().nth(1), Some("schedule,r,cost"));
}

#[test]
fn simulate_rejects_unknown_schedule() {
    let o = stakeless(&["simulate", "--runs", "10", "--schedules", "4112,9999"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("4113"), "{}", stderr(&o));
}

#[test]
fn threads_come_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s");
    let o = Command::new(env!("CARGO_BIN_EXE_stakeless"))
        .args(["simulate", "--runs", "200", "--schedules", "1231", "--out", &out])
        .env("STAKELESS_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

const AFTER_MD5: &str = "\
# group after five matchdays
MD1: 1-3 1:5, 4-2 1:2
MD2: 2-1 1:0, 3-4 2:0
MD3: 3-2 4:0, 4-1 1:4
MD4: 2-3 1:3, 1-4 4:0
MD5: 1-2 3:1, 4-3 1:2
MD6: 3-1, 2-4
";

#[test]
fn classify_decided_group() {
    let dir = TempDir::new().unwrap();
    let state = path(&dir, "state.txt");
    std::fs::write(&state, AFTER_MD5).unwrap();
    let out = path(&dir, "c.json");
    let o = stakeless(&["classify", "--state", &state, "--oracle", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("MD6 3-1  strongly stakeless"), "{text}");
    assert!(text.contains("MD6 2-4  strongly stakeless"), "{text}");
    assert!(text.contains("oracle agrees"));
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(j["outputs"]["positions"], serde_json::json!(["2", "3", "1", "4"]));
}

#[test]
fn classify_after_three_matchdays_is_all_open() {
    let dir = TempDir::new().unwrap();
    let state = path(&dir, "state.txt");
    std::fs::write(&state, "MD1: 1-2 5:0, 3-4 5:0\nMD2: 1-3 5:0, 2-4 5:0\nMD3: 1-4 5:0, 2-3 5:0\n").unwrap();
    let o = stakeless(&["classify", "--state", &state]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("1: open  2: open  3: open  4: open"), "{}", stdout(&o));
}

#[test]
fn classify_rejects_inconsistent_state() {
    let dir = TempDir::new().unwrap();
    let state = path(&dir, "state.txt");
    std::fs::write(&state, "MD1: 1-2 1:0, 3-4 0:0\nMD2: 1-2 2:2\n").unwrap();
    let o = stakeless(&["classify", "--state", &state]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("listed twice"), "{}", stderr(&o));
}

#[test]
fn classify_random_states_agree_with_oracle() {
    for rule in ["head-to-head", "goal-difference"] {
        let o = stakeless(&["classify", "--random", "500", "--rule", rule, "--seed", "9"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert!(stdout(&o).contains("after matchday 4: 0"));
        assert!(stdout(&o).contains("after matchday 5: 0"));
    }
}
