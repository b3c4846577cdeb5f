use std::io::Write;
use std::process::{Command, Output};

fn anticonc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anticonc"))
        .args(args)
        .env_remove("ANTICONC_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

fn ok(args: &[&str]) -> String {
    let o = anticonc(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn code(args: &[&str]) -> i32 {
    anticonc(args).status.code().unwrap()
}

#[test]
fn exact_point_mass() {
    let out = ok(&["exact", "--w", "1,-1,0", "--v", "1,2,3", "--point", "1"]);
    assert_eq!(field(&out, "value"), Some("1/3"));
    assert!(out.starts_with("# anticonc "));
}

#[test]
fn exact_full_table_of_constant_w() {
    let out = ok(&["--format", "csv", "exact", "--w", "1,1", "--v", "3,5", "--full"]);
    let body: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, ["value,probability,probability_f64", "8,1,1"]);
}

#[test]
fn exact_interval_and_concentration() {
    let out = ok(&["exact", "--w", "0,1,2", "--v", "0,1,2", "--interval", "1:3"]);
    assert_eq!(field(&out, "value"), Some("1/2"));
    let out = ok(&["exact", "--w", "0,1,2", "--v", "0,1,2", "--q", "1"]);
    assert_eq!(field(&out, "value"), Some("1/2"));
}

#[test]
fn vectors_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    let mut f = std::fs::File::create(&w).unwrap();
    writeln!(f, "# weights\n1\n-1\n0").unwrap();
    let arg = format!("@{}", w.display());
    let out = ok(&["exact", "--w", &arg, "--v", "1,2,3", "--point", "1"]);
    assert_eq!(field(&out, "value"), Some("1/3"));
}

#[test]
fn exit_codes() {
    // bad input
    assert_eq!(code(&["exact", "--w", "1,2", "--v", "1,2,3", "--point", "0"]), 2);
    assert_eq!(code(&["exact", "--w", "1,x", "--v", "1,2", "--point", "0"]), 2);
    assert_eq!(code(&["mc", "--w", "1,2", "--v", "1,2", "--point", "3", "--samples", "0"]), 2);
    assert_eq!(code(&["mc", "--w", "1,2", "--v", "1,2", "--full"]), 2);
    assert_eq!(code(&["bounds", "--statement", "sigma", "--w", "0,0,0", "--v", "1,2,3"]), 2);
    assert_eq!(code(&["bounds", "--statement", "bogus"]), 2);
    assert_eq!(code(&["bounds", "--statement", "width", "--n", "4", "--k", "2"]), 2);
    assert_eq!(code(&["sweep", "--config", "/definitely/missing.toml"]), 2);
    assert_eq!(code(&["exact", "--w", "1"]), 2);
    // resource caps
    let thirteen = (1..=13).map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    assert_eq!(code(&["exact", "--w", &thirteen, "--v", &thirteen, "--point", "0"]), 3);
    assert_eq!(code(&["width", "--n", "20", "--k", "10", "--oracle"]), 3);
}

#[test]
fn precondition_failure_still_prints_report() {
    let o = anticonc(&["bounds", "--statement", "sigma", "--w", "0,0,0", "--v", "1,2,3"]);
    let out = stdout(&o);
    assert_eq!(field(&out, "value"), Some("inf"));
    assert_eq!(field(&out, "preconditions_ok"), Some("false"));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: kind=precondition"));
}

#[test]
fn mc_is_identical_across_thread_counts() {
    let base = ["mc", "--w", "1,-1,0,2,5", "--v", "1,2,3,4,5", "--interval", "0:10", "--samples", "20000", "--seed", "7"];
    let one = ok(&[&base[..], &["--threads", "1"]].concat());
    let four = ok(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
    assert_eq!(field(&one, "seed"), Some("7"));
}

#[test]
fn pawlowski_statement() {
    let out = ok(&["bounds", "--statement", "pawlowski", "--w", "0,0,1,1", "--v", "1,2,3,4"]);
    assert_eq!(field(&out, "bound"), Some("1/3"));
    assert_eq!(field(&out, "max_mass"), Some("1/3"));
    assert_eq!(field(&out, "satisfied"), Some("true"));
}

#[test]
fn main_statement_optimized_and_explicit() {
    let out = ok(&["bounds", "--statement", "main", "--w", "1,2,3,4", "--v", "1,2,3,4", "--optimize", "--len-I", "1"]);
    assert_eq!(field(&out, "optimized"), Some("true"));
    let best: f64 = field(&out, "value_f64").unwrap().parse().unwrap();
    let explicit = ok(&["bounds", "--statement", "main", "--w", "1,2,3,4", "--v", "1,2,3,4", "--i1", "1", "--i2", "1", "--len-I", "1"]);
    let other: f64 = field(&explicit, "value_f64").unwrap().parse().unwrap();
    assert!(best <= other);
}

#[test]
fn lemma_and_soze_statements() {
    let out = ok(&["bounds", "--statement", "lemma-with", "--n", "4", "--k", "4"]);
    assert_eq!(field(&out, "value"), Some("1/8"));
    let out = ok(&["bounds", "--statement", "soze", "--w", "1,2,3,4,5,6", "--L", "0,1", "--samples", "5000"]);
    assert!(field(&out, "estimate[L=0]").is_some());
    assert_eq!(field(&out, "envelope"), Some("1/6"));
}

#[test]
fn width_with_oracle() {
    let out = ok(&["width", "--n", "4", "--k", "2", "--oracle"]);
    assert_eq!(field(&out, "stanley_width"), Some("2"));
    assert_eq!(field(&out, "dilworth_width"), Some("2"));
    assert_eq!(field(&out, "agree"), Some("true"));
}

#[test]
fn search_small_instance() {
    let out = ok(&["search", "--n", "3", "--coord-bound", "2"]);
    assert_eq!(field(&out, "value"), Some("1/3"));
    assert_eq!(field(&out, "mode"), Some("exhaustive"));
}

#[test]
fn sweep_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        "statement = \"pawlowski\"\nseed = 1\nn_min = 3\nn_max = 4\n\n[generator]\nkind = \"grid\"\nw_min = -1\nw_max = 1\n",
    )
    .unwrap();
    let out = ok(&["sweep", "--config", cfg.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert!(out.contains("pass=true"), "{out}");
    let written = std::fs::read_to_string(&csv).unwrap();
    assert!(written.lines().any(|l| l.starts_with("statement,n,")));
}
