use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use zerosum_core::exact::ResultRecord;

fn zerosum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerosum"))
        .args(args)
        .env_remove("ZEROSUM_CACHE")
        .output()
        .expect("binary runs")
}

fn zerosum_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_zerosum"))
        .args(args)
        .env_remove("ZEROSUM_CACHE")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn record(args: &[&str]) -> ResultRecord {
    let mut full = args.to_vec();
    full.extend(["--format", "json-lines", "--no-cache"]);
    let o = zerosum(&full);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 1);
    serde_json::from_value(lines[0].clone()).unwrap()
}

#[test]
fn exact_values_of_small_groups() {
    let r = record(&["exact", "--group", "2,4", "--invariant", "D"]);
    assert_eq!((r.group.as_str(), r.invariant.as_str(), r.value), ("2,4", "D", 5));
    assert_eq!(r.certificate.len(), 4);

    let r = record(&["exact", "--group", "3,3", "--invariant", "s"]);
    assert_eq!(r.value, 9);

    let r = record(&["exact", "--group", "3", "--invariant", "Dm", "--m", "2"]);
    assert_eq!((r.m, r.value), (Some(2), 6));

    // moduli lists are canonicalized
    let r = record(&["exact", "--group", "4,2", "--invariant", "eta"]);
    assert_eq!(r.group, "2,4");
    let back = r.to_result().unwrap();
    assert_eq!(back.certificate.len() as u64 + 1, back.value);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&zerosum(&["exact", "--group", "2,0", "--invariant", "D"])), 1);
    assert_eq!(code(&zerosum(&["exact", "--group", "2", "--invariant", "Dm"])), 1);
    assert_eq!(code(&zerosum(&["exact", "--group", "2", "--invariant", "D", "--m", "2"])), 1);
    assert_eq!(code(&zerosum(&["exact", "--group", "2", "--invariant", "nope"])), 1);
    assert_eq!(code(&zerosum(&["no-such-command"])), 1);
    assert_eq!(code(&zerosum(&["--help"])), 0);

    let o = zerosum(&[
        "exact", "--group", "3,3,3", "--invariant", "D", "--exhaustive", "--max-nodes", "1000", "--no-cache",
    ]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("at least"), "{}", stderr(&o));
}

#[test]
fn cache_hits_reproduce_output() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let cache_str = cache.to_str().unwrap();
    let args = ["exact", "--group", "2,2,2", "--invariant", "s", "--cache", cache_str];

    let first = zerosum(&args);
    assert_eq!(code(&first), 0);
    assert!(!stderr(&first).contains("cache hit"));
    let second = zerosum(&args);
    assert_eq!(code(&second), 0);
    assert!(stderr(&second).contains("cache hit"));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(line_count(&cache), 1);

    // the environment variable names the same cache
    let o = Command::new(env!("CARGO_BIN_EXE_zerosum"))
        .args(["exact", "--group", "2,2,2", "--invariant", "s"])
        .env("ZEROSUM_CACHE", &cache)
        .output()
        .unwrap();
    assert!(stderr(&o).contains("cache hit"));
    assert_eq!(o.stdout, first.stdout);

    let o = zerosum(&["exact", "--group", "2,2,2", "--invariant", "s", "--cache", cache_str, "--no-cache"]);
    assert!(!stderr(&o).contains("cache hit"));

    // a damaged line is skipped with a warning
    std::fs::OpenOptions::new()
        .append(true)
        .open(&cache)
        .unwrap()
        .write_all(b"{truncated\n")
        .unwrap();
    let o = zerosum(&args);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
    assert_eq!(o.stdout, first.stdout);
}

fn line_count(p: &Path) -> usize {
    std::fs::read_to_string(p).unwrap().lines().count()
}

#[test]
fn output_formats() {
    let args = ["derive-a3"];
    let table = stdout(&zerosum(&args));
    assert!(table.starts_with("c3"));
    assert!(table.contains("20369"));

    let o = zerosum(&["derive-a3", "--format", "csv"]);
    assert_eq!(stdout(&o), "c3,s_coeff,eta_coeff,split_prime,last_small_prime\n20233.005,20370,20369,149,139\n");

    let rows = json_lines(&zerosum(&["derive-a3", "--c3", "20233.005", "--force-split", "139", "--format", "json-lines"]));
    assert_eq!(rows[0]["s_coeff"], 20380);
    assert_eq!(rows[0]["last_small_prime"], 137);
}

#[test]
fn bounds_and_main_bound() {
    let rows = json_lines(&zerosum(&["bounds", "--group", "2,2,2", "--format", "json-lines"]));
    let names: Vec<&str> = rows.iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"D*") && names.contains(&"rank3"), "{names:?}");
    let rank3 = rows.iter().find(|r| r["name"] == "rank3").unwrap();
    assert_eq!(rank3["value"], 20370);

    let rows = json_lines(&zerosum(&[
        "main-bound", "--n1", "2", "--n2", "4", "--n3", "8", "--format", "json-lines",
    ]));
    assert_eq!(rows[0]["bound"], 20378);
    assert_eq!(rows[0]["mode"], "proven");
    assert_eq!(rows[0]["rank3_wins"], false);

    let rows = json_lines(&zerosum(&[
        "main-bound", "--n1", "2", "--n2", "4", "--n3", "8", "--conjectural", "--format", "json-lines",
    ]));
    assert_eq!(rows[0]["bound"], 17);
    assert_eq!(rows[0]["mode"], "conjectural");

    assert_eq!(code(&zerosum(&["main-bound", "--n1", "2", "--n2", "3", "--n3", "6"])), 1);
}

#[test]
fn verification_replays_constants() {
    let o = zerosum(&["verify-paper", "--format", "json-lines"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rows = json_lines(&o);
    assert!(rows.len() >= 10);
    assert!(rows.iter().all(|r| r["status"] == "ok"), "{rows:?}");

    let o = zerosum(&["verify-paper", "--conjectural", "--format", "json-lines"]);
    assert_eq!(code(&o), 0);
    assert!(json_lines(&o).iter().any(|r| r["status"] == "conjectural"));

    let o = zerosum(&["verify-paper", "--a3", "8", "--format", "json-lines"]);
    assert_eq!(code(&o), 0);
    let rows = json_lines(&o);
    let bound = rows.iter().find(|r| r["item"] == "rank-3 bound for 2,2,2").unwrap();
    assert_eq!((bound["computed"].as_u64(), bound["status"].as_str()), (Some(9), Some("conjectural")));

    // starting the recursion from the plain value of c(2) still derives
    // coefficients, just larger ones
    let o = zerosum(&["verify-paper", "--c2", "6147", "--format", "json-lines"]);
    assert_eq!(code(&o), 0);
    let rows = json_lines(&o);
    assert!(rows.iter().any(|r| r["status"] == "informational"));
    let a3 = rows.iter().find(|r| r["item"] == "eta coefficient a3").unwrap();
    assert!(a3["computed"].as_u64().unwrap() > 20369);
}

#[test]
fn sweep_family_and_ranges() {
    let o = zerosum(&["sweep", "--group-family", "n,n,n", "--n", "2..3", "--no-cache", "--format", "json-lines"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = json_lines(&o);
    let groups: Vec<&str> = rows.iter().map(|r| r["group"].as_str().unwrap()).collect();
    assert_eq!(groups, ["2,2,2", "3,3,3"]);
    assert_eq!(rows[0]["corollary"], 4);
    assert_eq!(rows[1]["corollary"], 7);
    assert_eq!(rows[0]["exact_d"], 4);
    assert_eq!(rows[1]["exact_d"], 7);
    assert_eq!(rows[1]["window"], serde_json::json!([7, 17]));

    // empty range: header only
    let o = zerosum(&["sweep", "--group-family", "n,2n", "--n", "5..4", "--no-cache"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = zerosum(&["sweep", "--max-order", "8", "--no-exact", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    // 1, 2, 3, 4, 2,2, 5, 6, 7, 8, 2,4, 2,2,2 plus the header
    assert_eq!(stdout(&o).lines().count(), 12);

    let o = zerosum(&["sweep", "--max-n3", "8", "--no-exact", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().count(), 19);

    assert_eq!(code(&zerosum(&["sweep", "--group-family", "n,m", "--n", "2..3"])), 1);
    assert_eq!(code(&zerosum(&["sweep", "--group-family", "n", "--n", "two"])), 1);
    assert_eq!(code(&zerosum(&["sweep"])), 1);
}

#[test]
fn smooth_power_products() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ints.txt");
    std::fs::write(&input, "# smooth integers\n2\n{\"value\": \"3\"}\n\n6\n").unwrap();
    let o = zerosum(&["smooth", "--base", "2,3", input.to_str().unwrap(), "--format", "json-lines"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let row = &json_lines(&o)[0];
    assert_eq!(row["found"], true);
    assert_eq!(row["indices"], serde_json::json!([0, 1, 2]));
    assert_eq!(row["product"], "36");
    assert_eq!(row["root"], "6");
    assert_eq!(row["guaranteed_length"], 3);

    let o = zerosum_stdin(&["smooth", "--base", "2,3", "--n", "3", "--format", "json-lines"], "2\n3\n");
    assert_eq!(code(&o), 0);
    assert_eq!(json_lines(&o)[0]["found"], false);

    let o = zerosum_stdin(&["smooth", "--base", "2,3", "-"], "2\n7\n");
    assert_eq!(code(&o), 1);
    let o = zerosum_stdin(&["smooth", "--base", "2,3"], "2\nabc\n");
    assert_eq!(code(&o), 1);
}
