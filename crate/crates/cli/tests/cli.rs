use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betawalk"))
        .args(args.split_whitespace())
        .env_remove("BETAWALK_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

#[test]
fn verify_master_exact_range() {
    let out = run("verify master --n 1..4 --coeffs 1/3,1/3,1/3 --p 1/2 --format json");
    assert_eq!(code(&out), 0);
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 4);
    for r in &recs {
        assert_eq!(r["status"], "ok");
        assert_eq!(r["payload"]["verified"], true);
        assert!(r["payload"].get("elapsedSeconds").is_none());
    }
    assert_eq!(recs[1]["payload"]["lhs"]["coeff"], "5/72");
    assert_eq!(recs[3]["payload"]["rhs"]["coeff"], "2485/93312");
}

#[test]
fn verify_master_float_mode() {
    let out = run("verify master --n 2 --coeffs 1,2 --p 0.7 --mode float --format json");
    assert_eq!(code(&out), 0);
    let rec = &json_lines(&out)[0];
    assert_eq!(rec["payload"]["passed"], true);
    assert!(rec["payload"]["relDiff"].as_f64().unwrap() < 1e-12);
}

#[test]
fn verify_master_k_range_defaults_to_walk_weights() {
    let out = run("verify master --n 2 --k 1..3 --format csv");
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "command,status,n,coeffs,p,mode,lhs,rhs,verified");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].contains(",5/72,5/72,true"), "{}", lines[3]);
}

#[test]
fn usage_errors_exit_2_with_empty_stdout() {
    for args in [
        "verify master --p 0",
        "verify master --p 1/3",
        "verify master --n 0",
        "verify master --coeffs 1,-1",
        "verify master --p 0.5",
        "compute return-prob --dim 2 --steps 3",
        "oracle --dim 3 --steps 20",
        "simulate walk --trials 0",
        "catalog verify no-such",
        "series402 --variant bogus",
        "no-such-command",
        "--threads 0 compute moment --n 1",
    ] {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args}");
        assert!(out.stdout.is_empty(), "{args}");
        assert!(!out.stderr.is_empty(), "{args}");
    }
}

#[test]
fn budget_refusal_states_requirement() {
    let out = run("oracle --dim 3 --steps 20");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("3656158440062976"), "{err}");
}

#[test]
fn compute_values() {
    let cases = [
        ("compute return-prob --dim 2 --steps 10", "exact=3969/65536 decimal=0.0605621337890625"),
        ("compute return-prob --dim 1 --steps 4", "exact=3/8 decimal=0.375"),
        ("compute return-prob --dim 3 --steps 4", "exact=5/72 decimal=0.0694444444444444"),
        ("compute return-prob --dim 3 --steps 3 --allow-odd", "exact=0/1"),
        ("compute moment --n 3 --p 1", "exact=1/7"),
        ("compute moment --n 2 --p 3/2", "exact=1/8"),
        ("compute path-count --dim 3 --steps 4", "count=90 totalPaths=1296"),
    ];
    for (args, expect) in cases {
        let out = run(args);
        assert_eq!(code(&out), 0, "{args}");
        assert!(stdout(&out).contains(expect), "{args}: {}", stdout(&out));
    }
}

#[test]
fn oracle_matches() {
    let out = run("oracle --dim 2 --steps 4 --format json");
    assert_eq!(code(&out), 0);
    let rec = &json_lines(&out)[0];
    assert_eq!(rec["payload"]["count"], "36");
    assert_eq!(rec["payload"]["totalPaths"], "256");
    assert_eq!(rec["payload"]["matches"], true);
    let out = run("oracle --dim 1 --steps 4");
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("count=6 totalPaths=16"));
}

#[test]
fn simulation_is_reproducible() {
    let args = "simulate walk --dim 2 --n 5 --trials 200000 --seed 7 --threads 3 --format json";
    let a = run(args);
    let b = run(args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let rec = &json_lines(&a)[0];
    assert_eq!(rec["payload"]["exactReference"]["exact"], "3969/65536");
    assert_eq!(rec["payload"]["workers"], 3);
    assert_eq!(rec["parameters"]["threads"], "3");

    let out = run("simulate beta --dim 1 --n 1 --trials 1000000 --seed 1 --threads 2 --format json");
    assert_eq!(code(&out), 0);
    let est = json_lines(&out)[0]["payload"]["estimate"].as_f64().unwrap();
    assert!((est - 0.5).abs() < 0.005);
}

#[test]
fn threads_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_betawalk"))
        .args(["simulate", "walk", "--trials", "1000", "--format", "json"])
        .env("BETAWALK_THREADS", "5")
        .output()
        .unwrap();
    assert_eq!(json_lines(&out)[0]["payload"]["workers"], 5);
}

#[test]
fn statistical_failure_exits_3() {
    // one trial of a 2-step walk either always or never hits, far from 1/2 in z terms
    let mut seen_3 = false;
    for seed in 0..20 {
        let out = run(&format!("simulate walk --dim 1 --n 1 --trials 1 --seed {seed} --threads 1"));
        let c = code(&out);
        assert!(c == 0 || c == 3);
        seen_3 |= c == 3;
    }
    assert!(seen_3);
}

#[test]
fn catalog_commands() {
    let out = run("catalog verify vandermonde --format json");
    assert_eq!(code(&out), 0);
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 100);
    assert!(recs.iter().all(|r| r["payload"]["verified"] == true));

    let out = run("catalog verify k-dim-remark --format json");
    assert_eq!(code(&out), 0);
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("ERRATUM"));
    assert!(err.contains("lhs = 17/1, rhs = 2/1"), "{err}");
    let first = &json_lines(&out)[0];
    assert_eq!(first["payload"]["printedForm"]["holds"], false);

    let out = run("catalog list --format json");
    assert_eq!(code(&out), 0);
    assert_eq!(json_lines(&out).len(), 8);
    assert!(String::from_utf8(out.stderr).unwrap().contains("ERRATUM"));
}

#[test]
fn catalog_verify_all_is_stable_across_thread_counts() {
    let a = run("catalog verify all --threads 1 --format csv");
    let b = run("catalog verify all --threads 4 --format csv");
    assert_eq!(code(&a), 0);
    let strip = |o: &Output| stdout(o).replace("threads=1", "").replace("threads=4", "");
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn series_command_reports_all_variants() {
    let out = run("series402 --n 0 --format json");
    assert_eq!(code(&out), 0);
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 3);
    assert_eq!(recs[0]["payload"]["outcome"], "diverged");
    assert_eq!(recs[0]["payload"]["exactTerms"][1], "1/3");
    assert_eq!(recs[1]["payload"]["matchesTarget"], true);
    assert_eq!(recs[2]["payload"]["matchesTarget"], false);

    let out = run("series402 --n 2 --variant overKFactorial --max-terms 50 --format csv");
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("command,status,variant,n,termsEvaluated,outcome"));
}

#[test]
fn timing_is_opt_in() {
    let out = run("verify equal-coeff --n 2 --k 2 --format json --timing");
    assert!(json_lines(&out)[0]["payload"]["elapsedSeconds"].is_number());
    let a = run("verify equal-coeff --n 1..3 --k 1..3 --format json");
    let b = run("verify equal-coeff --n 1..3 --k 1..3 --format json");
    assert_eq!(a.stdout, b.stdout);
}
