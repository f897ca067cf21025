use std::path::Path;
use std::process::{Command, Output};

use qwm_qaoa::driver::RunReport;
use qwm_qaoa::KnapsackInstance;

fn qwmq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwmq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ingest_fixture_writes_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s4.json");
    let text = stdout(&qwmq(&[
        "ingest",
        "--fixture",
        "stocks4",
        "--out",
        path_str(&out),
    ]));
    assert!(text.contains("capacity: 2"));
    let inst: KnapsackInstance =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(inst.values, vec![0.2430, 0.2602, 0.1047, 0.2430]);
    assert_eq!(inst.capacity, 2);

    let text = stdout(&qwmq(&[
        "ingest",
        "--fixture",
        "stocks8",
        "--out",
        path_str(&out),
    ]));
    assert!(text.contains("qubits: 15"));
}

#[test]
fn ingest_prices_round_trips_through_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("prices.csv");
    std::fs::write(
        &csv,
        "date,AAA,BBB,CCC\n2020-01-02,10,20,30\n2020-01-03,11,19,30\n2020-01-06,12,19,33\n",
    )
    .unwrap();
    let inst_path = dir.path().join("inst.json");
    let text = stdout(&qwmq(&[
        "ingest",
        "--prices",
        path_str(&csv),
        "--tickers",
        "CCC,AAA",
        "--start",
        "2020-01-01",
        "--out",
        path_str(&inst_path),
    ]));
    assert!(text.contains("items: 2"));
    let text = stdout(&qwmq(&["bks", "--instance", path_str(&inst_path)]));
    assert!(text.contains("bits: 01"), "{text}");
}

#[test]
fn bad_inputs_exit_with_two() {
    let o = qwmq(&[
        "ingest",
        "--prices",
        "/no/such/prices.csv",
        "--tickers",
        "MSFT",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/prices.csv"));
    assert!(o.stdout.is_empty());

    assert_eq!(
        qwmq(&["bks", "--fixture", "stocks9"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qwmq(&["solve", "--fixture", "stocks2", "--budget", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bks_reports_optimum() {
    let text = stdout(&qwmq(&["bks", "--fixture", "stocks2"]));
    assert!(text.contains("bits: 01\n"));
    assert!(text.contains("value: 0.2602"));
    assert!(text.contains("verified"));
    let text = stdout(&qwmq(&["bks", "--fixture", "stocks6"]));
    assert!(text.contains("value: 0.9235"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(
        &path,
        r#"{"values":[0.3,0.2],"weights":[1,1],"capacity":0}"#,
    )
    .unwrap();
    let text = stdout(&qwmq(&["bks", "--instance", path_str(&path)]));
    assert!(text.contains("bits: 00\n"));
}

fn solve(fixture: &str, p: &str) -> RunReport {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let text = stdout(&qwmq(&[
        "solve",
        "--fixture",
        fixture,
        "--p",
        p,
        "--m",
        "3",
        "--out",
        path_str(&out),
    ]));
    assert!(text.contains("ratio_best:") && text.contains("best:"));
    serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap()
}

#[test]
fn solve_three_stocks_is_exact() {
    let r = solve("stocks3", "3");
    assert_eq!(r.best_feasible.bits.to_string(), "010");
    assert!((r.ratio_best.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn solve_seven_stocks_reaches_floor() {
    let r = solve("stocks7", "3");
    assert!(
        r.ratio_best.unwrap() >= 0.95,
        "ratio_best {}",
        r.ratio_best.unwrap()
    );
}

#[test]
fn solve_four_stocks_single_layer() {
    let r = solve("stocks4", "1");
    assert!(
        r.ratio_best.unwrap() >= 0.72,
        "ratio_best {}",
        r.ratio_best.unwrap()
    );
}

#[test]
fn sweep_shapes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    stdout(&qwmq(&[
        "sweep",
        "--axis",
        "p",
        "--range",
        "1..5",
        "--out",
        path_str(&out),
    ]));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "instance,axis,value,ratio_best,ratio_expectation,wall_ms"
    );
    assert_eq!(lines.len(), 36);
    assert!(lines[1].starts_with("stocks2,p,1,"));
    assert!(lines[35].starts_with("stocks8,p,5,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",0")));

    let table = stdout(&qwmq(&["report", path_str(&out)]));
    assert_eq!(table.lines().count(), 36);

    let m_sweep = stdout(&qwmq(&[
        "sweep",
        "--fixture",
        "stocks3",
        "--axis",
        "m",
        "--range",
        "1..5",
    ]));
    assert_eq!(m_sweep.lines().count(), 6);
    assert!(m_sweep.lines().nth(5).unwrap().starts_with("stocks3,m,5,"));
}

#[test]
fn report_summarizes_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    stdout(&qwmq(&[
        "solve",
        "--fixture",
        "stocks2",
        "--p",
        "1",
        "--out",
        path_str(&out),
    ]));
    let text = stdout(&qwmq(&["report", path_str(&out)]));
    assert!(text.contains("layer 1: gamma"));
    assert!(text.contains("optimum     01"));

    let junk = dir.path().join("junk.txt");
    std::fs::write(&junk, "hello").unwrap();
    assert_eq!(qwmq(&["report", path_str(&junk)]).status.code(), Some(2));
}

#[test]
fn solve_without_out_keeps_stdout_json() {
    let o = qwmq(&[
        "solve",
        "--fixture",
        "stocks2",
        "--p",
        "1",
        "--budget",
        "20",
        "--shots",
        "1000",
    ]);
    let report: RunReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.shots, 1000);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ratio_best"));
}
