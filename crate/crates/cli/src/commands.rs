use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use qwm_qaoa::driver::{run, OptimizeOptions, RunConfig, RunReport};
use qwm_qaoa::knapsack::BRUTE_FORCE_MAX_ITEMS;
use qwm_qaoa::{solve_brute_force, solve_dp, KnapsackInstance, RegisterLayout};

use crate::source::Named;
use crate::{Axis, RunArgs, SourceArgs};

const SWEEP_HEADER: &str = "instance,axis,value,ratio_best,ratio_expectation,wall_ms";

/// Largest item count for which `bks` cross-checks the DP by enumeration.
const VERIFY_MAX_ITEMS: usize = 20;

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Summary lines go to stdout when the payload goes to a file, otherwise to
/// stderr so stdout stays machine-readable.
fn note(to_stdout: bool, line: &str) {
    if to_stdout {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn fmt_ratio(r: Option<f64>) -> String {
    r.map_or_else(|| "NA".into(), |v| format!("{v:.6}"))
}

pub fn ingest(source: &SourceArgs, out: Option<&Path>) -> Result<()> {
    let Named { instance, .. } = source.load()?;
    let layout = RegisterLayout::for_instance(&instance);
    let json = serde_json::to_string_pretty(&instance)? + "\n";
    emit(out, &json)?;
    let s = out.is_some();
    note(s, &format!("items: {}", instance.len()));
    note(s, &format!("capacity: {}", instance.capacity));
    note(s, &format!("qubits: {}", layout.n_qubits()));
    Ok(())
}

pub fn bks(source: &SourceArgs) -> Result<()> {
    let Named { instance, .. } = source.load()?;
    let dp = solve_dp(&instance)?;
    println!("bits: {}", dp.bits);
    println!("value: {:.10}", dp.value);
    println!("weight: {}", dp.weight);
    if instance.len() <= VERIFY_MAX_ITEMS.min(BRUTE_FORCE_MAX_ITEMS) {
        let bf = solve_brute_force(&instance)?;
        ensure!(
            (bf.value - dp.value).abs() < 1e-9,
            "enumeration found {} ({}) but DP returned {}",
            bf.bits,
            bf.value,
            dp.value
        );
        println!("verified: enumeration agrees");
    }
    Ok(())
}

fn run_config(args: &RunArgs, p: usize, m: u32, shots: u64) -> Result<RunConfig> {
    ensure!(p >= 1, "--p must be at least 1");
    ensure!(m >= 1, "--m must be at least 1");
    ensure!(args.budget >= 1, "--budget must be at least 1");
    Ok(RunConfig {
        p,
        m,
        options: OptimizeOptions {
            budget: args.budget,
            seed: args.seed,
            joint: args.joint_opt,
            backend: args.backend.into(),
        },
        shots,
    })
}

fn timed_run(inst: &KnapsackInstance, cfg: &RunConfig, timing: bool) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = run(inst, cfg)?;
    if timing {
        report.wall_ms = start.elapsed().as_millis() as u64;
    }
    Ok(report)
}

pub fn solve(
    source: &SourceArgs,
    args: &RunArgs,
    p: usize,
    m: u32,
    shots: u64,
    out: Option<&Path>,
) -> Result<()> {
    let Named { instance, .. } = source.load()?;
    let cfg = run_config(args, p, m, shots)?;
    let report = timed_run(&instance, &cfg, args.timing)?;
    emit(out, &(report.to_json()? + "\n"))?;
    let s = out.is_some();
    note(s, &format!("ratio_best: {}", fmt_ratio(report.ratio_best)));
    note(
        s,
        &format!("ratio_expectation: {}", fmt_ratio(report.ratio_expectation)),
    );
    note(s, &format!("best: {}", report.best_feasible.bits));
    Ok(())
}

pub fn sweep(
    source: &SourceArgs,
    args: &RunArgs,
    axis: Axis,
    (lo, hi): (u32, u32),
    p: usize,
    m: u32,
    out: Option<&Path>,
) -> Result<()> {
    let instances = source.load_many()?;
    let axis_name = match axis {
        Axis::P => "p",
        Axis::M => "m",
    };
    let mut csv = String::from(SWEEP_HEADER) + "\n";
    for named in &instances {
        for v in lo..=hi {
            let cfg = match axis {
                Axis::P => run_config(args, v as usize, m, 0)?,
                Axis::M => run_config(args, p, v, 0)?,
            };
            let r = timed_run(&named.instance, &cfg, args.timing)
                .with_context(|| format!("{} at {axis_name}={v}", named.name))?;
            csv += &format!(
                "{},{axis_name},{v},{},{},{}\n",
                named.name,
                fmt_ratio(r.ratio_best),
                fmt_ratio(r.ratio_expectation),
                r.wall_ms
            );
        }
    }
    emit(out, &csv)
}

pub fn report(file: &Path) -> Result<()> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    if let Ok(report) = serde_json::from_str::<RunReport>(&text) {
        print_run(&report);
        return Ok(());
    }
    if text.lines().next().map(str::trim) == Some(SWEEP_HEADER) {
        return print_sweep(&text);
    }
    bail!("{} is neither a run report nor a sweep CSV", file.display())
}

fn print_run(r: &RunReport) {
    let inst = &r.instance;
    println!(
        "items {}  capacity {}  p {}  m {}  seed {}",
        inst.len(),
        inst.capacity,
        r.p,
        r.m,
        r.seed
    );
    if let Some(t) = &inst.tickers {
        println!("tickers {}", t.join(","));
    }
    for (k, (g, b)) in r.schedule.gammas.iter().zip(&r.schedule.betas).enumerate() {
        println!("layer {}: gamma {g:.6}  beta {b:.6}", k + 1);
    }
    println!("optimum     {}  value {:.6}", r.bks.bits, r.bks.value);
    println!(
        "most likely {}  value {:.6}  probability {:.6}",
        r.best_feasible.bits, r.best_feasible.value, r.best_feasible.probability
    );
    println!("expectation {:.6}", r.expectation);
    println!(
        "ratio_best {}  ratio_expectation {}",
        fmt_ratio(r.ratio_best),
        fmt_ratio(r.ratio_expectation)
    );
    println!("top outcomes:");
    for e in r.distribution.iter().take(8) {
        println!("  {}  {:.6}", e.bits, e.probability);
    }
}

fn print_sweep(text: &str) -> Result<()> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for rec in rdr.records() {
        rows.push(rec?);
    }
    let headers = rdr.headers()?.clone();
    let widths: Vec<usize> = (0..headers.len())
        .map(|c| {
            rows.iter()
                .map(|r| r.get(c).unwrap_or_default().len())
                .chain([headers[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    println!("{}", line(headers.iter().collect()));
    for r in &rows {
        println!("{}", line(r.iter().collect()));
    }
    Ok(())
}
