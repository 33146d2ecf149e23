//! `semilab`: run and sweep the scenario catalogue from the command line.
//!
//! Exit codes: 0 when all verdicts were computed (regardless of whether they
//! hold), 1 for configuration errors, 2 for numerical pipeline failures.

use std::path::PathBuf;

use semilab_cli::config::{CliError, Overrides};
use semilab_cli::pipeline::{run_scenario, run_sweep, ScenarioReport, SweepParam};
use semilab_cli::registry::{resolve, SCENARIOS};
use semilab_cli::report::fmt_f64;

const USAGE: &str = "\
semilab - finite-dimensional semigroup laboratory

USAGE:
    semilab list [--json]
    semilab run <scenario> [--config FILE] [--set key=value ...] [--out DIR]
    semilab sweep <scenario> --param {L|n} --values v1,v2,... \
[--config FILE] [--set key=value ...] [--out DIR]

Configuration keys: n, L, N, t_max, points, eps. Command-line --set
assignments override the config file; scenario defaults fill the rest.
Outputs land in DIR (default semilab-out/<scenario>): profile.csv,
scalars.csv, summary.json for runs; sweep.csv for sweeps.
Set SEMILAB_WORKERS to parallelize sweep rows.
";

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("list") => cmd_list(&args[1..]),
        Some("run") => wrap(cmd_run(&args[1..])),
        Some("sweep") => wrap(cmd_sweep(&args[1..])),
        Some("help") | Some("--help") | Some("-h") => {
            print!("{USAGE}");
            0
        }
        Some(other) => {
            eprintln!("unknown subcommand '{other}'\n{USAGE}");
            1
        }
        None => {
            eprintln!("{USAGE}");
            1
        }
    }
}

fn wrap(r: Result<i32, CliError>) -> i32 {
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn cmd_list(args: &[String]) -> i32 {
    let json = args.iter().any(|a| a == "--json");
    if json {
        let descriptors: Vec<serde_json::Value> = SCENARIOS
            .iter()
            .map(|m| {
                serde_json::json!({
                    "name": m.name,
                    "description": m.description,
                    "default_n": m.default_n,
                    "default_l": m.default_l,
                    "default_block": m.default_block,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&descriptors).expect("descriptors serialize")
        );
    } else {
        for m in SCENARIOS {
            println!("{:<14} {}", m.name, m.description);
        }
    }
    0
}

struct CommonArgs {
    scenario: String,
    overrides: Overrides,
    out_dir: Option<PathBuf>,
    rest: Vec<(String, String)>,
}

fn parse_common(args: &[String]) -> Result<CommonArgs, CliError> {
    let mut it = args.iter().peekable();
    let scenario = it
        .next()
        .ok_or_else(|| CliError::config("missing scenario name".to_string()))?
        .clone();
    let mut overrides = Overrides::default();
    let mut config_file: Option<PathBuf> = None;
    let mut out_dir: Option<PathBuf> = None;
    let mut sets: Vec<String> = Vec::new();
    let mut rest: Vec<(String, String)> = Vec::new();
    while let Some(arg) = it.next() {
        let take_value = |name: &str, it: &mut std::iter::Peekable<std::slice::Iter<String>>| {
            it.next()
                .cloned()
                .ok_or_else(|| CliError::config(format!("flag {name} needs a value")))
        };
        match arg.as_str() {
            "--config" => config_file = Some(PathBuf::from(take_value("--config", &mut it)?)),
            "--set" => sets.push(take_value("--set", &mut it)?),
            "--out" => out_dir = Some(PathBuf::from(take_value("--out", &mut it)?)),
            "--param" | "--values" => {
                let v = take_value(arg, &mut it)?;
                rest.push((arg.clone(), v));
            }
            other => {
                return Err(CliError::config(format!("unknown flag '{other}'")));
            }
        }
    }
    if let Some(path) = config_file {
        overrides.load_file(&path)?;
    }
    for assignment in &sets {
        overrides.apply_assignment(assignment)?;
    }
    Ok(CommonArgs {
        scenario,
        overrides,
        out_dir,
        rest,
    })
}

fn cmd_run(args: &[String]) -> Result<i32, CliError> {
    let common = parse_common(args)?;
    if let Some((flag, _)) = common.rest.first() {
        return Err(CliError::config(format!(
            "flag {flag} is only valid for sweep"
        )));
    }
    let cfg = resolve(&common.scenario, &common.overrides)?;
    let out_dir = common
        .out_dir
        .unwrap_or_else(|| PathBuf::from("semilab-out").join(cfg.meta.name));
    let report = run_scenario(&cfg, &out_dir)?;
    print_report(&report);
    Ok(0)
}

fn print_report(r: &ScenarioReport) {
    println!("scenario {} [{}]", r.scenario, r.label);
    println!(
        "  lambda0 = {}   gap = {}",
        fmt_f64(r.spectral.lambda0),
        r.spectral.gap.map(fmt_f64).unwrap_or_else(|| "-".into())
    );
    println!(
        "  positive: {} (min off-diagonal {})   irreducible: {}",
        r.positivity.metzler,
        fmt_f64(r.positivity.min_off_diagonal),
        r.positivity
            .irreducible
            .map(|b| b.to_string())
            .unwrap_or_else(|| "n/a".into())
    );
    println!(
        "  positivity verdict: {}   t1 = {}",
        r.positivity.verdict,
        r.positivity.t1.map(fmt_f64).unwrap_or_else(|| "-".into())
    );
    println!(
        "  fitted rate = {}   final distance = {}",
        r.convergence
            .fitted_rate
            .map(fmt_f64)
            .unwrap_or_else(|| "-".into()),
        fmt_f64(r.convergence.final_distance)
    );
    if let Some(c) = &r.classification {
        println!(
            "  classification: {} (kernel dim {})",
            c.class, c.kernel_dim
        );
    }
    for v in &r.verdicts {
        println!(
            "  [{}] {} (observed {}, tolerance {})",
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            fmt_f64(v.observed),
            fmt_f64(v.tolerance)
        );
    }
    println!(
        "  wrote {} {} {}",
        r.files.profile_csv, r.files.scalars_csv, r.files.summary_json
    );
}

fn cmd_sweep(args: &[String]) -> Result<i32, CliError> {
    let common = parse_common(args)?;
    let mut param: Option<SweepParam> = None;
    let mut values: Option<Vec<f64>> = None;
    for (flag, value) in &common.rest {
        match flag.as_str() {
            "--param" => param = Some(SweepParam::parse(value)?),
            "--values" => {
                let parsed: Result<Vec<f64>, _> =
                    value.split(',').map(|s| s.trim().parse::<f64>()).collect();
                values = Some(parsed.map_err(|_| {
                    CliError::config(format!("cannot parse --values list '{value}'"))
                })?);
            }
            _ => unreachable!(),
        }
    }
    let param = param.ok_or_else(|| CliError::config("sweep requires --param".to_string()))?;
    let values = values.ok_or_else(|| CliError::config("sweep requires --values".to_string()))?;
    let cfg = resolve(&common.scenario, &common.overrides)?;
    let out_dir = common
        .out_dir
        .unwrap_or_else(|| PathBuf::from("semilab-out").join(cfg.meta.name));
    let rows = run_sweep(&cfg, param, &values, &out_dir)?;
    println!("value,lambda0,gap,delta_fit,t1,status");
    let mut any_failed = false;
    for row in &rows {
        println!(
            "{},{},{},{},{},{}",
            fmt_f64(row.value),
            row.lambda0.map(fmt_f64).unwrap_or_default(),
            row.gap.map(fmt_f64).unwrap_or_default(),
            row.delta_fit.map(fmt_f64).unwrap_or_default(),
            row.t1.map(fmt_f64).unwrap_or_default(),
            row.status
        );
        if row.status != "ok" {
            any_failed = true;
        }
    }
    println!("wrote {}", out_dir.join("sweep.csv").display());
    Ok(if any_failed { 2 } else { 0 })
}
