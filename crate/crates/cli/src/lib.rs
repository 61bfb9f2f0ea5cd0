//! Command implementations behind the `qpfeas` binary.
//!
//! Every command returns a [`CommandOutput`]: the document to print and the
//! process exit code. Numbers in emitted documents carry at most 12
//! significant digits.

pub mod bench;
pub mod heatmap;

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use qpfeas_core::qp_oracle::{MAX_ORACLE_CONSTRAINTS, MAX_ORACLE_DIM};
use qpfeas_core::scenario::{scenario_times, SCENARIO_HORIZON};
use qpfeas_core::{
    cbf_scenario, greedy_maxfs, heuristic_maxfs, parse_problem, solve_qp, Certificate,
    ConfigSearchResult, Configuration, DualCheck, FeasibilityVerdict, Phase1Check, ProblemFile,
    QpInstance, QpOutcome,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NO_FEASIBLE_CONFIGURATION: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub exit_code: i32,
    pub document: String,
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn sig12_vec(v: &[f64]) -> Vec<f64> {
    v.iter().copied().map(sig12).collect()
}

pub fn load_instance(path: &Path) -> Result<QpInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_problem(&text).with_context(|| format!("in {}", path.display()))
}

fn parse_config(qp: &QpInstance, text: Option<&str>) -> Result<Configuration> {
    let c = qp.num_constraints();
    let Some(text) = text else {
        return Ok(Configuration::all_kept(c));
    };
    let cfg: Configuration = text.parse().context("--config")?;
    cfg.validate_for(qp).context("--config")?;
    Ok(cfg)
}

pub fn certificate_json(cert: &Certificate) -> Value {
    match cert {
        Certificate::Multipliers(l) => json!({ "kind": "multipliers", "lambda": sig12_vec(l) }),
        Certificate::Violations(z) => json!({ "kind": "violations", "z": sig12_vec(z) }),
        Certificate::BoundedOptimum => json!({ "kind": "bounded_optimum" }),
        Certificate::ConeIsTrivial => json!({ "kind": "cone_is_trivial" }),
    }
}

pub fn verdict_json(v: &FeasibilityVerdict) -> Value {
    json!({
        "status": v.status.as_str(),
        "certificate": certificate_json(&v.certificate),
        "lp_optimum": v.lp_optimum.map(sig12),
    })
}

/// `check <file> [--config] [--baseline] [--solve]`
pub fn cmd_check(
    path: &Path,
    config: Option<&str>,
    baseline: bool,
    solve: bool,
) -> Result<CommandOutput> {
    let qp = load_instance(path)?;
    let cfg = parse_config(&qp, config)?;

    // Only the solve is timed.
    let (verdict, elapsed) = if baseline {
        let prepared = Phase1Check::prepare(&qp, &cfg)?;
        let start = Instant::now();
        let v = prepared.run()?;
        (v, start.elapsed())
    } else {
        let prepared = DualCheck::prepare(&qp, &cfg)?;
        let start = Instant::now();
        let v = prepared.run()?;
        (v, start.elapsed())
    };

    let mut doc = verdict_json(&verdict);
    doc["method"] = json!(if baseline { "phase1" } else { "dual_lp" });
    doc["configuration"] = json!(cfg.to_string());
    doc["wall_time_ns"] = json!(elapsed.as_nanos() as u64);
    if solve {
        if qp.m() > MAX_ORACLE_DIM || qp.num_constraints() > MAX_ORACLE_CONSTRAINTS {
            bail!(
                "--solve supports m <= {MAX_ORACLE_DIM} and at most {MAX_ORACLE_CONSTRAINTS} constraints"
            );
        }
        doc["solution"] = match solve_qp(&qp, &cfg)? {
            QpOutcome::Solved(s) => json!({
                "minimizer": sig12_vec(&s.minimizer),
                "multipliers": sig12_vec(&s.multipliers),
                "active_set": s.active_set,
                "objective": sig12(s.objective),
            }),
            QpOutcome::InfeasibleQp { .. } => Value::Null,
        };
    }
    let exit_code = if verdict.is_feasible() {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    };
    Ok(CommandOutput {
        exit_code,
        document: serde_json::to_string_pretty(&doc)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Strategy {
    Greedy,
    Heuristic,
}

pub fn search_json(res: &ConfigSearchResult) -> Value {
    let trace: Vec<Value> = res
        .trace
        .iter()
        .map(|(cfg, v)| {
            let mut entry = verdict_json(v);
            entry["configuration"] = json!(cfg.to_string());
            entry["level"] = json!(cfg.level());
            entry["chosen"] = json!(*cfg == res.chosen);
            entry
        })
        .collect();
    json!({
        "chosen": res.chosen.to_string(),
        "disregarded": res.chosen.disregarded(),
        "level": res.level,
        "evaluations": res.evaluations,
        "trace": trace,
    })
}

fn run_strategy(qp: &QpInstance, strategy: Strategy) -> qpfeas_core::Result<ConfigSearchResult> {
    match strategy {
        Strategy::Greedy => greedy_maxfs(qp),
        Strategy::Heuristic => heuristic_maxfs(qp, &Configuration::all_kept(qp.num_constraints())),
    }
}

/// `maxfs <file> --strategy greedy|heuristic`
pub fn cmd_maxfs(path: &Path, strategy: Strategy) -> Result<CommandOutput> {
    let qp = load_instance(path)?;
    match run_strategy(&qp, strategy) {
        Ok(res) => {
            let mut doc = search_json(&res);
            doc["strategy"] = json!(format!("{strategy:?}").to_lowercase());
            Ok(CommandOutput {
                exit_code: EXIT_OK,
                document: serde_json::to_string_pretty(&doc)?,
            })
        }
        Err(qpfeas_core::Error::NoFeasibleConfiguration) => Ok(CommandOutput {
            exit_code: EXIT_NO_FEASIBLE_CONFIGURATION,
            document: serde_json::to_string_pretty(
                &json!({ "error": "no feasible configuration" }),
            )?,
        }),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScenarioRecord {
    pub t: f64,
    pub greedy_chosen: String,
    pub greedy_level: usize,
    pub greedy_evaluations: usize,
    pub heuristic_chosen: String,
    pub heuristic_level: usize,
    pub heuristic_evaluations: usize,
}

pub fn scenario_records(dt: f64, horizon: f64) -> Result<Vec<ScenarioRecord>> {
    scenario_times(dt, horizon)?
        .into_iter()
        .map(|t| {
            let qp = cbf_scenario(t)?.instance;
            let g = run_strategy(&qp, Strategy::Greedy)?;
            let h = run_strategy(&qp, Strategy::Heuristic)?;
            Ok(ScenarioRecord {
                t: sig12(t),
                greedy_chosen: g.chosen.to_string(),
                greedy_level: g.level,
                greedy_evaluations: g.evaluations,
                heuristic_chosen: h.chosen.to_string(),
                heuristic_level: h.level,
                heuristic_evaluations: h.evaluations,
            })
        })
        .collect()
}

/// `scenario [--dt] [--horizon] --out DIR`: writes `scenario.csv` and the
/// `t = 0` instance as `instance_t0.json`.
pub fn cmd_scenario(dt: f64, horizon: f64, out: &Path) -> Result<CommandOutput> {
    if horizon > SCENARIO_HORIZON {
        bail!("--horizon must be at most {SCENARIO_HORIZON}");
    }
    let records = scenario_records(dt, horizon)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let csv_path = out.join("scenario.csv");
    let mut w = csv::Writer::from_path(&csv_path)
        .with_context(|| format!("writing {}", csv_path.display()))?;
    for r in &records {
        w.serialize(r)?;
    }
    w.flush()?;
    let t0 = cbf_scenario(0.0)?.instance;
    let json_path = out.join("instance_t0.json");
    fs::write(&json_path, ProblemFile::from_instance(&t0).to_json())
        .with_context(|| format!("writing {}", json_path.display()))?;
    let doc = json!({
        "samples": records.len(),
        "files": [csv_path.display().to_string(), json_path.display().to_string()],
    });
    Ok(CommandOutput {
        exit_code: EXIT_OK,
        document: serde_json::to_string_pretty(&doc)?,
    })
}
