//! Timing grid over random instances.
//!
//! `wall_time_ns` is a monotonic-clock measurement of the LP solve alone
//! (`DualCheck::run` / `Phase1Check::run`); generating the instance and
//! assembling the LP are excluded.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qpfeas_core::{
    random_instance, Configuration, DualCheck, FeasibilityStatus, GridSpec, Phase1Check,
};

use crate::{heatmap, sig12, CommandOutput, EXIT_OK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DualLp,
    Phase1,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::DualLp, Method::Phase1];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::DualLp => "dual_lp",
            Method::Phase1 => "phase1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRecord {
    pub m: usize,
    #[serde(rename = "C")]
    pub c: usize,
    pub trial: usize,
    pub method: Method,
    pub status: String,
    pub wall_time_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub m: usize,
    #[serde(rename = "C")]
    pub c: usize,
    pub method: Method,
    pub trials: usize,
    pub infeasible: usize,
    pub mean_time_ns: f64,
    pub median_time_ns: f64,
}

fn time_trial(m: usize, c: usize, trial: usize, seed: u64) -> Result<[GridRecord; 2]> {
    let qp = random_instance(m, c, seed);
    let cfg = Configuration::all_kept(c);
    let record = |method, status: &str, ns: u128| GridRecord {
        m,
        c,
        trial,
        method,
        status: status.to_string(),
        wall_time_ns: ns as u64,
    };

    let dual = DualCheck::prepare(&qp, &cfg)?;
    let start = Instant::now();
    let dv = dual.run()?;
    let dual_ns = start.elapsed().as_nanos();

    let p1 = Phase1Check::prepare(&qp, &cfg)?;
    let start = Instant::now();
    let pv = p1.run()?;
    let p1_ns = start.elapsed().as_nanos();

    Ok([
        record(Method::DualLp, dv.status.as_str(), dual_ns),
        record(Method::Phase1, pv.status.as_str(), p1_ns),
    ])
}

/// Runs every `(m, C, trial)` of the grid on the rayon pool. Records come back
/// sorted by `(m, C, trial, method)`.
pub fn run_grid(spec: &GridSpec) -> Result<Vec<GridRecord>> {
    let tasks: Vec<(usize, usize, usize)> = spec
        .m_values
        .iter()
        .flat_map(|&m| {
            spec.c_values
                .iter()
                .flat_map(move |&c| (0..spec.trials).map(move |t| (m, c, t)))
        })
        .collect();
    let mut records: Vec<GridRecord> = tasks
        .par_iter()
        .map(|&(m, c, t)| time_trial(m, c, t, spec.trial_seed(t)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    records.sort_by_key(|r| (r.m, r.c, r.trial, r.method));
    Ok(records)
}

fn median(sorted: &[u64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] as f64 + sorted[n / 2] as f64) / 2.0
    }
}

/// Per-cell mean and median time for each method.
pub fn summarize(records: &[GridRecord]) -> Vec<SummaryRecord> {
    let mut cells: std::collections::BTreeMap<(usize, usize, Method), Vec<&GridRecord>> =
        Default::default();
    for r in records {
        cells.entry((r.m, r.c, r.method)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((m, c, method), rs)| {
            let mut times: Vec<u64> = rs.iter().map(|r| r.wall_time_ns).collect();
            times.sort_unstable();
            let mean = times.iter().map(|&t| t as f64).sum::<f64>() / times.len() as f64;
            SummaryRecord {
                m,
                c,
                method,
                trials: rs.len(),
                infeasible: rs
                    .iter()
                    .filter(|r| r.status == FeasibilityStatus::Infeasible.as_str())
                    .count(),
                mean_time_ns: sig12(mean),
                median_time_ns: sig12(median(&times)),
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

/// `bench`: writes `grid.csv`, `summary.csv` and one `heatmap_<method>.svg`
/// per method into `out`.
pub fn cmd_bench(spec: &GridSpec, out: &Path) -> Result<CommandOutput> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let records = run_grid(spec)?;
    let summary = summarize(&records);
    write_csv(&out.join("grid.csv"), &records)?;
    write_csv(&out.join("summary.csv"), &summary)?;
    for method in Method::ALL {
        let path = out.join(format!("heatmap_{}.svg", method.as_str()));
        let svg = heatmap::render(spec, &summary, method);
        fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    let disagreements = records
        .chunks(2)
        .filter(|pair| pair[0].status != pair[1].status)
        .count();
    let doc = serde_json::json!({
        "records": records.len(),
        "cells": summary.len() / 2,
        "status_disagreements": disagreements,
        "out": out.display().to_string(),
    });
    Ok(CommandOutput {
        exit_code: EXIT_OK,
        document: serde_json::to_string_pretty(&doc)?,
    })
}
