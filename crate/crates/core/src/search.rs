//! Maximum feasible subsystem search over the configuration hypercube.
//!
//! Vertices are configurations (hard entries pinned to `+1`), edges join
//! configurations that differ in exactly one soft entry.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feasibility::{check_feasibility, FeasibilityVerdict};
use crate::instance::{Configuration, QpInstance};

/// Upper bound on soft constraints for exhaustive search.
pub const MAX_GREEDY_SOFT: usize = 20;

/// Number of constraints kept by `config`.
pub fn level(config: &Configuration) -> usize {
    config.level()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigGraph {
    constraint_count: usize,
    soft: Vec<usize>,
}

impl ConfigGraph {
    pub fn new(qp: &QpInstance) -> Self {
        Self {
            constraint_count: qp.num_constraints(),
            soft: qp.soft_set(),
        }
    }

    pub fn soft_count(&self) -> usize {
        self.soft.len()
    }

    pub fn vertex_count(&self) -> u64 {
        1u64 << self.soft.len()
    }

    /// Vertex `id`, reading the first soft constraint as the most significant
    /// bit and `1` as kept.
    pub fn vertex(&self, id: u64) -> Configuration {
        let s = self.soft.len();
        let mut cfg = Configuration::all_kept(self.constraint_count);
        for (k, &j) in self.soft.iter().enumerate() {
            if (id >> (s - 1 - k)) & 1 == 0 {
                cfg = cfg.flipped(j);
            }
        }
        cfg
    }

    pub fn vertex_id(&self, config: &Configuration) -> u64 {
        self.soft
            .iter()
            .fold(0u64, |acc, &j| (acc << 1) | u64::from(config.is_kept(j)))
    }

    /// The `C_s` configurations one soft flip away.
    pub fn neighbors(&self, config: &Configuration) -> Vec<Configuration> {
        self.soft.iter().map(|&j| config.flipped(j)).collect()
    }

    pub fn adjacent(&self, p: &Configuration, q: &Configuration) -> bool {
        let l1: i32 = p
            .signs()
            .iter()
            .zip(q.signs())
            .map(|(a, b)| i32::from((a - b).abs()))
            .sum();
        l1 == 2
    }
}

#[derive(Debug, Clone)]
pub struct ConfigSearchResult {
    pub chosen: Configuration,
    pub level: usize,
    /// Distinct configurations whose feasibility was checked.
    pub evaluations: usize,
    pub trace: Vec<(Configuration, FeasibilityVerdict)>,
}

/// Evaluates all `2^{C_s}` configurations and picks a feasible one of maximal
/// level. Ties go to the lexicographically greatest sign vector (`+1 > -1`,
/// first constraint most significant).
pub fn greedy_maxfs(qp: &QpInstance) -> Result<ConfigSearchResult> {
    let graph = ConfigGraph::new(qp);
    if graph.soft_count() > MAX_GREEDY_SOFT {
        return Err(Error::TooManySoftConstraints {
            soft: graph.soft_count(),
            limit: MAX_GREEDY_SOFT,
        });
    }
    let trace = (0..graph.vertex_count())
        .into_par_iter()
        .map(|id| {
            let cfg = graph.vertex(id);
            check_feasibility(qp, &cfg).map(|v| (cfg, v))
        })
        .collect::<Result<Vec<_>>>()?;

    let chosen = trace
        .iter()
        .filter(|(_, v)| v.is_feasible())
        .map(|(c, _)| c)
        .max_by(|a, b| a.level().cmp(&b.level()).then_with(|| a.cmp(b)))
        .cloned()
        .ok_or(Error::NoFeasibleConfiguration)?;
    Ok(ConfigSearchResult {
        level: chosen.level(),
        chosen,
        evaluations: trace.len(),
        trace,
    })
}

/// Monotone neighbor descent from `start`.
///
/// While the current configuration is infeasible, every neighbor that
/// disregards one more soft constraint is checked; the search moves to the
/// lowest-index feasible neighbor if there is one, otherwise to the
/// lowest-index neighbor. It stops at the first feasible configuration or
/// when every soft constraint is disregarded.
pub fn heuristic_maxfs(qp: &QpInstance, start: &Configuration) -> Result<ConfigSearchResult> {
    start.validate_for(qp)?;
    let soft = qp.soft_set();
    let mut memo: HashMap<Configuration, FeasibilityVerdict> = HashMap::new();
    let mut trace = Vec::new();

    let mut current = start.clone();
    loop {
        let verdict = evaluate(qp, &current, &mut memo, &mut trace)?;
        if verdict.is_feasible() {
            return Ok(ConfigSearchResult {
                level: current.level(),
                chosen: current,
                evaluations: memo.len(),
                trace,
            });
        }
        let candidates: Vec<Configuration> = soft
            .iter()
            .filter(|&&j| current.is_kept(j))
            .map(|&j| current.flipped(j))
            .collect();
        if candidates.is_empty() {
            return Err(Error::NoFeasibleConfiguration);
        }
        let fresh: Vec<Configuration> = candidates
            .iter()
            .filter(|c| !memo.contains_key(*c))
            .cloned()
            .collect();
        let verdicts = fresh
            .par_iter()
            .map(|c| check_feasibility(qp, c))
            .collect::<Result<Vec<_>>>()?;
        for (c, v) in fresh.into_iter().zip(verdicts) {
            trace.push((c.clone(), v.clone()));
            memo.insert(c, v);
        }
        current = candidates
            .iter()
            .find(|c| memo[*c].is_feasible())
            .unwrap_or(&candidates[0])
            .clone();
    }
}

fn evaluate(
    qp: &QpInstance,
    cfg: &Configuration,
    memo: &mut HashMap<Configuration, FeasibilityVerdict>,
    trace: &mut Vec<(Configuration, FeasibilityVerdict)>,
) -> Result<FeasibilityVerdict> {
    if let Some(v) = memo.get(cfg) {
        return Ok(v.clone());
    }
    let v = check_feasibility(qp, cfg)?;
    memo.insert(cfg.clone(), v.clone());
    trace.push((cfg.clone(), v.clone()));
    Ok(v)
}
