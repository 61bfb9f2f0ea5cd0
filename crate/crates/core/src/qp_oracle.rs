//! Exact desk-scale QP solver by active-set enumeration.
//!
//! Every subset `W` of at most `m` constraints is tried as an active set: the
//! equality-constrained KKT system
//!
//! ```text
//!     [ 2H    A_W ] [ u   ]   [ -F  ]
//!     [ A_Wᵀ  0   ] [ λ_W ] = [ B_W ]
//! ```
//!
//! is solved and the candidate is kept when it is primal feasible with
//! nonnegative multipliers. A strictly convex QP has a unique minimizer, and
//! some linearly independent active set always certifies it, so the search is
//! exhaustive. Slow, but it is the reference the LP routes are judged against.

use crate::error::{Error, Result};
use crate::feasibility::check_feasibility;
use crate::instance::{Configuration, QpInstance};
use crate::linalg::{cholesky_solve, dot, norm_inf, solve_linear, DenseMatrix, DenseVector};

pub const MAX_ORACLE_DIM: usize = 12;
pub const MAX_ORACLE_CONSTRAINTS: usize = 24;

const PRIMAL_TOL: f64 = 1e-8;
const MULTIPLIER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub minimizer: DenseVector,
    /// Multipliers of the configured constraints `P_i A_iᵀu <= P_i B_i`, so
    /// that `2Hu + F + A S(P) λ = 0`.
    pub multipliers: DenseVector,
    pub active_set: Vec<usize>,
    pub objective: f64,
    /// Candidate active sets skipped because their KKT matrix was singular.
    pub skipped_singular: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QpOutcome {
    Solved(QpSolution),
    InfeasibleQp { skipped_singular: usize },
}

impl QpOutcome {
    pub fn solution(&self) -> Option<&QpSolution> {
        match self {
            QpOutcome::Solved(s) => Some(s),
            QpOutcome::InfeasibleQp { .. } => None,
        }
    }
}

/// `ω(u) = uᵀHu + Fᵀu`
pub fn objective_value(qp: &QpInstance, u: &[f64]) -> f64 {
    dot(u, &qp.h().mul_vec(u)) + dot(qp.f(), u)
}

/// `-½ H⁻¹ F`
pub fn unconstrained_minimizer(qp: &QpInstance) -> DenseVector {
    let x = cholesky_solve(qp.h_cholesky(), qp.f());
    DenseVector::new(x.into_iter().map(|v| -0.5 * v).collect()).expect("finite")
}

/// Lagrange dual function of the configured problem,
/// `d(λ) = -¼ (F + A'λ)ᵀ H⁻¹ (F + A'λ) - B'ᵀλ` with `A' = A S(P)`, `B' = S(P)B`.
pub fn dual_value(qp: &QpInstance, config: &Configuration, lambda: &[f64]) -> f64 {
    let signed: Vec<f64> = lambda
        .iter()
        .enumerate()
        .map(|(i, l)| l * config.sign(i))
        .collect();
    let mut g = qp.a().mul_vec(&signed);
    for (gi, fi) in g.iter_mut().zip(qp.f().iter()) {
        *gi += fi;
    }
    let hinv_g = cholesky_solve(qp.h_cholesky(), &g);
    -0.25 * dot(&g, &hinv_g) - dot(qp.b(), &signed)
}

/// `‖2Hu + F + A S(P) λ‖∞`
pub fn stationarity_residual(qp: &QpInstance, config: &Configuration, sol: &QpSolution) -> f64 {
    let u = &sol.minimizer;
    let signed: Vec<f64> = sol
        .multipliers
        .iter()
        .enumerate()
        .map(|(i, l)| l * config.sign(i))
        .collect();
    let hu = qp.h().mul_vec(u);
    let al = qp.a().mul_vec(&signed);
    let r: Vec<f64> = (0..qp.m())
        .map(|k| 2.0 * hu[k] + qp.f()[k] + al[k])
        .collect();
    norm_inf(&r)
}

fn check_range(qp: &QpInstance) -> Result<()> {
    if qp.m() > MAX_ORACLE_DIM || qp.num_constraints() > MAX_ORACLE_CONSTRAINTS {
        return Err(Error::OutOfOracleRange {
            m: qp.m(),
            c: qp.num_constraints(),
        });
    }
    Ok(())
}

struct Candidate {
    u: Vec<f64>,
    lambda: Vec<f64>,
    active: Vec<usize>,
    objective: f64,
}

/// Solves `min uᵀHu + Fᵀu  s.t.  S(P)Aᵀu <= S(P)B` exactly.
pub fn solve_qp(qp: &QpInstance, config: &Configuration) -> Result<QpOutcome> {
    check_range(qp)?;
    config.validate_for(qp)?;
    let signed = qp.apply_configuration(config);
    let (m, c) = (qp.m(), qp.num_constraints());
    let normals: Vec<Vec<f64>> = (0..c).map(|i| signed.constraint(i)).collect();
    let rhs = signed.b();

    let mut best: Option<Candidate> = None;
    let mut skipped = 0;
    let mut active = Vec::with_capacity(m);
    // Depth-first in lexicographic order of the sorted index lists, so the
    // first of several equal-objective candidates is the lexicographically
    // smallest active set.
    enumerate_subsets(c, m.min(c), 0, &mut active, &mut |w| {
        let k = w.len();
        let size = m + k;
        let mut kkt = DenseMatrix::zeros(size, size);
        for r in 0..m {
            for s in 0..m {
                kkt[(r, s)] = 2.0 * qp.h()[(r, s)];
            }
        }
        for (col, &i) in w.iter().enumerate() {
            for r in 0..m {
                kkt[(r, m + col)] = normals[i][r];
                kkt[(m + col, r)] = normals[i][r];
            }
        }
        let mut b = vec![0.0; size];
        for r in 0..m {
            b[r] = -qp.f()[r];
        }
        for (col, &i) in w.iter().enumerate() {
            b[m + col] = rhs[i];
        }
        let sol = match solve_linear(&kkt, &b) {
            Ok(s) => s,
            Err(_) => {
                skipped += 1;
                return;
            }
        };
        let u = &sol[..m];
        let lw = &sol[m..];
        let lmax = norm_inf(lw);
        if lw.iter().any(|&l| l < -MULTIPLIER_TOL * (1.0 + lmax)) {
            return;
        }
        let u_norm = norm_inf(u);
        let primal_ok = (0..c).all(|i| {
            let lhs = dot(&normals[i], u);
            let scale =
                1.0 + rhs[i].abs() + normals[i].iter().map(|v| v.abs()).sum::<f64>() * u_norm;
            lhs <= rhs[i] + PRIMAL_TOL * scale
        });
        if !primal_ok {
            return;
        }
        let objective = objective_value(qp, u);
        let better = match &best {
            None => true,
            Some(cur) => objective < cur.objective - 1e-9 * (1.0 + cur.objective.abs()),
        };
        if better {
            let mut lambda = vec![0.0; c];
            for (col, &i) in w.iter().enumerate() {
                lambda[i] = lw[col].max(0.0);
            }
            best = Some(Candidate {
                u: u.to_vec(),
                lambda,
                active: w.to_vec(),
                objective,
            });
        }
    });

    Ok(match best {
        Some(cand) => QpOutcome::Solved(QpSolution {
            minimizer: DenseVector::new(cand.u)?,
            multipliers: DenseVector::new(cand.lambda)?,
            active_set: cand.active,
            objective: cand.objective,
            skipped_singular: skipped,
        }),
        None => QpOutcome::InfeasibleQp {
            skipped_singular: skipped,
        },
    })
}

fn enumerate_subsets(
    n: usize,
    max_size: usize,
    start: usize,
    current: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    visit(current);
    if current.len() == max_size {
        return;
    }
    for i in start..n {
        current.push(i);
        enumerate_subsets(n, max_size, i + 1, current, visit);
        current.pop();
    }
}

/// Minimizers of (i) the QP with `flip_set` disregarded (sign-negated) and
/// (ii) the QP with `flip_set` deleted.
///
/// Requires the all-kept configuration to be infeasible and the one
/// disregarding `flip_set` to be feasible.
pub fn disregard_vs_delete(
    qp: &QpInstance,
    flip_set: &[usize],
) -> Result<(DenseVector, DenseVector)> {
    check_range(qp)?;
    let c = qp.num_constraints();
    if let Some(&i) = flip_set.iter().find(|&&i| i >= c || qp.is_hard(i)) {
        return Err(Error::PremiseViolated(format!(
            "constraint {i} is not a soft constraint"
        )));
    }
    if check_feasibility(qp, &Configuration::all_kept(c))?.is_feasible() {
        return Err(Error::PremiseViolated(
            "all-kept configuration is feasible".into(),
        ));
    }
    let flipped = Configuration::disregarding(c, flip_set);
    if !check_feasibility(qp, &flipped)?.is_feasible() {
        return Err(Error::PremiseViolated(format!(
            "configuration {flipped} is infeasible"
        )));
    }
    let deleted = qp.drop_constraints(flip_set);
    let kept = Configuration::all_kept(deleted.num_constraints());
    match (solve_qp(qp, &flipped)?, solve_qp(&deleted, &kept)?) {
        (QpOutcome::Solved(a), QpOutcome::Solved(b)) => Ok((a.minimizer, b.minimizer)),
        _ => Err(Error::PremiseViolated(
            "QP oracle found no minimizer for a configuration reported feasible".into(),
        )),
    }
}

/// Whether disregarding `flip_set` and deleting it yield the same minimizer
/// (within `1e-6` in the max norm).
pub fn flip_equals_delete(qp: &QpInstance, flip_set: &[usize]) -> Result<bool> {
    let (a, b) = disregard_vs_delete(qp, flip_set)?;
    let diff = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(diff <= 1e-6)
}
