//! Feasibility of `S(P)Aᵀu <= S(P)B` decided through a cone LP over the
//! nullspace of `A`.
//!
//! For a configuration `P` the system is feasible iff
//!
//! ```text
//!     max  -Bᵀλ   s.t.  Aλ = 0,  P_j λ_j >= 0
//! ```
//!
//! is bounded. The feasible set is a cone, so the supremum is either 0 or
//! +inf. Substituting `μ = S(P)λ >= 0` and intersecting the cone with the
//! simplex `Σμ = 1` turns that into a value comparison: the constraints are
//! infeasible iff the normalized optimum is positive, and the optimal `μ` is
//! then a Farkas certificate.
//!
//! [`phase1_check`] is the classical elastic LP `min 1ᵀz s.t. Aᵀu - z <= B`,
//! kept as the baseline and as an independent cross-check.

use crate::error::{Error, Result};
use crate::instance::{Configuration, QpInstance};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::simplex::{solve_standard_lp, LpOutcome, StandardLp};

/// Normalized optima above this value mean infeasible.
pub const INFEASIBILITY_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

impl FeasibilityStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FeasibilityStatus::Feasible => "feasible",
            FeasibilityStatus::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Sign-conforming `λ` with `Aλ = 0`, `Σ|λ| = 1` and `-Bᵀλ > 0`.
    Multipliers(DenseVector),
    /// Optimal elastic variables `z` of the Phase-1 LP.
    Violations(DenseVector),
    /// The LP optimum (see [`FeasibilityVerdict::lp_optimum`]) is below the threshold.
    BoundedOptimum,
    /// The sign-restricted nullspace cone is `{0}`.
    ConeIsTrivial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityVerdict {
    pub status: FeasibilityStatus,
    pub certificate: Certificate,
    pub lp_optimum: Option<f64>,
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }

    pub fn multipliers(&self) -> Option<&DenseVector> {
        match &self.certificate {
            Certificate::Multipliers(l) => Some(l),
            _ => None,
        }
    }
}

/// Standard-form encoding of the normalized cone LP over all `C` constraints.
///
/// Variables are `μ_j = P_j λ_j >= 0`; the objective is `-B_j P_j`, the rows are
/// `(A S(P)) μ = 0` followed by `Σμ = 1`.
pub fn build_dual_lp(qp: &QpInstance, config: &Configuration) -> Result<StandardLp> {
    config.validate_for(qp)?;
    let all: Vec<usize> = (0..qp.num_constraints()).collect();
    dual_lp_over(qp, config, &all, true)
}

fn dual_lp_over(
    qp: &QpInstance,
    config: &Configuration,
    cols: &[usize],
    normalized: bool,
) -> Result<StandardLp> {
    let m = qp.m();
    let n = cols.len();
    let rows = if normalized { m + 1 } else { m };
    let mut eq = DenseMatrix::zeros(rows, n);
    for r in 0..m {
        for (k, &j) in cols.iter().enumerate() {
            eq[(r, k)] = qp.a()[(r, j)] * config.sign(j);
        }
    }
    let mut rhs = vec![0.0; rows];
    if normalized {
        for k in 0..n {
            eq[(m, k)] = 1.0;
        }
        rhs[m] = 1.0;
    }
    let objective = cols.iter().map(|&j| -qp.b()[j] * config.sign(j)).collect();
    StandardLp::new(DenseVector::new(objective)?, eq, DenseVector::new(rhs)?)
}

/// A dual-LP feasibility check with its LP already assembled, so that the
/// solve can be timed separately from construction.
#[derive(Debug, Clone)]
pub struct DualCheck {
    signs: Vec<f64>,
    num_constraints: usize,
    kind: DualCheckKind,
}

#[derive(Debug, Clone)]
enum DualCheckKind {
    /// A zero column whose constraint `0 <= P_i B_i` is violated.
    ZeroColumnViolated {
        index: usize,
        value: f64,
    },
    Lp {
        lp: StandardLp,
        cols: Vec<usize>,
    },
}

impl DualCheck {
    pub fn prepare(qp: &QpInstance, config: &Configuration) -> Result<Self> {
        config.validate_for(qp)?;
        let c = qp.num_constraints();
        let signs: Vec<f64> = (0..c).map(|j| config.sign(j)).collect();
        let mut cols = Vec::with_capacity(c);
        for j in 0..c {
            let zero = (0..qp.m()).all(|r| qp.a()[(r, j)] == 0.0);
            if !zero {
                cols.push(j);
                continue;
            }
            // The constraint reads 0 <= P_j B_j.
            let value = -signs[j] * qp.b()[j];
            if value > INFEASIBILITY_THRESHOLD {
                return Ok(Self {
                    signs,
                    num_constraints: c,
                    kind: DualCheckKind::ZeroColumnViolated { index: j, value },
                });
            }
        }
        let lp = dual_lp_over(qp, config, &cols, true)?;
        Ok(Self {
            signs,
            num_constraints: c,
            kind: DualCheckKind::Lp { lp, cols },
        })
    }

    pub fn lp(&self) -> Option<&StandardLp> {
        match &self.kind {
            DualCheckKind::Lp { lp, .. } => Some(lp),
            DualCheckKind::ZeroColumnViolated { .. } => None,
        }
    }

    pub fn run(&self) -> Result<FeasibilityVerdict> {
        let (lp, cols) = match &self.kind {
            DualCheckKind::ZeroColumnViolated { index, value } => {
                let mut lambda = vec![0.0; self.num_constraints];
                lambda[*index] = self.signs[*index];
                return Ok(FeasibilityVerdict {
                    status: FeasibilityStatus::Infeasible,
                    certificate: Certificate::Multipliers(DenseVector::new(lambda)?),
                    lp_optimum: Some(*value),
                });
            }
            DualCheckKind::Lp { lp, cols } => (lp, cols),
        };
        match solve_standard_lp(lp)? {
            LpOutcome::InfeasibleLp => Ok(FeasibilityVerdict {
                status: FeasibilityStatus::Feasible,
                certificate: Certificate::ConeIsTrivial,
                lp_optimum: None,
            }),
            LpOutcome::Optimal { value, .. } if value <= INFEASIBILITY_THRESHOLD => {
                Ok(FeasibilityVerdict {
                    status: FeasibilityStatus::Feasible,
                    certificate: Certificate::BoundedOptimum,
                    lp_optimum: Some(value),
                })
            }
            LpOutcome::Optimal { value, x, .. } => {
                let mut lambda = vec![0.0; self.num_constraints];
                for (k, &j) in cols.iter().enumerate() {
                    lambda[j] = self.signs[j] * x[k].max(0.0);
                }
                let total: f64 = lambda.iter().map(|v| v.abs()).sum();
                for v in &mut lambda {
                    *v /= total;
                }
                Ok(FeasibilityVerdict {
                    status: FeasibilityStatus::Infeasible,
                    certificate: Certificate::Multipliers(DenseVector::new(lambda)?),
                    lp_optimum: Some(value),
                })
            }
            // The cross-section Σμ = 1 is bounded.
            LpOutcome::Unbounded { .. } => Err(Error::NumericalBreakdown { iterations: 0 }),
        }
    }
}

/// Decides feasibility of the configured constraint set via the normalized cone LP.
pub fn check_feasibility(qp: &QpInstance, config: &Configuration) -> Result<FeasibilityVerdict> {
    DualCheck::prepare(qp, config)?.run()
}

/// Checks the hard constraints alone.
pub fn validate_hard(qp: &QpInstance) -> Result<FeasibilityVerdict> {
    let hard = qp.select_constraints(&qp.hard_set());
    check_feasibility(&hard, &Configuration::all_kept(hard.num_constraints()))
}

/// Solves the un-normalized cone LP `max -BᵀS(P)μ  s.t.  A S(P) μ = 0, μ >= 0`
/// directly. Its optimum is either 0 or unbounded.
pub fn solve_cone_lp(qp: &QpInstance, config: &Configuration) -> Result<LpOutcome> {
    config.validate_for(qp)?;
    let all: Vec<usize> = (0..qp.num_constraints()).collect();
    solve_standard_lp(&dual_lp_over(qp, config, &all, false)?)
}

/// The Phase-1 baseline with its LP already assembled.
#[derive(Debug, Clone)]
pub struct Phase1Check {
    lp: StandardLp,
    m: usize,
    c: usize,
}

impl Phase1Check {
    /// Variables `[u⁺ (m), u⁻ (m), z (C), s (C)]`, one row per constraint:
    /// `P_i A_iᵀ(u⁺ - u⁻) - z_i + s_i = P_i B_i`; maximize `-Σz`.
    pub fn prepare(qp: &QpInstance, config: &Configuration) -> Result<Self> {
        config.validate_for(qp)?;
        let (m, c) = (qp.m(), qp.num_constraints());
        let n = 2 * m + 2 * c;
        let mut eq = DenseMatrix::zeros(c, n);
        let mut rhs = vec![0.0; c];
        for i in 0..c {
            let p = config.sign(i);
            for r in 0..m {
                let v = p * qp.a()[(r, i)];
                eq[(i, r)] = v;
                eq[(i, m + r)] = -v;
            }
            eq[(i, 2 * m + i)] = -1.0;
            eq[(i, 2 * m + c + i)] = 1.0;
            rhs[i] = p * qp.b()[i];
        }
        let mut objective = vec![0.0; n];
        for v in &mut objective[2 * m..2 * m + c] {
            *v = -1.0;
        }
        let lp = StandardLp::new(DenseVector::new(objective)?, eq, DenseVector::new(rhs)?)?;
        Ok(Self { lp, m, c })
    }

    pub fn lp(&self) -> &StandardLp {
        &self.lp
    }

    pub fn run(&self) -> Result<FeasibilityVerdict> {
        match solve_standard_lp(&self.lp)? {
            LpOutcome::Optimal { value, x, .. } => {
                let total = -value;
                let z = x[2 * self.m..2 * self.m + self.c].to_vec();
                let (status, certificate) = if total <= INFEASIBILITY_THRESHOLD {
                    (FeasibilityStatus::Feasible, Certificate::BoundedOptimum)
                } else {
                    (
                        FeasibilityStatus::Infeasible,
                        Certificate::Violations(DenseVector::new(z)?),
                    )
                };
                Ok(FeasibilityVerdict {
                    status,
                    certificate,
                    lp_optimum: Some(total),
                })
            }
            // Always feasible (u = 0, z = max(0, -P B)) and bounded below by 0.
            _ => Err(Error::NumericalBreakdown { iterations: 0 }),
        }
    }
}

/// Phase-1 baseline: `min 1ᵀz  s.t.  S(P)Aᵀu - z <= S(P)B, z >= 0`.
pub fn phase1_check(qp: &QpInstance, config: &Configuration) -> Result<FeasibilityVerdict> {
    Phase1Check::prepare(qp, config)?.run()
}

/// Whether the dual-LP and Phase-1 routes return the same status.
pub fn verdicts_agree(qp: &QpInstance, config: &Configuration) -> Result<bool> {
    Ok(check_feasibility(qp, config)?.status == phase1_check(qp, config)?.status)
}

/// Lists every way `lambda` fails to be a sound infeasibility certificate
/// for the configured constraints. Empty means sound.
pub fn certificate_defects(qp: &QpInstance, config: &Configuration, lambda: &[f64]) -> Vec<String> {
    let mut defects = Vec::new();
    if lambda.len() != qp.num_constraints() {
        defects.push(format!(
            "length {} != {}",
            lambda.len(),
            qp.num_constraints()
        ));
        return defects;
    }
    for (j, &l) in lambda.iter().enumerate() {
        if config.sign(j) * l < 0.0 {
            defects.push(format!("λ[{j}] = {l} has the wrong sign"));
        }
    }
    let residual = crate::linalg::norm_inf(&qp.a().mul_vec(lambda));
    let limit = 1e-7 * (1.0 + qp.a().norm_inf());
    if residual > limit {
        defects.push(format!("‖Aλ‖∞ = {residual:e} > {limit:e}"));
    }
    let l1: f64 = lambda.iter().map(|v| v.abs()).sum();
    if (l1 - 1.0).abs() > 1e-9 {
        defects.push(format!("Σ|λ| = {l1}"));
    }
    let gap = -crate::linalg::dot(qp.b(), lambda);
    if gap < 1e-7 {
        defects.push(format!("-Bᵀλ = {gap:e} < 1e-7"));
    }
    defects
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(rows: &[Vec<f64>], b: &[f64]) -> QpInstance {
        QpInstance::feasibility_only(
            DenseMatrix::from_rows(rows).unwrap(),
            DenseVector::new(b.to_vec()).unwrap(),
        )
        .unwrap()
    }

    fn conflicting_interval() -> QpInstance {
        instance(&[vec![1.0, -1.0]], &[1.0, -2.0])
    }

    fn triangle() -> QpInstance {
        instance(
            &[vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]],
            &[0.0, 0.0, -1.0],
        )
    }

    fn cfg(s: &str) -> Configuration {
        s.parse().unwrap()
    }

    /// Feasibility of a 2-D polyhedron with a full-rank constraint matrix:
    /// nonempty iff one of its candidate vertices satisfies every constraint.
    fn vertex_enumeration_feasible(qp: &QpInstance, config: &Configuration) -> bool {
        let q = qp.apply_configuration(config);
        let c = q.num_constraints();
        let ok = |u: [f64; 2]| {
            (0..c).all(|i| q.a()[(0, i)] * u[0] + q.a()[(1, i)] * u[1] <= q.b()[i] + 1e-12)
        };
        for i in 0..c {
            for j in i + 1..c {
                let (a, b, cc, d) = (q.a()[(0, i)], q.a()[(1, i)], q.a()[(0, j)], q.a()[(1, j)]);
                let det = a * d - b * cc;
                if det.abs() < 1e-12 {
                    continue;
                }
                let u = [
                    (q.b()[i] * d - b * q.b()[j]) / det,
                    (a * q.b()[j] - cc * q.b()[i]) / det,
                ];
                if ok(u) {
                    return true;
                }
            }
        }
        false
    }

    /// Minimum total violation over a grid, refined around the best point.
    fn min_total_violation_2d(qp: &QpInstance, config: &Configuration) -> f64 {
        let q = qp.apply_configuration(config);
        let f = |u: [f64; 2]| -> f64 {
            (0..q.num_constraints())
                .map(|i| (q.a()[(0, i)] * u[0] + q.a()[(1, i)] * u[1] - q.b()[i]).max(0.0))
                .sum()
        };
        let mut best = ([0.0, 0.0], f64::INFINITY);
        let (mut center, mut half) = ([0.0, 0.0], 4.0);
        for _ in 0..30 {
            for a in 0..=40 {
                for b in 0..=40 {
                    let u = [
                        center[0] - half + 2.0 * half * a as f64 / 40.0,
                        center[1] - half + 2.0 * half * b as f64 / 40.0,
                    ];
                    let v = f(u);
                    if v < best.1 {
                        best = (u, v);
                    }
                }
            }
            center = best.0;
            half *= 0.5;
        }
        best.1
    }

    #[test]
    fn build_dual_lp_direct_substitution() {
        let lp = build_dual_lp(&conflicting_interval(), &cfg("++")).unwrap();
        assert_eq!(lp.objective().as_slice(), &[-1.0, 2.0]);
        assert_eq!(lp.eq_matrix().row(0), &[1.0, -1.0]);
        assert_eq!(lp.eq_matrix().row(1), &[1.0, 1.0]);
        assert_eq!(lp.eq_rhs().as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn build_dual_lp_flipped_column() {
        let lp = build_dual_lp(&conflicting_interval(), &cfg("+-")).unwrap();
        assert_eq!(lp.objective().as_slice(), &[-1.0, -2.0]);
        assert_eq!(lp.eq_matrix().row(0), &[1.0, 1.0]);
        assert_eq!(lp.eq_matrix().row(1), &[1.0, 1.0]);
    }

    #[test]
    fn build_dual_lp_identity_configuration() {
        let qp = triangle();
        let lp = build_dual_lp(&qp, &Configuration::all_kept(3)).unwrap();
        for r in 0..2 {
            assert_eq!(lp.eq_matrix().row(r), qp.a().row(r));
        }
        let neg_b: Vec<f64> = qp.b().iter().map(|v| -v).collect();
        assert_eq!(lp.objective().as_slice(), neg_b.as_slice());
    }

    #[test]
    fn conflicting_interval_has_half_half_certificate() {
        let v = check_feasibility(&conflicting_interval(), &cfg("++")).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Infeasible);
        let l = v.multipliers().unwrap();
        assert!((l[0] - 0.5).abs() < 1e-12 && (l[1] - 0.5).abs() < 1e-12);
        assert!((v.lp_optimum.unwrap() - 0.5).abs() < 1e-12);
        assert!(certificate_defects(&conflicting_interval(), &cfg("++"), l).is_empty());
    }

    #[test]
    fn nonempty_interval_feasible() {
        let qp = instance(&[vec![1.0, -1.0]], &[1.0, 0.0]);
        let v = check_feasibility(&qp, &cfg("++")).unwrap();
        assert!(v.is_feasible());
        assert!(v.lp_optimum.unwrap() <= INFEASIBILITY_THRESHOLD);
    }

    #[test]
    fn flipped_configuration_gives_trivial_cone() {
        let v = check_feasibility(&conflicting_interval(), &cfg("+-")).unwrap();
        assert!(v.is_feasible());
        assert_eq!(v.certificate, Certificate::ConeIsTrivial);
    }

    #[test]
    fn triangle_against_vertex_enumeration() {
        let qp = triangle();
        for s in ["+++", "++-"] {
            let oracle = vertex_enumeration_feasible(&qp, &cfg(s));
            let v = check_feasibility(&qp, &cfg(s)).unwrap();
            assert_eq!(v.is_feasible(), oracle, "config {s}");
        }
        assert!(!vertex_enumeration_feasible(&qp, &cfg("+++")));
        assert!(vertex_enumeration_feasible(&qp, &cfg("++-")));

        let v = check_feasibility(&qp, &cfg("+++")).unwrap();
        let l = v.multipliers().unwrap();
        for j in 0..3 {
            assert!((l[j] - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(certificate_defects(&qp, &cfg("+++"), l).is_empty());
    }

    #[test]
    fn phase1_conflicting_interval() {
        // 1-D scan of max(0, u - 1) + max(0, 2 - u).
        let scan = (0..=6000)
            .map(|k| -1.0 + k as f64 * 1e-3)
            .map(|u: f64| (u - 1.0).max(0.0) + (2.0 - u).max(0.0))
            .fold(f64::INFINITY, f64::min);
        assert!((scan - 1.0).abs() < 1e-12);
        let v = phase1_check(&conflicting_interval(), &cfg("++")).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Infeasible);
        assert!((v.lp_optimum.unwrap() - scan).abs() < 1e-9);
    }

    #[test]
    fn phase1_nonempty_interval() {
        let qp = instance(&[vec![1.0, -1.0]], &[1.0, 0.0]);
        let v = phase1_check(&qp, &cfg("++")).unwrap();
        assert!(v.is_feasible());
        assert!(v.lp_optimum.unwrap().abs() < 1e-12);
    }

    #[test]
    fn phase1_triangle() {
        let qp = triangle();
        let oracle = min_total_violation_2d(&qp, &cfg("+++"));
        // Total violation is constant (= 1) on the triangle 0 <= u1, u2, u1 + u2 <= 1.
        assert!((oracle - 1.0).abs() < 1e-9, "oracle {oracle}");
        let v = phase1_check(&qp, &cfg("+++")).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Infeasible);
        assert!((v.lp_optimum.unwrap() - 1.0).abs() < 1e-9);
        assert!(phase1_check(&qp, &cfg("++-")).unwrap().is_feasible());
    }

    #[test]
    fn verdicts_agree_on_examples() {
        assert!(verdicts_agree(&conflicting_interval(), &cfg("++")).unwrap());
        assert!(verdicts_agree(&instance(&[vec![1.0, -1.0]], &[1.0, 0.0]), &cfg("++")).unwrap());
        assert!(verdicts_agree(&triangle(), &cfg("+++")).unwrap());
        assert!(verdicts_agree(&triangle(), &cfg("++-")).unwrap());
    }

    #[test]
    fn zero_column_violated() {
        let qp = instance(&[vec![1.0, 0.0]], &[1.0, -0.5]);
        let v = check_feasibility(&qp, &cfg("++")).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Infeasible);
        assert_eq!(v.multipliers().unwrap().as_slice(), &[0.0, 1.0]);
        // Flipped, it reads 0 <= 0.5.
        assert!(check_feasibility(&qp, &cfg("+-")).unwrap().is_feasible());
        assert!(phase1_check(&qp, &cfg("+-")).unwrap().is_feasible());
    }

    #[test]
    fn zero_column_satisfied_is_dropped() {
        let qp = instance(&[vec![1.0, 0.0, -1.0]], &[1.0, 3.0, -2.0]);
        let v = check_feasibility(&qp, &cfg("+++")).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Infeasible);
        let l = v.multipliers().unwrap();
        assert_eq!(l[1], 0.0);
        assert!(certificate_defects(&qp, &cfg("+++"), l).is_empty());
    }

    #[test]
    fn no_constraints_is_feasible() {
        let qp =
            QpInstance::feasibility_only(DenseMatrix::zeros(2, 0), DenseVector::zeros(0)).unwrap();
        let v = check_feasibility(&qp, &Configuration::all_kept(0)).unwrap();
        assert!(v.is_feasible());
        assert!(phase1_check(&qp, &Configuration::all_kept(0))
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn hard_flip_is_rejected() {
        let qp = conflicting_interval()
            .with_kinds(vec![
                crate::ConstraintKind::Hard,
                crate::ConstraintKind::Soft,
            ])
            .unwrap();
        assert!(check_feasibility(&qp, &cfg("-+")).is_err());
        assert!(check_feasibility(&qp, &cfg("+-")).unwrap().is_feasible());
    }

    #[test]
    fn validate_hard_uses_hard_slice_only() {
        let qp = conflicting_interval()
            .with_kinds(vec![
                crate::ConstraintKind::Hard,
                crate::ConstraintKind::Soft,
            ])
            .unwrap();
        assert!(validate_hard(&qp).unwrap().is_feasible());
        let both_hard = qp.with_kinds(vec![crate::ConstraintKind::Hard; 2]).unwrap();
        assert!(!validate_hard(&both_hard).unwrap().is_feasible());
    }

    #[test]
    fn cone_lp_dichotomy_examples() {
        match solve_cone_lp(&conflicting_interval(), &cfg("++")).unwrap() {
            LpOutcome::Unbounded { ray } => assert!((ray[0] - ray[1]).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let qp = instance(&[vec![1.0, -1.0]], &[1.0, 0.0]);
        match solve_cone_lp(&qp, &cfg("++")).unwrap() {
            LpOutcome::Optimal { value, .. } => assert!(value.abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn certificate_defects_catches_bad_certificates() {
        let qp = conflicting_interval();
        let c = cfg("++");
        assert!(!certificate_defects(&qp, &c, &[0.5, -0.5]).is_empty());
        assert!(!certificate_defects(&qp, &c, &[0.7, 0.3]).is_empty());
        assert!(!certificate_defects(&qp, &c, &[1.0, 1.0]).is_empty());
    }
}
