//! Deterministic instance generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::instance::{ConstraintKind, QpInstance};
use crate::linalg::{DenseMatrix, DenseVector};

/// Benchmark grid: every `(m, C)` pair is run `trials` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub m_values: Vec<usize>,
    pub c_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            m_values: vec![2, 5, 10, 25, 50],
            c_values: vec![10, 50, 100, 250, 500, 1000],
            trials: 10,
            seed: 0,
        }
    }
}

impl GridSpec {
    /// Seed used for trial `trial` of every cell.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }
}

/// Random instance with i.i.d. standard normal `A` and `B`, `H = I`, `F = 0`
/// and every constraint soft.
///
/// The generator is ChaCha8 keyed by `seed` on a stream derived from `(m, C)`,
/// so the output is identical on every platform.
pub fn random_instance(m: usize, c: usize, seed: u64) -> QpInstance {
    assert!(m >= 1, "random_instance needs m >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 32) ^ c as u64);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let a: Vec<f64> = (0..m * c).map(|_| draw()).collect();
    let b: Vec<f64> = (0..c).map(|_| draw()).collect();
    QpInstance::feasibility_only(
        DenseMatrix::new(m, c, a).expect("finite normals"),
        DenseVector::new(b).expect("finite normals"),
    )
    .expect("identity H is SPD")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedInstance {
    pub time: f64,
    pub instance: QpInstance,
}

pub const SCENARIO_HARD_COUNT: usize = 4;
pub const SCENARIO_SOFT_COUNT: usize = 5;
pub const SCENARIO_HORIZON: f64 = 10.0;

/// Time-varying 2-D constraint-selection scenario.
///
/// Hard constraints (indices 0..4) are the unit box `|u_1| <= 1, |u_2| <= 1`.
/// Soft constraint `j = 1..=5` (index `3 + j`) is `a_j(t)ᵀu <= b_j` with
/// `a_j(t) = (cos θ_j, sin θ_j)`, `θ_j = 2πj/5 + 0.2t`, `b_j = -2` for
/// `j ∈ {3, 4}` and `0.5` otherwise. `H = I`, `F = (-1, -1)`.
///
/// Over the box `a_jᵀu >= -(|cos θ_j| + |sin θ_j|) >= -√2 > -2`, so soft
/// constraints 3 and 4 can never be satisfied while `u = 0` satisfies the rest.
pub fn cbf_scenario(t: f64) -> Result<TimedInstance> {
    if !(0.0..=SCENARIO_HORIZON).contains(&t) {
        return Err(Error::InvalidInstance(format!(
            "scenario time {t} outside [0, {SCENARIO_HORIZON}]"
        )));
    }
    let mut rows = vec![
        vec![1.0, 0.0],
        vec![-1.0, 0.0],
        vec![0.0, 1.0],
        vec![0.0, -1.0],
    ];
    let mut b = vec![1.0; SCENARIO_HARD_COUNT];
    let mut kinds = vec![ConstraintKind::Hard; SCENARIO_HARD_COUNT];
    for j in 1..=SCENARIO_SOFT_COUNT {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / 5.0 + 0.2 * t;
        rows.push(vec![theta.cos(), theta.sin()]);
        b.push(if j == 3 || j == 4 { -2.0 } else { 0.5 });
        kinds.push(ConstraintKind::Soft);
    }
    let instance = QpInstance::from_constraint_rows(
        DenseMatrix::identity(2),
        DenseVector::new(vec![-1.0, -1.0])?,
        &rows,
        b,
        kinds,
    )?;
    Ok(TimedInstance { time: t, instance })
}

/// Sample times `0, dt, 2dt, ...` up to and including `horizon`.
pub fn scenario_times(dt: f64, horizon: f64) -> Result<Vec<f64>> {
    if dt.is_nan() || dt <= 0.0 || !(0.0..=SCENARIO_HORIZON).contains(&horizon) {
        return Err(Error::InvalidInstance(format!(
            "need dt > 0 and 0 <= horizon <= {SCENARIO_HORIZON}"
        )));
    }
    let steps = (horizon / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| (k as f64 * dt).min(horizon)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{check_feasibility, phase1_check, validate_hard};
    use crate::instance::Configuration;

    #[test]
    fn random_instance_is_deterministic() {
        let a = random_instance(5, 20, 7);
        let b = random_instance(5, 20, 7);
        assert_eq!(a, b);
        assert_ne!(a, random_instance(5, 20, 8));
        assert_ne!(a.a().data()[..5], random_instance(5, 21, 7).a().data()[..5]);
    }

    #[test]
    fn random_instance_grid_extreme() {
        let qp = random_instance(50, 1000, 3);
        assert_eq!(qp.m(), 50);
        assert_eq!(qp.num_constraints(), 1000);
        assert!(qp.hard_set().is_empty());
    }

    #[test]
    fn default_grid() {
        let g = GridSpec::default();
        assert_eq!(g.m_values, vec![2, 5, 10, 25, 50]);
        assert_eq!(g.c_values, vec![10, 50, 100, 250, 500, 1000]);
        assert_eq!(g.trials, 10);
    }

    #[test]
    fn scenario_shape() {
        let s = cbf_scenario(0.0).unwrap().instance;
        assert_eq!(s.m(), 2);
        assert_eq!(s.num_constraints(), 9);
        assert_eq!(s.hard_set(), vec![0, 1, 2, 3]);
        assert_eq!(
            s.b().as_slice(),
            &[1.0, 1.0, 1.0, 1.0, 0.5, 0.5, -2.0, -2.0, 0.5]
        );
        assert!(cbf_scenario(10.5).is_err());
    }

    #[test]
    fn scenario_constraints_3_and_4_never_fit() {
        for t in scenario_times(0.5, 10.0).unwrap() {
            let qp = cbf_scenario(t).unwrap().instance;
            assert!(validate_hard(&qp).unwrap().is_feasible());
            for j in [6, 7] {
                // min over the box of a·u is -(|a_1| + |a_2|).
                let a = qp.constraint(j);
                let min_over_box = -(a[0].abs() + a[1].abs());
                assert!(min_over_box >= -2f64.sqrt() - 1e-12);
                assert!(min_over_box > qp.b()[j]);
            }
            let keeps_3 = Configuration::disregarding(9, &[7]);
            let keeps_4 = Configuration::disregarding(9, &[6]);
            assert!(!check_feasibility(&qp, &keeps_3).unwrap().is_feasible());
            assert!(!check_feasibility(&qp, &keeps_4).unwrap().is_feasible());
            let drop_34 = Configuration::disregarding(9, &[6, 7]);
            assert!(check_feasibility(&qp, &drop_34).unwrap().is_feasible());
            assert!(phase1_check(&qp, &drop_34).unwrap().is_feasible());
        }
    }

    #[test]
    fn scenario_same_pattern_different_data() {
        let a = cbf_scenario(0.0).unwrap().instance;
        let b = cbf_scenario(10.0).unwrap().instance;
        assert_ne!(a.a(), b.a());
        assert_eq!(a.b(), b.b());
    }

    #[test]
    fn times() {
        let ts = scenario_times(0.1, 10.0).unwrap();
        assert_eq!(ts.len(), 101);
        assert_eq!(*ts.last().unwrap(), 10.0);
        assert!(scenario_times(0.0, 1.0).is_err());
    }
}
