mod common;

use common::{normals, rng};
use qpfeas_core::linalg::dot;
use qpfeas_core::simplex::{solve_standard_lp_with_stats, LpOutcome};
use qpfeas_core::{solve_linear, DenseMatrix, DenseVector, StandardLp};
use rand::Rng;

fn random_lp(seed: u64, bounded: bool) -> (StandardLp, Vec<f64>) {
    let mut r = rng(seed);
    let n = r.random_range(2..=200);
    let k = r.random_range(1..=(n / 2).clamp(1, 60));
    let mut entries = normals(&mut r, k * n);
    if bounded {
        entries[..n].fill(1.0);
    }
    let m = DenseMatrix::new(k, n, entries).unwrap();
    let x0: Vec<f64> = (0..n)
        .map(|_| {
            if r.random_bool(0.3) {
                0.0
            } else {
                r.random::<f64>()
            }
        })
        .collect();
    let rhs = m.mul_vec(&x0);
    let c = normals(&mut r, n);
    let lp = StandardLp::new(
        DenseVector::new(c).unwrap(),
        m,
        DenseVector::new(rhs).unwrap(),
    )
    .unwrap();
    (lp, x0)
}

fn residual(lp: &StandardLp, x: &[f64]) -> f64 {
    let mx = lp.eq_matrix().mul_vec(x);
    mx.iter()
        .zip(lp.eq_rhs().iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Checks optimality through duals recomputed from the final basis.
fn check_optimal(lp: &StandardLp, value: f64, x: &[f64], basis: &[usize], kept: &[usize]) -> bool {
    let n = lp.num_vars();
    let scale = 1.0 + lp.eq_matrix().max_abs() + lp.objective().norm_inf();
    assert!(x.iter().all(|&v| v >= -1e-9));
    assert!(residual(lp, x) <= 1e-7 * (1.0 + lp.eq_rhs().norm_inf()));
    assert!((dot(lp.objective(), x) - value).abs() <= 1e-7 * (1.0 + value.abs()));
    if basis.iter().any(|&j| j >= n) {
        return false;
    }
    let k = kept.len();
    let mut bt = DenseMatrix::zeros(k, k);
    for (col, &j) in basis.iter().enumerate() {
        for (row, &i) in kept.iter().enumerate() {
            bt[(col, row)] = lp.eq_matrix()[(i, j)];
        }
    }
    let cb: Vec<f64> = basis.iter().map(|&j| lp.objective()[j]).collect();
    let y_kept = solve_linear(&bt, &cb).unwrap();
    let mut y = vec![0.0; lp.num_rows()];
    for (row, &i) in kept.iter().enumerate() {
        y[i] = y_kept[row];
    }
    let yscale = 1.0 + y.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mty = lp.eq_matrix().tr_mul_vec(&y);
    for j in 0..n {
        let reduced = lp.objective()[j] - mty[j];
        assert!(
            reduced <= 1e-7 * scale * yscale,
            "reduced cost {reduced} at {j}"
        );
        if x[j] > 1e-7 {
            assert!(reduced.abs() <= 1e-7 * scale * yscale, "slackness at {j}");
        }
    }
    let dual_obj = dot(lp.eq_rhs(), &y);
    assert!(
        (dual_obj - value).abs() <= 1e-6 * (1.0 + value.abs()),
        "{dual_obj} vs {value}"
    );
    true
}

#[test]
fn random_lps_respect_iteration_cap_and_optimality() {
    let mut dual_checked = 0;
    let mut optimal = 0;
    let mut unbounded = 0;
    for seed in 0..120u64 {
        let bounded = seed % 2 == 0;
        let (lp, x0) = random_lp(seed, bounded);
        let (out, stats) = solve_standard_lp_with_stats(&lp).unwrap();
        let cap = 50 * (lp.num_vars() + lp.num_rows());
        assert!(
            stats.iterations <= cap,
            "seed {seed}: {} > {cap}",
            stats.iterations
        );
        match out {
            LpOutcome::Optimal {
                value,
                x,
                basis,
                kept_rows,
            } => {
                optimal += 1;
                assert!(value >= dot(lp.objective(), &x0) - 1e-7 * (1.0 + value.abs()));
                if check_optimal(&lp, value, &x, &basis, &kept_rows) {
                    dual_checked += 1;
                }
            }
            LpOutcome::Unbounded { ray } => {
                assert!(!bounded, "seed {seed}: bounded LP reported unbounded");
                unbounded += 1;
                assert!(ray.iter().all(|&v| v >= -1e-12));
                assert!(dot(lp.objective(), &ray) > 0.0);
                let moved: Vec<f64> = x0
                    .iter()
                    .zip(ray.iter())
                    .map(|(a, d)| a + 10.0 * d)
                    .collect();
                assert!(moved.iter().all(|&v| v >= -1e-10));
                assert!(residual(&lp, &moved) <= 1e-7 * (1.0 + lp.eq_rhs().norm_inf()));
                assert!(dot(lp.objective(), &moved) > dot(lp.objective(), &x0));
            }
            LpOutcome::InfeasibleLp => panic!("seed {seed}: x0 is feasible"),
        }
    }
    assert!(
        optimal >= 60 && unbounded >= 10,
        "{optimal} optimal, {unbounded} unbounded"
    );
    assert!(dual_checked >= 55, "only {dual_checked} bases checked");
}

#[test]
fn infeasible_sum_row() {
    for seed in 0..20u64 {
        let mut r = rng(1000 + seed);
        let n = r.random_range(2..=50);
        let mut entries = normals(&mut r, 3 * n);
        entries[..n].fill(1.0);
        let lp = StandardLp::new(
            DenseVector::new(normals(&mut r, n)).unwrap(),
            DenseMatrix::new(3, n, entries).unwrap(),
            DenseVector::new(vec![-1.0, 0.3, 0.2]).unwrap(),
        )
        .unwrap();
        let (out, _) = solve_standard_lp_with_stats(&lp).unwrap();
        assert_eq!(out, LpOutcome::InfeasibleLp);
    }
}

#[test]
fn duplicated_rows_are_redundant_not_infeasible() {
    let (lp, _) = random_lp(7, true);
    let k = lp.num_rows();
    let n = lp.num_vars();
    let mut data = lp.eq_matrix().data().to_vec();
    data.extend_from_slice(lp.eq_matrix().row(k - 1));
    let mut rhs = lp.eq_rhs().to_vec();
    rhs.push(rhs[k - 1]);
    let doubled = StandardLp::new(
        lp.objective().clone(),
        DenseMatrix::new(k + 1, n, data).unwrap(),
        DenseVector::new(rhs).unwrap(),
    )
    .unwrap();
    let (a, _) = solve_standard_lp_with_stats(&lp).unwrap();
    let (b, _) = solve_standard_lp_with_stats(&doubled).unwrap();
    match (a, b) {
        (LpOutcome::Optimal { value: va, .. }, LpOutcome::Optimal { value: vb, .. }) => {
            assert!((va - vb).abs() <= 1e-7 * (1.0 + va.abs()));
        }
        other => panic!("{other:?}"),
    }
}
