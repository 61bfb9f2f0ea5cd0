#![allow(dead_code)]

use qpfeas_core::{Configuration, ConstraintKind, DenseMatrix, DenseVector, QpInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

/// `H = GᵀG + I` for a random `G`.
pub fn random_spd(rng: &mut ChaCha8Rng, m: usize) -> DenseMatrix {
    let g = DenseMatrix::new(m, m, normals(rng, m * m)).unwrap();
    let mut h = g.transpose().matmul(&g);
    for i in 0..m {
        h[(i, i)] += 1.0;
    }
    h
}

/// Random QP with a random objective and a random hard/soft split.
pub fn random_qp(rng: &mut ChaCha8Rng, m: usize, c: usize) -> QpInstance {
    let h = random_spd(rng, m);
    let f = DenseVector::new(normals(rng, m)).unwrap();
    let a = DenseMatrix::new(m, c, normals(rng, m * c)).unwrap();
    let b = DenseVector::new(normals(rng, c)).unwrap();
    let kinds = (0..c)
        .map(|_| {
            if rng.random_bool(0.3) {
                ConstraintKind::Hard
            } else {
                ConstraintKind::Soft
            }
        })
        .collect();
    QpInstance::new(h, f, a, b, kinds).unwrap()
}

/// Random configuration that keeps every hard constraint.
pub fn random_config(rng: &mut ChaCha8Rng, qp: &QpInstance) -> Configuration {
    let signs = (0..qp.num_constraints())
        .map(|i| {
            if qp.is_hard(i) || rng.random_bool(0.5) {
                1
            } else {
                -1
            }
        })
        .collect();
    Configuration::from_signs(signs).unwrap()
}
