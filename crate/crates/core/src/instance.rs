//! Problem data for `min uᵀHu + Fᵀu  s.t.  Aᵀu <= B` with a hard/soft split of
//! the constraints, and sign configurations over those constraints.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_spd, DenseMatrix, DenseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Hard,
    Soft,
}

/// A strictly convex QP with `C` linear inequality constraints.
///
/// Constraint `i` is `A_iᵀ u <= B_i`, where `A_i` is the i-th column of the
/// `m x C` matrix `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpInstance {
    h: DenseMatrix,
    h_chol: DenseMatrix,
    f: DenseVector,
    a: DenseMatrix,
    b: DenseVector,
    kinds: Vec<ConstraintKind>,
}

impl QpInstance {
    pub fn new(
        h: DenseMatrix,
        f: DenseVector,
        a: DenseMatrix,
        b: DenseVector,
        kinds: Vec<ConstraintKind>,
    ) -> Result<Self> {
        let m = a.rows();
        let c = a.cols();
        if m == 0 {
            return Err(Error::InvalidInstance(
                "decision dimension m must be >= 1".into(),
            ));
        }
        if h.rows() != m || h.cols() != m {
            return Err(Error::InvalidInstance(format!(
                "H is {}x{}, expected {m}x{m}",
                h.rows(),
                h.cols()
            )));
        }
        if f.len() != m {
            return Err(Error::InvalidInstance(format!(
                "F has length {}, expected {m}",
                f.len()
            )));
        }
        if b.len() != c || kinds.len() != c {
            return Err(Error::InvalidInstance(format!(
                "B has length {} and {} kinds given, expected {c}",
                b.len(),
                kinds.len()
            )));
        }
        let h_chol = cholesky_spd(&h).map_err(|e| Error::InvalidInstance(format!("H: {e}")))?;
        Ok(Self {
            h,
            h_chol,
            f,
            a,
            b,
            kinds,
        })
    }

    /// `H = I`, `F = 0`, every constraint soft.
    pub fn feasibility_only(a: DenseMatrix, b: DenseVector) -> Result<Self> {
        let m = a.rows();
        let c = a.cols();
        Self::new(
            DenseMatrix::identity(m),
            DenseVector::zeros(m),
            a,
            b,
            vec![ConstraintKind::Soft; c],
        )
    }

    /// Builds from constraint rows `a_iᵀ u <= b_i`.
    pub fn from_constraint_rows(
        h: DenseMatrix,
        f: DenseVector,
        rows: &[Vec<f64>],
        b: Vec<f64>,
        kinds: Vec<ConstraintKind>,
    ) -> Result<Self> {
        let m = h.rows();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidInstance(format!(
                "constraint rows must have length {m}"
            )));
        }
        let a = if rows.is_empty() {
            DenseMatrix::zeros(m, 0)
        } else {
            DenseMatrix::from_rows(rows)?.transpose()
        };
        Self::new(h, f, a, DenseVector::new(b)?, kinds)
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn num_constraints(&self) -> usize {
        self.a.cols()
    }

    pub fn h(&self) -> &DenseMatrix {
        &self.h
    }

    pub fn h_cholesky(&self) -> &DenseMatrix {
        &self.h_chol
    }

    pub fn f(&self) -> &DenseVector {
        &self.f
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseVector {
        &self.b
    }

    pub fn kinds(&self) -> &[ConstraintKind] {
        &self.kinds
    }

    pub fn is_hard(&self, i: usize) -> bool {
        self.kinds[i] == ConstraintKind::Hard
    }

    pub fn hard_set(&self) -> Vec<usize> {
        (0..self.num_constraints())
            .filter(|&i| self.is_hard(i))
            .collect()
    }

    pub fn soft_set(&self) -> Vec<usize> {
        (0..self.num_constraints())
            .filter(|&i| !self.is_hard(i))
            .collect()
    }

    /// Constraint normal `A_i`.
    pub fn constraint(&self, i: usize) -> Vec<f64> {
        self.a.column(i)
    }

    pub fn with_objective(&self, h: DenseMatrix, f: DenseVector) -> Result<Self> {
        Self::new(h, f, self.a.clone(), self.b.clone(), self.kinds.clone())
    }

    pub fn with_rhs(&self, b: DenseVector) -> Result<Self> {
        Self::new(
            self.h.clone(),
            self.f.clone(),
            self.a.clone(),
            b,
            self.kinds.clone(),
        )
    }

    pub fn with_kinds(&self, kinds: Vec<ConstraintKind>) -> Result<Self> {
        Self::new(
            self.h.clone(),
            self.f.clone(),
            self.a.clone(),
            self.b.clone(),
            kinds,
        )
    }

    /// Keeps only the listed constraints, in the given order.
    pub fn select_constraints(&self, idx: &[usize]) -> Self {
        Self {
            h: self.h.clone(),
            h_chol: self.h_chol.clone(),
            f: self.f.clone(),
            a: self.a.select_columns(idx),
            b: DenseVector::new(idx.iter().map(|&i| self.b[i]).collect()).expect("finite"),
            kinds: idx.iter().map(|&i| self.kinds[i]).collect(),
        }
    }

    /// Removes the listed constraints.
    pub fn drop_constraints(&self, idx: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.num_constraints())
            .filter(|i| !idx.contains(i))
            .collect();
        self.select_constraints(&keep)
    }

    /// Multiplies constraint `i` (both `A_i` and `B_i`) by `s`.
    pub fn scale_constraint(&self, i: usize, s: f64) -> Self {
        let mut out = self.clone();
        for r in 0..out.m() {
            out.a[(r, i)] *= s;
        }
        out.b[i] *= s;
        out
    }

    /// The instance with every disregarded constraint replaced by its
    /// complementary half-space, i.e. `S(P)Aᵀu <= S(P)B`.
    pub fn apply_configuration(&self, config: &Configuration) -> Self {
        let mut out = self.clone();
        for (i, s) in config.signs().iter().enumerate() {
            if *s < 0 {
                for r in 0..out.m() {
                    out.a[(r, i)] = -out.a[(r, i)];
                }
                out.b[i] = -out.b[i];
            }
        }
        out
    }
}

/// Sign vector over the constraints: `+1` keeps a constraint, `-1` disregards it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    signs: Vec<i8>,
}

impl Configuration {
    /// Every constraint kept.
    pub fn all_kept(c: usize) -> Self {
        Self { signs: vec![1; c] }
    }

    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::InvalidConfiguration(format!(
                "sign {bad} is not +1 or -1"
            )));
        }
        Ok(Self { signs })
    }

    /// Everything kept except the listed constraints.
    pub fn disregarding(c: usize, idx: &[usize]) -> Self {
        let mut cfg = Self::all_kept(c);
        for &i in idx {
            cfg.signs[i] = -1;
        }
        cfg
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, i: usize) -> f64 {
        f64::from(self.signs[i])
    }

    pub fn is_kept(&self, i: usize) -> bool {
        self.signs[i] > 0
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.signs[i] = -out.signs[i];
        out
    }

    pub fn disregarded(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_kept(i)).collect()
    }

    /// Number of constraints that are not disregarded.
    pub fn level(&self) -> usize {
        self.signs.iter().filter(|s| **s > 0).count()
    }

    /// Checks the length and that no hard constraint is disregarded.
    pub fn validate_for(&self, qp: &QpInstance) -> Result<()> {
        if self.len() != qp.num_constraints() {
            return Err(Error::InvalidConfiguration(format!(
                "configuration has {} signs for {} constraints",
                self.len(),
                qp.num_constraints()
            )));
        }
        if let Some(i) = (0..self.len()).find(|&i| qp.is_hard(i) && !self.is_kept(i)) {
            return Err(Error::InvalidConfiguration(format!(
                "hard constraint {i} cannot be disregarded"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    /// Parses strings such as `"++-+"`.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::InvalidConfiguration(format!(
                    "unexpected character {other:?} (use '+' or '-')"
                ))),
            })
            .collect::<Result<Vec<i8>>>()
            .map(|signs| Self { signs })
    }
}
