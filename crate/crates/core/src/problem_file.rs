//! JSON problem files.
//!
//! ```json
//! {
//!   "m": 2,
//!   "H": [[1, 0], [0, 1]],
//!   "F": [0, 0],
//!   "constraints": [
//!     { "a": [1, 0], "b": 1, "kind": "hard" },
//!     { "a": [0, 1], "b": 0.5, "kind": "soft" }
//!   ]
//! }
//! ```
//!
//! Each record is the constraint `aᵀu <= b`. `H` defaults to the identity and
//! `F` to zeros.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{ConstraintKind, QpInstance};
use crate::linalg::{DenseMatrix, DenseVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub m: usize,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<f64>>>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<f64>>,
    pub constraints: Vec<ConstraintRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintRecord {
    pub a: Vec<f64>,
    pub b: f64,
    pub kind: ConstraintKind,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::ProblemFile(format!("field `{field}`: {msg}"))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let field = if path == "." {
                "<root>".to_string()
            } else {
                path
            };
            Error::ProblemFile(format!("field `{field}`: {inner}"))
        })
    }

    pub fn to_instance(&self) -> Result<QpInstance> {
        let m = self.m;
        if m == 0 {
            return Err(field_error("m", "must be at least 1"));
        }
        let h = match &self.h {
            None => DenseMatrix::identity(m),
            Some(rows) => {
                if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                    return Err(field_error("H", format!("expected a {m}x{m} array")));
                }
                DenseMatrix::from_rows(rows).map_err(|e| field_error("H", e))?
            }
        };
        let f = match &self.f {
            None => DenseVector::zeros(m),
            Some(v) if v.len() != m => {
                return Err(field_error(
                    "F",
                    format!("expected {m} entries, found {}", v.len()),
                ))
            }
            Some(v) => DenseVector::new(v.clone()).map_err(|e| field_error("F", e))?,
        };
        for (i, c) in self.constraints.iter().enumerate() {
            if c.a.len() != m {
                return Err(field_error(
                    &format!("constraints[{i}].a"),
                    format!("expected {m} entries, found {}", c.a.len()),
                ));
            }
            if c.a.iter().any(|v| !v.is_finite()) || !c.b.is_finite() {
                return Err(field_error(
                    &format!("constraints[{i}]"),
                    "non-finite entry",
                ));
            }
        }
        if let Err(e) = crate::linalg::cholesky_spd(&h) {
            return Err(field_error(
                "H",
                format!("must be symmetric positive definite ({e})"),
            ));
        }
        let rows: Vec<Vec<f64>> = self.constraints.iter().map(|c| c.a.clone()).collect();
        let b = self.constraints.iter().map(|c| c.b).collect();
        let kinds = self.constraints.iter().map(|c| c.kind).collect();
        QpInstance::from_constraint_rows(h, f, &rows, b, kinds)
    }

    pub fn from_instance(qp: &QpInstance) -> Self {
        let m = qp.m();
        Self {
            m,
            h: Some((0..m).map(|i| qp.h().row(i).to_vec()).collect()),
            f: Some(qp.f().to_vec()),
            constraints: (0..qp.num_constraints())
                .map(|i| ConstraintRecord {
                    a: qp.constraint(i),
                    b: qp.b()[i],
                    kind: qp.kinds()[i],
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Parses a problem document straight into an instance.
pub fn parse_problem(text: &str) -> Result<QpInstance> {
    ProblemFile::parse(text)?.to_instance()
}
