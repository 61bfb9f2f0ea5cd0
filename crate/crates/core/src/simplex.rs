//! Dense two-phase revised simplex for `max c·x  s.t.  M x = r, x >= 0`.
//!
//! The basis inverse is kept explicitly and updated in product form after each
//! pivot; it is rebuilt from scratch only when the primal residual drifts.
//! Pricing is Dantzig's largest reduced cost until too many degenerate pivots
//! have been seen, after which Bland's rule takes over for the rest of the
//! solve.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf, DenseMatrix, DenseVector, LuFactors};

/// Reduced-cost (optimality) tolerance.
const OPT_TOL: f64 = 1e-9;
/// Smallest admissible pivot element in the ratio test.
const PIVOT_TOL: f64 = 1e-9;
/// Step length below which a pivot counts as degenerate.
const DEGENERATE_STEP: f64 = 1e-12;
/// Rows reducing below this fraction of their scale are dependent.
const DEPENDENT_ROW_TOL: f64 = 1e-10;
const RESIDUAL_CHECK_EVERY: usize = 50;

/// Equality-form LP: maximize `objective · x` subject to `eq_matrix x = eq_rhs`, `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    objective: DenseVector,
    eq_matrix: DenseMatrix,
    eq_rhs: DenseVector,
}

impl StandardLp {
    pub fn new(
        objective: DenseVector,
        eq_matrix: DenseMatrix,
        eq_rhs: DenseVector,
    ) -> Result<Self> {
        if objective.len() != eq_matrix.cols() || eq_rhs.len() != eq_matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "LP with {} costs, {}x{} matrix, {} right-hand sides",
                objective.len(),
                eq_matrix.rows(),
                eq_matrix.cols(),
                eq_rhs.len()
            )));
        }
        Ok(Self {
            objective,
            eq_matrix,
            eq_rhs,
        })
    }

    pub fn objective(&self) -> &DenseVector {
        &self.objective
    }

    pub fn eq_matrix(&self) -> &DenseMatrix {
        &self.eq_matrix
    }

    pub fn eq_rhs(&self) -> &DenseVector {
        &self.eq_rhs
    }

    pub fn num_vars(&self) -> usize {
        self.eq_matrix.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.eq_matrix.rows()
    }

    fn with_rows(&self, rows: &[usize]) -> Self {
        let n = self.num_vars();
        let mut m = DenseMatrix::zeros(rows.len(), n);
        for (k, &i) in rows.iter().enumerate() {
            m.row_mut(k).copy_from_slice(self.eq_matrix.row(i));
        }
        let r = rows.iter().map(|&i| self.eq_rhs[i]).collect();
        Self {
            objective: self.objective.clone(),
            eq_matrix: m,
            eq_rhs: DenseVector::new(r).expect("finite"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    InfeasibleLp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal {
        value: f64,
        x: DenseVector,
        /// Basic column per kept row. Indices `>= n` are artificial columns
        /// that could not be driven out (their row is redundant).
        basis: Vec<usize>,
        /// Original indices of the equality rows surviving presolve.
        kept_rows: Vec<usize>,
    },
    /// `ray >= 0`, `M ray = 0`, `c · ray > 0`.
    Unbounded {
        ray: DenseVector,
    },
    InfeasibleLp,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Unbounded { .. } => LpStatus::Unbounded,
            LpOutcome::InfeasibleLp => LpStatus::InfeasibleLp,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimplexStats {
    pub iterations: usize,
    pub degenerate_pivots: usize,
    pub bland_activated: bool,
    pub refactorizations: usize,
}

/// Removes numerically dependent equality rows.
pub fn presolve_rows(lp: &StandardLp) -> Result<StandardLp> {
    let kept = independent_rows(lp)?;
    Ok(lp.with_rows(&kept))
}

/// Indices of a maximal independent subset of rows, in original order.
fn independent_rows(lp: &StandardLp) -> Result<Vec<usize>> {
    let (k, n) = (lp.num_rows(), lp.num_vars());
    let m = lp.eq_matrix();
    let r = lp.eq_rhs();
    let rhs_tol = 1e-9 * (1.0 + r.norm_inf());

    // A row owning a column no other row touches can never take part in a
    // linear dependency, so only the remaining rows need elimination.
    let mut col_count = vec![0usize; n];
    for i in 0..k {
        for (j, &v) in m.row(i).iter().enumerate() {
            if v != 0.0 {
                col_count[j] += 1;
            }
        }
    }
    let has_private = |i: usize| {
        m.row(i)
            .iter()
            .zip(&col_count)
            .any(|(&v, &c)| v != 0.0 && c == 1)
    };

    // Echelon rows: (pivot column, reduced row, reduced rhs).
    let mut echelon: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    let mut kept = Vec::with_capacity(k);
    for i in 0..k {
        if has_private(i) {
            kept.push(i);
            continue;
        }
        let scale = norm_inf(m.row(i));
        let mut row = m.row(i).to_vec();
        let mut rhs = r[i];
        for (p, e_row, e_rhs) in &echelon {
            let f = row[*p] / e_row[*p];
            if f != 0.0 {
                for (a, b) in row.iter_mut().zip(e_row) {
                    *a -= f * b;
                }
                rhs -= f * e_rhs;
            }
        }
        let (pivot_col, pivot_abs) =
            row.iter().enumerate().fold(
                (0, 0.0),
                |acc, (j, v)| if v.abs() > acc.1 { (j, v.abs()) } else { acc },
            );
        if scale == 0.0 || pivot_abs < DEPENDENT_ROW_TOL * scale {
            if rhs.abs() > rhs_tol {
                return Err(Error::InconsistentRows {
                    row: i,
                    residual: rhs,
                });
            }
            continue;
        }
        echelon.push((pivot_col, row, rhs));
        kept.push(i);
    }
    Ok(kept)
}

pub fn solve_standard_lp(lp: &StandardLp) -> Result<LpOutcome> {
    solve_standard_lp_with_stats(lp).map(|(outcome, _)| outcome)
}

pub fn solve_standard_lp_with_stats(lp: &StandardLp) -> Result<(LpOutcome, SimplexStats)> {
    let kept_rows = match independent_rows(lp) {
        Ok(rows) => rows,
        Err(Error::InconsistentRows { .. }) => {
            return Ok((LpOutcome::InfeasibleLp, SimplexStats::default()))
        }
        Err(e) => return Err(e),
    };
    let reduced = lp.with_rows(&kept_rows);
    let mut solver = Solver::new(&reduced);
    let outcome = solver.run()?;
    let outcome = match outcome {
        LpOutcome::Optimal {
            value, x, basis, ..
        } => LpOutcome::Optimal {
            value,
            x,
            basis,
            kept_rows,
        },
        other => other,
    };
    Ok((outcome, solver.stats))
}

/// Sparse column: (row, value) pairs.
type Column = Vec<(usize, f64)>;

struct Solver {
    k: usize,
    n: usize,
    /// Structural columns followed by artificial columns.
    columns: Vec<Column>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: DenseMatrix,
    xb: Vec<f64>,
    stats: SimplexStats,
    cap: usize,
    bland: bool,
}

enum PhaseEnd {
    Optimal,
    Unbounded(usize, Vec<f64>),
}

impl Solver {
    fn new(lp: &StandardLp) -> Self {
        let (k, n) = (lp.num_rows(), lp.num_vars());
        let m = lp.eq_matrix();
        let mut rhs = lp.eq_rhs().to_vec();
        let sign: Vec<f64> = rhs
            .iter()
            .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
            .collect();
        for (v, s) in rhs.iter_mut().zip(&sign) {
            *v *= s;
        }
        let mut columns: Vec<Column> = vec![Vec::new(); n];
        for i in 0..k {
            for (j, &v) in m.row(i).iter().enumerate() {
                if v != 0.0 {
                    columns[j].push((i, v * sign[i]));
                }
            }
        }

        // Crash basis: a column with a single positive entry can start basic
        // in its row; only rows without one receive an artificial.
        let mut basis = vec![usize::MAX; k];
        let mut diag = vec![0.0; k];
        for (j, col) in columns.iter().enumerate() {
            if let [(i, v)] = col[..] {
                if v > 0.0 && (basis[i] == usize::MAX || v > diag[i]) {
                    basis[i] = j;
                    diag[i] = v;
                }
            }
        }
        for i in 0..k {
            if basis[i] == usize::MAX {
                basis[i] = columns.len();
                diag[i] = 1.0;
                columns.push(vec![(i, 1.0)]);
            }
        }
        let total = columns.len();
        let mut in_basis = vec![false; total];
        for &j in &basis {
            in_basis[j] = true;
        }
        let mut binv = DenseMatrix::zeros(k, k);
        for i in 0..k {
            binv[(i, i)] = 1.0 / diag[i];
        }
        let xb = (0..k).map(|i| rhs[i] / diag[i]).collect();
        let mut cost = lp.objective().to_vec();
        cost.resize(total, 0.0);

        Self {
            k,
            n,
            columns,
            cost,
            rhs,
            basis,
            in_basis,
            binv,
            xb,
            stats: SimplexStats::default(),
            cap: 50 * (n + k).max(1),
            bland: false,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n
    }

    fn run(&mut self) -> Result<LpOutcome> {
        let has_artificials = self.basis.iter().any(|&j| self.is_artificial(j));
        if has_artificials {
            let phase1_cost: Vec<f64> = (0..self.columns.len())
                .map(|j| if self.is_artificial(j) { -1.0 } else { 0.0 })
                .collect();
            // Phase 1 is bounded above by zero, so it always ends Optimal.
            let _ = self.optimize(&phase1_cost, true)?;
            self.refresh_if_drifted(true)?;
            let infeasibility: f64 = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(&j, _)| self.is_artificial(j))
                .map(|(_, &v)| v.max(0.0))
                .sum();
            if infeasibility > 1e-9 * (1.0 + norm_inf(&self.rhs)) {
                return Ok(LpOutcome::InfeasibleLp);
            }
            self.drive_out_artificials();
        }

        let cost = self.cost.clone();
        match self.optimize(&cost, false)? {
            PhaseEnd::Unbounded(entering, alpha) => {
                let mut ray = vec![0.0; self.n];
                ray[entering] = 1.0;
                for (i, &j) in self.basis.iter().enumerate() {
                    if !self.is_artificial(j) {
                        ray[j] = (-alpha[i]).max(0.0);
                    }
                }
                Ok(LpOutcome::Unbounded {
                    ray: DenseVector::new(ray)?,
                })
            }
            PhaseEnd::Optimal => {
                self.refresh_if_drifted(true)?;
                let mut x = vec![0.0; self.n];
                for (i, &j) in self.basis.iter().enumerate() {
                    if !self.is_artificial(j) {
                        x[j] = self.xb[i].max(0.0);
                    }
                }
                let value = dot(&self.cost[..self.n], &x);
                Ok(LpOutcome::Optimal {
                    value,
                    x: DenseVector::new(x)?,
                    basis: self.basis.clone(),
                    kept_rows: Vec::new(),
                })
            }
        }
    }

    /// Runs primal simplex iterations for the given cost vector.
    fn optimize(&mut self, cost: &[f64], phase_one: bool) -> Result<PhaseEnd> {
        let total = self.columns.len();
        let mut since_check = 0;
        loop {
            let y = self.duals(cost);
            let mut entering = None;
            let mut best = OPT_TOL;
            for j in 0..total {
                if self.in_basis[j] || (!phase_one && self.is_artificial(j)) {
                    continue;
                }
                let d = cost[j] - self.column_dot(j, &y);
                if d > best {
                    entering = Some(j);
                    if self.bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(PhaseEnd::Optimal);
            };

            let alpha = self.ftran(q);
            let leave = self.ratio_test(&alpha);
            let Some(r) = leave else {
                return Ok(PhaseEnd::Unbounded(q, alpha));
            };
            let step = (self.xb[r] / alpha[r]).max(0.0);
            self.pivot(q, r, &alpha, step);

            self.stats.iterations += 1;
            if step <= DEGENERATE_STEP {
                self.stats.degenerate_pivots += 1;
                if !self.bland && self.stats.degenerate_pivots > 3 * (self.n + self.k) {
                    self.bland = true;
                    self.stats.bland_activated = true;
                }
            }
            if self.stats.iterations > self.cap {
                return Err(Error::NumericalBreakdown {
                    iterations: self.stats.iterations,
                });
            }
            since_check += 1;
            if since_check >= RESIDUAL_CHECK_EVERY {
                since_check = 0;
                self.refresh_if_drifted(false)?;
            }
        }
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.k];
        for (i, &j) in self.basis.iter().enumerate() {
            let cb = cost[j];
            if cb != 0.0 {
                for (yv, b) in y.iter_mut().zip(self.binv.row(i)) {
                    *yv += cb * b;
                }
            }
        }
        y
    }

    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        self.columns[j].iter().map(|&(i, v)| v * y[i]).sum()
    }

    /// `B⁻¹ a_q`
    fn ftran(&self, q: usize) -> Vec<f64> {
        let mut alpha = vec![0.0; self.k];
        for &(row, v) in &self.columns[q] {
            for (i, a) in alpha.iter_mut().enumerate() {
                *a += self.binv[(i, row)] * v;
            }
        }
        alpha
    }

    fn ratio_test(&self, alpha: &[f64]) -> Option<usize> {
        let mut min_ratio = f64::INFINITY;
        for (i, &a) in alpha.iter().enumerate() {
            if a > PIVOT_TOL {
                min_ratio = min_ratio.min(self.xb[i].max(0.0) / a);
            }
        }
        if !min_ratio.is_finite() {
            return None;
        }
        let slack = 1e-12 * (1.0 + min_ratio);
        let ties = alpha
            .iter()
            .enumerate()
            .filter(|(i, &a)| a > PIVOT_TOL && self.xb[*i].max(0.0) / a <= min_ratio + slack);
        if self.bland {
            ties.min_by_key(|(i, _)| self.basis[*i]).map(|(i, _)| i)
        } else {
            ties.max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i)
        }
    }

    fn pivot(&mut self, q: usize, r: usize, alpha: &[f64], step: f64) {
        for (i, x) in self.xb.iter_mut().enumerate() {
            if i != r {
                *x -= step * alpha[i];
            }
        }
        self.xb[r] = step;

        let k = self.k;
        let inv_pivot = 1.0 / alpha[r];
        for v in self.binv.row_mut(r) {
            *v *= inv_pivot;
        }
        let pivot_row = self.binv.row(r).to_vec();
        for i in 0..k {
            let f = alpha[i];
            if i != r && f != 0.0 {
                for (v, p) in self.binv.row_mut(i).iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[q] = true;
        self.basis[r] = q;
    }

    /// Swaps zero-level artificials out of the basis where a structural
    /// column can replace them. Artificials left behind mark redundant rows.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.k {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let row = self.binv.row(r).to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n {
                if self.in_basis[j] {
                    continue;
                }
                let a = self.columns[j]
                    .iter()
                    .map(|&(i, v)| v * row[i])
                    .sum::<f64>();
                if a.abs() > 1e-7 && best.is_none_or(|(_, b)| a.abs() > b.abs()) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                let alpha = self.ftran(j);
                let step = self.xb[r] / alpha[r];
                self.pivot(j, r, &alpha, step);
            }
        }
    }

    fn residual(&self) -> f64 {
        let mut res = self.rhs.clone();
        for (i, &j) in self.basis.iter().enumerate() {
            for &(row, v) in &self.columns[j] {
                res[row] -= v * self.xb[i];
            }
        }
        norm_inf(&res)
    }

    /// Rebuilds the basis inverse when the primal residual has drifted (or
    /// unconditionally when `force` is set and any drift is measurable).
    fn refresh_if_drifted(&mut self, force: bool) -> Result<()> {
        let res = self.residual();
        let limit = if force { 1e-12 } else { 1e-9 } * (1.0 + norm_inf(&self.rhs));
        if res <= limit {
            return Ok(());
        }
        let mut b = DenseMatrix::zeros(self.k, self.k);
        for (col, &j) in self.basis.iter().enumerate() {
            for &(row, v) in &self.columns[j] {
                b[(row, col)] = v;
            }
        }
        let lu = match LuFactors::new(&b) {
            Ok(lu) => lu,
            Err(_) => {
                return Err(Error::NumericalBreakdown {
                    iterations: self.stats.iterations,
                })
            }
        };
        self.binv = lu.inverse();
        self.xb = lu.solve(&self.rhs);
        self.stats.refactorizations += 1;
        Ok(())
    }
}
