//! Dense bounded-variable primal simplex.
//!
//! Problems are stated as
//!
//! ```text
//!     minimize    c'x
//!     subject to  lo_i <= a_i'x <= hi_i      (inequality rows)
//!                 e_j'x  = b_j               (equality rows)
//!                 l <= x <= u
//! ```
//!
//! Each inequality row gets a bounded slack column, each infeasible row at
//! the starting point gets an artificial column, and a two-phase simplex on
//! the full tableau finds the optimum. Entering and leaving columns follow
//! Bland's rule so the pivot sequence is a deterministic function of the
//! input data.

use nalgebra::{DMatrix, DVector};

use super::{dot, SolverError};

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;

/// A two-sided linear row `lower <= coeffs'x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub coeffs: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedLp {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub inequalities: Vec<LinearRow>,
    pub equalities: Vec<(Vec<f64>, f64)>,
}

impl BoundedLp {
    /// New problem with the given objective and default bounds `[0, +inf)`.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            inequalities: Vec::new(),
            equalities: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn with_bounds(mut self, index: usize, lower: f64, upper: f64) -> Self {
        self.lower[index] = lower;
        self.upper[index] = upper;
        self
    }

    pub fn add_inequality(&mut self, coeffs: Vec<f64>, lower: f64, upper: f64) {
        self.inequalities.push(LinearRow { coeffs, lower, upper });
    }

    pub fn add_equality(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.equalities.push((coeffs, rhs));
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(SolverError::Dimension(format!(
                "{} objective coefficients but {} lower / {} upper bounds",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (index, (&lower, &upper)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lower > upper || lower.is_nan() || upper.is_nan() {
                return Err(SolverError::Bounds { index, lower, upper });
            }
        }
        for (i, row) in self.inequalities.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(SolverError::Dimension(format!(
                    "inequality row {i} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if row.lower > row.upper {
                return Err(SolverError::Bounds {
                    index: n + i,
                    lower: row.lower,
                    upper: row.upper,
                });
            }
        }
        for (i, (coeffs, _)) in self.equalities.iter().enumerate() {
            if coeffs.len() != n {
                return Err(SolverError::Dimension(format!(
                    "equality row {i} has {} coefficients, expected {n}",
                    coeffs.len()
                )));
            }
        }
        Ok(())
    }

    /// Largest violation of any bound or row at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for ((&xi, &lo), &hi) in x.iter().zip(&self.lower).zip(&self.upper) {
            worst = worst.max(lo - xi).max(xi - hi);
        }
        for row in &self.inequalities {
            let v = dot(&row.coeffs, x);
            worst = worst.max(row.lower - v).max(v - row.upper);
        }
        for (coeffs, rhs) in &self.equalities {
            worst = worst.max((dot(coeffs, x) - rhs).abs());
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    /// Row multipliers, inequality rows first, then equality rows.
    pub duals: Vec<f64>,
    /// Largest bound or row violation of `x`, recomputed from the input data.
    pub primal_residual: f64,
    /// Largest reduced-cost sign violation at the final basis.
    pub dual_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    Optimal,
    Unbounded,
}

/// Full-tableau simplex state. Columns are structural variables, then one
/// slack per inequality row, then artificials.
struct Tableau {
    m: usize,
    ncols: usize,
    /// Original constraint columns, row-major `m x ncols`.
    a: Vec<f64>,
    rhs: Vec<f64>,
    /// `B^-1 A`, row-major `m x ncols`.
    t: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<Option<usize>>,
    iterations: usize,
    max_iterations: usize,
}

impl Tableau {
    fn build(p: &BoundedLp) -> Self {
        let n = p.num_vars();
        let m_ineq = p.inequalities.len();
        let m = m_ineq + p.equalities.len();

        let mut x0 = vec![0.0; n];
        for j in 0..n {
            x0[j] = start_value(p.lower[j], p.upper[j]);
        }

        // Decide per row whether the slack can start basic or an artificial is needed.
        let mut needs_art = vec![0.0f64; m];
        let mut slack_value = vec![0.0; m_ineq];
        let mut slack_basic = vec![false; m_ineq];
        for (i, row) in p.inequalities.iter().enumerate() {
            let v = dot(&row.coeffs, &x0);
            if v >= row.lower - FEAS_TOL && v <= row.upper + FEAS_TOL {
                slack_value[i] = v;
                slack_basic[i] = true;
            } else {
                let bound = if v < row.lower { row.lower } else { row.upper };
                slack_value[i] = bound;
                // a'x - s + sign * art = 0
                needs_art[i] = if bound - v >= 0.0 { 1.0 } else { -1.0 };
            }
        }
        for (j, (coeffs, rhs)) in p.equalities.iter().enumerate() {
            let r = rhs - dot(coeffs, &x0);
            needs_art[m_ineq + j] = if r >= 0.0 { 1.0 } else { -1.0 };
        }
        let art_rows: Vec<usize> = (0..m).filter(|&i| needs_art[i] != 0.0).collect();
        let ncols = n + m_ineq + art_rows.len();

        let mut a = vec![0.0; m * ncols];
        let mut rhs = vec![0.0; m];
        for (i, row) in p.inequalities.iter().enumerate() {
            a[i * ncols..i * ncols + n].copy_from_slice(&row.coeffs);
            a[i * ncols + n + i] = -1.0;
        }
        for (j, (coeffs, b)) in p.equalities.iter().enumerate() {
            let i = m_ineq + j;
            a[i * ncols..i * ncols + n].copy_from_slice(coeffs);
            rhs[i] = *b;
        }
        let mut lo = p.lower.clone();
        let mut hi = p.upper.clone();
        let mut x = x0;
        for (i, row) in p.inequalities.iter().enumerate() {
            lo.push(row.lower);
            hi.push(row.upper);
            x.push(slack_value[i]);
        }
        let mut basis = vec![usize::MAX; m];
        for (i, &basic) in slack_basic.iter().enumerate() {
            if basic {
                basis[i] = n + i;
            }
        }
        for (k, &i) in art_rows.iter().enumerate() {
            let col = n + m_ineq + k;
            a[i * ncols + col] = needs_art[i];
            lo.push(0.0);
            hi.push(f64::INFINITY);
            x.push(0.0);
            basis[i] = col;
        }
        // Artificial values: residual of the row at the starting point.
        for &i in &art_rows {
            let col = basis[i];
            let row = &a[i * ncols..(i + 1) * ncols];
            let mut r = rhs[i];
            for (j, &aij) in row.iter().enumerate() {
                if j != col {
                    r -= aij * x[j];
                }
            }
            x[col] = (r / row[col]).max(0.0);
        }

        // B is diagonal with entries +-1, so B^-1 A is a row sign flip.
        let mut t = a.clone();
        for i in 0..m {
            let s = a[i * ncols + basis[i]];
            if s < 0.0 {
                for v in &mut t[i * ncols..(i + 1) * ncols] {
                    *v = -*v;
                }
            }
        }
        let mut row_of = vec![None; ncols];
        for (i, &b) in basis.iter().enumerate() {
            row_of[b] = Some(i);
        }
        Self {
            m,
            ncols,
            a,
            rhs,
            t,
            lo,
            hi,
            x,
            basis,
            row_of,
            iterations: 0,
            max_iterations: 200 * (m + ncols + 10),
        }
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
                for (dj, &tij) in d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, q: usize, d: &mut [f64]) {
        let nc = self.ncols;
        let piv = self.t[r * nc + q];
        for v in &mut self.t[r * nc..(r + 1) * nc] {
            *v /= piv;
        }
        let (before, rest) = self.t.split_at_mut(r * nc);
        let (prow, after) = rest.split_at_mut(nc);
        for row in before.chunks_exact_mut(nc).chain(after.chunks_exact_mut(nc)) {
            let f = row[q];
            if f != 0.0 {
                for (v, &p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[q] = 0.0;
            }
        }
        let f = d[q];
        if f != 0.0 {
            for (v, &p) in d.iter_mut().zip(prow.iter()) {
                *v -= f * p;
            }
            d[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.row_of[leaving] = None;
        self.basis[r] = q;
        self.row_of[q] = Some(r);
    }

    /// Runs simplex iterations for `cost` from the current basic feasible point.
    fn optimise(&mut self, cost: &[f64]) -> Result<Outcome, SolverError> {
        let nc = self.ncols;
        let dscale = cost.iter().fold(1.0f64, |a, c| a.max(c.abs()));
        let dtol = 1e-9 * dscale;
        let mut d = self.reduced_costs(cost);
        loop {
            if self.iterations >= self.max_iterations {
                return Err(SolverError::IterationLimit(self.max_iterations));
            }
            // Bland: lowest-index improving column.
            let mut entering = None;
            for j in 0..nc {
                if self.row_of[j].is_some() || self.hi[j] - self.lo[j] <= 0.0 {
                    continue;
                }
                if d[j] < -dtol && self.x[j] < self.hi[j] {
                    entering = Some((j, 1.0));
                    break;
                }
                if d[j] > dtol && self.x[j] > self.lo[j] {
                    entering = Some((j, -1.0));
                    break;
                }
            }
            let Some((q, dir)) = entering else {
                return Ok(Outcome::Optimal);
            };
            self.iterations += 1;

            let mut step = self.hi[q] - self.lo[q];
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let alpha = dir * self.t[i * nc + q];
                let b = self.basis[i];
                let limit = if alpha > PIVOT_TOL {
                    (self.x[b] - self.lo[b]).max(0.0) / alpha
                } else if alpha < -PIVOT_TOL {
                    (self.hi[b] - self.x[b]).max(0.0) / -alpha
                } else {
                    continue;
                };
                let eps = if step.is_finite() { 1e-12 * step.abs().max(1.0) } else { 0.0 };
                let better = if limit < step - eps {
                    true
                } else if limit <= step + eps {
                    // Ties: pivot beats a bound flip, then lowest column index leaves.
                    match leave {
                        None => true,
                        Some((r, _)) => b < self.basis[r],
                    }
                } else {
                    false
                };
                if better {
                    step = limit;
                    leave = Some((i, if alpha > 0.0 { self.lo[b] } else { self.hi[b] }));
                }
            }
            if !step.is_finite() {
                return Ok(Outcome::Unbounded);
            }
            for i in 0..self.m {
                let b = self.basis[i];
                self.x[b] -= dir * step * self.t[i * nc + q];
            }
            self.x[q] += dir * step;
            match leave {
                None => {
                    // Bound flip.
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                }
                Some((r, bound)) => {
                    let leaving = self.basis[r];
                    self.pivot(r, q, &mut d);
                    self.x[leaving] = bound;
                }
            }
        }
    }

    /// Recomputes basic values from the original data: `B x_B = b - N x_N`.
    fn refine(&mut self) {
        let (m, nc) = (self.m, self.ncols);
        if m == 0 {
            return;
        }
        let mut bmat = DMatrix::<f64>::zeros(m, m);
        let mut r = DVector::<f64>::from_column_slice(&self.rhs);
        for i in 0..m {
            for (k, &b) in self.basis.iter().enumerate() {
                bmat[(i, k)] = self.a[i * nc + b];
            }
            for j in 0..nc {
                if self.row_of[j].is_none() {
                    r[i] -= self.a[i * nc + j] * self.x[j];
                }
            }
        }
        if let Some(xb) = bmat.lu().solve(&r) {
            for (k, &b) in self.basis.iter().enumerate() {
                self.x[b] = xb[k];
            }
        }
    }

    /// Row duals `y` with `B'y = c_B`, and the largest reduced-cost violation.
    fn duals(&self, cost: &[f64]) -> (Vec<f64>, f64) {
        let (m, nc) = (self.m, self.ncols);
        if m == 0 {
            let mut worst: f64 = 0.0;
            for j in 0..nc {
                worst = worst.max(sign_violation(cost[j], self.x[j], self.lo[j], self.hi[j]));
            }
            return (Vec::new(), worst);
        }
        let mut bt = DMatrix::<f64>::zeros(m, m);
        let mut cb = DVector::<f64>::zeros(m);
        for (k, &b) in self.basis.iter().enumerate() {
            for i in 0..m {
                bt[(k, i)] = self.a[i * nc + b];
            }
            cb[k] = cost[b];
        }
        let y = bt.lu().solve(&cb).unwrap_or_else(|| DVector::zeros(m));
        let mut worst: f64 = 0.0;
        for j in 0..nc {
            if self.row_of[j].is_some() || self.hi[j] - self.lo[j] <= 0.0 {
                continue;
            }
            let mut dj = cost[j];
            for i in 0..m {
                dj -= self.a[i * nc + j] * y[i];
            }
            worst = worst.max(sign_violation(dj, self.x[j], self.lo[j], self.hi[j]));
        }
        (y.iter().copied().collect(), worst)
    }
}

fn start_value(lo: f64, hi: f64) -> f64 {
    if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        0.0
    }
}

/// Violation of the optimality sign condition for a nonbasic column.
fn sign_violation(d: f64, x: f64, lo: f64, hi: f64) -> f64 {
    let at_lo = (x - lo).abs() <= FEAS_TOL * lo.abs().max(1.0);
    let at_hi = (hi - x).abs() <= FEAS_TOL * hi.abs().max(1.0);
    match (at_lo, at_hi) {
        (true, true) => 0.0,
        (true, false) => (-d).max(0.0),
        (false, true) => d.max(0.0),
        (false, false) => d.abs(),
    }
}

/// Solves a bounded LP. Infeasible and unbounded problems are reported through
/// [`LpStatus`]; malformed input is an error.
pub fn solve_lp(p: &BoundedLp) -> Result<LpSolution, SolverError> {
    p.validate()?;
    let n = p.num_vars();
    let m_ineq = p.inequalities.len();
    let mut tab = Tableau::build(p);
    let nc = tab.ncols;
    let first_art = n + m_ineq;

    if nc > first_art {
        let mut phase1 = vec![0.0; nc];
        for c in &mut phase1[first_art..] {
            *c = 1.0;
        }
        tab.optimise(&phase1)?;
        let infeasibility: f64 = tab.x[first_art..].iter().sum();
        let scale = p
            .equalities
            .iter()
            .map(|(_, b)| b.abs())
            .chain(p.inequalities.iter().flat_map(|r| [r.lower.abs(), r.upper.abs()]))
            .filter(|v| v.is_finite())
            .fold(1.0f64, f64::max);
        if infeasibility > 1e-7 * scale {
            return Ok(finish(p, &tab, LpStatus::Infeasible, &phase1));
        }
        for j in first_art..nc {
            tab.hi[j] = 0.0;
            if tab.row_of[j].is_none() {
                tab.x[j] = 0.0;
            }
        }
    }

    let mut cost = vec![0.0; nc];
    cost[..n].copy_from_slice(&p.objective);
    let status = match tab.optimise(&cost)? {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
    };
    tab.refine();
    Ok(finish(p, &tab, status, &cost))
}

fn finish(p: &BoundedLp, tab: &Tableau, status: LpStatus, cost: &[f64]) -> LpSolution {
    let n = p.num_vars();
    let mut x = tab.x[..n].to_vec();
    // Snap values within tolerance of a bound onto it.
    for ((xi, &lo), &hi) in x.iter_mut().zip(&p.lower).zip(&p.upper) {
        if *xi < lo && lo - *xi <= 1e-9 * lo.abs().max(1.0) {
            *xi = lo;
        }
        if *xi > hi && *xi - hi <= 1e-9 * hi.abs().max(1.0) {
            *xi = hi;
        }
    }
    let (duals, dual_residual) = tab.duals(cost);
    LpSolution {
        status,
        objective: p.objective_value(&x),
        primal_residual: p.max_violation(&x),
        x,
        duals,
        dual_residual,
        iterations: tab.iterations,
    }
}
