//! Primal active-set method for small convex quadratic programs.
//!
//! ```text
//!     minimize    1/2 x'Hx + c'x
//!     subject to  e_j'x = b_j,   lo_i <= a_i'x <= hi_i,   l <= x <= u
//! ```
//!
//! A feasible starting vertex comes from the LP solver. Strictly convex
//! problems are solved directly; merely semidefinite ones go through a
//! proximal-point outer loop whose subproblems are strictly convex.

use nalgebra::{DMatrix, DVector};

use super::lp::{solve_lp, BoundedLp, LinearRow, LpStatus};
use super::{dot, SolverError};

#[derive(Debug, Clone, PartialEq)]
pub struct BoxQp {
    /// Symmetric positive semidefinite quadratic term.
    pub hessian: DMatrix<f64>,
    pub linear: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub equalities: Vec<(Vec<f64>, f64)>,
    pub inequalities: Vec<LinearRow>,
}

impl BoxQp {
    /// New unconstrained problem (bounds `(-inf, +inf)`).
    pub fn new(hessian: DMatrix<f64>, linear: Vec<f64>) -> Self {
        let n = linear.len();
        Self {
            hessian,
            linear,
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
            equalities: Vec::new(),
            inequalities: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        0.5 * xv.dot(&(&self.hessian * &xv)) + dot(&self.linear, x)
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.as_lp(vec![0.0; self.num_vars()]).max_violation(x)
    }

    fn as_lp(&self, objective: Vec<f64>) -> BoundedLp {
        BoundedLp {
            objective,
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            inequalities: self.inequalities.clone(),
            equalities: self.equalities.clone(),
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        let n = self.num_vars();
        if self.hessian.nrows() != n || self.hessian.ncols() != n {
            return Err(SolverError::Dimension(format!(
                "hessian is {}x{}, expected {n}x{n}",
                self.hessian.nrows(),
                self.hessian.ncols()
            )));
        }
        let scale = self.hessian.amax().max(1.0);
        for i in 0..n {
            for j in 0..i {
                if (self.hessian[(i, j)] - self.hessian[(j, i)]).abs() > 1e-12 * scale {
                    return Err(SolverError::Dimension("hessian is not symmetric".into()));
                }
            }
        }
        self.as_lp(vec![0.0; n]).validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub status: QpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    /// Largest of stationarity, dual-sign and complementarity violations.
    pub kkt_residual: f64,
    /// Largest bound or row violation of `x`, recomputed from the input data.
    pub primal_residual: f64,
    pub iterations: usize,
}

/// Constraint in `a'x >= b` form (or `a'x = b` when `equality`).
struct Constraint {
    a: Vec<f64>,
    b: f64,
    equality: bool,
}

fn constraints_of(p: &BoxQp) -> Vec<Constraint> {
    let n = p.num_vars();
    let mut out = Vec::new();
    for (a, b) in &p.equalities {
        out.push(Constraint { a: a.clone(), b: *b, equality: true });
    }
    let unit = |i: usize, s: f64| {
        let mut e = vec![0.0; n];
        e[i] = s;
        e
    };
    for i in 0..n {
        if p.lower[i] == p.upper[i] {
            out.push(Constraint { a: unit(i, 1.0), b: p.lower[i], equality: true });
            continue;
        }
        if p.lower[i].is_finite() {
            out.push(Constraint { a: unit(i, 1.0), b: p.lower[i], equality: false });
        }
        if p.upper[i].is_finite() {
            out.push(Constraint { a: unit(i, -1.0), b: -p.upper[i], equality: false });
        }
    }
    for row in &p.inequalities {
        if row.lower == row.upper {
            out.push(Constraint { a: row.coeffs.clone(), b: row.lower, equality: true });
            continue;
        }
        if row.lower.is_finite() {
            out.push(Constraint { a: row.coeffs.clone(), b: row.lower, equality: false });
        }
        if row.upper.is_finite() {
            let a = row.coeffs.iter().map(|v| -v).collect();
            out.push(Constraint { a, b: -row.upper, equality: false });
        }
    }
    out
}

struct ActiveSetResult {
    x: Vec<f64>,
    multipliers: Vec<(usize, f64)>,
    iterations: usize,
}

fn active_set(
    h: &DMatrix<f64>,
    c: &[f64],
    cons: &[Constraint],
    mut x: Vec<f64>,
) -> Result<ActiveSetResult, SolverError> {
    let n = c.len();
    let mut working: Vec<usize> = (0..cons.len()).filter(|&i| cons[i].equality).collect();
    let max_iter = 20 * (n + cons.len()) + 100;
    let hscale = h.amax().max(1.0);
    for it in 0..max_iter {
        let w = working.len();
        let xv = DVector::from_column_slice(&x);
        let g = h * &xv + DVector::from_column_slice(c);
        let mut k = DMatrix::<f64>::zeros(n + w, n + w);
        k.view_mut((0, 0), (n, n)).copy_from(h);
        let mut rhs = DVector::<f64>::zeros(n + w);
        for i in 0..n {
            rhs[i] = -g[i];
        }
        for (r, &ci) in working.iter().enumerate() {
            for j in 0..n {
                k[(j, n + r)] = -cons[ci].a[j];
                k[(n + r, j)] = cons[ci].a[j];
            }
        }
        let sol = k.lu().solve(&rhs).ok_or(SolverError::DependentEqualities)?;
        let step: Vec<f64> = sol.iter().take(n).copied().collect();
        let lambda: Vec<f64> = sol.iter().skip(n).copied().collect();
        let xscale = x.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let pnorm = step.iter().fold(0.0f64, |a, v| a.max(v.abs()));

        if pnorm <= 1e-11 * xscale {
            let gscale = g.amax().max(hscale);
            let mut worst: Option<(usize, f64)> = None;
            for (r, &ci) in working.iter().enumerate() {
                if cons[ci].equality {
                    continue;
                }
                if lambda[r] < -1e-10 * gscale && worst.is_none_or(|(_, l)| lambda[r] < l) {
                    worst = Some((r, lambda[r]));
                }
            }
            match worst {
                None => {
                    let multipliers = working.iter().copied().zip(lambda).collect();
                    return Ok(ActiveSetResult { x, multipliers, iterations: it });
                }
                Some((r, _)) => {
                    working.remove(r);
                }
            }
            continue;
        }

        let mut candidates = Vec::new();
        for (ci, con) in cons.iter().enumerate() {
            if con.equality || working.contains(&ci) {
                continue;
            }
            let ap = dot(&con.a, &step);
            let anorm = con.a.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if ap < -1e-13 * anorm * pnorm.max(1.0) {
                let ratio = ((con.b - dot(&con.a, &x)) / ap).max(0.0);
                if ratio < 1.0 {
                    candidates.push((ratio, ci));
                }
            }
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        // A row in the span of the working normals is implied by them and can
        // only look blocking through rounding; admitting it makes the KKT
        // matrix singular.
        let span = working_span(cons, &working, n);
        let (alpha, blocking) = candidates
            .into_iter()
            .find(|&(_, ci)| !in_span(span.as_ref(), &cons[ci].a))
            .map_or((1.0, None), |(r, ci)| (r, Some(ci)));
        for (xi, pi) in x.iter_mut().zip(&step) {
            *xi += alpha * pi;
        }
        if let Some(ci) = blocking {
            working.push(ci);
        }
    }
    Err(SolverError::IterationLimit(max_iter))
}

/// Orthonormal basis of the working normals, or `None` when the set is empty.
fn working_span(cons: &[Constraint], working: &[usize], n: usize) -> Option<DMatrix<f64>> {
    if working.is_empty() {
        return None;
    }
    let a = DMatrix::from_fn(n, working.len(), |i, j| cons[working[j]].a[i]);
    let svd = a.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * top).count();
    Some(u.columns(0, rank).into_owned())
}

fn in_span(basis: Option<&DMatrix<f64>>, a: &[f64]) -> bool {
    let Some(q) = basis else { return false };
    let av = DVector::from_column_slice(a);
    let residual = &av - q * (q.transpose() * &av);
    residual.amax() <= 1e-9 * av.amax()
}

/// Solves a convex QP. Non-PSD quadratic terms are rejected; infeasible
/// problems are reported through [`QpStatus`].
pub fn solve_qp(p: &BoxQp) -> Result<QpSolution, SolverError> {
    p.validate()?;
    let n = p.num_vars();
    let scale = p.hessian.amax().max(1.0);
    let min_eig = if n == 0 {
        0.0
    } else {
        p.hessian.clone().symmetric_eigenvalues().min()
    };
    if min_eig < -1e-10 * scale {
        return Err(SolverError::NotPsd(min_eig));
    }

    let start = solve_lp(&p.as_lp(vec![0.0; n]))?;
    if start.status != LpStatus::Optimal {
        return Ok(QpSolution {
            status: QpStatus::Infeasible,
            objective: f64::NAN,
            primal_residual: p.max_violation(&start.x),
            x: start.x,
            kkt_residual: f64::NAN,
            iterations: 0,
        });
    }
    let cons = constraints_of(p);

    let result = if min_eig > 1e-10 * scale {
        active_set(&p.hessian, &p.linear, &cons, start.x)?
    } else {
        // Proximal point: x_{k+1} = argmin f(x) + rho/2 |x - x_k|^2.
        let rho = 1e-2 * scale;
        let hp = &p.hessian + DMatrix::<f64>::identity(n, n) * rho;
        let mut x = start.x;
        let mut total = 0;
        let mut last = None;
        for _ in 0..20_000 {
            let shifted: Vec<f64> = p.linear.iter().zip(&x).map(|(c, xi)| c - rho * xi).collect();
            let r = active_set(&hp, &shifted, &cons, x.clone())?;
            total += r.iterations;
            let moved = r.x.iter().zip(&x).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
            let xscale = x.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            x = r.x.clone();
            last = Some(r);
            if moved <= 1e-13 * xscale {
                break;
            }
        }
        let mut r = last.expect("at least one proximal iteration");
        r.iterations = total;
        r
    };

    let x = result.x;
    let kkt_residual = kkt_residual(p, &cons, &x, &result.multipliers);
    Ok(QpSolution {
        status: QpStatus::Optimal,
        objective: p.objective_value(&x),
        primal_residual: p.max_violation(&x),
        kkt_residual,
        x,
        iterations: result.iterations,
    })
}

fn kkt_residual(p: &BoxQp, cons: &[Constraint], x: &[f64], multipliers: &[(usize, f64)]) -> f64 {
    let xv = DVector::from_column_slice(x);
    let mut r = &p.hessian * &xv + DVector::from_column_slice(&p.linear);
    let mut worst: f64 = 0.0;
    for &(ci, l) in multipliers {
        let con = &cons[ci];
        for (j, &aj) in con.a.iter().enumerate() {
            r[j] -= l * aj;
        }
        if !con.equality {
            worst = worst.max(-l).max((l * (dot(&con.a, x) - con.b)).abs());
        }
    }
    worst.max(r.amax())
}
