//! Dense two-phase simplex for the small linear programs used throughout the crate.
//!
//! Problems are stated in maximization form:
//!
//! ```text
//! maximize    c · x
//! subject to  A_eq x  = b_eq
//!             A_ub x <= b_ub
//!             lo <= x <= hi      (lo >= 0, hi may be +inf)
//! ```
//!
//! Pivoting follows Bland's rule (lowest eligible column enters, ties in the ratio
//! test go to the lowest basic variable index), so identical inputs always produce
//! bit-identical outputs.

use thiserror::Error;

/// Primal feasibility tolerance used by the phase one test and by [`LinearProgram::max_violation`].
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Reduced-cost threshold for entering candidates.
const REDUCED_COST_TOL: f64 = 1e-11;
/// Smallest admissible pivot magnitude.
const PIVOT_TOL: f64 = 1e-12;
/// Variable limit for [`enumerate_vertices`].
pub const VERTEX_ENUMERATION_LIMIT: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("vertex enumeration supports at most {limit} variables, got {got}")]
    TooManyVariables { limit: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; empty unless `status` is `Optimal`.
    pub x: Vec<f64>,
    /// `c · x` at the optimum, `NaN` when infeasible, `+inf` when unbounded.
    pub objective_value: f64,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_constraints: Vec<(Vec<f64>, f64)>,
    pub ub_constraints: Vec<(Vec<f64>, f64)>,
    pub var_bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// A program maximizing `objective` with every variable in `[0, +inf)`.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            eq_constraints: Vec::new(),
            ub_constraints: Vec::new(),
            var_bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn eq(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.eq_constraints.push((coeffs, rhs));
        self
    }

    /// `coeffs · x <= rhs`
    pub fn le(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.ub_constraints.push((coeffs, rhs));
        self
    }

    /// `coeffs · x >= rhs`, stored as `-coeffs · x <= -rhs`.
    pub fn ge(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.ub_constraints
            .push((coeffs.into_iter().map(|c| -c).collect(), -rhs));
        self
    }

    pub fn bounds(mut self, var: usize, lo: f64, hi: f64) -> Self {
        self.var_bounds[var] = (lo, hi);
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.var_bounds.len() != n {
            return Err(LpError::Malformed(format!(
                "{} variable bounds for {} variables",
                self.var_bounds.len(),
                n
            )));
        }
        let rows = self
            .eq_constraints
            .iter()
            .map(|r| ("equality", r))
            .chain(self.ub_constraints.iter().map(|r| ("inequality", r)));
        for (idx, (kind, (coeffs, rhs))) in rows.enumerate() {
            if coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "{kind} row {idx} has {} coefficients, expected {n}",
                    coeffs.len()
                )));
            }
            if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(LpError::Malformed(format!("{kind} row {idx} is not finite")));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Malformed("objective is not finite".into()));
        }
        for (j, &(lo, hi)) in self.var_bounds.iter().enumerate() {
            if !lo.is_finite() || lo < 0.0 || hi.is_nan() || lo > hi {
                return Err(LpError::Malformed(format!(
                    "variable {j} has invalid bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation of any row or bound at `x` (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (coeffs, rhs) in &self.eq_constraints {
            worst = worst.max((dot(coeffs, x) - rhs).abs());
        }
        for (coeffs, rhs) in &self.ub_constraints {
            worst = worst.max(dot(coeffs, x) - rhs);
        }
        for (&xj, &(lo, hi)) in x.iter().zip(&self.var_bounds) {
            worst = worst.max(lo - xj).max(xj - hi);
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense simplex tableau. Row `r` holds `width` entries followed by the right-hand side.
struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.width + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * (self.width + 1) + self.width]
    }

    fn pivot(&mut self, pr: usize, pc: usize, cost: &mut [f64]) {
        let stride = self.width + 1;
        let inv = 1.0 / self.at(pr, pc);
        {
            let row = &mut self.data[pr * stride..(pr + 1) * stride];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[pc] = 1.0;
        }
        let (before, rest) = self.data.split_at_mut(pr * stride);
        let (prow, after) = rest.split_at_mut(stride);
        for other in before
            .chunks_exact_mut(stride)
            .chain(after.chunks_exact_mut(stride))
        {
            let f = other[pc];
            if f != 0.0 {
                for (o, p) in other.iter_mut().zip(prow.iter()) {
                    *o -= f * p;
                }
                other[pc] = 0.0;
            }
        }
        let f = cost[pc];
        if f != 0.0 {
            for (o, p) in cost.iter_mut().zip(prow.iter()) {
                *o -= f * p;
            }
            cost[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Runs Bland's-rule iterations on the reduced-cost row `cost` (length `width + 1`,
    /// the last entry tracking minus the objective value). Only columns below
    /// `allowed` may enter. Returns `false` if the problem is unbounded.
    fn optimize(&mut self, cost: &mut [f64], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&c| cost[c] > REDUCED_COST_TOL);
            let Some(pc) = entering else {
                return true;
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio
                                || (ratio == bratio && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    }
                }
            }
            match best {
                None => return false,
                Some((pr, _)) => self.pivot(pr, pc, cost),
            }
        }
    }
}

/// Solves `lp` with a two-phase dense simplex.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Shift x = lo + y so every structural variable has a zero lower bound.
    let lo: Vec<f64> = lp.var_bounds.iter().map(|b| b.0).collect();

    // (coefficients over y, rhs, is_equality)
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for (coeffs, rhs) in &lp.eq_constraints {
        rows.push((coeffs.clone(), rhs - dot(coeffs, &lo), true));
    }
    for (coeffs, rhs) in &lp.ub_constraints {
        rows.push((coeffs.clone(), rhs - dot(coeffs, &lo), false));
    }
    for (j, &(l, h)) in lp.var_bounds.iter().enumerate() {
        if h.is_finite() {
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            rows.push((coeffs, h - l, false));
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| !r.2).count();
    // Artificial columns are needed for equalities and for negative-rhs inequalities.
    let needs_art: Vec<bool> = rows.iter().map(|(_, rhs, eq)| *eq || *rhs < 0.0).collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let width = n + n_slack + n_art;
    let stride = width + 1;

    let mut tab = Tableau {
        rows: m,
        width,
        data: vec![0.0; m * stride],
        basis: vec![usize::MAX; m],
    };
    let mut slack_col = n;
    let mut art_col = n + n_slack;
    for (r, (coeffs, rhs, is_eq)) in rows.iter().enumerate() {
        let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
        let base = r * stride;
        for (j, &c) in coeffs.iter().enumerate() {
            tab.data[base + j] = sign * c;
        }
        tab.data[base + width] = sign * rhs;
        if !is_eq {
            tab.data[base + slack_col] = sign;
            if sign > 0.0 {
                tab.basis[r] = slack_col;
            }
            slack_col += 1;
        }
        if needs_art[r] {
            tab.data[base + art_col] = 1.0;
            tab.basis[r] = art_col;
            art_col += 1;
        }
    }

    let art_start = n + n_slack;
    if n_art > 0 {
        // Phase one: maximize -sum(artificials). Reduced costs are the sums of the
        // artificial rows over the non-artificial columns.
        let mut cost = vec![0.0; stride];
        for r in 0..m {
            if tab.basis[r] >= art_start {
                let base = r * stride;
                for c in 0..art_start {
                    cost[c] += tab.data[base + c];
                }
                cost[width] += tab.data[base + width];
            }
        }
        tab.optimize(&mut cost, art_start);
        // cost[width] now equals the remaining sum of artificials.
        let infeasibility: f64 = (0..m)
            .filter(|&r| tab.basis[r] >= art_start)
            .map(|r| tab.rhs(r))
            .sum();
        if infeasibility > FEASIBILITY_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective_value: f64::NAN,
            });
        }
        // Drive degenerate artificials out of the basis; drop rows that are redundant.
        let mut r = 0;
        while r < tab.rows {
            if tab.basis[r] >= art_start {
                let pc = (0..art_start).find(|&c| tab.at(r, c).abs() > 1e-9);
                match pc {
                    Some(pc) => {
                        let mut dummy = vec![0.0; stride];
                        tab.pivot(r, pc, &mut dummy);
                        r += 1;
                    }
                    None => {
                        tab.data.drain(r * stride..(r + 1) * stride);
                        tab.basis.remove(r);
                        tab.rows -= 1;
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    // Phase two on the original objective (over y; the constant c · lo is added back).
    let mut cost = vec![0.0; stride];
    cost[..n].copy_from_slice(&lp.objective);
    for r in 0..tab.rows {
        let b = tab.basis[r];
        let cb = if b < n { lp.objective[b] } else { 0.0 };
        if cb != 0.0 {
            let base = r * stride;
            for c in 0..stride {
                cost[c] -= cb * tab.data[base + c];
            }
        }
    }
    if !tab.optimize(&mut cost, art_start) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective_value: f64::INFINITY,
        });
    }

    let mut x = lo;
    for r in 0..tab.rows {
        let b = tab.basis[r];
        if b < n {
            x[b] += tab.rhs(r).max(0.0);
        }
    }
    let objective_value = lp.objective_at(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective_value,
    })
}

/// All basic feasible solutions of `lp`, found by brute force over every choice of
/// `n` tight constraints. Intended as an independent optimum oracle in tests.
pub fn enumerate_vertices(lp: &LinearProgram) -> Result<Vec<Vec<f64>>, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    if n > VERTEX_ENUMERATION_LIMIT {
        return Err(LpError::TooManyVariables {
            limit: VERTEX_ENUMERATION_LIMIT,
            got: n,
        });
    }
    if n == 0 {
        return Ok(if lp.max_violation(&[]) <= FEASIBILITY_TOL {
            vec![Vec::new()]
        } else {
            Vec::new()
        });
    }

    let mut hyperplanes: Vec<(Vec<f64>, f64)> = Vec::new();
    hyperplanes.extend(lp.eq_constraints.iter().cloned());
    hyperplanes.extend(lp.ub_constraints.iter().cloned());
    for (j, &(lo, hi)) in lp.var_bounds.iter().enumerate() {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        hyperplanes.push((e.clone(), lo));
        if hi.is_finite() {
            hyperplanes.push((e, hi));
        }
    }

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::with_capacity(n);
    for_each_combination(hyperplanes.len(), n, &mut chosen, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| hyperplanes[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| hyperplanes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            let scale = 1.0 + x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if lp.max_violation(&x) <= 1e-9 * scale
                && !vertices
                    .iter()
                    .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= 1e-9 * scale))
            {
                vertices.push(x);
            }
        }
    });
    Ok(vertices)
}

fn for_each_combination(
    total: usize,
    k: usize,
    chosen: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    let start = chosen.last().map_or(0, |&l| l + 1);
    let remaining = k - chosen.len();
    for i in start..=total.saturating_sub(remaining) {
        if i >= total {
            break;
        }
        chosen.push(i);
        for_each_combination(total, k, chosen, f);
        chosen.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` for (near-)singular systems.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Best objective over [`enumerate_vertices`], or `None` when there are no vertices.
pub fn vertex_optimum(lp: &LinearProgram) -> Result<Option<f64>, LpError> {
    Ok(enumerate_vertices(lp)?
        .iter()
        .map(|v| lp.objective_at(v))
        .max_by(f64::total_cmp))
}
