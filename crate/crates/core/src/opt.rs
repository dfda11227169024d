//! The four optimization routines of one UCB round: the constrained welfare optimum
//! `Y^mu`, the robust welfare LP, the grid bound `max_{mu in G} <Y^mu, eps>`, and the
//! per-cell exploration LPs with their welfare budget.
//!
//! Allocations are flattened row-major, so LP variable `i * m + k` is `X[i][k]`.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{ConfidenceBox, ConstraintSet};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::model::{check_shape, frobenius_unchecked, Allocation, Matrix, ValueMatrix};

/// Default number of grid matrices evaluated per round.
pub const DEFAULT_GRID_CAP: usize = 512;
/// Feasibility relaxation subtracted from the exploration budget.
pub const BUDGET_RELAXATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub spacing: f64,
    /// `usize::MAX` disables subsampling.
    pub cap: usize,
    pub sample_seed: u64,
}

impl GridSpec {
    /// Spacing `1/sqrt(T)` with the default cap.
    pub fn for_horizon(horizon: usize, sample_seed: u64) -> Self {
        GridSpec {
            spacing: 1.0 / (horizon.max(1) as f64).sqrt(),
            cap: DEFAULT_GRID_CAP,
            sample_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be positive, got {}",
                self.spacing
            )));
        }
        if self.cap == 0 {
            return Err(Error::InvalidArgument("grid cap must be >= 1".into()));
        }
        Ok(())
    }
}

fn column_sum_lp(objective: Vec<f64>, n: usize, m: usize) -> LinearProgram {
    let mut lp = LinearProgram::maximize(objective);
    for k in 0..m {
        let mut row = vec![0.0; n * m];
        for i in 0..n {
            row[i * m + k] = 1.0;
        }
        lp = lp.eq(row, 1.0);
    }
    lp
}

fn with_rows(mut lp: LinearProgram, rows: &[Matrix], thresholds: &[f64]) -> LinearProgram {
    for (b, &c) in rows.iter().zip(thresholds) {
        lp = lp.ge(b.as_slice().to_vec(), c);
    }
    lp
}

fn to_allocation(x: Vec<f64>, n: usize, m: usize) -> Result<Allocation> {
    Allocation::renormalized(Matrix::from_vec(n, m, x)?)
}

/// The LP whose optimum is `Y^mu`.
pub fn welfare_lp(mu: &ValueMatrix, cs: &ConstraintSet) -> Result<LinearProgram> {
    let rows = cs.coefficients(mu)?;
    Ok(with_rows(
        column_sum_lp(mu.as_slice().to_vec(), cs.n, cs.m),
        &rows,
        &cs.thresholds(),
    ))
}

/// Welfare-maximizing allocation subject to the constraints at `mu`.
#[allow(non_snake_case)]
pub fn solve_Y(mu: &ValueMatrix, cs: &ConstraintSet) -> Result<Allocation> {
    let sol = lp::solve(&welfare_lp(mu, cs)?)?;
    match sol.status {
        LpStatus::Optimal => to_allocation(sol.x, cs.n, cs.m),
        LpStatus::Infeasible => Err(Error::Infeasible(format!(
            "no allocation satisfies the {} constraints at this value matrix",
            cs.kind
        ))),
        LpStatus::Unbounded => Err(Error::Unbounded("welfare LP".into())),
    }
}

/// The robust welfare LP: maximize `<X, mu_u>` subject to the worst-case rows.
pub fn robust_welfare_lp(bx: &ConfidenceBox, cs: &ConstraintSet, mu_u: &ValueMatrix) -> Result<LinearProgram> {
    check_shape(bx.center(), mu_u)?;
    let rows = cs.robust_coefficients(bx)?;
    Ok(with_rows(
        column_sum_lp(mu_u.as_slice().to_vec(), cs.n, cs.m),
        &rows,
        &cs.thresholds(),
    ))
}

/// `Err(Infeasible)` when no allocation satisfies the constraints for every value
/// matrix in the box; callers decide how to recover.
pub fn solve_robust_welfare(bx: &ConfidenceBox, cs: &ConstraintSet, mu_u: &ValueMatrix) -> Result<Allocation> {
    let sol = lp::solve(&robust_welfare_lp(bx, cs, mu_u)?)?;
    match sol.status {
        LpStatus::Optimal => to_allocation(sol.x, cs.n, cs.m),
        LpStatus::Infeasible => Err(Error::Infeasible(
            "robust constraints admit no allocation for this box".into(),
        )),
        LpStatus::Unbounded => Err(Error::Unbounded("robust welfare LP".into())),
    }
}

fn entry_values(lo: f64, hi: f64, spacing: f64) -> Vec<f64> {
    let first = (lo / spacing - 1e-9).ceil() as i64;
    let last = (hi / spacing + 1e-9).floor() as i64;
    let vals: Vec<f64> = (first..=last)
        .map(|j| j as f64 * spacing)
        .filter(|v| *v >= lo - 1e-12 && *v <= hi + 1e-12)
        .collect();
    if vals.is_empty() {
        vec![0.5 * (lo + hi)]
    } else {
        vals
    }
}

/// Lattice points of spacing `g.spacing` inside the box, one value list per entry.
/// Entries whose interval holds no multiple fall back to the interval midpoint.
pub fn grid_axes(bx: &ConfidenceBox, g: &GridSpec) -> Result<Vec<Vec<f64>>> {
    g.validate()?;
    bx.check_nonempty()?;
    let (n, m) = bx.center().shape();
    let mut axes = Vec::with_capacity(n * m);
    for i in 0..n {
        for k in 0..m {
            let (lo, hi) = bx.interval(i, k);
            axes.push(entry_values(lo, hi, g.spacing));
        }
    }
    Ok(axes)
}

/// The full Cartesian grid when it has at most `g.cap` points, otherwise `g.cap`
/// distinct points drawn uniformly with `g.sample_seed`.
pub fn grid_points(bx: &ConfidenceBox, g: &GridSpec) -> Result<Vec<ValueMatrix>> {
    let axes = grid_axes(bx, g)?;
    let (n, m) = bx.center().shape();
    let total = axes
        .iter()
        .try_fold(1usize, |acc, ax| acc.checked_mul(ax.len()));
    let build = |idx: &[usize]| -> ValueMatrix {
        let data = idx.iter().zip(&axes).map(|(&j, ax)| ax[j]).collect();
        ValueMatrix::new(Matrix::from_vec(n, m, data).expect("grid point shape"))
    };
    match total {
        Some(total) if total <= g.cap => {
            let mut out = Vec::with_capacity(total);
            let mut idx = vec![0usize; axes.len()];
            loop {
                out.push(build(&idx));
                // Odometer increment, last entry fastest.
                let mut p = axes.len();
                loop {
                    if p == 0 {
                        return Ok(out);
                    }
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < axes[p].len() {
                        break;
                    }
                    idx[p] = 0;
                }
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(g.sample_seed);
            let mut seen = HashSet::with_capacity(g.cap);
            let mut out = Vec::with_capacity(g.cap);
            while out.len() < g.cap {
                let idx: Vec<usize> = axes.iter().map(|ax| rng.random_range(0..ax.len())).collect();
                if seen.insert(idx.clone()) {
                    out.push(build(&idx));
                }
            }
            Ok(out)
        }
    }
}

/// Round-local memo of `Y^mu` keyed by the bit pattern of `mu`; `None` marks a grid
/// point whose constraints are infeasible.
#[derive(Debug, Default)]
pub struct YCache {
    map: HashMap<Vec<u64>, Option<Allocation>>,
}

impl YCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get_or_solve(&mut self, mu: &ValueMatrix, cs: &ConstraintSet) -> Result<Option<&Allocation>> {
        let key = mu.key();
        if !self.map.contains_key(&key) {
            let y = match solve_Y(mu, cs) {
                Ok(y) => Some(y),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            };
            self.map.insert(key.clone(), y);
        }
        Ok(self.map[&key].as_ref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMax {
    pub value: f64,
    pub points: usize,
    /// Grid points whose welfare LP was feasible.
    pub feasible: usize,
}

/// `max_{mu in grid} <Y^mu, eps>_F`. Infeasible grid points are skipped; an all
/// infeasible grid yields 0.
pub fn grid_max_term(bx: &ConfidenceBox, cs: &ConstraintSet, eps: &Matrix, g: &GridSpec) -> Result<f64> {
    Ok(grid_max_term_cached(bx, cs, eps, g, &mut YCache::new())?.value)
}

pub fn grid_max_term_cached(
    bx: &ConfidenceBox,
    cs: &ConstraintSet,
    eps: &Matrix,
    g: &GridSpec,
    cache: &mut YCache,
) -> Result<GridMax> {
    check_shape(bx.center(), eps)?;
    let points = grid_points(bx, g)?;
    let mut best = 0.0f64;
    let mut feasible = 0;
    for mu in &points {
        if let Some(y) = cache.get_or_solve(mu, cs)? {
            feasible += 1;
            best = best.max(frobenius_unchecked(y.as_slice(), eps.as_slice()));
        }
    }
    Ok(GridMax {
        value: best,
        points: points.len(),
        feasible,
    })
}

/// `<Xhat, mu_u> - 4 K C_P2 gridmax - 2 <Xhat, eps> - eta`.
pub fn slack_budget(
    xhat: &Allocation,
    mu_u: &ValueMatrix,
    eps: &Matrix,
    gridmax: f64,
    cs: &ConstraintSet,
) -> Result<f64> {
    let coef = 4.0 * cs.lipschitz_k * cs.c_p2;
    let grid_term = if gridmax == 0.0 { 0.0 } else { coef * gridmax };
    Ok(xhat.frobenius(mu_u)? - grid_term - 2.0 * xhat.frobenius(eps)? - BUDGET_RELAXATION)
}

/// The exploration LP for cell `target`. A `budget` of `-inf` drops the welfare row.
pub fn explore_lp(
    bx: &ConfidenceBox,
    cs: &ConstraintSet,
    mu_u: &ValueMatrix,
    target: (usize, usize),
    budget: f64,
) -> Result<LinearProgram> {
    check_shape(bx.center(), mu_u)?;
    let (n, m) = (cs.n, cs.m);
    if target.0 >= n || target.1 >= m {
        return Err(Error::InvalidArgument(format!(
            "target ({}, {}) outside {n}x{m}",
            target.0, target.1
        )));
    }
    if budget.is_nan() || budget == f64::INFINITY {
        return Err(Error::InvalidArgument(format!("budget must be < +inf, got {budget}")));
    }
    let mut objective = vec![0.0; n * m];
    objective[target.0 * m + target.1] = 1.0;
    let rows = cs.robust_coefficients(bx)?;
    let mut lp = with_rows(column_sum_lp(objective, n, m), &rows, &cs.thresholds());
    if budget.is_finite() {
        lp = lp.ge(mu_u.as_slice().to_vec(), budget);
    }
    Ok(lp)
}

/// Allocation maximizing `X[i][k]` within the robust constraints and welfare budget.
/// Infeasibility is a contract violation: the robust welfare solution is always a
/// feasible point when the budget comes from [`slack_budget`].
pub fn solve_explore(
    bx: &ConfidenceBox,
    cs: &ConstraintSet,
    mu_u: &ValueMatrix,
    target: (usize, usize),
    budget: f64,
) -> Result<Allocation> {
    let sol = lp::solve(&explore_lp(bx, cs, mu_u, target, budget)?)?;
    match sol.status {
        LpStatus::Optimal => to_allocation(sol.x, cs.n, cs.m),
        LpStatus::Infeasible => Err(Error::Contract(format!(
            "exploration LP for cell ({}, {}) infeasible with budget {budget}",
            target.0, target.1
        ))),
        LpStatus::Unbounded => Err(Error::Unbounded("exploration LP".into())),
    }
}

/// Entrywise mean of the explorers.
pub fn average_explorers(zs: &[Allocation]) -> Result<Allocation> {
    let first = zs
        .first()
        .ok_or_else(|| Error::InvalidArgument("no explorers to average".into()))?;
    let (n, m) = first.shape();
    let mut acc = Matrix::zeros(n, m);
    for z in zs {
        check_shape(&acc, z)?;
        for (s, v) in acc.as_mut_slice().iter_mut().zip(z.as_slice()) {
            *s += v;
        }
    }
    let inv = 1.0 / zs.len() as f64;
    Allocation::renormalized(acc.map(|v| v * inv))
}

/// Everything computed in one post-warm-up round.
#[derive(Debug, Clone)]
pub struct RoundSolution {
    pub mu_u: ValueMatrix,
    pub xhat: Allocation,
    pub grid: GridMax,
    pub budget: f64,
    /// Explorers in row-major cell order.
    pub explorers: Vec<Allocation>,
    pub allocation: Allocation,
}

/// Runs the full round pipeline on a box. `Err(Infeasible)` when the robust welfare
/// LP has no solution.
pub fn solve_round(bx: &ConfidenceBox, cs: &ConstraintSet, g: &GridSpec) -> Result<RoundSolution> {
    let mu_u = bx.upper_confidence()?;
    let xhat = solve_robust_welfare(bx, cs, &mu_u)?;
    let eps = bx.radius();
    let grid = grid_max_term_cached(bx, cs, eps, g, &mut YCache::new())?;
    let budget = slack_budget(&xhat, &mu_u, eps, grid.value, cs)?;
    let mut explorers = Vec::with_capacity(cs.n * cs.m);
    for i in 0..cs.n {
        for k in 0..cs.m {
            explorers.push(solve_explore(bx, cs, &mu_u, (i, k), budget)?);
        }
    }
    let allocation = average_explorers(&explorers)?;
    Ok(RoundSolution {
        mu_u,
        xhat,
        grid,
        budget,
        explorers,
        allocation,
    })
}
