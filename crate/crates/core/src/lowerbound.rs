//! The hard instance pair for learning under envy-freeness, its constrained optimum,
//! and the per-round regret bound in terms of three allocation cells.

use crate::constraints::{envy_freeness, ConstraintSet};
use crate::error::{Error, Result};
use crate::model::{Allocation, ConstraintKind, InstanceSpec, Matrix, ValueMatrix};
use crate::sim::RunResult;

/// Value bounds used to validate the instances (entries are multiples of 1/42).
pub const LB_A: f64 = 1.0 / 42.0;
pub const LB_B: f64 = 40.0 / 42.0;

/// The cells `(1,1)`, `(1,2)`, `(2,1)` (zero-based) whose allocation drives regret.
pub const WITNESS_CELLS: [(usize, usize); 3] = [(1, 1), (1, 2), (2, 1)];

/// Smallest horizon for which both instances stay inside `[LB_A, LB_B]`.
pub const MIN_LB_HORIZON: usize = 2745;

const MU1_NUMERATORS: [[f64; 3]; 3] = [[20.0, 21.0, 1.0], [19.0, 19.0, 4.0], [1.0, 1.0, 40.0]];

#[derive(Debug, Clone, PartialEq)]
pub struct LbInstancePair {
    pub mu1: ValueMatrix,
    pub mu2: ValueMatrix,
    pub epsilon: f64,
    pub horizon: usize,
}

pub fn mu1() -> ValueMatrix {
    let rows: Vec<Vec<f64>> = MU1_NUMERATORS
        .iter()
        .map(|r| r.iter().map(|v| v / 42.0).collect())
        .collect();
    ValueMatrix::from_rows(&rows).expect("3x3")
}

/// `mu1` and the copy with `+eps` at `(1,1)` and `-eps` at `(1,2)`, `eps = T^(-1/3)`.
///
/// The shifted entry `4/42 - eps` must stay at or above [`LB_A`], which needs
/// `T > 14^3` (at `T = 14^3` rounding lands a hair below); shorter horizons are rejected.
pub fn lb_instances(horizon: usize) -> Result<LbInstancePair> {
    let epsilon = (horizon as f64).powf(-1.0 / 3.0);
    if horizon == 0 || MU1_NUMERATORS[1][2] / 42.0 - epsilon < LB_A {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} pushes mu2 below {LB_A}; need T >= {MIN_LB_HORIZON}"
        )));
    }
    let mu1 = mu1();
    let mut mu2 = mu1.clone();
    mu2.set(1, 1, mu1.get(1, 1) + epsilon);
    mu2.set(1, 2, mu1.get(1, 2) - epsilon);
    Ok(LbInstancePair {
        mu1,
        mu2,
        epsilon,
        horizon,
    })
}

impl LbInstancePair {
    pub fn spec(&self, which: usize, noise_sigma: f64, seed: u64) -> InstanceSpec {
        InstanceSpec {
            n: 3,
            m: 3,
            horizon: self.horizon,
            a: LB_A,
            b: LB_B,
            mu_star: if which == 1 { self.mu1.clone() } else { self.mu2.clone() },
            noise_sigma,
            seed,
            constraint_kind: ConstraintKind::EnvyFreeness,
        }
    }
}

pub fn lb_constraints() -> ConstraintSet {
    envy_freeness(3, 3, LB_A, LB_B).expect("n = 3")
}

/// The envy-free welfare optimum for `mu1`: player 0 takes type 1, player 1 type 0,
/// player 2 type 2.
pub fn ef_optimal_mu1() -> Allocation {
    Allocation::from_rows(&[
        vec![0.0, 1.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ])
    .expect("permutation matrix")
}

fn witness_sum(x: &Matrix) -> f64 {
    WITNESS_CELLS.iter().map(|&(i, k)| x.get(i, k)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `lhs = <Y, mu1> - <X, mu1>` against `rhs = (X_11 + X_12 + X_21) / 42` for an
/// envy-free `X`.
pub fn regret_decomposition_check(x: &Allocation) -> Result<DecompositionCheck> {
    let mu = mu1();
    let cs = lb_constraints();
    let slack = cs.min_slack(x, &mu)?;
    if slack < -1e-9 {
        return Err(Error::Precondition(format!(
            "allocation is not envy-free for mu1 (min slack {slack})"
        )));
    }
    let lhs = ef_optimal_mu1().frobenius(&mu)? - x.frobenius(&mu)?;
    let rhs = witness_sum(x) / 42.0;
    Ok(DecompositionCheck {
        lhs,
        rhs,
        ok: lhs >= rhs - 1e-9,
    })
}

/// `sum_t (X^t_11 + X^t_12 + X^t_21)` over a run with recorded allocations.
pub fn lb_statistic(result: &RunResult) -> Result<f64> {
    let mut total = 0.0;
    for r in &result.records {
        let x = r.allocation.as_ref().ok_or_else(|| {
            Error::InvalidArgument("lb_statistic needs recorded allocations".into())
        })?;
        total += witness_sum(x);
    }
    Ok(total)
}
