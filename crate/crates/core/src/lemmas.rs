//! Constructive procedures behind the welfare-continuity and slack-construction
//! bounds for proportionality, with checkers for what they promise.

use serde::Serialize;

use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::lp::LinearProgram;
use crate::model::{check_shape, uar_allocation, Allocation, Matrix, ValueMatrix};
use crate::opt::solve_Y;

/// Tolerance for every lemma clause.
pub const LEMMA_TOL: f64 = 1e-8;

/// Per-player proportionality slack `S_i = X_i . mu_i - 1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackProfile {
    pub s: Vec<f64>,
}

impl SlackProfile {
    pub fn new(x: &Matrix, mu: &ValueMatrix) -> Result<Self> {
        check_shape(x, mu)?;
        let n = x.rows();
        Ok(SlackProfile {
            s: (0..n)
                .map(|i| {
                    x.row(i).iter().zip(mu.row(i)).map(|(a, b)| a * b).sum::<f64>() - 1.0 / n as f64
                })
                .collect(),
        })
    }

    pub fn total(&self) -> f64 {
        self.s.iter().sum()
    }

    pub fn positive_total(&self) -> f64 {
        self.s.iter().filter(|v| **v >= 0.0).sum()
    }

    /// Sum of `-S_i` over players with negative slack.
    pub fn negative_total(&self) -> f64 {
        -self.s.iter().filter(|v| **v < 0.0).sum::<f64>()
    }
}

fn check_gamma(gamma: f64, n: usize, a: f64, b: f64) -> Result<()> {
    let limit = a / (b * n as f64);
    if !(gamma >= 0.0 && gamma < limit) {
        return Err(Error::Precondition(format!("gamma = {gamma} must lie in [0, a/(bn) = {limit})")));
    }
    Ok(())
}

/// The perturbation `Delta` of the slack construction (zero rows where `Y_i` is zero).
pub fn slack_transfer(y: &Allocation, mu: &ValueMatrix, gamma: f64, a: f64) -> Result<Matrix> {
    let (n, m) = y.shape();
    let prof = SlackProfile::new(y, mu)?;
    let total = prof.total();
    let mut delta = Matrix::zeros(n, m);
    for i in 0..n {
        let row_sum = y.row_sum(i);
        if row_sum <= 0.0 {
            continue;
        }
        for k in 0..m {
            delta.set(
                i,
                k,
                (y.get(i, k) / row_sum) * (prof.s[i] / total) * (n as f64 * gamma / a),
            );
        }
    }
    Ok(delta)
}

/// Builds `X'` from a constrained optimum `Y`: the uniform allocation when the total
/// slack is at most `(b/a) n gamma`, otherwise `Y` with `Delta` removed from every
/// row and redistributed evenly within each column.
pub fn construct_xprime(y: &Allocation, mu: &ValueMatrix, gamma: f64, a: f64, b: f64) -> Result<Allocation> {
    let (n, m) = y.shape();
    check_gamma(gamma, n, a, b)?;
    let prof = SlackProfile::new(y, mu)?;
    if prof.total() <= (b / a) * n as f64 * gamma {
        return Ok(uar_allocation(n, m));
    }
    let delta = slack_transfer(y, mu, gamma, a)?;
    let mut x = Matrix::zeros(n, m);
    for k in 0..m {
        let share = delta.col_sum(k) / n as f64;
        for i in 0..n {
            x.set(i, k, y.get(i, k) - delta.get(i, k) + share);
        }
    }
    Allocation::new(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlackReport {
    pub welfare_loss: f64,
    pub welfare_bound: f64,
    pub welfare_ok: bool,
    pub is_uar: bool,
    /// `None` when `X'` is uniform (the clause does not apply).
    pub slack_ok: Option<bool>,
    pub min_slack: f64,
    pub deviation_ok: Option<bool>,
    pub max_deviation: f64,
}

impl SlackReport {
    pub fn passed(&self) -> bool {
        self.welfare_ok && self.slack_ok.unwrap_or(true) && self.deviation_ok.unwrap_or(true)
    }
}

/// Checks a candidate `X'` against the slack-construction guarantees.
pub fn check_slack_construction(
    xprime: &Allocation,
    y: &Allocation,
    mu: &ValueMatrix,
    gamma: f64,
    a: f64,
    b: f64,
) -> Result<SlackReport> {
    check_shape(xprime, y)?;
    let (n, m) = y.shape();
    let nf = n as f64;
    let welfare_loss = y.frobenius(mu)? - xprime.frobenius(mu)?;
    let welfare_bound = b * nf * gamma / a;
    let is_uar = xprime.max_abs_diff(&uar_allocation(n, m))? == 0.0;
    let prof = SlackProfile::new(xprime, mu)?;
    let min_slack = prof.s.iter().copied().fold(f64::INFINITY, f64::min);
    let max_deviation = xprime.max_abs_diff(y)?;
    Ok(SlackReport {
        welfare_loss,
        welfare_bound,
        welfare_ok: welfare_loss <= welfare_bound + LEMMA_TOL,
        is_uar,
        slack_ok: (!is_uar).then_some(min_slack >= gamma - LEMMA_TOL),
        min_slack,
        deviation_ok: (!is_uar).then_some(max_deviation <= nf * gamma / a + LEMMA_TOL),
        max_deviation,
    })
}

/// Builds `X'` from `Y` and checks it.
pub fn verify_slack_construction(y: &Allocation, mu: &ValueMatrix, gamma: f64, a: f64, b: f64) -> Result<SlackReport> {
    let xprime = construct_xprime(y, mu, gamma, a, b)?;
    check_slack_construction(&xprime, y, mu, gamma, a, b)
}

/// Proportionality with every right-hand side lowered by `eps`.
pub fn relaxed_lp(mu: &ValueMatrix, eps: f64, objective: Vec<f64>) -> Result<LinearProgram> {
    let (n, m) = mu.shape();
    if objective.len() != n * m {
        return Err(Error::Dimension(format!("objective has {} entries, expected {}", objective.len(), n * m)));
    }
    let mut lp = LinearProgram::maximize(objective);
    for k in 0..m {
        let mut row = vec![0.0; n * m];
        for i in 0..n {
            row[i * m + k] = 1.0;
        }
        lp = lp.eq(row, 1.0);
    }
    for i in 0..n {
        let mut row = vec![0.0; n * m];
        row[i * m..(i + 1) * m].copy_from_slice(mu.row(i));
        lp = lp.ge(row, 1.0 / n as f64 - eps);
    }
    Ok(lp)
}

/// Repairs an allocation that meets proportionality only up to `eps`: the uniform
/// allocation when positive slack is scarce relative to the deficit, otherwise a
/// transfer from players with surplus to those short of their share.
pub fn construct_w(z: &Allocation, mu: &ValueMatrix, eps: f64, a: f64, b: f64) -> Result<Allocation> {
    let (n, m) = z.shape();
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::Precondition(format!("eps = {eps} must be >= 0")));
    }
    let prof = SlackProfile::new(z, mu)?;
    if let Some(i) = prof.s.iter().position(|s| *s < -eps - LEMMA_TOL) {
        return Err(Error::Precondition(format!(
            "player {i} has slack {} below -eps",
            prof.s[i]
        )));
    }
    let pos = prof.positive_total();
    let neg = prof.negative_total();
    if (a / b) * pos <= neg {
        return Ok(uar_allocation(n, m));
    }
    let ratio = (b / a) * neg / pos;
    // sum over donors of S_i Z_i / (Z_i . mu_i); every receiver gets a share of it.
    let mut pool = vec![0.0; m];
    let value = |i: usize| prof.s[i] + 1.0 / n as f64;
    for i in 0..n {
        if prof.s[i] >= 0.0 {
            let scale = prof.s[i] / value(i);
            for (k, p) in pool.iter_mut().enumerate() {
                *p += scale * z.get(i, k);
            }
        }
    }
    let mut w = Matrix::zeros(n, m);
    for i in 0..n {
        for k in 0..m {
            let zi = z.get(i, k);
            let v = if prof.s[i] >= 0.0 {
                zi - ratio * prof.s[i] * zi / value(i)
            } else {
                zi + (b / a) * (-prof.s[i]) * pool[k] / pos
            };
            w.set(i, k, v);
        }
    }
    Allocation::renormalized(w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub welfare_1: f64,
    pub welfare_2: f64,
    pub difference: f64,
    pub l1_distance: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Compares optimal constrained welfare at two nearby value matrices against
/// `C_P3 * ||mu1 - mu2||_1`.
pub fn verify_continuity(mu1: &ValueMatrix, mu2: &ValueMatrix, cs: &ConstraintSet) -> Result<ContinuityReport> {
    let l1 = mu1.l1_distance(mu2)?;
    let w1 = solve_Y(mu1, cs)?.frobenius(mu1)?;
    let w2 = solve_Y(mu2, cs)?.frobenius(mu2)?;
    let bound = cs.c_p3 * l1;
    Ok(ContinuityReport {
        welfare_1: w1,
        welfare_2: w2,
        difference: (w1 - w2).abs(),
        l1_distance: l1,
        bound,
        ok: (w1 - w2).abs() <= bound + LEMMA_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::proportionality;
    use crate::lp;
    use crate::model::random_normalized;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag_mu() -> ValueMatrix {
        ValueMatrix::from_rows(&[vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap()
    }

    fn identity() -> Allocation {
        Allocation::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn xprime_symmetric_is_uniform() {
        let mu = ValueMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let x = construct_xprime(&uar_allocation(2, 2), &mu, 0.01, 0.2, 0.8).unwrap();
        assert_eq!(x, uar_allocation(2, 2));
        let r = verify_slack_construction(&uar_allocation(2, 2), &mu, 0.01, 0.2, 0.8).unwrap();
        assert!(r.passed() && r.is_uar && r.welfare_loss == 0.0);
    }

    #[test]
    fn xprime_diagonal_case_two() {
        let x = construct_xprime(&identity(), &diag_mu(), 0.01, 0.2, 0.8).unwrap();
        let expected = Matrix::from_rows(&[vec![0.975, 0.025], vec![0.025, 0.975]]).unwrap();
        assert!(x.max_abs_diff(&expected).unwrap() < 1e-12);
        let value: f64 = x.row(0).iter().zip(diag_mu().row(0)).map(|(a, b)| a * b).sum();
        assert!((value - 0.785).abs() < 1e-12);
        let r = verify_slack_construction(&identity(), &diag_mu(), 0.01, 0.2, 0.8).unwrap();
        assert!(r.passed() && !r.is_uar);
        let delta = slack_transfer(&identity(), &diag_mu(), 0.01, 0.2).unwrap();
        let total: f64 = delta.as_slice().iter().sum();
        assert!((total - 2.0 * 0.01 / 0.2).abs() < 1e-12);
    }

    #[test]
    fn xprime_vanishing_gamma() {
        let x = construct_xprime(&identity(), &diag_mu(), 1e-12, 0.2, 0.8).unwrap();
        assert!(x.max_abs_diff(&identity()).unwrap() < 1e-9);
        assert!(construct_xprime(&identity(), &diag_mu(), 0.5, 0.2, 0.8).is_err());
    }

    #[test]
    fn corrupted_xprime_fails() {
        let mut bad = construct_xprime(&identity(), &diag_mu(), 0.01, 0.2, 0.8).unwrap().matrix().clone();
        bad.set(0, 0, bad.get(0, 0) - 1.0 + 0.05);
        bad.set(1, 0, bad.get(1, 0) + 1.0 - 0.05);
        let bad = Allocation::new(bad).unwrap();
        let r = check_slack_construction(&bad, &identity(), &diag_mu(), 0.01, 0.2, 0.8).unwrap();
        assert_eq!(r.deviation_ok, Some(false));
        assert!(!r.passed());
    }

    #[test]
    fn w_fixtures() {
        let w = construct_w(&uar_allocation(2, 2), &diag_mu(), 0.0, 0.2, 0.8).unwrap();
        assert_eq!(w, uar_allocation(2, 2));
        let w = construct_w(&identity(), &diag_mu(), 0.0, 0.2, 0.8).unwrap();
        assert_eq!(w, identity());
        let slightly_short = Allocation::from_rows(&[vec![0.0, 0.35], vec![1.0, 0.65]]).unwrap();
        assert!(construct_w(&slightly_short, &diag_mu(), 0.02, 0.2, 0.8).is_err());
    }

    #[test]
    fn w_repairs_relaxed_vertices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (a, b, eps) = (0.05, 0.8, 0.02);
        let cs = proportionality(2, 2, a, b);
        let mut checked = 0;
        for _ in 0..200 {
            let mu = random_normalized(2, 2, a, b, 1.0, &mut rng).unwrap();
            let obj: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let sol = lp::solve(&relaxed_lp(&mu, eps, obj).unwrap()).unwrap();
            let z = Allocation::renormalized(Matrix::from_vec(2, 2, sol.x).unwrap()).unwrap();
            let w = construct_w(&z, &mu, eps, a, b).unwrap();
            assert!(cs.min_slack(&w, &mu).unwrap() >= -1e-9);
            let loss = z.frobenius(&mu).unwrap() - w.frobenius(&mu).unwrap();
            assert!(loss <= b * 2.0 / a * eps + 1e-8);
            checked += 1;
        }
        assert_eq!(checked, 200);
    }

    #[test]
    fn continuity_fixtures() {
        let cs = proportionality(2, 2, 0.2, 0.8);
        let r = verify_continuity(&diag_mu(), &diag_mu(), &cs).unwrap();
        assert!(r.ok && r.difference == 0.0);
        let swapped = ValueMatrix::from_rows(&[vec![0.2, 0.8], vec![0.8, 0.2]]).unwrap();
        let r = verify_continuity(&diag_mu(), &swapped, &cs).unwrap();
        assert!(r.difference < 1e-12);
        let near = ValueMatrix::from_rows(&[vec![0.79, 0.21], vec![0.21, 0.79]]).unwrap();
        assert!(verify_continuity(&diag_mu(), &near, &cs).unwrap().ok);
    }
}
