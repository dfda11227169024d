//! Linear fairness constraints `<B_l(mu), X>_F >= c_l` and their worst case over a
//! box of value matrices.
//!
//! Each coefficient `B_l(mu)[i][k]` is either zero or `±mu[src]` for a single source
//! entry `src`. That makes every coefficient monotone in exactly one entry of `mu`,
//! which is what lets the "for every mu in the box" family collapse to one row per
//! constraint: since allocations are entrywise nonnegative, plugging in the lower
//! corner for increasing coefficients and the upper corner for decreasing ones gives
//! a lower bound on `<B_l(mu), X>` over the whole box.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{check_shape, uar_allocation, Allocation, ConstraintKind, Matrix, ValueMatrix};

/// Slack below `-SATISFACTION_TOL` counts as a violated constraint.
pub const SATISFACTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
}

/// `B[row][col] = sign * mu[src_row][src_col]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub row: usize,
    pub col: usize,
    pub src_row: usize,
    pub src_col: usize,
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<Term>,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    pub kind: ConstraintKind,
    pub n: usize,
    pub m: usize,
    pub constraints: Vec<LinearConstraint>,
    /// Lipschitz constant of the coefficient map, entrywise.
    pub lipschitz_k: f64,
    /// Constant of the slack-construction property (used by the exploration budget).
    pub c_p2: f64,
    /// Constant of the welfare-continuity property.
    pub c_p3: f64,
    pub gamma0: f64,
}

/// One constraint per player: `X_l · mu_l >= 1/n`.
pub fn proportionality(n: usize, m: usize, a: f64, b: f64) -> ConstraintSet {
    assert!(n >= 1 && m >= 1);
    let constraints = (0..n)
        .map(|l| LinearConstraint {
            terms: (0..m)
                .map(|k| Term {
                    row: l,
                    col: k,
                    src_row: l,
                    src_col: k,
                    sign: 1.0,
                })
                .collect(),
            threshold: 1.0 / n as f64,
        })
        .collect();
    let bn_over_a = b * n as f64 / a;
    ConstraintSet {
        kind: ConstraintKind::Proportionality,
        n,
        m,
        constraints,
        lipschitz_k: 1.0,
        c_p2: bn_over_a,
        c_p3: bn_over_a,
        gamma0: a / (b * n as f64),
    }
}

/// One constraint per ordered pair `(i, j)`, `i != j`: `X_i · mu_i >= X_j · mu_i`.
pub fn envy_freeness(n: usize, m: usize, a: f64, b: f64) -> Result<ConstraintSet> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "envy-freeness needs at least two players".into(),
        ));
    }
    let mut constraints = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut terms = Vec::with_capacity(2 * m);
            for k in 0..m {
                terms.push(Term {
                    row: i,
                    col: k,
                    src_row: i,
                    src_col: k,
                    sign: 1.0,
                });
                terms.push(Term {
                    row: j,
                    col: k,
                    src_row: i,
                    src_col: k,
                    sign: -1.0,
                });
            }
            constraints.push(LinearConstraint {
                terms,
                threshold: 0.0,
            });
        }
    }
    let bn_over_a = b * n as f64 / a;
    Ok(ConstraintSet {
        kind: ConstraintKind::EnvyFreeness,
        n,
        m,
        constraints,
        lipschitz_k: 1.0,
        c_p2: bn_over_a,
        c_p3: bn_over_a,
        gamma0: a / (b * n as f64),
    })
}

pub fn for_kind(kind: ConstraintKind, n: usize, m: usize, a: f64, b: f64) -> Result<ConstraintSet> {
    match kind {
        ConstraintKind::Proportionality => Ok(proportionality(n, m, a, b)),
        ConstraintKind::EnvyFreeness => envy_freeness(n, m, a, b),
    }
}

impl ConstraintSet {
    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.constraints.iter().map(|c| c.threshold).collect()
    }

    fn check_dims(&self, mat: &Matrix) -> Result<()> {
        if mat.shape() != (self.n, self.m) {
            return Err(Error::Dimension(format!(
                "constraint set is {}x{}, matrix is {}x{}",
                self.n,
                self.m,
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(())
    }

    /// `B_l(mu)` for every `l`.
    pub fn coefficients(&self, mu: &ValueMatrix) -> Result<Vec<Matrix>> {
        self.check_dims(mu)?;
        Ok(self
            .constraints
            .iter()
            .map(|c| {
                let mut bmat = Matrix::zeros(self.n, self.m);
                for t in &c.terms {
                    bmat.set(
                        t.row,
                        t.col,
                        bmat.get(t.row, t.col) + t.sign * mu.get(t.src_row, t.src_col),
                    );
                }
                bmat
            })
            .collect())
    }

    /// How `B_l(mu)[i][k]` moves as its source entry of `mu` grows.
    pub fn corner_rule(&self, l: usize, i: usize, k: usize) -> Monotonicity {
        let sign: f64 = self.constraints[l]
            .terms
            .iter()
            .filter(|t| t.row == i && t.col == k)
            .map(|t| t.sign)
            .sum();
        if sign > 0.0 {
            Monotonicity::Increasing
        } else if sign < 0.0 {
            Monotonicity::Decreasing
        } else {
            Monotonicity::Constant
        }
    }

    /// `<B_l(mu), X>_F - c_l` for every `l`.
    pub fn evaluate(&self, x: &Allocation, mu: &ValueMatrix) -> Result<Vec<f64>> {
        self.check_dims(x)?;
        self.check_dims(mu)?;
        Ok(self
            .constraints
            .iter()
            .map(|c| {
                c.terms
                    .iter()
                    .map(|t| t.sign * mu.get(t.src_row, t.src_col) * x.get(t.row, t.col))
                    .sum::<f64>()
                    - c.threshold
            })
            .collect())
    }

    pub fn min_slack(&self, x: &Allocation, mu: &ValueMatrix) -> Result<f64> {
        Ok(self
            .evaluate(x, mu)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    pub fn is_satisfied(&self, x: &Allocation, mu: &ValueMatrix) -> Result<bool> {
        Ok(self.min_slack(x, mu)? >= -SATISFACTION_TOL)
    }

    /// Worst-case coefficient matrices over the effective box: lower corner for
    /// increasing coefficients, upper corner for decreasing ones.
    pub fn robust_coefficients(&self, bx: &ConfidenceBox) -> Result<Vec<Matrix>> {
        self.check_dims(bx.center())?;
        let lo = bx.lower_corner()?;
        let hi = bx.upper_corner()?;
        Ok(self
            .constraints
            .iter()
            .map(|c| {
                let mut bmat = Matrix::zeros(self.n, self.m);
                for t in &c.terms {
                    let src = if t.sign >= 0.0 { &lo } else { &hi };
                    bmat.set(
                        t.row,
                        t.col,
                        bmat.get(t.row, t.col) + t.sign * src.get(t.src_row, t.src_col),
                    );
                }
                bmat
            })
            .collect())
    }
}

pub fn evaluate(x: &Allocation, mu: &ValueMatrix, cs: &ConstraintSet) -> Result<Vec<f64>> {
    cs.evaluate(x, mu)
}

pub fn robust_coefficients(cs: &ConstraintSet, bx: &ConfidenceBox) -> Result<Vec<Matrix>> {
    cs.robust_coefficients(bx)
}

/// Whether the uniform allocation satisfies every constraint at `mu`.
pub fn check_property_uar(cs: &ConstraintSet, mu: &ValueMatrix) -> Result<bool> {
    cs.is_satisfied(&uar_allocation(cs.n, cs.m), mu)
}

/// Checks `|B_l(mu1)[i][k] - B_l(mu2)[i][k]| <= K * eps[i][k]` for all `l, i, k`.
pub fn check_lipschitz(
    cs: &ConstraintSet,
    mu1: &ValueMatrix,
    mu2: &ValueMatrix,
    eps: &Matrix,
) -> Result<bool> {
    check_shape(mu1, mu2)?;
    check_shape(mu1, eps)?;
    for i in 0..mu1.rows() {
        for k in 0..mu1.cols() {
            if (mu1.get(i, k) - mu2.get(i, k)).abs() > eps.get(i, k) + 1e-15 {
                return Err(Error::Precondition(format!(
                    "|mu1 - mu2| at ({i}, {k}) exceeds eps"
                )));
            }
        }
    }
    let b1 = cs.coefficients(mu1)?;
    let b2 = cs.coefficients(mu2)?;
    for (p, q) in b1.iter().zip(&b2) {
        for i in 0..cs.n {
            for k in 0..cs.m {
                if (p.get(i, k) - q.get(i, k)).abs() > cs.lipschitz_k * eps.get(i, k) + 1e-15 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Entrywise interval set `{mu : |mu - center| <= radius}`, optionally intersected
/// with `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceBox {
    center: ValueMatrix,
    radius: Matrix,
    clamp: Option<(f64, f64)>,
}

impl ConfidenceBox {
    pub fn new(center: ValueMatrix, radius: Matrix, clamp: Option<(f64, f64)>) -> Result<Self> {
        check_shape(&center, &radius)?;
        if radius.as_slice().iter().any(|r| r.is_nan() || *r < 0.0) {
            return Err(Error::InvalidArgument("radius entries must be >= 0".into()));
        }
        Ok(ConfidenceBox {
            center,
            radius,
            clamp,
        })
    }

    pub fn center(&self) -> &ValueMatrix {
        &self.center
    }

    pub fn radius(&self) -> &Matrix {
        &self.radius
    }

    pub fn clamp(&self) -> Option<(f64, f64)> {
        self.clamp
    }

    /// Effective interval for entry `(i, k)` (may be empty; see [`Self::check_nonempty`]).
    pub fn interval(&self, i: usize, k: usize) -> (f64, f64) {
        let c = self.center.get(i, k);
        let r = self.radius.get(i, k);
        let (mut lo, mut hi) = (c - r, c + r);
        if let Some((a, b)) = self.clamp {
            lo = lo.max(a);
            hi = hi.min(b);
        }
        (lo, hi)
    }

    pub fn check_nonempty(&self) -> Result<()> {
        for i in 0..self.center.rows() {
            for k in 0..self.center.cols() {
                let (lo, hi) = self.interval(i, k);
                if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::EmptyBox { i, k, lo, hi });
                }
            }
        }
        Ok(())
    }

    fn corner(&self, upper: bool) -> Result<ValueMatrix> {
        self.check_nonempty()?;
        let (n, m) = self.center.shape();
        let mut out = Matrix::zeros(n, m);
        for i in 0..n {
            for k in 0..m {
                let (lo, hi) = self.interval(i, k);
                out.set(i, k, if upper { hi } else { lo });
            }
        }
        Ok(ValueMatrix::new(out))
    }

    pub fn lower_corner(&self) -> Result<ValueMatrix> {
        self.corner(false)
    }

    pub fn upper_corner(&self) -> Result<ValueMatrix> {
        self.corner(true)
    }

    /// Optimistic values `center + radius`; entries with infinite radius fall back to
    /// the clamp's upper bound.
    pub fn upper_confidence(&self) -> Result<ValueMatrix> {
        let (n, m) = self.center.shape();
        let mut out = Matrix::zeros(n, m);
        for i in 0..n {
            for k in 0..m {
                let v = self.center.get(i, k) + self.radius.get(i, k);
                let v = if v.is_finite() {
                    v
                } else {
                    match self.clamp {
                        Some((_, b)) => b,
                        None => {
                            return Err(Error::InvalidArgument(format!(
                                "unbounded optimistic value at ({i}, {k}) without clamp"
                            )))
                        }
                    }
                };
                out.set(i, k, v);
            }
        }
        Ok(ValueMatrix::new(out))
    }

    pub fn contains(&self, mu: &ValueMatrix, tol: f64) -> bool {
        if mu.shape() != self.center.shape() {
            return false;
        }
        (0..mu.rows()).all(|i| {
            (0..mu.cols()).all(|k| {
                let (lo, hi) = self.interval(i, k);
                let v = mu.get(i, k);
                v >= lo - tol && v <= hi + tol
            })
        })
    }

    /// Uniform draw from the effective box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ValueMatrix> {
        self.check_nonempty()?;
        let (n, m) = self.center.shape();
        let mut out = Matrix::zeros(n, m);
        for i in 0..n {
            for k in 0..m {
                let (lo, hi) = self.interval(i, k);
                out.set(i, k, lo + (hi - lo) * rng.random::<f64>());
            }
        }
        Ok(ValueMatrix::new(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::model::random_normalized;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag_mu() -> ValueMatrix {
        ValueMatrix::from_rows(&[vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap()
    }

    fn identity() -> Allocation {
        Allocation::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn proportionality_template() {
        let cs = proportionality(2, 2, 0.2, 0.8);
        assert_eq!(cs.len(), 2);
        let b = cs.coefficients(&diag_mu()).unwrap();
        assert_eq!(b[0].to_rows(), vec![vec![0.8, 0.2], vec![0.0, 0.0]]);
        assert_eq!(cs.thresholds(), vec![0.5, 0.5]);
        assert_eq!(cs.lipschitz_k, 1.0);
        assert!((cs.c_p2 - 8.0).abs() < 1e-12);
        assert!((cs.gamma0 - 0.125).abs() < 1e-12);
        assert_eq!(cs.corner_rule(0, 0, 1), Monotonicity::Increasing);
        assert_eq!(cs.corner_rule(0, 1, 1), Monotonicity::Constant);
    }

    #[test]
    fn proportionality_slacks() {
        let cs = proportionality(2, 2, 0.2, 0.8);
        let s = cs.evaluate(&uar_allocation(2, 2), &diag_mu()).unwrap();
        assert!(s.iter().all(|v| v.abs() < 1e-15));
        let s = cs.evaluate(&identity(), &diag_mu()).unwrap();
        assert!((s[0] - 0.3).abs() < 1e-12 && (s[1] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn single_player_owns_everything() {
        let cs = proportionality(1, 3, 0.1, 0.5);
        let mu = ValueMatrix::from_rows(&[vec![0.3, 0.3, 0.4]]).unwrap();
        let s = cs.evaluate(&uar_allocation(1, 3), &mu).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].abs() < 1e-15);
    }

    #[test]
    fn envy_freeness_template() {
        assert!(envy_freeness(1, 2, 0.2, 0.8).is_err());
        let cs = envy_freeness(3, 2, 0.1, 0.9).unwrap();
        assert_eq!(cs.len(), 6);
        let cs = envy_freeness(2, 2, 0.2, 0.8).unwrap();
        let s = cs.evaluate(&identity(), &diag_mu()).unwrap();
        assert!((s[0] - 0.6).abs() < 1e-12);
        let b = cs.coefficients(&diag_mu()).unwrap();
        assert_eq!(b[0].to_rows(), vec![vec![0.8, 0.2], vec![-0.8, -0.2]]);
        assert_eq!(cs.corner_rule(0, 1, 0), Monotonicity::Decreasing);
    }

    #[test]
    fn envy_freeness_identical_rows_have_zero_slack() {
        let cs = envy_freeness(3, 3, 0.05, 0.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mu = random_normalized(3, 3, 0.05, 0.9, 1.0, &mut rng).unwrap();
        let x = Allocation::from_rows(&[vec![0.2, 0.5, 0.1], vec![0.2, 0.0, 0.1], vec![0.6, 0.5, 0.8]]).unwrap();
        // Not identical rows: some slack nonzero.
        assert!(cs.evaluate(&x, &mu).unwrap().iter().any(|v| v.abs() > 1e-6));
        for s in cs.evaluate(&uar_allocation(3, 3), &mu).unwrap() {
            assert!(s.abs() < 1e-15);
        }
    }

    #[test]
    fn robust_lower_corner() {
        let cs = proportionality(2, 2, 0.2, 0.8);
        let bx = ConfidenceBox::new(diag_mu(), Matrix::filled(2, 2, 0.05), None).unwrap();
        let w = cs.robust_coefficients(&bx).unwrap();
        let expected = [[0.75, 0.15], [0.0, 0.0]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((w[0].get(i, k) - expected[i][k]).abs() < 1e-12);
            }
        }
        let bx0 = ConfidenceBox::new(diag_mu(), Matrix::zeros(2, 2), None).unwrap();
        assert_eq!(cs.robust_coefficients(&bx0).unwrap(), cs.coefficients(&diag_mu()).unwrap());
    }

    #[test]
    fn robust_envy_freeness_uses_both_corners() {
        let cs = envy_freeness(2, 2, 0.2, 0.8).unwrap();
        let eps = Matrix::from_rows(&[vec![0.05, 0.02], vec![0.01, 0.03]]).unwrap();
        let bx = ConfidenceBox::new(diag_mu(), eps, None).unwrap();
        let w = cs.robust_coefficients(&bx).unwrap();
        assert!((w[0].get(0, 0) - 0.75).abs() < 1e-12);
        assert!((w[0].get(0, 1) - 0.18).abs() < 1e-12);
        assert!((w[0].get(1, 0) + 0.85).abs() < 1e-12);
        assert!((w[0].get(1, 1) + 0.22).abs() < 1e-12);
        // Sampling oracle: the worst-case matrix lower-bounds every box member.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let mu = bx.sample(&mut rng).unwrap();
            let x = crate::model::tests::random_allocation(2, 2, &mut rng);
            let b = cs.coefficients(&mu).unwrap();
            for l in 0..cs.len() {
                assert!(w[l].frobenius(&x).unwrap() <= b[l].frobenius(&x).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn clamped_box_and_empty_box() {
        let radius = Matrix::from_rows(&[vec![f64::INFINITY, 0.1], vec![0.1, 0.1]]).unwrap();
        let bx = ConfidenceBox::new(diag_mu(), radius, Some((0.2, 0.8))).unwrap();
        assert_eq!(bx.interval(0, 0), (0.2, 0.8));
        assert!((bx.interval(0, 1).0 - 0.2).abs() < 1e-15);
        assert_eq!(bx.upper_confidence().unwrap().get(0, 0), 0.8);
        let far = ValueMatrix::from_rows(&[vec![0.95, 0.05], vec![0.5, 0.5]]).unwrap();
        let bx = ConfidenceBox::new(far, Matrix::filled(2, 2, 0.01), Some((0.2, 0.8))).unwrap();
        assert!(matches!(bx.check_nonempty(), Err(Error::EmptyBox { i: 0, k: 0, .. })));
        assert!(cs_robust_err(&bx));
    }

    fn cs_robust_err(bx: &ConfidenceBox) -> bool {
        proportionality(2, 2, 0.2, 0.8).robust_coefficients(bx).is_err()
    }

    #[test]
    fn property_uar_checks() {
        let cs = proportionality(2, 2, 0.2, 0.8);
        assert!(check_property_uar(&cs, &diag_mu()).unwrap());
        let ef = envy_freeness(2, 2, 0.2, 0.8).unwrap();
        assert!(check_property_uar(&ef, &diag_mu()).unwrap());
        // A row summing to 0.8 leaves UAR with slack 0.4 - 0.5 < 0.
        let short = ValueMatrix::from_rows(&[vec![0.6, 0.2], vec![0.2, 0.8]]).unwrap();
        assert!(!check_property_uar(&cs, &short).unwrap());
        let long = ValueMatrix::from_rows(&[vec![0.8, 0.4], vec![0.2, 0.8]]).unwrap();
        assert!(check_property_uar(&cs, &long).unwrap());
    }

    #[test]
    fn lipschitz_checks() {
        let cs = proportionality(2, 2, 0.2, 0.8);
        let mu = diag_mu();
        assert!(check_lipschitz(&cs, &mu, &mu, &Matrix::zeros(2, 2)).unwrap());
        let other = ValueMatrix::from_rows(&[vec![0.7, 0.3], vec![0.25, 0.75]]).unwrap();
        assert!(check_lipschitz(&cs, &mu, &other, &Matrix::filled(2, 2, 0.1)).unwrap());
        assert!(matches!(
            check_lipschitz(&cs, &mu, &other, &Matrix::filled(2, 2, 0.01)),
            Err(Error::Precondition(_))
        ));
        let ef = envy_freeness(2, 2, 0.2, 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let p = random_normalized(2, 2, 0.2, 0.8, 1.0, &mut rng).unwrap();
            let q = random_normalized(2, 2, 0.2, 0.8, 1.0, &mut rng).unwrap();
            let e = p.max_abs_diff(&q).unwrap();
            assert!(check_lipschitz(&ef, &p, &q, &Matrix::filled(2, 2, e)).unwrap());
            assert!(check_lipschitz(&cs, &p, &q, &Matrix::filled(2, 2, e)).unwrap());
        }
    }

    proptest! {
        #[test]
        fn robust_rows_sound_and_tight(seed in any::<u64>(), n in 2usize..=3, m in 2usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let center = random_normalized(n, m, 0.05, 0.9, 1.0, &mut rng).unwrap();
            let radius = Matrix::from_vec(n, m, (0..n * m).map(|_| 0.1 * rng.random::<f64>()).collect()).unwrap();
            let bx = ConfidenceBox::new(center, radius, Some((0.05, 0.9))).unwrap();
            let cs = proportionality(n, m, 0.05, 0.9);
            let w = cs.robust_coefficients(&bx).unwrap();
            let x = crate::model::tests::random_allocation(n, m, &mut rng);
            for _ in 0..50 {
                let mu = bx.sample(&mut rng).unwrap();
                let b = cs.coefficients(&mu).unwrap();
                for l in 0..cs.len() {
                    prop_assert!(w[l].frobenius(&x).unwrap() <= b[l].frobenius(&x).unwrap() + 1e-12);
                }
            }
            // The lower corner attains the bound for proportionality.
            let lo = bx.lower_corner().unwrap();
            let b = cs.coefficients(&lo).unwrap();
            for l in 0..cs.len() {
                prop_assert!(b[l].frobenius(&x).unwrap() <= w[l].frobenius(&x).unwrap() + 1e-9);
            }
        }

        #[test]
        fn proportional_slack_depends_only_on_own_row(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mu = random_normalized(3, 3, 0.05, 0.9, 1.0, &mut rng).unwrap();
            let mut other = random_normalized(3, 3, 0.05, 0.9, 1.0, &mut rng).unwrap();
            for k in 0..3 {
                other.set(1, k, mu.get(1, k));
            }
            let cs = proportionality(3, 3, 0.05, 0.9);
            let x = crate::model::tests::random_allocation(3, 3, &mut rng);
            let s1 = cs.evaluate(&x, &mu).unwrap();
            let s2 = cs.evaluate(&x, &other).unwrap();
            prop_assert_eq!(s1[1], s2[1]);
        }

        #[test]
        fn uar_feasible_for_normalized(seed in any::<u64>(), n in 1usize..=4, m in 2usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mu = random_normalized(n, m, 0.02, 0.95, 1.0, &mut rng).unwrap();
            prop_assert!(check_property_uar(&proportionality(n, m, 0.02, 0.95), &mu).unwrap());
        }
    }
}
