//! Seeded property suites: LP against vertex enumeration, the lemma constructions,
//! robust soundness, round-pipeline dominance, and the lower-bound instance.
//!
//! Every check returns a [`CheckResult`] with the number of cases, failures and the
//! worst observed margin, so callers can print or serialize it.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constraints::{proportionality, ConfidenceBox};
use crate::error::{Error, Result};
use crate::lemmas::{self, relaxed_lp, LEMMA_TOL};
use crate::lowerbound::{ef_optimal_mu1, lb_constraints, mu1, regret_decomposition_check};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::model::{random_normalized, uar_allocation, Allocation, Matrix, PublicSpec, ValueMatrix};
use crate::opt::{self, solve_Y};
use crate::policies::{confidence_box, GridConfig, History};

pub const LP_TOL: f64 = 1e-8;
pub const SLACK_TOL: f64 = 1e-9;
pub const UAR_SLACK_TOL: f64 = 1e-12;
pub const DOMINANCE_TOL: f64 = 1e-8;
const SHAPES: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 3)];
/// Value bounds for randomly drawn instances.
pub const RANDOM_A: f64 = 0.05;
pub const RANDOM_B: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    /// Worst value of the checked quantity (its meaning is given in `detail`).
    pub worst: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, cases: usize, failures: usize, worst: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: failures == 0 && cases > 0,
            cases,
            failures,
            worst,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lp,
    Lemmas,
    Robust,
    Lowerbound,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Suite::Lp),
            "lemmas" => Ok(Suite::Lemmas),
            "robust" => Ok(Suite::Robust),
            "lowerbound" => Ok(Suite::Lowerbound),
            other => Err(Error::InvalidArgument(format!(
                "unknown suite {other:?} (expected lp, lemmas, robust or lowerbound)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Lp => "lp",
            Suite::Lemmas => "lemmas",
            Suite::Robust => "robust",
            Suite::Lowerbound => "lowerbound",
        })
    }
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Lp => vec![lp_oracle_check(200, 1)?],
        Suite::Lemmas => vec![
            uar_proportionality_check(100, 2)?,
            continuity_check(100, 3)?,
            slack_construction_check(100, 4)?,
            repair_check(100, 0.02, 5)?,
        ],
        Suite::Robust => vec![robust_soundness_check(20, 1000, 6)?, pipeline_dominance_check(20, 7)?],
        Suite::Lowerbound => vec![ef_optimum_check()?, decomposition_check(1000, 8)?],
    };
    Ok(SuiteReport {
        suite: suite.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// A random bounded LP with at most 4 variables and 6 constraints. One row always
/// caps `sum x`, so the program is never unbounded; right-hand sides may be negative,
/// so some instances are infeasible.
pub fn random_lp<R: Rng + ?Sized>(rng: &mut R) -> LinearProgram {
    let nv = rng.random_range(1..=4);
    let mut lp = LinearProgram::maximize((0..nv).map(|_| rng.random_range(-1.0..1.0)).collect());
    lp = lp.le(vec![1.0; nv], rng.random_range(0.5..4.0));
    let extra = rng.random_range(0..=5);
    for _ in 0..extra {
        let coeffs: Vec<f64> = (0..nv).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rhs: f64 = rng.random_range(-0.5..2.0);
        lp = match rng.random_range(0..6) {
            0 => lp.eq(coeffs, rhs.abs()),
            1 => lp.ge(coeffs, rhs),
            _ => lp.le(coeffs, rhs),
        };
    }
    for v in 0..nv {
        if rng.random_bool(0.3) {
            let lo = rng.random_range(0.0..0.5);
            lp = lp.bounds(v, lo, lo + rng.random_range(0.0..2.0));
        }
    }
    lp
}

/// Simplex optimum against the best vertex; worst = largest objective gap.
pub fn lp_oracle_check(count: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut worst, mut infeasible) = (0, 0.0f64, 0);
    for _ in 0..count {
        let prog = random_lp(&mut rng);
        let sol = lp::solve(&prog)?;
        let oracle = lp::vertex_optimum(&prog)?;
        match (sol.status, oracle) {
            (LpStatus::Optimal, Some(best)) => {
                let gap = (sol.objective_value - best).abs();
                worst = worst.max(gap);
                if gap > LP_TOL || prog.max_violation(&sol.x) > lp::FEASIBILITY_TOL {
                    failures += 1;
                }
            }
            (LpStatus::Infeasible, None) => infeasible += 1,
            _ => failures += 1,
        }
    }
    Ok(CheckResult::new(
        "lp_vertex_oracle",
        count,
        failures,
        worst,
        format!("max |simplex - vertex optimum|; {infeasible} infeasible instances agreed"),
    ))
}

/// Uniform allocation slack under proportionality; worst = largest |slack|.
pub fn uar_proportionality_check(count: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut worst) = (0, 0.0f64);
    for _ in 0..count {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(2..=4);
        let mu = random_normalized(n, m, 0.02, 0.95, 1.0, &mut rng)?;
        let cs = proportionality(n, m, 0.02, 0.95);
        for s in cs.evaluate(&uar_allocation(n, m), &mu)? {
            worst = worst.max(s.abs());
            if s.abs() > UAR_SLACK_TOL {
                failures += 1;
            }
        }
    }
    Ok(CheckResult::new("uar_proportionality", count, failures, worst, "max |slack| of the uniform allocation"))
}

/// Moves `delta` between two entries of one row while keeping entries in `[a, b]`.
fn perturb_within_row<R: Rng + ?Sized>(mu: &mut ValueMatrix, budget: f64, a: f64, b: f64, rng: &mut R) {
    let (n, m) = mu.shape();
    let mut left = budget;
    for _ in 0..2 {
        let i = rng.random_range(0..n);
        let k1 = rng.random_range(0..m);
        let k2 = (k1 + rng.random_range(1..m)) % m;
        let want = rng.random_range(0.0..=left / 2.0);
        let room = (mu.get(i, k1) - a).min(b - mu.get(i, k2)).max(0.0);
        let d = want.min(room);
        let (v1, v2) = (mu.get(i, k1) - d, mu.get(i, k2) + d);
        mu.set(i, k1, v1);
        mu.set(i, k2, v2);
        left -= 2.0 * d;
    }
}

/// Welfare continuity on nearby pairs; worst = largest `difference - bound`.
pub fn continuity_check(per_shape: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (RANDOM_A, RANDOM_B);
    let (mut failures, mut worst, mut cases) = (0, f64::NEG_INFINITY, 0);
    for (n, m) in SHAPES {
        let cs = proportionality(n, m, a, b);
        for _ in 0..per_shape {
            let mu = random_normalized(n, m, a, b, 1.0, &mut rng)?;
            let mut other = mu.clone();
            perturb_within_row(&mut other, 0.05, a, b, &mut rng);
            let r = lemmas::verify_continuity(&mu, &other, &cs)?;
            if r.l1_distance > 0.05 + 1e-12 {
                return Err(Error::Contract("perturbation exceeded its l1 budget".into()));
            }
            worst = worst.max(r.difference - r.bound);
            cases += 1;
            if !r.ok {
                failures += 1;
            }
        }
    }
    Ok(CheckResult::new("welfare_continuity", cases, failures, worst, "max (|welfare gap| - (bn/a) l1)"))
}

/// Slack construction from `Y^mu`; worst = number of failed clauses in a case.
pub fn slack_construction_check(count: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (RANDOM_A, RANDOM_B);
    let (mut failures, mut cases, mut uar_cases) = (0, 0, 0);
    for c in 0..count {
        let (n, m) = SHAPES[c % SHAPES.len()];
        let mu = random_normalized(n, m, a, b, 1.0, &mut rng)?;
        let y = solve_Y(&mu, &proportionality(n, m, a, b))?;
        for gamma in [1e-3, 1e-2] {
            if gamma >= a / (b * n as f64) {
                return Err(Error::Contract(format!("gamma {gamma} out of range for n = {n}")));
            }
            let r = lemmas::verify_slack_construction(&y, &mu, gamma, a, b)?;
            cases += 1;
            uar_cases += r.is_uar as usize;
            if !r.passed() {
                failures += 1;
            }
        }
    }
    Ok(CheckResult::new(
        "slack_construction",
        cases,
        failures,
        failures as f64,
        format!("failed cases; {uar_cases} cases took the uniform branch"),
    ))
}

/// Repairs relaxed-LP vertices; worst = largest `loss - (bn/a) eps`.
pub fn repair_check(count: usize, eps: f64, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (RANDOM_A, RANDOM_B);
    let (mut failures, mut worst) = (0, f64::NEG_INFINITY);
    let mut uar_cases = 0;
    for c in 0..count {
        let (n, m) = SHAPES[c % SHAPES.len()];
        let mu = random_normalized(n, m, a, b, 1.0, &mut rng)?;
        let objective = (0..n * m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sol = lp::solve(&relaxed_lp(&mu, eps, objective)?)?;
        if !sol.is_optimal() {
            return Err(Error::Contract("relaxed LP should contain the uniform allocation".into()));
        }
        let z = Allocation::renormalized(Matrix::from_vec(n, m, sol.x)?)?;
        let w = lemmas::construct_w(&z, &mu, eps, a, b)?;
        uar_cases += (w == uar_allocation(n, m)) as usize;
        let slack = proportionality(n, m, a, b).min_slack(&w, &mu)?;
        let excess = z.frobenius(&mu)? - w.frobenius(&mu)? - b * n as f64 / a * eps;
        worst = worst.max(excess);
        if slack < -SLACK_TOL || excess > LEMMA_TOL {
            failures += 1;
        }
    }
    Ok(CheckResult::new(
        "relaxed_repair",
        count,
        failures,
        worst,
        format!("max (welfare loss - (bn/a) eps); {uar_cases} repairs were uniform"),
    ))
}

/// A random clamped box on which the robust welfare LP is feasible. Returns the box
/// and the number of rejected draws.
fn feasible_box<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<(ConfidenceBox, usize)> {
    let (a, b) = (RANDOM_A, 0.9);
    let cs = proportionality(n, m, a, b);
    for rejected in 0..10_000 {
        let center = random_normalized(n, m, a, b, 0.5, rng)?;
        let radius = Matrix::from_vec(n, m, (0..n * m).map(|_| rng.random_range(0.0..0.08)).collect())?;
        let bx = ConfidenceBox::new(center, radius, Some((a, b)))?;
        let mu_u = bx.upper_confidence()?;
        if opt::solve_robust_welfare(&bx, &cs, &mu_u).is_ok() {
            return Ok((bx, rejected));
        }
    }
    Err(Error::Contract("no feasible box found".into()))
}

/// Robust welfare solutions checked at sampled box members; worst = most negative slack.
pub fn robust_soundness_check(boxes: usize, samples: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut worst, mut rejected) = (0, f64::INFINITY, 0);
    for c in 0..boxes {
        let (n, m) = SHAPES[c % SHAPES.len()];
        let (bx, r) = feasible_box(n, m, &mut rng)?;
        rejected += r;
        let cs = proportionality(n, m, RANDOM_A, 0.9);
        let x = opt::solve_robust_welfare(&bx, &cs, &bx.upper_confidence()?)?;
        for _ in 0..samples {
            let mu = bx.sample(&mut rng)?;
            let s = cs.min_slack(&x, &mu)?;
            worst = worst.min(s);
            if s < -SLACK_TOL {
                failures += 1;
            }
        }
    }
    Ok(CheckResult::new(
        "robust_soundness",
        boxes * samples,
        failures,
        worst,
        format!("min slack over sampled box members; {rejected} infeasible boxes redrawn"),
    ))
}

/// A synthetic history with `counts[i][k]` observations per cell, values drawn
/// around `mu`.
pub fn scripted_history<R: Rng + ?Sized>(mu: &ValueMatrix, counts: &[u64], noise: f64, rng: &mut R) -> Result<History> {
    let (n, m) = mu.shape();
    let mut h = History::new(n, m);
    let mut t = 0;
    for i in 0..n {
        for k in 0..m {
            for _ in 0..counts[i * m + k] {
                h.push(t, k, i, mu.get(i, k) + noise * rng.random_range(-1.0..1.0))?;
                t += 1;
            }
        }
    }
    Ok(h)
}

/// Explorer dominance in scripted post-warm-up rounds; worst = most negative margin.
pub fn pipeline_dominance_check(rounds: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let public = PublicSpec { n: 2, m: 2, horizon: 20_000, a: 0.2, b: 0.8 };
    let cs = proportionality(2, 2, public.a, public.b);
    let mu = ValueMatrix::from_rows(&[vec![0.8, 0.2], vec![0.2, 0.8]])?;
    let grid = GridConfig { sample_seed: seed, ..GridConfig::default() };
    let (mut failures, mut worst, mut done) = (0, f64::INFINITY, 0);
    let mut attempts = 0;
    while done < rounds {
        attempts += 1;
        if attempts > 100 * rounds {
            return Err(Error::Contract("could not script feasible rounds".into()));
        }
        let counts: Vec<u64> = (0..4).map(|_| rng.random_range(2_500..20_000)).collect();
        let h = scripted_history(&mu, &counts, 0.1, &mut rng)?;
        let bx = confidence_box(&h, &public, true)?;
        let r = match opt::solve_round(&bx, &cs, &grid.for_round(public.horizon, h.len())) {
            Ok(r) => r,
            Err(Error::Infeasible(_)) => continue,
            Err(e) => return Err(e),
        };
        done += 1;
        let nm = 4.0;
        let mut bad = false;
        for i in 0..2 {
            for k in 0..2 {
                let z = &r.explorers[i * 2 + k];
                let m1 = z.get(i, k) - r.xhat.get(i, k);
                let m2 = r.allocation.get(i, k) - r.xhat.get(i, k) / nm;
                worst = worst.min(m1).min(m2);
                bad |= m1 < -DOMINANCE_TOL || m2 < -DOMINANCE_TOL;
            }
        }
        failures += bad as usize;
    }
    Ok(CheckResult::new(
        "pipeline_dominance",
        rounds,
        failures,
        worst,
        format!("min of Z_ik - Xhat_ik and X_ik - Xhat_ik/(nm); {} infeasible scripts skipped", attempts - rounds),
    ))
}

/// `Y^{mu1}` under envy-freeness against the known permutation; worst = max entry gap.
pub fn ef_optimum_check() -> Result<CheckResult> {
    let y = solve_Y(&mu1(), &lb_constraints())?;
    let gap = y.max_abs_diff(&ef_optimal_mu1())?;
    let welfare_gap = (y.frobenius(&mu1())? - 80.0 / 42.0).abs();
    let failures = (gap > LP_TOL) as usize + (welfare_gap > LP_TOL) as usize;
    Ok(CheckResult::new(
        "ef_optimum",
        2,
        failures,
        gap.max(welfare_gap),
        "max entry gap to the permutation and welfare gap to 80/42",
    ))
}

/// Random envy-free vertices for `mu1`, from LPs with random objectives.
pub fn ef_vertices<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Result<Vec<Allocation>> {
    let mu = mu1();
    let cs = lb_constraints();
    let rows = cs.coefficients(&mu)?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut prog = LinearProgram::maximize((0..9).map(|_| rng.random_range(-1.0..1.0)).collect());
        for k in 0..3 {
            let mut row = vec![0.0; 9];
            for i in 0..3 {
                row[i * 3 + k] = 1.0;
            }
            prog = prog.eq(row, 1.0);
        }
        for r in &rows {
            prog = prog.ge(r.as_slice().to_vec(), 0.0);
        }
        let sol = lp::solve(&prog)?;
        if !sol.is_optimal() {
            return Err(Error::Contract("envy-free polytope must be nonempty".into()));
        }
        out.push(Allocation::renormalized(Matrix::from_vec(3, 3, sol.x)?)?);
    }
    Ok(out)
}

/// The per-round regret bound on sampled envy-free allocations; worst = min `lhs - rhs`.
pub fn decomposition_check(samples: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut worst) = (0, f64::INFINITY);
    for x in ef_vertices(samples, &mut rng)? {
        // Vertices can carry ~1e-12 rounding in the EF rows; such points are still checked.
        let c = match regret_decomposition_check(&x) {
            Ok(c) => c,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        worst = worst.min(c.lhs - c.rhs);
        if !c.ok {
            failures += 1;
        }
    }
    Ok(CheckResult::new("regret_decomposition", samples, failures, worst, "min (lhs - rhs)"))
}
