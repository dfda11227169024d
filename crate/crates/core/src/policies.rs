//! Allocation policies.
//!
//! Learning policies are built from [`PublicSpec`] alone and only ever see the
//! [`History`]; the oracle is the one policy constructed from the true means.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constraints::{ConfidenceBox, ConstraintSet};
use crate::error::{Error, Result};
use crate::model::{uar_allocation, Allocation, InstanceSpec, Matrix, PublicSpec, ValueMatrix};
use crate::opt::{self, GridSpec, DEFAULT_GRID_CAP};
use crate::rng::{mix, Purpose};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub t: usize,
    pub k: usize,
    pub i: usize,
    pub v: f64,
}

/// Observed `(t, k_t, i_t, v_t)` tuples with per-cell counts and value sums.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    n: usize,
    m: usize,
    records: Vec<Record>,
    counts: Vec<u64>,
    sums: Matrix,
}

impl History {
    pub fn new(n: usize, m: usize) -> Self {
        History {
            n,
            m,
            records: Vec::new(),
            counts: vec![0; n * m],
            sums: Matrix::zeros(n, m),
        }
    }

    pub fn push(&mut self, t: usize, k: usize, i: usize, v: f64) -> Result<()> {
        if i >= self.n || k >= self.m {
            return Err(Error::InvalidArgument(format!(
                "record ({i}, {k}) outside {}x{}",
                self.n, self.m
            )));
        }
        self.records.push(Record { t, k, i, v });
        self.counts[i * self.m + k] += 1;
        self.sums.set(i, k, self.sums.get(i, k) + v);
        Ok(())
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn item_types(&self) -> usize {
        self.m
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, i: usize, k: usize) -> u64 {
        self.counts[i * self.m + k]
    }

    pub fn value_sums(&self) -> &Matrix {
        &self.sums
    }
}

/// `ln(6 n m T) / sqrt(N_ik)`, or `+inf` for unobserved cells.
pub fn confidence_radii(history: &History, horizon: usize) -> Matrix {
    let (n, m) = (history.players(), history.item_types());
    let log_term = (6.0 * n as f64 * m as f64 * horizon as f64).ln();
    let mut eps = Matrix::zeros(n, m);
    for i in 0..n {
        for k in 0..m {
            let c = history.count(i, k);
            eps.set(
                i,
                k,
                if c == 0 {
                    f64::INFINITY
                } else {
                    (log_term * log_term / c as f64).sqrt()
                },
            );
        }
    }
    eps
}

/// Per-cell sample means; unobserved cells take `placeholder`.
pub fn empirical_means(history: &History, placeholder: f64) -> ValueMatrix {
    let (n, m) = (history.players(), history.item_types());
    let mut mu = Matrix::zeros(n, m);
    for i in 0..n {
        for k in 0..m {
            let c = history.count(i, k);
            mu.set(
                i,
                k,
                if c == 0 {
                    placeholder
                } else {
                    history.value_sums().get(i, k) / c as f64
                },
            );
        }
    }
    ValueMatrix::new(mu)
}

/// The box the learning policies reason about at this point of the history.
pub fn confidence_box(history: &History, public: &PublicSpec, clamp: bool) -> Result<ConfidenceBox> {
    ConfidenceBox::new(
        empirical_means(history, 0.5 * (public.a + public.b)),
        confidence_radii(history, public.horizon),
        clamp.then_some((public.a, public.b)),
    )
}

/// `min(T, ceil(ln(T)^2 sqrt(T) scale))`.
pub fn warmup_rounds(horizon: usize, scale: f64) -> usize {
    let t = horizon as f64;
    let w = (t.ln().powi(2) * t.sqrt() * scale).ceil();
    if w.is_nan() || w <= 0.0 {
        0
    } else {
        (w as usize).min(horizon)
    }
}

/// `min(T, ceil(T^(2/3) scale))`.
pub fn etc_rounds(horizon: usize, scale: f64) -> usize {
    let w = ((horizon as f64).powf(2.0 / 3.0) * scale).ceil();
    if w.is_nan() || w <= 0.0 {
        0
    } else {
        (w as usize).min(horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Uar,
    Oracle,
    Etc,
    UcbFair,
}

impl PolicyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyKind::Uar => "uar",
            PolicyKind::Oracle => "oracle",
            PolicyKind::Etc => "etc",
            PolicyKind::UcbFair => "ucb_fair",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uar" => Ok(PolicyKind::Uar),
            "oracle" => Ok(PolicyKind::Oracle),
            "etc" => Ok(PolicyKind::Etc),
            "ucb_fair" => Ok(PolicyKind::UcbFair),
            other => Err(Error::InvalidArgument(format!(
                "unknown policy kind {other:?} (expected uar, oracle, etc or ucb_fair)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// `None` means `1/sqrt(T)`.
    pub spacing: Option<f64>,
    pub cap: usize,
    pub sample_seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            spacing: None,
            cap: DEFAULT_GRID_CAP,
            sample_seed: 0,
        }
    }
}

impl GridConfig {
    /// The grid used at round `t`; the subsampling seed is derived per round.
    pub fn for_round(&self, horizon: usize, t: usize) -> GridSpec {
        GridSpec {
            spacing: self
                .spacing
                .unwrap_or_else(|| 1.0 / (horizon.max(1) as f64).sqrt()),
            cap: self.cap,
            sample_seed: mix(self.sample_seed, Purpose::Grid as u64, t as u64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub warmup_scale: f64,
    pub etc_scale: f64,
    pub grid: GridConfig,
    /// Intersect confidence boxes with `[a, b]`.
    pub clamp: bool,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            kind: PolicyKind::UcbFair,
            warmup_scale: 1.0,
            etc_scale: 1.0,
            grid: GridConfig::default(),
            clamp: true,
        }
    }
}

impl PolicyConfig {
    pub fn with_kind(kind: PolicyKind) -> Self {
        PolicyConfig {
            kind,
            ..Default::default()
        }
    }

    /// Rounds before the learning pipeline starts (for diagnostics of any policy).
    pub fn warmup(&self, horizon: usize) -> usize {
        match self.kind {
            PolicyKind::Etc => etc_rounds(horizon, self.etc_scale),
            _ => warmup_rounds(horizon, self.warmup_scale),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Uniform exploration before learning starts.
    Warmup,
    /// Full robust-welfare plus exploration pipeline.
    Pipeline,
    /// Robust constraints infeasible for the current box; uniform allocation used.
    Fallback,
    /// Committed allocation (explore-then-commit).
    Committed,
    /// Policies that ignore the history.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundInfo {
    pub phase: Phase,
    /// Largest finite confidence radius, `+inf` if some cell is unobserved.
    pub eps_max: f64,
    pub grid_points: usize,
    pub gridmax: f64,
    pub budget: f64,
}

impl RoundInfo {
    fn simple(phase: Phase) -> Self {
        RoundInfo {
            phase,
            eps_max: f64::NAN,
            grid_points: 0,
            gridmax: f64::NAN,
            budget: f64::NAN,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub allocation: Allocation,
    pub info: RoundInfo,
}

pub trait Policy: Send {
    fn kind(&self) -> PolicyKind;
    fn allocate(&mut self, t: usize, history: &History) -> Result<Decision>;
}

fn check_round(t: usize, horizon: usize) -> Result<()> {
    if t >= horizon {
        return Err(Error::Precondition(format!("round {t} is past the horizon {horizon}")));
    }
    Ok(())
}

fn max_radius(eps: &Matrix) -> f64 {
    eps.as_slice().iter().copied().fold(0.0, f64::max)
}

/// One round of the UCB policy. Before the warm-up ends the allocation is uniform;
/// afterwards the full pipeline runs on the current confidence box, falling back to
/// the uniform allocation if no allocation is robustly feasible for that box.
pub fn ucb_fair_allocate(
    t: usize,
    history: &History,
    public: &PublicSpec,
    cs: &ConstraintSet,
    cfg: &PolicyConfig,
) -> Result<Decision> {
    check_round(t, public.horizon)?;
    let uar = uar_allocation(public.n, public.m);
    if t < warmup_rounds(public.horizon, cfg.warmup_scale) {
        return Ok(Decision {
            allocation: uar,
            info: RoundInfo::simple(Phase::Warmup),
        });
    }
    let bx = confidence_box(history, public, cfg.clamp)?;
    let eps_max = max_radius(bx.radius());
    let fallback = |phase| Decision {
        allocation: uar_allocation(public.n, public.m),
        info: RoundInfo {
            eps_max,
            ..RoundInfo::simple(phase)
        },
    };
    if bx.check_nonempty().is_err() {
        return Ok(fallback(Phase::Fallback));
    }
    match opt::solve_round(&bx, cs, &cfg.grid.for_round(public.horizon, t)) {
        Ok(r) => Ok(Decision {
            allocation: r.allocation,
            info: RoundInfo {
                phase: Phase::Pipeline,
                eps_max,
                grid_points: r.grid.points,
                gridmax: r.grid.value,
                budget: r.budget,
            },
        }),
        Err(Error::Infeasible(_)) => Ok(fallback(Phase::Fallback)),
        Err(e) => Err(e.at_round(t)),
    }
}

/// The allocation explore-then-commit settles on given the history at commit time.
pub fn etc_commit(history: &History, public: &PublicSpec, cs: &ConstraintSet, clamp: bool) -> Result<Allocation> {
    let bx = confidence_box(history, public, clamp)?;
    if bx.check_nonempty().is_err() {
        return Ok(uar_allocation(public.n, public.m));
    }
    let mu_u = bx.upper_confidence()?;
    match opt::solve_robust_welfare(&bx, cs, &mu_u) {
        Ok(x) => Ok(x),
        Err(Error::Infeasible(_)) => Ok(uar_allocation(public.n, public.m)),
        Err(e) => Err(e),
    }
}

pub struct UarPolicy {
    n: usize,
    m: usize,
}

impl UarPolicy {
    pub fn new(n: usize, m: usize) -> Self {
        UarPolicy { n, m }
    }
}

impl Policy for UarPolicy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Uar
    }

    fn allocate(&mut self, _t: usize, _history: &History) -> Result<Decision> {
        Ok(Decision {
            allocation: uar_allocation(self.n, self.m),
            info: RoundInfo::simple(Phase::Fixed),
        })
    }
}

/// Plays `Y^{mu*}` every round.
pub struct OraclePolicy {
    y: Allocation,
}

impl OraclePolicy {
    pub fn new(spec: &InstanceSpec, cs: &ConstraintSet) -> Result<Self> {
        Ok(OraclePolicy {
            y: oracle_allocate(spec, cs)?,
        })
    }
}

pub fn oracle_allocate(spec: &InstanceSpec, cs: &ConstraintSet) -> Result<Allocation> {
    opt::solve_Y(&spec.mu_star, cs)
}

impl Policy for OraclePolicy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Oracle
    }

    fn allocate(&mut self, _t: usize, _history: &History) -> Result<Decision> {
        Ok(Decision {
            allocation: self.y.clone(),
            info: RoundInfo::simple(Phase::Fixed),
        })
    }
}

/// Uniform exploration for `ceil(T^(2/3) etc_scale)` rounds, then one robust welfare
/// solve whose result is played for the rest of the horizon.
pub struct EtcPolicy {
    public: PublicSpec,
    cs: ConstraintSet,
    explore: usize,
    clamp: bool,
    committed: Option<Allocation>,
}

impl EtcPolicy {
    pub fn new(public: PublicSpec, cs: ConstraintSet, cfg: &PolicyConfig) -> Self {
        EtcPolicy {
            explore: etc_rounds(public.horizon, cfg.etc_scale),
            public,
            cs,
            clamp: cfg.clamp,
            committed: None,
        }
    }

    pub fn committed(&self) -> Option<&Allocation> {
        self.committed.as_ref()
    }
}

impl Policy for EtcPolicy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Etc
    }

    fn allocate(&mut self, t: usize, history: &History) -> Result<Decision> {
        check_round(t, self.public.horizon)?;
        if t < self.explore {
            return Ok(Decision {
                allocation: uar_allocation(self.public.n, self.public.m),
                info: RoundInfo::simple(Phase::Warmup),
            });
        }
        if self.committed.is_none() {
            self.committed =
                Some(etc_commit(history, &self.public, &self.cs, self.clamp).map_err(|e| e.at_round(t))?);
        }
        Ok(Decision {
            allocation: self.committed.clone().expect("committed above"),
            info: RoundInfo::simple(Phase::Committed),
        })
    }
}

pub struct UcbFairPolicy {
    public: PublicSpec,
    cs: ConstraintSet,
    cfg: PolicyConfig,
}

impl UcbFairPolicy {
    pub fn new(public: PublicSpec, cs: ConstraintSet, cfg: PolicyConfig) -> Self {
        UcbFairPolicy { public, cs, cfg }
    }
}

impl Policy for UcbFairPolicy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::UcbFair
    }

    fn allocate(&mut self, t: usize, history: &History) -> Result<Decision> {
        ucb_fair_allocate(t, history, &self.public, &self.cs, &self.cfg)
    }
}

/// Instantiates the configured policy. Only the oracle is handed the true means.
pub fn build_policy(cfg: &PolicyConfig, spec: &InstanceSpec, cs: &ConstraintSet) -> Result<Box<dyn Policy>> {
    Ok(match cfg.kind {
        PolicyKind::Uar => Box::new(UarPolicy::new(spec.n, spec.m)),
        PolicyKind::Oracle => Box::new(OraclePolicy::new(spec, cs)?),
        PolicyKind::Etc => Box::new(EtcPolicy::new(spec.public(), cs.clone(), cfg)),
        PolicyKind::UcbFair => Box::new(UcbFairPolicy::new(spec.public(), cs.clone(), *cfg)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::proportionality;

    fn public(n: usize, m: usize, horizon: usize) -> PublicSpec {
        PublicSpec { n, m, horizon, a: 0.2, b: 0.8 }
    }

    #[test]
    fn radii() {
        let mut h = History::new(1, 1);
        let horizon = 100;
        let l = (6.0 * horizon as f64).ln();
        assert_eq!(confidence_radii(&h, horizon).get(0, 0), f64::INFINITY);
        let n_cells = (l * l).ceil() as usize;
        for t in 0..n_cells {
            h.push(t, 0, 0, 0.5).unwrap();
        }
        let e = confidence_radii(&h, horizon).get(0, 0);
        assert!((e - l / (n_cells as f64).sqrt()).abs() < 1e-12);
        assert!(e <= 1.0);

        // 6T = e^4 and N = 4 gives sqrt(16 / 4) = 2.
        let t = (4.0f64.exp() / 6.0).round() as usize;
        let mut h = History::new(1, 1);
        for s in 0..4 {
            h.push(s, 0, 0, 0.1).unwrap();
        }
        let e = confidence_radii(&h, t).get(0, 0);
        let expected = (6.0 * t as f64).ln() / 2.0;
        assert!((e - expected).abs() < 1e-12 && (e - 2.0).abs() < 0.01);
    }

    #[test]
    fn means() {
        let mut h = History::new(2, 2);
        assert_eq!(empirical_means(&h, 0.5).as_slice(), &[0.5; 4]);
        h.push(0, 0, 0, 0.7).unwrap();
        assert_eq!(empirical_means(&h, 0.5).get(0, 0), 0.7);
        h.push(1, 1, 1, 0.4).unwrap();
        h.push(2, 1, 1, 0.6).unwrap();
        assert!((empirical_means(&h, 0.5).get(1, 1) - 0.5).abs() < 1e-15);
        assert_eq!(h.count(1, 1), 2);
        assert!(h.push(3, 2, 0, 0.1).is_err());
    }

    #[test]
    fn warmup_lengths() {
        let l = 20000f64.ln();
        let expected = (l * l * 20000f64.sqrt()).ceil() as usize;
        assert_eq!(expected, 13871);
        assert_eq!(warmup_rounds(20000, 1.0), 13871);
        assert_eq!(warmup_rounds(1000, 1.0), 1000);
        assert_eq!(warmup_rounds(1, 1.0), 0);
        assert_eq!(etc_rounds(1000, 1.0), 100);
    }

    #[test]
    fn policy_kind_round_trip() {
        for k in [PolicyKind::Uar, PolicyKind::Oracle, PolicyKind::Etc, PolicyKind::UcbFair] {
            assert_eq!(k.as_str().parse::<PolicyKind>().unwrap(), k);
        }
        assert!("greedy".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn ucb_warmup_is_uniform() {
        let p = public(2, 2, 20000);
        let cs = proportionality(2, 2, 0.2, 0.8);
        let d = ucb_fair_allocate(0, &History::new(2, 2), &p, &cs, &PolicyConfig::default()).unwrap();
        assert_eq!(d.allocation, uar_allocation(2, 2));
        assert_eq!(d.info.phase, Phase::Warmup);
        assert!(ucb_fair_allocate(20000, &History::new(2, 2), &p, &cs, &PolicyConfig::default()).is_err());
    }

    #[test]
    fn ucb_single_player() {
        let p = PublicSpec { n: 1, m: 2, horizon: 50, a: 0.3, b: 0.7 };
        let cs = proportionality(1, 2, 0.3, 0.7);
        let cfg = PolicyConfig { warmup_scale: 0.01, ..Default::default() };
        let mut h = History::new(1, 2);
        for t in 0..50 {
            let d = ucb_fair_allocate(t, &h, &p, &cs, &cfg).unwrap();
            assert_eq!(d.allocation.as_slice(), &[1.0, 1.0]);
            h.push(t, t % 2, 0, if t % 2 == 0 { 0.4 } else { 0.6 }).unwrap();
        }
    }

    #[test]
    fn ucb_post_warmup_runs_pipeline() {
        let p = public(2, 2, 20000);
        let cs = proportionality(2, 2, 0.2, 0.8);
        let mut h = History::new(2, 2);
        let mu = [[0.8, 0.2], [0.2, 0.8]];
        let mut t = 0;
        for _ in 0..20000 {
            for (i, row) in mu.iter().enumerate() {
                for (k, v) in row.iter().enumerate() {
                    h.push(t, k, i, *v).unwrap();
                    t += 1;
                }
            }
        }
        let d = ucb_fair_allocate(19999, &h, &p, &cs, &PolicyConfig::default()).unwrap();
        assert_eq!(d.info.phase, Phase::Pipeline);
        assert!(d.allocation.is_valid());
        let bx = confidence_box(&h, &p, true).unwrap();
        let w = cs.robust_coefficients(&bx).unwrap();
        for row in &w {
            assert!(row.frobenius(&d.allocation).unwrap() >= 0.5 - 1e-9);
        }
    }

    #[test]
    fn ucb_falls_back_when_box_is_wide() {
        let p = public(2, 2, 100);
        let cs = proportionality(2, 2, 0.2, 0.8);
        let cfg = PolicyConfig { warmup_scale: 0.0, ..Default::default() };
        let d = ucb_fair_allocate(0, &History::new(2, 2), &p, &cs, &cfg).unwrap();
        assert_eq!(d.info.phase, Phase::Fallback);
        assert_eq!(d.allocation, uar_allocation(2, 2));
    }

    #[test]
    fn etc_commits_once() {
        let p = public(2, 2, 1000);
        let cs = proportionality(2, 2, 0.2, 0.8);
        let mut pol = EtcPolicy::new(p, cs, &PolicyConfig::with_kind(PolicyKind::Etc));
        let mut h = History::new(2, 2);
        assert_eq!(pol.allocate(0, &h).unwrap().allocation, uar_allocation(2, 2));
        for t in 0..100 {
            h.push(t, t % 2, (t / 2) % 2, 0.5).unwrap();
        }
        let a = pol.allocate(100, &h).unwrap().allocation;
        h.push(100, 0, 0, 100.0).unwrap();
        let b = pol.allocate(101, &h).unwrap().allocation;
        assert_eq!(a, b);
        assert!(pol.committed().is_some());
    }
}
