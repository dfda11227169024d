//! The stochastic environment, the run loop, and run metrics.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::constraints::{self, ConstraintSet};
use crate::error::{Error, Result};
use crate::model::{Allocation, InstanceSpec};
use crate::opt;
use crate::policies::{self, build_policy, History, Phase, PolicyConfig, PolicyKind};
use crate::rng::{substream, Purpose};

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    pub k: usize,
    pub i: usize,
    pub v: f64,
    pub regret_inc: f64,
    /// Smallest constraint slack of this round's allocation under the true means.
    pub min_slack: f64,
    /// Whether the true means lie in the (clamped) confidence box at decision time.
    pub in_box: bool,
    pub phase: Phase,
    pub allocation: Option<Allocation>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub spec: InstanceSpec,
    pub policy: PolicyConfig,
    pub records: Vec<RoundRecord>,
    pub cumulative_regret: Vec<f64>,
    /// `<Y^{mu*}, mu*>`.
    pub optimum_welfare: f64,
    pub optimum: Allocation,
    pub warmup_rounds: usize,
}

impl RunResult {
    pub fn final_regret(&self) -> f64 {
        self.cumulative_regret.last().copied().unwrap_or(0.0)
    }

    pub fn policy_kind(&self) -> PolicyKind {
        self.policy.kind
    }

    pub fn rng_seed(&self) -> u64 {
        self.spec.seed
    }
}

fn draw_player<R: Rng + ?Sized>(x: &Allocation, k: usize, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let n = x.rows();
    let mut acc = 0.0;
    for i in 0..n {
        acc += x.get(i, k);
        if u < acc {
            return i;
        }
    }
    // Rounding left a sliver of mass past the last cumulative sum.
    (0..n).rev().find(|&i| x.get(i, k) > 0.0).unwrap_or(n - 1)
}

/// Simulates `T` rounds. Draws are keyed by `(seed, purpose, t)`: item types,
/// assignments and values come from independent substreams.
pub fn run(spec: &InstanceSpec, policy: &PolicyConfig, record_full_allocations: bool) -> Result<RunResult> {
    if let Err(v) = spec.validate() {
        let msgs: Vec<String> = v.iter().map(|e| e.to_string()).collect();
        return Err(Error::InvalidArgument(msgs.join("; ")));
    }
    let cs = constraints::for_kind(spec.constraint_kind, spec.n, spec.m, spec.a, spec.b)?;
    let optimum = opt::solve_Y(&spec.mu_star, &cs)?;
    let optimum_welfare = optimum.frobenius(&spec.mu_star)?;
    let mut pol = build_policy(policy, spec, &cs)?;
    let public = spec.public();
    let noise = Normal::new(0.0, spec.noise_sigma)
        .map_err(|e| Error::InvalidArgument(format!("noise: {e}")))?;

    let mut history = History::new(spec.n, spec.m);
    let mut records = Vec::with_capacity(spec.horizon);
    let mut cumulative_regret = Vec::with_capacity(spec.horizon);
    let mut cum = 0.0;
    for t in 0..spec.horizon {
        let tu = t as u64;
        let k = substream(spec.seed, Purpose::ItemType, tu).random_range(0..spec.m);
        let decision = pol.allocate(t, &history).map_err(|e| e.at_round(t))?;
        let x = decision.allocation;
        if x.shape() != (spec.n, spec.m) || !x.is_valid() {
            return Err(Error::Contract("policy returned an invalid allocation".into()).at_round(t));
        }
        let bx = policies::confidence_box(&history, &public, policy.clamp)?;
        let in_box = bx.contains(&spec.mu_star, 0.0);
        let i = draw_player(&x, k, &mut substream(spec.seed, Purpose::Assignment, tu));
        let v = spec.mu_star.get(i, k) + noise.sample(&mut substream(spec.seed, Purpose::Value, tu));
        let regret_inc = optimum_welfare - x.frobenius(&spec.mu_star)?;
        let min_slack = cs.min_slack(&x, &spec.mu_star)?;
        cum += regret_inc;
        cumulative_regret.push(cum);
        history.push(t, k, i, v)?;
        records.push(RoundRecord {
            t,
            k,
            i,
            v,
            regret_inc,
            min_slack,
            in_box,
            phase: decision.info.phase,
            allocation: record_full_allocations.then_some(x),
        });
    }
    Ok(RunResult {
        spec: spec.clone(),
        policy: *policy,
        records,
        cumulative_regret,
        optimum_welfare,
        optimum,
        warmup_rounds: policy.warmup(spec.horizon),
    })
}

pub fn regret_curve(result: &RunResult) -> Vec<f64> {
    let mut acc = 0.0;
    result
        .records
        .iter()
        .map(|r| {
            acc += r.regret_inc;
            acc
        })
        .collect()
}

/// Per-round `max(0, -min slack)` under the true means. Uses the stored allocations
/// when present, otherwise the slack recorded during the run.
pub fn violation_trace(result: &RunResult, cs: &ConstraintSet) -> Result<Vec<f64>> {
    result
        .records
        .iter()
        .map(|r| {
            let s = match &r.allocation {
                Some(x) => cs.min_slack(x, &result.spec.mu_star)?,
                None => r.min_slack,
            };
            Ok((-s).max(0.0))
        })
        .collect()
}

/// `max_i [ (1/n) sum_t mu*_{i,k_t} - sum_{t : i_t = i} mu*_{i,k_t} ]`, floored at 0.
pub fn disproportionality(result: &RunResult) -> f64 {
    let spec = &result.spec;
    let mut fair_share = vec![0.0; spec.n];
    let mut received = vec![0.0; spec.n];
    for r in &result.records {
        for (i, share) in fair_share.iter_mut().enumerate() {
            *share += spec.mu_star.get(i, r.k) / spec.n as f64;
        }
        received[r.i] += spec.mu_star.get(r.i, r.k);
    }
    fair_share
        .iter()
        .zip(&received)
        .map(|(f, g)| f - g)
        .fold(0.0, f64::max)
}

/// Fraction of post-warm-up rounds whose confidence box contained the true means;
/// 1 when there are no such rounds.
pub fn event_e_diagnostic(result: &RunResult) -> f64 {
    let post: Vec<&RoundRecord> = result.records.iter().skip(result.warmup_rounds).collect();
    if post.is_empty() {
        return 1.0;
    }
    post.iter().filter(|r| r.in_box).count() as f64 / post.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub final_regret: f64,
    pub max_violation: f64,
    pub disproportionality: f64,
    pub event_e_fraction: f64,
    pub fallback_rounds: usize,
    pub pipeline_rounds: usize,
}

pub fn summarize(result: &RunResult) -> Result<RunSummary> {
    let cs = constraints::for_kind(
        result.spec.constraint_kind,
        result.spec.n,
        result.spec.m,
        result.spec.a,
        result.spec.b,
    )?;
    let count = |p: Phase| result.records.iter().filter(|r| r.phase == p).count();
    Ok(RunSummary {
        final_regret: result.final_regret(),
        max_violation: violation_trace(result, &cs)?.into_iter().fold(0.0, f64::max),
        disproportionality: disproportionality(result),
        event_e_fraction: event_e_diagnostic(result),
        fallback_rounds: count(Phase::Fallback),
        pipeline_rounds: count(Phase::Pipeline),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchRow {
    pub spec_index: usize,
    pub policy: PolicyKind,
    pub seed: u64,
    pub summary: Option<RunSummary>,
    pub error: Option<String>,
}

/// Runs every `(spec, policy, seed)` combination in parallel. Rows come back in that
/// nesting order; a failed run produces a row with `error` set.
pub fn batch(specs: &[InstanceSpec], policies: &[PolicyConfig], seeds: &[u64]) -> Vec<BatchRow> {
    let jobs: Vec<(usize, usize, u64)> = (0..specs.len())
        .flat_map(|s| (0..policies.len()).flat_map(move |p| seeds.iter().map(move |&seed| (s, p, seed))))
        .collect();
    jobs.par_iter()
        .map(|&(s, p, seed)| {
            let spec = InstanceSpec {
                seed,
                ..specs[s].clone()
            };
            let outcome = run(&spec, &policies[p], false).and_then(|r| summarize(&r));
            let (summary, error) = match outcome {
                Ok(sm) => (Some(sm), None),
                Err(e) => (None, Some(e.to_string())),
            };
            BatchRow {
                spec_index: s,
                policy: policies[p].kind,
                seed,
                summary,
                error,
            }
        })
        .collect()
}
