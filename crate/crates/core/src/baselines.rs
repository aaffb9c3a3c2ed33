//! Comparison policies and the hindsight oracle behind regret computation:
//! the plain combinatorial exponential-weights baseline (the policy with
//! gap-adaptive exploration disabled and the multiplier frozen), CombUCB1,
//! and the best fixed strategy in hindsight.

use crate::error::{Error, Result};
use crate::policy::{Policy, PolicyConfig, ScheduleMode};
use crate::subset::{build_covering_set, Strategy};

/// Configures the policy as a plain combinatorial EXP3: adversarial-only
/// exploration (ξ ≡ +∞) and the Lagrange multiplier frozen at zero. Same
/// sampler, no budget handling.
pub fn exp3_policy(mut cfg: PolicyConfig) -> Result<Policy> {
    cfg.mode = ScheduleMode::AdversarialOnly;
    cfg.lambda_enabled = false;
    cfg.known_gaps = None;
    Policy::new(cfg)
}

/// CombUCB1 bookkeeping: per-channel pull counts and mean observed losses.
#[derive(Debug, Clone)]
pub struct UcbState {
    pub counts: Vec<u64>,
    pub mean_loss: Vec<f64>,
    pub t: u64,
    k: usize,
    /// Covering strategies still owed a play during initialization.
    init_queue: Vec<Strategy>,
}

impl UcbState {
    pub fn new(num_channels: usize, k: usize) -> Result<Self> {
        let covering = build_covering_set(num_channels, k)?;
        let mut init_queue: Vec<Strategy> = covering.strategies().to_vec();
        init_queue.reverse(); // play block 0 first
        Ok(UcbState {
            counts: vec![0; num_channels],
            mean_loss: vec![0.0; num_channels],
            t: 0,
            k,
            init_queue,
        })
    }
}

/// Selects the k channels with the smallest lower-confidence loss index
/// `μ̂(f) − sqrt(1.5·ln t / N(f))`, ties toward the lower channel index.
/// While any channel is unplayed, the covering strategies are issued in
/// order instead.
pub fn combucb1_select(state: &UcbState) -> Strategy {
    if let Some(next) = state.init_queue.last() {
        return next.clone();
    }
    let t = state.t.max(2) as f64;
    let mut order: Vec<usize> = (0..state.counts.len()).collect();
    let index = |f: usize| state.mean_loss[f] - (1.5 * t.ln() / state.counts[f] as f64).sqrt();
    order.sort_by(|&a, &b| index(a).partial_cmp(&index(b)).unwrap().then(a.cmp(&b)));
    order.truncate(state.k);
    order.sort_unstable();
    Strategy::from_sorted_unchecked(order)
}

/// Running-mean update for the played channels only.
pub fn combucb1_update(state: &mut UcbState, strategy: &Strategy, losses: &[f64]) {
    state.t += 1;
    if let Some(front) = state.init_queue.last() {
        if front == strategy {
            state.init_queue.pop();
        }
    }
    for (idx, &f) in strategy.channels().iter().enumerate() {
        state.counts[f] += 1;
        let n = state.counts[f] as f64;
        state.mean_loss[f] += (losses[idx] - state.mean_loss[f]) / n;
    }
}

/// Best fixed strategy against the cumulative true losses: the k channels
/// with the smallest totals (strategy loss is channel-additive, so the
/// greedy choice is exact). Ties break toward the lower index.
pub fn hindsight_best(cumulative_true_loss: &[f64], k: usize) -> Result<(Strategy, f64)> {
    if k == 0 || k > cumulative_true_loss.len() {
        return Err(Error::Config(format!(
            "hindsight requires 1 <= k <= K, got k={k}, K={}",
            cumulative_true_loss.len()
        )));
    }
    let mut order: Vec<usize> = (0..cumulative_true_loss.len()).collect();
    order.sort_by(|&a, &b| {
        cumulative_true_loss[a]
            .partial_cmp(&cumulative_true_loss[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    order.truncate(k);
    let value = order.iter().map(|&f| cumulative_true_loss[f]).sum();
    order.sort_unstable();
    Ok((Strategy::from_sorted_unchecked(order), value))
}
