//! Cooperative learning across secondary users sharing probe results over a
//! common control channel: each round the policy's strategy plus M−1
//! uniformly sampled extra strategies are all observed, and the
//! importance-weight denominators grow accordingly.
//!
//! The channel-level observation probability has the mixture form
//! `ϱ̃(f) = ρ(f) + (1 − ρ(f))·(m − 1)/(K − 1)`. The probing rate `m` fed into
//! that form is the effective rate implied by the sampling mechanism itself
//! (uniform extras without replacement), which makes the estimator exactly
//! unbiased; the raw per-round count of distinct observed channels is kept
//! as a diagnostic.

use rand::Rng;

use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::subset::Strategy;

/// Cooperative observation settings.
#[derive(Debug, Clone, Copy)]
pub struct CoopConfig {
    /// Strategies observed per round (M >= 1; 1 = single-user).
    pub strategies_per_round: usize,
    /// Configured probing-rate lower bound m used by the schedules.
    pub m_lower_bound: f64,
}

impl Default for CoopConfig {
    fn default() -> Self {
        CoopConfig {
            strategies_per_round: 1,
            m_lower_bound: 1.0,
        }
    }
}

/// The strategies observed in one round: the played one plus probe-only
/// extras, with the union of their channels.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    pub chosen: Strategy,
    pub extras: Vec<Strategy>,
    /// Sorted union of all observed channels.
    pub observed_channels: Vec<usize>,
}

impl ObservationSet {
    pub fn len(&self) -> usize {
        1 + self.extras.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Binomial coefficient in f64 (exact for the small K this crate runs at).
fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut out = 1.0f64;
    for j in 0..k {
        out = out * (n - j) as f64 / (j + 1) as f64;
    }
    out
}

/// Strategy-level observation probability, Eq. form
/// `ϱ(i) = p_i + (1 − p_i)·(M − 1)/(N − 1)`.
pub fn strategy_obs_prob(p_i: f64, observed: usize, num_strategies: f64) -> f64 {
    if observed <= 1 || num_strategies <= 1.0 {
        return p_i;
    }
    p_i + (1.0 - p_i) * (observed as f64 - 1.0) / (num_strategies - 1.0)
}

/// Channel-level observation probability, mixture form
/// `ϱ̃(f) = ρ_f + (1 − ρ_f)·(m − 1)/(K − 1)`.
pub fn channel_obs_prob(rho_f: f64, probing_rate: f64, num_channels: usize) -> f64 {
    if num_channels <= 1 {
        return 1.0;
    }
    rho_f + (1.0 - rho_f) * (probing_rate - 1.0) / (num_channels as f64 - 1.0)
}

/// Effective probing rate of the uniform-extras mechanism.
///
/// Conditional on a channel being outside the played strategy, the chance no
/// extra covers it is hypergeometric: `C(N−1−N_f, M−1)/C(N−1, M−1)` with
/// `N_f = C(K−1, k−1)` strategies containing the channel. Folding that hit
/// probability into the mixture form yields `m_eff = 1 + (K−1)·h`, the value
/// of m that makes `channel_obs_prob` the exact observation probability.
pub fn effective_probing_rate(num_channels: usize, k: usize, observed: usize) -> f64 {
    if observed <= 1 {
        return 1.0;
    }
    let n_total = binomial(num_channels, k);
    let n_with = binomial(num_channels - 1, k - 1);
    let mut miss = 1.0f64;
    for j in 0..(observed - 1) {
        miss *= (n_total - 1.0 - n_with - j as f64) / (n_total - 1.0 - j as f64);
    }
    let hit = 1.0 - miss.max(0.0);
    1.0 + (num_channels as f64 - 1.0) * hit
}

/// Cooperative wrapper around one policy instance.
#[derive(Debug, Clone)]
pub struct CoopPolicy {
    policy: Policy,
    observed: usize,
    m_eff: f64,
    measured_channel_sum: u64,
    rounds: u64,
}

impl CoopPolicy {
    pub fn new(policy: Policy, cfg: CoopConfig) -> Result<Self> {
        let num_channels = policy.config().num_channels;
        let k = policy.config().k;
        let n_total = binomial(num_channels, k);
        let m = cfg.strategies_per_round;
        if m == 0 || (m as f64) > n_total {
            return Err(Error::Config(format!(
                "coop.M must lie in [1, C(K,k)], got {m}"
            )));
        }
        let m_eff = effective_probing_rate(num_channels, k, m);
        if m_eff + 1e-9 < cfg.m_lower_bound {
            return Err(Error::Config(format!(
                "configured probing bound m={} exceeds the effective rate {m_eff:.3} of M={m}",
                cfg.m_lower_bound
            )));
        }
        Ok(CoopPolicy {
            policy,
            observed: m,
            m_eff,
            measured_channel_sum: 0,
            rounds: 0,
        })
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn effective_rate(&self) -> f64 {
        self.m_eff
    }

    /// Mean distinct observed channels per round, in units of k (the
    /// logged empirical probing rate).
    pub fn measured_rate(&self) -> f64 {
        if self.rounds == 0 {
            return self.observed.min(1) as f64;
        }
        self.measured_channel_sum as f64 / self.rounds as f64 / self.policy.config().k as f64
    }

    /// Draws the played strategy from the policy, then M−1 extra strategies
    /// uniformly without replacement (uniform k-subsets, rejected against
    /// duplicates; the C(K,k)-sized space is never materialized).
    pub fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(ObservationSet, Vec<f64>)> {
        let (chosen, rho) = self.policy.select(rng)?;
        let num_channels = self.policy.config().num_channels;
        let k = self.policy.config().k;
        let mut extras: Vec<Strategy> = Vec::with_capacity(self.observed - 1);
        while extras.len() < self.observed - 1 {
            let cand = uniform_subset(num_channels, k, rng);
            if cand != chosen && !extras.contains(&cand) {
                extras.push(cand);
            }
        }
        let mut union: Vec<usize> = chosen.channels().to_vec();
        for e in &extras {
            union.extend_from_slice(e.channels());
        }
        union.sort_unstable();
        union.dedup();
        self.measured_channel_sum += union.len() as u64;
        self.rounds += 1;
        Ok((
            ObservationSet {
                chosen,
                extras,
                observed_channels: union,
            },
            rho,
        ))
    }

    /// Feeds back losses and powers for every observed channel, importance
    /// weighted by the observation probabilities ϱ̃. The dual update runs as
    /// in the single-user algorithm, on the played strategy's expected
    /// estimated power.
    pub fn observe(
        &mut self,
        obs_set: &ObservationSet,
        loss: &[f64],
        power: &[f64],
        rho: &[f64],
    ) -> Result<()> {
        let num_channels = self.policy.config().num_channels;
        let mut updates = Vec::with_capacity(obs_set.observed_channels.len());
        let mut p_dot_power = 0.0;
        for &f in &obs_set.observed_channels {
            let varrho = channel_obs_prob(rho[f], self.m_eff, num_channels);
            if varrho <= 0.0 {
                return Err(Error::Invariant(format!(
                    "observation probability zero on observed channel {f}"
                )));
            }
            let loss_est = loss[f] / varrho;
            let power_est = power[f] / varrho;
            updates.push((f, loss_est, power_est));
            if obs_set.chosen.contains(f) {
                p_dot_power += rho[f] * power[f] / varrho;
            }
        }
        self.policy.apply_update(&updates, p_dot_power)
    }
}

/// Uniform random k-subset of 0..n via partial Fisher-Yates.
fn uniform_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Strategy {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    let mut chosen: Vec<usize> = pool[..k].to_vec();
    chosen.sort_unstable();
    Strategy::from_sorted_unchecked(chosen)
}
