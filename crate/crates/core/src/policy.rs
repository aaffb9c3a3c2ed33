//! The constrained channel-selection policy: exponential weights over
//! k-subsets with per-channel adaptive exploration, importance-weighted
//! loss/power estimation, a Lagrange multiplier for the long-term power
//! budget, empirical gap estimation, the ε access decision, and a mini-batch
//! wrapper for memory-bounded adaptive adversaries.
//!
//! Weights are always recomputed from the cumulative combined loss with the
//! current round's learning rate, `w_n(f) = exp(-η_n·Ψ̃_n(f))`, normalized so
//! the largest weight is 1 before entering the subset DP. Incremental
//! multiplicative updates would be wrong here because η_n changes every
//! round.

use rand::Rng;

use crate::error::{Error, Result};
use crate::subset::{build_covering_set, CoveringSet, Strategy, SubsetDp};

/// Exploration schedule flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    /// ξ from the true per-channel gaps (supplied by the caller).
    KnownGap,
    /// ξ from the running empirical gap estimate.
    Avg,
    /// ξ ≡ +∞: exploration is capped by min{1/(2K), β_n} alone.
    AdversarialOnly,
}

/// Fully evaluated schedule for one round.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub n: u64,
    pub beta: f64,
    pub eta: f64,
    pub delta: f64,
    /// Per-channel exploration parameter ξ_n(f); +∞ where inactive.
    pub xi: Vec<f64>,
    /// Per-channel exploration probability ε_n(f) = min{1/(2K), β_n, ξ_n(f)}.
    pub eps: Vec<f64>,
    /// γ_n = Σ_f ε_n(f), total exploration mass; at most 1/2.
    pub gamma: f64,
    pub c: f64,
    pub mode: ScheduleMode,
}

/// ξ_n(f) = c·ln(n·Δ²) / (m·n·Δ²), the gap-adaptive exploration knob.
///
/// Degenerate inputs (Δ = 0, or a log argument at or below 1) disable the
/// knob by returning +∞ so the ε min falls back to the remaining terms; the
/// best channel legitimately has a vanishing gap and must not receive extra
/// forced exploration.
fn xi_value(n: u64, gap: f64, c: f64, probing_rate: f64) -> f64 {
    if gap <= 0.0 {
        return f64::INFINITY;
    }
    let arg = n as f64 * gap * gap;
    if arg <= 1.0 {
        return f64::INFINITY;
    }
    c * arg.ln() / (probing_rate * arg)
}

/// Builds the schedule for round `n` (1-based).
///
/// `gaps` supplies the per-channel gap the ξ formula reads: the true gaps in
/// known-gap mode, the running estimate in avg mode; it is ignored in
/// adversarial-only mode. `probing_rate` is the configured cooperative
/// probing lower bound m (1 for a single user): it scales ξ by 1/m and δ_n
/// by 1/m.
pub fn make_schedule(
    n: u64,
    num_channels: usize,
    k: usize,
    c: f64,
    mode: ScheduleMode,
    gaps: &[f64],
    probing_rate: f64,
) -> Result<Schedule> {
    if n == 0 {
        return Err(Error::Config("schedule round index must be >= 1".into()));
    }
    if probing_rate < 1.0 {
        return Err(Error::Config(format!("probing rate {probing_rate} < 1")));
    }
    let big_k = num_channels as f64;
    let nf = n as f64;
    let beta = 0.5 * (big_k.ln() / (nf * big_k)).sqrt();
    let eta = beta;
    let delta = 2.0 * k as f64 / probing_rate * (big_k * big_k.ln() / nf).sqrt();
    let cap = 1.0 / (2.0 * big_k);

    let xi: Vec<f64> = match mode {
        ScheduleMode::AdversarialOnly => vec![f64::INFINITY; num_channels],
        ScheduleMode::KnownGap | ScheduleMode::Avg => {
            if gaps.len() != num_channels {
                return Err(Error::Config(format!(
                    "gap vector length {} does not match K={num_channels}",
                    gaps.len()
                )));
            }
            gaps.iter()
                .map(|&g| xi_value(n, g, c, probing_rate))
                .collect()
        }
    };
    let eps: Vec<f64> = xi.iter().map(|&x| cap.min(beta).min(x).max(0.0)).collect();
    let gamma: f64 = eps.iter().sum();
    debug_assert!(gamma <= 0.5 + 1e-12);
    Ok(Schedule {
        n,
        beta,
        eta,
        delta,
        xi,
        eps,
        gamma,
        c,
        mode,
    })
}

/// Semi-bandit feedback for one round: loss and power for exactly the played
/// channels, plus whether the access step actually transmitted.
#[derive(Debug, Clone)]
pub struct Observation {
    pub strategy: Strategy,
    /// Per-channel loss in [0,1], aligned with `strategy.channels()`.
    pub loss: Vec<f64>,
    /// Per-channel power in [0, 1/k], aligned with `strategy.channels()`.
    pub power: Vec<f64>,
    pub transmitted: bool,
}

/// Cumulative estimator state of the learner.
#[derive(Debug, Clone)]
pub struct PolicyState {
    /// Completed rounds.
    pub n: u64,
    /// L̃: cumulative importance-weighted loss per channel.
    pub cum_loss: Vec<f64>,
    /// Γ̃: cumulative importance-weighted power per channel.
    pub cum_power: Vec<f64>,
    /// Ψ̃: cumulative combined (loss + λ-weighted power) estimate.
    pub cum_combined: Vec<f64>,
    /// Lagrange multiplier, non-negative.
    pub lambda: f64,
    /// Δ̂: empirical gap estimate per channel.
    pub gap_hat: Vec<f64>,
    /// ρ of the most recent draw.
    pub last_marginals: Vec<f64>,
}

impl PolicyState {
    pub fn new(num_channels: usize) -> Self {
        PolicyState {
            n: 0,
            cum_loss: vec![0.0; num_channels],
            cum_power: vec![0.0; num_channels],
            cum_combined: vec![0.0; num_channels],
            lambda: 0.0,
            gap_hat: vec![0.0; num_channels],
            last_marginals: vec![0.0; num_channels],
        }
    }
}

/// Δ̂_n(f) = min{1, (L̃_n(f) − min_f' L̃_n(f')) / n}. At least one channel
/// reports a zero gap.
pub fn estimate_gaps(cum_loss: &[f64], n: u64) -> Vec<f64> {
    if n == 0 {
        return vec![0.0; cum_loss.len()];
    }
    let min = cum_loss.iter().cloned().fold(f64::INFINITY, f64::min);
    cum_loss
        .iter()
        .map(|&l| ((l - min) / n as f64).min(1.0))
        .collect()
}

/// Projected-gradient step on the dual variable:
/// `λ' = [(1 − δ_n·η_n·√γ_n)·λ − η_n·√γ_n·(P_o − p·P̃)]_+`.
pub fn update_lagrange(lambda: f64, schedule: &Schedule, p_dot_power: f64, budget: f64) -> f64 {
    let step = schedule.eta * schedule.gamma.sqrt();
    ((1.0 - schedule.delta * step) * lambda - step * (budget - p_dot_power)).max(0.0)
}

/// Bernoulli access decision of the ε-SPA scheme. Affects time accounting
/// and achieved gain, never the learning updates.
pub fn access_decision<R: Rng + ?Sized>(eps_access: f64, rng: &mut R) -> bool {
    debug_assert!((0.0..=1.0).contains(&eps_access) && eps_access > 0.0);
    rng.gen::<f64>() < eps_access
}

/// Batch size of the mini-batch wrapper against a memory-bounded adaptive
/// adversary: `τ = (4k√(K ln K))^(−1/3) · n^(1/3)`, rounded, at least 1.
pub fn minibatch_tau(n: u64, num_channels: usize, k: usize) -> u32 {
    let base = 4.0 * k as f64 * (num_channels as f64 * (num_channels as f64).ln()).sqrt();
    let tau = base.powf(-1.0 / 3.0) * (n as f64).powf(1.0 / 3.0);
    (tau.round() as u32).max(1)
}

/// Static configuration of one policy instance.
#[derive(Debug, Clone)]
pub struct PolicyConfig {
    pub num_channels: usize,
    pub k: usize,
    /// Exploration constant c in the ξ formula.
    pub c: f64,
    pub mode: ScheduleMode,
    /// True gaps for known-gap mode; ignored otherwise.
    pub known_gaps: Option<Vec<f64>>,
    /// When false the multiplier is frozen at zero (plain combinatorial
    /// exponential-weights baseline).
    pub lambda_enabled: bool,
    /// Power budget P_o.
    pub budget: f64,
    /// Transmission probability ε of the access step.
    pub eps_access: f64,
    /// Configured cooperative probing-rate lower bound m (1 = single user).
    pub probing_rate: f64,
}

impl PolicyConfig {
    pub fn new(num_channels: usize, k: usize) -> Self {
        PolicyConfig {
            num_channels,
            k,
            c: 1.0 / 32.0,
            mode: ScheduleMode::AdversarialOnly,
            known_gaps: None,
            lambda_enabled: true,
            budget: 1.0,
            eps_access: 1.0,
            probing_rate: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.num_channels {
            return Err(Error::Config(format!(
                "policy requires 1 <= k <= K, got k={}, K={}",
                self.k, self.num_channels
            )));
        }
        if !(0.0..=1.0).contains(&self.budget) {
            return Err(Error::Config(format!(
                "budget {} outside [0,1]",
                self.budget
            )));
        }
        if !(self.eps_access > 0.0 && self.eps_access <= 1.0) {
            return Err(Error::Config(format!(
                "eps_access {} outside (0,1]",
                self.eps_access
            )));
        }
        if self.c <= 0.0 {
            return Err(Error::Config(format!(
                "exploration constant c={} <= 0",
                self.c
            )));
        }
        if self.probing_rate < 1.0 {
            return Err(Error::Config(format!(
                "probing rate {} < 1",
                self.probing_rate
            )));
        }
        if self.mode == ScheduleMode::KnownGap {
            match &self.known_gaps {
                Some(g) if g.len() == self.num_channels => {}
                _ => {
                    return Err(Error::Config(
                        "known-gap mode requires a gap vector of length K".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

/// One learner: configuration, cumulative state, covering set and the DP
/// scratch buffers. Owned by exactly one run; moving it across threads is
/// fine, sharing it is not needed.
#[derive(Debug, Clone)]
pub struct Policy {
    cfg: PolicyConfig,
    state: PolicyState,
    covering: CoveringSet,
    dp: SubsetDp,
    weights: Vec<f64>,
    eps_block: Vec<f64>,
    /// Schedule scalars of the round in flight (set by `select`).
    round: Option<Schedule>,
}

impl Policy {
    pub fn new(cfg: PolicyConfig) -> Result<Self> {
        cfg.validate()?;
        let covering = build_covering_set(cfg.num_channels, cfg.k)?;
        let dp = SubsetDp::new(cfg.num_channels, cfg.k)?;
        let blocks = covering.len();
        Ok(Policy {
            state: PolicyState::new(cfg.num_channels),
            weights: vec![1.0; cfg.num_channels],
            eps_block: vec![0.0; blocks],
            covering,
            dp,
            cfg,
            round: None,
        })
    }

    pub fn state(&self) -> &PolicyState {
        &self.state
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.cfg
    }

    pub fn covering(&self) -> &CoveringSet {
        &self.covering
    }

    /// Schedule for the upcoming round (state.n completed rounds so far).
    pub fn current_schedule(&self) -> Result<Schedule> {
        let n = self.state.n + 1;
        let gaps: &[f64] = match self.cfg.mode {
            ScheduleMode::KnownGap => self.cfg.known_gaps.as_deref().unwrap(),
            ScheduleMode::Avg => &self.state.gap_hat,
            ScheduleMode::AdversarialOnly => &[],
        };
        make_schedule(
            n,
            self.cfg.num_channels,
            self.cfg.k,
            self.cfg.c,
            self.cfg.mode,
            gaps,
            self.cfg.probing_rate,
        )
    }

    /// Exponential weights recomputed from cumulative Ψ̃ with the round's
    /// learning rate, shifted so the maximum weight is exactly 1.
    fn recompute_weights(&mut self, eta: f64) {
        let min = self
            .state
            .cum_combined
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        for (w, psi) in self.weights.iter_mut().zip(&self.state.cum_combined) {
            *w = (-eta * (psi - min)).exp();
        }
    }

    /// Draws the round's strategy from the mixture
    /// `p_n(i) = (1−γ_n)·q_n(i) + ε_n(i)·1{i ∈ C}` and returns it together
    /// with the per-channel inclusion probabilities ρ_n(f).
    ///
    /// ε_n(i) aggregates the exploration mass of the channels whose home
    /// block is `i`, so the covering mixture is a proper distribution even
    /// when the last block carries padding channels.
    pub fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(Strategy, Vec<f64>)> {
        let sched = self.current_schedule()?;
        if sched.gamma > 1.0 {
            return Err(Error::Invariant(format!(
                "exploration mass gamma={} exceeds 1",
                sched.gamma
            )));
        }
        self.recompute_weights(sched.eta);
        self.dp.prepare(&self.weights)?;

        self.eps_block.fill(0.0);
        for f in 0..self.cfg.num_channels {
            self.eps_block[self.covering.home(f)] += sched.eps[f];
        }

        let strategy = if rng.gen::<f64>() < sched.gamma {
            // Covering draw: block b with probability ε_n(b)/γ_n.
            let mut u = rng.gen::<f64>() * sched.gamma;
            let mut pick = self.covering.len() - 1;
            for (b, &mass) in self.eps_block.iter().enumerate() {
                if u < mass {
                    pick = b;
                    break;
                }
                u -= mass;
            }
            self.covering.strategies()[pick].clone()
        } else {
            self.dp.sample(&self.weights, rng)
        };

        let mut rho = vec![0.0; self.cfg.num_channels];
        self.dp.marginals(&self.weights, &mut rho);
        for (f, r) in rho.iter_mut().enumerate() {
            *r = (1.0 - sched.gamma) * *r + self.eps_block[self.covering.home(f)];
        }
        self.state.last_marginals.copy_from_slice(&rho);
        self.round = Some(sched);
        Ok((strategy, rho))
    }

    /// Feeds back one observation: importance-weighted estimates, cumulative
    /// accumulators, the dual update and the gap estimate. Must follow a
    /// `select` call for the same round.
    pub fn observe(&mut self, obs: &Observation, rho: &[f64]) -> Result<()> {
        let (updates, p_dot_power) = importance_updates(obs, rho)?;
        self.apply_update(&updates, p_dot_power)
    }

    /// Closes the round in flight with precomputed per-channel estimates
    /// `(channel, ℓ̃, P̃)`: accumulates them with the current λ, steps the
    /// dual variable on `p_dot_power`, advances the round counter and
    /// refreshes the gap estimates. The cooperative wrapper routes its
    /// ϱ̃-weighted updates through here.
    pub fn apply_update(&mut self, updates: &[ChannelUpdate], p_dot_power: f64) -> Result<()> {
        let sched = self
            .round
            .take()
            .ok_or_else(|| Error::Invariant("observe without a pending select".into()))?;
        let lambda = self.state.lambda;
        for &(f, loss_est, power_est) in updates {
            self.state.cum_loss[f] += loss_est;
            self.state.cum_power[f] += power_est;
            self.state.cum_combined[f] += loss_est + lambda * power_est;
        }
        if self.cfg.lambda_enabled {
            self.state.lambda = update_lagrange(lambda, &sched, p_dot_power, self.cfg.budget);
        }
        self.state.n += 1;
        self.state.gap_hat = estimate_gaps(&self.state.cum_loss, self.state.n);
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn force_state_for_tests(&mut self, cum_combined: Vec<f64>, lambda: f64, n: u64) {
        self.state.cum_combined = cum_combined;
        self.state.lambda = lambda;
        self.state.n = n;
    }

    #[cfg(test)]
    pub(crate) fn discard_round_for_tests(&mut self) {
        self.round = None;
    }
}

/// Per-channel `(channel, loss estimate, power estimate)` triple.
pub type ChannelUpdate = (usize, f64, f64);

fn importance_updates(obs: &Observation, rho: &[f64]) -> Result<(Vec<ChannelUpdate>, f64)> {
    let mut updates = Vec::with_capacity(obs.strategy.len());
    let mut p_dot_power = 0.0;
    for (idx, &f) in obs.strategy.channels().iter().enumerate() {
        let r = rho[f];
        if r <= 0.0 {
            return Err(Error::Invariant(format!(
                "inclusion probability zero on played channel {f}"
            )));
        }
        let loss_est = obs.loss[idx] / r;
        let power_est = obs.power[idx] / r;
        updates.push((f, loss_est, power_est));
        p_dot_power += r * power_est;
    }
    Ok((updates, p_dot_power))
}

/// Importance-weighted estimation step: for played channels
/// `ℓ̃ = ℓ/ρ`, `P̃ = P/ρ`, `ψ̃ = ℓ̃ + λ·P̃` (current λ); zero elsewhere.
/// Returns `Σ_f ρ(f)·P̃(f)`, the expected estimated strategy power the dual
/// update consumes.
pub fn estimate_and_update(state: &mut PolicyState, obs: &Observation, rho: &[f64]) -> Result<f64> {
    let (updates, p_dot_power) = importance_updates(obs, rho)?;
    for (f, loss_est, power_est) in updates {
        state.cum_loss[f] += loss_est;
        state.cum_power[f] += power_est;
        state.cum_combined[f] += loss_est + state.lambda * power_est;
    }
    Ok(p_dot_power)
}

/// Mini-batch wrapper: one strategy per batch of `tau` rounds, inner policy
/// fed the within-batch mean observation, inner round counter advancing once
/// per batch.
#[derive(Debug, Clone)]
pub struct Minibatch {
    policy: Policy,
    tau: u32,
    pos: u32,
    current: Option<(Strategy, Vec<f64>)>,
    acc_loss: Vec<f64>,
    acc_power: Vec<f64>,
    any_transmitted: bool,
}

impl Minibatch {
    pub fn new(policy: Policy, tau: u32) -> Result<Self> {
        if tau == 0 {
            return Err(Error::Config("mini-batch size must be >= 1".into()));
        }
        let k = policy.config().k;
        Ok(Minibatch {
            policy,
            tau,
            pos: 0,
            current: None,
            acc_loss: vec![0.0; k],
            acc_power: vec![0.0; k],
            any_transmitted: false,
        })
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    /// Strategy for the next round: freshly sampled at a batch boundary,
    /// replayed inside the batch.
    pub fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(Strategy, Vec<f64>)> {
        if self.current.is_none() {
            let drawn = self.policy.select(rng)?;
            self.acc_loss.fill(0.0);
            self.acc_power.fill(0.0);
            self.any_transmitted = false;
            self.pos = 0;
            self.current = Some(drawn);
        }
        Ok(self.current.as_ref().unwrap().clone())
    }

    /// Accumulates the round; at the batch end feeds the mean observation to
    /// the inner policy and closes the batch.
    pub fn observe(&mut self, obs: &Observation) -> Result<()> {
        let (strategy, rho) = self
            .current
            .as_ref()
            .ok_or_else(|| Error::Invariant("observe without select".into()))?
            .clone();
        debug_assert_eq!(obs.strategy, strategy);
        for i in 0..self.acc_loss.len() {
            self.acc_loss[i] += obs.loss[i];
            self.acc_power[i] += obs.power[i];
        }
        self.any_transmitted |= obs.transmitted;
        self.pos += 1;
        if self.pos == self.tau {
            let scale = 1.0 / self.tau as f64;
            let mean_obs = Observation {
                strategy,
                loss: self.acc_loss.iter().map(|l| l * scale).collect(),
                power: self.acc_power.iter().map(|p| p * scale).collect(),
                transmitted: self.any_transmitted,
            };
            self.policy.observe(&mean_obs, &rho)?;
            self.current = None;
        }
        Ok(())
    }
}
