//! The experiment loop: schedule → select → environment step → masked
//! feedback → estimate/update → dual update → metrics, with geometric
//! checkpoint downsampling. Deterministic given (config, seed).

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{combucb1_select, combucb1_update, exp3_policy, hindsight_best, UcbState};
use crate::coop::CoopPolicy;
use crate::ee::LinkParams;
use crate::envs::{
    AdaptiveJammerSpec, ContaminatedSpec, EePhysicalSpec, JammerSpec, LossGenerator, MixedSpec,
    ObliviousJammerSpec, RegimeEnv, StochasticSpec,
};
use crate::error::{Error, Result};
use crate::policy::{
    access_decision, minibatch_tau, Minibatch, Observation, Policy, PolicyConfig, ScheduleMode,
};
use crate::subset::Strategy;

use super::config::{PolicyId, RegimeId, RunConfig, TauSetting};
use super::log_level;

/// Metrics at one checkpoint.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub t: u64,
    pub strategy: Strategy,
    /// True loss of the chosen strategy this round.
    pub true_loss: f64,
    /// Σ_f ρ_t(f)·P̄(f) this round.
    pub expected_power: f64,
    pub lambda: f64,
    /// Primary cumulative regret for the regime at this checkpoint.
    pub regret: f64,
    /// `[Σ_s (expected power − P_o)]_+` at this checkpoint.
    pub violation: f64,
    /// Cumulative mean per-round strategy gain, normalized to [0,1].
    pub ee: f64,
}

/// Everything a finished run reports.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub seed: u64,
    pub policy: PolicyId,
    pub regime: RegimeId,
    pub records: Vec<RoundRecord>,
    /// Realized regret vs the best fixed strategy in hindsight.
    pub realized_regret: f64,
    /// Pseudo-regret against the best fixed strategy's expected loss, when
    /// the regime defines true means.
    pub pseudo_regret: Option<f64>,
    /// Total realized loss of the played strategies.
    pub played_loss_sum: f64,
    /// Cumulative loss of the best fixed strategy in hindsight.
    pub hindsight_value: f64,
    /// Final clamped violation.
    pub violation: f64,
    /// Long-run average expected power.
    pub avg_expected_power: f64,
    /// Final cumulative mean strategy gain in [0,1].
    pub ee_mean: f64,
    /// Best fixed strategy's mean per-round gain (sum over its k channels).
    pub g_max: f64,
    /// max over rounds of λ·δ_n/P_o (diagnostic; bounded near 1 in theory).
    pub lambda_ratio_max: f64,
    /// Mean realized loss on played-and-attacked channel slots.
    pub attacked_loss_mean: f64,
    /// Effective cooperative probing rate, when coop ran.
    pub coop_rate: Option<f64>,
}

impl RunResult {
    /// Regret series at the recorded checkpoints.
    pub fn regret_at(&self, t: u64) -> Option<f64> {
        self.records.iter().find(|r| r.t == t).map(|r| r.regret)
    }
}

enum Learner {
    Bandit(Minibatch),
    Coop(CoopPolicy),
    Ucb(UcbState),
}

fn build_policy(cfg: &RunConfig) -> Result<Policy> {
    let mut pc = PolicyConfig::new(cfg.num_channels, cfg.k);
    pc.c = cfg.c;
    pc.budget = cfg.budget;
    pc.eps_access = cfg.eps_access;
    pc.mode = cfg.effective_mode();
    pc.probing_rate = if cfg.coop.strategies_per_round > 1 {
        cfg.coop.m_lower_bound.max(1.0)
    } else {
        1.0
    };
    if pc.mode == ScheduleMode::KnownGap {
        let min = cfg.env.mu.iter().cloned().fold(f64::INFINITY, f64::min);
        pc.known_gaps = Some(cfg.env.mu.iter().map(|m| m - min).collect());
    }
    match cfg.policy {
        PolicyId::Exp3 => exp3_policy(pc),
        _ => Policy::new(pc),
    }
}

fn stochastic_spec(cfg: &RunConfig) -> Result<StochasticSpec> {
    let generator = match cfg.env.generator.as_str() {
        "bernoulli" => LossGenerator::Bernoulli,
        "ee-physical" => {
            let links: Vec<LinkParams> = (0..cfg.num_channels)
                .map(|f| LinkParams {
                    bandwidth: cfg.env.ee_bandwidth,
                    theta_cap: cfg.env.ee_theta_cap,
                    noise_power: cfg.env.ee_noise_power[f],
                    pu_interference: cfg.env.ee_pu_interference[f],
                    jammer_interference: cfg.env.ee_jammer_interference[f],
                    cross_su_interference: cfg.env.ee_cross_su_interference[f],
                    gain_self: cfg.env.ee_gain_self[f],
                    circuit_power: cfg.env.ee_circuit_power[f],
                })
                .collect();
            LossGenerator::EePhysical(EePhysicalSpec {
                links,
                pr_interrupt: cfg.env.ee_pr_interrupt.clone(),
                p_tx_max: cfg.env.ee_p_tx_max,
                rician_k_db: if cfg.env.ee_rician_k_db.is_nan() {
                    None
                } else {
                    Some(cfg.env.ee_rician_k_db)
                },
                ee_norm: cfg.env.ee_norm,
            })
        }
        other => return Err(Error::Config(format!("env.generator: '{other}'"))),
    };
    Ok(StochasticSpec {
        mu: cfg.env.mu.clone(),
        power_mean: cfg.env.power_mean.clone(),
        generator,
        k: cfg.k,
    })
}

fn build_env(cfg: &RunConfig) -> Result<RegimeEnv> {
    match cfg.regime {
        RegimeId::Stochastic => RegimeEnv::stochastic(stochastic_spec(cfg)?),
        RegimeId::Adversarial => RegimeEnv::adversarial(
            ObliviousJammerSpec {
                attack_strength: cfg.env.attack_strength.clone(),
                schedule_seed: cfg.env.jammer_seed,
            },
            cfg.env.power_mean.clone(),
            cfg.k,
        ),
        RegimeId::AdversarialAdaptive => RegimeEnv::adversarial_adaptive(
            stochastic_spec(cfg)?,
            AdaptiveJammerSpec {
                theta: cfg.env.theta,
                j_channels: cfg.env.j_channels,
                strength: cfg.env.strength,
            },
        ),
        RegimeId::Mixed => {
            let jammer = if cfg.env.jammer == "adaptive" {
                JammerSpec::Adaptive(AdaptiveJammerSpec {
                    theta: cfg.env.theta,
                    j_channels: cfg.env.j_channels,
                    strength: cfg.env.strength,
                })
            } else {
                JammerSpec::Oblivious(ObliviousJammerSpec {
                    attack_strength: cfg.env.attack_strength.clone(),
                    schedule_seed: cfg.env.jammer_seed,
                })
            };
            RegimeEnv::mixed(MixedSpec {
                base: stochastic_spec(cfg)?,
                jammed_set: cfg.env.jammed_set.clone(),
                jammer,
            })
        }
        RegimeId::Contaminated => RegimeEnv::contaminated(ContaminatedSpec {
            base: stochastic_spec(cfg)?,
            zeta: cfg.env.zeta,
            tau0: cfg.env.tau0,
        }),
    }
}

/// Checkpoint rounds: every round up to 10^3, then geometric steps (ratio
/// 1.02) plus every power of ten, always including the final round.
pub fn checkpoints(n_rounds: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n_rounds.min(1000)).collect();
    let mut t = 1000f64;
    while (t as u64) < n_rounds {
        t = (t * 1.02).ceil();
        out.push((t as u64).min(n_rounds));
    }
    let mut decade = 10_000u64;
    while decade <= n_rounds {
        out.push(decade);
        decade = decade.saturating_mul(10);
    }
    out.push(n_rounds);
    out.sort_unstable();
    out.dedup();
    out
}

/// Executes one run. Numeric invariant breaches abort with a diagnostic;
/// config validation failures carry the offending field.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let verbose = log_level();
    let num = cfg.num_channels;
    let k = cfg.k;

    let mut env = build_env(cfg)?;
    let mut learner = match cfg.policy {
        PolicyId::CombUcb1 => Learner::Ucb(UcbState::new(num, k)?),
        _ => {
            let policy = build_policy(cfg)?;
            if cfg.coop.strategies_per_round > 1 {
                Learner::Coop(CoopPolicy::new(policy, cfg.coop)?)
            } else {
                let tau = match cfg.minibatch {
                    TauSetting::Off => 1,
                    TauSetting::Fixed(t) => t.max(1),
                    TauSetting::Auto => minibatch_tau(cfg.n_rounds, num, k),
                };
                Learner::Bandit(Minibatch::new(policy, tau)?)
            }
        }
    };

    let mut rng_policy = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng_policy.set_stream(1);
    let mut rng_env = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng_env.set_stream(2);
    let mut rng_access = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng_access.set_stream(3);

    let power_means = env.power_means().to_vec();
    let loss_means = env.loss_means().map(<[f64]>::to_vec);
    // Per-round expected loss of the best fixed strategy; subtracting it
    // makes the channel-additive pseudo-regret vanish under optimal play.
    let best_strategy_mean = match &loss_means {
        Some(mu) => hindsight_best(mu, k)?.1,
        None => 0.0,
    };

    let marks = checkpoints(cfg.n_rounds);
    let mut next_mark = 0usize;
    let mut records = Vec::with_capacity(marks.len());

    let mut cum_true_loss = vec![0.0f64; num];
    let mut pulls = vec![0u64; num];
    let mut played_loss_sum = 0.0f64;
    let mut violation_signed = 0.0f64;
    let mut exp_power_sum = 0.0f64;
    let mut gain_sum = 0.0f64;
    let mut lambda_ratio_max = 0.0f64;
    let mut attacked_loss_sum = 0.0f64;
    let mut attacked_count = 0u64;

    let history_cap = cfg.env.theta.max(1);
    let mut history: VecDeque<Strategy> = VecDeque::with_capacity(history_cap + 1);

    for t in 1..=cfg.n_rounds {
        // Select.
        let mut coop_set = None;
        let (strategy, rho) = match &mut learner {
            Learner::Bandit(mb) => {
                let (s, r) = mb.select(&mut rng_policy)?;
                (s, Some(r))
            }
            Learner::Coop(cp) => {
                let (set, r) = cp.select(&mut rng_policy)?;
                let chosen = set.chosen.clone();
                coop_set = Some(set);
                (chosen, Some(r))
            }
            Learner::Ucb(state) => (combucb1_select(state), None),
        };

        // Marginal sanity: finite, and summing to k when the covering set is
        // an exact partition. Breaches abort with a diagnostic.
        if let Some(r) = &rho {
            if r.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::Invariant(format!(
                    "round {t}: non-finite inclusion probabilities {r:?}"
                )));
            }
            if num.is_multiple_of(k) {
                let sum: f64 = r.iter().sum();
                if (sum - k as f64).abs() > 1e-9 {
                    return Err(Error::Invariant(format!(
                        "round {t}: inclusion probabilities sum to {sum}, expected {k}"
                    )));
                }
            }
        }

        // Environment step (full vectors; feedback masked below).
        let hist_slices: Vec<Strategy> = history.iter().cloned().collect();
        let outcome = env.step(t, &hist_slices, &mut rng_env);
        let transmitted = access_decision(cfg.eps_access, &mut rng_access);

        // Masked semi-bandit feedback.
        let played_loss: Vec<f64> = strategy
            .channels()
            .iter()
            .map(|&f| outcome.loss[f])
            .collect();
        let played_power: Vec<f64> = strategy
            .channels()
            .iter()
            .map(|&f| outcome.power[f])
            .collect();

        match &mut learner {
            Learner::Bandit(mb) => {
                let obs = Observation {
                    strategy: strategy.clone(),
                    loss: played_loss.clone(),
                    power: played_power.clone(),
                    transmitted,
                };
                mb.observe(&obs)?;
            }
            Learner::Coop(cp) => {
                let set = coop_set.take().ok_or_else(|| {
                    Error::Invariant("cooperative observe without a pending set".into())
                })?;
                let rho_ref = rho.as_ref().unwrap();
                cp.observe(&set, &outcome.loss, &outcome.power, rho_ref)?;
            }
            Learner::Ucb(state) => {
                combucb1_update(state, &strategy, &played_loss);
            }
        }

        // Metrics.
        let true_loss: f64 = played_loss.iter().sum();
        played_loss_sum += true_loss;
        for (cum, l) in cum_true_loss.iter_mut().zip(&outcome.loss) {
            *cum += l;
        }
        for &f in strategy.channels() {
            pulls[f] += 1;
            if outcome.attacked[f] {
                attacked_loss_sum += outcome.loss[f];
                attacked_count += 1;
            }
        }
        let expected_power = match &rho {
            Some(r) => (0..num).map(|f| r[f] * power_means[f]).sum::<f64>(),
            None => strategy
                .channels()
                .iter()
                .map(|&f| power_means[f])
                .sum::<f64>(),
        };
        violation_signed += expected_power - cfg.budget;
        exp_power_sum += expected_power;
        let gain: f64 = if transmitted {
            played_loss.iter().map(|l| 1.0 - l).sum::<f64>() / k as f64
        } else {
            0.0
        };
        gain_sum += gain;

        let (lambda, policy_n) = match &learner {
            Learner::Bandit(mb) => (mb.policy().state().lambda, mb.policy().state().n),
            Learner::Coop(cp) => (cp.policy().state().lambda, cp.policy().state().n),
            Learner::Ucb(_) => (0.0, t),
        };
        // Dual-variable diagnostic, after the warm-up where the projected
        // gradient contraction (δ·η·√γ <= 1) starts to hold.
        if cfg.budget > 0.0 && lambda > 0.0 && policy_n >= 10 {
            let m = if cfg.coop.strategies_per_round > 1 {
                cfg.coop.m_lower_bound.max(1.0)
            } else {
                1.0
            };
            let delta =
                2.0 * k as f64 / m * ((num as f64) * (num as f64).ln() / policy_n as f64).sqrt();
            lambda_ratio_max = lambda_ratio_max.max(lambda * delta / cfg.budget);
        }

        history.push_back(strategy.clone());
        while history.len() > history_cap {
            history.pop_front();
        }

        // Checkpoint.
        if next_mark < marks.len() && marks[next_mark] == t {
            next_mark += 1;
            let (_, hindsight_value) = hindsight_best(&cum_true_loss, k)?;
            let realized = played_loss_sum - hindsight_value;
            let regret = match (&loss_means, cfg.regime) {
                (Some(mu), RegimeId::Stochastic) => {
                    (0..num).map(|f| pulls[f] as f64 * mu[f]).sum::<f64>()
                        - t as f64 * best_strategy_mean
                }
                _ => realized,
            };
            let violation = violation_signed.max(0.0);
            records.push(RoundRecord {
                t,
                strategy: strategy.clone(),
                true_loss,
                expected_power,
                lambda,
                regret,
                violation,
                ee: gain_sum / t as f64,
            });
            if verbose >= 2 {
                eprintln!(
                    "[aoeecc] t={t} regret={regret:.3} violation={violation:.3} lambda={lambda:.4}"
                );
            }
        }
    }

    let (_, hindsight_value) = hindsight_best(&cum_true_loss, k)?;
    let realized_regret = played_loss_sum - hindsight_value;
    let pseudo_regret = loss_means.as_ref().map(|mu| {
        (0..num).map(|f| pulls[f] as f64 * mu[f]).sum::<f64>()
            - cfg.n_rounds as f64 * best_strategy_mean
    });
    let g_max = k as f64 - hindsight_value / cfg.n_rounds as f64;
    let coop_rate = match &learner {
        Learner::Coop(cp) => Some(cp.effective_rate()),
        _ => None,
    };
    let result = RunResult {
        seed: cfg.seed,
        policy: cfg.policy,
        regime: cfg.regime,
        records,
        realized_regret,
        pseudo_regret,
        played_loss_sum,
        hindsight_value,
        violation: violation_signed.max(0.0),
        avg_expected_power: exp_power_sum / cfg.n_rounds as f64,
        ee_mean: gain_sum / cfg.n_rounds as f64,
        g_max,
        lambda_ratio_max,
        attacked_loss_mean: if attacked_count > 0 {
            attacked_loss_sum / attacked_count as f64
        } else {
            0.0
        },
        coop_rate,
    };
    if verbose >= 1 {
        eprintln!(
            "[aoeecc] run done: policy={} regime={} seed={} realized={:.3} pseudo={:?} violation={:.3}",
            cfg.policy.as_str(),
            cfg.regime.as_str(),
            cfg.seed,
            result.realized_regret,
            result.pseudo_regret,
            result.violation,
        );
    }
    Ok(result)
}
