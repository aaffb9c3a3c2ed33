//! Physical energy-efficiency model: SINR rate, per-channel and per-strategy
//! EE, gain construction, sensing/probing/access time accounting, the sensing
//! false-alarm probability and the probing-time crossover between the SPA and
//! SA schemes.
//!
//! Units: bandwidth in Hz, powers in W, times in seconds, rates in nats/s,
//! EE in nats/J. The rate uses the natural logarithm (the model's unit is
//! nats) even though Shannon capacity is conventionally typeset in log2.

use crate::error::{Error, Result};

/// Per-channel link-budget parameters for the rate/SINR formula.
#[derive(Debug, Clone)]
pub struct LinkParams {
    /// Bandwidth W (Hz).
    pub bandwidth: f64,
    /// Capacity-gap factor ϑ (dimensionless).
    pub theta_cap: f64,
    /// Background noise power (W); must be positive.
    pub noise_power: f64,
    /// Aggregate primary-user interference at this channel (W).
    pub pu_interference: f64,
    /// Jammer interference at this channel (W).
    pub jammer_interference: f64,
    /// Aggregate interference from other secondary users (W).
    pub cross_su_interference: f64,
    /// Own-link channel gain g_ff (dimensionless).
    pub gain_self: f64,
    /// Circuit and processing power charged to this channel (W).
    pub circuit_power: f64,
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("bandwidth", self.bandwidth),
            ("theta_cap", self.theta_cap),
            ("noise_power", self.noise_power),
            ("pu_interference", self.pu_interference),
            ("jammer_interference", self.jammer_interference),
            ("cross_su_interference", self.cross_su_interference),
            ("gain_self", self.gain_self),
            ("circuit_power", self.circuit_power),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!(
                    "link parameter {name} = {v} invalid"
                )));
            }
        }
        if self.noise_power <= 0.0 {
            return Err(Error::Config("noise_power must be positive".into()));
        }
        Ok(())
    }
}

/// Sensing/probing/access timing.
#[derive(Debug, Clone, Copy)]
pub struct TimingParams {
    /// Sensing time per round (s).
    pub t_sense: f64,
    /// Probing time per round (s).
    pub t_probe: f64,
    /// Access (transmission) time per transmitted round (s).
    pub t_access: f64,
}

impl TimingParams {
    pub fn t_sp(&self) -> f64 {
        self.t_sense + self.t_probe
    }

    /// α = t_a / (t_s + t_p), the access-to-overhead time ratio.
    pub fn alpha(&self) -> f64 {
        self.t_access / self.t_sp()
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_sense <= 0.0 || self.t_probe < 0.0 || self.t_access <= 0.0 {
            return Err(Error::Config("timing parameters must be positive".into()));
        }
        Ok(())
    }
}

/// Probability the transmission is destroyed within the access slot.
#[derive(Debug, Clone, Copy)]
pub struct SuccessModel {
    /// Pr(PU, J, SU): interruption probability in [0,1].
    pub pr_interrupt: f64,
}

/// Instantaneous data rate in nats/s:
/// `W · ln(1 + ϑ·P·g_ff / (cross_su + pu + jammer + noise))`.
pub fn instant_rate(link: &LinkParams, p_tx: f64) -> Result<f64> {
    if p_tx < 0.0 || !p_tx.is_finite() {
        return Err(Error::Config(format!("transmit power {p_tx} invalid")));
    }
    let denom = link.cross_su_interference
        + link.pu_interference
        + link.jammer_interference
        + link.noise_power;
    if denom <= 0.0 {
        return Err(Error::Config("SINR denominator must be positive".into()));
    }
    let sinr = link.theta_cap * p_tx * link.gain_self / denom;
    Ok(link.bandwidth * sinr.ln_1p())
}

/// Per-channel EE in nats/J: rate over total (circuit + transmit) power.
pub fn channel_ee(rate: f64, circuit_power: f64, p_tx: f64) -> Result<f64> {
    let total = circuit_power + p_tx;
    if total <= 0.0 {
        return Err(Error::Config("total channel power must be positive".into()));
    }
    Ok(rate / total)
}

/// Per-strategy EE: arithmetic mean of the member channels' EEs.
pub fn strategy_ee(per_channel_ee: &[f64]) -> f64 {
    debug_assert!(!per_channel_ee.is_empty());
    per_channel_ee.iter().sum::<f64>() / per_channel_ee.len() as f64
}

/// Whole-strategy EE computed from totals (total rate over total power),
/// the multi-carrier form the per-channel mean is compared against.
pub fn pooled_ee(rates: &[f64], circuit_powers: &[f64], p_tx: &[f64]) -> Result<f64> {
    let total_rate: f64 = rates.iter().sum();
    let total_power: f64 = circuit_powers.iter().sum::<f64>() + p_tx.iter().sum::<f64>();
    if total_power <= 0.0 {
        return Err(Error::Config(
            "total strategy power must be positive".into(),
        ));
    }
    Ok(total_rate / total_power)
}

/// Channel gain fed to the learner: normalized EE damped by the interruption
/// probability, zero when no transmission happened. Channel parameters are
/// held constant within a round, so the within-slot time average collapses to
/// the round's EE.
pub fn channel_gain(ee_norm: f64, success: &SuccessModel, transmitted: bool) -> f64 {
    if !transmitted {
        return 0.0;
    }
    (ee_norm * (1.0 - success.pr_interrupt)).clamp(0.0, 1.0)
}

/// Expected wall time of `n` sensing/probing rounds at access probability
/// `eps_access`: `T = n·t_sp + ε·n·t_a`.
pub fn time_budget(n: u64, eps_access: f64, timing: &TimingParams) -> f64 {
    let n = n as f64;
    n * timing.t_sp() + eps_access * n * timing.t_access
}

/// Adversarial-regime floor on the achieved EE rate:
/// `(G_max − 4k√(K ln K / n)) / (1/(α·ε) + 1)`.
pub fn ee_lower_bound(
    g_max: f64,
    n: u64,
    num_channels: usize,
    k: usize,
    eps_access: f64,
    timing: &TimingParams,
) -> f64 {
    let kf = k as f64;
    let big_k = num_channels as f64;
    let penalty = 4.0 * kf * (big_k * big_k.ln() / n as f64).sqrt();
    (g_max - penalty) / (1.0 / (timing.alpha() * eps_access) + 1.0)
}

/// Standard normal tail probability via the complementary error function.
fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Energy-detector false alarm probability:
/// `P_fa(t_s) = Q((threshold_ratio − 1)·√(t_s·f_s))`.
pub fn false_alarm(t_sense: f64, f_sample: f64, threshold_ratio: f64) -> Result<f64> {
    if t_sense <= 0.0 || f_sample <= 0.0 {
        return Err(Error::Config(
            "false_alarm requires t_s > 0 and f_s > 0".into(),
        ));
    }
    Ok(q_function(
        (threshold_ratio - 1.0) * (t_sense * f_sample).sqrt(),
    ))
}

/// Expected EE rate of the ε-SPA scheme as a function of probing time.
/// Probing every round gives `n` observations in total time T.
#[allow(clippy::too_many_arguments)]
fn spa_rate(
    t_p: f64,
    t_s: f64,
    t_a: f64,
    k: f64,
    big_k: f64,
    eps: f64,
    t_total: f64,
    g_max: f64,
) -> f64 {
    let t_sp = t_s + t_p;
    let alpha = t_a / t_sp;
    let penalty = 4.0 * k * ((1.0 + alpha * eps) * t_sp * big_k * big_k.ln() / t_total).sqrt();
    (g_max - penalty) / (1.0 / (alpha * eps) + 1.0)
}

/// Expected EE rate of the probe-free ε-SA scheme: only the ε·n transmitted
/// rounds yield observations, shrinking the effective horizon to ε·T.
fn sa_rate(t_s: f64, t_a: f64, k: f64, big_k: f64, eps: f64, t_total: f64, g_max: f64) -> f64 {
    let alpha = t_a / t_s;
    let penalty =
        4.0 * k * ((1.0 + alpha * eps) * t_s * big_k * big_k.ln() / (eps * t_total)).sqrt();
    (g_max - penalty) / (1.0 / (alpha * eps) + 1.0)
}

/// Probing time `t_p*` at which the SPA and SA expected-EE rates cross.
///
/// For `t_p <= t_p*` probing pays for itself; beyond it the probe-free SA
/// scheme wins. Solved by bisection to 1e-9 relative tolerance. Returns
/// [`Error::NoCrossover`] when SPA dominates throughout `(0, T)`.
pub fn probing_crossover(
    t_sense: f64,
    t_access: f64,
    num_channels: usize,
    k: usize,
    eps_access: f64,
    t_total: f64,
    g_max: f64,
) -> Result<f64> {
    if t_sense <= 0.0 || t_access <= 0.0 || t_total <= 0.0 || g_max <= 0.0 {
        return Err(Error::Config(
            "probing_crossover requires positive inputs".into(),
        ));
    }
    if !(0.0..=1.0).contains(&eps_access) || eps_access == 0.0 {
        return Err(Error::Config(format!(
            "eps_access {eps_access} outside (0,1]"
        )));
    }
    let kf = k as f64;
    let big_k = num_channels as f64;
    let sa = sa_rate(t_sense, t_access, kf, big_k, eps_access, t_total, g_max);
    let diff = |t_p: f64| {
        spa_rate(
            t_p, t_sense, t_access, kf, big_k, eps_access, t_total, g_max,
        ) - sa
    };

    let mut lo = t_total * 1e-12;
    let mut hi = t_total;
    if diff(lo) <= 0.0 {
        // Probing never pays, even for a vanishing probe.
        return Ok(0.0);
    }
    if diff(hi) > 0.0 {
        return Err(Error::NoCrossover);
    }
    // SPA rate is strictly decreasing in t_p, so the root is unique.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if diff(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-9 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
