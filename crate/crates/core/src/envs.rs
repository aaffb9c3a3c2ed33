//! Loss/power generators for the four environment regimes: stochastic,
//! adversarial (oblivious or memory-bounded adaptive jammer), mixed, and
//! contaminated stochastic.
//!
//! Every step emits the full K-vector of losses and powers; the harness masks
//! feedback down to the played strategy so exact hindsight regret stays
//! computable. Oblivious sequences are pure functions of (seed, t, channel)
//! and never look at the policy's history.

use rand::Rng;

use crate::ee::{channel_ee, channel_gain, instant_rate, LinkParams, SuccessModel};
use crate::error::{Error, Result};
use crate::subset::Strategy;

/// Losses and powers for one round, plus which channels the jammer hit
/// (diagnostic; empty for jammer-free regimes).
#[derive(Debug, Clone)]
pub struct RoundOutcome {
    /// Per-channel loss in [0,1].
    pub loss: Vec<f64>,
    /// Per-channel power in [0, 1/k].
    pub power: Vec<f64>,
    /// Per-channel attack indicator.
    pub attacked: Vec<bool>,
}

/// How the stochastic regime generates losses.
#[derive(Debug, Clone)]
pub enum LossGenerator {
    /// loss(f) ~ Bernoulli(mu_f).
    Bernoulli,
    /// Physical model: loss = 1 − normalized-EE gain.
    EePhysical(EePhysicalSpec),
}

/// IID generator: expected losses, expected powers and the loss mechanism.
#[derive(Debug, Clone)]
pub struct StochasticSpec {
    pub mu: Vec<f64>,
    /// Per-channel expected power in [0, 1/k].
    pub power_mean: Vec<f64>,
    pub generator: LossGenerator,
    pub k: usize,
}

/// Gain-domain physical generator. Transmit power in watts is tied to the
/// budget-unit power draw: power = 1/k maps to `p_tx_max`.
#[derive(Debug, Clone)]
pub struct EePhysicalSpec {
    pub links: Vec<LinkParams>,
    pub pr_interrupt: Vec<f64>,
    /// Transmit power (W) corresponding to a full per-channel budget share.
    pub p_tx_max: f64,
    /// Rician K-factor in dB; None = no fading.
    pub rician_k_db: Option<f64>,
    /// EE normalization constant M; 0 = derive from max power at zero
    /// interference.
    pub ee_norm: f64,
}

impl EePhysicalSpec {
    /// M used for gain normalization: configured, or the best channel's EE
    /// at maximum power with all interference terms removed.
    pub fn normalization(&self) -> Result<f64> {
        if self.ee_norm > 0.0 {
            return Ok(self.ee_norm);
        }
        let mut best = 0.0f64;
        for link in &self.links {
            let mut clean = link.clone();
            clean.pu_interference = 0.0;
            clean.jammer_interference = 0.0;
            clean.cross_su_interference = 0.0;
            let rate = instant_rate(&clean, self.p_tx_max)?;
            best = best.max(channel_ee(rate, link.circuit_power, self.p_tx_max)?);
        }
        if best <= 0.0 {
            return Err(Error::Config("ee normalization collapsed to zero".into()));
        }
        Ok(best)
    }
}

/// Oblivious jammer: per-channel constant inflation of a seeded deterministic
/// base sequence. The whole loss table is fixed before the run.
#[derive(Debug, Clone)]
pub struct ObliviousJammerSpec {
    /// Per-channel loss inflation in [0,1].
    pub attack_strength: Vec<f64>,
    /// Seed fixing the base loss (and power) sequences.
    pub schedule_seed: u64,
}

/// θ-memory-bounded adaptive jammer: attacks the channels most frequently
/// played in the last θ strategies.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveJammerSpec {
    /// Memory window length.
    pub theta: usize,
    /// Channels attacked per round.
    pub j_channels: usize,
    /// Additive loss inflation in (0,1].
    pub strength: f64,
}

/// Which jammer drives an adversarial or mixed regime.
#[derive(Debug, Clone)]
pub enum JammerSpec {
    Oblivious(ObliviousJammerSpec),
    Adaptive(AdaptiveJammerSpec),
}

/// Mixed regime: a fixed jammed subset under adversarial control, the rest
/// stochastic.
#[derive(Debug, Clone)]
pub struct MixedSpec {
    pub base: StochasticSpec,
    pub jammed_set: Vec<usize>,
    pub jammer: JammerSpec,
}

/// Contaminated stochastic regime: an oblivious attacker flips budgeted
/// slot-channel pairs after an activation round.
#[derive(Debug, Clone)]
pub struct ContaminatedSpec {
    pub base: StochasticSpec,
    /// Attacking strength ζ in [0, 1/2).
    pub zeta: f64,
    /// Activation round τ; contamination starts strictly after it.
    pub tau0: u64,
}

// SplitMix64: deterministic per-(seed,t,f) uniforms for oblivious sequences.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn hash_uniform(seed: u64, t: u64, f: u64, salt: u64) -> f64 {
    let x = splitmix64(
        seed ^ t.wrapping_mul(0xD6E8FEB86659FD93) ^ f.wrapping_mul(0xCA5A826395121157) ^ salt,
    );
    (x >> 11) as f64 / (1u64 << 53) as f64
}

/// Power draw: symmetric uniform window around the mean, half-width chosen so
/// the draw stays inside [0, 1/k] and the mean is exact.
fn power_draw(mean: f64, k: usize, u: f64) -> f64 {
    let cap = 1.0 / k as f64;
    let half = mean.min(cap - mean).max(0.0);
    (mean + (2.0 * u - 1.0) * half).clamp(0.0, cap)
}

fn box_muller<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    (r * th.cos(), r * th.sin())
}

impl StochasticSpec {
    pub fn validate(&self) -> Result<()> {
        let k = self.k;
        if k == 0 {
            return Err(Error::Config("stochastic spec requires k >= 1".into()));
        }
        if self.mu.len() != self.power_mean.len() {
            return Err(Error::Config("mu and power_mean length mismatch".into()));
        }
        if self.mu.iter().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(Error::Config("expected losses must lie in [0,1]".into()));
        }
        let cap = 1.0 / k as f64;
        if self.power_mean.iter().any(|p| *p < 0.0 || *p > cap + 1e-12) {
            return Err(Error::Config(format!(
                "power means must lie in [0, 1/k={cap}]"
            )));
        }
        if let LossGenerator::EePhysical(spec) = &self.generator {
            if spec.links.len() != self.mu.len() || spec.pr_interrupt.len() != self.mu.len() {
                return Err(Error::Config("physical spec length mismatch".into()));
            }
            for l in &spec.links {
                l.validate()?;
            }
            spec.normalization()?;
        }
        Ok(())
    }

    fn step<R: Rng + ?Sized>(&self, rng: &mut R) -> RoundOutcome {
        let num = self.mu.len();
        let mut loss = vec![0.0; num];
        match &self.generator {
            LossGenerator::Bernoulli => {
                for (f, l) in loss.iter_mut().enumerate() {
                    *l = if rng.gen::<f64>() < self.mu[f] {
                        1.0
                    } else {
                        0.0
                    };
                }
            }
            LossGenerator::EePhysical(spec) => {
                let m = spec.normalization().expect("validated spec");
                for (f, l) in loss.iter_mut().enumerate() {
                    let mut link = spec.links[f].clone();
                    if let Some(k_db) = spec.rician_k_db {
                        let kappa = 10f64.powf(k_db / 10.0);
                        let a = (kappa / (kappa + 1.0)).sqrt();
                        let s = (0.5 / (kappa + 1.0)).sqrt();
                        let (z1, z2) = box_muller(rng);
                        let h2 = (a + s * z1).powi(2) + (s * z2).powi(2);
                        link.gain_self *= h2;
                    }
                    let p_budget = power_draw(self.power_mean[f], self.k, rng.gen());
                    let p_tx = p_budget * self.k as f64 * spec.p_tx_max;
                    let rate = instant_rate(&link, p_tx).expect("validated spec");
                    let ee = channel_ee(rate, link.circuit_power, p_tx).expect("validated spec");
                    let success = SuccessModel {
                        pr_interrupt: spec.pr_interrupt[f],
                    };
                    let g = channel_gain((ee / m).clamp(0.0, 1.0), &success, true);
                    *l = 1.0 - g;
                }
            }
        }
        let power = (0..num)
            .map(|f| power_draw(self.power_mean[f], self.k, rng.gen()))
            .collect();
        RoundOutcome {
            loss,
            power,
            attacked: vec![false; num],
        }
    }
}

/// Deterministic oblivious sequence: clamp(base + strength, 0, 1) with the
/// base drawn per (seed, t, f) in [0, 1/2). The jammer is on every round.
fn oblivious_loss(spec: &ObliviousJammerSpec, t: u64, f: usize) -> f64 {
    let base = 0.5 * hash_uniform(spec.schedule_seed, t, f as u64, 0x0B5E);
    (base + spec.attack_strength[f]).clamp(0.0, 1.0)
}

/// Frequency targets of the adaptive jammer: the `j` channels most played in
/// the window, ties broken toward lower index. Empty until θ rounds of
/// history exist.
fn adaptive_targets(
    spec: &AdaptiveJammerSpec,
    num_channels: usize,
    history: &[Strategy],
) -> Vec<usize> {
    if history.len() < spec.theta {
        return Vec::new();
    }
    let mut counts = vec![0usize; num_channels];
    for s in history.iter().rev().take(spec.theta) {
        for &f in s.channels() {
            counts[f] += 1;
        }
    }
    let mut order: Vec<usize> = (0..num_channels).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    order.truncate(spec.j_channels);
    order.retain(|&f| counts[f] > 0);
    order
}

/// One of the four regimes, with whatever running state it needs.
#[derive(Debug, Clone)]
pub enum RegimeEnv {
    Stochastic(StochasticSpec),
    /// Oblivious jammer over its own deterministic base: per-channel power
    /// means drive the (equally deterministic) power sequence.
    Adversarial {
        jammer: ObliviousJammerSpec,
        power_mean: Vec<f64>,
        k: usize,
    },
    /// Adaptive jammer over a stochastic base.
    AdversarialAdaptive {
        base: StochasticSpec,
        jammer: AdaptiveJammerSpec,
    },
    Mixed(MixedSpec),
    Contaminated {
        spec: ContaminatedSpec,
        /// Contamination units spent per channel.
        spent: Vec<u64>,
        /// True per-channel gaps of the base and the minimal positive gap.
        gaps: Vec<f64>,
        min_gap: f64,
    },
}

impl RegimeEnv {
    pub fn stochastic(spec: StochasticSpec) -> Result<Self> {
        spec.validate()?;
        Ok(RegimeEnv::Stochastic(spec))
    }

    pub fn adversarial(
        jammer: ObliviousJammerSpec,
        power_mean: Vec<f64>,
        k: usize,
    ) -> Result<Self> {
        if jammer.attack_strength.len() != power_mean.len() {
            return Err(Error::Config(
                "attack_strength and power_mean length mismatch".into(),
            ));
        }
        if jammer
            .attack_strength
            .iter()
            .any(|a| !(0.0..=1.0).contains(a))
        {
            return Err(Error::Config("attack strengths must lie in [0,1]".into()));
        }
        Ok(RegimeEnv::Adversarial {
            jammer,
            power_mean,
            k,
        })
    }

    pub fn adversarial_adaptive(base: StochasticSpec, jammer: AdaptiveJammerSpec) -> Result<Self> {
        base.validate()?;
        if jammer.j_channels == 0 || jammer.j_channels > base.mu.len() {
            return Err(Error::Config(
                "adaptive jammer j_channels out of range".into(),
            ));
        }
        if !(0.0 < jammer.strength && jammer.strength <= 1.0) {
            return Err(Error::Config(
                "adaptive jammer strength outside (0,1]".into(),
            ));
        }
        Ok(RegimeEnv::AdversarialAdaptive { base, jammer })
    }

    pub fn mixed(spec: MixedSpec) -> Result<Self> {
        spec.base.validate()?;
        let k = spec.base.k;
        if spec.jammed_set.len() > k {
            return Err(Error::Config(format!(
                "jammed set larger than k={k}: {:?}",
                spec.jammed_set
            )));
        }
        if spec.jammed_set.iter().any(|&f| f >= spec.base.mu.len()) {
            return Err(Error::Config("jammed channel out of range".into()));
        }
        match &spec.jammer {
            JammerSpec::Oblivious(j) => {
                if j.attack_strength.len() != spec.base.mu.len() {
                    return Err(Error::Config("attack_strength length mismatch".into()));
                }
            }
            JammerSpec::Adaptive(j) => {
                if !(0.0 < j.strength && j.strength <= 1.0) {
                    return Err(Error::Config(
                        "adaptive jammer strength outside (0,1]".into(),
                    ));
                }
            }
        }
        Ok(RegimeEnv::Mixed(spec))
    }

    pub fn contaminated(spec: ContaminatedSpec) -> Result<Self> {
        spec.base.validate()?;
        if !(0.0..0.5).contains(&spec.zeta) {
            return Err(Error::Config(format!(
                "contamination strength zeta={} outside [0, 1/2)",
                spec.zeta
            )));
        }
        let min_mu = spec.base.mu.iter().cloned().fold(f64::INFINITY, f64::min);
        let gaps: Vec<f64> = spec.base.mu.iter().map(|m| m - min_mu).collect();
        let min_gap = gaps
            .iter()
            .cloned()
            .filter(|g| *g > 0.0)
            .fold(f64::INFINITY, f64::min);
        let min_gap = if min_gap.is_finite() { min_gap } else { 0.0 };
        let spent = vec![0; spec.base.mu.len()];
        Ok(RegimeEnv::Contaminated {
            spec,
            spent,
            gaps,
            min_gap,
        })
    }

    pub fn num_channels(&self) -> usize {
        match self {
            RegimeEnv::Stochastic(s) => s.mu.len(),
            RegimeEnv::Adversarial { power_mean, .. } => power_mean.len(),
            RegimeEnv::AdversarialAdaptive { base, .. } => base.mu.len(),
            RegimeEnv::Mixed(m) => m.base.mu.len(),
            RegimeEnv::Contaminated { spec, .. } => spec.base.mu.len(),
        }
    }

    /// True expected losses, where the regime defines them. For the mixed
    /// regime only the stochastic channels have meaningful entries.
    pub fn loss_means(&self) -> Option<&[f64]> {
        match self {
            RegimeEnv::Stochastic(s) => match s.generator {
                LossGenerator::Bernoulli => Some(&s.mu),
                LossGenerator::EePhysical(_) => None,
            },
            RegimeEnv::Contaminated { spec, .. } => Some(&spec.base.mu),
            _ => None,
        }
    }

    /// True expected powers (always defined: every regime draws powers from
    /// a mean-exact symmetric window).
    pub fn power_means(&self) -> &[f64] {
        match self {
            RegimeEnv::Stochastic(s) => &s.power_mean,
            RegimeEnv::Adversarial { power_mean, .. } => power_mean,
            RegimeEnv::AdversarialAdaptive { base, .. } => &base.power_mean,
            RegimeEnv::Mixed(m) => &m.base.power_mean,
            RegimeEnv::Contaminated { spec, .. } => &spec.base.power_mean,
        }
    }

    /// Generates round `t` (1-based). `history` carries the most recent
    /// strategies, newest last; only adaptive jammers read it.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        t: u64,
        history: &[Strategy],
        rng: &mut R,
    ) -> RoundOutcome {
        match self {
            RegimeEnv::Stochastic(spec) => spec.step(rng),
            RegimeEnv::Adversarial {
                jammer,
                power_mean,
                k,
            } => {
                let num = power_mean.len();
                let loss = (0..num).map(|f| oblivious_loss(jammer, t, f)).collect();
                let power = (0..num)
                    .map(|f| {
                        let u = hash_uniform(jammer.schedule_seed, t, f as u64, 0x9011);
                        power_draw(power_mean[f], *k, u)
                    })
                    .collect();
                let attacked = jammer.attack_strength.iter().map(|&a| a > 0.0).collect();
                RoundOutcome {
                    loss,
                    power,
                    attacked,
                }
            }
            RegimeEnv::AdversarialAdaptive { base, jammer } => {
                let mut out = base.step(rng);
                for f in adaptive_targets(jammer, base.mu.len(), history) {
                    out.loss[f] = (out.loss[f] + jammer.strength).min(1.0);
                    out.attacked[f] = true;
                }
                out
            }
            RegimeEnv::Mixed(spec) => {
                let mut out = spec.base.step(rng);
                match &spec.jammer {
                    JammerSpec::Oblivious(j) => {
                        for &f in &spec.jammed_set {
                            out.loss[f] = oblivious_loss(j, t, f);
                            out.attacked[f] = true;
                        }
                    }
                    JammerSpec::Adaptive(j) => {
                        let targets = adaptive_targets(j, spec.base.mu.len(), history);
                        for f in targets {
                            if spec.jammed_set.contains(&f) {
                                out.loss[f] = (out.loss[f] + j.strength).min(1.0);
                                out.attacked[f] = true;
                            }
                        }
                    }
                }
                out
            }
            RegimeEnv::Contaminated {
                spec,
                spent,
                gaps,
                min_gap,
            } => {
                let mut out = spec.base.step(rng);
                if t > spec.tau0 && spec.zeta > 0.0 {
                    for f in 0..gaps.len() {
                        let rate = if gaps[f] > 0.0 { gaps[f] } else { *min_gap };
                        let budget = (t as f64 * rate * spec.zeta).floor() as u64;
                        if spent[f] < budget {
                            // Worst-case flip: suboptimal looks perfect, best
                            // looks ruined.
                            out.loss[f] = if gaps[f] > 0.0 { 0.0 } else { 1.0 };
                            out.attacked[f] = true;
                            spent[f] += 1;
                        }
                    }
                }
                out
            }
        }
    }
}
