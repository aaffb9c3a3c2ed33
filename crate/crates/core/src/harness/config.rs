//! Flat typed key-value run configuration with dotted sections.
//!
//! Format: one `key = value` pair per line, `#` starts a comment, blank
//! lines ignored. Vector-valued keys take either a comma-separated list of
//! length K or a single scalar that broadcasts. Unknown keys are errors so
//! sweep typos die loudly.

use std::collections::BTreeSet;

use crate::coop::CoopConfig;
use crate::ee::TimingParams;
use crate::error::{Error, Result};
use crate::policy::ScheduleMode;

/// Which learner drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyId {
    /// Constrained adaptive policy, exploration capped by min{1/(2K), β}.
    Aoeecc,
    /// Constrained adaptive policy with the empirical-gap exploration knob.
    AoeeccAvg,
    /// Plain combinatorial EXP3 (no budget handling).
    Exp3,
    /// CombUCB1 baseline.
    CombUcb1,
}

impl PolicyId {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyId::Aoeecc => "aoeecc",
            PolicyId::AoeeccAvg => "aoeecc-avg",
            PolicyId::Exp3 => "exp3",
            PolicyId::CombUcb1 => "combucb1",
        }
    }
}

/// Which environment regime generates losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeId {
    Stochastic,
    Adversarial,
    AdversarialAdaptive,
    Mixed,
    Contaminated,
}

impl RegimeId {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeId::Stochastic => "stochastic",
            RegimeId::Adversarial => "adversarial",
            RegimeId::AdversarialAdaptive => "adversarial-adaptive",
            RegimeId::Mixed => "mixed",
            RegimeId::Contaminated => "contaminated",
        }
    }
}

/// Mini-batch wrapper setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauSetting {
    Off,
    Fixed(u32),
    /// τ from the adaptive-adversary batch formula at the run horizon.
    Auto,
}

/// Regime-specific generator parameters. Fields are read according to the
/// configured regime; the rest stay at their defaults.
#[derive(Debug, Clone)]
pub struct EnvConfig {
    /// Expected per-channel losses (stochastic-family regimes).
    pub mu: Vec<f64>,
    /// Expected per-channel powers in [0, 1/k].
    pub power_mean: Vec<f64>,
    /// `bernoulli` or `ee-physical`.
    pub generator: String,
    /// Oblivious jammer inflation per channel.
    pub attack_strength: Vec<f64>,
    /// Seed of the oblivious base/attack sequences.
    pub jammer_seed: u64,
    /// Adaptive jammer memory.
    pub theta: usize,
    /// Channels the adaptive jammer hits per round.
    pub j_channels: usize,
    /// Adaptive jammer inflation.
    pub strength: f64,
    /// Mixed regime: adversarially controlled channels.
    pub jammed_set: Vec<usize>,
    /// Mixed regime jammer flavor: `oblivious` or `adaptive`.
    pub jammer: String,
    /// Contamination strength in [0, 1/2).
    pub zeta: f64,
    /// Contamination activation round.
    pub tau0: u64,
    /// Physical generator: bandwidth (Hz).
    pub ee_bandwidth: f64,
    /// Physical generator: capacity-gap factor.
    pub ee_theta_cap: f64,
    /// Physical generator: per-channel noise power (W).
    pub ee_noise_power: Vec<f64>,
    /// Physical generator: per-channel PU interference (W).
    pub ee_pu_interference: Vec<f64>,
    /// Physical generator: per-channel jammer interference (W).
    pub ee_jammer_interference: Vec<f64>,
    /// Physical generator: per-channel cross-SU interference (W).
    pub ee_cross_su_interference: Vec<f64>,
    /// Physical generator: per-channel own-link gain.
    pub ee_gain_self: Vec<f64>,
    /// Physical generator: per-channel circuit power (W).
    pub ee_circuit_power: Vec<f64>,
    /// Physical generator: per-channel interruption probability.
    pub ee_pr_interrupt: Vec<f64>,
    /// Physical generator: transmit power (W) at full budget share.
    pub ee_p_tx_max: f64,
    /// Physical generator: Rician K-factor (dB); NaN disables fading.
    pub ee_rician_k_db: f64,
    /// Physical generator: EE normalization M (0 = derive).
    pub ee_norm: f64,
}

impl EnvConfig {
    fn defaults(num_channels: usize, k: usize) -> Self {
        EnvConfig {
            mu: Vec::new(),
            power_mean: vec![0.4 / k as f64; num_channels],
            generator: "bernoulli".into(),
            attack_strength: Vec::new(),
            jammer_seed: 7,
            theta: 5,
            j_channels: k,
            strength: 0.5,
            jammed_set: Vec::new(),
            jammer: "oblivious".into(),
            zeta: 0.25,
            tau0: 0,
            ee_bandwidth: 1e6,
            ee_theta_cap: 0.5,
            ee_noise_power: vec![1e-9; num_channels],
            ee_pu_interference: vec![0.0; num_channels],
            ee_jammer_interference: vec![0.0; num_channels],
            ee_cross_su_interference: vec![0.0; num_channels],
            ee_gain_self: vec![1e-6; num_channels],
            ee_circuit_power: vec![0.05; num_channels],
            ee_pr_interrupt: vec![0.0; num_channels],
            ee_p_tx_max: 0.5,
            ee_rician_k_db: f64::NAN,
            ee_norm: 0.0,
        }
    }
}

/// One experiment run, fully specified.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub num_channels: usize,
    pub k: usize,
    pub n_rounds: u64,
    pub seed: u64,
    pub policy: PolicyId,
    pub regime: RegimeId,
    /// Override of the exploration mode implied by the policy id.
    pub schedule_mode: Option<ScheduleMode>,
    /// Exploration constant c of the ξ formula.
    pub c: f64,
    /// Power budget P_o.
    pub budget: f64,
    pub eps_access: f64,
    pub minibatch: TauSetting,
    pub coop: CoopConfig,
    pub timing: TimingParams,
    pub env: EnvConfig,
    /// CSV destination; None = no file output.
    pub output: Option<String>,
}

impl RunConfig {
    /// A bernoulli-stochastic starting point; callers adjust fields.
    pub fn defaults(num_channels: usize, k: usize) -> Self {
        RunConfig {
            num_channels,
            k,
            n_rounds: 1000,
            seed: 1,
            policy: PolicyId::AoeeccAvg,
            regime: RegimeId::Stochastic,
            schedule_mode: None,
            c: 1.0 / 32.0,
            budget: 1.0,
            eps_access: 1.0,
            minibatch: TauSetting::Off,
            coop: CoopConfig::default(),
            timing: TimingParams {
                t_sense: 0.01,
                t_probe: 0.01,
                t_access: 2.0,
            },
            env: EnvConfig::defaults(num_channels, k),
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.num_channels {
            return Err(Error::Config(format!(
                "k: requires 1 <= k <= K, got k={}, K={}",
                self.k, self.num_channels
            )));
        }
        if self.n_rounds == 0 {
            return Err(Error::Config("n_rounds: must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.budget) {
            return Err(Error::Config(format!("P_o: {} outside [0,1]", self.budget)));
        }
        if !(self.eps_access > 0.0 && self.eps_access <= 1.0) {
            return Err(Error::Config(format!(
                "eps_access: {} outside (0,1]",
                self.eps_access
            )));
        }
        if self.c <= 0.0 {
            return Err(Error::Config(format!("c: {} must be positive", self.c)));
        }
        let needs_mu = matches!(
            self.regime,
            RegimeId::Stochastic
                | RegimeId::AdversarialAdaptive
                | RegimeId::Mixed
                | RegimeId::Contaminated
        );
        if needs_mu && self.env.mu.len() != self.num_channels {
            return Err(Error::Config(format!(
                "env.mu: expected {} entries, got {}",
                self.num_channels,
                self.env.mu.len()
            )));
        }
        if self.env.power_mean.len() != self.num_channels {
            return Err(Error::Config(format!(
                "env.power_mean: expected {} entries, got {}",
                self.num_channels,
                self.env.power_mean.len()
            )));
        }
        let oblivious_needed = self.regime == RegimeId::Adversarial
            || (self.regime == RegimeId::Mixed && self.env.jammer == "oblivious");
        if oblivious_needed && self.env.attack_strength.len() != self.num_channels {
            return Err(Error::Config(format!(
                "env.attack_strength: expected {} entries, got {}",
                self.num_channels,
                self.env.attack_strength.len()
            )));
        }
        if self.coop.strategies_per_round > 1 {
            match self.minibatch {
                TauSetting::Off | TauSetting::Fixed(1) => {}
                _ => {
                    return Err(Error::Config(
                        "coop.M > 1 cannot combine with mini-batching".into(),
                    ))
                }
            }
        }
        if self.schedule_mode == Some(ScheduleMode::KnownGap)
            && (self.env.mu.len() != self.num_channels || self.env.generator != "bernoulli")
        {
            return Err(Error::Config(
                "schedule_mode: known-gap needs bernoulli env.mu for true gaps".into(),
            ));
        }
        if self.regime == RegimeId::Contaminated && !(0.0..0.5).contains(&self.env.zeta) {
            return Err(Error::Config(format!(
                "env.zeta: {} outside [0, 1/2)",
                self.env.zeta
            )));
        }
        let adaptive = self.regime == RegimeId::AdversarialAdaptive
            || (self.regime == RegimeId::Mixed && self.env.jammer == "adaptive");
        if adaptive {
            if self.env.j_channels == 0 || self.env.j_channels > self.num_channels {
                return Err(Error::Config(format!(
                    "env.j_channels: {} outside [1, K]",
                    self.env.j_channels
                )));
            }
            if !(0.0 < self.env.strength && self.env.strength <= 1.0) {
                return Err(Error::Config(format!(
                    "env.strength: {} outside (0, 1]",
                    self.env.strength
                )));
            }
        }
        if self.regime == RegimeId::Mixed {
            if self.env.jammed_set.len() > self.k {
                return Err(Error::Config(format!(
                    "env.jammed_set: {} channels exceed k={}",
                    self.env.jammed_set.len(),
                    self.k
                )));
            }
            if self.env.jammed_set.iter().any(|&f| f >= self.num_channels) {
                return Err(Error::Config("env.jammed_set: channel out of range".into()));
            }
        }
        self.timing.validate()?;
        Ok(())
    }

    /// Exploration mode implied by the policy id, after overrides.
    pub fn effective_mode(&self) -> ScheduleMode {
        if let Some(m) = self.schedule_mode {
            return m;
        }
        match self.policy {
            PolicyId::Aoeecc | PolicyId::Exp3 | PolicyId::CombUcb1 => ScheduleMode::AdversarialOnly,
            PolicyId::AoeeccAvg => ScheduleMode::Avg,
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    seen: BTreeSet<String>,
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

fn parse_vec_f64(key: &str, value: &str, len: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let vals: Vec<f64> = parts
        .iter()
        .map(|p| parse_scalar::<f64>(key, p))
        .collect::<Result<_>>()?;
    if vals.len() == 1 {
        return Ok(vec![vals[0]; len]);
    }
    if vals.len() != len {
        return Err(Error::Config(format!(
            "{key}: expected 1 or {len} values, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn parse_vec_usize(key: &str, value: &str) -> Result<Vec<usize>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|p| parse_scalar::<usize>(key, p))
        .collect()
}

impl<'a> Parser<'a> {
    fn pairs(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (lineno, raw) in self.text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )));
            };
            out.push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(out)
    }
}

/// Parses a config file body into a [`RunConfig`], rejecting unknown keys.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut parser = Parser {
        text,
        seen: BTreeSet::new(),
    };
    let pairs = parser.pairs()?;
    let lookup = |key: &str| -> Option<&str> {
        pairs
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    };

    let num_channels: usize = match lookup("K") {
        Some(v) => parse_scalar("K", v)?,
        None => return Err(Error::Config("K: missing required key".into())),
    };
    let k: usize = match lookup("k") {
        Some(v) => parse_scalar("k", v)?,
        None => return Err(Error::Config("k: missing required key".into())),
    };
    if k == 0 || k > num_channels {
        return Err(Error::Config(format!("k: requires 1 <= k <= K, got {k}")));
    }

    let mut cfg = RunConfig::defaults(num_channels, k);
    for (key, value) in &pairs {
        parser.seen.insert(key.clone());
        match key.as_str() {
            "K" | "k" => {}
            "n_rounds" => cfg.n_rounds = parse_scalar(key, value)?,
            "seed" => cfg.seed = parse_scalar(key, value)?,
            "policy" => {
                cfg.policy = match value.as_str() {
                    "aoeecc" => PolicyId::Aoeecc,
                    "aoeecc-avg" => PolicyId::AoeeccAvg,
                    "exp3" => PolicyId::Exp3,
                    "combucb1" => PolicyId::CombUcb1,
                    other => return Err(Error::Config(format!("policy: unknown id '{other}'"))),
                }
            }
            "regime" => {
                cfg.regime = match value.as_str() {
                    "stochastic" => RegimeId::Stochastic,
                    "adversarial" => RegimeId::Adversarial,
                    "adversarial-adaptive" => RegimeId::AdversarialAdaptive,
                    "mixed" => RegimeId::Mixed,
                    "contaminated" => RegimeId::Contaminated,
                    other => return Err(Error::Config(format!("regime: unknown id '{other}'"))),
                }
            }
            "schedule_mode" => {
                cfg.schedule_mode = Some(match value.as_str() {
                    "adversarial-only" => ScheduleMode::AdversarialOnly,
                    "avg" => ScheduleMode::Avg,
                    "known-gap" => ScheduleMode::KnownGap,
                    other => {
                        return Err(Error::Config(format!(
                            "schedule_mode: unknown mode '{other}'"
                        )))
                    }
                })
            }
            "c" => cfg.c = parse_scalar(key, value)?,
            "P_o" => cfg.budget = parse_scalar(key, value)?,
            "eps_access" => cfg.eps_access = parse_scalar(key, value)?,
            "minibatch_tau" => {
                cfg.minibatch = match value.as_str() {
                    "0" | "off" => TauSetting::Off,
                    "auto" => TauSetting::Auto,
                    v => TauSetting::Fixed(parse_scalar(key, v)?),
                }
            }
            "output" => cfg.output = Some(value.clone()),
            "coop.M" => cfg.coop.strategies_per_round = parse_scalar(key, value)?,
            "coop.m_lower_bound" => cfg.coop.m_lower_bound = parse_scalar(key, value)?,
            "timing.t_s" => cfg.timing.t_sense = parse_scalar(key, value)?,
            "timing.t_p" => cfg.timing.t_probe = parse_scalar(key, value)?,
            "timing.t_a" => cfg.timing.t_access = parse_scalar(key, value)?,
            "env.mu" => cfg.env.mu = parse_vec_f64(key, value, num_channels)?,
            "env.power_mean" => cfg.env.power_mean = parse_vec_f64(key, value, num_channels)?,
            "env.generator" => {
                if value != "bernoulli" && value != "ee-physical" {
                    return Err(Error::Config(format!(
                        "env.generator: unknown generator '{value}'"
                    )));
                }
                cfg.env.generator = value.clone();
            }
            "env.attack_strength" => {
                cfg.env.attack_strength = parse_vec_f64(key, value, num_channels)?
            }
            "env.jammer_seed" => cfg.env.jammer_seed = parse_scalar(key, value)?,
            "env.theta" => cfg.env.theta = parse_scalar(key, value)?,
            "env.j_channels" => cfg.env.j_channels = parse_scalar(key, value)?,
            "env.strength" => cfg.env.strength = parse_scalar(key, value)?,
            "env.jammed_set" => cfg.env.jammed_set = parse_vec_usize(key, value)?,
            "env.jammer" => {
                if value != "oblivious" && value != "adaptive" {
                    return Err(Error::Config(format!(
                        "env.jammer: unknown flavor '{value}'"
                    )));
                }
                cfg.env.jammer = value.clone();
            }
            "env.zeta" => cfg.env.zeta = parse_scalar(key, value)?,
            "env.tau0" => cfg.env.tau0 = parse_scalar(key, value)?,
            "ee.bandwidth" => cfg.env.ee_bandwidth = parse_scalar(key, value)?,
            "ee.theta_cap" => cfg.env.ee_theta_cap = parse_scalar(key, value)?,
            "ee.noise_power" => cfg.env.ee_noise_power = parse_vec_f64(key, value, num_channels)?,
            "ee.pu_interference" => {
                cfg.env.ee_pu_interference = parse_vec_f64(key, value, num_channels)?
            }
            "ee.jammer_interference" => {
                cfg.env.ee_jammer_interference = parse_vec_f64(key, value, num_channels)?
            }
            "ee.cross_su_interference" => {
                cfg.env.ee_cross_su_interference = parse_vec_f64(key, value, num_channels)?
            }
            "ee.gain_self" => cfg.env.ee_gain_self = parse_vec_f64(key, value, num_channels)?,
            "ee.circuit_power" => {
                cfg.env.ee_circuit_power = parse_vec_f64(key, value, num_channels)?
            }
            "ee.pr_interrupt" => cfg.env.ee_pr_interrupt = parse_vec_f64(key, value, num_channels)?,
            "ee.p_tx_max" => cfg.env.ee_p_tx_max = parse_scalar(key, value)?,
            "ee.rician_k_db" => cfg.env.ee_rician_k_db = parse_scalar(key, value)?,
            "ee.norm" => cfg.env.ee_norm = parse_scalar(key, value)?,
            other => {
                return Err(Error::Config(format!("unknown key '{other}'")));
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
