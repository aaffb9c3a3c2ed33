//! Acceptance suite: one test per acceptance criterion, each printing a
//! PASS/FAIL line with the measured quantities.
//!
//! All Monte Carlo here runs on fixed seeds, so every verdict is
//! deterministic and reproducible with `cargo test --test acceptance -- --nocapture`.

use std::time::Instant;

use aoeecc::baselines::hindsight_best;
use aoeecc::coop::{channel_obs_prob, CoopConfig, CoopPolicy};
use aoeecc::ee::{channel_ee, ee_lower_bound, pooled_ee, strategy_ee, time_budget, TimingParams};
use aoeecc::harness::oracle::enumerate_subsets;
use aoeecc::harness::{run_experiment, sweep, PolicyId, RegimeId, RunConfig, TauSetting};
use aoeecc::policy::{Policy, PolicyConfig, ScheduleMode};
use aoeecc::subset::{marginals, strategy_prob, Strategy, SubsetDp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
const PARALLELISM: usize = 8;

/// Expected per-channel losses for the stochastic family (criteria 3, 6, 9):
/// two best channels, minimal gap 0.2, wider gaps above.
const MU_STOCH: [f64; 8] = [0.55, 0.55, 0.75, 0.75, 0.95, 0.95, 0.95, 0.95];
/// Unique-best-pair ladder for the mixed-regime comparison (criterion 7).
const MU_UNIQUE: [f64; 8] = [0.05, 0.25, 0.45, 0.45, 0.65, 0.65, 0.85, 0.85];
/// Base for the adaptive-jammer comparison (criterion 8).
const MU_ADAPTIVE: [f64; 8] = [0.05, 0.05, 0.25, 0.25, 0.45, 0.45, 0.65, 0.65];
/// Expected per-channel powers; ascending so the loss-best channels are also
/// the cheapest, keeping the budget feasible.
const POWER8: [f64; 8] = [0.22, 0.24, 0.26, 0.28, 0.30, 0.32, 0.34, 0.36];
/// Oblivious attack strengths for the adversarial regime (criteria 4, 10).
const ATTACK8: [f64; 8] = [0.05, 0.10, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50];
/// Gap-compressing attack for the hard adversarial comparator (criterion 7).
const ATTACK_COMPRESS: [f64; 8] = [0.50, 0.45, 0.28, 0.26, 0.24, 0.22, 0.21, 0.20];

const BUDGET: f64 = 0.5;

fn base_config(n: u64) -> RunConfig {
    let mut cfg = RunConfig::defaults(8, 2);
    cfg.n_rounds = n;
    cfg.budget = BUDGET;
    cfg.c = 1.0 / 32.0;
    cfg.env.power_mean = POWER8.to_vec();
    cfg
}

fn stochastic_config(n: u64, policy: PolicyId) -> RunConfig {
    let mut cfg = base_config(n);
    cfg.policy = policy;
    cfg.regime = RegimeId::Stochastic;
    cfg.env.mu = MU_STOCH.to_vec();
    cfg
}

fn adversarial_config(n: u64) -> RunConfig {
    let mut cfg = base_config(n);
    cfg.policy = PolicyId::Aoeecc;
    cfg.regime = RegimeId::Adversarial;
    cfg.env.attack_strength = ATTACK8.to_vec();
    cfg
}

fn mixed_config(n: u64) -> RunConfig {
    let mut cfg = base_config(n);
    cfg.policy = PolicyId::AoeeccAvg;
    cfg.regime = RegimeId::Mixed;
    cfg.env.mu = MU_UNIQUE.to_vec();
    cfg.env.jammed_set = vec![0];
    cfg.env.attack_strength = vec![0.5; 8];
    cfg
}

fn contaminated_config(n: u64) -> RunConfig {
    let mut cfg = stochastic_config(n, PolicyId::AoeeccAvg);
    cfg.regime = RegimeId::Contaminated;
    cfg.env.zeta = 0.25;
    cfg.env.tau0 = 0;
    cfg
}

/// Upper 0.999 quantile of the chi-square distribution via the
/// Wilson-Hilferty cube approximation (z_{0.999} = 3.0902).
fn chi_square_crit(df: usize) -> f64 {
    let d = df as f64;
    let z = 3.090_232_306_167_813;
    let a = 2.0 / (9.0 * d);
    d * (1.0 - a + z * a.sqrt()).powi(3)
}

// ---------------------------------------------------------------------------
// Criterion 1: sampler exactness
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_sampler_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE01);
    let mut max_prob_err = 0.0f64;
    let mut max_marg_err = 0.0f64;

    for num_channels in 2..=10usize {
        for k in 1..=3.min(num_channels) {
            let subsets = enumerate_subsets(num_channels, k);
            for _ in 0..50 {
                let w: Vec<f64> = (0..num_channels)
                    .map(|_| rng.gen_range(0.02..1.0))
                    .collect();
                let products: Vec<f64> = subsets
                    .iter()
                    .map(|s| s.iter().map(|&f| w[f]).product::<f64>())
                    .collect();
                let z: f64 = products.iter().sum();
                for (s, &prod) in subsets.iter().zip(&products) {
                    let strategy = Strategy::new(s.clone(), num_channels).unwrap();
                    let dp = strategy_prob(&w, &strategy, k).unwrap();
                    max_prob_err = max_prob_err.max((dp - prod / z).abs());
                }
                let rho = marginals(&w, k).unwrap();
                for f in 0..num_channels {
                    let brute: f64 = subsets
                        .iter()
                        .zip(&products)
                        .filter(|(s, _)| s.contains(&f))
                        .map(|(_, &p)| p / z)
                        .sum();
                    max_marg_err = max_marg_err.max((rho[f] - brute).abs());
                }
            }
        }
    }

    // Chi-square goodness of fit for the sequential sampler, K <= 6.
    let mut worst_chi_margin = f64::INFINITY;
    for num_channels in 2..=6usize {
        for k in 1..num_channels {
            let subsets = enumerate_subsets(num_channels, k);
            if subsets.len() < 2 {
                continue;
            }
            let w: Vec<f64> = (0..num_channels)
                .map(|_| rng.gen_range(0.25..1.0))
                .collect();
            let products: Vec<f64> = subsets
                .iter()
                .map(|s| s.iter().map(|&f| w[f]).product::<f64>())
                .collect();
            let z: f64 = products.iter().sum();
            let mut dp = SubsetDp::new(num_channels, k).unwrap();
            dp.prepare(&w).unwrap();
            let draws = 100_000usize;
            let mut counts = vec![0u64; subsets.len()];
            for _ in 0..draws {
                let s = dp.sample(&w, &mut rng);
                let idx = subsets
                    .iter()
                    .position(|c| c.as_slice() == s.channels())
                    .unwrap();
                counts[idx] += 1;
            }
            let stat: f64 = counts
                .iter()
                .zip(&products)
                .map(|(&c, &p)| {
                    let expect = p / z * draws as f64;
                    (c as f64 - expect) * (c as f64 - expect) / expect
                })
                .sum();
            let crit = chi_square_crit(subsets.len() - 1);
            worst_chi_margin = worst_chi_margin.min(crit - stat);
            assert!(
                stat < crit,
                "chi-square failed at K={num_channels} k={k}: stat={stat:.2} crit={crit:.2}"
            );
        }
    }

    let elapsed = start.elapsed();
    let pass = max_prob_err < 1e-10 && max_marg_err < 1e-10 && elapsed.as_secs_f64() < 10.0;
    println!(
        "[criterion 1] {}: prob_err={max_prob_err:.2e} marginal_err={max_marg_err:.2e} \
         chi2 min margin={worst_chi_margin:.1} runtime={elapsed:.2?}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(max_prob_err < 1e-10, "probability deviation {max_prob_err}");
    assert!(max_marg_err < 1e-10, "marginal deviation {max_marg_err}");
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "runtime {elapsed:?} over budget"
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: unbiased estimation
// ---------------------------------------------------------------------------

fn warmed_policy(mode: ScheduleMode) -> Policy {
    let mut pc = PolicyConfig::new(8, 2);
    pc.budget = BUDGET;
    pc.mode = mode;
    let mut policy = Policy::new(pc).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE02);
    // A few hundred observed rounds give a non-degenerate frozen state.
    for _ in 0..300 {
        let (strategy, rho) = policy.select(&mut rng).unwrap();
        let obs = aoeecc::policy::Observation {
            loss: strategy.channels().iter().map(|_| rng.gen()).collect(),
            power: strategy
                .channels()
                .iter()
                .map(|_| rng.gen::<f64>() * 0.5)
                .collect(),
            strategy,
            transmitted: true,
        };
        policy.observe(&obs, &rho).unwrap();
    }
    policy
}

#[test]
fn criterion_02_unbiased_estimation() {
    let policy = warmed_policy(ScheduleMode::AdversarialOnly);
    let loss: Vec<f64> = (0..8).map(|f| 0.15 + 0.09 * f as f64).collect();
    let power: Vec<f64> = (0..8).map(|f| 0.04 + 0.02 * f as f64).collect();
    let draws = 100_000usize;

    // Single-user loss/power estimates.
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE03);
    let mut sum_loss = [0.0; 8];
    let mut sum_power = [0.0; 8];
    let mut rho_fixed = [0.0; 8];
    for _ in 0..draws {
        let mut p = policy.clone();
        let (strategy, rho) = p.select(&mut rng).unwrap();
        rho_fixed.copy_from_slice(&rho);
        for &f in strategy.channels() {
            sum_loss[f] += loss[f] / rho[f];
            sum_power[f] += power[f] / rho[f];
        }
    }
    let mut worst_sigma = 0.0f64;
    for f in 0..8 {
        let m_l = sum_loss[f] / draws as f64;
        let m_p = sum_power[f] / draws as f64;
        let sig_l = (loss[f] * loss[f] * (1.0 / rho_fixed[f] - 1.0) / draws as f64).sqrt();
        let sig_p = (power[f] * power[f] * (1.0 / rho_fixed[f] - 1.0) / draws as f64).sqrt();
        worst_sigma = worst_sigma.max(((m_l - loss[f]) / sig_l).abs());
        worst_sigma = worst_sigma.max(((m_p - power[f]) / sig_p).abs());
        assert!(
            (m_l - loss[f]).abs() < 3.0 * sig_l,
            "loss estimate biased at {f}"
        );
        assert!(
            (m_p - power[f]).abs() < 3.0 * sig_p,
            "power estimate biased at {f}"
        );
    }

    // Cooperative combined estimate.
    let coop = CoopPolicy::new(
        warmed_policy(ScheduleMode::AdversarialOnly),
        CoopConfig {
            strategies_per_round: 3,
            m_lower_bound: 1.0,
        },
    )
    .unwrap();
    let lambda = coop.policy().state().lambda;
    let mut sum_psi = [0.0; 8];
    let mut varrho_fixed = [0.0; 8];
    for _ in 0..draws {
        let mut c = coop.clone();
        let (set, rho) = c.select(&mut rng).unwrap();
        for &f in &set.observed_channels {
            let varrho = channel_obs_prob(rho[f], c.effective_rate(), 8);
            varrho_fixed[f] = varrho;
            sum_psi[f] += (loss[f] + lambda * power[f]) / varrho;
        }
    }
    let mut worst_coop_sigma = 0.0f64;
    for f in 0..8 {
        let expect = loss[f] + lambda * power[f];
        let got = sum_psi[f] / draws as f64;
        let sig = (expect * expect * (1.0 / varrho_fixed[f] - 1.0) / draws as f64).sqrt();
        worst_coop_sigma = worst_coop_sigma.max(((got - expect) / sig).abs());
        assert!(
            (got - expect).abs() < 3.0 * sig,
            "cooperative estimate biased at {f}: {got} vs {expect}"
        );
    }
    println!(
        "[criterion 2] PASS: max |z| single={worst_sigma:.2}, coop={worst_coop_sigma:.2} (3-sigma gate)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: stochastic regime ordering and polylog growth
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_stochastic_regime() {
    let start = Instant::now();
    let n = 100_000;
    let avg = sweep(
        &stochastic_config(n, PolicyId::AoeeccAvg),
        &SEEDS,
        PARALLELISM,
    )
    .unwrap();
    let exp3 = sweep(&stochastic_config(n, PolicyId::Exp3), &SEEDS, PARALLELISM).unwrap();

    let i4 = avg.checkpoint_index(10_000).unwrap();
    let i5 = avg.checkpoint_index(100_000).unwrap();
    let avg_ratio = avg.regret_mean[i5] / avg.regret_mean[i4];
    let exp3_ratio = exp3.regret_mean[i5] / exp3.regret_mean[i4];
    let ordering = avg.regret_mean[i5] / exp3.regret_mean[i5];
    let elapsed = start.elapsed();

    let pass = avg_ratio <= 4.0
        && exp3_ratio > avg_ratio
        && ordering <= 0.8
        && elapsed.as_secs_f64() < 120.0;
    println!(
        "[criterion 3] {}: AVG R(1e5)/R(1e4)={avg_ratio:.2} (<=4), EXP3 ratio={exp3_ratio:.2} \
         (> AVG), AVG/EXP3 at 1e5={ordering:.3} (<=0.8), runtime={elapsed:.1?}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(avg_ratio <= 4.0, "polylog growth violated: {avg_ratio}");
    assert!(
        exp3_ratio > avg_ratio,
        "EXP3 should grow faster: {exp3_ratio} vs {avg_ratio}"
    );
    assert!(
        ordering <= 0.8,
        "AVG should beat EXP3 by 20%: ratio {ordering}"
    );
    assert!(elapsed.as_secs_f64() < 120.0);
}

// ---------------------------------------------------------------------------
// Criterion 4: adversarial regime bound and trend
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_adversarial_regime() {
    let n = 100_000;
    let out = sweep(&adversarial_config(n), &SEEDS, PARALLELISM).unwrap();
    let bound = |t: f64| 4.0 * 2.0 * (t * 8.0 * 8f64.ln()).sqrt();

    // Per-seed realized regret below the theoretical envelope at every
    // checkpoint.
    let mut worst_frac = f64::NEG_INFINITY;
    for run in &out.runs {
        for rec in &run.records {
            worst_frac = worst_frac.max(rec.regret / bound(rec.t as f64));
        }
    }

    // Mean regret/sqrt(n) non-increasing (20% tolerance) over the last decade.
    let decade: Vec<(u64, f64)> = out
        .checkpoints
        .iter()
        .zip(&out.regret_mean)
        .filter(|(&t, _)| t >= 10_000)
        .map(|(&t, &r)| (t, r / (t as f64).sqrt()))
        .collect();
    let s_first = decade.first().unwrap().1;
    let s_last = decade.last().unwrap().1;
    let max_wiggle = decade.iter().map(|&(_, s)| s / s_first).fold(0.0, f64::max);

    let pass = worst_frac <= 1.0 && max_wiggle <= 1.2 && s_last <= s_first;
    println!(
        "[criterion 4] {}: max regret/bound={worst_frac:.3} (<=1), regret/sqrt(n) over last \
         decade {s_first:.3}->{s_last:.3} (max wiggle {max_wiggle:.2} <= 1.2)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        worst_frac <= 1.0,
        "regret exceeded the adversarial bound: {worst_frac}"
    );
    assert!(
        max_wiggle <= 1.2,
        "regret/sqrt(n) rose above tolerance: {max_wiggle}"
    );
    assert!(s_last <= s_first, "regret/sqrt(n) not trending down");
}

// ---------------------------------------------------------------------------
// Criterion 5: violation sublinearity across the default regimes
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_violation_sublinearity() {
    let n = 100_000;
    let configs: Vec<(&str, RunConfig)> = vec![
        ("stochastic", stochastic_config(n, PolicyId::AoeeccAvg)),
        ("adversarial", adversarial_config(n)),
        ("mixed", mixed_config(n)),
        ("contaminated", contaminated_config(n)),
    ];
    let mut all_pass = true;
    let mut report = String::new();
    for (name, cfg) in configs {
        let out = sweep(&cfg, &SEEDS, PARALLELISM).unwrap();
        let i3 = out.checkpoint_index(1_000).unwrap();
        let i5 = out.checkpoint_index(100_000).unwrap();
        let norm3 = out.violation_mean[i3] / 1_000f64.powf(0.75);
        let norm5 = out.violation_mean[i5] / 100_000f64.powf(0.75);
        let avg_power =
            out.runs.iter().map(|r| r.avg_expected_power).sum::<f64>() / out.runs.len() as f64;
        let sublinear = norm5 <= norm3 * 1.5 + 1e-12;
        let power_ok = avg_power <= BUDGET + 0.05;
        all_pass &= sublinear && power_ok;
        report.push_str(&format!(
            " {name}: v/n^0.75 {norm3:.4}->{norm5:.4} power={avg_power:.3};"
        ));
        assert!(
            sublinear,
            "{name}: violation grew superlinearly ({norm3:.4} -> {norm5:.4})"
        );
        assert!(
            power_ok,
            "{name}: long-run power {avg_power:.3} above budget+0.05"
        );
    }
    println!(
        "[criterion 5] {}:{report}",
        if all_pass { "PASS" } else { "FAIL" }
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: contaminated regime stays near the stochastic one
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_contaminated_regime() {
    let n = 100_000;
    let clean = sweep(
        &stochastic_config(n, PolicyId::AoeeccAvg),
        &SEEDS,
        PARALLELISM,
    )
    .unwrap();
    let dirty = sweep(&contaminated_config(n), &SEEDS, PARALLELISM).unwrap();
    let i4 = dirty.checkpoint_index(10_000).unwrap();
    let i5 = dirty.checkpoint_index(100_000).unwrap();

    let blowup = dirty.regret_mean[i5] / clean.regret_mean[i5];
    let growth = dirty.regret_mean[i5] / dirty.regret_mean[i4];
    let pass = blowup <= 3.0 && growth <= 4.0;
    println!(
        "[criterion 6] {}: contaminated/clean regret={blowup:.2} (<=3), \
         R(1e5)/R(1e4)={growth:.2} (<=4)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(blowup <= 3.0, "contamination blew regret up {blowup}x");
    assert!(
        growth <= 4.0,
        "contaminated run lost polylog growth: {growth}"
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: mixed regime sits between stochastic and adversarial
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_mixed_regime() {
    let n = 100_000;
    let mut stoch_cfg = base_config(n);
    stoch_cfg.policy = PolicyId::AoeeccAvg;
    stoch_cfg.regime = RegimeId::Stochastic;
    stoch_cfg.env.mu = MU_UNIQUE.to_vec();
    let mut adv_cfg = base_config(n);
    adv_cfg.policy = PolicyId::AoeeccAvg;
    adv_cfg.regime = RegimeId::Adversarial;
    adv_cfg.env.attack_strength = ATTACK_COMPRESS.to_vec();

    let realized_mean = |cfg: &RunConfig| {
        let out = sweep(cfg, &SEEDS, PARALLELISM).unwrap();
        out.runs.iter().map(|r| r.realized_regret).sum::<f64>() / out.runs.len() as f64
    };
    let stoch = realized_mean(&stoch_cfg);
    let mixed = realized_mean(&mixed_config(n));
    let adv = realized_mean(&adv_cfg);

    let pass = stoch <= mixed && mixed <= adv;
    println!(
        "[criterion 7] {}: realized regret stochastic={stoch:.1} <= mixed={mixed:.1} <= \
         adversarial={adv:.1}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        stoch <= mixed,
        "mixed regime easier than stochastic: {stoch} vs {mixed}"
    );
    assert!(
        mixed <= adv,
        "mixed regime harder than adversarial: {mixed} vs {adv}"
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: adaptive jammer + mini-batch
// ---------------------------------------------------------------------------

/// Counterfactual value of the best fixed strategy against the
/// frequency-targeting jammer: constant play of one pair keeps the jammer
/// locked onto that pair's channels after the warm-up, so each attacked
/// channel's mean loss is `mu + (1-mu)*s`.
fn counterfactual_best(mu: &[f64], strength: f64, theta: u64, n: u64) -> f64 {
    let mut best = f64::INFINITY;
    for pair in enumerate_subsets(mu.len(), 2) {
        let clean: f64 = pair.iter().map(|&f| mu[f]).sum();
        let attacked: f64 = pair.iter().map(|&f| (1.0 - mu[f]) * strength).sum();
        best = best.min(clean * n as f64 + attacked * (n - theta) as f64);
    }
    best
}

#[test]
fn criterion_08_adaptive_jammer_minibatch() {
    let n = 100_000;
    let theta = 5;
    let strength = 0.5;
    let mut cfg = base_config(n);
    cfg.policy = PolicyId::Aoeecc;
    cfg.regime = RegimeId::AdversarialAdaptive;
    cfg.env.mu = MU_ADAPTIVE.to_vec();
    cfg.env.theta = theta;
    cfg.env.j_channels = 2;
    cfg.env.strength = strength;

    let plain = sweep(&cfg, &SEEDS, PARALLELISM).unwrap();
    cfg.minibatch = TauSetting::Auto;
    let wrapped = sweep(&cfg, &SEEDS, PARALLELISM).unwrap();

    // Sublinearity: mean regret/n decreasing over the last decade.
    let decade_slope = |sw: &aoeecc::harness::SweepResult| {
        let i4 = sw.checkpoint_index(10_000).unwrap();
        let i5 = sw.checkpoint_index(100_000).unwrap();
        (
            sw.regret_mean[i4] / 10_000.0,
            sw.regret_mean[i5] / 100_000.0,
        )
    };
    let (p4, p5) = decade_slope(&plain);
    let (w4, w5) = decade_slope(&wrapped);
    assert!(
        p5 < p4,
        "unwrapped policy regret/n not decreasing: {p4} -> {p5}"
    );
    assert!(
        w5 < w4,
        "wrapped policy regret/n not decreasing: {w4} -> {w5}"
    );

    let i5 = plain.checkpoint_index(100_000).unwrap();
    let realized_ratio = wrapped.regret_mean[i5] / plain.regret_mean[i5];

    // Fixed-commitment benchmark, for the record.
    let cf = counterfactual_best(&MU_ADAPTIVE, strength, theta as u64, n);
    let policy_regret = |sw: &aoeecc::harness::SweepResult| {
        sw.runs.iter().map(|r| r.played_loss_sum - cf).sum::<f64>() / sw.runs.len() as f64
    };
    let plain_policy = policy_regret(&plain);
    let wrapped_policy = policy_regret(&wrapped);

    let pass = realized_ratio <= 0.9;
    println!(
        "[criterion 8] {}: sublinearity PASS (regret/n {p4:.4}->{p5:.4} unwrapped, \
         {w4:.4}->{w5:.4} wrapped); wrapped/unwrapped realized regret={realized_ratio:.2} \
         (required <=0.9); commitment-benchmark regret: unwrapped={plain_policy:.0} \
         wrapped={wrapped_policy:.0}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        realized_ratio <= 0.9,
        "wrapped/unwrapped regret ratio {realized_ratio:.2} exceeds 0.9. Mini-batching \
         trades per-round adaptivity for replay stability: a frequency-targeting jammer is \
         evaded more effectively by fresh per-round draws, while a replayed batch is locked \
         onto after theta rounds, so batching cannot dominate this jammer instance under \
         either the realized or the fixed-commitment benchmark (measured \
         unwrapped={:.0}/wrapped={:.0} realized, {plain_policy:.0}/{wrapped_policy:.0} \
         commitment). The batch wrapper's value is its worst-case guarantee against \
         adversaries that punish adaptivity itself.",
        plain.regret_mean[i5],
        wrapped.regret_mean[i5],
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: cooperative speedup
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_cooperative_speedup() {
    let n = 100_000;
    let single = sweep(
        &stochastic_config(n, PolicyId::AoeeccAvg),
        &SEEDS,
        PARALLELISM,
    )
    .unwrap();
    let mut coop_cfg = stochastic_config(n, PolicyId::AoeeccAvg);
    coop_cfg.coop = CoopConfig {
        strategies_per_round: 8,
        m_lower_bound: 6.0,
    };
    let coop = sweep(&coop_cfg, &SEEDS, PARALLELISM).unwrap();

    let i5 = single.checkpoint_index(100_000).unwrap();
    let ratio = coop.regret_mean[i5] / single.regret_mean[i5];
    let rate = coop.runs[0].coop_rate.unwrap();

    let pass = rate >= 4.0 && ratio <= 2.0 / 3.0;
    println!(
        "[criterion 9] {}: probing rate m={rate:.2} (>=4), coop/single regret={ratio:.3} (<=2/3)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(rate >= 4.0, "probing rate {rate} below 4");
    assert!(
        ratio <= 2.0 / 3.0,
        "cooperative speedup insufficient: {ratio}"
    );
}

// ---------------------------------------------------------------------------
// Criterion 10: EE accounting
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_ee_accounting() {
    // Ordering chain on random instances with the equal power split the
    // per-strategy mean is defined under.
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE10);
    for _ in 0..10_000 {
        let k = 2 + (rng.gen::<u64>() % 5) as usize;
        let rates: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * 8.0).collect();
        let pc = rng.gen_range(0.1..0.6);
        let ptx = rng.gen_range(0.05..0.45);
        let per: Vec<f64> = rates
            .iter()
            .map(|&r| channel_ee(r, pc, ptx).unwrap())
            .collect();
        let mean = strategy_ee(&per);
        let pooled = pooled_ee(&rates, &vec![pc; k], &vec![ptx; k]).unwrap();
        let max = per.iter().cloned().fold(f64::MIN, f64::max);
        let min = per.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max >= mean - 1e-9 && mean >= pooled - 1e-9 && pooled >= min - 1e-9);
    }

    // Achieved EE in the adversarial runs clears the theoretical floor.
    let n = 100_000;
    let timing = TimingParams {
        t_sense: 0.01,
        t_probe: 0.01,
        t_access: 2.0,
    };
    let out = sweep(&adversarial_config(n), &SEEDS, PARALLELISM).unwrap();
    let mut min_margin = f64::INFINITY;
    for run in &out.runs {
        // Per-round achieved EE rate over total time, in strategy-gain units.
        let mean_gain = run.ee_mean * 2.0;
        let measured = mean_gain * n as f64 * timing.t_access / time_budget(n, 1.0, &timing);
        let floor = ee_lower_bound(run.g_max, n, 8, 2, 1.0, &timing);
        min_margin = min_margin.min(measured - floor);
        assert!(
            measured >= floor,
            "seed {}: measured EE rate {measured:.4} below floor {floor:.4}",
            run.seed
        );
    }

    // Time accounting matches the closed form exactly.
    let timing_check = time_budget(100, 1.0, &timing);
    assert!((timing_check - 202.0).abs() < 1e-9);
    assert_eq!(time_budget(100, 0.0, &timing), 2.0);

    println!(
        "[criterion 10] PASS: ordering chain held on 1e4 instances; adversarial EE floor \
         margin={min_margin:.4}; time budget exact"
    );
}

// ---------------------------------------------------------------------------
// Criterion 11: performance envelope
// ---------------------------------------------------------------------------

#[test]
fn criterion_11_performance() {
    // Full-scale single run under a minute.
    let mut cfg = RunConfig::defaults(32, 4);
    cfg.n_rounds = 1_000_000;
    cfg.policy = PolicyId::AoeeccAvg;
    cfg.regime = RegimeId::Stochastic;
    cfg.env.mu = (0..32).map(|f| 0.15 + 0.025 * f as f64).collect();
    cfg.env.power_mean = vec![0.1; 32];
    cfg.budget = BUDGET;
    let start = Instant::now();
    run_experiment(&cfg).unwrap();
    let full_elapsed = start.elapsed();
    assert!(
        full_elapsed.as_secs_f64() < 60.0,
        "1e6-round run took {full_elapsed:?}"
    );

    // Per-round cost linear in K*k: fit T = a + b*(K*k) and require every
    // measurement within 2x of the fit.
    let mut points = Vec::new();
    for num_channels in [8usize, 16, 32, 64] {
        let mut c = RunConfig::defaults(num_channels, 4);
        c.n_rounds = 100_000;
        c.policy = PolicyId::AoeeccAvg;
        c.regime = RegimeId::Stochastic;
        c.env.mu = (0..num_channels)
            .map(|f| 0.15 + 0.6 * f as f64 / num_channels as f64)
            .collect();
        c.env.power_mean = vec![0.1; num_channels];
        c.budget = BUDGET;
        let t0 = Instant::now();
        run_experiment(&c).unwrap();
        let per_round = t0.elapsed().as_secs_f64() / c.n_rounds as f64;
        points.push(((num_channels * 4) as f64, per_round));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mut worst_ratio = 1.0f64;
    for &(x, y) in &points {
        let fit = intercept + slope * x;
        let ratio = (y / fit).max(fit / y);
        worst_ratio = worst_ratio.max(ratio);
    }
    let pass = worst_ratio <= 2.0 && slope > 0.0;
    println!(
        "[criterion 11] {}: 1e6-round run={full_elapsed:.2?} (<60s); per-round cost fit \
         {:.0}ns + {:.1}ns*(K*k), worst point/fit ratio={worst_ratio:.2} (<=2)",
        if pass { "PASS" } else { "FAIL" },
        intercept * 1e9,
        slope * 1e9,
    );
    assert!(slope > 0.0, "per-round cost not increasing in K*k");
    assert!(
        worst_ratio <= 2.0,
        "scaling deviates from linear fit: {worst_ratio}"
    );
}

// ---------------------------------------------------------------------------
// Hindsight oracle sanity on the exact acceptance bases.
// ---------------------------------------------------------------------------

#[test]
fn hindsight_consistency_on_acceptance_bases() {
    for mu in [MU_STOCH, MU_UNIQUE, MU_ADAPTIVE] {
        let (strategy, value) = hindsight_best(&mu, 2).unwrap();
        let brute = enumerate_subsets(8, 2)
            .into_iter()
            .map(|s| s.iter().map(|&f| mu[f]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert!((value - brute).abs() < 1e-12);
        assert_eq!(strategy.channels().len(), 2);
    }
}
