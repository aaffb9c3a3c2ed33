//! Brute-force cross-checks for small instances: enumerate every k-subset
//! and compare against the DP fast paths. Kept deliberately naive and
//! independent of the subset DP so it can serve as an oracle for it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::hindsight_best;
use crate::error::{Error, Result};
use crate::subset::{marginals, strategy_prob, Strategy, SubsetDp};

/// Worst-case deviations found by [`check`].
#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    pub num_channels: usize,
    pub k: usize,
    pub weight_draws: usize,
    /// max |DP strategy probability − enumerated probability|.
    pub max_prob_err: f64,
    /// max |DP marginal − enumerated marginal|.
    pub max_marginal_err: f64,
    /// max |Σ probabilities − 1|.
    pub max_norm_err: f64,
    /// max |hindsight value − enumerated best subset value|.
    pub max_hindsight_err: f64,
}

impl OracleReport {
    pub fn worst(&self) -> f64 {
        self.max_prob_err
            .max(self.max_marginal_err)
            .max(self.max_norm_err)
            .max(self.max_hindsight_err)
    }
}

/// All k-subsets of 0..n in lexicographic order.
pub fn enumerate_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out = 1u64;
    for j in 0..k {
        out = out * (n - j) as u64 / (j + 1) as u64;
    }
    out
}

/// Compares DP probabilities, marginals and the hindsight oracle against
/// full enumeration over `weight_draws` random weight vectors.
pub fn check(
    num_channels: usize,
    k: usize,
    weight_draws: usize,
    seed: u64,
) -> Result<OracleReport> {
    if k == 0 || k > num_channels {
        return Err(Error::Config(format!(
            "oracle requires 1 <= k <= K, got k={k}, K={num_channels}"
        )));
    }
    if binomial(num_channels, k) > 200_000 {
        return Err(Error::Config(format!(
            "oracle enumeration too large: C({num_channels},{k})"
        )));
    }
    let subsets = enumerate_subsets(num_channels, k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        num_channels,
        k,
        weight_draws,
        max_prob_err: 0.0,
        max_marginal_err: 0.0,
        max_norm_err: 0.0,
        max_hindsight_err: 0.0,
    };
    for _ in 0..weight_draws {
        let w: Vec<f64> = (0..num_channels)
            .map(|_| rng.gen_range(0.02..1.0))
            .collect();
        let products: Vec<f64> = subsets
            .iter()
            .map(|s| s.iter().map(|&f| w[f]).product::<f64>())
            .collect();
        let z: f64 = products.iter().sum();

        let mut dp = SubsetDp::new(num_channels, k)?;
        dp.prepare(&w)?;
        let mut total = 0.0;
        for (s, &prod) in subsets.iter().zip(&products) {
            let strategy = Strategy::new(s.clone(), num_channels)?;
            let dp_prob = strategy_prob(&w, &strategy, k)?;
            report.max_prob_err = report.max_prob_err.max((dp_prob - prod / z).abs());
            total += dp_prob;
        }
        report.max_norm_err = report.max_norm_err.max((total - 1.0).abs());

        let rho = marginals(&w, k)?;
        for (f, &r) in rho.iter().enumerate() {
            let brute: f64 = subsets
                .iter()
                .zip(&products)
                .filter(|(s, _)| s.contains(&f))
                .map(|(_, &p)| p / z)
                .sum();
            report.max_marginal_err = report.max_marginal_err.max((r - brute).abs());
        }

        let table: Vec<f64> = (0..num_channels).map(|_| rng.gen::<f64>() * 50.0).collect();
        let (_, value) = hindsight_best(&table, k)?;
        let brute_best = subsets
            .iter()
            .map(|s| s.iter().map(|&f| table[f]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        report.max_hindsight_err = report.max_hindsight_err.max((value - brute_best).abs());
    }
    Ok(report)
}
