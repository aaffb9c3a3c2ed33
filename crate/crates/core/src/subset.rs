//! Exact polynomial-time handling of the product-form distribution over
//! k-subsets of channels.
//!
//! The strategy space has C(K,k) members, far too many to materialize. All
//! probabilities here factor through elementary symmetric polynomials of the
//! per-channel weights, so normalization, per-channel marginals and exact
//! sequential sampling all run in O(K·k) using two DP tables (prefix and
//! suffix elementary symmetric polynomials). The tables live in a reusable
//! [`SubsetDp`] scratch buffer owned by the caller; nothing here holds shared
//! mutable state.

use rand::Rng;

use crate::error::{Error, Result};

/// Channel index in `[0, K)`.
pub type ChannelId = usize;

/// One multi-channel access action: a sorted set of `k` distinct channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy {
    channels: Vec<ChannelId>,
}

impl Strategy {
    /// Builds a strategy after checking it is strictly increasing and within
    /// range.
    pub fn new(channels: Vec<ChannelId>, num_channels: usize) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::Config("strategy must not be empty".into()));
        }
        for pair in channels.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::Config(format!(
                    "strategy channels must be strictly increasing, got {channels:?}"
                )));
            }
        }
        if *channels.last().unwrap() >= num_channels {
            return Err(Error::Config(format!(
                "strategy channel out of range: {channels:?} with K={num_channels}"
            )));
        }
        Ok(Strategy { channels })
    }

    /// Unchecked constructor for callers that maintain the invariant.
    pub(crate) fn from_sorted_unchecked(channels: Vec<ChannelId>) -> Self {
        debug_assert!(channels.windows(2).all(|p| p[0] < p[1]));
        Strategy { channels }
    }

    pub fn channels(&self) -> &[ChannelId] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn contains(&self, f: ChannelId) -> bool {
        self.channels.binary_search(&f).is_ok()
    }
}

/// ⌈K/k⌉ strategies whose union covers every channel.
///
/// Channels are cut into consecutive blocks of size `k`; if `k` does not
/// divide `K` the last block is padded with the lowest-index channels not
/// already in it. Every channel has exactly one designated *home* block: the
/// block owning its partition slot. Padding appearances do not change a
/// channel's home.
#[derive(Debug, Clone)]
pub struct CoveringSet {
    strategies: Vec<Strategy>,
    home: Vec<usize>,
}

impl CoveringSet {
    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    /// Index (into `strategies`) of channel `f`'s home block.
    pub fn home(&self, f: ChannelId) -> usize {
        self.home[f]
    }
}

/// Builds the covering set for `K` channels and subset size `k`.
pub fn build_covering_set(num_channels: usize, k: usize) -> Result<CoveringSet> {
    if k == 0 || k > num_channels {
        return Err(Error::Config(format!(
            "covering set requires 1 <= k <= K, got k={k}, K={num_channels}"
        )));
    }
    let blocks = num_channels.div_ceil(k);
    let mut strategies = Vec::with_capacity(blocks);
    let mut home = vec![0usize; num_channels];
    for b in 0..blocks {
        let start = b * k;
        let end = ((b + 1) * k).min(num_channels);
        let mut members: Vec<ChannelId> = (start..end).collect();
        home[start..end].fill(b);
        // Pad a short last block with the lowest-index channels not in it.
        let mut fill = 0;
        while members.len() < k {
            if !(start..end).contains(&fill) {
                members.push(fill);
            }
            fill += 1;
        }
        members.sort_unstable();
        strategies.push(Strategy::from_sorted_unchecked(members));
    }
    Ok(CoveringSet { strategies, home })
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::Config("weight vector must not be empty".into()));
    }
    if w.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(Error::DegenerateWeights);
    }
    Ok(())
}

/// e_j(w): the sum over all j-subsets of products of weights.
///
/// Standard one-dimensional DP over `e[i][j] = e[i-1][j] + w_i * e[i-1][j-1]`,
/// O(K·j) time, O(j) space. `j = 0` returns 1 (empty product convention).
pub fn elementary_symmetric(w: &[f64], j: usize) -> Result<f64> {
    check_weights(w)?;
    if j > w.len() {
        return Err(Error::Config(format!(
            "elementary symmetric degree {j} exceeds K={}",
            w.len()
        )));
    }
    let mut e = vec![0.0f64; j + 1];
    e[0] = 1.0;
    for (i, &wi) in w.iter().enumerate() {
        let top = j.min(i + 1);
        for d in (1..=top).rev() {
            e[d] += wi * e[d - 1];
        }
    }
    Ok(e[j])
}

/// Reusable DP scratch for one weight vector: prefix and suffix elementary
/// symmetric tables up to degree `k`.
///
/// `prefix[i][d] = e_d(w_0..w_{i-1})` and `suffix[i][d] = e_d(w_i..w_{K-1})`,
/// stored row-major with stride `k+1`. Preparing the tables costs O(K·k);
/// afterwards sampling, marginals and strategy probabilities are O(K·k),
/// O(K·k) and O(k) respectively without recomputation.
#[derive(Debug, Clone)]
pub struct SubsetDp {
    k: usize,
    num_channels: usize,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
}

impl SubsetDp {
    pub fn new(num_channels: usize, k: usize) -> Result<Self> {
        if k == 0 || k > num_channels {
            return Err(Error::Config(format!(
                "subset sampler requires 1 <= k <= K, got k={k}, K={num_channels}"
            )));
        }
        let stride = k + 1;
        Ok(SubsetDp {
            k,
            num_channels,
            prefix: vec![0.0; (num_channels + 1) * stride],
            suffix: vec![0.0; (num_channels + 1) * stride],
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    fn pre(&self, i: usize, d: usize) -> f64 {
        self.prefix[i * (self.k + 1) + d]
    }

    #[inline]
    fn suf(&self, i: usize, d: usize) -> f64 {
        self.suffix[i * (self.k + 1) + d]
    }

    /// Rebuilds both DP tables for `w`. Errors if the weights are degenerate
    /// (non-finite, non-positive, or normalizer underflows to zero).
    pub fn prepare(&mut self, w: &[f64]) -> Result<()> {
        if w.len() != self.num_channels {
            return Err(Error::Config(format!(
                "weight vector length {} does not match K={}",
                w.len(),
                self.num_channels
            )));
        }
        check_weights(w)?;
        let k = self.k;
        let stride = k + 1;
        let n = self.num_channels;

        self.prefix[0..stride].fill(0.0);
        self.prefix[0] = 1.0;
        for i in 0..n {
            let (done, rest) = self.prefix.split_at_mut((i + 1) * stride);
            let prev = &done[i * stride..];
            let row = &mut rest[..stride];
            row[0] = 1.0;
            for d in 1..=k {
                row[d] = prev[d] + w[i] * prev[d - 1];
            }
        }

        self.suffix[n * stride..(n + 1) * stride].fill(0.0);
        self.suffix[n * stride] = 1.0;
        for i in (0..n).rev() {
            let (head, tail) = self.suffix.split_at_mut((i + 1) * stride);
            let next = &tail[..stride];
            let row = &mut head[i * stride..];
            row[0] = 1.0;
            for d in 1..=k {
                row[d] = next[d] + w[i] * next[d - 1];
            }
        }

        let norm = self.suf(0, k);
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        Ok(())
    }

    /// e_k(w), the normalizer over all k-subsets.
    pub fn normalizer(&self) -> f64 {
        self.suf(0, self.k)
    }

    /// Probability of one strategy under the product-form distribution:
    /// `Π_{f∈i} w(f) / e_k(w)`.
    pub fn strategy_prob(&self, w: &[f64], strategy: &Strategy) -> f64 {
        let prod: f64 = strategy.channels().iter().map(|&f| w[f]).product();
        prod / self.normalizer()
    }

    /// Per-channel inclusion probabilities `ρ(f) = w(f)·e_{k-1}(w∖f)/e_k(w)`.
    ///
    /// `e_{k-1}` of the vector without channel `f` splits over the prefix
    /// before `f` and the suffix after it, so the whole vector costs O(K·k).
    pub fn marginals(&self, w: &[f64], out: &mut [f64]) {
        let k = self.k;
        let norm = self.normalizer();
        for (f, slot) in out.iter_mut().enumerate() {
            let mut rest = 0.0;
            for d in 0..k {
                rest += self.pre(f, d) * self.suf(f + 1, k - 1 - d);
            }
            *slot = (w[f] * rest / norm).clamp(0.0, 1.0);
        }
    }

    /// Draws one k-subset with probability exactly [`Self::strategy_prob`].
    ///
    /// Channels are visited in ascending index order; with `j` slots still
    /// open at channel `i`, the inclusion probability is
    /// `w_i · e_{j-1}(w_{i+1..}) / e_j(w_{i..})`.
    pub fn sample<R: Rng + ?Sized>(&self, w: &[f64], rng: &mut R) -> Strategy {
        let k = self.k;
        let n = self.num_channels;
        let mut chosen = Vec::with_capacity(k);
        let mut open = k;
        for (i, &wi) in w.iter().enumerate() {
            if open == 0 {
                break;
            }
            // Remaining channels exactly fill the open slots.
            if n - i == open {
                chosen.extend(i..n);
                open = 0;
                break;
            }
            let denom = self.suf(i, open);
            let p = if denom > 0.0 {
                (wi * self.suf(i + 1, open - 1) / denom).clamp(0.0, 1.0)
            } else {
                1.0
            };
            if rng.gen::<f64>() < p {
                chosen.push(i);
                open -= 1;
            }
        }
        debug_assert_eq!(open, 0);
        Strategy::from_sorted_unchecked(chosen)
    }
}

/// One-shot strategy probability. See [`SubsetDp::strategy_prob`].
pub fn strategy_prob(w: &[f64], strategy: &Strategy, k: usize) -> Result<f64> {
    if strategy.len() != k {
        return Err(Error::Config(format!(
            "strategy has {} channels, expected k={k}",
            strategy.len()
        )));
    }
    let mut dp = SubsetDp::new(w.len(), k)?;
    dp.prepare(w)?;
    Ok(dp.strategy_prob(w, strategy))
}

/// One-shot marginal vector. See [`SubsetDp::marginals`].
pub fn marginals(w: &[f64], k: usize) -> Result<Vec<f64>> {
    let mut dp = SubsetDp::new(w.len(), k)?;
    dp.prepare(w)?;
    let mut out = vec![0.0; w.len()];
    dp.marginals(w, &mut out);
    Ok(out)
}

/// One-shot sampler. See [`SubsetDp::sample`].
pub fn sample_strategy<R: Rng + ?Sized>(w: &[f64], k: usize, rng: &mut R) -> Result<Strategy> {
    let mut dp = SubsetDp::new(w.len(), k)?;
    dp.prepare(w)?;
    Ok(dp.sample(w, rng))
}
