//! Constrained combinatorial semi-bandit laboratory for energy-efficient
//! multi-channel access.
//!
//! The crate simulates a transmitter that each round senses/probes a
//! k-subset of K channels, observes per-channel losses and powers on the
//! played subset only, and learns under a long-term power budget. It
//! provides:
//!
//! - [`subset`]: exact O(K·k) handling of the product-form distribution over
//!   k-subsets (elementary symmetric polynomial DP, marginals, sampling,
//!   covering sets);
//! - [`policy`]: the adaptive exponential-weights policy with per-channel
//!   exploration, importance-weighted estimation, Lagrange-multiplier budget
//!   handling, gap estimation and a mini-batch wrapper;
//! - [`envs`]: the four environment regimes (stochastic, adversarial with
//!   oblivious or memory-bounded adaptive jammers, mixed, contaminated);
//! - [`ee`]: the physical energy-efficiency model, time accounting, sensing
//!   false-alarm probability and the probing-time crossover;
//! - [`baselines`]: combinatorial EXP3 configuration, CombUCB1 and the
//!   hindsight oracle;
//! - [`coop`]: cooperative multi-user probing;
//! - [`harness`]: config files, the experiment loop, regret/violation
//!   metrics, seed sweeps and CSV output.
//!
//! By default (`parallel` feature) seed sweeps fan out across a rayon pool;
//! disabling the feature falls back to a sequential loop with identical
//! results.

pub mod baselines;
pub mod coop;
pub mod ee;
pub mod envs;
pub mod error;
pub mod harness;
pub mod policy;
pub mod subset;

pub use error::{Error, Result};
