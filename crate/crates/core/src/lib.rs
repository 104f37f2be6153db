//! Nonparametric independence testing for high-dimensional data via the
//! spectral statistics of Spearman's rank correlation matrix.
//!
//! The crate turns an `n x p` table of observations into the normalized rank
//! matrix `X` and the rank correlation matrix `S = X X^T`, evaluates the
//! closed-form mean and covariance of the limiting Gaussian process for
//! `tr S^k`, and computes the test statistic family `W1..W7` with their
//! documented null distributions. A seeded Monte Carlo harness reproduces
//! size/power tables, and an exact small-instance oracle (set-partition
//! cumulants over the full permutation ensemble) verifies the closed forms
//! in rational arithmetic.
//!
//! Quick tour:
//!
//! ```
//! use spectrank::rank::{self, DataMatrix, TiePolicy};
//! use spectrank::stats::{self, Statistic, TestConfig};
//!
//! // 20 observations of 5 variables, all independent.
//! let mut rng = spectrank::sim::substream(42, 0);
//! let data = spectrank::sim::generate(spectrank::sim::Scenario::H01, 20, 5, &mut rng).unwrap();
//! let ens = rank::build_ensemble(&data, TiePolicy::Average).unwrap();
//! let s = rank::spearman_matrix(&ens);
//! let report = stats::compute_w7(&s, &TestConfig::new(Statistic::W7)).unwrap();
//! assert!(report.p_value >= 0.0 && report.p_value <= 1.0);
//! ```

pub mod cumulant;
pub mod error;
pub mod matrix;
pub mod moments;
pub mod null;
pub mod rank;
pub mod sim;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
