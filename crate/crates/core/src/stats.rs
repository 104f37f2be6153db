//! The statistic family W1..W7 and their p-values.
//!
//! Rank-based statistics (distribution-free under independence of
//! continuous variables):
//!
//! * `W2 = (tr S^k - E tr S^k) / sqrt(Var G_k)`, null N(0,1);
//! * `W6 = n (max_{i<j} |(p/n) s_ij|)^2 - 4 log p + log log p`, Gumbel-type null;
//! * `W7 = W2 + n^(-delta) W6`, null N(0,1).
//!
//! Pearson-matrix baselines from the comparison literature:
//!
//! * `W1`: rescaled largest eigenvalue of R, Tracy-Widom type 1 null;
//! * `W3`: sum of squared correlations, normal null;
//! * `W4`: log-determinant statistic, normal null, defined only for p < n-1;
//! * `W5`: max |r_ij| analogue of W6 with `4 log n` centering.
//!
//! Rejection sidedness defaults: two-sided for the normal-limit statistics
//! (W2, W3, W4, W7), upper for the max-type and largest-eigenvalue
//! statistics (W1, W5, W6). The max-type statistics are one-sided by
//! construction; for the normal ones the choice is configurable.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{self, MomentParams};
use crate::null::{self, Tw1Table};
use crate::rank::{self, DataMatrix, SpearmanMatrix};
use crate::spectral::{self, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Statistic {
    W1,
    W2,
    W3,
    W4,
    W5,
    W6,
    W7,
}

impl Statistic {
    pub const ALL: [Statistic; 7] = [
        Statistic::W1,
        Statistic::W2,
        Statistic::W3,
        Statistic::W4,
        Statistic::W5,
        Statistic::W6,
        Statistic::W7,
    ];

    /// Statistics computed from ranks alone.
    pub fn is_rank_based(self) -> bool {
        matches!(self, Statistic::W2 | Statistic::W6 | Statistic::W7)
    }

    pub fn default_sidedness(self) -> Sidedness {
        match self {
            Statistic::W2 | Statistic::W3 | Statistic::W4 | Statistic::W7 => Sidedness::TwoSided,
            Statistic::W1 | Statistic::W5 | Statistic::W6 => Sidedness::Upper,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}", *self as u8 + 1)
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "w1" => Ok(Statistic::W1),
            "w2" => Ok(Statistic::W2),
            "w3" => Ok(Statistic::W3),
            "w4" => Ok(Statistic::W4),
            "w5" => Ok(Statistic::W5),
            "w6" => Ok(Statistic::W6),
            "w7" => Ok(Statistic::W7),
            other => Err(Error::invalid("statistic", format!("unknown {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    Upper,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NullDist {
    StdNormal,
    TracyWidom1,
    /// Extreme-value law with prefactor `(ratio^2 sqrt(8 pi))^(-1)`,
    /// `ratio` being the dimension ratio `c = n/p`.
    GumbelW5 {
        ratio: f64,
    },
    GumbelW6,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    pub p: f64,
    /// True when a tabulated null saturated at its table boundary.
    pub saturated: bool,
}

/// Upper or two-sided p-value under the given null. Two-sided is only
/// meaningful for the symmetric normal null.
pub fn p_value(value: f64, dist: &NullDist, sidedness: Sidedness) -> Result<PValue> {
    p_value_with_table(value, dist, sidedness, Tw1Table::builtin())
}

pub fn p_value_with_table(
    value: f64,
    dist: &NullDist,
    sidedness: Sidedness,
    tw1: &Tw1Table,
) -> Result<PValue> {
    if sidedness == Sidedness::TwoSided && !matches!(dist, NullDist::StdNormal) {
        return Err(Error::invalid(
            "sidedness",
            "two-sided rejection is defined for the normal null only",
        ));
    }
    let pv = match dist {
        NullDist::StdNormal => match sidedness {
            Sidedness::Upper => PValue {
                p: 1.0 - null::std_normal_cdf(value),
                saturated: false,
            },
            Sidedness::TwoSided => PValue {
                p: 2.0 * (1.0 - null::std_normal_cdf(value.abs())),
                saturated: false,
            },
        },
        NullDist::TracyWidom1 => {
            let (p, saturated) = tw1.upper_p(value);
            PValue { p, saturated }
        }
        NullDist::GumbelW5 { ratio } => PValue {
            p: 1.0 - null::f_w5_cdf(value, *ratio),
            saturated: false,
        },
        NullDist::GumbelW6 => PValue {
            p: 1.0 - null::f_w6_cdf(value),
            saturated: false,
        },
    };
    Ok(PValue {
        p: pv.p.clamp(0.0, 1.0),
        saturated: pv.saturated,
    })
}

/// Tuning knobs for one statistic evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub statistic: Statistic,
    /// Trace power for W2/W7; the recommended default is 4.
    pub k: u32,
    /// Penalty exponent for W7, in (0, 1); the recommended default is 0.5.
    pub delta: f64,
    pub alpha: f64,
    /// `None` selects the per-statistic default.
    pub sidedness: Option<Sidedness>,
}

impl TestConfig {
    pub fn new(statistic: Statistic) -> Self {
        TestConfig {
            statistic,
            k: 4,
            delta: 0.5,
            alpha: 0.05,
            sidedness: None,
        }
    }

    pub fn with_k(mut self, k: u32) -> Self {
        self.k = k;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_sidedness(mut self, sidedness: Sidedness) -> Self {
        self.sidedness = Some(sidedness);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=moments::MAX_K).contains(&self.k) {
            return Err(Error::invalid("k", format!("{} not in 2..=20", self.k)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(
                "delta",
                format!("{} not in (0, 1)", self.delta),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(
                "alpha",
                format!("{} not in (0, 1)", self.alpha),
            ));
        }
        Ok(())
    }

    fn sidedness_or_default(&self) -> Sidedness {
        self.sidedness
            .unwrap_or_else(|| self.statistic.default_sidedness())
    }
}

/// Outcome of a single test: statistic value, null, p-value, decision, and
/// the intermediate quantities that make up the value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: Statistic,
    pub value: f64,
    pub null_dist: NullDist,
    pub sidedness: Sidedness,
    pub p_value: f64,
    pub saturated: bool,
    pub alpha: f64,
    pub reject: bool,
    pub diagnostics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

fn finish_report(
    statistic: Statistic,
    value: f64,
    null_dist: NullDist,
    config: &TestConfig,
    diagnostics: BTreeMap<String, f64>,
    warnings: Vec<String>,
) -> Result<TestReport> {
    let sidedness = config.sidedness_or_default();
    let pv = p_value(value, &null_dist, sidedness)?;
    Ok(TestReport {
        statistic,
        value,
        null_dist,
        sidedness,
        p_value: pv.p,
        saturated: pv.saturated,
        alpha: config.alpha,
        reject: pv.p < config.alpha,
        diagnostics,
        warnings,
    })
}

fn tie_warnings(s: &SpearmanMatrix) -> Vec<String> {
    if s.any_ties() {
        vec!["ties present; rank statistics assume continuous data".into()]
    } else {
        Vec::new()
    }
}

/// `W2` from already-evaluated pieces: the trace power of S and the
/// mean/variance of its limiting law. The simulation harness amortizes
/// both across replications.
pub fn compute_w2_with_parts(
    s: &SpearmanMatrix,
    tr_k: f64,
    mean: f64,
    var: f64,
    config: &TestConfig,
) -> Result<TestReport> {
    config.validate()?;
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance { value: var });
    }
    let value = (tr_k - mean) / var.sqrt();
    let mut diag = BTreeMap::new();
    diag.insert("k".into(), config.k as f64);
    diag.insert("trace_power".into(), tr_k);
    diag.insert("mean_tr".into(), mean);
    diag.insert("var_g".into(), var);
    finish_report(
        Statistic::W2,
        value,
        NullDist::StdNormal,
        config,
        diag,
        tie_warnings(s),
    )
}

/// `W2` from a precomputed spectrum of S (the decomposition is reused
/// across statistics and trace powers).
pub fn compute_w2_with_spectrum(
    s: &SpearmanMatrix,
    spectrum: &Spectrum,
    config: &TestConfig,
) -> Result<TestReport> {
    config.validate()?;
    let params = MomentParams::new(s.n() as u32, s.p() as u32)?;
    let mean = moments::mean_tr(params, config.k)?;
    let var = moments::var_g(params, config.k)?;
    compute_w2_with_parts(s, spectrum.trace_power(config.k), mean, var, config)
}

/// Standardized trace power of the rank correlation matrix.
pub fn compute_w2(s: &SpearmanMatrix, config: &TestConfig) -> Result<TestReport> {
    let spectrum = Spectrum::of(s.matrix())?;
    compute_w2_with_spectrum(s, &spectrum, config)
}

/// Max-entry statistic of the rank correlation matrix.
pub fn compute_w6(s: &SpearmanMatrix, config: &TestConfig) -> Result<TestReport> {
    let (n, p) = (s.n(), s.p());
    if p < 2 {
        return Err(Error::TooFewVariables { got: p, min: 2 });
    }
    if n < 3 {
        return Err(Error::TooFewObservations { got: n, min: 3 });
    }
    let (max_s, i, j) = spectral::max_offdiag_abs(s.matrix())?;
    let rho_max = max_s * p as f64 / n as f64;
    let pf = p as f64;
    let value = n as f64 * rho_max * rho_max - 4.0 * pf.ln() + pf.ln().ln();
    let mut diag = BTreeMap::new();
    diag.insert("max_abs_rho".into(), rho_max);
    diag.insert("argmax_i".into(), i as f64);
    diag.insert("argmax_j".into(), j as f64);
    finish_report(
        Statistic::W6,
        value,
        NullDist::GumbelW6,
        config,
        diag,
        tie_warnings(s),
    )
}

/// `W7 = W2 + n^(-delta) W6` assembled from already-computed component
/// reports (the decomposition identity is exact by construction).
pub fn compute_w7_from_parts(
    s: &SpearmanMatrix,
    w2: &TestReport,
    w6: &TestReport,
    config: &TestConfig,
) -> Result<TestReport> {
    config.validate()?;
    let value = w2.value + (s.n() as f64).powf(-config.delta) * w6.value;
    let mut diag = BTreeMap::new();
    diag.insert("w2_value".into(), w2.value);
    diag.insert("w6_value".into(), w6.value);
    diag.insert("k".into(), config.k as f64);
    diag.insert("delta".into(), config.delta);
    finish_report(
        Statistic::W7,
        value,
        NullDist::StdNormal,
        config,
        diag,
        tie_warnings(s),
    )
}

/// Penalized trace-power statistic; the recommended tuning is
/// `k = 4, delta = 0.5`.
pub fn compute_w7(s: &SpearmanMatrix, config: &TestConfig) -> Result<TestReport> {
    config.validate()?;
    let w2 = compute_w2(s, &TestConfig::new(Statistic::W2).with_k(config.k))?;
    let w6 = compute_w6(s, &TestConfig::new(Statistic::W6))?;
    compute_w7_from_parts(s, &w2, &w6, config)
}

/// W1/W3/W4/W5 on the Pearson correlation matrix of `data`.
pub fn compute_reference(data: &DataMatrix, config: &TestConfig) -> Result<TestReport> {
    let r = rank::pearson_matrix(data)?;
    compute_reference_on(&r, config)
}

/// Same, from an already-built correlation matrix.
pub fn compute_reference_on(r: &rank::PearsonMatrix, config: &TestConfig) -> Result<TestReport> {
    let kind = config.statistic;
    if !matches!(
        kind,
        Statistic::W1 | Statistic::W3 | Statistic::W4 | Statistic::W5
    ) {
        return Err(Error::invalid(
            "statistic",
            format!("{kind} is not a Pearson-matrix reference statistic"),
        ));
    }
    let (n, p) = (r.n(), r.p());
    if p < 2 {
        return Err(Error::TooFewVariables { got: p, min: 2 });
    }
    let (nf, pf) = (n as f64, p as f64);
    let mut diag = BTreeMap::new();
    match kind {
        Statistic::W1 => {
            let lmax = spectral::largest_eigenvalue(r.matrix())?;
            let value = (nf * lmax - (pf.sqrt() + nf.sqrt()).powi(2))
                / ((nf.sqrt() + pf.sqrt()) * (1.0 / pf.sqrt() + 1.0 / nf.sqrt()).powf(1.0 / 3.0));
            diag.insert("lambda_max".into(), lmax);
            finish_report(kind, value, NullDist::TracyWidom1, config, diag, vec![])
        }
        Statistic::W3 => {
            let mut sum_sq = 0.0;
            for i in 0..p {
                for j in (i + 1)..p {
                    let rij = r.entry(i, j);
                    sum_sq += rij * rij;
                }
            }
            let value = (sum_sq - pf * (pf - 1.0) / (2.0 * nf)) / (pf / nf);
            diag.insert("sum_r_squared".into(), sum_sq);
            finish_report(kind, value, NullDist::StdNormal, config, diag, vec![])
        }
        Statistic::W4 => {
            if p >= n - 1 {
                return Err(Error::Undefined {
                    statistic: "W4".into(),
                    reason: format!("requires p < n - 1 (got n = {n}, p = {p})"),
                });
            }
            let log_det = spectral::log_det(r.matrix()).map_err(|e| match e {
                Error::NotPositiveDefinite { min_eigenvalue } => Error::Undefined {
                    statistic: "W4".into(),
                    reason: format!(
                        "correlation matrix not positive definite (eigenvalue {min_eigenvalue:e})"
                    ),
                },
                other => other,
            })?;
            let q = pf / (nf - 1.0);
            let mu = (pf - nf + 1.5) * (1.0 - q).ln() - (nf - 2.0) * q;
            let sigma2 = -2.0 * (q + (1.0 - q).ln());
            let value = (log_det - mu) / sigma2.sqrt();
            diag.insert("log_det".into(), log_det);
            diag.insert("centering".into(), mu);
            diag.insert("scale".into(), sigma2.sqrt());
            finish_report(kind, value, NullDist::StdNormal, config, diag, vec![])
        }
        Statistic::W5 => {
            let (rmax, i, j) = spectral::max_offdiag_abs(r.matrix())?;
            let value = nf * rmax * rmax - 4.0 * nf.ln() + nf.ln().ln();
            diag.insert("max_abs_r".into(), rmax);
            diag.insert("argmax_i".into(), i as f64);
            diag.insert("argmax_j".into(), j as f64);
            finish_report(
                kind,
                value,
                NullDist::GumbelW5 { ratio: nf / pf },
                config,
                diag,
                vec![],
            )
        }
        _ => unreachable!(),
    }
}
