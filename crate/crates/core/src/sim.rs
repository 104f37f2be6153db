//! Seeded Monte Carlo harness for size/power studies.
//!
//! Nine data-generating scenarios (three null families and six
//! alternatives) are evaluated over independent replications. Every
//! replication draws from its own counter-indexed RNG substream, and
//! tallies are integer counts, so results are bit-identical for a given
//! `(config, master_seed)` regardless of thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::moments::{self, MomentParams};
use crate::rank::{self, DataMatrix, TiePolicy};
use crate::spectral::{self, Spectrum};
use crate::stats::{self, Sidedness, Statistic, TestConfig};

/// RNG algorithm identity echoed into every result for provenance.
pub const RNG_ALGORITHM: &str = "chacha12/seed_from_u64(master_seed)/stream=replication";

/// Independent substream for one replication: ChaCha12 keyed by the master
/// seed with the 64-bit stream counter set to the replication index.
pub fn substream(master_seed: u64, replication: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(replication);
    rng
}

/// The data-generating hypotheses: `H0x` nulls and `Haxy` alternatives
/// (x = marginal family, y = 1 for one large disturbance, 2 for many small
/// ones).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// iid standard normal entries.
    H01,
    /// iid standard Cauchy entries.
    H02,
    /// thirds of the variables: normal, Cauchy, t(4).
    H03,
    /// normal with one correlated pair (0.8).
    Ha11,
    /// normal with all off-diagonal covariances 4/p.
    Ha12,
    /// Cauchy with one linearly mixed pair (coefficient 0.8).
    Ha21,
    /// Cauchy with every variable contaminated by (7p)^-1 times the others.
    Ha22,
    /// thirds as H03, first third has one correlated pair (0.8).
    Ha31,
    /// thirds as H03, first third has all off-diagonals 12/p.
    Ha32,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::H01,
        Scenario::H02,
        Scenario::H03,
        Scenario::Ha11,
        Scenario::Ha12,
        Scenario::Ha21,
        Scenario::Ha22,
        Scenario::Ha31,
        Scenario::Ha32,
    ];

    pub fn is_null(self) -> bool {
        matches!(self, Scenario::H01 | Scenario::H02 | Scenario::H03)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::H01 => "h01",
            Scenario::H02 => "h02",
            Scenario::H03 => "h03",
            Scenario::Ha11 => "ha11",
            Scenario::Ha12 => "ha12",
            Scenario::Ha21 => "ha21",
            Scenario::Ha22 => "ha22",
            Scenario::Ha31 => "ha31",
            Scenario::Ha32 => "ha32",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h01" => Ok(Scenario::H01),
            "h02" => Ok(Scenario::H02),
            "h03" => Ok(Scenario::H03),
            "ha11" => Ok(Scenario::Ha11),
            "ha12" => Ok(Scenario::Ha12),
            "ha21" => Ok(Scenario::Ha21),
            "ha22" => Ok(Scenario::Ha22),
            "ha31" => Ok(Scenario::Ha31),
            "ha32" => Ok(Scenario::Ha32),
            other => Err(Error::invalid("scenario", format!("unknown {other:?}"))),
        }
    }
}

#[derive(Debug)]
enum SamplerKind {
    IidNormal,
    IidCauchy,
    Thirds,
    /// full-dimension Gaussian with covariance square root
    GaussianCov(SquareMatrix),
    CauchyPair,
    CauchyMix,
    /// thirds with a Gaussian block covariance square root on the first third
    ThirdsGaussianBlock(SquareMatrix),
}

/// Deterministic data generator for one (scenario, n, p); covariance
/// square roots are factored once at construction.
#[derive(Debug)]
pub struct ScenarioSampler {
    scenario: Option<Scenario>,
    n: usize,
    p: usize,
    kind: SamplerKind,
}

const PSD_CLAMP_TOL: f64 = 1e-8;

fn one_pair_cov(dim: usize, strength: f64) -> SquareMatrix {
    let mut c = SquareMatrix::identity(dim);
    if dim >= 2 {
        c.set(0, 1, strength);
        c.set(1, 0, strength);
    }
    c
}

fn dense_cov(dim: usize, offdiag: f64) -> SquareMatrix {
    let mut c = SquareMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                c.set(i, j, offdiag);
            }
        }
    }
    c
}

impl ScenarioSampler {
    pub fn new(scenario: Scenario, n: usize, p: usize) -> Result<ScenarioSampler> {
        if n < 2 {
            return Err(Error::TooFewObservations { got: n, min: 2 });
        }
        if p < 2 {
            return Err(Error::TooFewVariables { got: p, min: 2 });
        }
        let kind = match scenario {
            Scenario::H01 => SamplerKind::IidNormal,
            Scenario::H02 => SamplerKind::IidCauchy,
            Scenario::H03 => {
                check_thirds(p)?;
                SamplerKind::Thirds
            }
            Scenario::Ha11 => {
                SamplerKind::GaussianCov(spectral::sym_sqrt(&one_pair_cov(p, 0.8), PSD_CLAMP_TOL)?)
            }
            Scenario::Ha12 => SamplerKind::GaussianCov(spectral::sym_sqrt(
                &dense_cov(p, 4.0 / p as f64),
                PSD_CLAMP_TOL,
            )?),
            Scenario::Ha21 => SamplerKind::CauchyPair,
            Scenario::Ha22 => SamplerKind::CauchyMix,
            Scenario::Ha31 => {
                check_thirds(p)?;
                let m = p / 3;
                SamplerKind::ThirdsGaussianBlock(spectral::sym_sqrt(
                    &one_pair_cov(m, 0.8),
                    PSD_CLAMP_TOL,
                )?)
            }
            Scenario::Ha32 => {
                check_thirds(p)?;
                let m = p / 3;
                SamplerKind::ThirdsGaussianBlock(spectral::sym_sqrt(
                    &dense_cov(m, 12.0 / p as f64),
                    PSD_CLAMP_TOL,
                )?)
            }
        };
        Ok(ScenarioSampler {
            scenario: Some(scenario),
            n,
            p,
            kind,
        })
    }

    /// Gaussian generator with a single disturbed pair of tunable strength;
    /// used for power-monotonicity studies.
    pub fn custom_gaussian_pair(n: usize, p: usize, strength: f64) -> Result<ScenarioSampler> {
        if n < 2 {
            return Err(Error::TooFewObservations { got: n, min: 2 });
        }
        if p < 2 {
            return Err(Error::TooFewVariables { got: p, min: 2 });
        }
        Ok(ScenarioSampler {
            scenario: None,
            n,
            p,
            kind: SamplerKind::GaussianCov(spectral::sym_sqrt(
                &one_pair_cov(p, strength),
                PSD_CLAMP_TOL,
            )?),
        })
    }

    pub fn scenario(&self) -> Option<Scenario> {
        self.scenario
    }

    /// Draws one `n x p` dataset. Observations are generated in row order,
    /// variables within a row in column order.
    pub fn sample(&self, rng: &mut ChaCha12Rng) -> DataMatrix {
        let (n, p) = (self.n, self.p);
        let mut values = Vec::with_capacity(n * p);
        let mut scratch = vec![0.0f64; p];
        for _ in 0..n {
            match &self.kind {
                SamplerKind::IidNormal => {
                    for _ in 0..p {
                        values.push(rng.sample::<f64, _>(StandardNormal));
                    }
                }
                SamplerKind::IidCauchy => {
                    for _ in 0..p {
                        values.push(cauchy(rng));
                    }
                }
                SamplerKind::Thirds => {
                    let (m1, m2) = (p / 3, 2 * p / 3);
                    for i in 0..p {
                        let v = if i < m1 {
                            rng.sample::<f64, _>(StandardNormal)
                        } else if i < m2 {
                            cauchy(rng)
                        } else {
                            student_t4(rng)
                        };
                        values.push(v);
                    }
                }
                SamplerKind::GaussianCov(sqrt) => {
                    for z in scratch.iter_mut() {
                        *z = rng.sample::<f64, _>(StandardNormal);
                    }
                    for i in 0..p {
                        let row = sqrt.row(i);
                        values.push(row.iter().zip(&scratch).map(|(a, z)| a * z).sum());
                    }
                }
                SamplerKind::CauchyPair => {
                    for z in scratch.iter_mut() {
                        *z = cauchy(rng);
                    }
                    values.push(scratch[0] + 0.8 * scratch[1]);
                    values.push(scratch[1] + 0.8 * scratch[0]);
                    values.extend_from_slice(&scratch[2..]);
                }
                SamplerKind::CauchyMix => {
                    for z in scratch.iter_mut() {
                        *z = cauchy(rng);
                    }
                    let total: f64 = scratch.iter().sum();
                    let w = 1.0 / (7.0 * p as f64);
                    for &x in &scratch {
                        values.push(x + w * (total - x));
                    }
                }
                SamplerKind::ThirdsGaussianBlock(sqrt) => {
                    let (m1, m2) = (p / 3, 2 * p / 3);
                    for z in scratch[..m1].iter_mut() {
                        *z = rng.sample::<f64, _>(StandardNormal);
                    }
                    for i in 0..m1 {
                        let row = sqrt.row(i);
                        values.push(row.iter().zip(&scratch[..m1]).map(|(a, z)| a * z).sum());
                    }
                    for i in m1..p {
                        values.push(if i < m2 { cauchy(rng) } else { student_t4(rng) });
                    }
                }
            }
        }
        DataMatrix::from_flat(values, n, p).expect("generated data is finite and rectangular")
    }
}

fn check_thirds(p: usize) -> Result<()> {
    if p < 6 {
        return Err(Error::invalid(
            "p",
            format!("{p} < 6: the three variable blocks must be nonempty"),
        ));
    }
    Ok(())
}

/// Standard Cauchy by the tangent transform of a uniform.
fn cauchy(rng: &mut ChaCha12Rng) -> f64 {
    let u: f64 = rng.random();
    (std::f64::consts::PI * (u - 0.5)).tan()
}

/// Student t(4): standard normal over sqrt(chi^2_4 / 4), with the chi^2_4
/// built from two exponentials.
fn student_t4(rng: &mut ChaCha12Rng) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = 1.0 - rng.random::<f64>();
    let chi2_4 = -2.0 * (u1 * u2).ln();
    z / (chi2_4 / 4.0).sqrt()
}

/// Convenience wrapper: one dataset from a scenario.
pub fn generate(
    scenario: Scenario,
    n: usize,
    p: usize,
    rng: &mut ChaCha12Rng,
) -> Result<DataMatrix> {
    Ok(ScenarioSampler::new(scenario, n, p)?.sample(rng))
}

/// One statistic to evaluate during a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatChoice {
    pub statistic: Statistic,
    pub k: u32,
    pub delta: f64,
    pub sidedness: Option<Sidedness>,
}

impl StatChoice {
    pub fn new(statistic: Statistic) -> StatChoice {
        StatChoice {
            statistic,
            k: 4,
            delta: 0.5,
            sidedness: None,
        }
    }

    pub fn with_k(mut self, k: u32) -> StatChoice {
        self.k = k;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> StatChoice {
        self.delta = delta;
        self
    }

    fn test_config(&self, alpha: f64) -> TestConfig {
        TestConfig {
            statistic: self.statistic,
            k: self.k,
            delta: self.delta,
            alpha,
            sidedness: self.sidedness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub p: usize,
    pub replications: u32,
    pub master_seed: u64,
    pub alpha: f64,
    pub stats: Vec<StatChoice>,
}

impl SimConfig {
    pub fn new(scenario: Scenario, n: usize, p: usize) -> SimConfig {
        SimConfig {
            scenario,
            n,
            p,
            replications: 1000,
            master_seed: 0,
            alpha: 0.05,
            stats: vec![
                StatChoice::new(Statistic::W2),
                StatChoice::new(Statistic::W6),
                StatChoice::new(Statistic::W7),
            ],
        }
    }

    pub fn with_reps(mut self, reps: u32) -> SimConfig {
        self.replications = reps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> SimConfig {
        self.master_seed = seed;
        self
    }

    pub fn with_stats(mut self, stats: Vec<StatChoice>) -> SimConfig {
        self.stats = stats;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::invalid("replications", "must be >= 1"));
        }
        if self.stats.is_empty() {
            return Err(Error::invalid("stats", "select at least one statistic"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid("alpha", format!("{}", self.alpha)));
        }
        Ok(())
    }
}

/// Per-statistic tally of a finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatOutcome {
    pub statistic: Statistic,
    pub k: Option<u32>,
    pub delta: Option<f64>,
    /// Replications where the statistic was defined.
    pub applied: u32,
    pub rejected: u32,
    /// Rejection percentage over applied replications; absent when the
    /// statistic was never defined.
    pub rate_pct: Option<f64>,
    pub se_pct: Option<f64>,
    /// First reason the statistic was undefined, when that happened.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub scenario: Scenario,
    pub n: usize,
    pub p: usize,
    pub replications: u32,
    pub master_seed: u64,
    pub alpha: f64,
    pub rng_algorithm: String,
    pub outcomes: Vec<StatOutcome>,
    pub wall_ms: u64,
    /// Cell-level failure (for example a non-PSD scenario covariance);
    /// outcomes are empty in that case.
    pub error: Option<String>,
}

impl SimResult {
    fn from_error(config: &SimConfig, err: &Error) -> SimResult {
        SimResult {
            scenario: config.scenario,
            n: config.n,
            p: config.p,
            replications: config.replications,
            master_seed: config.master_seed,
            alpha: config.alpha,
            rng_algorithm: RNG_ALGORITHM.into(),
            outcomes: Vec::new(),
            wall_ms: 0,
            error: Some(err.to_string()),
        }
    }
}

enum RepStatus {
    Rejected,
    Retained,
    Undefined(String),
}

/// Runs one simulation cell.
pub fn run(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let start = now();
    let sampler = ScenarioSampler::new(config.scenario, config.n, config.p)?;

    // trace-power moments shared across replications
    let params = MomentParams::new(config.n as u32, config.p as u32)?;
    let mut w2_moments: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
    for choice in &config.stats {
        if matches!(choice.statistic, Statistic::W2 | Statistic::W7) {
            choice.test_config(config.alpha).validate()?;
            if !w2_moments.contains_key(&choice.k) {
                let mean = moments::mean_tr(params, choice.k)?;
                let var = moments::var_g(params, choice.k)?;
                if !(var > 0.0) {
                    return Err(Error::DegenerateVariance { value: var });
                }
                w2_moments.insert(choice.k, (mean, var));
            }
        }
    }

    let eval_one = |rep: u32| -> Vec<RepStatus> {
        let mut rng = substream(config.master_seed, rep as u64);
        let data = sampler.sample(&mut rng);
        evaluate_replication(&data, config, &w2_moments)
    };

    #[cfg(feature = "parallel")]
    let statuses: Vec<Vec<RepStatus>> = (0..config.replications)
        .into_par_iter()
        .map(eval_one)
        .collect();
    #[cfg(not(feature = "parallel"))]
    let statuses: Vec<Vec<RepStatus>> = (0..config.replications).map(eval_one).collect();

    let mut outcomes: Vec<StatOutcome> = config
        .stats
        .iter()
        .map(|choice| StatOutcome {
            statistic: choice.statistic,
            k: matches!(choice.statistic, Statistic::W2 | Statistic::W7).then_some(choice.k),
            delta: matches!(choice.statistic, Statistic::W7).then_some(choice.delta),
            applied: 0,
            rejected: 0,
            rate_pct: None,
            se_pct: None,
            note: None,
        })
        .collect();
    for rep_statuses in &statuses {
        for (outcome, status) in outcomes.iter_mut().zip(rep_statuses) {
            match status {
                RepStatus::Rejected => {
                    outcome.applied += 1;
                    outcome.rejected += 1;
                }
                RepStatus::Retained => outcome.applied += 1,
                RepStatus::Undefined(reason) => {
                    if outcome.note.is_none() {
                        outcome.note = Some(reason.clone());
                    }
                }
            }
        }
    }
    for outcome in &mut outcomes {
        if outcome.applied > 0 {
            let r = outcome.rejected as f64 / outcome.applied as f64;
            outcome.rate_pct = Some(100.0 * r);
            outcome.se_pct = Some(100.0 * (r * (1.0 - r) / outcome.applied as f64).sqrt());
        }
    }

    Ok(SimResult {
        scenario: config.scenario,
        n: config.n,
        p: config.p,
        replications: config.replications,
        master_seed: config.master_seed,
        alpha: config.alpha,
        rng_algorithm: RNG_ALGORITHM.into(),
        outcomes,
        wall_ms: elapsed_ms(start),
        error: None,
    })
}

fn evaluate_replication(
    data: &DataMatrix,
    config: &SimConfig,
    w2_moments: &BTreeMap<u32, (f64, f64)>,
) -> Vec<RepStatus> {
    let needs_rank = config.stats.iter().any(|c| c.statistic.is_rank_based());
    let needs_spectrum = config
        .stats
        .iter()
        .any(|c| matches!(c.statistic, Statistic::W2 | Statistic::W7));
    let needs_pearson = config.stats.iter().any(|c| !c.statistic.is_rank_based());

    let spearman = needs_rank.then(|| {
        rank::spearman_matrix(
            &rank::build_ensemble(data, TiePolicy::Average).expect("generated data ranks"),
        )
    });
    let spectrum = if needs_spectrum {
        spearman
            .as_ref()
            .map(|s| Spectrum::of(s.matrix()).expect("rank correlation matrix is symmetric"))
    } else {
        None
    };
    let pearson = if needs_pearson {
        Some(rank::pearson_matrix(data))
    } else {
        None
    };

    config
        .stats
        .iter()
        .map(|choice| {
            let cfg = choice.test_config(config.alpha);
            let report = match choice.statistic {
                Statistic::W2 => {
                    let (mean, var) = w2_moments[&choice.k];
                    let s = spearman.as_ref().unwrap();
                    let tr_k = spectrum.as_ref().unwrap().trace_power(choice.k);
                    stats::compute_w2_with_parts(s, tr_k, mean, var, &cfg)
                }
                Statistic::W6 => stats::compute_w6(spearman.as_ref().unwrap(), &cfg),
                Statistic::W7 => {
                    let s = spearman.as_ref().unwrap();
                    let (mean, var) = w2_moments[&choice.k];
                    let tr_k = spectrum.as_ref().unwrap().trace_power(choice.k);
                    let w2 = stats::compute_w2_with_parts(
                        s,
                        tr_k,
                        mean,
                        var,
                        &TestConfig::new(Statistic::W2).with_k(choice.k),
                    );
                    let w6 = stats::compute_w6(s, &TestConfig::new(Statistic::W6));
                    match (w2, w6) {
                        (Ok(w2), Ok(w6)) => stats::compute_w7_from_parts(s, &w2, &w6, &cfg),
                        (Err(e), _) | (_, Err(e)) => Err(e),
                    }
                }
                _ => match pearson.as_ref().unwrap() {
                    Ok(r) => stats::compute_reference_on(r, &cfg),
                    Err(e) => Err(Error::Undefined {
                        statistic: choice.statistic.to_string(),
                        reason: e.to_string(),
                    }),
                },
            };
            match report {
                Ok(rep) => {
                    if rep.reject {
                        RepStatus::Rejected
                    } else {
                        RepStatus::Retained
                    }
                }
                Err(e) => RepStatus::Undefined(e.to_string()),
            }
        })
        .collect()
}

/// Runs every cell of a grid, never aborting: per-cell failures become
/// error-bearing results.
pub fn table_sweep(cells: &[SimConfig]) -> Vec<SimResult> {
    cells
        .iter()
        .map(|cfg| match run(cfg) {
            Ok(res) => res,
            Err(e) => SimResult::from_error(cfg, &e),
        })
        .collect()
}

/// The four (n, p) shapes used throughout the size/power tables.
pub const TABLE_SHAPES: [(usize, usize); 4] = [(60, 40), (120, 80), (60, 10), (120, 160)];

fn all_seven_stats() -> Vec<StatChoice> {
    Statistic::ALL.iter().map(|&s| StatChoice::new(s)).collect()
}

fn rank_stats() -> Vec<StatChoice> {
    vec![
        StatChoice::new(Statistic::W2),
        StatChoice::new(Statistic::W6),
        StatChoice::new(Statistic::W7),
    ]
}

/// Grid behind the headline size/power table: all nine scenarios at the
/// four table shapes; the normal-family scenarios carry all seven
/// statistics, the heavy-tailed ones the rank-based three.
pub fn preset_table1(reps: u32, seed: u64) -> Vec<SimConfig> {
    let mut cells = Vec::new();
    for &(n, p) in &TABLE_SHAPES {
        for scenario in Scenario::ALL {
            let stats = match scenario {
                Scenario::H01 | Scenario::Ha11 | Scenario::Ha12 => all_seven_stats(),
                _ => rank_stats(),
            };
            cells.push(
                SimConfig::new(scenario, n, p)
                    .with_reps(reps)
                    .with_seed(seed)
                    .with_stats(stats),
            );
        }
    }
    cells
}

const SWEEP_KS: [u32; 5] = [2, 4, 6, 8, 10];
const SWEEP_DELTAS: [f64; 6] = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8];

fn sensitivity_cells(scenario: Scenario, reps: u32, seed: u64) -> Vec<SimConfig> {
    let mut cells = Vec::new();
    for &(n, p) in &TABLE_SHAPES {
        for &k in &SWEEP_KS {
            let mut stats = vec![StatChoice::new(Statistic::W2).with_k(k)];
            for &d in &SWEEP_DELTAS {
                stats.push(StatChoice::new(Statistic::W7).with_k(k).with_delta(d));
            }
            cells.push(
                SimConfig::new(scenario, n, p)
                    .with_reps(reps)
                    .with_seed(seed)
                    .with_stats(stats),
            );
        }
    }
    cells
}

/// Size sensitivity grid: k in {2,4,6,8,10} x delta in {0.3..0.8} under the
/// normal null.
pub fn preset_table2(reps: u32, seed: u64) -> Vec<SimConfig> {
    sensitivity_cells(Scenario::H01, reps, seed)
}

/// Power sensitivity grid: same tuning grid under the one-large-disturbance
/// normal alternative.
pub fn preset_table3(reps: u32, seed: u64) -> Vec<SimConfig> {
    sensitivity_cells(Scenario::Ha11, reps, seed)
}

#[cfg(not(target_arch = "wasm32"))]
fn now() -> Option<std::time::Instant> {
    Some(std::time::Instant::now())
}

#[cfg(target_arch = "wasm32")]
fn now() -> Option<()> {
    None
}

#[cfg(not(target_arch = "wasm32"))]
fn elapsed_ms(start: Option<std::time::Instant>) -> u64 {
    start.map(|s| s.elapsed().as_millis() as u64).unwrap_or(0)
}

#[cfg(target_arch = "wasm32")]
fn elapsed_ms(_start: Option<()>) -> u64 {
    0
}
