//! Browser bindings for the rank-spectrum independence tests.
//!
//! Three operations back the demo page: run the statistic family on pasted
//! CSV data, explore the closed-form trace-power moments over k, and run a
//! small seeded null/alternative simulation for the W2 histogram.
//!
//! All entry points take and return JSON strings; plotting stays on the JS
//! side.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use spectrank::moments::{self, MomentParams};
use spectrank::null;
use spectrank::rank::{self, DataMatrix, TiePolicy};
use spectrank::sim::{self, Scenario};
use spectrank::spectral::Spectrum;
use spectrank::stats::{self, Statistic, TestConfig};

fn err_js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn parse_csv(text: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        let mut numeric = true;
        for cell in line.split(',') {
            match cell.trim().parse::<f64>() {
                Ok(v) => row.push(v),
                Err(_) => {
                    numeric = false;
                    break;
                }
            }
        }
        if !numeric {
            if rows.is_empty() {
                continue; // header line
            }
            return Err(format!("line {}: non-numeric cell", lineno + 1));
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(format!(
                    "line {}: {} cells, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                ));
            }
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err("need at least two data rows".into());
    }
    Ok(rows)
}

#[derive(Serialize)]
struct WasmReport {
    statistic: String,
    value: f64,
    p_value: f64,
    reject: bool,
    null: String,
    note: Option<String>,
}

#[derive(Serialize)]
struct TestResponse {
    n: usize,
    p: usize,
    ties: bool,
    alpha: f64,
    reports: Vec<WasmReport>,
}

/// Runs the full statistic family on CSV text (rows = observations).
/// Statistics that are undefined on this input come back with a note
/// instead of a value.
#[wasm_bindgen]
pub fn run_tests_csv(csv: &str, k: u32, delta: f64, alpha: f64) -> Result<String, JsValue> {
    let rows = parse_csv(csv).map_err(err_js)?;
    let data = DataMatrix::from_rows(&rows).map_err(err_js)?;
    let spearman =
        rank::spearman_matrix(&rank::build_ensemble(&data, TiePolicy::Average).map_err(err_js)?);
    let mut reports = Vec::new();
    for statistic in Statistic::ALL {
        let config = TestConfig {
            statistic,
            k,
            delta,
            alpha,
            sidedness: None,
        };
        let outcome = match statistic {
            Statistic::W2 => stats::compute_w2(&spearman, &config),
            Statistic::W6 => stats::compute_w6(&spearman, &config),
            Statistic::W7 => stats::compute_w7(&spearman, &config),
            _ => stats::compute_reference(&data, &config),
        };
        reports.push(match outcome {
            Ok(r) => WasmReport {
                statistic: statistic.to_string(),
                value: r.value,
                p_value: r.p_value,
                reject: r.reject,
                null: format!("{:?}", r.null_dist),
                note: None,
            },
            Err(e) => WasmReport {
                statistic: statistic.to_string(),
                value: f64::NAN,
                p_value: f64::NAN,
                reject: false,
                null: String::new(),
                note: Some(e.to_string()),
            },
        });
    }
    let resp = TestResponse {
        n: data.n(),
        p: data.p(),
        ties: spearman.any_ties(),
        alpha,
        reports,
    };
    serde_json::to_string(&resp).map_err(err_js)
}

#[derive(Serialize)]
struct MomentCurve {
    ks: Vec<u32>,
    mean_tr: Vec<f64>,
    sd_g: Vec<f64>,
    c: f64,
}

/// Closed-form mean and standard deviation of `tr S^k` for `k = 1..=k_max`
/// at the given (n, p).
#[wasm_bindgen]
pub fn clt_moment_curve(n: u32, p: u32, k_max: u32) -> Result<String, JsValue> {
    let params = MomentParams::new(n, p).map_err(err_js)?;
    let k_max = k_max.clamp(1, 12);
    let mut curve = MomentCurve {
        ks: Vec::new(),
        mean_tr: Vec::new(),
        sd_g: Vec::new(),
        c: params.c_f64(),
    };
    for k in 1..=k_max {
        curve.ks.push(k);
        curve
            .mean_tr
            .push(moments::mean_tr(params, k).map_err(err_js)?);
        curve
            .sd_g
            .push(moments::var_g(params, k).map_err(err_js)?.sqrt());
    }
    serde_json::to_string(&curve).map_err(err_js)
}

#[derive(Serialize)]
struct SimResponse {
    scenario: String,
    n: usize,
    p: usize,
    reps: u32,
    w2_values: Vec<f64>,
    w7_values: Vec<f64>,
    w2_reject_pct: f64,
    w6_reject_pct: f64,
    w7_reject_pct: f64,
    ks_distance_w2: f64,
}

/// Seeded mini Monte Carlo: samples W2/W6/W7 under a scenario and returns
/// the raw W2/W7 draws for histogramming plus rejection rates at 5%.
#[wasm_bindgen]
pub fn simulate_scenario(
    scenario: &str,
    n: usize,
    p: usize,
    k: u32,
    delta: f64,
    reps: u32,
    seed: u64,
) -> Result<String, JsValue> {
    let scenario: Scenario = scenario.parse().map_err(err_js)?;
    let reps = reps.clamp(1, 2000);
    let sampler = sim::ScenarioSampler::new(scenario, n, p).map_err(err_js)?;
    let params = MomentParams::new(n as u32, p as u32).map_err(err_js)?;
    let mean = moments::mean_tr(params, k).map_err(err_js)?;
    let var = moments::var_g(params, k).map_err(err_js)?;

    let mut resp = SimResponse {
        scenario: scenario.to_string(),
        n,
        p,
        reps,
        w2_values: Vec::with_capacity(reps as usize),
        w7_values: Vec::with_capacity(reps as usize),
        w2_reject_pct: 0.0,
        w6_reject_pct: 0.0,
        w7_reject_pct: 0.0,
        ks_distance_w2: 0.0,
    };
    let (mut rej2, mut rej6, mut rej7) = (0u32, 0u32, 0u32);
    for rep in 0..reps {
        let mut rng = sim::substream(seed, rep as u64);
        let data = sampler.sample(&mut rng);
        let s = rank::spearman_matrix(
            &rank::build_ensemble(&data, TiePolicy::Average).map_err(err_js)?,
        );
        let spectrum = Spectrum::of(s.matrix()).map_err(err_js)?;
        let w2 = stats::compute_w2_with_parts(
            &s,
            spectrum.trace_power(k),
            mean,
            var,
            &TestConfig::new(Statistic::W2).with_k(k),
        )
        .map_err(err_js)?;
        let w6 = stats::compute_w6(&s, &TestConfig::new(Statistic::W6)).map_err(err_js)?;
        let w7 = stats::compute_w7_from_parts(
            &s,
            &w2,
            &w6,
            &TestConfig::new(Statistic::W7).with_k(k).with_delta(delta),
        )
        .map_err(err_js)?;
        rej2 += w2.reject as u32;
        rej6 += w6.reject as u32;
        rej7 += w7.reject as u32;
        resp.w2_values.push(w2.value);
        resp.w7_values.push(w7.value);
    }
    resp.w2_reject_pct = 100.0 * rej2 as f64 / reps as f64;
    resp.w6_reject_pct = 100.0 * rej6 as f64 / reps as f64;
    resp.w7_reject_pct = 100.0 * rej7 as f64 / reps as f64;
    resp.ks_distance_w2 = null::ks_distance_std_normal(&resp.w2_values);
    serde_json::to_string(&resp).map_err(err_js)
}

/// Scenario ids for the page's dropdown.
#[wasm_bindgen]
pub fn describe_scenarios() -> String {
    let ids: Vec<String> = Scenario::ALL.iter().map(|s| s.to_string()).collect();
    serde_json::to_string(&ids).unwrap()
}
