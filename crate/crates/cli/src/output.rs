//! Rendering of reports and simulation results as JSON, CSV, or an aligned
//! text table. JSON uses sorted keys throughout, so identical inputs give
//! byte-identical output.

use serde::Serialize;
use spectrank::rank::DataMatrix;
use spectrank::sim::SimResult;
use spectrank::stats::{Statistic, TestReport};

use crate::{AnyError, Format};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize)]
struct TestEnvelope<'a> {
    schema: &'static str,
    n: usize,
    p: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    variables: Option<&'a [String]>,
    ties_detected: bool,
    reports: &'a [TestReport],
    undefined: Vec<UndefinedEntry>,
}

#[derive(Serialize)]
struct UndefinedEntry {
    statistic: String,
    reason: String,
}

pub fn render_test(
    reports: &[TestReport],
    undefined: &[(Statistic, String)],
    data: &DataMatrix,
    variables: Option<&[String]>,
    ties: bool,
    format: Format,
) -> Result<String, AnyError> {
    match format {
        Format::Json => {
            let env = TestEnvelope {
                schema: SCHEMA_VERSION,
                n: data.n(),
                p: data.p(),
                variables,
                ties_detected: ties,
                reports,
                undefined: undefined
                    .iter()
                    .map(|(s, r)| UndefinedEntry {
                        statistic: s.to_string(),
                        reason: r.clone(),
                    })
                    .collect(),
            };
            Ok(serde_json::to_string_pretty(&env)? + "\n")
        }
        Format::Csv => {
            let mut out = String::from("statistic,value,p_value,reject,null,sidedness\n");
            for r in reports {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.statistic,
                    r.value,
                    r.p_value,
                    r.reject,
                    null_name(r),
                    sidedness_name(r),
                ));
            }
            for (s, reason) in undefined {
                out.push_str(&format!("{s},,,undefined,,\"{reason}\"\n"));
            }
            Ok(out)
        }
        Format::Table => {
            let mut out = format!(
                "{:<5} {:>14} {:>12} {:>7}  {:<12} {}\n",
                "stat", "value", "p-value", "reject", "null", "sidedness"
            );
            for r in reports {
                out.push_str(&format!(
                    "{:<5} {:>14.6} {:>12.6} {:>7}  {:<12} {}\n",
                    r.statistic.to_string(),
                    r.value,
                    r.p_value,
                    r.reject,
                    null_name(r),
                    sidedness_name(r),
                ));
            }
            for (s, reason) in undefined {
                out.push_str(&format!("{s:<5} undefined: {reason}\n"));
            }
            Ok(out)
        }
    }
}

fn null_name(r: &TestReport) -> &'static str {
    use spectrank::stats::NullDist;
    match r.null_dist {
        NullDist::StdNormal => "std_normal",
        NullDist::TracyWidom1 => "tracy_widom1",
        NullDist::GumbelW5 { .. } => "gumbel_w5",
        NullDist::GumbelW6 => "gumbel_w6",
    }
}

fn sidedness_name(r: &TestReport) -> &'static str {
    use spectrank::stats::Sidedness;
    match r.sidedness {
        Sidedness::Upper => "upper",
        Sidedness::TwoSided => "two_sided",
    }
}

pub fn render_sim(results: &[SimResult], format: Format) -> Result<String, AnyError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(results)? + "\n"),
        Format::Csv => {
            let mut out =
                String::from("scenario,n,p,statistic,k,delta,rate_pct,se_pct,reps,seed\n");
            for res in results {
                if let Some(err) = &res.error {
                    out.push_str(&format!(
                        "{},{},{},error,,,,,{},{} # {}\n",
                        res.scenario, res.n, res.p, res.replications, res.master_seed, err
                    ));
                    continue;
                }
                for o in &res.outcomes {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        res.scenario,
                        res.n,
                        res.p,
                        o.statistic,
                        o.k.map(|k| k.to_string()).unwrap_or_default(),
                        o.delta.map(|d| d.to_string()).unwrap_or_default(),
                        o.rate_pct.map(|r| format!("{r:.2}")).unwrap_or_default(),
                        o.se_pct.map(|s| format!("{s:.2}")).unwrap_or_default(),
                        res.replications,
                        res.master_seed,
                    ));
                }
            }
            Ok(out)
        }
        Format::Table => {
            let mut out = format!(
                "{:<9} {:>5} {:>5} {:<5} {:>3} {:>5} {:>9} {:>7}\n",
                "scenario", "n", "p", "stat", "k", "delta", "rate%", "se%"
            );
            for res in results {
                if let Some(err) = &res.error {
                    out.push_str(&format!(
                        "{:<9} {:>5} {:>5} error: {err}\n",
                        res.scenario.to_string(),
                        res.n,
                        res.p
                    ));
                    continue;
                }
                for o in &res.outcomes {
                    out.push_str(&format!(
                        "{:<9} {:>5} {:>5} {:<5} {:>3} {:>5} {:>9} {:>7}\n",
                        res.scenario.to_string(),
                        res.n,
                        res.p,
                        o.statistic.to_string(),
                        o.k.map(|k| k.to_string()).unwrap_or_default(),
                        o.delta.map(|d| d.to_string()).unwrap_or_default(),
                        o.rate_pct
                            .map(|r| format!("{r:.2}"))
                            .unwrap_or_else(|| "-".into()),
                        o.se_pct
                            .map(|s| format!("{s:.2}"))
                            .unwrap_or_else(|| "-".into()),
                    ));
                }
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
pub struct MomentRecord {
    pub quantity: &'static str,
    pub n: u32,
    pub p: u32,
    pub k1: u32,
    pub k2: Option<u32>,
    pub value: f64,
}

pub fn render_moments(records: &[MomentRecord], format: Format) -> Result<String, AnyError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(records)? + "\n"),
        Format::Csv => {
            let mut out = String::from("quantity,n,p,k1,k2,value\n");
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.quantity,
                    r.n,
                    r.p,
                    r.k1,
                    r.k2.map(|k| k.to_string()).unwrap_or_default(),
                    r.value
                ));
            }
            Ok(out)
        }
        Format::Table => {
            let mut out = String::new();
            for r in records {
                let ks = match r.k2 {
                    Some(k2) => format!("k1={} k2={k2}", r.k1),
                    None => format!("k={}", r.k1),
                };
                out.push_str(&format!(
                    "{} (n={}, p={}, {}) = {}\n",
                    r.quantity, r.n, r.p, ks, r.value
                ));
            }
            Ok(out)
        }
    }
}

pub fn emit(body: &str, out: Option<&str>) -> Result<(), AnyError> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| format!("{path}: {e}").into()),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
