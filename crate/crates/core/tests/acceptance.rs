//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `--nocapture`). Monte Carlo criteria run under the
//! pinned master seed 7 with the replication counts stated inline.
//!
//! Run with:
//!   cargo test -p spectrank --test acceptance -- --nocapture --test-threads=1

use num_rational::BigRational;
use num_traits::Zero;

use spectrank::cumulant::{
    cumulant_tr_formula, direct_cumulant_tr, exact_perm_moment, joint_cumulant, partitions,
    ExactMomentTable, Partition,
};
use spectrank::matrix::SquareMatrix;
use spectrank::moments::{self, MomentParams};
use spectrank::null;
use spectrank::rank::{self, DataMatrix, TiePolicy};
use spectrank::sim::{self, Scenario, SimConfig, StatChoice};
use spectrank::spectral::Spectrum;
use spectrank::stats::{self, NullDist, Sidedness, Statistic, TestConfig};

const SEED: u64 = 7;

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn gaussian_data(n: usize, p: usize, stream: u64) -> DataMatrix {
    let mut rng = sim::substream(SEED, stream);
    sim::generate(Scenario::H01, n, p, &mut rng).unwrap()
}

/// Criterion 1: exact rank/correlation invariants on 100 random tie-free
/// datasets across three shapes.
#[test]
fn criterion_1_exact_invariants() {
    let shapes = [(10usize, 5usize, 34u64), (60, 40, 33), (30, 50, 33)];
    let mut stream = 0u64;
    for &(n, p, count) in &shapes {
        for _ in 0..count {
            let data = gaussian_data(n, p, stream);
            stream += 1;
            let ens = rank::build_ensemble(&data, TiePolicy::Average).unwrap();
            assert!(!ens.any_ties(), "continuous draws must be tie-free");
            for i in 0..p {
                let row_sum: f64 = ens.x_row(i).iter().sum();
                assert!(row_sum.abs() <= 1e-12, "X row sum {row_sum}");
            }
            let s = rank::spearman_matrix(&ens);
            assert!(
                (s.matrix().trace() - n as f64).abs() <= 1e-10,
                "tr S = {} vs {n}",
                s.matrix().trace()
            );
            for i in 0..p {
                assert!((s.entry(i, i) - n as f64 / p as f64).abs() <= 1e-12);
                for j in (i + 1)..p {
                    let rho = s.rho(i, j);
                    assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&rho), "rho {rho}");
                }
            }
            // monotone-transform invariance of the ranks, bit-exact
            let mut mapped = data.clone();
            for i in 0..p {
                if i % 2 == 0 {
                    mapped.map_column(i, |v| v.exp());
                } else {
                    mapped.map_column(i, |v| v * v * v);
                }
            }
            let ens2 = rank::build_ensemble(&mapped, TiePolicy::Average).unwrap();
            for i in 0..p {
                assert_eq!(ens.rank_row(i), ens2.rank_row(i));
            }
        }
    }
    println!("ACCEPTANCE 1 exact-invariants: PASS");
}

/// Criterion 2: the exact permutation-ensemble moments reproduce the
/// rank-vector identities in rational arithmetic, and odd-total-degree
/// moments vanish for 20 random specs.
#[test]
fn criterion_2_exact_moment_oracle() {
    for n in 3..=8usize {
        let t = ExactMomentTable::new(n).unwrap();
        assert!(t.moment(&[1]).unwrap().is_zero(), "E Z != 0 at n={n}");
        assert_eq!(t.moment(&[2]).unwrap(), frac(1, 1), "E Z^2 != 1 at n={n}");
        assert_eq!(
            t.moment(&[1, 1]).unwrap(),
            frac(-1, n as i64 - 1),
            "Cov != -1/(n-1) at n={n}"
        );
    }
    // 20 odd-degree specs from a tiny deterministic generator
    let mut state = SEED;
    let mut next = move |m: u64| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) % m
    };
    for _ in 0..20 {
        let n = 3 + next(6) as usize; // 3..=8
        let m = 1 + next(3.min(n as u64 - 1)) as usize;
        let mut powers: Vec<u32> = (0..m).map(|_| 1 + next(4) as u32).collect();
        if powers.iter().sum::<u32>() % 2 == 0 {
            powers[0] += 1;
        }
        let spec: Vec<(usize, u32)> = powers
            .iter()
            .enumerate()
            .map(|(i, &a)| (i + 1, a))
            .collect();
        let v = exact_perm_moment(n, &spec).unwrap();
        assert!(v.is_zero(), "odd-degree moment {spec:?} at n={n} is {v}");
    }
    println!("ACCEPTANCE 2 exact-moment-oracle: PASS");
}

/// Criterion 3: the trace-cumulant formula equals full configuration
/// enumeration, as exact rationals, on every listed instance.
#[test]
fn criterion_3_formula_vs_enumeration() {
    let cases: [(&[u32], usize, usize); 5] = [
        (&[1], 4, 2),
        (&[2], 4, 2),
        (&[2], 5, 2),
        (&[1, 1], 4, 2),
        (&[2, 2], 4, 2),
    ];
    for (k_list, n, p) in cases {
        let f = cumulant_tr_formula(k_list, n, p).unwrap();
        let d = direct_cumulant_tr(k_list, n, p).unwrap();
        assert_eq!(f, d, "formula != enumeration at {k_list:?}, n={n}, p={p}");
    }
    println!("ACCEPTANCE 3 formula-vs-enumeration: PASS");
}

/// Criterion 4: CLT calibration at n = p = 200 over 2000 replications for
/// k in {2, 3, 4}: empirical mean within 3 SE of the closed form,
/// empirical variance within 10% of Var G_k, KS distance of standardized
/// W2 below 0.05.
#[test]
fn criterion_4_clt_calibration() {
    let (n, p, reps) = (200usize, 200usize, 2000usize);
    let ks = [2u32, 3, 4];
    let params = MomentParams::new(n as u32, p as u32).unwrap();
    let sampler = sim::ScenarioSampler::new(Scenario::H01, n, p).unwrap();
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); ks.len()];
    for rep in 0..reps {
        let mut rng = sim::substream(SEED, rep as u64);
        let data = sampler.sample(&mut rng);
        let s = rank::spearman_matrix(&rank::build_ensemble(&data, TiePolicy::Average).unwrap());
        let spectrum = Spectrum::of(s.matrix()).unwrap();
        for (ki, &k) in ks.iter().enumerate() {
            samples[ki].push(spectrum.trace_power(k));
        }
    }
    for (ki, &k) in ks.iter().enumerate() {
        let vals = &samples[ki];
        let mean_hat: f64 = vals.iter().sum::<f64>() / reps as f64;
        let var_hat: f64 =
            vals.iter().map(|v| (v - mean_hat).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let mean_th = moments::mean_tr(params, k).unwrap();
        let var_th = moments::var_g(params, k).unwrap();
        let se = (var_hat / reps as f64).sqrt();
        println!(
            "  k={k}: mean {mean_hat:.3} vs {mean_th:.3} (3se = {:.3}); var {var_hat:.2} vs {var_th:.2} (ratio {:.3})",
            3.0 * se,
            var_hat / var_th
        );
        assert!(
            (mean_hat - mean_th).abs() <= 3.0 * se,
            "k={k}: mean off by {} > 3se {}",
            (mean_hat - mean_th).abs(),
            3.0 * se
        );
        assert!(
            (var_hat / var_th - 1.0).abs() <= 0.10,
            "k={k}: variance ratio {}",
            var_hat / var_th
        );
        let standardized: Vec<f64> = vals.iter().map(|v| (v - mean_th) / var_th.sqrt()).collect();
        let ks_dist = null::ks_distance_std_normal(&standardized);
        println!("  k={k}: KS distance {ks_dist:.4}");
        assert!(ks_dist < 0.05, "k={k}: KS {ks_dist}");
    }
    println!("ACCEPTANCE 4 clt-calibration: PASS");
}

struct Cell {
    label: &'static str,
    scenario: Scenario,
    n: usize,
    p: usize,
    statistic: Statistic,
    target: f64,
    tol: f64,
    // one-sided bounds expressed as (min, max) when the criterion says ">= x"
    min_only: bool,
}

fn run_rank_cell(scenario: Scenario, n: usize, p: usize, reps: u32) -> Vec<(Statistic, f64)> {
    let cfg = SimConfig::new(scenario, n, p)
        .with_reps(reps)
        .with_seed(SEED);
    let res = sim::run(&cfg).unwrap();
    res.outcomes
        .iter()
        .map(|o| (o.statistic, o.rate_pct.unwrap()))
        .collect()
}

/// Criterion 5: reproduction of the headline size/power table at
/// (60,40) with 1000 replications, seed pinned, k = 4, delta = 0.5,
/// default sidedness; plus the structural W4-undefined check at (120,160).
#[test]
fn criterion_5_table1_reproduction() {
    let cells = [
        Cell {
            label: "h01 size",
            scenario: Scenario::H01,
            n: 60,
            p: 40,
            statistic: Statistic::W2,
            target: 4.0,
            tol: 2.0,
            min_only: false,
        },
        Cell {
            label: "h01 size",
            scenario: Scenario::H01,
            n: 60,
            p: 40,
            statistic: Statistic::W6,
            target: 3.2,
            tol: 1.5,
            min_only: false,
        },
        Cell {
            label: "h01 size",
            scenario: Scenario::H01,
            n: 60,
            p: 40,
            statistic: Statistic::W7,
            target: 4.5,
            tol: 2.0,
            min_only: false,
        },
        Cell {
            label: "ha11 power",
            scenario: Scenario::Ha11,
            n: 60,
            p: 40,
            statistic: Statistic::W6,
            target: 99.0,
            tol: 0.0,
            min_only: true,
        },
        Cell {
            label: "ha11 power",
            scenario: Scenario::Ha11,
            n: 60,
            p: 40,
            statistic: Statistic::W7,
            target: 92.9,
            tol: 4.0,
            min_only: false,
        },
        Cell {
            label: "ha12 power",
            scenario: Scenario::Ha12,
            n: 60,
            p: 40,
            statistic: Statistic::W2,
            target: 97.0,
            tol: 0.0,
            min_only: true,
        },
        Cell {
            label: "ha12 power",
            scenario: Scenario::Ha12,
            n: 60,
            p: 40,
            statistic: Statistic::W7,
            target: 97.0,
            tol: 0.0,
            min_only: true,
        },
        Cell {
            label: "ha12 power",
            scenario: Scenario::Ha12,
            n: 60,
            p: 40,
            statistic: Statistic::W6,
            target: 18.0,
            tol: 5.0,
            min_only: false,
        },
        Cell {
            label: "h02 size",
            scenario: Scenario::H02,
            n: 60,
            p: 40,
            statistic: Statistic::W2,
            target: 4.7,
            tol: 2.0,
            min_only: false,
        },
        Cell {
            label: "h02 size",
            scenario: Scenario::H02,
            n: 60,
            p: 40,
            statistic: Statistic::W6,
            target: 1.9,
            tol: 1.5,
            min_only: false,
        },
        Cell {
            label: "h02 size",
            scenario: Scenario::H02,
            n: 60,
            p: 40,
            statistic: Statistic::W7,
            target: 4.9,
            tol: 2.0,
            min_only: false,
        },
    ];
    let mut rates: std::collections::HashMap<(Scenario, Statistic), f64> =
        std::collections::HashMap::new();
    for scenario in [Scenario::H01, Scenario::Ha11, Scenario::Ha12, Scenario::H02] {
        for (stat, rate) in run_rank_cell(scenario, 60, 40, 1000) {
            rates.insert((scenario, stat), rate);
        }
    }
    let mut failures = Vec::new();
    for cell in &cells {
        let rate = rates[&(cell.scenario, cell.statistic)];
        let ok = if cell.min_only {
            rate >= cell.target
        } else {
            (rate - cell.target).abs() <= cell.tol
        };
        let expect = if cell.min_only {
            format!(">= {}", cell.target)
        } else {
            format!("{} +/- {}", cell.target, cell.tol)
        };
        println!(
            "  [{}] {} {} @({},{}): measured {rate:.2}%, expected {expect}",
            if ok { "PASS" } else { "FAIL" },
            cell.label,
            cell.statistic,
            cell.n,
            cell.p,
        );
        if !ok {
            failures.push(format!(
                "{} {}: {rate:.2}% vs {expect}",
                cell.label, cell.statistic
            ));
        }
    }

    // Sidedness is an open question for the normal-limit statistics; the
    // default gate above is two-sided. Record the upper-sided rates too so
    // the run documents which convention tracks the published table best.
    for scenario in [Scenario::H01, Scenario::H02, Scenario::Ha11] {
        let stats_upper = vec![
            StatChoice {
                statistic: Statistic::W2,
                k: 4,
                delta: 0.5,
                sidedness: Some(Sidedness::Upper),
            },
            StatChoice {
                statistic: Statistic::W7,
                k: 4,
                delta: 0.5,
                sidedness: Some(Sidedness::Upper),
            },
        ];
        let cfg = SimConfig::new(scenario, 60, 40)
            .with_reps(1000)
            .with_seed(SEED)
            .with_stats(stats_upper);
        let res = sim::run(&cfg).unwrap();
        println!(
            "  [recorded] {scenario} upper-sided: W2 {:.2}%, W7 {:.2}%",
            res.outcomes[0].rate_pct.unwrap(),
            res.outcomes[1].rate_pct.unwrap()
        );
    }

    // W4 at (120,160) must report itself undefined
    let data = gaussian_data(120, 160, 9001);
    let err = stats::compute_reference(&data, &TestConfig::new(Statistic::W4)).unwrap_err();
    let undefined = matches!(err, spectrank::Error::Undefined { .. });
    println!(
        "  [{}] W4 @(120,160) reports Undefined",
        if undefined { "PASS" } else { "FAIL" }
    );
    assert!(undefined);

    if failures.is_empty() {
        println!("ACCEPTANCE 5 table1-reproduction: PASS");
    } else {
        println!(
            "ACCEPTANCE 5 table1-reproduction: FAIL ({})",
            failures.len()
        );
        panic!(
            "table-1 cells outside published tolerances (seed {SEED}, 1000 reps): {}",
            failures.join("; ")
        );
    }
}

/// Criterion 6: tuning-sensitivity spot cells at (60,40), k = 4: sizes at
/// delta in {0.3, 0.4, 0.5} (with the monotone trend) and power at 0.5.
#[test]
fn criterion_6_table23_spot_cells() {
    let stats: Vec<StatChoice> = [0.3, 0.4, 0.5]
        .iter()
        .map(|&d| StatChoice::new(Statistic::W7).with_k(4).with_delta(d))
        .collect();
    let size_cfg = SimConfig::new(Scenario::H01, 60, 40)
        .with_reps(1000)
        .with_seed(SEED)
        .with_stats(stats.clone());
    let sizes: Vec<f64> = sim::run(&size_cfg)
        .unwrap()
        .outcomes
        .iter()
        .map(|o| o.rate_pct.unwrap())
        .collect();
    println!(
        "  W7 sizes at delta 0.3/0.4/0.5: {:.2}% / {:.2}% / {:.2}%",
        sizes[0], sizes[1], sizes[2]
    );
    assert!(
        (sizes[0] - 19.0).abs() <= 4.0,
        "delta=0.3 size {} vs 19 +/- 4",
        sizes[0]
    );
    assert!(
        (sizes[2] - 6.0).abs() <= 2.5,
        "delta=0.5 size {} vs 6 +/- 2.5",
        sizes[2]
    );
    // monotone nonincreasing across the sweep, with a one-point slack for
    // Monte Carlo noise
    assert!(
        sizes[0] + 1.0 >= sizes[1] && sizes[1] + 1.0 >= sizes[2],
        "{sizes:?}"
    );

    let power_cfg = SimConfig::new(Scenario::Ha11, 60, 40)
        .with_reps(1000)
        .with_seed(SEED)
        .with_stats(vec![StatChoice::new(Statistic::W7)]);
    let power = sim::run(&power_cfg).unwrap().outcomes[0].rate_pct.unwrap();
    println!("  W7 power at delta 0.5: {power:.2}%");
    assert!((power - 92.9).abs() <= 4.0, "power {power} vs 92.9 +/- 4");
    println!("ACCEPTANCE 6 table23-spot-cells: PASS");
}

/// Criterion 7: W1 checked structurally against a direct transcription;
/// its Monte Carlo size is reported without a hard gate because the
/// Tracy-Widom quantiles are table-derived.
#[test]
fn criterion_7_w1_structural() {
    for i in 0..10u64 {
        let data = gaussian_data(35, 12, 5000 + i);
        let rep = stats::compute_reference(&data, &TestConfig::new(Statistic::W1)).unwrap();
        let r = rank::pearson_matrix(&data).unwrap();
        let lmax = spectrank::spectral::largest_eigenvalue(r.matrix()).unwrap();
        let (nf, pf) = (35.0f64, 12.0f64);
        let direct = (nf * lmax - (pf.sqrt() + nf.sqrt()).powi(2))
            / ((nf.sqrt() + pf.sqrt()) * (1.0 / pf.sqrt() + 1.0 / nf.sqrt()).powf(1.0 / 3.0));
        assert!(
            (rep.value - direct).abs() <= 1e-10,
            "transcription mismatch {} vs {direct}",
            rep.value
        );
    }
    let cfg = SimConfig::new(Scenario::H01, 60, 40)
        .with_reps(1000)
        .with_seed(SEED)
        .with_stats(vec![StatChoice::new(Statistic::W1)]);
    let size = sim::run(&cfg).unwrap().outcomes[0].rate_pct.unwrap();
    println!(
        "  W1 measured size at (60,40): {size:.2}% (published range across shapes: 0.4-1.7%, not gated)"
    );
    println!("ACCEPTANCE 7 w1-structural: PASS");
}

/// Criterion 8: property suite - partition join laws exhaustively up to
/// N = 6, cumulant multilinearity and independence vanishing, PSD of the
/// covariance kernel, p-value monotonicity, and bit-identical results
/// across thread counts.
#[test]
fn criterion_8_property_suite() {
    // join laws, exhaustive N <= 6 (associativity included)
    for n in 2..=6usize {
        let all: Vec<Partition> = partitions(n).unwrap().collect();
        for a in &all {
            assert_eq!(a.join(a).unwrap(), *a);
            for b in &all {
                let ab = a.join(b).unwrap();
                assert_eq!(ab, b.join(a).unwrap());
                assert!(ab.num_blocks() <= a.num_blocks().min(b.num_blocks()));
                for c in &all {
                    assert_eq!(ab.join(c).unwrap(), a.join(&b.join(c).unwrap()).unwrap());
                }
            }
        }
    }
    println!("  join laws exhaustive to N=6: ok");

    // multilinearity and independent-split vanishing (N <= 6)
    for n in 1..=6usize {
        let base = |pos: &[usize]| frac(1, 1 + pos.len() as i64);
        let scaled = |pos: &[usize]| {
            let v = base(pos);
            if pos.contains(&1) {
                v * frac(7, 3)
            } else {
                v
            }
        };
        let c = joint_cumulant(base, n).unwrap();
        let cs = joint_cumulant(scaled, n).unwrap();
        assert_eq!(cs, c * frac(7, 3));
    }
    for n in 2..=6usize {
        for s in 1..n {
            let product_form = |pos: &[usize]| {
                let a = pos.iter().filter(|&&x| x <= s).count() as i64;
                let b = pos.len() as i64 - a;
                frac(1, 1 + a * a) * frac(2, 2 + b)
            };
            assert!(joint_cumulant(product_form, n).unwrap().is_zero());
        }
    }
    println!("  cumulant multilinearity + independence vanishing: ok");

    // covariance kernel PSD over k, k' <= 8 for a spread of ratios
    for c in [frac(1, 4), frac(1, 2), frac(1, 1), frac(2, 1), frac(4, 1)] {
        let kmax = 8usize;
        let mut gram = SquareMatrix::zeros(kmax);
        for k1 in 1..=kmax {
            for k2 in 1..=kmax {
                let v =
                    moments::ratio_to_f64(&moments::cov_g_exact(k1 as u32, k2 as u32, &c).unwrap());
                gram.set(k1 - 1, k2 - 1, v);
            }
        }
        let spectrum = Spectrum::of(&gram).unwrap();
        let min = spectrum.lambda_min();
        let max = spectrum.lambda_max();
        assert!(min >= -1e-8 * max.max(1.0), "c={c}: min eigenvalue {min}");
    }
    println!("  covariance kernel PSD (k <= 8): ok");

    // p-value monotonicity under upper sidedness for all four nulls
    for dist in [
        NullDist::StdNormal,
        NullDist::TracyWidom1,
        NullDist::GumbelW5 { ratio: 1.5 },
        NullDist::GumbelW6,
    ] {
        let mut prev = f64::INFINITY;
        for i in -80..=80 {
            let v = i as f64 / 8.0;
            let pv = stats::p_value(v, &dist, Sidedness::Upper).unwrap();
            assert!((0.0..=1.0).contains(&pv.p));
            assert!(pv.p <= prev + 1e-15);
            prev = pv.p;
        }
    }
    println!("  p-value monotonicity: ok");

    // reproducibility: same config and seed, different thread counts
    let cfg = SimConfig::new(Scenario::Ha11, 40, 12)
        .with_reps(80)
        .with_seed(SEED);
    let pool1 = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let pool3 = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    let r1 = pool1.install(|| sim::run(&cfg)).unwrap();
    let r3 = pool3.install(|| sim::run(&cfg)).unwrap();
    assert_eq!(r1.outcomes, r3.outcomes);
    assert_eq!(r1.master_seed, r3.master_seed);
    println!("  thread-count invariance: ok");

    println!("ACCEPTANCE 8 property-suite: PASS");
}
