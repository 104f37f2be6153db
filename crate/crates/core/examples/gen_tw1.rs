//! Regenerates the Tracy-Widom (type 1) quantile table shipped in
//! `data/tw1_quantiles.txt`.
//!
//! Samples the largest eigenvalue of the GOE via its symmetric tridiagonal
//! model in the Wigner normalization (diagonal N(0,2), off-diagonal
//! chi_{n-i}; same joint eigenvalue law as the dense ensemble with unit
//! off-diagonal variance), classically centered and scaled:
//! `(lambda_1 - 2 sqrt(n)) n^(1/6)`. The largest eigenvalue of the
//! tridiagonal matrix is found by Sturm-count bisection, so the whole run
//! takes seconds rather than hours.
//!
//! Usage: cargo run --release -p spectrank --example gen_tw1 -- [OUT_PATH]

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

const MATRIX_SIZE: usize = 600;
const REPLICATIONS: usize = 50_000;
const SEED: u64 = 20240601;

const PROBS: [f64; 17] = [
    0.010, 0.025, 0.050, 0.100, 0.200, 0.300, 0.400, 0.500, 0.600, 0.700, 0.800, 0.900, 0.950,
    0.975, 0.990, 0.995, 0.999,
];

/// Number of eigenvalues of the symmetric tridiagonal (d, e) strictly less
/// than x, by the Sturm sequence of the LDL^T recurrence.
fn count_below(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let denom = if q == 0.0 { 1e-300 } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn largest_eigenvalue_tridiag(d: &[f64], e: &[f64]) -> f64 {
    let n = d.len();
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r =
            if i == 0 { 0.0 } else { e[i - 1].abs() } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if count_below(d, e, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn main() {
    let out_path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/core/data/tw1_quantiles.txt".into());
    let mut rng = ChaCha12Rng::seed_from_u64(SEED);
    let n = MATRIX_SIZE;

    let chis: Vec<ChiSquared<f64>> = (1..n)
        .map(|i| ChiSquared::new((n - i) as f64).unwrap())
        .collect();

    let mut samples = Vec::with_capacity(REPLICATIONS);
    let scale = (n as f64).powf(1.0 / 6.0);
    let center = 2.0 * (n as f64).sqrt();
    for rep in 0..REPLICATIONS {
        let d: Vec<f64> = (0..n)
            .map(|_| std::f64::consts::SQRT_2 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let e: Vec<f64> = chis.iter().map(|c| c.sample(&mut rng).sqrt()).collect();
        let lmax = largest_eigenvalue_tridiag(&d, &e);
        samples.push((lmax - center) * scale);
        if (rep + 1) % 10_000 == 0 {
            eprintln!("{} / {REPLICATIONS}", rep + 1);
        }
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut out = String::new();
    out.push_str("# Tracy-Widom (type 1) quantiles: probability  quantile\n");
    out.push_str(&format!(
        "# Monte Carlo over GOE tridiagonal-model spectra: n={MATRIX_SIZE}, reps={REPLICATIONS}, chacha12 seed={SEED}\n"
    ));
    out.push_str(&format!(
        "# centered/scaled classically: (lambda_max - 2 sqrt(n)) n^(1/6); sample mean {:.4}, sd {:.4}\n",
        samples.iter().sum::<f64>() / samples.len() as f64,
        {
            let m = samples.iter().sum::<f64>() / samples.len() as f64;
            (samples.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / (samples.len() - 1) as f64)
                .sqrt()
        }
    ));
    for &prob in &PROBS {
        // type-7 empirical quantile (linear interpolation)
        let h = prob * (samples.len() - 1) as f64;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        let q = if lo + 1 < samples.len() {
            samples[lo] * (1.0 - frac) + samples[lo + 1] * frac
        } else {
            samples[lo]
        };
        out.push_str(&format!("{prob:.3} {q:.6}\n"));
    }
    let mut f = std::fs::File::create(&out_path).expect("create output file");
    f.write_all(out.as_bytes()).expect("write table");
    eprintln!("wrote {out_path}");
}
