//! Closed-form mean and covariance of the limiting Gaussian process for the
//! trace powers `tr S^k` of the rank correlation matrix, evaluated exactly
//! in rational arithmetic at finite `(n, p)`.
//!
//! With `c = n/p`, the mean expansion is the sum of four terms: a scaled
//! Marchenko-Pastur moment sum, a squared-binomial sum, a Catalan-style
//! correction, and `((1-sqrt(c))^(2k) + (1+sqrt(c))^(2k)) / 4`. The last
//! term is a polynomial in `c` (odd powers of `sqrt(c)` cancel), so the
//! whole expression stays rational; the single float conversion happens at
//! the very end.
//!
//! Convention note: the dimension ratio used throughout is `c = n/p`,
//! matching the limit statement and the simulation sections of the source
//! material (one statement in its abstract inverts the ratio; that reading
//! is rejected here).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const MAX_K: u32 = 20;

/// `C(a, b)` with the convention `C(a, b) = 0` for `b > a`.
pub(crate) fn binomial(a: u64, b: u64) -> BigInt {
    if b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..b {
        num *= BigInt::from(a - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Converts an exact rational to `f64` with a single rounding at roughly
/// `bits` significant bits (the default path uses 80).
fn to_f64_with_bits(r: &BigRational, bits: i64) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().abs();
    let shift = bits - (num.bits() as i64 - den.bits() as i64);
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let q = q.to_f64().unwrap_or(f64::INFINITY);
    let v = q * 2f64.powi((-shift).clamp(-2000, 2000) as i32);
    if neg {
        -v
    } else {
        v
    }
}

/// Exact rational to nearest `f64`.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    to_f64_with_bits(r, 80)
}

#[doc(hidden)]
pub fn ratio_to_f64_high_precision(r: &BigRational) -> f64 {
    to_f64_with_bits(r, 160)
}

/// Finite-size parameters of the rank correlation ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentParams {
    pub n: u32,
    pub p: u32,
}

impl MomentParams {
    pub fn new(n: u32, p: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewObservations {
                got: n as usize,
                min: 2,
            });
        }
        if p < 1 {
            return Err(Error::TooFewVariables {
                got: p as usize,
                min: 1,
            });
        }
        Ok(MomentParams { n, p })
    }

    /// Dimension ratio `c = n / p`, exact.
    pub fn c(&self) -> BigRational {
        ratio(self.n as i64, self.p as i64)
    }

    /// `(n - 1) / p`, the ratio entering the Marchenko-Pastur sum.
    pub fn c_tilde(&self) -> BigRational {
        ratio(self.n as i64 - 1, self.p as i64)
    }

    pub fn c_f64(&self) -> f64 {
        self.n as f64 / self.p as f64
    }
}

fn check_k(name: &'static str, k: u32) -> Result<()> {
    if !(1..=MAX_K).contains(&k) {
        return Err(Error::invalid(name, format!("{k} not in 1..={MAX_K}")));
    }
    Ok(())
}

/// k-th Marchenko-Pastur moment as a function of the dimension ratio:
/// `sum_{j=0}^{k-1} C(k,j) C(k-1,j) ratio^j / (j+1)`.
pub fn mp_moment_exact(k: u32, ratio: &BigRational) -> Result<BigRational> {
    check_k("k", k)?;
    let (k, mut acc) = (k as u64, BigRational::zero());
    let mut rpow = BigRational::one();
    for j in 0..k {
        let coeff = BigRational::new(binomial(k, j) * binomial(k - 1, j), BigInt::from(j + 1));
        acc += coeff * &rpow;
        rpow *= ratio;
    }
    Ok(acc)
}

pub fn mp_moment(k: u32, ratio_value: f64) -> Result<f64> {
    if !(ratio_value > 0.0) {
        return Err(Error::invalid(
            "ratio",
            format!("{ratio_value} must be > 0"),
        ));
    }
    let r = BigRational::from_float(ratio_value)
        .ok_or_else(|| Error::invalid("ratio", "not finite"))?;
    Ok(ratio_to_f64(&mp_moment_exact(k, &r)?))
}

/// Expected trace power `E tr S^k` at finite `(n, p)`, exact rational.
/// The `o(1)` remainder of the expansion is dropped.
pub fn mean_tr_exact(params: MomentParams, k: u32) -> Result<BigRational> {
    check_k("k", k)?;
    let n = BigInt::from(params.n);
    let c = params.c();
    let ku = k as u64;

    // n^k / (n-1)^(k-1) * MP moment sum at (n-1)/p
    let n_minus_1: BigInt = &n - BigInt::one();
    let term1 =
        BigRational::new(n.pow(k), n_minus_1.pow(k - 1)) * mp_moment_exact(k, &params.c_tilde())?;

    // -(1/2) sum_j C(k,j)^2 c^j
    let mut sum2 = BigRational::zero();
    let mut cpow = BigRational::one();
    for j in 0..=ku {
        let b = binomial(ku, j);
        sum2 += BigRational::from(&b * &b) * &cpow;
        cpow *= &c;
    }
    let term2 = -sum2 / BigRational::from(BigInt::from(2));

    // 2 c^(k+1) sum_j C(k,j) ((1-c)/c)^j [C(2k-j,k-1) - C(2k+1-j,k-1)]
    let x = (BigRational::one() - &c) / &c;
    let mut sum3 = BigRational::zero();
    let mut xpow = BigRational::one();
    for j in 0..=ku {
        let bracket = binomial(2 * ku - j, ku - 1) - binomial(2 * ku + 1 - j, ku - 1);
        sum3 += BigRational::from(binomial(ku, j) * bracket) * &xpow;
        xpow *= &x;
    }
    let two = BigRational::from(BigInt::from(2));
    let term3 = &two * pow_rational(&c, k + 1) * sum3;

    // ((1-sqrt(c))^(2k) + (1+sqrt(c))^(2k)) / 4 = (1/2) sum_j C(2k,2j) c^j
    let mut sum4 = BigRational::zero();
    let mut cpow = BigRational::one();
    for j in 0..=ku {
        sum4 += BigRational::from(binomial(2 * ku, 2 * j)) * &cpow;
        cpow *= &c;
    }
    let term4 = sum4 / two;

    Ok(term1 + term2 + term3 + term4)
}

pub fn mean_tr(params: MomentParams, k: u32) -> Result<f64> {
    Ok(ratio_to_f64(&mean_tr_exact(params, k)?))
}

fn pow_rational(r: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= r;
    }
    acc
}

/// Covariance `Cov(G_k1, G_k2)` of the limiting Gaussian process at
/// dimension ratio `c`, exact rational.
pub fn cov_g_exact(k1: u32, k2: u32, c: &BigRational) -> Result<BigRational> {
    check_k("k1", k1)?;
    check_k("k2", k2)?;
    if !c.is_positive() {
        return Err(Error::invalid("c", "dimension ratio must be > 0"));
    }
    let (a, b) = (k1 as u64, k2 as u64);
    let x = (BigRational::one() - c) / c;
    let two = BigRational::from(BigInt::from(2));

    // first double sum with the inner weighted product over l
    let mut s1 = BigRational::zero();
    for j1 in 0..a {
        for j2 in 0..=b {
            let mut inner = BigInt::zero();
            for l in 1..=(a - j1) {
                inner += BigInt::from(l)
                    * binomial(2 * a - 1 - (j1 + l), a - 1)
                    * binomial(2 * b - 1 - j2 + l, b - 1);
            }
            s1 += BigRational::from(binomial(a, j1) * binomial(b, j2) * inner)
                * pow_rational(&x, (j1 + j2) as u32);
        }
    }
    let first = &two * pow_rational(c, k1 + k2) * s1;

    // second double sum
    let mut s2 = BigRational::zero();
    for j1 in 0..=a {
        for j2 in 0..=b {
            s2 += BigRational::from(
                binomial(a, j1)
                    * binomial(b, j2)
                    * binomial(2 * a - j1, a - 1)
                    * binomial(2 * b - j2, b - 1),
            ) * pow_rational(&x, (j1 + j2) as u32);
        }
    }
    let second = two * pow_rational(c, k1 + k2 + 1) * s2;

    Ok(first - second)
}

pub fn cov_g(k1: u32, k2: u32, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::invalid("c", format!("{c} must be > 0")));
    }
    let cr = BigRational::from_float(c).ok_or_else(|| Error::invalid("c", "not finite"))?;
    Ok(ratio_to_f64(&cov_g_exact(k1, k2, &cr)?))
}

/// `Var(G_k) = Cov(G_k, G_k)` at `c = n/p`.
pub fn var_g(params: MomentParams, k: u32) -> Result<f64> {
    Ok(ratio_to_f64(&cov_g_exact(k, k, &params.c())?))
}

/// Precomputed mean/variance/covariance tables over a set of trace powers.
#[derive(Debug, Clone)]
pub struct CltMoments {
    pub params: MomentParams,
    pub mean_tr: BTreeMap<u32, f64>,
    pub var_g: BTreeMap<u32, f64>,
    pub cov_g: BTreeMap<(u32, u32), f64>,
}

impl CltMoments {
    pub fn compute(params: MomentParams, ks: &[u32]) -> Result<Self> {
        let c = params.c();
        let mut mean_tr = BTreeMap::new();
        let mut var = BTreeMap::new();
        let mut cov = BTreeMap::new();
        for &k in ks {
            mean_tr.insert(k, ratio_to_f64(&mean_tr_exact(params, k)?));
            var.insert(k, ratio_to_f64(&cov_g_exact(k, k, &c)?));
        }
        for &k1 in ks {
            for &k2 in ks {
                cov.insert((k1, k2), ratio_to_f64(&cov_g_exact(k1, k2, &c)?));
            }
        }
        Ok(CltMoments {
            params,
            mean_tr,
            var_g: var,
            cov_g: cov,
        })
    }
}
