//! Exact small-instance verification engine.
//!
//! Everything here is rational arithmetic with big integers: moments of the
//! normalized rank vector over the full permutation ensemble, joint
//! cumulants via the set-partition expansion
//! `C(x_1,...,x_N) = sum_pi (-1)^(#pi-1) (#pi-1)! E_pi`, and two
//! independent evaluations of the joint cumulants of trace powers of the
//! rank correlation matrix:
//!
//! * [`cumulant_tr_formula`] sums the even-partition/measurable-word
//!   expansion (the combinatorial trace-cumulant identity), and
//! * [`direct_cumulant_tr`] enumerates every one of the `(n!)^p` equally
//!   likely rank configurations outright.
//!
//! Agreement of the two on overlapping domains is the deepest correctness
//! check in the crate.

pub mod partition;

use std::cell::RefCell;
use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
pub use partition::{
    bell_number, even_partitions, four_two_partitions, partitions, perfect_matchings, Partition,
};

pub const MAX_MOMENT_N: usize = 8;
pub const MAX_TRACE_ORDER: u32 = 4;
pub const MAX_DIRECT_CONFIGS: u64 = 2_000_000;

fn factorial_big(m: usize) -> BigInt {
    (1..=m as u64).map(BigInt::from).product()
}

fn factorial_u64(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// Exact moments `E[Z_{l_1}^{a_1} ... Z_{l_m}^{a_m}]` of the normalized
/// rank vector on `n` items, for distinct indices `l_i`, by enumerating all
/// `n!` permutations. By exchangeability the value depends only on the
/// multiset of powers, which is the cache key.
#[derive(Debug)]
pub struct ExactMomentTable {
    n: usize,
    cache: RefCell<HashMap<Vec<u32>, BigRational>>,
}

impl ExactMomentTable {
    pub fn new(n: usize) -> Result<ExactMomentTable> {
        if !(2..=MAX_MOMENT_N).contains(&n) {
            return Err(Error::invalid(
                "n",
                format!("{n} not in 2..={MAX_MOMENT_N}"),
            ));
        }
        Ok(ExactMomentTable {
            n,
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Moment for one power per distinct index; powers must be positive and
    /// there can be at most `n` of them.
    pub fn moment(&self, powers: &[u32]) -> Result<BigRational> {
        if powers.is_empty() {
            return Ok(BigRational::one());
        }
        if powers.len() > self.n {
            return Err(Error::invalid(
                "powers",
                format!("{} distinct indices > n = {}", powers.len(), self.n),
            ));
        }
        if powers.iter().any(|&a| a == 0) {
            return Err(Error::invalid("powers", "zero power"));
        }
        let mut key: Vec<u32> = powers.to_vec();
        key.sort_unstable();
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute(&key);
        self.cache.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    fn compute(&self, powers: &[u32]) -> BigRational {
        let n = self.n as i64;
        let degree: u32 = powers.iter().sum();
        // Z_l = sqrt(12/(n^2-1)) (Q_l - (n+1)/2); work with the integer
        // 2 Q_l - n - 1 and apply the scale once at the end.
        let mut total: i128 = 0;
        for perm in (1..=n).permutations(n as usize) {
            let mut term: i128 = 1;
            for (l, &a) in powers.iter().enumerate() {
                let base = (2 * perm[l] - n - 1) as i128;
                term *= base.pow(a);
            }
            total += term;
        }
        if degree % 2 == 1 {
            // odd total degree vanishes by the Q -> n+1-Q symmetry; the
            // enumeration confirms it
            debug_assert_eq!(total, 0, "odd-degree moment must cancel exactly");
            return BigRational::zero();
        }
        if total == 0 {
            return BigRational::zero();
        }
        let half = degree / 2;
        let mut value = BigRational::new(BigInt::from(total), factorial_big(self.n));
        // (12 / (n^2 - 1))^(degree/2) / 2^degree
        value *= BigRational::new(
            BigInt::from(12).pow(half),
            BigInt::from(n * n - 1).pow(half),
        );
        value /= BigRational::from(BigInt::from(2).pow(degree));
        value
    }
}

/// `E[Z_{l_1}^{a_1} ... Z_{l_m}^{a_m}]` for mutually distinct indices
/// `l_i` in `1..=n`; the `spec` pairs are `(index, power)`.
pub fn exact_perm_moment(n: usize, spec: &[(usize, u32)]) -> Result<BigRational> {
    let table = ExactMomentTable::new(n)?;
    let mut seen = std::collections::BTreeSet::new();
    for &(idx, _) in spec {
        if idx == 0 || idx > n {
            return Err(Error::invalid(
                "spec",
                format!("index {idx} outside 1..={n}"),
            ));
        }
        if !seen.insert(idx) {
            return Err(Error::invalid("spec", format!("repeated index {idx}")));
        }
    }
    let powers: Vec<u32> = spec.iter().map(|&(_, a)| a).collect();
    table.moment(&powers)
}

/// Joint cumulant of `N` random variables from their mixed moments:
/// `moment_fn` receives a sorted list of positions in `1..=N` and must
/// return `E[prod over those positions]`.
pub fn joint_cumulant<F>(moment_fn: F, n: usize) -> Result<BigRational>
where
    F: Fn(&[usize]) -> BigRational,
{
    let mut total = BigRational::zero();
    for pi in partitions(n)? {
        let m = pi.num_blocks();
        let mut term = BigRational::from(factorial_big(m - 1));
        if (m - 1) % 2 == 1 {
            term = -term;
        }
        for block in pi.blocks() {
            term *= moment_fn(block);
            if term.is_zero() {
                break;
            }
        }
        total += term;
    }
    Ok(total)
}

/// The two perfect matchings that encode a product of trace powers: `pi0`
/// pairs consecutive positions `{2i-1, 2i}`, `pi1` links them cyclically
/// within each trace factor.
#[derive(Debug, Clone)]
pub struct MatchingPair {
    pub pi0: Partition,
    pub pi1: Partition,
}

impl MatchingPair {
    pub fn from_trace_powers(k_list: &[u32]) -> Result<MatchingPair> {
        if k_list.is_empty() || k_list.iter().any(|&k| k == 0) {
            return Err(Error::invalid("k_list", "powers must be positive"));
        }
        let k_total: u32 = k_list.iter().sum();
        let n2k = 2 * k_total as usize;
        let pi0_blocks: Vec<Vec<usize>> = (0..k_total as usize)
            .map(|i| vec![2 * i + 1, 2 * i + 2])
            .collect();
        let mut pi1_blocks = Vec::new();
        let mut base = 0usize; // 2 * (k_1 + ... + k_{i-1})
        for &kl in k_list {
            let kl = kl as usize;
            for l in 1..kl {
                pi1_blocks.push(vec![base + 2 * l, base + 2 * l + 1]);
            }
            pi1_blocks.push(vec![base + 2 * kl, base + 1]);
            base += 2 * kl;
        }
        Ok(MatchingPair {
            pi0: Partition::from_blocks(n2k, &pi0_blocks)?,
            pi1: Partition::from_blocks(n2k, &pi1_blocks)?,
        })
    }
}

/// Joint cumulant `C(tr S^{k_1}, ..., tr S^{k_r})` by the even-partition /
/// measurable-word expansion, exact in rational arithmetic.
///
/// The sum runs over partitions `pi` of the `2k` factor positions with all
/// blocks of even size (odd blocks vanish) that connect with `pi0 v pi1`,
/// weighted by `p^(-k + #(pi0 v pi))`; the inner sum ranges over
/// `pi1`-measurable index words with one free index per `pi1` block and
/// multiplies block cumulants of the rank vector.
pub fn cumulant_tr_formula(k_list: &[u32], n: usize, p: usize) -> Result<BigRational> {
    let k_total: u32 = k_list.iter().sum();
    if k_list.is_empty() || k_list.iter().any(|&k| k == 0) {
        return Err(Error::invalid("k_list", "powers must be positive"));
    }
    if k_total > MAX_TRACE_ORDER {
        return Err(Error::TooLarge {
            detail: format!("total trace order {k_total} > {MAX_TRACE_ORDER}"),
        });
    }
    if p == 0 {
        return Err(Error::TooFewVariables { got: 0, min: 1 });
    }
    let table = ExactMomentTable::new(n)?;
    let pair = MatchingPair::from_trace_powers(k_list)?;
    let n2k = 2 * k_total as usize;
    let pi01 = pair.pi0.join(&pair.pi1)?;
    debug_assert_eq!(pi01.num_blocks(), k_list.len());

    let pi1_blocks: Vec<Vec<usize>> = pair.pi1.blocks().to_vec();
    let free = pi1_blocks.len(); // = k_total
    let mut cumulant_cache: HashMap<Vec<u32>, BigRational> = HashMap::new();

    let mut total = BigRational::zero();
    for pi in partitions(n2k)? {
        if !pi.all_blocks_even() {
            continue;
        }
        if pi01.join(&pi)?.num_blocks() != 1 {
            continue;
        }
        let weight_exp = pair.pi0.join(&pi)?.num_blocks() as i32 - k_total as i32;
        let weight = BigRational::from(BigInt::from(p as i64)).pow(weight_exp);

        // sum over pi1-measurable words: one free index in 1..=n per block
        let mut word_sum = BigRational::zero();
        let mut assign = vec![1usize; free];
        let total_words = (n as u64).pow(free as u32);
        let mut word = vec![0usize; n2k];
        for _ in 0..total_words {
            for (b, &v) in pi1_blocks.iter().zip(&assign) {
                for &pos in b {
                    word[pos - 1] = v;
                }
            }
            let mut term = BigRational::one();
            for block in pi.blocks() {
                let vals: Vec<usize> = block.iter().map(|&pos| word[pos - 1]).collect();
                let cum = block_cumulant(&vals, &table, &mut cumulant_cache)?;
                term *= cum;
                if term.is_zero() {
                    break;
                }
            }
            word_sum += term;

            // odometer over the free indices
            let mut d = free;
            while d > 0 {
                d -= 1;
                if assign[d] < n {
                    assign[d] += 1;
                    for a in assign[d + 1..].iter_mut() {
                        *a = 1;
                    }
                    break;
                }
                assign[d] = 1;
            }
        }
        total += weight * word_sum;
    }
    Ok(total)
}

/// Cumulant of `(Z_{v_1}, ..., Z_{v_m})` where the `v_i` are arbitrary
/// (possibly repeated) indices. By exchangeability it depends only on the
/// multiset of index multiplicities, which keys the cache.
fn block_cumulant(
    vals: &[usize],
    table: &ExactMomentTable,
    cache: &mut HashMap<Vec<u32>, BigRational>,
) -> Result<BigRational> {
    let mut counts: HashMap<usize, u32> = HashMap::new();
    for &v in vals {
        *counts.entry(v).or_insert(0) += 1;
    }
    let mut pattern: Vec<u32> = counts.values().copied().collect();
    pattern.sort_unstable();
    if let Some(c) = cache.get(&pattern) {
        return Ok(c.clone());
    }
    // canonical representative word with this multiplicity pattern
    let mut canon: Vec<usize> = Vec::with_capacity(vals.len());
    for (idx, &mult) in pattern.iter().enumerate() {
        for _ in 0..mult {
            canon.push(idx + 1);
        }
    }
    let value = joint_cumulant(
        |positions| {
            let mut sub: HashMap<usize, u32> = HashMap::new();
            for &pos in positions {
                *sub.entry(canon[pos - 1]).or_insert(0) += 1;
            }
            let powers: Vec<u32> = sub.values().copied().collect();
            table
                .moment(&powers)
                .expect("moment table bounds checked upstream")
        },
        canon.len(),
    )?;
    cache.insert(pattern, value.clone());
    Ok(value)
}

/// Ground truth for [`cumulant_tr_formula`]: enumerates all `(n!)^p`
/// equally likely rank configurations, evaluates each `tr S^{k_i}` as an
/// exact rational, and assembles the joint cumulant of the resulting finite
/// distribution via the moment expansion over partitions of the `r`
/// variables.
pub fn direct_cumulant_tr(k_list: &[u32], n: usize, p: usize) -> Result<BigRational> {
    let r = k_list.len();
    if r == 0 || k_list.iter().any(|&k| k == 0) {
        return Err(Error::invalid("k_list", "powers must be positive"));
    }
    if !(2..=MAX_MOMENT_N).contains(&n) {
        return Err(Error::invalid(
            "n",
            format!("{n} not in 2..={MAX_MOMENT_N}"),
        ));
    }
    if p == 0 {
        return Err(Error::TooFewVariables { got: 0, min: 1 });
    }
    let nfact = factorial_u64(n);
    let configs = nfact
        .checked_pow(p as u32)
        .filter(|&c| c <= MAX_DIRECT_CONFIGS);
    let Some(total_configs) = configs else {
        return Err(Error::TooLarge {
            detail: format!("(n!)^p = {nfact}^{p} exceeds {MAX_DIRECT_CONFIGS}"),
        });
    };

    // centered doubled ranks of every permutation of [n]
    let perms: Vec<Vec<i64>> = (1..=n as i64)
        .permutations(n)
        .map(|perm| perm.iter().map(|&q| 2 * q - n as i64 - 1).collect())
        .collect();

    // accumulate sum over configurations of prod_{i in S} tr M^{k_i}
    // for every nonempty subset S of the r trace variables
    let subsets = (1usize << r) - 1;
    let mut sums: Vec<i128> = vec![0; subsets + 1];
    let mut choice = vec![0usize; p];
    for _ in 0..total_configs {
        let rows: Vec<&Vec<i64>> = choice.iter().map(|&c| &perms[c]).collect();
        // integer Gram matrix M[i][l] = <rows[i], rows[l]>
        let mut m = vec![0i128; p * p];
        for i in 0..p {
            for l in i..p {
                let mut acc = 0i64;
                for j in 0..n {
                    acc += rows[i][j] * rows[l][j];
                }
                m[i * p + l] = acc as i128;
                m[l * p + i] = acc as i128;
            }
        }
        let trs: Vec<i128> = k_list.iter().map(|&k| trace_int_power(&m, p, k)).collect();
        for s in 1..=subsets {
            let mut prod: i128 = 1;
            for (i, &t) in trs.iter().enumerate() {
                if s & (1 << i) != 0 {
                    prod *= t;
                }
            }
            sums[s] += prod;
        }
        // odometer over the p permutation choices
        let mut d = p;
        while d > 0 {
            d -= 1;
            if choice[d] + 1 < perms.len() {
                choice[d] += 1;
                for c in choice[d + 1..].iter_mut() {
                    *c = 0;
                }
                break;
            }
            choice[d] = 0;
        }
    }

    // scale: tr S^k = (3 / (p (n^2 - 1)))^k tr M^k
    let scale_base = BigRational::new(
        BigInt::from(3),
        BigInt::from(p as i64 * (n as i64 * n as i64 - 1)),
    );
    let count = BigInt::from(total_configs);
    let expectation = |s: usize| -> BigRational {
        let k_sum: u32 = k_list
            .iter()
            .enumerate()
            .filter(|(i, _)| s & (1 << i) != 0)
            .map(|(_, &k)| k)
            .sum();
        let mut scale = BigRational::one();
        for _ in 0..k_sum {
            scale *= &scale_base;
        }
        BigRational::new(BigInt::from(sums[s]), count.clone()) * scale
    };

    let mut total = BigRational::zero();
    for pi in partitions(r)? {
        let m = pi.num_blocks();
        let mut term = BigRational::from(factorial_big(m - 1));
        if (m - 1) % 2 == 1 {
            term = -term;
        }
        for block in pi.blocks() {
            let mask = block
                .iter()
                .fold(0usize, |acc, &pos| acc | (1 << (pos - 1)));
            term *= expectation(mask);
        }
        total += term;
    }
    Ok(total)
}

fn trace_int_power(m: &[i128], p: usize, k: u32) -> i128 {
    let mut cur = m.to_vec();
    for _ in 1..k {
        let mut next = vec![0i128; p * p];
        for i in 0..p {
            for t in 0..p {
                let a = cur[i * p + t];
                if a == 0 {
                    continue;
                }
                for l in 0..p {
                    next[i * p + l] += a * m[t * p + l];
                }
            }
        }
        cur = next;
    }
    (0..p).map(|i| cur[i * p + i]).sum()
}

#[doc(hidden)]
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// True when the rational is exactly the integer `v`.
pub fn rational_is(r: &BigRational, num: i64, den: i64) -> bool {
    *r == rational(num, den)
}
