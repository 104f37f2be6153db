//! The `verify` subcommand: exact-arithmetic oracle suite with one
//! pass/fail line per check. Exit 0 iff everything passes.

use std::process::ExitCode;

use spectrank::cumulant::{
    bell_number, cumulant_tr_formula, direct_cumulant_tr, exact_perm_moment, joint_cumulant,
    partitions, perfect_matchings, ExactMomentTable, Partition,
};

use crate::AnyError;

struct Suite {
    failures: u32,
}

impl Suite {
    fn check(&mut self, name: &str, run: impl FnOnce() -> Result<bool, String>) {
        match run() {
            Ok(true) => println!("PASS {name}"),
            Ok(false) => {
                println!("FAIL {name}");
                self.failures += 1;
            }
            Err(e) => {
                println!("FAIL {name}: {e}");
                self.failures += 1;
            }
        }
    }
}

fn rational(n: i64, d: i64) -> num_rational::BigRational {
    num_rational::BigRational::new(n.into(), d.into())
}

pub fn cmd_verify(max_n: usize) -> Result<ExitCode, AnyError> {
    if !(3..=8).contains(&max_n) {
        return Err("--max-n must be in 3..=8".into());
    }
    let mut suite = Suite { failures: 0 };

    suite.check("partition counts match Bell numbers (N <= 7)", || {
        let bell = [1u64, 1, 2, 5, 15, 52, 203, 877];
        for n in 1..=7usize {
            if partitions(n).map_err(|e| e.to_string())?.count() as u64 != bell[n] {
                return Ok(false);
            }
            if bell_number(n) != bell[n] {
                return Ok(false);
            }
        }
        Ok(true)
    });

    suite.check("perfect matching counts are (N-1)!! (N <= 8)", || {
        for (n, want) in [(2usize, 1usize), (4, 3), (6, 15), (8, 105)] {
            if perfect_matchings(n).map_err(|e| e.to_string())?.len() != want {
                return Ok(false);
            }
        }
        Ok(true)
    });

    suite.check(
        "join worked example {{1,2},{3,4,5},{6},{7,8}} v {{1,3},{2,5},{4},{6,8},{7}}",
        || {
            let a = Partition::from_blocks(8, &[vec![1, 2], vec![3, 4, 5], vec![6], vec![7, 8]])
                .map_err(|e| e.to_string())?;
            let b =
                Partition::from_blocks(8, &[vec![1, 3], vec![2, 5], vec![4], vec![6, 8], vec![7]])
                    .map_err(|e| e.to_string())?;
            let want = Partition::from_blocks(8, &[vec![1, 2, 3, 4, 5], vec![6, 7, 8]])
                .map_err(|e| e.to_string())?;
            Ok(a.join(&b).map_err(|e| e.to_string())? == want)
        },
    );

    suite.check(
        "join laws: commutative, associative, idempotent (N <= 5 exhaustive)",
        || {
            for n in 2..=5usize {
                let all: Vec<Partition> = partitions(n).map_err(|e| e.to_string())?.collect();
                for a in &all {
                    if a.join(a).map_err(|e| e.to_string())? != *a {
                        return Ok(false);
                    }
                    for b in &all {
                        let ab = a.join(b).map_err(|e| e.to_string())?;
                        if ab != b.join(a).map_err(|e| e.to_string())? {
                            return Ok(false);
                        }
                        if ab.num_blocks() > a.num_blocks().min(b.num_blocks()) {
                            return Ok(false);
                        }
                        for c in &all {
                            let left = ab.join(c).map_err(|e| e.to_string())?;
                            let right = a
                                .join(&b.join(c).map_err(|e| e.to_string())?)
                                .map_err(|e| e.to_string())?;
                            if left != right {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
            Ok(true)
        },
    );

    suite.check(
        "cumulant expansion: C(xi) = E xi and C(xi1, xi2) = Cov",
        || {
            let mean = joint_cumulant(|_| rational(5, 7), 1).map_err(|e| e.to_string())?;
            if mean != rational(5, 7) {
                return Ok(false);
            }
            let moment = |pos: &[usize]| match pos {
                [1] => rational(1, 2),
                [2] => rational(1, 3),
                _ => rational(1, 4),
            };
            let cov = joint_cumulant(moment, 2).map_err(|e| e.to_string())?;
            Ok(cov == rational(1, 4) - rational(1, 6))
        },
    );

    suite.check(
        "cumulant multilinearity and independent-split vanishing (N <= 6)",
        || {
            for n in 1..=6usize {
                let base = |pos: &[usize]| rational(1, 1 + pos.len() as i64);
                let scaled = |pos: &[usize]| {
                    let v = base(pos);
                    if pos.contains(&1) {
                        v * rational(3, 5)
                    } else {
                        v
                    }
                };
                let c = joint_cumulant(base, n).map_err(|e| e.to_string())?;
                let cs = joint_cumulant(scaled, n).map_err(|e| e.to_string())?;
                if cs != c * rational(3, 5) {
                    return Ok(false);
                }
            }
            for n in 2..=6usize {
                for s in 1..n {
                    let product_form = |pos: &[usize]| {
                        let a = pos.iter().filter(|&&x| x <= s).count() as i64;
                        let b = pos.len() as i64 - a;
                        rational(1, 1 + a * a) * rational(2, 2 + b)
                    };
                    let c = joint_cumulant(product_form, n).map_err(|e| e.to_string())?;
                    if !num_traits::Zero::is_zero(&c) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        },
    );

    {
        let max_n = max_n;
        suite.check(
            &format!(
                "exact rank-vector moments: E Z = 0, E Z^2 = 1, Cov = -1/(n-1) (n <= {max_n})"
            ),
            || {
                for n in 3..=max_n {
                    let t = ExactMomentTable::new(n).map_err(|e| e.to_string())?;
                    if !num_traits::Zero::is_zero(&t.moment(&[1]).map_err(|e| e.to_string())?) {
                        return Ok(false);
                    }
                    if !num_traits::One::is_one(&t.moment(&[2]).map_err(|e| e.to_string())?) {
                        return Ok(false);
                    }
                    if t.moment(&[1, 1]).map_err(|e| e.to_string())? != rational(-1, n as i64 - 1) {
                        return Ok(false);
                    }
                }
                Ok(true)
            },
        );
    }

    suite.check("odd-total-degree moments vanish (20 random specs)", || {
        // simple deterministic LCG so the spec list is reproducible
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move |m: u64| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) % m
        };
        let mut tested = 0;
        while tested < 20 {
            let n = 3 + next(4) as usize; // 3..=6
            let m = 1 + next(3) as usize; // 1..=3 indices
            let mut powers: Vec<u32> = (0..m).map(|_| 1 + next(3) as u32).collect();
            if powers.iter().sum::<u32>() % 2 == 0 {
                powers[0] += 1;
            }
            let spec: Vec<(usize, u32)> = powers
                .iter()
                .enumerate()
                .map(|(i, &a)| (i + 1, a))
                .collect();
            let v = exact_perm_moment(n, &spec).map_err(|e| e.to_string())?;
            if !num_traits::Zero::is_zero(&v) {
                return Ok(false);
            }
            tested += 1;
        }
        Ok(true)
    });

    suite.check(
        "trace-cumulant formula: C(tr S) = n, C(tr S, tr S) = 0",
        || {
            if cumulant_tr_formula(&[1], 4, 2).map_err(|e| e.to_string())? != rational(4, 1) {
                return Ok(false);
            }
            if cumulant_tr_formula(&[1], 5, 3).map_err(|e| e.to_string())? != rational(5, 1) {
                return Ok(false);
            }
            let c = cumulant_tr_formula(&[1, 1], 4, 2).map_err(|e| e.to_string())?;
            Ok(num_traits::Zero::is_zero(&c))
        },
    );

    suite.check(
        "formula vs full enumeration: ((1),4,2) ((2),4,2) ((2),5,2) ((1,1),4,2) ((2,2),4,2)",
        || {
            for k_list in [&[1u32][..], &[2], &[1, 1], &[2, 2]] {
                let f = cumulant_tr_formula(k_list, 4, 2).map_err(|e| e.to_string())?;
                let d = direct_cumulant_tr(k_list, 4, 2).map_err(|e| e.to_string())?;
                if f != d {
                    return Ok(false);
                }
            }
            let f = cumulant_tr_formula(&[2], 5, 2).map_err(|e| e.to_string())?;
            let d = direct_cumulant_tr(&[2], 5, 2).map_err(|e| e.to_string())?;
            Ok(f == d)
        },
    );

    suite.check("moment exchangeability under index relabeling", || {
        let a = exact_perm_moment(6, &[(1, 2), (2, 4)]).map_err(|e| e.to_string())?;
        let b = exact_perm_moment(6, &[(5, 4), (3, 2)]).map_err(|e| e.to_string())?;
        Ok(a == b)
    });

    if suite.failures == 0 {
        println!("all checks passed");
        Ok(ExitCode::from(0))
    } else {
        println!("{} check(s) failed", suite.failures);
        Ok(ExitCode::from(1))
    }
}
