//! Spectral computations behind the test statistics: trace powers, largest
//! eigenvalue, log-determinant, largest off-diagonal entry.
//!
//! Eigenvalues come from Householder tridiagonalization followed by the
//! implicit-shift QL iteration (eigenvalues only). A cyclic Jacobi solver
//! with eigenvectors backs the covariance square roots in the simulation
//! harness and doubles as a cross-solver oracle in tests. Trace powers can
//! also be cross-checked against repeated matrix squaring.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

const SYMMETRY_TOL: f64 = 1e-9;
const PD_EIGENVALUE_FLOOR: f64 = 1e-12;
const MAX_QL_ITERS: usize = 60;

/// Cached symmetric eigendecomposition (eigenvalues only, descending).
///
/// Computing the spectrum once amortizes every `trace_power(k)` query across
/// `k`; callers keep the `Spectrum` around as the decomposition cache.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>, // descending
}

impl Spectrum {
    pub fn of(m: &SquareMatrix) -> Result<Spectrum> {
        if m.dim() == 0 {
            return Err(Error::TooFewVariables { got: 0, min: 1 });
        }
        m.check_symmetric(SYMMETRY_TOL)?;
        let mut eigenvalues = sym_eigenvalues(m)?;
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Spectrum { eigenvalues })
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// `sum_i lambda_i^k`.
    pub fn trace_power(&self, k: u32) -> f64 {
        self.eigenvalues.iter().map(|l| l.powi(k as i32)).sum()
    }

    /// `sum_i ln lambda_i`; requires the matrix to be positive definite.
    pub fn log_det(&self) -> Result<f64> {
        let min = self.lambda_min();
        if min <= PD_EIGENVALUE_FLOOR {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        Ok(self.eigenvalues.iter().map(|l| l.ln()).sum())
    }
}

/// `tr M^k` via the eigenvalues of a symmetric matrix. `1 <= k <= 32`.
pub fn trace_power(m: &SquareMatrix, k: u32) -> Result<f64> {
    if !(1..=32).contains(&k) {
        return Err(Error::invalid("k", format!("{k} not in 1..=32")));
    }
    Ok(Spectrum::of(m)?.trace_power(k))
}

/// `tr M^k` via binary exponentiation of the matrix itself. Independent of
/// the eigendecomposition path; intended as a cross-check.
pub fn trace_power_via_matmul(m: &SquareMatrix, k: u32) -> Result<f64> {
    if !(1..=32).contains(&k) {
        return Err(Error::invalid("k", format!("{k} not in 1..=32")));
    }
    m.check_symmetric(SYMMETRY_TOL)?;
    let mut result: Option<SquareMatrix> = None;
    let mut base = m.clone();
    let mut e = k;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r.matmul(&base),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.matmul(&base);
    }
    Ok(result.unwrap().trace())
}

pub fn largest_eigenvalue(m: &SquareMatrix) -> Result<f64> {
    Ok(Spectrum::of(m)?.lambda_max())
}

pub fn log_det(m: &SquareMatrix) -> Result<f64> {
    Spectrum::of(m)?.log_det()
}

/// Largest `|m[i][j]|` over `i < j` with its (0-based) index pair; ties go
/// to the lexicographically smallest pair.
pub fn max_offdiag_abs(m: &SquareMatrix) -> Result<(f64, usize, usize)> {
    let p = m.dim();
    if p < 2 {
        return Err(Error::TooFewVariables { got: p, min: 2 });
    }
    let (mut best, mut bi, mut bj) = (f64::NEG_INFINITY, 0, 1);
    for i in 0..p {
        for j in (i + 1)..p {
            let v = m.get(i, j).abs();
            if v > best {
                (best, bi, bj) = (v, i, j);
            }
        }
    }
    Ok((best, bi, bj))
}

/// One-stop spectral digest of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    pub trace_powers: BTreeMap<u32, f64>,
    pub lambda_max: f64,
    pub log_det: Option<f64>,
    pub max_offdiag: f64,
    pub max_offdiag_pair: (usize, usize),
}

pub fn summarize(m: &SquareMatrix, ks: &[u32]) -> Result<SpectralSummary> {
    let spectrum = Spectrum::of(m)?;
    let mut trace_powers = BTreeMap::new();
    for &k in ks {
        if !(1..=32).contains(&k) {
            return Err(Error::invalid("k", format!("{k} not in 1..=32")));
        }
        trace_powers.insert(k, spectrum.trace_power(k));
    }
    let (max_offdiag, i, j) = max_offdiag_abs(m)?;
    Ok(SpectralSummary {
        trace_powers,
        lambda_max: spectrum.lambda_max(),
        log_det: spectrum.log_det().ok(),
        max_offdiag,
        max_offdiag_pair: (i, j),
    })
}

// ---------------------------------------------------------------------------
// Householder tridiagonalization + implicit QL (eigenvalues only)
// ---------------------------------------------------------------------------

fn sym_eigenvalues(m: &SquareMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m.get(0, 0)]);
    }
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut a, &mut d, &mut e);
    ql_implicit(&mut d, &mut e)?;
    Ok(d)
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// eigenvalues-only variant. On exit `d` holds the diagonal and `e[1..]`
/// the subdiagonal.
fn tridiagonalize(a: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = a.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = a[i][..=l].iter().map(|v| v.abs()).sum();
            if scale == 0.0 {
                e[i] = a[i][l];
            } else {
                for k in 0..=l {
                    a[i][k] /= scale;
                    h += a[i][k] * a[i][k];
                }
                let f = a[i][l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i][l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += a[j][k] * a[i][k];
                    }
                    for k in (j + 1)..=l {
                        g_acc += a[k][j] * a[i][k];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * a[i][j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j][k] -= f * e[k] + g * a[i][k];
                    }
                }
            }
        } else {
            e[i] = a[i][l];
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[i][i];
    }
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m_idx = l;
            while m_idx < n - 1 {
                let dd = d[m_idx].abs() + d[m_idx + 1].abs();
                if e[m_idx].abs() <= f64::EPSILON * dd {
                    break;
                }
                m_idx += 1;
            }
            if m_idx == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERS {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m_idx] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m_idx).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m_idx] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m_idx] = 0.0;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi with eigenvectors (used for covariance square roots and as
// a cross-solver oracle)
// ---------------------------------------------------------------------------

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors in columns,
/// both unordered.
pub fn sym_eigen_jacobi(m: &SquareMatrix) -> Result<(Vec<f64>, SquareMatrix)> {
    m.check_symmetric(SYMMETRY_TOL)?;
    let n = m.dim();
    let mut a = m.clone();
    let mut v = SquareMatrix::identity(n);
    if n < 2 {
        return Ok(((0..n).map(|i| a.get(i, i)).collect(), v));
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() <= 1e-14 * (1.0 + a.trace().abs()) {
            break;
        }
        for pp in 0..n {
            for qq in (pp + 1)..n {
                let apq = a.get(pp, qq);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(pp, pp);
                let aqq = a.get(qq, qq);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, pp);
                    let akq = a.get(k, qq);
                    a.set(k, pp, c * akp - s * akq);
                    a.set(k, qq, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(pp, k);
                    let aqk = a.get(qq, k);
                    a.set(pp, k, c * apk - s * aqk);
                    a.set(qq, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, pp);
                    let vkq = v.get(k, qq);
                    v.set(k, pp, c * vkp - s * vkq);
                    v.set(k, qq, s * vkp + c * vkq);
                }
            }
        }
    }
    Ok(((0..n).map(|i| a.get(i, i)).collect(), v))
}

/// Symmetric square root `M^(1/2)` via the Jacobi eigendecomposition.
/// Eigenvalues in `[-tol, 0)` are clamped to zero so barely-semidefinite
/// covariances still factor; anything more negative is an error.
pub(crate) fn sym_sqrt(m: &SquareMatrix, tol: f64) -> Result<SquareMatrix> {
    let (vals, vecs) = sym_eigen_jacobi(m)?;
    let n = m.dim();
    let mut roots = vec![0.0; n];
    for (i, &l) in vals.iter().enumerate() {
        if l < -tol {
            return Err(Error::ScenarioNotPsd { eigenvalue: l });
        }
        roots[i] = l.max(0.0).sqrt();
    }
    // V diag(sqrt(l)) V^T
    let mut out = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += vecs.get(i, k) * roots[k] * vecs.get(j, k);
            }
            out.set(i, j, acc);
            out.set(j, i, acc);
        }
    }
    Ok(out)
}
