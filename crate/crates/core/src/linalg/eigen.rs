use alloc::vec::Vec;

use num_complex::Complex64;

use super::{require_hermitian, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tol;

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `m = V diag(values) V†` of a Hermitian matrix.
/// Eigenvalues are ascending; eigenvectors are the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column_vec(k)
    }

    /// `V diag(f(λ)) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in fv.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized as `(m + m†)/2` first, so tiny non-Hermitian
/// round-off is tolerated; callers that need to reject non-Hermitian input
/// check it themselves.
pub fn eigh(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = m.ensure_square()?;
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }

    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(HermitianEigen {
            values: alloc::vec![0.0; n],
            vectors: v,
        });
    }
    let threshold = scale * f64::EPSILON * 0.5;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    libm::sqrt(s)
}

/// One unitary rotation in the `(p, q)` plane that annihilates `a[p, q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + libm::sqrt(theta * theta + 1.0))
    } else {
        -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    // G[p,p] = G[q,q] = c, G[p,q] = s·phase, G[q,p] = −s·conj(phase).
    let gpq = phase * s;
    let gqp = -phase.conj() * s;
    let n = a.rows();

    // a ← a·G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * gqp;
        a[(k, q)] = akp * gpq + akq * c;
    }
    // a ← G†·a
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * gqp.conj();
        a[(q, k)] = apk * gpq.conj() + aqk * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * c;
    }
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// True iff the smallest eigenvalue is at least `-tol`. Rejects input that is
/// not Hermitian within [`tol::HERM`].
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<PsdReport> {
    require_hermitian(m)?;
    let min = eigh(m)?.min_value();
    Ok(PsdReport {
        is_psd: min >= -tol,
        min_eigenvalue: min,
    })
}

/// PSD square root with negative eigenvalues clipped to zero.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_hermitian(m)?;
    let e = eigh(m)?;
    if e.min_value() < -tol::PSD {
        return Err(Error::NotPsd {
            min_eigenvalue: e.min_value(),
        });
    }
    Ok(e.map_values(|x| libm::sqrt(x.max(0.0))))
}

/// Frobenius-nearest PSD matrix: eigenvalues clipped at zero.
pub fn psd_part(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eigh(m)?;
    Ok(e.map_values(|x| x.max(0.0)))
}

/// Singular values (descending) of the real matrix whose columns are given,
/// by one-sided Jacobi orthogonalization.
pub fn real_singular_values(columns: &[Vec<f64>]) -> Vec<f64> {
    let mut cols: Vec<Vec<f64>> = columns.to_vec();
    let n = cols.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| libm::sqrt(c.iter().map(|x| x * x).sum::<f64>()))
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}
