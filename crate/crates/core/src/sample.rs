//! Random states, unitaries and observables drawn from an explicit,
//! caller-owned random source.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::linalg::{eigh, ComplexMatrix, DensityMatrix};
use crate::povm::Povm;

/// Uniform sample in `[0, 1)` with 53 random bits.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform sample in `[lo, hi)`.
pub fn uniform_in(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Uniform integer in `[lo, hi]`.
pub fn integer_in(rng: &mut impl RngCore, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

/// Standard normal sample (Box–Muller).
pub fn normal(rng: &mut impl RngCore) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

pub fn complex_normal(rng: &mut impl RngCore) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

/// Ginibre matrix with i.i.d. complex normal entries.
pub fn ginibre(rng: &mut impl RngCore, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Random Hermitian matrix `(G + G†)/2`.
pub fn hermitian(rng: &mut impl RngCore, d: usize) -> ComplexMatrix {
    ginibre(rng, d, d).hermitian_part()
}

/// Random PSD matrix `G G†`.
pub fn psd(rng: &mut impl RngCore, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    &g * &g.adjoint()
}

/// Haar-random unitary (Gram–Schmidt on a Ginibre matrix).
pub fn unitary(rng: &mut impl RngCore, d: usize) -> ComplexMatrix {
    loop {
        let g = ginibre(rng, d, d);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
        let mut ok = true;
        for j in 0..d {
            let mut v = g.column_vec(j);
            for u in &cols {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
            let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
            if norm < 1e-8 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|z| *z /= norm);
            cols.push(v);
        }
        if ok {
            return ComplexMatrix::from_fn(d, d, |i, j| cols[j][i]);
        }
    }
}

/// Random mixed state from the Hilbert–Schmidt ensemble.
pub fn state(rng: &mut impl RngCore, d: usize) -> DensityMatrix {
    let m = psd(rng, d);
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(m.scale(1.0 / tr))
}

/// Probability vector drawn uniformly from the simplex.
pub fn simplex(rng: &mut impl RngCore, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| -libm::log(1.0 - uniform(rng))).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{i}")).collect()
}

/// Random POVM `E_i = S^{-1/2} G_i S^{-1/2}` with `S = Σ G_i`, `G_i` random
/// PSD of rank `rank` (full rank when `None`). The rank is raised when
/// `rank · outcomes < d`, since `S` would be singular.
pub fn povm(rng: &mut impl RngCore, d: usize, outcomes: usize, rank: Option<usize>) -> Povm {
    let rank = rank.unwrap_or(d).max(d.div_ceil(outcomes));
    let gs: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre(rng, d, rank);
            &g * &g.adjoint()
        })
        .collect();
    normalize_family(&gs, labels(outcomes))
}

/// Random POVM that is diagonal in the columns of `basis`.
pub fn diagonal_povm(rng: &mut impl RngCore, basis: &ComplexMatrix, outcomes: usize) -> Povm {
    let d = basis.rows();
    let mut alpha = alloc::vec![alloc::vec![0.0; d]; outcomes];
    for j in 0..d {
        let w = simplex(rng, outcomes);
        for x in 0..outcomes {
            alpha[x][j] = w[x];
        }
    }
    let effects = alpha
        .iter()
        .map(|a| {
            let diag = ComplexMatrix::diag(a);
            &(basis * &diag) * &basis.adjoint()
        })
        .collect();
    Povm::from_parts_unchecked(d, labels(outcomes), effects)
}

/// Sharp observable measuring in the columns of `basis`.
pub fn projective_povm(basis: &ComplexMatrix) -> Povm {
    let d = basis.rows();
    let effects = (0..d).map(|j| ComplexMatrix::projector(&basis.column_vec(j))).collect();
    Povm::from_parts_unchecked(d, labels(d), effects)
}

/// Observable drawn from a mixture of families chosen so that pairs sharing
/// `basis` often commute: generic, diagonal in `basis`, sharp in `basis`,
/// trivial, and sharp-plus-noise.
pub fn varied_povm(rng: &mut impl RngCore, basis: &ComplexMatrix) -> Povm {
    let d = basis.rows();
    match integer_in(rng, 0, 4) {
        0 => {
            let outcomes = integer_in(rng, 2, 4);
            let rank = integer_in(rng, 1, d);
            povm(rng, d, outcomes, Some(rank))
        }
        1 => {
            let outcomes = integer_in(rng, 2, 3);
            diagonal_povm(rng, basis, outcomes)
        }
        2 => {
            let outcomes = integer_in(rng, 1, 3);
            let w = simplex(rng, outcomes);
            let effects = w.iter().map(|&t| ComplexMatrix::identity(d).scale(t)).collect();
            Povm::from_parts_unchecked(d, labels(outcomes), effects)
        }
        3 => projective_povm(basis),
        _ => {
            let sharp = projective_povm(basis);
            let lambda = uniform(rng);
            let effects = sharp
                .effects()
                .iter()
                .map(|e| {
                    let mut m = e.scale(lambda);
                    m.add_scaled((1.0 - lambda) / d as f64, &ComplexMatrix::identity(d));
                    m
                })
                .collect();
            Povm::from_parts_unchecked(d, labels(d), effects)
        }
    }
}

fn normalize_family(gs: &[ComplexMatrix], labels: Vec<String>) -> Povm {
    let d = gs[0].rows();
    let s = crate::linalg::sum(gs).expect("non-empty family");
    let e = eigh(&s).expect("finite input");
    let inv_sqrt = e.map_values(|x| 1.0 / libm::sqrt(x));
    let effects = gs
        .iter()
        .map(|g| (&(&inv_sqrt * g) * &inv_sqrt).hermitian_part())
        .collect();
    Povm::from_parts_unchecked(d, labels, effects)
}
