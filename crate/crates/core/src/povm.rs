//! Observables with finitely many outcomes (POVMs) and their structural
//! predicates.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::linalg::{self, eigh, pauli, real_singular_values, ComplexMatrix};
use crate::sample;
use crate::tol;

/// Probability distribution over labelled outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if labels.len() != weights.len() || labels.is_empty() {
            return Err(Error::OutcomeMismatch(format!(
                "{} labels for {} weights",
                labels.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(-tol::TRACE..=1.0 + tol::TRACE).contains(*w)) {
            return Err(Error::InvalidPovm(format!("weight {w} outside [0, 1]")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidPovm(format!("weights sum to {total}")));
        }
        Ok(Self { labels, weights })
    }

    pub fn uniform(labels: &[String]) -> Self {
        let w = 1.0 / labels.len() as f64;
        Self {
            labels: labels.to_vec(),
            weights: vec![w; labels.len()],
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.weights[i])
    }

    /// Weights reordered to follow `labels`; fails when a label is missing
    /// or the label sets differ.
    pub fn aligned_to(&self, labels: &[String]) -> Result<Vec<f64>> {
        if labels.len() != self.labels.len() {
            return Err(Error::OutcomeMismatch(format!(
                "distribution has {} outcomes, observable has {}",
                self.labels.len(),
                labels.len()
            )));
        }
        labels
            .iter()
            .map(|l| {
                self.weight(l)
                    .ok_or_else(|| Error::OutcomeMismatch(format!("no weight for outcome {l:?}")))
            })
            .collect()
    }
}

/// Orthonormal basis of `C^d`, stored as a list of vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    vectors: Vec<Vec<Complex64>>,
}

impl OrthonormalBasis {
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        for i in 0..d {
            for j in 0..d {
                let ip: Complex64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (ip - target).norm() > tol::NUM {
                    return Err(Error::InvalidPovm(format!(
                        "basis vectors {i} and {j} have inner product {ip}"
                    )));
                }
            }
        }
        Ok(Self { vectors })
    }

    pub fn computational(d: usize) -> Self {
        Self {
            vectors: (0..d).map(|i| linalg::basis_vector(d, i)).collect(),
        }
    }

    /// Basis formed by the columns of a unitary.
    pub fn from_columns(u: &ComplexMatrix) -> Result<Self> {
        Self::new((0..u.cols()).map(|j| u.column_vec(j)).collect())
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    /// Unitary whose columns are the basis vectors.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |i, j| self.vectors[j][i])
    }

    /// `B† m B`.
    pub fn represent(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = self.to_matrix();
        &(&u.adjoint() * m) * &u
    }
}

/// Observable with finitely many labelled outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    outcomes: Vec<String>,
    effects: Vec<ComplexMatrix>,
}

/// Result of [`Povm::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub passed: bool,
    pub min_eigenvalue: f64,
    pub normalization_residual: f64,
    pub hermiticity_residual: f64,
    /// Human-readable description of each violated invariant.
    pub failures: Vec<String>,
}

/// Max commutator norm over a family of operator pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutationReport {
    pub commuting: bool,
    pub max_commutator: f64,
}

impl CommutationReport {
    fn from_norm(max_commutator: f64) -> Self {
        Self {
            commuting: max_commutator < tol::NUM,
            max_commutator,
        }
    }

    /// Commutator norm sits just above the threshold, where the exact
    /// relations are unstable.
    pub fn near_boundary(&self) -> bool {
        self.max_commutator > tol::NUM && self.max_commutator < 100.0 * tol::NUM
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrivialityReport {
    pub trivial: bool,
    /// Largest distance of an effect from its nearest multiple of identity.
    pub max_deviation: f64,
    pub distribution: Option<ProbabilityDistribution>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    pub complete: bool,
    pub span_dim: usize,
    pub required: usize,
    /// Singular values of the vectorized effects, relative to the largest.
    pub relative_singular_values: Vec<f64>,
    /// The value that decides completeness is within a factor 10 of the
    /// rank threshold.
    pub borderline: bool,
}

impl Povm {
    /// Builds an observable and checks every invariant.
    pub fn new(outcomes: Vec<String>, effects: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = effects
            .first()
            .map(|e| e.rows())
            .ok_or_else(|| Error::InvalidPovm("no outcomes".to_string()))?;
        if outcomes.len() != effects.len() {
            return Err(Error::InvalidPovm(format!(
                "{} labels for {} effects",
                outcomes.len(),
                effects.len()
            )));
        }
        for e in &effects {
            linalg::check_same_square(e, dim)?;
        }
        let p = Self::from_parts_unchecked(dim, outcomes, effects);
        let report = p.validate();
        if !report.passed {
            return Err(Error::InvalidPovm(report.failures.join("; ")));
        }
        Ok(p)
    }

    /// Assembles an observable without validation; see [`Povm::validate`].
    pub fn from_parts_unchecked(dim: usize, outcomes: Vec<String>, effects: Vec<ComplexMatrix>) -> Self {
        Self { dim, outcomes, effects }
    }

    /// Sharp observable of the qubit Pauli Z, outcomes `"0"` (|0⟩) and `"1"`.
    pub fn sharp_z() -> Self {
        Self::from_parts_unchecked(
            2,
            sample::labels(2),
            vec![ComplexMatrix::diag(&[1.0, 0.0]), ComplexMatrix::diag(&[0.0, 1.0])],
        )
    }

    /// Sharp observable of Pauli X, outcomes `"0"` (+) and `"1"` (−).
    pub fn sharp_x() -> Self {
        Self::from_parts_unchecked(
            2,
            sample::labels(2),
            vec![pauli::bloch(0.5, [0.5, 0.0, 0.0]), pauli::bloch(0.5, [-0.5, 0.0, 0.0])],
        )
    }

    /// Two-outcome qubit observable `(1 ± n·σ)/2` along a unit direction.
    pub fn sharp_along(n: [f64; 3]) -> Self {
        let neg = [-n[0], -n[1], -n[2]];
        Self::from_parts_unchecked(
            2,
            sample::labels(2),
            vec![
                pauli::bloch(0.5, n.map(|c| 0.5 * c)),
                pauli::bloch(0.5, neg.map(|c| 0.5 * c)),
            ],
        )
    }

    /// Tetrahedral qubit SIC `(1 + v_k·σ)/4`.
    pub fn qubit_sic() -> Self {
        let s = 1.0 / libm::sqrt(3.0);
        let dirs = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        let effects = dirs.iter().map(|v| pauli::bloch(0.25, v.map(|c| 0.25 * c))).collect();
        Self::from_parts_unchecked(2, sample::labels(4), effects)
    }

    /// Trivial observable `T(x) = t(x)·1`.
    pub fn trivial(dim: usize, t: &ProbabilityDistribution) -> Self {
        let id = ComplexMatrix::identity(dim);
        Self::from_parts_unchecked(
            dim,
            t.labels().to_vec(),
            t.weights().iter().map(|&w| id.scale(w)).collect(),
        )
    }

    /// Sharp observable measuring in `basis`.
    pub fn projective(basis: &OrthonormalBasis) -> Self {
        let effects = basis.vectors().iter().map(|v| ComplexMatrix::projector(v)).collect();
        Self::from_parts_unchecked(basis.dim(), sample::labels(basis.dim()), effects)
    }

    /// Observable diagonal in `basis` with coefficients `alpha[x][j]`.
    pub fn diagonal(basis: &OrthonormalBasis, outcomes: Vec<String>, alpha: &[Vec<f64>]) -> Result<Self> {
        let u = basis.to_matrix();
        let effects = alpha
            .iter()
            .map(|a| &(&u * &ComplexMatrix::diag(a)) * &u.adjoint())
            .collect();
        Self::new(outcomes, effects)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, label: &str) -> Option<&ComplexMatrix> {
        self.outcomes.iter().position(|l| l == label).map(|i| &self.effects[i])
    }

    /// Checks positivity, Hermiticity and normalization, reporting the worst
    /// residual of each.
    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let mut min_eig = f64::INFINITY;
        let mut herm: f64 = 0.0;
        if self.effects.is_empty() {
            failures.push("no outcomes".to_string());
        }
        if self.outcomes.len() != self.effects.len() {
            failures.push(format!(
                "{} labels for {} effects",
                self.outcomes.len(),
                self.effects.len()
            ));
        }
        for (i, l) in self.outcomes.iter().enumerate() {
            if self.outcomes[..i].contains(l) {
                failures.push(format!("duplicate outcome label {l:?}"));
            }
        }
        let mut shapes_ok = true;
        for (label, e) in self.outcomes.iter().zip(&self.effects) {
            if e.rows() != self.dim || e.cols() != self.dim {
                failures.push(format!(
                    "effect {label:?} has shape {}x{}, expected {}x{}",
                    e.rows(),
                    e.cols(),
                    self.dim,
                    self.dim
                ));
                shapes_ok = false;
                continue;
            }
            let dev = e.hermiticity_deviation();
            herm = herm.max(dev);
            if dev > tol::HERM {
                failures.push(format!("effect {label:?} is not Hermitian (deviation {dev:e})"));
            }
            if let Ok(eig) = eigh(e) {
                let m = eig.min_value();
                min_eig = min_eig.min(m);
                if m < -tol::PSD {
                    failures.push(format!("effect {label:?} is not positive (minimum eigenvalue {m:e})"));
                }
            } else {
                failures.push(format!("effect {label:?} has non-finite entries"));
            }
        }
        let mut norm_res = f64::INFINITY;
        if shapes_ok && !self.effects.is_empty() {
            let total = linalg::sum(&self.effects).expect("non-empty");
            norm_res = total.distance(&ComplexMatrix::identity(self.dim));
            let entrywise = (&total - &ComplexMatrix::identity(self.dim)).max_abs();
            if entrywise > tol::TRACE {
                failures.push(format!(
                    "normalization: effects sum to identity only within {entrywise:e}"
                ));
            }
        }
        ValidationReport {
            passed: failures.is_empty(),
            min_eigenvalue: min_eig,
            normalization_residual: norm_res,
            hermiticity_residual: herm,
            failures,
        }
    }

    /// Whether all effects commute with each other.
    pub fn is_commutative(&self) -> CommutationReport {
        let mut max: f64 = 0.0;
        for i in 0..self.effects.len() {
            for j in (i + 1)..self.effects.len() {
                max = max.max(self.effects[i].commutator_norm(&self.effects[j]));
            }
        }
        CommutationReport::from_norm(max)
    }

    /// Whether every effect is a nonnegative multiple of identity; returns
    /// the distribution `t(x) = tr[A(x)]/d` when it is.
    pub fn is_trivial(&self) -> TrivialityReport {
        let mut max_dev: f64 = 0.0;
        let mut weights = Vec::with_capacity(self.effects.len());
        for e in &self.effects {
            let (dev, c) = e.identity_proportionality();
            max_dev = max_dev.max(dev);
            if c < -tol::NUM {
                max_dev = max_dev.max(-c);
            }
            weights.push(c.max(0.0));
        }
        let trivial = max_dev < tol::NUM;
        let distribution = if trivial {
            let s: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= s);
            Some(ProbabilityDistribution {
                labels: self.outcomes.clone(),
                weights,
            })
        } else {
            None
        };
        TrivialityReport {
            trivial,
            max_deviation: max_dev,
            distribution,
        }
    }

    /// Whether the effects span the full operator space.
    pub fn is_informationally_complete(&self) -> CompletenessReport {
        span_report(&self.effects, self.dim)
    }

    /// `λ A(x) + (1 − λ) t(x) 1`.
    pub fn mix_with_trivial(&self, lambda: f64, t: &ProbabilityDistribution) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::WeightOutOfRange(lambda));
        }
        let weights = t.aligned_to(&self.outcomes)?;
        let id = ComplexMatrix::identity(self.dim);
        let effects = self
            .effects
            .iter()
            .zip(&weights)
            .map(|(e, &w)| {
                let mut m = e.scale(lambda);
                m.add_scaled((1.0 - lambda) * w, &id);
                m
            })
            .collect();
        Ok(Self::from_parts_unchecked(self.dim, self.outcomes.clone(), effects))
    }

    /// Same outcomes and effects equal within `tol` (Frobenius).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self.outcomes == other.outcomes
            && self
                .effects
                .iter()
                .zip(&other.effects)
                .all(|(a, b)| a.distance(b) <= tol)
    }

    /// Outcome distribution `tr[ρ A(x)]`.
    pub fn probabilities(&self, rho: &crate::DensityMatrix) -> Vec<f64> {
        self.effects.iter().map(|e| rho.expectation(e)).collect()
    }
}

/// Whether every effect of `a` commutes with every effect of `b`.
pub fn mutually_commuting(a: &Povm, b: &Povm) -> Result<CommutationReport> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    let mut max: f64 = 0.0;
    for ea in &a.effects {
        for eb in &b.effects {
            max = max.max(ea.commutator_norm(eb));
        }
    }
    Ok(CommutationReport::from_norm(max))
}

/// Span test over an arbitrary family of Hermitian operators on `C^d`.
pub fn span_report(effects: &[ComplexMatrix], d: usize) -> CompletenessReport {
    let required = d * d;
    let columns: Vec<Vec<f64>> = effects.iter().map(hermitian_coordinates).collect();
    let sv = real_singular_values(&columns);
    let top = sv.first().copied().unwrap_or(0.0);
    let rel: Vec<f64> = if top > 0.0 {
        sv.iter().map(|s| s / top).collect()
    } else {
        vec![0.0; sv.len()]
    };
    let span_dim = rel.iter().filter(|&&s| s > tol::RANK).count();
    let decisive = if rel.len() >= required { rel[required - 1] } else { 0.0 };
    let borderline = rel.len() >= required && decisive > tol::RANK / 10.0 && decisive < tol::RANK * 10.0;
    CompletenessReport {
        complete: span_dim >= required,
        span_dim,
        required,
        relative_singular_values: rel,
        borderline,
    }
}

/// Real orthonormal coordinates of a Hermitian matrix in the `d²`-dimensional
/// space of Hermitian operators with the Frobenius inner product.
fn hermitian_coordinates(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.rows();
    let r2 = core::f64::consts::SQRT_2;
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        v.push(m[(i, i)].re);
        for j in (i + 1)..d {
            v.push(r2 * m[(i, j)].re);
            v.push(r2 * m[(i, j)].im);
        }
    }
    v
}

/// Basis that simultaneously diagonalizes a mutually commuting family of
/// commutative observables, with the diagonal coefficient table.
#[derive(Debug, Clone)]
pub struct CommonBasis {
    pub basis: OrthonormalBasis,
    /// `coefficients[k][x][j] = ⟨φ_j|A_k(x)|φ_j⟩` for observable `k`.
    pub coefficients: Vec<Vec<Vec<f64>>>,
    /// Largest off-diagonal magnitude of any effect in the returned basis.
    pub off_diagonal_residual: f64,
}

const RANDOM_ATTEMPTS: usize = 5;

/// Finds an orthonormal basis in which every effect of every observable is
/// diagonal.
///
/// A random real combination of all effects is diagonalized; with
/// probability one its eigenbasis splits every common eigenspace. After
/// [`RANDOM_ATTEMPTS`] failures the routine refines eigenspaces effect by
/// effect instead.
pub fn common_eigenbasis(set: &[&Povm], rng: &mut impl RngCore) -> Result<CommonBasis> {
    let first = set
        .first()
        .ok_or_else(|| Error::InvalidPovm("empty observable set".to_string()))?;
    let d = first.dim;
    let mut max_comm: f64 = 0.0;
    for (i, a) in set.iter().enumerate() {
        if a.dim != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: a.dim,
            });
        }
        max_comm = max_comm.max(a.is_commutative().max_commutator);
        for b in &set[i + 1..] {
            max_comm = max_comm.max(mutually_commuting(a, b)?.max_commutator);
        }
    }
    if max_comm >= tol::NUM {
        return Err(Error::NotCommuting {
            max_commutator: max_comm,
        });
    }
    let effects: Vec<&ComplexMatrix> = set.iter().flat_map(|p| p.effects.iter()).collect();

    for _ in 0..RANDOM_ATTEMPTS {
        let mut combo = ComplexMatrix::zeros(d, d);
        for e in &effects {
            combo.add_scaled(sample::uniform_in(rng, -1.0, 1.0), e);
        }
        let u = eigh(&combo)?.vectors;
        let residual = off_diagonal_residual(&u, &effects);
        if residual < tol::NUM {
            return finish(set, u, residual);
        }
    }

    let u = refine_blocks(d, &effects)?;
    let residual = off_diagonal_residual(&u, &effects);
    if residual >= tol::NUM {
        return Err(Error::NotCommuting {
            max_commutator: residual,
        });
    }
    finish(set, u, residual)
}

fn off_diagonal_residual(u: &ComplexMatrix, effects: &[&ComplexMatrix]) -> f64 {
    let ud = u.adjoint();
    effects
        .iter()
        .map(|e| (&(&ud * e) * u).max_off_diagonal())
        .fold(0.0, f64::max)
}

/// Splits the space into joint eigenspaces one effect at a time.
fn refine_blocks(d: usize, effects: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    // Each block is a list of orthonormal vectors spanning a joint eigenspace.
    let mut blocks: Vec<Vec<Vec<Complex64>>> = vec![(0..d).map(|i| linalg::basis_vector(d, i)).collect()];
    for e in effects {
        let mut next = Vec::new();
        for block in blocks {
            if block.len() == 1 {
                next.push(block);
                continue;
            }
            let k = block.len();
            let restricted = ComplexMatrix::from_fn(k, k, |i, j| e.sandwich(&block[i], &block[j]));
            let eig = eigh(&restricted)?;
            let mut group: Vec<Vec<Complex64>> = Vec::new();
            let mut last = f64::NEG_INFINITY;
            for (idx, &val) in eig.values.iter().enumerate() {
                if !group.is_empty() && val - last > tol::NUM {
                    next.push(core::mem::take(&mut group));
                }
                last = val;
                let coeffs = eig.vector(idx);
                let mut v = vec![Complex64::new(0.0, 0.0); d];
                for (c, b) in coeffs.iter().zip(&block) {
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi += c * bi;
                    }
                }
                group.push(v);
            }
            next.push(group);
        }
        blocks = next;
    }
    let cols: Vec<Vec<Complex64>> = blocks.into_iter().flatten().collect();
    Ok(ComplexMatrix::from_fn(d, d, |i, j| cols[j][i]))
}

fn finish(set: &[&Povm], u: ComplexMatrix, residual: f64) -> Result<CommonBasis> {
    let basis = OrthonormalBasis::from_columns(&u)?;
    let coefficients = set
        .iter()
        .map(|p| {
            p.effects
                .iter()
                .map(|e| basis.vectors().iter().map(|v| e.sandwich(v, v).re.clamp(0.0, 1.0)).collect())
                .collect()
        })
        .collect();
    Ok(CommonBasis {
        basis,
        coefficients,
        off_diagonal_residual: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform2() -> ProbabilityDistribution {
        ProbabilityDistribution::uniform(&sample::labels(2))
    }

    #[test]
    fn validate_examples() {
        assert!(Povm::sharp_z().validate().passed);
        let broken = Povm::from_parts_unchecked(
            2,
            sample::labels(2),
            vec![ComplexMatrix::diag(&[1.0, 0.0]), ComplexMatrix::diag(&[1.0, 0.0])],
        );
        let r = broken.validate();
        assert!(!r.passed);
        assert!(r.failures[0].contains("normalization"));
        assert!((r.normalization_residual - libm::sqrt(2.0)).abs() < 1e-15);
        assert!(Povm::qubit_sic().validate().passed);
    }

    #[test]
    fn validate_reports_negative_effect() {
        let p = Povm::from_parts_unchecked(
            2,
            sample::labels(2),
            vec![ComplexMatrix::diag(&[1.5, 0.0]), ComplexMatrix::diag(&[-0.5, 1.0])],
        );
        let r = p.validate();
        assert!(!r.passed);
        assert!((r.min_eigenvalue + 0.5).abs() < 1e-15);
        assert!(Povm::new(p.outcomes().to_vec(), p.effects().to_vec()).is_err());
    }

    #[test]
    fn commutativity_examples() {
        assert!(Povm::sharp_z().is_commutative().commuting);
        let sic = Povm::qubit_sic().is_commutative();
        assert!(!sic.commuting);
        // [E1, E2] = (i/8) (v1 × v2)·σ, |v1 × v2| = √8/3, ‖σ_k‖_F = √2
        let expected = (1.0 / 8.0) * (libm::sqrt(8.0) / 3.0) * libm::sqrt(2.0);
        assert!(sic.max_commutator >= expected - 1e-12);
        assert!(Povm::trivial(3, &ProbabilityDistribution::uniform(&sample::labels(3)))
            .is_commutative()
            .commuting);
    }

    #[test]
    fn mutual_commutation_examples() {
        let z = Povm::sharp_z();
        let x = Povm::sharp_x();
        assert!(mutually_commuting(&z, &z).unwrap().commuting);
        assert!(!mutually_commuting(&z, &x).unwrap().commuting);
        assert!(mutually_commuting(&x, &Povm::trivial(2, &uniform2())).unwrap().commuting);
        let q = Povm::trivial(3, &ProbabilityDistribution::uniform(&sample::labels(3)));
        assert!(matches!(mutually_commuting(&z, &q), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn triviality_examples() {
        let t = Povm::trivial(2, &uniform2());
        let r = t.is_trivial();
        assert!(r.trivial);
        assert_eq!(r.distribution.unwrap().weights(), &[0.5, 0.5]);
        assert!(!Povm::sharp_z().is_trivial().trivial);
        let mixed = Povm::sharp_z().mix_with_trivial(0.01, &uniform2()).unwrap();
        assert!(!mixed.is_trivial().trivial);
    }

    #[test]
    fn informational_completeness_examples() {
        let sic = Povm::qubit_sic().is_informationally_complete();
        assert!(sic.complete);
        assert_eq!(sic.span_dim, 4);
        let z = Povm::sharp_z().is_informationally_complete();
        assert!(!z.complete);
        assert_eq!(z.span_dim, 2);
        let uniform4 = ProbabilityDistribution::uniform(&sample::labels(4));
        let mixed = Povm::qubit_sic().mix_with_trivial(0.5, &uniform4).unwrap();
        assert!(mixed.is_informationally_complete().complete);
        let flat = Povm::qubit_sic().mix_with_trivial(0.0, &uniform4).unwrap();
        assert!(!flat.is_informationally_complete().complete);
    }

    #[test]
    fn mix_examples() {
        let z = Povm::sharp_z();
        assert_eq!(z.mix_with_trivial(1.0, &uniform2()).unwrap(), z);
        let t = ProbabilityDistribution::new(sample::labels(2), vec![0.3, 0.7]).unwrap();
        let triv = z.mix_with_trivial(0.0, &t).unwrap();
        assert_eq!(triv.is_trivial().distribution.unwrap().weights(), &[0.3, 0.7]);
        let half = z.mix_with_trivial(0.5, &uniform2()).unwrap();
        assert!(half.effects()[0].distance(&ComplexMatrix::diag(&[0.75, 0.25])) < 1e-16);
        assert!(half.effects()[1].distance(&ComplexMatrix::diag(&[0.25, 0.75])) < 1e-16);
        assert_eq!(z.mix_with_trivial(1.5, &uniform2()), Err(Error::WeightOutOfRange(1.5)));
    }

    #[test]
    fn distribution_checks() {
        assert!(ProbabilityDistribution::new(sample::labels(2), vec![0.5, 0.6]).is_err());
        assert!(ProbabilityDistribution::new(sample::labels(2), vec![1.5, -0.5]).is_err());
        let t = ProbabilityDistribution::new(vec!["b".into(), "a".into()], vec![0.2, 0.8]).unwrap();
        assert_eq!(t.aligned_to(&["a".into(), "b".into()]).unwrap(), vec![0.8, 0.2]);
        assert!(t.aligned_to(&["a".into(), "c".into()]).is_err());
    }

    #[test]
    fn common_basis_for_sharp_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z = Povm::sharp_z();
        let t = Povm::trivial(2, &uniform2());
        let cb = common_eigenbasis(&[&z, &t], &mut rng).unwrap();
        assert!(cb.off_diagonal_residual < 1e-10);
        for v in cb.basis.vectors() {
            // each vector is a computational basis vector up to phase
            let weights: Vec<f64> = v.iter().map(|c| c.norm_sqr()).collect();
            assert!(weights.iter().any(|&w| (w - 1.0).abs() < 1e-12));
        }
        for row in &cb.coefficients[1] {
            assert!(row.iter().all(|&a| (a - 0.5).abs() < 1e-12));
        }
    }

    #[test]
    fn common_basis_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..5 {
            let u = sample::unitary(&mut rng, d);
            let a = sample::diagonal_povm(&mut rng, &u, 3);
            let b = sample::diagonal_povm(&mut rng, &u, 2);
            let cb = common_eigenbasis(&[&a, &b], &mut rng).unwrap();
            for e in a.effects().iter().chain(b.effects()) {
                assert!(cb.basis.represent(e).max_off_diagonal() < 1e-10);
            }
            for table in &cb.coefficients {
                for j in 0..d {
                    let s: f64 = table.iter().map(|row| row[j]).sum();
                    assert!((s - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn block_refinement_handles_degeneracy() {
        // projectors with a degenerate joint structure; the refinement must
        // still produce a diagonalizing basis
        let p = ComplexMatrix::diag(&[1.0, 1.0, 0.0]);
        let q = ComplexMatrix::diag(&[0.0, 1.0, 1.0]);
        let effects = [&p, &q];
        let u = refine_blocks(3, &effects).unwrap();
        assert!(off_diagonal_residual(&u, &effects) < 1e-12);
    }

    #[test]
    fn common_basis_rejects_non_commuting() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = common_eigenbasis(&[&Povm::sharp_z(), &Povm::sharp_x()], &mut rng);
        assert!(matches!(r, Err(Error::NotCommuting { .. })));
        let r = common_eigenbasis(&[&Povm::qubit_sic()], &mut rng);
        assert!(matches!(r, Err(Error::NotCommuting { .. })));
    }
}
