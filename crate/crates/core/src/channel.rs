//! Channels and instruments in Kraus form, the explicit constructions used
//! as certificates, and Heisenberg-picture verifiers for them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::joint::JointObservable;
use crate::linalg::{self, eigh, embed, sqrt_psd, ComplexMatrix, DensityMatrix, Subsystem};
use crate::povm::{OrthonormalBasis, Povm, ProbabilityDistribution};
use crate::sample;
use crate::tol;

/// Named residuals of a certificate check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub passed: bool,
    pub tol: f64,
    pub conditions: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
}

impl CheckReport {
    pub fn new(tol: f64) -> Self {
        Self {
            passed: true,
            tol,
            conditions: Vec::new(),
        }
    }

    pub fn push(&mut self, name: String, residual: f64) {
        let tol = self.tol;
        self.push_with_tol(name, residual, tol);
    }

    pub fn push_with_tol(&mut self, name: String, residual: f64, tol: f64) {
        let passed = residual <= tol;
        self.passed &= passed;
        self.conditions.push(Condition { name, residual, passed });
    }

    pub fn max_residual(&self) -> f64 {
        self.conditions.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    /// First failing condition, if any.
    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| !c.passed)
    }

    pub fn merge(mut self, other: CheckReport) -> Self {
        self.passed &= other.passed;
        self.conditions.extend(other.conditions);
        self
    }
}

/// Completely positive trace-preserving map `ρ ↦ Σ K ρ K†` from `C^in_dim`
/// to `⊗ C^{out_factors[i]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    in_dim: usize,
    out_factors: Vec<usize>,
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    pub fn new(in_dim: usize, out_factors: Vec<usize>, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let c = Self::from_parts_unchecked(in_dim, out_factors, kraus)?;
        let res = c.trace_preservation_residual();
        if res > tol::TRACE {
            return Err(Error::InvalidChannel(format!(
                "Σ K†K deviates from identity by {res:e}"
            )));
        }
        Ok(c)
    }

    /// Checks shapes only.
    pub fn from_parts_unchecked(in_dim: usize, out_factors: Vec<usize>, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if in_dim == 0 || out_factors.is_empty() || out_factors.contains(&0) {
            return Err(Error::InvalidChannel("zero dimension".to_string()));
        }
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".to_string()));
        }
        let out: usize = out_factors.iter().product();
        for k in &kraus {
            if k.rows() != out || k.cols() != in_dim {
                return Err(Error::InvalidChannel(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    out,
                    in_dim
                )));
            }
        }
        Ok(Self {
            in_dim,
            out_factors,
            kraus,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            in_dim: d,
            out_factors: alloc::vec![d],
            kraus: alloc::vec![ComplexMatrix::identity(d)],
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_factors(&self) -> &[usize] {
        &self.out_factors
    }

    pub fn out_dim(&self) -> usize {
        self.out_factors.iter().product()
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `‖Σ K†K − 1‖_F`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let mut total = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            total += &(&k.adjoint() * k);
        }
        total.distance(&ComplexMatrix::identity(self.in_dim))
    }

    /// Schrödinger picture on an arbitrary input operator.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        linalg::check_same_square(m, self.in_dim)?;
        let mut out = ComplexMatrix::zeros(self.out_dim(), self.out_dim());
        for k in &self.kraus {
            out += &(&(k * m) * &k.adjoint());
        }
        Ok(out)
    }

    /// `Λ(ρ) = Σ K ρ K†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_operator(rho.matrix())?.hermitian_part();
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    /// Heisenberg picture `Λ*(e) = Σ K† e K`.
    pub fn dual_apply(&self, e: &ComplexMatrix) -> Result<ComplexMatrix> {
        linalg::check_same_square(e, self.out_dim())?;
        let mut out = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            out += &(&(&k.adjoint() * e) * k);
        }
        Ok(out)
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.in_dim;
        let n = self.out_dim();
        let mut choi = ComplexMatrix::zeros(d * n, d * n);
        for i in 0..d {
            for j in 0..d {
                let unit = ComplexMatrix::outer(&linalg::basis_vector(d, i), &linalg::basis_vector(d, j));
                let block = self.apply_operator(&unit).expect("shape checked");
                for r in 0..n {
                    for c in 0..n {
                        choi[(i * n + r, j * n + c)] = block[(r, c)];
                    }
                }
            }
        }
        choi
    }

    /// Output space as two factors; errors for other factorizations.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.out_factors.as_slice() {
            &[a, b] => Ok((a, b)),
            other => Err(Error::InvalidChannel(format!(
                "expected two output factors, found {}",
                other.len()
            ))),
        }
    }

    /// Broadcasting channel `ρ ↦ Σ_j ⟨φ_j|ρ|φ_j⟩ |φ_j φ_j⟩⟨φ_j φ_j|`, with
    /// Kraus operators `|φ_j ⊗ φ_j⟩⟨φ_j|`.
    pub fn diagonal_broadcast(basis: &OrthonormalBasis) -> Self {
        let d = basis.dim();
        let kraus = basis
            .vectors()
            .iter()
            .map(|phi| {
                let ket = ComplexMatrix::column(phi).tensor(&ComplexMatrix::column(phi));
                &ket * &ComplexMatrix::column(phi).adjoint()
            })
            .collect();
        Self {
            in_dim: d,
            out_factors: alloc::vec![d, d],
            kraus,
        }
    }

    /// Appends a fixed state: `ρ ↦ ρ ⊗ η` when `eta_side` is
    /// [`Subsystem::Second`], `η ⊗ ρ` otherwise.
    pub fn product(d: usize, eta: &DensityMatrix, eta_side: Subsystem) -> Result<Self> {
        let e = eigh(eta.matrix())?;
        let id = ComplexMatrix::identity(d);
        let mut kraus = Vec::new();
        for (k, &val) in e.values.iter().enumerate() {
            if val <= tol::KRAUS_CUTOFF {
                continue;
            }
            let ket = ComplexMatrix::column(&e.vector(k)).scale(libm::sqrt(val));
            kraus.push(match eta_side {
                Subsystem::Second => id.tensor(&ket),
                Subsystem::First => ket.tensor(&id),
            });
        }
        let factors = match eta_side {
            Subsystem::Second => alloc::vec![d, eta.dim()],
            Subsystem::First => alloc::vec![eta.dim(), d],
        };
        Self::new(d, factors, kraus)
    }

    /// Channel that prepares the classical record of a joint measurement:
    /// `ρ ↦ Σ_{x,y} tr[ρ J(x,y)] |φ_x ⊗ η_y⟩⟨φ_x ⊗ η_y|`. Returns the channel
    /// together with the probe observables `|φ_x⟩⟨φ_x|` and `|η_y⟩⟨η_y|` that
    /// read the record on each output factor.
    pub fn from_joint(j: &JointObservable) -> Result<(Self, Povm, Povm)> {
        let (min_eig, norm) = j.observable_residuals()?;
        if min_eig < -tol::PSD || norm > tol::TRACE {
            return Err(Error::InvalidJoint(format!(
                "minimum eigenvalue {min_eig:e}, normalization residual {norm:e}"
            )));
        }
        let m = j.a_outcomes().len();
        let n = j.b_outcomes().len();
        let mut kraus = Vec::new();
        for x in 0..m {
            for y in 0..n {
                let record = linalg::basis_vector(m * n, x * n + y);
                let e = eigh(j.effect(x, y))?;
                for (k, &val) in e.values.iter().enumerate() {
                    if val <= tol::KRAUS_CUTOFF {
                        continue;
                    }
                    // √λ |record⟩⟨w| with J(x,y) = Σ λ |w⟩⟨w|
                    let w = e.vector(k);
                    let scaled: Vec<Complex64> = w.iter().map(|c| c * libm::sqrt(val)).collect();
                    kraus.push(ComplexMatrix::outer(&record, &scaled));
                }
            }
        }
        let channel = Self::from_parts_unchecked(j.dim(), alloc::vec![m, n], kraus)?;
        let probe_a = Povm::projective(&OrthonormalBasis::computational(m));
        let probe_a = Povm::from_parts_unchecked(m, j.a_outcomes().to_vec(), probe_a.effects().to_vec());
        let probe_b = Povm::projective(&OrthonormalBasis::computational(n));
        let probe_b = Povm::from_parts_unchecked(n, j.b_outcomes().to_vec(), probe_b.effects().to_vec());
        Ok((channel, probe_a, probe_b))
    }
}

/// Outcome-indexed completely positive maps in Kraus form whose sum is
/// trace preserving.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    dim: usize,
    out_dim: usize,
    outcomes: Vec<String>,
    maps: Vec<Vec<ComplexMatrix>>,
}

impl Instrument {
    pub fn new(dim: usize, outcomes: Vec<String>, maps: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let i = Self::from_parts_unchecked(dim, outcomes, maps)?;
        let res = i.trace_preservation_residual();
        if res > tol::TRACE {
            return Err(Error::InvalidInstrument(format!(
                "total map deviates from trace preservation by {res:e}"
            )));
        }
        Ok(i)
    }

    /// Checks shapes only.
    pub fn from_parts_unchecked(dim: usize, outcomes: Vec<String>, maps: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if outcomes.len() != maps.len() || outcomes.is_empty() {
            return Err(Error::InvalidInstrument(format!(
                "{} labels for {} outcome maps",
                outcomes.len(),
                maps.len()
            )));
        }
        let out_dim = maps
            .iter()
            .flatten()
            .next()
            .map(|k| k.rows())
            .ok_or_else(|| Error::InvalidInstrument("no Kraus operators".to_string()))?;
        for k in maps.iter().flatten() {
            if k.rows() != out_dim || k.cols() != dim {
                return Err(Error::InvalidInstrument(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    out_dim,
                    dim
                )));
            }
        }
        Ok(Self {
            dim,
            out_dim,
            outcomes,
            maps,
        })
    }

    /// Lüders instrument `I_x(ρ) = √A(x) ρ √A(x)`.
    pub fn luders(a: &Povm) -> Result<Self> {
        let maps = a
            .effects()
            .iter()
            .map(|e| sqrt_psd(e).map(|r| alloc::vec![r]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim: a.dim(),
            out_dim: a.dim(),
            outcomes: a.outcomes().to_vec(),
            maps,
        })
    }

    /// `I_x(ρ) = t(x) ρ`.
    pub fn trivial(dim: usize, t: &ProbabilityDistribution) -> Self {
        let id = ComplexMatrix::identity(dim);
        Self {
            dim,
            out_dim: dim,
            outcomes: t.labels().to_vec(),
            maps: t.weights().iter().map(|&w| alloc::vec![id.scale(libm::sqrt(w))]).collect(),
        }
    }

    /// Measures a probe on one output factor of `channel` and discards that
    /// factor: `I_x(ρ) = Tr_probe[(√A'(x) ⊗ 1) Λ(ρ) (√A'(x) ⊗ 1)]`.
    pub fn from_channel_probe(channel: &Channel, probe: &Povm, probe_side: Subsystem) -> Result<Self> {
        let (d0, d1) = channel.bipartite_dims()?;
        let (probe_dim, kept_dim) = match probe_side {
            Subsystem::First => (d0, d1),
            Subsystem::Second => (d1, d0),
        };
        if probe.dim() != probe_dim {
            return Err(Error::DimensionMismatch {
                expected: probe_dim,
                found: probe.dim(),
            });
        }
        let id_kept = ComplexMatrix::identity(kept_dim);
        let mut maps = Vec::with_capacity(probe.len());
        for effect in probe.effects() {
            let root = embed(&sqrt_psd(effect)?, kept_dim, probe_side);
            let mut kraus = Vec::new();
            for m in 0..probe_dim {
                let bra = ComplexMatrix::column(&linalg::basis_vector(probe_dim, m)).adjoint();
                let discard = match probe_side {
                    Subsystem::First => bra.tensor(&id_kept),
                    Subsystem::Second => id_kept.tensor(&bra),
                };
                let left = &discard * &root;
                for k in channel.kraus() {
                    let op = &left * k;
                    if op.frobenius_norm_sqr() > tol::KRAUS_CUTOFF * tol::KRAUS_CUTOFF {
                        kraus.push(op);
                    }
                }
            }
            if kraus.is_empty() {
                kraus.push(ComplexMatrix::zeros(kept_dim, channel.in_dim()));
            }
            maps.push(kraus);
        }
        Self::from_parts_unchecked(channel.in_dim(), probe.outcomes().to_vec(), maps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn maps(&self) -> &[Vec<ComplexMatrix>] {
        &self.maps
    }

    pub fn trace_preservation_residual(&self) -> f64 {
        let mut total = ComplexMatrix::zeros(self.dim, self.dim);
        for k in self.maps.iter().flatten() {
            total += &(&k.adjoint() * k);
        }
        total.distance(&ComplexMatrix::identity(self.dim))
    }

    /// `I_x(ρ)` for outcome index `x`.
    pub fn apply_outcome(&self, x: usize, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        linalg::check_same_square(rho.matrix(), self.dim)?;
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.maps[x] {
            out += &(&(k * rho.matrix()) * &k.adjoint());
        }
        Ok(out)
    }

    /// `I_Ω(ρ)`.
    pub fn apply_total(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for x in 0..self.maps.len() {
            out += &self.apply_outcome(x, rho)?;
        }
        Ok(out)
    }

    /// `I_x*(e)`.
    pub fn dual_outcome(&self, x: usize, e: &ComplexMatrix) -> Result<ComplexMatrix> {
        linalg::check_same_square(e, self.out_dim)?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.maps[x] {
            out += &(&(&k.adjoint() * e) * k);
        }
        Ok(out)
    }

    /// `I_Ω*(e)`.
    pub fn dual_total(&self, e: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for x in 0..self.maps.len() {
            out += &self.dual_outcome(x, e)?;
        }
        Ok(out)
    }

    /// The observable this instrument implements, `x ↦ I_x*(1)`.
    pub fn measured_povm(&self) -> Povm {
        let id = ComplexMatrix::identity(self.out_dim);
        let effects = (0..self.maps.len())
            .map(|x| self.dual_outcome(x, &id).expect("shape checked").hermitian_part())
            .collect();
        Povm::from_parts_unchecked(self.dim, self.outcomes.clone(), effects)
    }
}

fn require_broadcast_shape(c: &Channel, d: usize) -> Result<()> {
    if c.in_dim() != d {
        return Err(Error::DimensionMismatch {
            expected: c.in_dim(),
            found: d,
        });
    }
    let (d0, d1) = c.bipartite_dims()?;
    if d0 != d || d1 != d {
        return Err(Error::InvalidChannel(format!(
            "output factors {d0}x{d1}, expected {d}x{d}"
        )));
    }
    Ok(())
}

/// Residuals of `Λ*(E(x) ⊗ 1) = target(x)` (or `1 ⊗ E(x)` on the second
/// factor) for every outcome.
fn reproduction_conditions(
    report: &mut CheckReport,
    c: &Channel,
    probe: &Povm,
    side: Subsystem,
    target: &Povm,
    tag: &str,
) -> Result<()> {
    let (d0, d1) = c.bipartite_dims()?;
    let other = if side == Subsystem::First { d1 } else { d0 };
    if probe.len() != target.len() {
        return Err(Error::OutcomeMismatch(format!(
            "probe has {} outcomes, target has {}",
            probe.len(),
            target.len()
        )));
    }
    for ((label, p), t) in probe.outcomes().iter().zip(probe.effects()).zip(target.effects()) {
        let lifted = embed(p, other, side);
        let pulled = c.dual_apply(&lifted)?;
        let name = match side {
            Subsystem::First => format!("{tag}: Λ*({label} ⊗ 1)"),
            Subsystem::Second => format!("{tag}: Λ*(1 ⊗ {label})"),
        };
        report.push(name, pulled.distance(t));
    }
    Ok(())
}

/// `A(x) = Λ*(A(x) ⊗ 1) = Λ*(1 ⊗ A(x))` for all outcomes.
pub fn verify_broadcasts(c: &Channel, p: &Povm, tol: f64) -> Result<CheckReport> {
    require_broadcast_shape(c, p.dim())?;
    let mut report = CheckReport::new(tol);
    reproduction_conditions(&mut report, c, p, Subsystem::First, p, "left")?;
    reproduction_conditions(&mut report, c, p, Subsystem::Second, p, "right")?;
    Ok(report)
}

/// `Λ*(A(x) ⊗ 1) = A(x)` and `Λ*(1 ⊗ B(y)) = B(y)`.
pub fn verify_one_side_broadcast(c: &Channel, a: &Povm, b: &Povm, tol: f64) -> Result<CheckReport> {
    require_broadcast_shape(c, a.dim())?;
    if b.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mut report = CheckReport::new(tol);
    reproduction_conditions(&mut report, c, a, Subsystem::First, a, "A")?;
    reproduction_conditions(&mut report, c, b, Subsystem::Second, b, "B")?;
    Ok(report)
}

/// Probe reproduction on a channel with arbitrary output factors:
/// `Λ*(A'(x) ⊗ 1) = A(x)` and `Λ*(1 ⊗ B'(y)) = B(y)`.
pub fn verify_probes(
    c: &Channel,
    probe_a: &Povm,
    a: &Povm,
    probe_b: &Povm,
    b: &Povm,
    tol: f64,
) -> Result<CheckReport> {
    let (d0, d1) = c.bipartite_dims()?;
    if probe_a.dim() != d0 || probe_b.dim() != d1 {
        return Err(Error::InvalidChannel(format!(
            "probes act on {}x{}, channel output is {d0}x{d1}",
            probe_a.dim(),
            probe_b.dim()
        )));
    }
    if a.dim() != c.in_dim() || b.dim() != c.in_dim() {
        return Err(Error::DimensionMismatch {
            expected: c.in_dim(),
            found: if a.dim() != c.in_dim() { a.dim() } else { b.dim() },
        });
    }
    let mut report = CheckReport::new(tol);
    reproduction_conditions(&mut report, c, probe_a, Subsystem::First, a, "A")?;
    reproduction_conditions(&mut report, c, probe_b, Subsystem::Second, b, "B")?;
    Ok(report)
}

/// `I_Ω*(B(y)) = B(y)` for all outcomes: measuring with `i` leaves the
/// statistics of `b` unchanged.
pub fn verify_nondisturbing(i: &Instrument, b: &Povm, tol: f64) -> Result<CheckReport> {
    if b.dim() != i.out_dim() || i.dim() != i.out_dim() {
        return Err(Error::DimensionMismatch {
            expected: i.out_dim(),
            found: b.dim(),
        });
    }
    let mut report = CheckReport::new(tol);
    for (label, e) in b.outcomes().iter().zip(b.effects()) {
        let pulled = i.dual_total(e)?;
        report.push(format!("I_Ω*(B({label})) = B({label})"), pulled.distance(e));
    }
    Ok(report)
}

/// `I_x*(1) = A(x)`: the instrument implements `a`.
pub fn verify_measures(i: &Instrument, a: &Povm, tol: f64) -> Result<CheckReport> {
    if a.dim() != i.dim() {
        return Err(Error::DimensionMismatch {
            expected: i.dim(),
            found: a.dim(),
        });
    }
    if a.outcomes() != i.outcomes() {
        return Err(Error::OutcomeMismatch(format!(
            "instrument outcomes {:?} vs observable outcomes {:?}",
            i.outcomes(),
            a.outcomes()
        )));
    }
    let measured = i.measured_povm();
    let mut report = CheckReport::new(tol);
    for ((label, m), e) in a.outcomes().iter().zip(measured.effects()).zip(a.effects()) {
        report.push(format!("I_{label}*(1) = A({label})"), m.distance(e));
    }
    Ok(report)
}

/// Random state of the given dimension, exposed for property checks.
pub fn random_state(rng: &mut impl rand_core::RngCore, d: usize) -> DensityMatrix {
    sample::state(rng, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::{noisy_joint, self_joint};
    use crate::linalg::{is_psd, pauli};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform2() -> ProbabilityDistribution {
        ProbabilityDistribution::uniform(&sample::labels(2))
    }

    fn assert_valid_channel(c: &Channel) {
        assert!(c.trace_preservation_residual() < tol::TRACE);
        assert!(is_psd(&c.choi(), tol::PSD).unwrap().is_psd);
    }

    fn ket0() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::diag(&[1.0, 0.0])).unwrap()
    }

    #[test]
    fn product_channel_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = sample::state(&mut rng, 2);
        let eta = sample::state(&mut rng, 3);
        let c = Channel::product(2, &eta, Subsystem::Second).unwrap();
        assert_valid_channel(&c);
        let out = c.apply(&rho).unwrap();
        assert!(out.matrix().distance(&rho.matrix().tensor(eta.matrix())) < 1e-13);
        let c = Channel::product(2, &eta, Subsystem::First).unwrap();
        let out = c.apply(&rho).unwrap();
        assert!(out.matrix().distance(&eta.matrix().tensor(rho.matrix())) < 1e-13);
    }

    #[test]
    fn rank_one_product_channel() {
        let c = Channel::product(2, &ket0(), Subsystem::Second).unwrap();
        assert_eq!(c.kraus().len(), 1);
        assert!(c.trace_preservation_residual() < 1e-15);
    }

    #[test]
    fn diagonal_broadcast_on_basis_state() {
        let c = Channel::diagonal_broadcast(&OrthonormalBasis::computational(2));
        assert_valid_channel(&c);
        let out = c.apply(&ket0()).unwrap();
        assert!(out.matrix().distance(&ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0])) < 1e-15);
    }

    #[test]
    fn identity_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = sample::state(&mut rng, 3);
        let out = Channel::identity(3).apply(&rho).unwrap();
        assert!(out.matrix().distance(rho.matrix()) < 1e-15);
        assert!(Channel::identity(3).apply(&ket0()).is_err());
    }

    #[test]
    fn product_channel_dual() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let eta = sample::state(&mut rng, 2);
        let c = Channel::product(2, &eta, Subsystem::Second).unwrap();
        let a = sample::povm(&mut rng, 2, 3, None);
        for e in a.effects() {
            let pulled = c.dual_apply(&e.tensor(&ComplexMatrix::identity(2))).unwrap();
            assert!(pulled.distance(e) < 1e-13);
        }
        let t = ProbabilityDistribution::new(sample::labels(2), alloc::vec![0.3, 0.7]).unwrap();
        let triv = Povm::trivial(2, &t);
        for e in triv.effects() {
            let pulled = c.dual_apply(&ComplexMatrix::identity(2).tensor(e)).unwrap();
            assert!(pulled.distance(e) < 1e-13);
        }
    }

    #[test]
    fn diagonal_broadcast_dual_is_dephasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = sample::unitary(&mut rng, 3);
        let basis = OrthonormalBasis::from_columns(&u).unwrap();
        let c = Channel::diagonal_broadcast(&basis);
        let a = sample::povm(&mut rng, 3, 2, None);
        for e in a.effects() {
            let pulled = c.dual_apply(&e.tensor(&ComplexMatrix::identity(3))).unwrap();
            let mut expected = ComplexMatrix::zeros(3, 3);
            for phi in basis.vectors() {
                expected.add_scaled(e.sandwich(phi, phi).re, &ComplexMatrix::projector(phi));
            }
            assert!(pulled.distance(&expected) < 1e-13);
        }
    }

    #[test]
    fn duality_identity_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let j = self_joint(&sample::povm(&mut rng, 2, 3, None));
            let (c, _, _) = Channel::from_joint(&j).unwrap();
            let rho = sample::state(&mut rng, 2);
            let e = sample::hermitian(&mut rng, c.out_dim());
            let lhs = c.apply(&rho).unwrap().expectation(&e);
            let rhs = rho.expectation(&c.dual_apply(&e).unwrap());
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn diagonal_broadcast_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = sample::unitary(&mut rng, 3);
        let basis = OrthonormalBasis::from_columns(&u).unwrap();
        let c = Channel::diagonal_broadcast(&basis);
        let a = sample::diagonal_povm(&mut rng, &u, 3);
        let b = sample::diagonal_povm(&mut rng, &u, 2);
        assert!(verify_broadcasts(&c, &a, tol::CERT).unwrap().passed);
        assert!(verify_one_side_broadcast(&c, &a, &b, tol::CERT).unwrap().passed);

        let comp = Channel::diagonal_broadcast(&OrthonormalBasis::computational(2));
        let x = Povm::sharp_x();
        let r = verify_broadcasts(&comp, &x, tol::CERT).unwrap();
        assert!(!r.passed);
        let expected = ComplexMatrix::identity(2).scale(0.5).distance(&x.effects()[0]);
        assert!((r.max_residual() - expected).abs() < 1e-14);
    }

    #[test]
    fn product_channel_fails_broadcasting_nontrivial() {
        let c = Channel::product(2, &ket0(), Subsystem::Second).unwrap();
        let r = verify_broadcasts(&c, &Povm::sharp_x(), tol::CERT).unwrap();
        assert!(!r.passed);
        let failing: Vec<_> = r.conditions.iter().filter(|c| !c.passed).collect();
        assert!(failing.iter().all(|c| c.name.starts_with("right")));
    }

    #[test]
    fn one_side_with_trivial_partner() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eta = sample::state(&mut rng, 2);
        let c = Channel::product(2, &eta, Subsystem::Second).unwrap();
        let a = sample::povm(&mut rng, 2, 4, None);
        let t = Povm::trivial(2, &uniform2());
        assert!(verify_one_side_broadcast(&c, &a, &t, tol::CERT).unwrap().passed);
        let x = Povm::sharp_x();
        let r = verify_one_side_broadcast(&c, &x, &x, tol::CERT).unwrap();
        assert!(!r.passed);
        assert!(r.first_failure().unwrap().name.starts_with("B"));
    }

    #[test]
    fn joint_channel_reproduces_marginals() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z = Povm::sharp_z();
        let (c, pa, pb) = Channel::from_joint(&self_joint(&z)).unwrap();
        assert_valid_channel(&c);
        for _ in 0..20 {
            let rho = sample::state(&mut rng, 2);
            let out = c.apply(&rho).unwrap();
            for (x, e) in z.effects().iter().enumerate() {
                let direct = rho.expectation(e);
                let left = out.expectation(&pa.effects()[x].tensor(&ComplexMatrix::identity(2)));
                let right = out.expectation(&ComplexMatrix::identity(2).tensor(&pb.effects()[x]));
                assert!((direct - left).abs() < 1e-10 && (direct - right).abs() < 1e-10);
            }
        }
        let u = uniform2();
        let (j, xt, zt) = noisy_joint(&Povm::sharp_x(), &z, &u, &u).unwrap();
        let (c, pa, pb) = Channel::from_joint(&j).unwrap();
        assert_valid_channel(&c);
        assert!(verify_probes(&c, &pa, &xt, &pb, &zt, 1e-10).unwrap().passed);
    }

    #[test]
    fn luders_probability_reproduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = sample::povm(&mut rng, 3, 3, None);
        let inst = Instrument::luders(&a).unwrap();
        assert!(inst.trace_preservation_residual() < tol::TRACE);
        for _ in 0..10 {
            let rho = sample::state(&mut rng, 3);
            for x in 0..3 {
                let p = inst.apply_outcome(x, &rho).unwrap().trace().re;
                assert!((p - rho.expectation(&a.effects()[x])).abs() < 1e-10);
            }
        }
        assert!(verify_measures(&inst, &a, tol::CERT).unwrap().passed);
    }

    #[test]
    fn luders_nondisturbance_examples() {
        let z = Povm::sharp_z();
        let x = Povm::sharp_x();
        let lz = Instrument::luders(&z).unwrap();
        assert!(verify_nondisturbing(&lz, &z, tol::CERT).unwrap().passed);
        let r = verify_nondisturbing(&lz, &x, tol::CERT).unwrap();
        assert!(!r.passed);
        let expected = ComplexMatrix::identity(2).scale(0.5).distance(&x.effects()[0]);
        assert!((r.max_residual() - expected).abs() < 1e-14);
        // the dephased X effect is ½·1
        let pulled = lz.dual_total(&x.effects()[0]).unwrap();
        assert!(pulled.distance(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);

        let trivial = Instrument::trivial(2, &uniform2());
        assert!(verify_nondisturbing(&trivial, &x, tol::CERT).unwrap().passed);
        assert!(verify_nondisturbing(&trivial, &Povm::qubit_sic(), tol::CERT).unwrap().passed);
    }

    #[test]
    fn ancilla_probe_instrument_is_nondisturbing() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let eta = sample::state(&mut rng, 2);
        let c = Channel::product(2, &eta, Subsystem::First).unwrap();
        let probe = sample::povm(&mut rng, 2, 3, None);
        let inst = Instrument::from_channel_probe(&c, &probe, Subsystem::First).unwrap();
        assert!(inst.trace_preservation_residual() < 1e-12);
        for _ in 0..5 {
            let rho = sample::state(&mut rng, 2);
            for x in 0..3 {
                let out = inst.apply_outcome(x, &rho).unwrap();
                let w = eta.expectation(&probe.effects()[x]);
                assert!(out.distance(&rho.matrix().scale(w)) < 1e-12);
            }
        }
        assert!(verify_nondisturbing(&inst, &Povm::sharp_x(), tol::CERT).unwrap().passed);
    }

    #[test]
    fn probe_instrument_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let j = crate::joint::luders_sequential_joint(
            &sample::povm(&mut rng, 2, 2, None),
            &sample::povm(&mut rng, 2, 3, None),
        )
        .unwrap();
        let (c, pa, pb) = Channel::from_joint(&j).unwrap();
        for (probe, side) in [(&pa, Subsystem::First), (&pb, Subsystem::Second)] {
            let inst = Instrument::from_channel_probe(&c, probe, side).unwrap();
            let other = if side == Subsystem::First { c.bipartite_dims().unwrap().1 } else { c.bipartite_dims().unwrap().0 };
            for _ in 0..10 {
                let rho = sample::state(&mut rng, 2);
                let out = c.apply(&rho).unwrap();
                let mut total = 0.0;
                for (x, e) in probe.effects().iter().enumerate() {
                    let p = inst.apply_outcome(x, &rho).unwrap().trace().re;
                    let q = out.expectation(&embed(e, other, side));
                    assert!((p - q).abs() < 1e-10);
                    total += p;
                }
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shape_errors() {
        let c = Channel::identity(2);
        assert!(verify_broadcasts(&c, &Povm::sharp_z(), tol::CERT).is_err());
        let bc = Channel::diagonal_broadcast(&OrthonormalBasis::computational(3));
        assert!(verify_broadcasts(&bc, &Povm::sharp_z(), tol::CERT).is_err());
        assert!(Channel::new(2, alloc::vec![2], alloc::vec![pauli::x().scale(0.5)]).is_err());
        assert!(Instrument::from_channel_probe(&c, &Povm::sharp_z(), Subsystem::First).is_err());
    }
}
