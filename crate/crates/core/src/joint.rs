//! Joint observables on a product outcome grid.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::channel::CheckReport;
use crate::error::{Error, Result};
use crate::linalg::{self, eigh, sqrt_psd, ComplexMatrix};
use crate::povm::{Povm, ProbabilityDistribution};
use crate::tol;

/// Observable on `Ω_A × Ω_B`; effects are stored row-major, `(x, y)` at
/// `x * |Ω_B| + y`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointObservable {
    dim: usize,
    a_outcomes: Vec<String>,
    b_outcomes: Vec<String>,
    effects: Vec<ComplexMatrix>,
}

impl JointObservable {
    /// Builds a joint observable, checking positivity and normalization.
    pub fn new(
        a_outcomes: Vec<String>,
        b_outcomes: Vec<String>,
        effects: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let dim = effects
            .first()
            .map(|e| e.rows())
            .ok_or_else(|| Error::InvalidJoint("no effects".to_string()))?;
        let j = Self::from_parts_unchecked(dim, a_outcomes, b_outcomes, effects)?;
        let (min_eig, norm) = j.observable_residuals()?;
        if min_eig < -tol::PSD {
            return Err(Error::InvalidJoint(format!(
                "effect not positive (minimum eigenvalue {min_eig:e})"
            )));
        }
        if norm > tol::TRACE {
            return Err(Error::InvalidJoint(format!(
                "effects sum to identity only within {norm:e}"
            )));
        }
        Ok(j)
    }

    /// Checks shapes only.
    pub fn from_parts_unchecked(
        dim: usize,
        a_outcomes: Vec<String>,
        b_outcomes: Vec<String>,
        effects: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if a_outcomes.is_empty() || b_outcomes.is_empty() {
            return Err(Error::InvalidJoint("empty outcome set".to_string()));
        }
        if effects.len() != a_outcomes.len() * b_outcomes.len() {
            return Err(Error::InvalidJoint(format!(
                "{} effects for a {}x{} grid",
                effects.len(),
                a_outcomes.len(),
                b_outcomes.len()
            )));
        }
        for e in &effects {
            linalg::check_same_square(e, dim)?;
        }
        Ok(Self {
            dim,
            a_outcomes,
            b_outcomes,
            effects,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a_outcomes(&self) -> &[String] {
        &self.a_outcomes
    }

    pub fn b_outcomes(&self) -> &[String] {
        &self.b_outcomes
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// `J(x, y)` by index.
    pub fn effect(&self, x: usize, y: usize) -> &ComplexMatrix {
        &self.effects[x * self.b_outcomes.len() + y]
    }

    /// `J(x, Ω_B)` for every `x`.
    pub fn marginal_a(&self) -> Vec<ComplexMatrix> {
        let n = self.b_outcomes.len();
        self.effects
            .chunks(n)
            .map(|row| linalg::sum(row).expect("non-empty row"))
            .collect()
    }

    /// `J(Ω_A, y)` for every `y`.
    pub fn marginal_b(&self) -> Vec<ComplexMatrix> {
        let n = self.b_outcomes.len();
        (0..n)
            .map(|y| linalg::sum(self.effects.iter().skip(y).step_by(n)).expect("non-empty column"))
            .collect()
    }

    /// Smallest effect eigenvalue and Frobenius distance of the total from identity.
    pub fn observable_residuals(&self) -> Result<(f64, f64)> {
        let mut min_eig = f64::INFINITY;
        for e in &self.effects {
            min_eig = min_eig.min(eigh(e)?.min_value());
        }
        let total = linalg::sum(&self.effects).expect("non-empty");
        Ok((min_eig, total.distance(&ComplexMatrix::identity(self.dim))))
    }

    /// The joint as an ordinary observable with labels `"x|y"`.
    pub fn as_povm(&self) -> Povm {
        let mut labels = Vec::with_capacity(self.effects.len());
        for x in &self.a_outcomes {
            for y in &self.b_outcomes {
                labels.push(format!("{x}|{y}"));
            }
        }
        Povm::from_parts_unchecked(self.dim, labels, self.effects.clone())
    }

    /// Checks that the marginals reproduce `a` and `b` within `tol`, and that
    /// the joint is itself an observable.
    pub fn validate_against(&self, a: &Povm, b: &Povm, tol: f64) -> Result<CheckReport> {
        if a.outcomes() != self.a_outcomes.as_slice() {
            return Err(Error::OutcomeMismatch(format!(
                "joint rows {:?} vs observable outcomes {:?}",
                self.a_outcomes,
                a.outcomes()
            )));
        }
        if b.outcomes() != self.b_outcomes.as_slice() {
            return Err(Error::OutcomeMismatch(format!(
                "joint columns {:?} vs observable outcomes {:?}",
                self.b_outcomes,
                b.outcomes()
            )));
        }
        if a.dim() != self.dim || b.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: if a.dim() != self.dim { a.dim() } else { b.dim() },
            });
        }
        let mut report = CheckReport::new(tol);
        for (x, m) in self.marginal_a().iter().enumerate() {
            report.push(format!("J({}, Ω_B) = A({})", self.a_outcomes[x], self.a_outcomes[x]), m.distance(&a.effects()[x]));
        }
        for (y, m) in self.marginal_b().iter().enumerate() {
            report.push(format!("J(Ω_A, {}) = B({})", self.b_outcomes[y], self.b_outcomes[y]), m.distance(&b.effects()[y]));
        }
        let (min_eig, _) = self.observable_residuals()?;
        report.push_with_tol("positivity".to_string(), (-min_eig).max(0.0), tol::PSD);
        Ok(report)
    }
}

/// `J(x, y) = δ_xy A(x)`: every observable is its own joint partner.
pub fn self_joint(a: &Povm) -> JointObservable {
    let n = a.len();
    let zero = ComplexMatrix::zeros(a.dim(), a.dim());
    let mut effects = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            effects.push(if x == y { a.effects()[x].clone() } else { zero.clone() });
        }
    }
    JointObservable {
        dim: a.dim(),
        a_outcomes: a.outcomes().to_vec(),
        b_outcomes: a.outcomes().to_vec(),
        effects,
    }
}

/// Joint `J(x,y) = ½ t₂(y) A(x) + ½ t₁(x) B(y)` of the half-noisy pair
/// `Ã = ½A + ½t₁·1`, `B̃ = ½B + ½t₂·1`; returns `(J, Ã, B̃)`.
pub fn noisy_joint(
    a: &Povm,
    b: &Povm,
    t1: &ProbabilityDistribution,
    t2: &ProbabilityDistribution,
) -> Result<(JointObservable, Povm, Povm)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let w1 = t1.aligned_to(a.outcomes())?;
    let w2 = t2.aligned_to(b.outcomes())?;
    let mut effects = Vec::with_capacity(a.len() * b.len());
    for (ea, &p1) in a.effects().iter().zip(&w1) {
        for (eb, &p2) in b.effects().iter().zip(&w2) {
            let mut m = ea.scale(0.5 * p2);
            m.add_scaled(0.5 * p1, eb);
            effects.push(m);
        }
    }
    let joint = JointObservable {
        dim: a.dim(),
        a_outcomes: a.outcomes().to_vec(),
        b_outcomes: b.outcomes().to_vec(),
        effects,
    };
    Ok((joint, a.mix_with_trivial(0.5, t1)?, b.mix_with_trivial(0.5, t2)?))
}

/// Sequential joint `J(x,y) = √A(x) B(y) √A(x)` (measure `A` with its Lüders
/// instrument, then `B`). Its A-marginal is exactly `A`; its B-marginal is
/// `B` when the pair commutes.
pub fn luders_sequential_joint(a: &Povm, b: &Povm) -> Result<JointObservable> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let roots: Vec<ComplexMatrix> = a.effects().iter().map(sqrt_psd).collect::<Result<_>>()?;
    let mut effects = Vec::with_capacity(a.len() * b.len());
    for r in &roots {
        for eb in b.effects() {
            effects.push((&(r * eb) * r).hermitian_part());
        }
    }
    Ok(JointObservable {
        dim: a.dim(),
        a_outcomes: a.outcomes().to_vec(),
        b_outcomes: b.outcomes().to_vec(),
        effects,
    })
}
