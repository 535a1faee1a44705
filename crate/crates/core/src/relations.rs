//! The five relations between a pair of observables, strongest first:
//! broadcastable, one-side broadcastable, mutually nondisturbing,
//! nondisturbing, compatible. Each verdict that holds carries a certificate
//! that can be checked on its own.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::channel::{
    verify_broadcasts, verify_measures, verify_nondisturbing, verify_one_side_broadcast, Channel,
    CheckReport, Instrument,
};
use crate::error::{Error, Result};
use crate::feasibility::{dykstra_solve, FeasibilityProblem, SolverOptions, SolverStatus};
use crate::joint::{luders_sequential_joint, self_joint, JointObservable};
use crate::linalg::{DensityMatrix, Subsystem};
use crate::povm::{
    common_eigenbasis, mutually_commuting, span_report, CommutationReport, Povm, ProbabilityDistribution,
};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Broadcastable,
    OneSideBroadcastable,
    MutuallyNondisturbing,
    Nondisturbing,
    Compatible,
}

impl Relation {
    /// Strongest first; each relation implies the next.
    pub const HIERARCHY: [Relation; 5] = [
        Relation::Broadcastable,
        Relation::OneSideBroadcastable,
        Relation::MutuallyNondisturbing,
        Relation::Nondisturbing,
        Relation::Compatible,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Broadcastable => "broadcastable",
            Self::OneSideBroadcastable => "one-side-broadcastable",
            Self::MutuallyNondisturbing => "mutually-nondisturbing",
            Self::Nondisturbing => "nondisturbing",
            Self::Compatible => "compatible",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::HIERARCHY.into_iter().find(|r| r.as_str() == s)
    }

    fn rank(self) -> usize {
        self as usize
    }

    /// The next weaker relation.
    pub fn weaker(self) -> Option<Self> {
        Self::HIERARCHY.get(self.rank() + 1).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails,
    Indeterminate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Holds => "holds",
            Self::Fails => "fails",
            Self::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    /// The verdict decides the relation.
    Exact,
    /// Established by a sufficient condition only.
    SufficientOnly,
    /// Refuted by a necessary condition only.
    NecessaryOnly,
    /// A commutator norm lies just above the commuting threshold.
    NearBoundary,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::SufficientOnly => "sufficient-only",
            Self::NecessaryOnly => "necessary-only",
            Self::NearBoundary => "near-boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Joint(JointObservable),
    /// Channel into two copies; checked as a broadcasting or one-side
    /// broadcasting channel depending on the relation.
    Channel(Channel),
    /// Instrument that measures one observable without disturbing the other;
    /// `measured` names which one it measures.
    Instrument { instrument: Instrument, measured: Subsystem },
    /// One instrument in each direction.
    InstrumentPair { measure_a: Instrument, measure_b: Instrument },
    Reason(String),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Joint(_) => "joint",
            Self::Channel(_) => "channel",
            Self::Instrument { .. } => "instrument",
            Self::InstrumentPair { .. } => "instrument-pair",
            Self::Reason(_) => "reason",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub relation: Relation,
    pub status: Status,
    /// Largest certificate residual for `holds`; the refuting quantity
    /// otherwise.
    pub residual: f64,
    pub certificate: Option<Certificate>,
    pub flags: Vec<Flag>,
    pub note: String,
}

impl Verdict {
    fn fails(relation: Relation, residual: f64, reason: String, flag: Flag) -> Self {
        Self {
            relation,
            status: Status::Fails,
            residual,
            certificate: Some(Certificate::Reason(reason.clone())),
            flags: alloc::vec![flag],
            note: reason,
        }
    }

    fn indeterminate(relation: Relation, residual: f64, note: String) -> Self {
        Self {
            relation,
            status: Status::Indeterminate,
            residual,
            certificate: None,
            flags: Vec::new(),
            note,
        }
    }

    fn with_flag(mut self, flag: Flag) -> Self {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyReport {
    pub dim: usize,
    /// One verdict per relation, strongest first.
    pub verdicts: Vec<Verdict>,
    /// Largest cross-commutator norm of the pair.
    pub mutual_commutator: f64,
    /// Which case of the commuting-qubit trichotomy applied, if any.
    pub qubit_case: Option<QubitCase>,
}

impl HierarchyReport {
    pub fn verdict(&self, r: Relation) -> &Verdict {
        &self.verdicts[r.rank()]
    }

    /// Pairs `(stronger, weaker)` where the stronger holds and the weaker fails.
    pub fn violations(&self) -> Vec<(Relation, Relation)> {
        let mut out = Vec::new();
        for (i, s) in self.verdicts.iter().enumerate() {
            for w in &self.verdicts[i + 1..] {
                if s.status == Status::Holds && w.status == Status::Fails {
                    out.push((s.relation, w.relation));
                }
            }
        }
        out
    }

    pub fn is_monotone(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Case split for a mutually commuting qubit pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitCase {
    /// Both observables commutative.
    BothCommutative,
    /// The first observable is trivial.
    FirstTrivial,
    /// The second observable is trivial.
    SecondTrivial,
}

impl QubitCase {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::BothCommutative => "both-commutative",
            Self::FirstTrivial => "first-trivial",
            Self::SecondTrivial => "second-trivial",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationOptions {
    /// Frobenius tolerance for certificate identities.
    pub cert_tol: f64,
    pub solver: SolverOptions,
}

impl Default for RelationOptions {
    fn default() -> Self {
        Self {
            cert_tol: tol::CERT,
            solver: SolverOptions::default(),
        }
    }
}

fn same_dim(a: &Povm, b: &Povm) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

fn near_boundary(norm: f64) -> bool {
    norm > tol::NUM && norm < 100.0 * tol::NUM
}

/// Marginal check of a joint against the pair.
pub fn validate_joint(j: &JointObservable, a: &Povm, b: &Povm, cert_tol: f64) -> Result<CheckReport> {
    j.validate_against(a, b, cert_tol)
}

/// Checks a certificate for `relation` on the pair `(a, b)`.
pub fn verify_certificate(
    relation: Relation,
    cert: &Certificate,
    a: &Povm,
    b: &Povm,
    cert_tol: f64,
) -> Result<CheckReport> {
    match (relation, cert) {
        (Relation::Compatible, Certificate::Joint(j)) => validate_joint(j, a, b, cert_tol),
        (Relation::Broadcastable, Certificate::Channel(c)) => {
            Ok(verify_broadcasts(c, a, cert_tol)?.merge(verify_broadcasts(c, b, cert_tol)?))
        }
        (Relation::OneSideBroadcastable, Certificate::Channel(c)) => verify_one_side_broadcast(c, a, b, cert_tol),
        (Relation::Nondisturbing, Certificate::Instrument { instrument, measured }) => {
            let (m, other) = match measured {
                Subsystem::First => (a, b),
                Subsystem::Second => (b, a),
            };
            Ok(verify_measures(instrument, m, cert_tol)?.merge(verify_nondisturbing(instrument, other, cert_tol)?))
        }
        (Relation::MutuallyNondisturbing, Certificate::InstrumentPair { measure_a, measure_b }) => Ok(verify_measures(
            measure_a, a, cert_tol,
        )?
        .merge(verify_nondisturbing(measure_a, b, cert_tol)?)
        .merge(verify_measures(measure_b, b, cert_tol)?)
        .merge(verify_nondisturbing(measure_b, a, cert_tol)?)),
        (r, c) => {
            let mut report = CheckReport::new(cert_tol);
            report.push_with_tol(
                format!("{} certificate cannot establish {}", c.kind(), r.as_str()),
                f64::INFINITY,
                0.0,
            );
            Ok(report)
        }
    }
}

/// Verifies `cert` and returns a `holds` verdict, or an indeterminate one
/// if the certificate does not check out.
fn certified(
    relation: Relation,
    cert: Certificate,
    a: &Povm,
    b: &Povm,
    opts: &RelationOptions,
    flag: Flag,
    note: &str,
) -> Result<Verdict> {
    let report = verify_certificate(relation, &cert, a, b, opts.cert_tol)?;
    if report.passed {
        return Ok(Verdict {
            relation,
            status: Status::Holds,
            residual: report.max_residual(),
            certificate: Some(cert),
            flags: alloc::vec![flag],
            note: note.to_string(),
        });
    }
    let worst = report.first_failure().map(|c| c.name.clone()).unwrap_or_default();
    Ok(Verdict::indeterminate(
        relation,
        report.max_residual(),
        format!("{note}; certificate failed re-verification at '{worst}'"),
    ))
}

/// Joint observable `J(x, y) = I_x*(B(y))` of an instrument measuring one
/// observable without disturbing the other.
pub fn joint_from_instrument(instrument: &Instrument, measured: Subsystem, a: &Povm, b: &Povm) -> Result<JointObservable> {
    let mut effects = Vec::with_capacity(a.len() * b.len());
    for x in 0..a.len() {
        for y in 0..b.len() {
            let e = match measured {
                Subsystem::First => instrument.dual_outcome(x, &b.effects()[y])?,
                Subsystem::Second => instrument.dual_outcome(y, &a.effects()[x])?,
            };
            effects.push(e.hermitian_part());
        }
    }
    JointObservable::from_parts_unchecked(a.dim(), a.outcomes().to_vec(), b.outcomes().to_vec(), effects)
}

/// Instruments from a one-side broadcasting channel: probing the first
/// output with `A` leaves `B` on the second, and vice versa.
pub fn instruments_from_one_side_channel(c: &Channel, a: &Povm, b: &Povm) -> Result<(Instrument, Instrument)> {
    Ok((
        Instrument::from_channel_probe(c, a, Subsystem::First)?,
        Instrument::from_channel_probe(c, b, Subsystem::Second)?,
    ))
}

/// Decides compatibility. Equal and commuting pairs get an explicit joint;
/// everything else goes to the feasibility solver.
pub fn check_compatibility(a: &Povm, b: &Povm, opts: &RelationOptions) -> Result<Verdict> {
    same_dim(a, b)?;
    let rel = Relation::Compatible;
    if a.outcomes() == b.outcomes() && a.approx_eq(b, tol::NUM) {
        return certified(rel, Certificate::Joint(self_joint(a)), a, b, opts, Flag::Exact, "self joint");
    }
    let mc = mutually_commuting(a, b)?;
    if mc.commuting {
        let j = luders_sequential_joint(a, b)?;
        let v = certified(rel, Certificate::Joint(j), a, b, opts, Flag::Exact, "sequential joint of a commuting pair")?;
        if v.status == Status::Holds {
            return Ok(v);
        }
    }
    let problem = FeasibilityProblem::from_povms(a, b)?;
    let out = dykstra_solve(&problem, &opts.solver)?;
    let summary = format!(
        "solver {} after {} iterations, residual {:e}, {}",
        out.status.as_str(),
        out.iterations,
        out.residual,
        out.diagnostics.message
    );
    match out.status {
        SolverStatus::Feasible => {
            let j = JointObservable::from_parts_unchecked(a.dim(), a.outcomes().to_vec(), b.outcomes().to_vec(), out.grid)?;
            certified(rel, Certificate::Joint(j), a, b, opts, Flag::Exact, &summary)
        }
        SolverStatus::Infeasible => Ok(Verdict::fails(rel, out.residual, summary, Flag::Exact)),
        SolverStatus::Indeterminate => Ok(Verdict::indeterminate(rel, out.residual, summary)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Robustness {
    /// Largest mixing weight found compatible.
    pub lambda: f64,
    /// Smallest weight seen to be incompatible or undecided.
    pub upper: f64,
    /// Whether `upper` was refuted outright rather than left undecided.
    pub upper_refuted: bool,
    /// Every weight probed, in order, with its verdict.
    pub probes: Vec<(f64, Status)>,
}

/// Largest `λ` at which `λA + (1−λ)t₁` and `λB + (1−λ)t₂` stay compatible,
/// bracketed to `precision`. The half-noisy joint makes `λ = ½` a certified
/// lower bound. Undecided probes count as incompatible for the bisection,
/// and the reported bracket is widened up to the smallest refuted weight.
pub fn incompatibility_robustness(
    a: &Povm,
    b: &Povm,
    t1: &ProbabilityDistribution,
    t2: &ProbabilityDistribution,
    precision: f64,
    opts: &RelationOptions,
) -> Result<Robustness> {
    same_dim(a, b)?;
    if !(precision > 0.0 && precision < 0.5) {
        return Err(Error::InvalidOptions(format!("precision {precision} outside (0, 0.5)")));
    }
    let mut probes = Vec::new();
    let mut probe = |lambda: f64| -> Result<Status> {
        let am = a.mix_with_trivial(lambda, t1)?;
        let bm = b.mix_with_trivial(lambda, t2)?;
        let status = check_compatibility(&am, &bm, opts)?.status;
        probes.push((lambda, status));
        Ok(status)
    };
    let top = probe(1.0)?;
    if top == Status::Holds {
        return Ok(Robustness {
            lambda: 1.0,
            upper: 1.0,
            upper_refuted: false,
            probes,
        });
    }
    let mut lo = 0.5;
    let mut hi = 1.0;
    let mut refuted = if top == Status::Fails { Some(1.0) } else { None };
    while hi - lo > precision {
        let mid = 0.5 * (lo + hi);
        match probe(mid)? {
            Status::Holds => lo = mid,
            Status::Fails => {
                hi = mid;
                refuted = Some(mid);
            }
            Status::Indeterminate => hi = mid,
        }
    }
    Ok(Robustness {
        lambda: lo,
        upper: refuted.unwrap_or(hi),
        upper_refuted: refuted.is_some(),
        probes,
    })
}

/// Returns the trichotomy case of a mutually commuting qubit pair, or `None`
/// when the pair does not commute or no case is met within tolerance.
pub fn qubit_commuting_case(a: &Povm, b: &Povm) -> Result<Option<QubitCase>> {
    same_dim(a, b)?;
    if !mutually_commuting(a, b)?.commuting {
        return Ok(None);
    }
    Ok(if a.is_commutative().commuting && b.is_commutative().commuting {
        Some(QubitCase::BothCommutative)
    } else if a.is_trivial().trivial {
        Some(QubitCase::FirstTrivial)
    } else if b.is_trivial().trivial {
        Some(QubitCase::SecondTrivial)
    } else {
        None
    })
}

fn diagonal_broadcast_for(a: &Povm, b: &Povm, rng: &mut impl RngCore) -> Result<Channel> {
    let common = common_eigenbasis(&[a, b], rng)?;
    Ok(Channel::diagonal_broadcast(&common.basis))
}

/// One-side broadcasting channel for a pair with a trivial member: the
/// trivial side receives a fixed state.
fn trivial_side_channel(d: usize, trivial: Subsystem) -> Result<Channel> {
    Channel::product(d, &DensityMatrix::maximally_mixed(d), trivial)
}

fn luders_pair(a: &Povm, b: &Povm) -> Result<Certificate> {
    Ok(Certificate::InstrumentPair {
        measure_a: Instrument::luders(a)?,
        measure_b: Instrument::luders(b)?,
    })
}

/// Exact classification of a qubit pair. The four strong relations follow
/// from commutator tests; compatibility uses [`check_compatibility`].
pub fn classify_qubit_pair(a: &Povm, b: &Povm, opts: &RelationOptions, rng: &mut impl RngCore) -> Result<HierarchyReport> {
    same_dim(a, b)?;
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.dim(),
        });
    }
    let mc = mutually_commuting(a, b)?;
    let ca = a.is_commutative();
    let cb = b.is_commutative();
    let boundary = [mc.max_commutator, ca.max_commutator, cb.max_commutator]
        .into_iter()
        .any(near_boundary);
    let case = qubit_commuting_case(a, b)?;
    let compat = check_compatibility(a, b, opts)?;

    let mut verdicts = Vec::with_capacity(5);
    if !mc.commuting {
        let reason = format!("effects do not commute across the pair (max commutator {:e})", mc.max_commutator);
        for r in &Relation::HIERARCHY[..4] {
            verdicts.push(Verdict::fails(*r, mc.max_commutator, reason.clone(), Flag::Exact));
        }
    } else if let Some(case) = case {
        let (broadcast, one_side) = match case {
            QubitCase::BothCommutative => {
                let c = diagonal_broadcast_for(a, b, rng)?;
                let v = certified(Relation::Broadcastable, Certificate::Channel(c.clone()), a, b, opts, Flag::Exact, "diagonal broadcast in a common eigenbasis")?;
                let w = certified(Relation::OneSideBroadcastable, Certificate::Channel(c), a, b, opts, Flag::Exact, "diagonal broadcast in a common eigenbasis")?;
                (v, w)
            }
            QubitCase::FirstTrivial | QubitCase::SecondTrivial => {
                let side = if case == QubitCase::FirstTrivial { Subsystem::First } else { Subsystem::Second };
                let (noncomm, norm) = if !ca.commuting { ("first", ca.max_commutator) } else { ("second", cb.max_commutator) };
                let v = Verdict::fails(
                    Relation::Broadcastable,
                    norm,
                    format!("{noncomm} observable is not commutative (max commutator {norm:e})"),
                    Flag::Exact,
                );
                let c = trivial_side_channel(2, side)?;
                let w = certified(Relation::OneSideBroadcastable, Certificate::Channel(c), a, b, opts, Flag::Exact, "fixed state on the trivial side")?;
                (v, w)
            }
        };
        verdicts.push(broadcast);
        verdicts.push(one_side);
        verdicts.push(certified(Relation::MutuallyNondisturbing, luders_pair(a, b)?, a, b, opts, Flag::Exact, "Lüders instruments")?);
        let inst = Certificate::Instrument {
            instrument: Instrument::luders(a)?,
            measured: Subsystem::First,
        };
        verdicts.push(certified(Relation::Nondisturbing, inst, a, b, opts, Flag::Exact, "Lüders instrument of the first observable")?);
    } else {
        let note = "commuting pair matches no case of the qubit trichotomy within tolerance".to_string();
        for r in &Relation::HIERARCHY[..4] {
            verdicts.push(Verdict::indeterminate(*r, mc.max_commutator, note.clone()));
        }
    }
    verdicts.push(compat);
    if boundary {
        verdicts = verdicts.into_iter().map(|v| v.with_flag(Flag::NearBoundary)).collect();
    }
    let mut report = HierarchyReport {
        dim: 2,
        verdicts,
        mutual_commutator: mc.max_commutator,
        qubit_case: case,
    };
    close_downward(&mut report, a, b, opts)?;
    Ok(report)
}

/// Partial classification in any dimension. Sufficient conditions establish
/// relations with certificates; necessary conditions refute them; the rest
/// is left indeterminate.
pub fn classify_general_pair(a: &Povm, b: &Povm, opts: &RelationOptions, rng: &mut impl RngCore) -> Result<HierarchyReport> {
    same_dim(a, b)?;
    let d = a.dim();
    let mc = mutually_commuting(a, b)?;
    let ca = a.is_commutative();
    let cb = b.is_commutative();
    let boundary = [mc.max_commutator, ca.max_commutator, cb.max_commutator]
        .into_iter()
        .any(near_boundary);
    let compat = check_compatibility(a, b, opts)?;
    let incompatible = compat.status == Status::Fails;
    let refute_incompatible = |r: Relation| {
        Verdict::fails(r, compat.residual, "the pair is not compatible".to_string(), Flag::NecessaryOnly)
    };

    let broadcast = if mc.commuting && ca.commuting && cb.commuting {
        let c = diagonal_broadcast_for(a, b, rng)?;
        certified(Relation::Broadcastable, Certificate::Channel(c), a, b, opts, Flag::SufficientOnly, "diagonal broadcast in a common eigenbasis")?
    } else if let Some(reason) = informational_completeness_obstruction(a, b) {
        Verdict::fails(Relation::Broadcastable, 0.0, reason, Flag::NecessaryOnly)
    } else if incompatible {
        refute_incompatible(Relation::Broadcastable)
    } else {
        Verdict::indeterminate(Relation::Broadcastable, mc.max_commutator, undecided(&mc))
    };

    let trivial_side = if a.is_trivial().trivial {
        Some(Subsystem::First)
    } else if b.is_trivial().trivial {
        Some(Subsystem::Second)
    } else {
        None
    };
    let one_side = if let Some(side) = trivial_side {
        let c = trivial_side_channel(d, side)?;
        certified(Relation::OneSideBroadcastable, Certificate::Channel(c), a, b, opts, Flag::SufficientOnly, "fixed state on the trivial side")?
    } else if incompatible {
        refute_incompatible(Relation::OneSideBroadcastable)
    } else {
        Verdict::indeterminate(Relation::OneSideBroadcastable, mc.max_commutator, undecided(&mc))
    };

    let (mutual, nondisturbing) = if mc.commuting {
        let inst = Certificate::Instrument {
            instrument: Instrument::luders(a)?,
            measured: Subsystem::First,
        };
        (
            certified(Relation::MutuallyNondisturbing, luders_pair(a, b)?, a, b, opts, Flag::SufficientOnly, "Lüders instruments of a mutually commuting pair")?,
            certified(Relation::Nondisturbing, inst, a, b, opts, Flag::SufficientOnly, "Lüders instrument of the first observable")?,
        )
    } else if incompatible {
        (refute_incompatible(Relation::MutuallyNondisturbing), refute_incompatible(Relation::Nondisturbing))
    } else {
        (
            Verdict::indeterminate(Relation::MutuallyNondisturbing, mc.max_commutator, undecided(&mc)),
            Verdict::indeterminate(Relation::Nondisturbing, mc.max_commutator, undecided(&mc)),
        )
    };

    let mut verdicts = alloc::vec![broadcast, one_side, mutual, nondisturbing, compat];
    if boundary {
        verdicts = verdicts.into_iter().map(|v| v.with_flag(Flag::NearBoundary)).collect();
    }
    let mut report = HierarchyReport {
        dim: d,
        verdicts,
        mutual_commutator: mc.max_commutator,
        qubit_case: None,
    };
    close_downward(&mut report, a, b, opts)?;
    Ok(report)
}

fn undecided(mc: &CommutationReport) -> String {
    format!(
        "no decision procedure in this dimension (max cross commutator {:e})",
        mc.max_commutator
    )
}

/// A broadcastable pair has each member broadcastable with itself, and no
/// informationally complete set is broadcastable.
fn informational_completeness_obstruction(a: &Povm, b: &Povm) -> Option<String> {
    if a.is_informationally_complete().complete {
        return Some("first observable is informationally complete".to_string());
    }
    if b.is_informationally_complete().complete {
        return Some("second observable is informationally complete".to_string());
    }
    let effects: Vec<_> = a.effects().iter().chain(b.effects()).cloned().collect();
    let span = span_report(&effects, a.dim());
    span.complete
        .then(|| format!("the pair spans all {} operator dimensions", span.required))
}

/// Derives a certificate for a weaker relation from a stronger one that
/// holds, and applies it when the weaker verdict is not already `holds`.
fn derive_weaker(stronger: &Verdict, a: &Povm, b: &Povm, opts: &RelationOptions) -> Result<Option<Verdict>> {
    let Some(cert) = &stronger.certificate else {
        return Ok(None);
    };
    let Some(target) = stronger.relation.weaker() else {
        return Ok(None);
    };
    let derived = match (stronger.relation, cert) {
        (Relation::Broadcastable, Certificate::Channel(c)) => Certificate::Channel(c.clone()),
        (Relation::OneSideBroadcastable, Certificate::Channel(c)) => {
            let (measure_a, measure_b) = instruments_from_one_side_channel(c, a, b)?;
            Certificate::InstrumentPair { measure_a, measure_b }
        }
        (Relation::MutuallyNondisturbing, Certificate::InstrumentPair { measure_a, .. }) => Certificate::Instrument {
            instrument: measure_a.clone(),
            measured: Subsystem::First,
        },
        (Relation::Nondisturbing, Certificate::Instrument { instrument, measured }) => {
            Certificate::Joint(joint_from_instrument(instrument, *measured, a, b)?)
        }
        _ => return Ok(None),
    };
    let note = format!("derived from the {} certificate", stronger.relation.as_str());
    let flag = if stronger.flags.contains(&Flag::Exact) { Flag::Exact } else { Flag::SufficientOnly };
    Ok(Some(certified(target, derived, a, b, opts, flag, &note)?))
}

/// Propagates `holds` down the hierarchy, then demotes any remaining
/// `holds` that sits above a `fails`.
fn close_downward(report: &mut HierarchyReport, a: &Povm, b: &Povm, opts: &RelationOptions) -> Result<()> {
    for i in 0..report.verdicts.len() - 1 {
        let stronger = &report.verdicts[i];
        if stronger.status != Status::Holds || report.verdicts[i + 1].status == Status::Holds {
            continue;
        }
        if let Some(v) = derive_weaker(stronger, a, b, opts)? {
            if v.status == Status::Holds {
                let boundary = report.verdicts[i + 1].flags.contains(&Flag::NearBoundary);
                report.verdicts[i + 1] = if boundary { v.with_flag(Flag::NearBoundary) } else { v };
            }
        }
    }
    let first_fail = report.verdicts.iter().rposition(|v| v.status == Status::Fails);
    if let Some(k) = first_fail {
        for v in &mut report.verdicts[..k] {
            if v.status == Status::Holds {
                let note = format!("{}; contradicted by a failing weaker relation", v.note);
                *v = Verdict::indeterminate(v.relation, v.residual, note);
            }
        }
    }
    Ok(())
}
