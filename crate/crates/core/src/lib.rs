//! Finite-dimensional quantum observables, channels and instruments, and the
//! relations between pairs of observables that describe how they can be
//! measured together: compatibility, nondisturbance, mutual nondisturbance,
//! one-side broadcastability and broadcastability.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line tool live in the `obsrel-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channel;
pub mod error;
pub mod feasibility;
pub mod joint;
pub mod linalg;
pub mod povm;
pub mod relations;
pub mod sample;
pub mod tol;

pub use channel::{Channel, CheckReport, Instrument};
pub use error::{Error, Result};
pub use feasibility::{FeasibilityProblem, SolverOptions, SolverOutcome, SolverStatus};
pub use joint::JointObservable;
pub use linalg::{ComplexMatrix, DensityMatrix, HermitianEigen, Subsystem};
pub use num_complex::Complex64;
pub use povm::{OrthonormalBasis, Povm, ProbabilityDistribution};
pub use relations::{Certificate, Flag, HierarchyReport, Relation, Status, Verdict};
