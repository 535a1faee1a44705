//! Library-wide numerical tolerances.

/// Maximum Frobenius deviation `‖m − m†‖` accepted as Hermitian.
pub const HERM: f64 = 1e-9;
/// Eigenvalues down to `-PSD` count as nonnegative.
pub const PSD: f64 = 1e-9;
/// Normalization tolerance for traces and effect sums.
pub const TRACE: f64 = 1e-9;
/// General numeric identities (commutators, diagonality).
pub const NUM: f64 = 1e-8;
/// Per-identity Frobenius tolerance for certificate verification.
pub const CERT: f64 = 1e-7;
/// Relative singular-value threshold for numerical rank.
pub const RANK: f64 = 1e-8;
/// Eigenvalues below this are dropped when building Kraus families.
pub const KRAUS_CUTOFF: f64 = 1e-12;
