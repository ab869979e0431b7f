//! Normal extremal trajectories of the sub-Lorentzian structure on the Engel
//! group.
//!
//! The Engel group is the four-dimensional nilpotent Lie group with growth
//! vector (2,3,4). Equipped with a Lorentzian metric of signature (-,+) on
//! its rank-2 horizontal distribution, its normal extremals (in the sense of
//! the Pontryagin maximum principle) admit closed-form parametrizations in
//! Jacobi elliptic functions, one per invariant stratum of the vertical
//! (costate) subsystem.
//!
//! The crate provides:
//!
//! * [`elliptic`]: Jacobi elliptic functions `sn`, `cn`, `dn`, the amplitude,
//!   and the incomplete second-kind integral, for squared modulus anywhere in
//!   `(-inf, 1)` (negative values are first-class).
//! * [`engel`]: the group law, the left-invariant frame, and causal
//!   classification of horizontal vectors.
//! * [`vertical`]: the Hamiltonian system of the maximum principle, the
//!   energy integral, the stratification of the covector space, and
//!   rectifying coordinates for the pendulum-like vertical subsystem.
//! * [`expmap`]: the exponential map, with closed-form trajectories for
//!   every stratum (timelike, spacelike, lightlike), the explosion time, and
//!   a validator that cross-checks every formula against a fixed-step
//!   Runge-Kutta oracle.
//! * [`symmetry`]: the discrete symmetry group acting on covectors and on
//!   endpoints, with fixed-point predicates in preimage and image.
//! * [`maxwell`]: the auxiliary functions whose positivity controls the
//!   Maxwell sets, first-root searches, and cut-time bounds.
//! * [`validate`]: seedable invariant suites backing `engelsl validate`.
//!
//! Conventions: the trajectory always starts at the group identity; the
//! timelike chart puts the costate on the level `H = -1/2` with
//! `h1 = branch * cosh(theta)`, `h2 = sinh(theta)`; the spacelike chart puts
//! it on `H = +1/2` with `h1 = sinh(theta)`, `h2 = branch * cosh(theta)`.

pub mod cli;
pub mod elliptic;
pub mod engel;
pub mod expmap;
pub mod maxwell;
pub mod rk4;
pub mod symmetry;
pub mod util;
pub mod validate;
pub mod vertical;

/// Crate-wide error type.
///
/// The CLI maps `Domain`, `Stratum`, `Overflow`, `InversionFailure` and
/// `UnresolvedBoundary` to exit code 2; argument parse failures exit 1 and a
/// failed validation run exits 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument left the mathematical domain of the operation
    /// (for example a squared modulus >= 1, or a time past the explosion
    /// time of a trajectory).
    #[error("domain error: {0}")]
    Domain(String),
    /// The covector lies in a stratum the operation is not defined on.
    #[error("stratum error: {0}")]
    Stratum(String),
    /// A trajectory or flow left the range of double precision.
    #[error("overflow: {0}")]
    Overflow(String),
    /// A nonlinear solve (chart inversion) failed to converge.
    #[error("inversion failure: {0}")]
    InversionFailure(String),
    /// A covector sits on the boundary between two strata in a way the
    /// zero-band rules cannot break deterministically.
    #[error("unresolved boundary: {0}")]
    UnresolvedBoundary(String),
    /// I/O error from the CLI layer.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Domain(format!("csv error: {other:?}")),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Domain(format!("json error: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
