//! Curvature and asymptotic structure of invariant metrics on compact
//! homogeneous spaces `G/H`, computed from Lie algebra structure constants.
//!
//! Everything is expressed at the Lie algebra level. A space is described by
//! a compact Lie algebra with an ad-invariant inner product `Q` (declared
//! orthonormal in the given basis), an isotropy subalgebra `h`, and an
//! orthogonal decomposition of the reductive complement `m` into
//! `Ad(H)`-irreducible blocks. Invariant metrics diagonal in such a
//! decomposition are parameterized by one positive eigenvalue per block, and
//! unit volume geodesic rays through the normal metric scale the blocks
//! exponentially.
//!
//! The crate computes:
//!
//! - structural data: brackets, Killing form, Casimir operators, subalgebra
//!   and toral tests, normalizers ([`lie`]);
//! - irreducible decompositions and the coefficient tables (triple products,
//!   Casimir and Killing coefficients) that drive every curvature formula
//!   ([`isotypic`]);
//! - the geometry of the space of metrics: geodesics, unit-volume
//!   normalization, submersion metrics ([`metric`]);
//! - sectional, Ricci and scalar curvature, the full curvature operator on
//!   bivectors, and curvature norms, with a slow general-metric oracle
//!   cross-checking the fast diagonal formulas ([`curvature`]);
//! - asymptotics of diverging metric sequences: eigenvalue partitions,
//!   submersion directions and flags, geodesic curvature scans, and the
//!   sequence classifier that extracts the toral/non-toral subalgebra
//!   structure of any diverging family with bounded curvature
//!   ([`asymptotics`]);
//! - bracket norms and the algebraic collapse classification ([`collapse`]);
//! - a catalog of built-in example spaces with their reference sequences
//!   ([`catalog`]).

pub mod asymptotics;
pub mod catalog;
pub mod collapse;
pub mod curvature;
mod error;
pub mod isotypic;
pub mod lie;
pub(crate) mod linalg;
pub mod metric;
pub mod space;

pub use error::{Error, Result};
pub use space::HomogeneousSpace;

/// Default tolerance for structural residuals (Jacobi, antisymmetry,
/// orthonormality, subalgebra closure). Inputs are exact small integers or
/// halves, so anything above this is a genuine violation rather than
/// accumulated rounding.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default relative tolerance for clustering eigenvalues of a tangent
/// direction into equal-value classes.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Default seed for the randomized splitting and sampling routines.
pub const DEFAULT_SEED: u64 = 7;
