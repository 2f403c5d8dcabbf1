//! Numerical audit toolkit for the best constants of the Lieb-Thirring
//! inequality on the four-dimensional sphere and torus.
//!
//! The crate recomputes the spectral sums, kernel integrals, lattice sums and
//! series bounds behind the constant estimates
//! `0.0844 <= K4(S^4) <= 0.1728` and `0.0190 <= K4(T^4) <= 0.1222`,
//! tests the inequality directly on explicit orthonormal families, and
//! assembles the results into a machine-readable certificate.

// Precondition guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod error;
pub mod extrapolate;
pub mod family;
pub mod kahan;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod sphere_momentum;
pub mod sphere_spectrum;
pub mod torus_lattice;

pub use certificate::{certify, AuditEntry, BoundsCertificate, CertifyOptions};
pub use error::Error;
pub use family::{FamilyId, FamilyRatio, TrigFamily};
pub use quadrature::QuadratureResult;
pub use special::Constants;
pub use sphere_momentum::{EulerMaclaurinAudit, SeriesEstimate};
pub use sphere_spectrum::{ShellSums, SphereShell};
pub use torus_lattice::{LatticeShellTable, PoissonAudit};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
