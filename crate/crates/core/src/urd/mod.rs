//! Unbounded rough drivers and solution certificates.

mod certificate;
mod driver;
mod remainder;

pub use certificate::{certify_solution, CertificateDefects, CertificateNorms, CertifyOptions, SolutionCertificate, Verdict};
pub(crate) use driver::{a1_from_modes, a2_from_modes};
pub use driver::{a1_apply, a2_apply, driver_control, driver_norm_probe, mode_operators, DriverNormReport, DriverPair};
pub use remainder::{remainder_compute, remainder_difference, residual_compute, Drift, RemainderReport};
