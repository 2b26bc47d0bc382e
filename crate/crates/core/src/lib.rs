//! Lossy parametric down-conversion in the quantum Langevin picture.
//!
//! Per-frequency transfer coefficients and Langevin kernel integrals feed
//! spectra, count rates, the biphoton wavefunction and the Glauber correlation
//! of signal and idler. Only second moments are computed.

pub mod error;
pub mod linalg;
pub mod materials;
pub mod observables;
pub mod oracle;
pub mod parallel;
pub mod quadrature;
pub mod scenario;
pub mod single_cycle;
pub mod spline;
pub mod transfer;
pub mod types;

pub use error::{PdcError, Result};
