//! Finite-dimensional models of Hilbert-Schmidt operators and genus-one
//! canonical products.
//!
//! The crate is organised bottom-up:
//!
//! * [`numlin`]: dense complex matrices, Hermitian parts, eigenvalues,
//!   singular values, Schatten norms, resolvents.
//! * [`quad`]: adaptive Gauss-Kronrod quadrature and asymptotic slope fits.
//! * [`entire`]: zero sets, canonical products `∏ (1 - z/z_k) e^{z/z_k}` and
//!   their growth functionals (type, weighted log-integrals, proximity).
//! * [`dets`]: Carleman, perturbation and ratio determinants in log domain.
//! * [`verify`]: the named check table, seeded generators and ensembles.
//!
//! Ensembles run on rayon when the `parallel` feature is enabled (default);
//! the serial path produces identical results.

pub mod dets;
pub mod entire;
pub mod error;
pub mod logval;
pub mod numlin;
pub mod par;
pub mod quad;
pub mod verify;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use logval::LogValue;
pub use numlin::ComplexMatrix;

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
