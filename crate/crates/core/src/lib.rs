//! Band structure and skin-effect analysis for the one-dimensional
//! Schrödinger equation with a periodic potential and an imaginary gauge
//! field: `H = -(d/dx + beta)^2 + V(x)`, `V(x + a) = V(x)`.
//!
//! The crate computes complex Bloch spectra over the Brillouin zone,
//! spectral winding numbers and their consequences (skin localization under
//! open boundaries, edge states under semi-infinite boundaries), band-merging
//! critical fields, and closed-form reference models used to cross-check the
//! numerics.
//!
//! Module map:
//! - [`specfun`]: complete elliptic integral `K(m)` and Jacobi `sn(x; m)`.
//! - [`potentials`]: the built-in periodic potentials and their Fourier
//!   coefficients.
//! - [`eig`]: dense complex eigensolver (balanced Hessenberg + shifted QR)
//!   with Hermitian and symmetric-tridiagonal fast paths.
//! - [`bloch`]: plane-wave Hamiltonian and Brillouin-zone sweeps.
//! - [`topology`]: winding numbers, merging scans, and edge-state
//!   classification/synthesis.
//! - [`realspace`]: finite-difference crystals, the gauge-transformation
//!   oracle, and skin-localization metrics.
//! - [`models`]: analytic merging theory for the two-gap elliptic potential
//!   and the two-band Dirac reduction.
//! - [`io`]: CSV/JSON export and tabulated-potential input.

pub mod bloch;
pub mod eig;
pub mod io;
pub mod models;
pub mod potentials;
pub mod realspace;
pub mod specfun;
pub mod topology;

pub use num_complex::Complex64;

/// Crate-wide error type. `Domain` marks invalid inputs or parameter ranges;
/// `Numerical` marks runtime failures of an otherwise valid computation
/// (non-convergence, degenerate normalization, resolution too coarse).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Installs a global thread pool with `n` worker threads. Returns an error
/// only for `n == 0`; calling it twice is a no-op (the first pool wins).
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("thread count must be positive".into()));
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) -> Result<()> {
    Ok(())
}
