//! Numerical engine for band spectra of the 1-D Hill operator
//! -y'' + q(x) y with a complex PT-symmetric 1-periodic potential q.
//!
//! The pipeline: represent q by its Fourier coefficients (`potential`),
//! integrate the monodromy to get the Hill discriminant F(lambda)
//! (`monodromy`), locate and number the Bloch eigenvalues lambda_n(t) as
//! roots of F = 2 cos t (`bloch`), assemble bands with their nonreal tails
//! and complexation points (`bands`), evaluate the coefficient-side
//! perturbation series and reality/finite-gap criteria (`asymptotics`), and
//! scan for spectral singularities (`singularities`). `report` serializes
//! everything into a machine-readable document.

pub mod asymptotics;
pub mod bands;
pub mod bloch;
pub mod error;
pub mod monodromy;
pub mod potential;
pub mod quad;
pub mod report;
pub mod singularities;
pub mod types;

pub use error::{Error, Result};
pub use types::{Rect, Ternary, Tolerances};
