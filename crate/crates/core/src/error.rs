//! Error types shared by the whole engine.

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// The potential has neither a coefficient table entry nor a closed form
    /// from which the requested quantity could be computed.
    #[error("no representation available for {0}")]
    RepresentationMissing(String),

    /// An operation was called outside its domain (non-PT-symmetric input,
    /// nonzero mean, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// |lambda| exceeds the configured energy cap of the integrator.
    #[error("|lambda| = {magnitude:.3e} exceeds the energy cap {cap:.3e}")]
    Magnitude { magnitude: f64, cap: f64 },

    /// A boundary winding integral failed to stabilize on an integer.
    #[error("contour accuracy failure: {0}")]
    ContourAccuracy(String),

    /// Newton refinement did not converge; the root is reported unrefined.
    #[error("root refinement stalled at residual {residual:.3e} near {lambda}")]
    RootRefinement { lambda: Complex64, residual: f64 },

    /// Eigenvalue numbering produced an unassigned root or an index collision.
    #[error("numbering inconsistency: {0}")]
    NumberingInconsistency(String),

    /// The dense eigensolver backing the Galerkin oracle failed.
    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),

    /// A perturbation-series denominator fell below the resonance guard.
    #[error("resonant denominator at partial sum {index} (|denom| = {denom:.3e})")]
    Resonance { index: i32, denom: f64 },

    /// A Fourier table was built too short for the requested index.
    #[error("coefficient table too short: need index {needed}, have {available}")]
    Range { needed: i32, available: i32 },

    /// A precondition on the inputs failed (e.g. ab != cd for isospectrality).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The projection-norm diagnostic is undefined at a multiple eigenvalue.
    #[error("projection diagnostic undefined at multiple eigenvalue {0}")]
    UndefinedDiagnostic(Complex64),

    /// A computed structure contradicts what the theory guarantees; usually a
    /// sign that tolerances are too loose for the case at hand.
    #[error("theory violation diagnostic: {0}")]
    TheoryViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
