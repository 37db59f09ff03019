//! Small shared value types: ternary verdicts, tolerance bundle, rectangles.

use serde::{Deserialize, Serialize};

/// Verdict of a test that can refute but not always confirm.
///
/// `Yes` means "verified for all scanned indices with margin"; a finite scan
/// never proves the quantified statement itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ternary {
    Yes,
    No,
    Inconclusive,
}

impl Ternary {
    pub fn is_yes(self) -> bool {
        self == Ternary::Yes
    }
}

impl std::fmt::Display for Ternary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Ternary::Yes => "yes",
            Ternary::No => "no",
            Ternary::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Tolerance bundle used across the pipeline.
///
/// Fields suffixed `_rel` are scale-aware: the effective tolerance at energy
/// `lambda` is `value * max(1, |lambda|)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Max |Im q_n| for a potential to count as PT-symmetric.
    pub tau_pt: f64,
    /// Wronskian residual bound for one monodromy integration.
    pub tau_w: f64,
    /// |Im F(lambda)| bound for PT-symmetric potentials at real lambda.
    pub tau_f: f64,
    /// Root residual |F(lambda) - 2 cos t|, relative.
    pub tau_root_rel: f64,
    /// |F'| (and |F''|) threshold separating simple from multiple roots.
    pub tau_mult: f64,
    /// Distance below which two roots are treated as one cluster, relative.
    pub tau_cluster_rel: f64,
    /// Conjugation-closure distance for eigenvalue multisets.
    pub tau_conj: f64,
    /// |Im lambda| bound classifying a band sample as real, relative.
    pub tau_real_rel: f64,
    /// Abutting real segments closer than this merge into one block.
    pub merge_tol: f64,
    /// Adaptive quadrature stops when successive estimates differ by less.
    pub quad_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tau_pt: 1e-10,
            tau_w: 1e-8,
            tau_f: 1e-9,
            tau_root_rel: 1e-9,
            tau_mult: 1e-6,
            tau_cluster_rel: 1e-6,
            tau_conj: 1e-7,
            tau_real_rel: 1e-7,
            merge_tol: 1e-6,
            quad_tol: 1e-12,
        }
    }
}

impl Tolerances {
    /// Scale factor for relative tolerances at energy `lambda`.
    pub fn scale(lambda: num_complex::Complex64) -> f64 {
        lambda.norm().max(1.0)
    }

    pub fn tau_root(&self, lambda: num_complex::Complex64) -> f64 {
        self.tau_root_rel * Self::scale(lambda)
    }

    pub fn tau_cluster(&self, lambda: num_complex::Complex64) -> f64 {
        self.tau_cluster_rel * Self::scale(lambda)
    }

    pub fn tau_real(&self, lambda: num_complex::Complex64) -> f64 {
        self.tau_real_rel * Self::scale(lambda)
    }
}

/// Axis-aligned closed rectangle in the complex energy plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        assert!(re_min < re_max && im_min < im_max, "degenerate rectangle");
        Rect { re_min, re_max, im_min, im_max }
    }

    /// Rectangle centered at `c` with half-widths `hw` (real) and `hh` (imag).
    pub fn centered(c: num_complex::Complex64, hw: f64, hh: f64) -> Self {
        Rect::new(c.re - hw, c.re + hw, c.im - hh, c.im + hh)
    }

    pub fn center(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, z: num_complex::Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Containment with an absolute slack on every side.
    pub fn contains_with_margin(&self, z: num_complex::Complex64, margin: f64) -> bool {
        z.re >= self.re_min - margin
            && z.re <= self.re_max + margin
            && z.im >= self.im_min - margin
            && z.im <= self.im_max + margin
    }

    /// Grow every side by `d`.
    pub fn inflate(&self, d: f64) -> Rect {
        Rect::new(self.re_min - d, self.re_max + d, self.im_min - d, self.im_max + d)
    }
}
