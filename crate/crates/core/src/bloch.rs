//! Bloch eigenvalues: roots of F(lambda) = 2 cos t, located by the argument
//! principle, refined by Newton, and numbered into continuous curves
//! lambda_n(t) over [0, pi].
//!
//! Numbering convention: indices |n| <= n_cut are seeded at the reference
//! quasimomentum t = pi/2 by sorting the roots of the low region by real part
//! and interleaving 0, -1, 1, -2, 2, ...; larger |n| are seeded inside disks
//! around the free levels (2 pi n + t)^2. Curves are continued in t by
//! warm-started Newton with collision recovery, so every root in the scanned
//! region carries exactly one index counting multiplicity.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use ndarray::Array2;
use ndarray_linalg::Eig;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::monodromy::DiscriminantEngine;
use crate::potential::PotentialSpec;
use crate::types::{Rect, Ternary, Tolerances};

/// One numbered root of F(lambda) = 2 cos t.
#[derive(Debug, Clone, Copy)]
pub struct BlochEigenvalue {
    pub n: i32,
    pub t: f64,
    pub lambda: Complex64,
    pub multiplicity: u32,
    pub simple: bool,
    /// |F(lambda) - 2 cos t| at the reported lambda.
    pub residual: f64,
}

/// An unnumbered root cluster found by a region query.
#[derive(Debug, Clone, Copy)]
pub struct RootCluster {
    pub lambda: Complex64,
    pub multiplicity: u32,
    pub residual: f64,
    pub df: Complex64,
    pub d2f: Complex64,
}

/// Numerical surrogates for the non-constructive localization constants.
#[derive(Debug, Clone)]
pub struct LocalizationConfig {
    /// End-zone half width; must lie in (0, 1/(15 pi)).
    pub h: f64,
    /// Indices with |n| <= n_cut are numbered by continuity from t = pi/2.
    pub n_cut: i32,
    /// Disk radii are disk_margin * max(15 pi n h, 1).
    pub disk_margin: f64,
    /// Half height of the low-region search rectangle; 0 = auto.
    pub rect_height: f64,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        LocalizationConfig { h: 0.02, n_cut: 8, disk_margin: 2.0, rect_height: 0.0 }
    }
}

impl LocalizationConfig {
    pub fn validate(&self) -> Result<()> {
        let bound = 1.0 / (15.0 * PI);
        if !(self.h > 0.0 && self.h < bound) {
            return Err(Error::Domain(format!(
                "h = {} outside (0, {:.6})",
                self.h, bound
            )));
        }
        if self.n_cut < 1 {
            return Err(Error::Domain("n_cut must be >= 1".into()));
        }
        if self.disk_margin < 1.0 {
            return Err(Error::Domain("disk_margin must be >= 1".into()));
        }
        Ok(())
    }
}

/// The t sample grid: 65 uniform points on [h, pi-h], geometric refinement
/// (ratio 1/2 down to 1e-4) inside the end zones, plus the endpoints.
pub fn default_t_grid(loc: &LocalizationConfig) -> Vec<f64> {
    let h = loc.h;
    let mut grid = vec![0.0, PI];
    let mut x = h;
    while x >= 1e-4 {
        grid.push(x);
        grid.push(PI - x);
        x *= 0.5;
    }
    for j in 0..=64 {
        grid.push(h + j as f64 * (PI - 2.0 * h) / 64.0);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}

// ---------------------------------------------------------------------------
// Winding numbers by phase tracking
// ---------------------------------------------------------------------------

/// Winding number of g along the closed polygon through `corners`, by
/// adaptive phase tracking: every segment is split until its phase increment
/// is below pi/2, which pins the branch of the argument.
///
/// Phase tracking on a coarse mesh can alias (a true change of 2 pi wraps to
/// 0), so each polygon edge is pre-split into `presample` pieces before the
/// adaptive pass; the caller sizes `presample` from an a-priori bound on the
/// number of zeros near the contour.
fn winding_polygon(
    g: &mut dyn FnMut(Complex64) -> Result<Complex64>,
    corners: &[Complex64],
    presample: usize,
    floor: f64,
    budget: &mut u32,
) -> Result<f64> {
    let mut total = 0.0;
    let mut val_at = |z: Complex64, budget: &mut u32| -> Result<Complex64> {
        if *budget == 0 {
            return Err(Error::ContourAccuracy("evaluation budget exhausted".into()));
        }
        *budget -= 1;
        let v = g(z)?;
        if v.norm() < floor {
            return Err(Error::ContourAccuracy(format!(
                "boundary point {z} too close to a root (|g| = {:.3e} < {floor:.3e})",
                v.norm()
            )));
        }
        Ok(v)
    };
    let m = presample.max(1);
    for w in 0..corners.len() {
        let z0 = corners[w];
        let z1 = corners[(w + 1) % corners.len()];
        let mut nodes = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let z = z0 + (z1 - z0) * (k as f64 / m as f64);
            nodes.push((z, val_at(z, budget)?));
        }
        for pair in nodes.windows(2) {
            let (a, va) = pair[0];
            let (b, vb) = pair[1];
            // Stack of (z_start, v_start, z_end, v_end, depth).
            let mut stack = vec![(a, va, b, vb, 0u32)];
            while let Some((a, va, b, vb, depth)) = stack.pop() {
                let dphi = (vb / va).arg();
                if dphi.abs() <= std::f64::consts::FRAC_PI_2 && depth > 0 {
                    total += dphi;
                    continue;
                }
                if depth > 48 {
                    return Err(Error::ContourAccuracy(
                        "phase tracking failed to resolve a segment".into(),
                    ));
                }
                let mid = 0.5 * (a + b);
                let vm = val_at(mid, budget)?;
                stack.push((mid, vm, b, vb, depth + 1));
                stack.push((a, va, mid, vm, depth + 1));
            }
        }
    }
    Ok(total / (2.0 * PI))
}

/// Pre-split count for a rectangle boundary: proportional to the a-priori
/// count of eigenvalues below the far end of the rectangle (the counting
/// function of the free operator grows like sqrt(lambda)/pi).
fn presample_for_rect(rect: &Rect) -> usize {
    let far = rect.re_max.abs().max(rect.re_min.abs()).max(rect.im_max.abs()).max(1.0);
    4 + 2 * (far.sqrt() / PI).ceil() as usize
}

fn apply_cut(rect: &Rect, vertical: bool, pos: f64) -> (Rect, Rect) {
    if vertical {
        (
            Rect::new(rect.re_min, pos, rect.im_min, rect.im_max),
            Rect::new(pos, rect.re_max, rect.im_min, rect.im_max),
        )
    } else {
        (
            Rect::new(rect.re_min, rect.re_max, rect.im_min, pos),
            Rect::new(rect.re_min, rect.re_max, pos, rect.im_max),
        )
    }
}

fn rect_corners(r: &Rect) -> [Complex64; 4] {
    [
        Complex64::new(r.re_min, r.im_min),
        Complex64::new(r.re_max, r.im_min),
        Complex64::new(r.re_max, r.im_max),
        Complex64::new(r.re_min, r.im_max),
    ]
}

/// Root-search context for one quasimomentum: g(lambda) = F(lambda) - rhs.
struct Problem<'a> {
    eng: &'a DiscriminantEngine,
    rhs: Complex64,
    tol: &'a Tolerances,
}

impl Problem<'_> {
    fn g(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(self.eng.discriminant(lambda)? - self.rhs)
    }

    /// Hard guard against boundary samples landing on a root. Boundary
    /// values near an interior double root are legitimately of order
    /// F'' d^2, so this floor only catches essentially exact hits; roots
    /// close to (but off) the contour surface as unresolvable phase
    /// segments instead, which also raises a contour error.
    fn floor(&self, scale_at: Complex64) -> f64 {
        1e-13 * Tolerances::scale(scale_at)
    }

    fn winding_rect(&self, rect: &Rect, budget: &mut u32) -> Result<i64> {
        let floor = self.floor(rect.center());
        let mut g = |z| self.g(z);
        let w = winding_polygon(&mut g, &rect_corners(rect), presample_for_rect(rect), floor, budget)?;
        let rounded = w.round();
        if (w - rounded).abs() > 0.25 {
            return Err(Error::ContourAccuracy(format!(
                "winding {w:.3} did not stabilize on an integer"
            )));
        }
        Ok(rounded as i64)
    }

    /// Winding with boundary auto-perturbation: the rectangle is inflated by
    /// tiny increments when a boundary sample lands on a root.
    fn winding_rect_perturbed(&self, rect: &Rect, budget: &mut u32) -> Result<(i64, Rect)> {
        let mut r = *rect;
        let mut last_err = None;
        for attempt in 0..6 {
            match self.winding_rect(&r, budget) {
                Ok(w) => return Ok((w, r)),
                Err(e @ Error::ContourAccuracy(_)) => {
                    last_err = Some(e);
                    // Move the boundary far enough to clear whatever root it
                    // grazed: a fixed fraction of the rectangle size.
                    let bump = (attempt as f64 + 1.0)
                        * (1e-3 * rect.diameter()
                            + 3e-6 * Tolerances::scale(r.center()).sqrt().max(1.0));
                    r = r.inflate(bump);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap())
    }

    /// Newton iteration on g; returns the refined root with its sample data.
    fn newton(&self, seed: Complex64, max_iter: u32) -> Result<RootCluster> {
        let mut lam = seed;
        let mut best: Option<RootCluster> = None;
        for _ in 0..max_iter {
            let s = self.eng.sample(lam)?;
            let gval = s.f - self.rhs;
            let res = gval.norm();
            let cand = RootCluster {
                lambda: lam,
                multiplicity: 1,
                residual: res,
                df: s.df,
                d2f: s.d2f,
            };
            if best.as_ref().map_or(true, |b| res < b.residual) {
                best = Some(cand);
            }
            // Drive the residual to the integrator noise floor; tau_root is
            // the acceptance threshold, not the stopping target. Near double
            // roots the root location error is sqrt(residual / F''), so
            // stopping early costs quadratically.
            let target = 1e-13 * Tolerances::scale(lam);
            if res <= target {
                break;
            }
            // Plain Newton while F' dominates; otherwise solve the local
            // quadratic model, which keeps quadratic convergence through
            // near-double roots where G/F' stalls.
            let quadratic_regime = s.df.norm_sqr() < 8.0 * gval.norm() * s.d2f.norm();
            let step = if !quadratic_regime && s.df.norm() > 1e-280 {
                gval / s.df
            } else if s.d2f.norm() > 1e-280 {
                let disc = (s.df * s.df - 2.0 * gval * s.d2f).sqrt();
                let d1 = (-s.df + disc) / s.d2f;
                let d2 = (-s.df - disc) / s.d2f;
                -(if d1.norm() <= d2.norm() { d1 } else { d2 })
            } else if s.df.norm() > 1e-280 {
                gval / s.df
            } else {
                return Err(Error::RootRefinement { lambda: lam, residual: res });
            };
            // Keep warm starts from escaping their basin.
            let cap = 0.25 * Tolerances::scale(lam);
            let step = if step.norm() > cap { step * (cap / step.norm()) } else { step };
            lam -= step;
        }
        let out = best.unwrap();
        if out.residual > self.tol.tau_root(out.lambda) {
            return Err(Error::RootRefinement { lambda: out.lambda, residual: out.residual });
        }
        Ok(out)
    }

    /// Newton on F' (critical point), used to polish double roots.
    fn refine_critical(&self, seed: Complex64, max_iter: u32) -> Result<RootCluster> {
        let mut lam = seed;
        for _ in 0..max_iter {
            let s = self.eng.sample(lam)?;
            if s.d2f.norm() < 1e-280 {
                break;
            }
            let step = s.df / s.d2f;
            lam -= step;
            if step.norm() < 1e-15 * Tolerances::scale(lam) {
                break;
            }
        }
        let s = self.eng.sample(lam)?;
        Ok(RootCluster {
            lambda: lam,
            multiplicity: 2,
            residual: (s.f - self.rhs).norm(),
            df: s.df,
            d2f: s.d2f,
        })
    }

    /// All roots inside `rect`, counting multiplicity, by recursive
    /// subdivision of the argument-principle count.
    fn roots_in_rect(&self, rect: Rect, budget: &mut u32, depth: u32) -> Result<Vec<RootCluster>> {
        let (w, rect) = self.winding_rect_perturbed(&rect, budget)?;
        let mut roots = self.roots_in_counted_rect(rect, w, budget, depth)?;
        let total: i64 = roots.iter().map(|r| r.multiplicity as i64).sum();
        if total != w {
            return Err(Error::ContourAccuracy(format!(
                "isolated {total} roots (counting multiplicity) but the boundary winds {w} times"
            )));
        }
        // Double clusters sit at critical points of F; polishing there is far
        // more accurate than Newton on F itself.
        for r in roots.iter_mut() {
            if r.multiplicity >= 2 && r.df.norm() < self.tol.tau_mult {
                if let Ok(p) = self.refine_critical(r.lambda, 40) {
                    if p.residual <= self.tol.tau_root(p.lambda) {
                        let m = r.multiplicity;
                        *r = p;
                        r.multiplicity = m;
                    }
                }
            }
        }
        Ok(roots)
    }

    fn roots_in_counted_rect(
        &self,
        rect: Rect,
        w: i64,
        budget: &mut u32,
        depth: u32,
    ) -> Result<Vec<RootCluster>> {
        if w == 0 {
            return Ok(Vec::new());
        }
        if depth > 64 {
            return Err(Error::ContourAccuracy("subdivision depth exceeded".into()));
        }
        let scale = Tolerances::scale(rect.center());
        let cluster_diam = self.tol.tau_cluster_rel * scale;

        if w == 1 {
            if let Ok(root) = self.newton(rect.center(), 60) {
                if rect.contains_with_margin(root.lambda, 1e-9 * scale) {
                    return Ok(vec![root]);
                }
            }
        }
        if w == 2 {
            // Double roots sit at critical points of F; when the critical
            // point nearest the center is itself a root, the pair is a
            // genuine (or numerically unresolvable) double and no
            // subdivision can ever separate it.
            if let Ok(p) = self.refine_critical(rect.center(), 40) {
                if rect.contains_with_margin(p.lambda, 1e-9 * scale)
                    && p.residual <= self.tol.tau_root(p.lambda)
                {
                    return Ok(vec![p]);
                }
            }
            // Otherwise two separated roots: the second is reachable from
            // the first through the local quadratic model. The parent
            // winding count keeps this complete.
            if let Ok(r1) = self.newton(rect.center(), 60) {
                if rect.contains_with_margin(r1.lambda, 1e-9 * scale) && r1.d2f.norm() > 1e-280 {
                    let seed2 = r1.lambda - 2.0 * r1.df / r1.d2f;
                    if let Ok(r2) = self.newton(seed2, 60) {
                        let split = (r2.lambda - r1.lambda).norm();
                        let snap = self
                            .tol
                            .tau_cluster(r1.lambda)
                            .max(4.0 * root_uncertainty(&r1, self.tol))
                            .max(4.0 * root_uncertainty(&r2, self.tol));
                        if rect.contains_with_margin(r2.lambda, 1e-9 * scale) && split > snap {
                            return Ok(vec![r1, r2]);
                        }
                    }
                }
            }
        }
        if rect.diameter() <= cluster_diam {
            // An unsplittable cluster: refine as a multiple root.
            let polish = self
                .refine_critical(rect.center(), 40)
                .or_else(|_| self.newton(rect.center(), 60));
            let mut root = polish?;
            root.multiplicity = w as u32;
            return Ok(vec![root]);
        }

        // Try candidate cuts in decreasing boundary-clearance order. A cut
        // fails when a root (or a conjugate pair) sits on it: the child
        // windings then do not add up and the next candidate is tried.
        let cuts = self.candidate_cuts(&rect)?;
        let mut last_err: Option<Error> = None;
        for &(_, vertical, pos) in &cuts {
            let (ra, rb) = apply_cut(&rect, vertical, pos);
            let attempt = (|| -> Result<(Vec<RootCluster>, u32)> {
                let mut b = *budget;
                let (wa, ra) = self.winding_rect_perturbed(&ra, &mut b)?;
                let (wb, rb) = self.winding_rect_perturbed(&rb, &mut b)?;
                if wa + wb != w {
                    return Err(Error::ContourAccuracy(format!(
                        "child windings {wa}+{wb} != parent {w}"
                    )));
                }
                let mut roots = self.roots_in_counted_rect(ra, wa, &mut b, depth + 1)?;
                roots.extend(self.roots_in_counted_rect(rb, wb, &mut b, depth + 1)?);
                Ok((merge_clusters(roots, self.tol), b))
            })();
            match attempt {
                Ok((roots, b)) => {
                    *budget = b;
                    return Ok(roots);
                }
                Err(e @ Error::ContourAccuracy(_)) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::ContourAccuracy("no viable subdivision cut".into())))
    }

    /// Candidate cuts through the rectangle, best boundary clearance first.
    /// Both orientations are offered so a cut can dodge conjugate pairs
    /// (which defeat vertical cuts) and strings of real roots (horizontal).
    fn candidate_cuts(&self, rect: &Rect) -> Result<Vec<(f64, bool, f64)>> {
        let mut cuts = Vec::new();
        let long_vertical = rect.width() >= rect.height();
        for &vertical in &[long_vertical, !long_vertical] {
            let span = if vertical { rect.width() } else { rect.height() };
            if span < 0.05 * rect.diameter() {
                continue;
            }
            for &frac in &[0.5, 0.42, 0.58, 0.34, 0.66] {
                let pos = if vertical {
                    rect.re_min + frac * rect.width()
                } else {
                    rect.im_min + frac * rect.height()
                };
                let mut min_g = f64::INFINITY;
                for k in 0..9 {
                    let s = (k as f64 + 0.5) / 9.0;
                    let z = if vertical {
                        Complex64::new(pos, rect.im_min + s * rect.height())
                    } else {
                        Complex64::new(rect.re_min + s * rect.width(), pos)
                    };
                    min_g = min_g.min(self.g(z)?.norm());
                }
                // Clearance is weighted so the long side is preferred unless
                // its cuts are clearly worse.
                let weight = if vertical == long_vertical { 2.0 } else { 1.0 };
                cuts.push((min_g * weight, vertical, pos));
            }
        }
        cuts.sort_by(|a, b| b.0.total_cmp(&a.0));
        cuts.truncate(6);
        Ok(cuts)
    }

    /// Winding of g around a circle (for local multiplicity counts).
    fn winding_circle(&self, center: Complex64, radius: f64, budget: &mut u32) -> Result<i64> {
        let corners: Vec<Complex64> = (0..24)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 24.0;
                center + radius * Complex64::new(a.cos(), a.sin())
            })
            .collect();
        let floor = 0.0; // circle samples may legitimately be tiny near a cluster
        let mut g = |z| self.g(z);
        let w = winding_polygon(&mut g, &corners, 1, floor, budget)?;
        let rounded = w.round();
        if (w - rounded).abs() > 0.25 {
            return Err(Error::ContourAccuracy("circle winding unstable".into()));
        }
        Ok(rounded as i64)
    }
}

/// Location uncertainty of a refined root: near a double root Newton leaves
/// lambda about sqrt(2 residual / |F''|) from the truth.
fn root_uncertainty(r: &RootCluster, tol: &Tolerances) -> f64 {
    if r.df.norm() >= tol.tau_mult && r.d2f.norm() > 1e-280 {
        (2.0 * r.residual / r.d2f.norm()).sqrt().min(r.residual / r.df.norm())
    } else if r.d2f.norm() > 1e-280 {
        (2.0 * r.residual / r.d2f.norm()).sqrt()
    } else {
        0.0
    }
}

fn merge_clusters(mut roots: Vec<RootCluster>, tol: &Tolerances) -> Vec<RootCluster> {
    roots.sort_by(|a, b| (a.lambda.re, a.lambda.im).partial_cmp(&(b.lambda.re, b.lambda.im)).unwrap());
    let mut out: Vec<RootCluster> = Vec::with_capacity(roots.len());
    for r in roots {
        if let Some(last) = out.last_mut() {
            let snap = tol
                .tau_cluster(r.lambda)
                .max(4.0 * root_uncertainty(&r, tol))
                .max(4.0 * root_uncertainty(last, tol));
            if (last.lambda - r.lambda).norm() <= snap {
                last.multiplicity += r.multiplicity;
                if r.residual < last.residual {
                    let m = last.multiplicity;
                    *last = r;
                    last.multiplicity = m;
                }
                continue;
            }
        }
        out.push(r);
    }
    out
}

// ---------------------------------------------------------------------------
// Public region query and multiplicity
// ---------------------------------------------------------------------------

/// All eigenvalues of L_t inside `rect`, counting multiplicity. The root
/// count comes from the argument principle on the rectangle boundary; each
/// root is isolated by recursive subdivision and refined by Newton.
pub fn eigenvalues_in_region(
    eng: &DiscriminantEngine,
    t: f64,
    rect: Rect,
    tol: &Tolerances,
) -> Result<Vec<RootCluster>> {
    let prob = Problem { eng, rhs: Complex64::new(2.0 * t.cos(), 0.0), tol };
    let mut budget = 200_000;
    prob.roots_in_rect(rect, &mut budget, 0)
}

/// Newton refinement of a root of F(lambda) = 2 cos t from a warm seed.
pub fn refine_root(
    eng: &DiscriminantEngine,
    t: f64,
    seed: Complex64,
    tol: &Tolerances,
) -> Result<RootCluster> {
    let prob = Problem { eng, rhs: Complex64::new(2.0 * t.cos(), 0.0), tol };
    prob.newton(seed, 60)
}

/// Newton on F' from a warm seed: polishes double roots, which sit at
/// critical points of F.
pub fn refine_critical_point(
    eng: &DiscriminantEngine,
    t: f64,
    seed: Complex64,
    tol: &Tolerances,
) -> Result<RootCluster> {
    let prob = Problem { eng, rhs: Complex64::new(2.0 * t.cos(), 0.0), tol };
    prob.refine_critical(seed, 40)
}

/// Multiplicity of a root lambda of F = 2 cos t: 1 while |F'| clears
/// tau_mult, else 2 while |F''| does, else the local winding count.
pub fn multiplicity_of(
    eng: &DiscriminantEngine,
    lambda: Complex64,
    t: f64,
    tol: &Tolerances,
) -> Result<u32> {
    let s = eng.sample(lambda)?;
    if s.df.norm() >= tol.tau_mult {
        return Ok(1);
    }
    if s.d2f.norm() >= tol.tau_mult {
        return Ok(2);
    }
    let prob = Problem { eng, rhs: Complex64::new(2.0 * t.cos(), 0.0), tol };
    let mut budget = 20_000;
    let r = 1e-3 * Tolerances::scale(lambda).sqrt().max(1.0);
    let w = prob.winding_circle(lambda, r, &mut budget)?;
    Ok(w.max(0) as u32)
}

// ---------------------------------------------------------------------------
// Galerkin matrix oracle
// ---------------------------------------------------------------------------

/// Eigenvalues of the (2M+1) x (2M+1) Fourier-Galerkin truncation of L_t:
/// diagonal (2 pi k + t)^2, entry (k, l) = q_{k-l}. Sorted by real part.
/// Used only as an independent cross-check of the shooting pipeline.
pub fn matrix_oracle(q: &PotentialSpec, t: f64, m: i32) -> Result<Vec<Complex64>> {
    if m < 8 {
        return Err(Error::Domain("oracle needs M >= 8".into()));
    }
    let dim = (2 * m + 1) as usize;
    let mut a = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
    for k in -m..=m {
        for l in -m..=m {
            let (i, j) = ((k + m) as usize, (l + m) as usize);
            if k == l {
                let d = 2.0 * PI * k as f64 + t;
                a[(i, j)] = Complex64::new(d * d, 0.0);
            } else {
                let c = q.coeff(k - l);
                if c != Complex64::new(0.0, 0.0) {
                    a[(i, j)] = c;
                }
            }
        }
    }
    let (vals, _) = a.eig().map_err(|e| Error::OracleUnavailable(e.to_string()))?;
    let mut out: Vec<Complex64> = vals.to_vec();
    out.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Numbering
// ---------------------------------------------------------------------------

/// Numbered eigenvalue curves over a t grid.
#[derive(Debug, Clone)]
pub struct BandCurves {
    pub t_grid: Vec<f64>,
    pub curves: BTreeMap<i32, Vec<BlochEigenvalue>>,
}

impl BandCurves {
    /// Sampled curve for index n.
    pub fn curve(&self, n: i32) -> Option<&[BlochEigenvalue]> {
        self.curves.get(&n).map(|v| v.as_slice())
    }
}

/// The free-operator level for index n at quasimomentum t.
pub fn free_level(n: i32, t: f64) -> f64 {
    let v = 2.0 * PI * n as f64 + t;
    v * v
}

fn interleaved_low_indices(n_cut: i32) -> Vec<i32> {
    let mut order = vec![0];
    for k in 1..=n_cut {
        order.push(-k);
        order.push(k);
    }
    order
}

/// Search rectangle containing exactly the eigenvalues with |n| <= n_cut at
/// an interior quasimomentum.
fn low_region(q: &PotentialSpec, t: f64, n_cut: i32, rect_height: f64) -> Rect {
    let s = q.coeff_abs_sum();
    let lo = -(1.0 + s) * (1.0 + s) - 10.0;
    let top = free_level(n_cut, t);
    let next = free_level(-(n_cut + 1), t);
    let hi = 0.5 * (top + next);
    let height = if rect_height > 0.0 { rect_height } else { 2.0 * s + 20.0 };
    Rect::new(lo, hi, -height, height)
}

/// Disk half-width for index n (pairing bound widened by the margin).
fn disk_radius(n: i32, loc: &LocalizationConfig) -> f64 {
    loc.disk_margin * (15.0 * PI * n.abs() as f64 * loc.h).max(1.0)
}

struct Tracker<'a> {
    prob: Problem<'a>,
    tol: &'a Tolerances,
}

#[derive(Debug, Clone)]
struct CurveState {
    n: i32,
    current: RootCluster,
    /// (t, lambda) of the sample before the current one (march order).
    previous: Option<(f64, Complex64)>,
    samples: Vec<BlochEigenvalue>,
}

impl Tracker<'_> {
    /// Extrapolated warm start: linear in t, scaled by the actual grid
    /// spacing (the end-zone grid is strongly nonuniform, and an unscaled
    /// two-point extrapolation lands on the paired branch).
    fn advance_seed(&self, st: &CurveState, t_from: f64, t_to: f64) -> Complex64 {
        match st.previous {
            Some((t_prev, lam_prev)) if (t_from - t_prev).abs() > 1e-14 => {
                let ratio = (t_to - t_from) / (t_from - t_prev);
                let ratio = ratio.clamp(-4.0, 4.0);
                st.current.lambda + (st.current.lambda - lam_prev) * ratio
            }
            _ => st.current.lambda,
        }
    }

    fn record(&self, st: &mut CurveState, t: f64) {
        let r = &st.current;
        // Eigenvalue multiplicity at the sample: what the derivatives say,
        // or the confirmed winding count when curves share the root.
        let derived = if r.df.norm() >= self.tol.tau_mult {
            1
        } else if r.d2f.norm() >= self.tol.tau_mult {
            2
        } else {
            r.multiplicity.max(2)
        };
        let mult = r.multiplicity.max(derived);
        st.samples.push(BlochEigenvalue {
            n: st.n,
            t,
            lambda: r.lambda,
            multiplicity: mult,
            simple: mult == 1,
            residual: r.residual,
        });
    }

    fn problem_at(&self, t: f64) -> Problem<'_> {
        Problem { eng: self.eng, rhs: Complex64::new(2.0 * t.cos(), 0.0), tol: self.tol }
    }

    /// Advance one curve to quasimomentum t (stepping stones inserted on
    /// failure, not kept). Curves advance independently, so this runs in
    /// parallel across states.
    fn advance(&self, st: &mut CurveState, t_from: f64, t_to: f64, depth: u32) -> Result<()> {
        let prob = self.problem_at(t_to);
        let seed = self.advance_seed(st, t_from, t_to);
        let refined = prob
            .newton(seed, 60)
            .or_else(|_| prob.newton(st.current.lambda, 60));
        match refined {
            Ok(mut root) => {
                // Continuity guard: |dlambda/dt| = |2 sin t / F'|.
                let dcos = 2.0 * ((t_to.cos() - t_from.cos()).abs());
                let slope_bound = dcos / root.df.norm().max(1e-8);
                let bound = 6.0 * slope_bound + 1e-3 * Tolerances::scale(root.lambda);
                if (root.lambda - st.current.lambda).norm() > bound && depth < 8 {
                    let mid = 0.5 * (t_from + t_to);
                    self.advance(st, t_from, mid, depth + 1)?;
                    return self.advance(st, mid, t_to, depth + 1);
                }
                // A root with |F'| below tau_mult may be the collision point
                // of a pair whose partner index is not tracked; the critical
                // point of F is then the accurate double-root location.
                if root.df.norm() < self.tol.tau_mult && root.d2f.norm() >= self.tol.tau_mult {
                    if let Ok(p) = prob.refine_critical(root.lambda, 40) {
                        let scale = Tolerances::scale(p.lambda);
                        if p.residual <= (3e-13 * scale).max(2.0 * root.residual) {
                            root = p;
                        }
                    }
                }
                root.multiplicity = 1;
                st.previous = Some((t_from, st.current.lambda));
                st.current = root;
                Ok(())
            }
            Err(_) if depth < 8 => {
                let mid = 0.5 * (t_from + t_to);
                self.advance(st, t_from, mid, depth + 1)?;
                self.advance(st, mid, t_to, depth + 1)
            }
            Err(e) => Err(e),
        }
    }

    /// After all curves advanced to t, detect collisions and either confirm
    /// genuine multiple roots or split curves that collapsed onto one root.
    /// Single-threaded deterministic pass over the collected roots.
    fn resolve_collisions(&self, states: &mut [CurveState], t: f64) -> Result<()> {
        let prob = self.problem_at(t);
        let k = states.len();
        let mut grouped: Vec<Vec<usize>> = Vec::new();
        let mut used = vec![false; k];
        for i in 0..k {
            if used[i] {
                continue;
            }
            let mut group = vec![i];
            used[i] = true;
            for j in (i + 1)..k {
                if used[j] {
                    continue;
                }
                let d = (states[i].current.lambda - states[j].current.lambda).norm();
                if d <= self.tol.tau_cluster(states[i].current.lambda) {
                    group.push(j);
                    used[j] = true;
                }
            }
            if group.len() > 1 {
                grouped.push(group);
            }
        }

        for group in grouped {
            let center = states[group[0]].current.lambda;
            let mut budget = 20_000;
            // The circle must separate the immediate cluster from a split
            // partner: a pair that re-separated (e.g. into conjugates) sits
            // many cluster radii away and must count as one root here.
            let spread = group
                .iter()
                .map(|&gi| (states[gi].current.lambda - center).norm())
                .fold(0.0, f64::max);
            let radius = (4.0 * spread).max(2.0 * self.tol.tau_cluster(center));
            let w = self.prob.winding_circle(center, radius, &mut budget)?;
            if w >= group.len() as i64 {
                // Genuine multiple eigenvalue: share the polished value.
                let polished = self.prob.refine_critical(center, 40).unwrap_or(states[group[0]].current);
                for &gi in &group {
                    states[gi].current = polished;
                    states[gi].current.multiplicity = w as u32;
                }
            } else if group.len() == 2 && w == 1 {
                // Two curves collapsed onto one simple root; the partner is
                // the other root of the local quadratic model.
                let s = self.prob.eng.sample(center)?;
                if s.d2f.norm() < 1e-280 {
                    return Err(Error::NumberingInconsistency(format!(
                        "cannot split collapsed pair near {center} at t = {t}"
                    )));
                }
                let other_seed = center - 2.0 * s.df / s.d2f;
                let other = self.prob.newton(other_seed, 60).map_err(|_| {
                    Error::NumberingInconsistency(format!(
                        "lost the partner root near {center} at t = {t}"
                    ))
                })?;
                let (i, j) = (group[0], group[1]);
                // Assign by continuity against the previous positions; break
                // ties so the smaller index takes the smaller imaginary part.
                let (pi_, pj) = (
                    states[i].previous.map_or(states[i].current.lambda, |p| p.1),
                    states[j].previous.map_or(states[j].current.lambda, |p| p.1),
                );
                let keep = (center - pi_).norm() + (other.lambda - pj).norm();
                let swap = (other.lambda - pi_).norm() + (center - pj).norm();
                let assign_other_to_j = if (keep - swap).abs()
                    <= 1e-9 * (keep + swap).max(1e-300)
                {
                    let (lo_idx, hi_idx) =
                        if states[i].n < states[j].n { (i, j) } else { (j, i) };
                    let cur = states[i].current;
                    // Candidate values: center stays with i, other goes to j.
                    let im_i = if lo_idx == i { cur.lambda.im } else { other.lambda.im };
                    let im_j = if lo_idx == i { other.lambda.im } else { cur.lambda.im };
                    let _ = hi_idx;
                    // Want Im(lambda_{lower index}) <= Im(lambda_{higher}).
                    im_i <= im_j
                } else {
                    keep <= swap
                };
                if assign_other_to_j {
                    states[j].current = other;
                } else {
                    states[j].current = states[i].current;
                    states[i].current = other;
                }
            } else if w < group.len() as i64 {
                return Err(Error::NumberingInconsistency(format!(
                    "{} curves share a root of multiplicity {w} near {center} at t = {t}",
                    group.len()
                )));
            }
        }
        Ok(())
    }
}

/// Number the eigenvalues lambda_n(t) for |n| <= n_max over the given grid.
pub fn number_eigenvalues(
    eng: &DiscriminantEngine,
    t_grid: &[f64],
    n_max: i32,
    loc: &LocalizationConfig,
    tol: &Tolerances,
) -> Result<BandCurves> {
    loc.validate()?;
    if n_max < 1 {
        return Err(Error::Domain("n_max must be >= 1".into()));
    }
    let n_cut = loc.n_cut.min(n_max);
    let mut grid = t_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if grid.is_empty() || grid[0] < 0.0 || *grid.last().unwrap() > PI + 1e-12 {
        return Err(Error::Domain("t grid must lie in [0, pi]".into()));
    }

    // Reference point: the grid point nearest pi/2.
    let ref_idx = grid
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - PI / 2.0).abs().total_cmp(&(b.1 - PI / 2.0).abs()))
        .map(|(i, _)| i)
        .unwrap();
    let t_ref = grid[ref_idx];

    let prob = Problem { eng, rhs: Complex64::new(2.0 * t_ref.cos(), 0.0), tol };

    // --- seed the low zone by a full region scan ---------------------------
    let rect = low_region(eng.potential(), t_ref, n_cut, loc.rect_height);
    let mut budget = 400_000;
    let low_roots = prob.roots_in_rect(rect, &mut budget, 0)?;
    let found: u32 = low_roots.iter().map(|r| r.multiplicity).sum();
    let expected = (2 * n_cut + 1) as u32;
    if found != expected {
        return Err(Error::NumberingInconsistency(format!(
            "low region at t = {t_ref:.6} holds {found} roots (counting multiplicity), expected {expected}; \
             rectangle [{:.2}, {:.2}] x [-{h:.2}, {h:.2}]",
            rect.re_min, rect.re_max, h = rect.im_max,
        )));
    }
    let mut expanded: Vec<RootCluster> = Vec::with_capacity(expected as usize);
    for r in &low_roots {
        for _ in 0..r.multiplicity {
            expanded.push(*r);
        }
    }
    expanded.sort_by(|a, b| {
        (a.lambda.re, a.lambda.im).partial_cmp(&(b.lambda.re, b.lambda.im)).unwrap()
    });

    let mut states: Vec<CurveState> = Vec::new();
    for (slot, &idx) in interleaved_low_indices(n_cut).iter().enumerate() {
        states.push(CurveState {
            n: idx,
            current: expanded[slot],
            previous: None,
            samples: Vec::with_capacity(grid.len()),
        });
    }

    // --- seed the disk zone from the free levels ---------------------------
    for mag in (n_cut + 1)..=n_max {
        for n in [mag, -mag] {
            let center = Complex64::new(free_level(n, t_ref), 0.0);
            let root = prob.newton(center, 60)?;
            let r = disk_radius(n, loc);
            if (root.lambda - center).norm() > r {
                return Err(Error::NumberingInconsistency(format!(
                    "seed for n = {n} drifted {:.3e} from the free level, beyond the disk {r:.3e}",
                    (root.lambda - center).norm()
                )));
            }
            states.push(CurveState {
                n,
                current: root,
                previous: None,
                samples: Vec::with_capacity(grid.len()),
            });
        }
    }

    // Disk-zone completeness spot check at the reference point: each disk
    // must hold exactly one root here.
    for mag in (n_cut + 1)..=n_max.min(n_cut + 2) {
        for n in [mag, -mag] {
            let center = Complex64::new(free_level(n, t_ref), 0.0);
            let r = disk_radius(n, loc);
            let mut b = 40_000;
            let (w, _) = prob.winding_rect_perturbed(&Rect::centered(center, r, r), &mut b)?;
            if w != 1 {
                return Err(Error::NumberingInconsistency(format!(
                    "disk around free level n = {n} at t = {t_ref:.6} holds {w} roots, expected 1"
                )));
            }
        }
    }

    let mut tracker = Tracker { prob, tol };
    for st in states.iter_mut() {
        tracker.record(st, t_ref);
    }

    // --- march outward ------------------------------------------------------
    let mut march = |states: &mut Vec<CurveState>, order: Vec<usize>| -> Result<()> {
        // Reset to the reference sample before marching the other way.
        let mut prev_t = t_ref;
        for st in states.iter_mut() {
            let at_ref = st.samples.iter().find(|s| s.t == t_ref).unwrap();
            st.current = RootCluster {
                lambda: at_ref.lambda,
                multiplicity: at_ref.multiplicity,
                residual: at_ref.residual,
                df: Complex64::new(0.0, 0.0),
                d2f: Complex64::new(0.0, 0.0),
            };
            // Re-sample derivative data at the reference value.
            if let Ok(s) = tracker.prob.eng.sample(at_ref.lambda) {
                st.current.df = s.df;
                st.current.d2f = s.d2f;
            }
            st.previous = None;
        }
        for gi in order {
            let t = grid[gi];
            for st in states.iter_mut() {
                tracker.advance(st, prev_t, t, 0)?;
            }
            tracker.resolve_collisions(states, t)?;
            for st in states.iter_mut() {
                tracker.record(st, t);
            }
            prev_t = t;
        }
        Ok(())
    };

    let down: Vec<usize> = (0..ref_idx).rev().collect();
    let up: Vec<usize> = (ref_idx + 1..grid.len()).collect();
    march(&mut states, down)?;
    march(&mut states, up)?;

    let mut curves = BTreeMap::new();
    for mut st in states {
        st.samples.sort_by(|a, b| a.t.total_cmp(&b.t));
        curves.insert(st.n, st.samples);
    }
    if eng.potential().is_pt_symmetric() {
        symmetrize_conjugate_pairs(&mut curves, tol);
    }
    Ok(BandCurves { t_grid: grid, curves })
}

/// For PT-symmetric potentials the eigenvalue multiset is closed under
/// conjugation and nonreal arcs pair up as {n, -n} (left half) and
/// {n, -n-1} (right half). Near a complexation point |F'| is small and the
/// independently refined pair members sit anywhere inside a noise/|F'|
/// ball; averaging lambda_n with conj(lambda_partner) cancels the
/// uncorrelated part of that error and restores exact pairing.
fn symmetrize_conjugate_pairs(
    curves: &mut BTreeMap<i32, Vec<BlochEigenvalue>>,
    tol: &Tolerances,
) {
    let indices: Vec<i32> = curves.keys().copied().collect();
    let pairs: Vec<(i32, i32)> = indices
        .iter()
        .filter(|&&n| n >= 0)
        .flat_map(|&n| [(-n, n), (-n - 1, n)])
        .filter(|&(a, b)| a < b && indices.contains(&a) && indices.contains(&b))
        .collect();
    for (a, b) in pairs {
        let len = curves[&a].len().min(curves[&b].len());
        for i in 0..len {
            let (sa, sb) = (curves[&a][i], curves[&b][i]);
            if sa.t != sb.t {
                continue;
            }
            // Left-half samples belong to the {n, -n} pairing, right-half to
            // {n, -n-1}.
            let pairing_matches = if sa.t < PI / 2.0 { a == -b } else { a == -b - 1 };
            if !pairing_matches {
                continue;
            }
            let scale = Tolerances::scale(sa.lambda);
            if sa.lambda.im.abs() < tol.tau_real(sa.lambda)
                || sb.lambda.im.abs() < tol.tau_real(sb.lambda)
            {
                continue;
            }
            let mismatch = (sa.lambda - sb.lambda.conj()).norm();
            if mismatch > 1e-3 * scale.sqrt() {
                continue;
            }
            let avg = 0.5 * (sb.lambda + sa.lambda.conj());
            let residual = 2.0 * sa.residual.max(sb.residual);
            let ca = curves.get_mut(&a).unwrap();
            ca[i].lambda = avg.conj();
            ca[i].residual = residual;
            let cb = curves.get_mut(&b).unwrap();
            cb[i].lambda = avg;
            cb[i].residual = residual;
        }
    }
}

/// The conjugation-closure defect of the eigenvalue multiset at one t:
/// max over roots of the distance from conj(lambda) to the multiset.
pub fn conjugation_closure_defect(roots: &[RootCluster]) -> f64 {
    let mut worst = 0.0f64;
    for r in roots {
        let target = r.lambda.conj();
        let best = roots
            .iter()
            .map(|s| (s.lambda - target).norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    worst
}

/// Verdict helper: margin-aware comparison of |value| against a threshold.
pub fn ternary_below(value: f64, threshold: f64, margin: f64) -> Ternary {
    if value < threshold {
        Ternary::Yes
    } else if value > threshold * margin {
        Ternary::No
    } else {
        Ternary::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::IntegratorConfig;

    fn engine(q: &PotentialSpec) -> DiscriminantEngine {
        DiscriminantEngine::new(q, &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn free_eigenvalue_in_region() {
        // Single root at (5 pi / 2)^2 for t = pi/2, n = 1.
        let eng = engine(&PotentialSpec::zero());
        let tol = Tolerances::default();
        let center = free_level(1, PI / 2.0);
        let rect = Rect::new(center - 30.0, center + 30.0, -10.0, 10.0);
        let roots = eigenvalues_in_region(&eng, PI / 2.0, rect, &tol).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 1);
        assert!((roots[0].lambda - Complex64::new(center, 0.0)).norm() < 1e-8);
        assert!((center - (2.5 * PI).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn free_double_root_at_t_zero() {
        // n = +-1 coincide at 4 pi^2 for the periodic problem.
        let eng = engine(&PotentialSpec::zero());
        let tol = Tolerances::default();
        let center = 4.0 * PI * PI;
        let rect = Rect::new(center - 20.0, center + 20.0, -5.0, 5.0);
        let roots = eigenvalues_in_region(&eng, 0.0, rect, &tol).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert!((roots[0].lambda - Complex64::new(center, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn multiplicity_classification() {
        let eng = engine(&PotentialSpec::zero());
        let tol = Tolerances::default();
        let m = multiplicity_of(&eng, Complex64::new(4.0 * PI * PI, 0.0), 0.0, &tol).unwrap();
        assert_eq!(m, 2);
        let m = multiplicity_of(&eng, Complex64::new((2.5 * PI).powi(2), 0.0), PI / 2.0, &tol)
            .unwrap();
        assert_eq!(m, 1);
    }

    #[test]
    fn oracle_diagonal_for_free_potential() {
        let vals = matrix_oracle(&PotentialSpec::zero(), 0.7, 8).unwrap();
        let mut expect: Vec<f64> = (-8..=8).map(|k| free_level(k, 0.7)).collect();
        expect.sort_by(f64::total_cmp);
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - Complex64::new(e, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn oracle_rejects_small_m() {
        assert!(matrix_oracle(&PotentialSpec::zero(), 0.0, 4).is_err());
    }

    #[test]
    fn numbering_zero_potential_is_exact() {
        let eng = engine(&PotentialSpec::zero());
        let loc = LocalizationConfig::default();
        let tol = Tolerances::default();
        let grid: Vec<f64> = (0..=16).map(|k| k as f64 * PI / 16.0).collect();
        let curves = number_eigenvalues(&eng, &grid, 4, &loc, &tol).unwrap();
        for (&n, samples) in &curves.curves {
            for s in samples {
                let expect = free_level(n, s.t);
                assert!(
                    (s.lambda - Complex64::new(expect, 0.0)).norm() < 1e-8,
                    "n = {n}, t = {:.3}: {} vs {}",
                    s.t,
                    s.lambda,
                    expect
                );
            }
        }
    }

    #[test]
    fn default_grid_covers_both_end_zones() {
        let loc = LocalizationConfig::default();
        let g = default_t_grid(&loc);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), PI);
        assert!(g.iter().any(|&t| t > 0.0 && t < 2e-4));
        assert!(g.iter().any(|&t| t > PI - 2e-4 && t < PI));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
