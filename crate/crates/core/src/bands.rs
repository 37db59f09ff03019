//! Band assembly: real segments, nonreal tails, complexation points, gaps of
//! the real part of the spectrum, and the global shape verdicts.
//!
//! A band is the arc {lambda_n(t) : t in [0, pi]}. For large |n| it is a real
//! interval except possibly for two pure nonreal end arcs (tails) that meet
//! the real axis at the complexation parameters eps_n and pi - delta_n; the
//! transition parameters are located by bisection on the sign of
//! |Im lambda_n(t)| - tau_real, which stays well-posed although the tail
//! approaches the real axis tangentially.

use num_complex::Complex64;

use crate::bloch::{self, BandCurves, BlochEigenvalue, LocalizationConfig, RootCluster};
use crate::error::{Error, Result};
use crate::monodromy::DiscriminantEngine;
use crate::types::{Rect, Ternary, Tolerances};

use std::f64::consts::PI;

/// Which end of a band a complexation point closes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A complexation point: a real spectrum point with nonreal spectrum in
/// every neighborhood.
#[derive(Debug, Clone, Copy)]
pub struct ComplexationPoint {
    pub n: i32,
    pub t: f64,
    pub lambda: Complex64,
    pub side: Side,
}

/// One band of the spectrum with its classified structure.
#[derive(Debug, Clone)]
pub struct Band {
    pub n: i32,
    /// Samples ordered strictly by t over [0, pi].
    pub samples: Vec<BlochEigenvalue>,
    /// Left complexation parameter (0 when the band starts real).
    pub eps_n: Option<f64>,
    /// Right complexation parameter (0 when the band ends real).
    pub delta_n: Option<f64>,
    /// Real interval spanned by {lambda_n(t) : t in [eps_n, pi - delta_n]}.
    pub real_segment: Option<(f64, f64)>,
    /// Pure nonreal arc at the t -> 0 end (plus its closing real endpoint).
    pub left_tail: Option<Vec<BlochEigenvalue>>,
    /// Pure nonreal arc at the t -> pi end (plus its closing real endpoint).
    pub right_tail: Option<Vec<BlochEigenvalue>>,
    /// (lambda_n(0), lambda_n(pi)).
    pub endpoints: (Complex64, Complex64),
}

impl Band {
    pub fn has_left_tail(&self) -> bool {
        self.left_tail.as_ref().is_some_and(|t| !t.is_empty())
    }

    pub fn has_right_tail(&self) -> bool {
        self.right_tail.as_ref().is_some_and(|t| !t.is_empty())
    }
}

fn is_real(lambda: Complex64, tol: &Tolerances) -> bool {
    lambda.im.abs() < tol.tau_real(lambda)
}

/// lambda_n(t) at an arbitrary t by warm-started Newton from the nearest
/// sample of the curve.
fn eval_on_curve(
    eng: &DiscriminantEngine,
    samples: &[BlochEigenvalue],
    t: f64,
    tol: &Tolerances,
) -> Result<RootCluster> {
    let nearest = samples
        .iter()
        .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
        .ok_or_else(|| Error::Domain("empty curve".into()))?;
    bloch::refine_root(eng, t, nearest.lambda, tol)
}

/// Bisection for the transition parameter between a nonreal and a real
/// sample. Returns (t*, lambda(t*)) with lambda polished at the critical
/// point of F: the transition is a double root, and the bisected sample is
/// only sqrt(t_tol)-accurate in lambda while the critical point is exact to
/// solver precision. Adjacent band segments abut through this value.
fn bisect_transition(
    eng: &DiscriminantEngine,
    samples: &[BlochEigenvalue],
    mut t_nonreal: f64,
    mut t_real: f64,
    tol: &Tolerances,
    t_tol: f64,
) -> Result<(f64, Complex64)> {
    let mut last = None;
    while (t_real - t_nonreal).abs() > t_tol {
        let mid = 0.5 * (t_real + t_nonreal);
        let root = eval_on_curve(eng, samples, mid, tol)?;
        if is_real(root.lambda, tol) {
            t_real = mid;
        } else {
            t_nonreal = mid;
        }
        last = Some(root.lambda);
    }
    let t_star = 0.5 * (t_real + t_nonreal);
    let lambda = match last {
        Some(l) => l,
        None => eval_on_curve(eng, samples, t_star, tol)?.lambda,
    };
    let polished = bloch::refine_critical_point(eng, t_star, lambda, tol)?;
    let lambda = if polished.residual <= tol.tau_root(polished.lambda)
        && (polished.lambda - lambda).norm() <= 10.0 * tol.tau_cluster(lambda).max(lambda.im.abs())
    {
        polished.lambda
    } else {
        lambda
    };
    Ok((t_star, lambda))
}

/// t-resolution of the complexation-parameter bisection.
pub const TRANSITION_T_TOL: f64 = 1e-6;

/// Classify one sampled curve into a band. For |n| > n_cut the large-index
/// structure is enforced: at most one transition per end zone, both inside
/// the zones.
pub fn build_band(
    eng: &DiscriminantEngine,
    n: i32,
    samples: &[BlochEigenvalue],
    loc: &LocalizationConfig,
    tol: &Tolerances,
) -> Result<Band> {
    if samples.len() < 3 {
        return Err(Error::Domain(format!("curve for n = {n} has too few samples")));
    }
    let mut samples = samples.to_vec();
    samples.sort_by(|a, b| a.t.total_cmp(&b.t));
    let real_flags: Vec<bool> = samples.iter().map(|s| is_real(s.lambda, tol)).collect();
    let endpoints = (samples[0].lambda, samples[samples.len() - 1].lambda);

    let mut transitions = Vec::new();
    for i in 1..real_flags.len() {
        if real_flags[i] != real_flags[i - 1] {
            transitions.push(i);
        }
    }
    let strict = n.abs() > loc.n_cut;

    let mut band = Band {
        n,
        eps_n: None,
        delta_n: None,
        real_segment: None,
        left_tail: None,
        right_tail: None,
        endpoints,
        samples: samples.clone(),
    };

    if real_flags.iter().all(|&r| r) {
        band.eps_n = Some(0.0);
        band.delta_n = Some(0.0);
        band.real_segment = Some(segment_of(&samples));
        return Ok(band);
    }
    if real_flags.iter().all(|&r| !r) {
        if strict {
            return Err(Error::TheoryViolation(format!(
                "band {n} has no real sample at all; tolerances are likely too loose"
            )));
        }
        return Ok(band);
    }

    // Clean pattern: optional nonreal prefix, real middle, optional nonreal
    // suffix. Anything else is only possible below the localization cut.
    let left_nonreal = !real_flags[0];
    let right_nonreal = !real_flags[real_flags.len() - 1];
    let clean = transitions.len() == (left_nonreal as usize + right_nonreal as usize);
    if !clean {
        if strict {
            return Err(Error::TheoryViolation(format!(
                "band {n} shows {} Im sign changes; at most one per end zone is possible \
                 for |n| > {}",
                transitions.len(),
                loc.n_cut
            )));
        }
        return Ok(band);
    }

    let mut real_lo = 0usize;
    let mut real_hi = samples.len() - 1;
    if left_nonreal {
        let i = transitions[0];
        let (eps, lam_eps) = bisect_transition(
            eng,
            &samples,
            samples[i - 1].t,
            samples[i].t,
            tol,
            TRANSITION_T_TOL,
        )?;
        if strict && eps > loc.h {
            return Err(Error::TheoryViolation(format!(
                "band {n}: left transition at t = {eps:.6} lies beyond the end zone h = {}",
                loc.h
            )));
        }
        band.eps_n = Some(eps);
        let mut tail: Vec<BlochEigenvalue> =
            samples[..i].iter().filter(|s| s.t < eps).copied().collect();
        tail.push(closing_sample(n, eps, lam_eps));
        band.left_tail = Some(tail);
        real_lo = i;
    } else {
        band.eps_n = Some(0.0);
    }
    if right_nonreal {
        let i = *transitions.last().unwrap();
        let (t_star, lam_star) = bisect_transition(
            eng,
            &samples,
            samples[i].t,
            samples[i - 1].t,
            tol,
            TRANSITION_T_TOL,
        )?;
        let delta = PI - t_star;
        if strict && delta > loc.h {
            return Err(Error::TheoryViolation(format!(
                "band {n}: right transition at t = {t_star:.6} lies beyond the end zone"
            )));
        }
        band.delta_n = Some(delta);
        let mut tail = vec![closing_sample(n, t_star, lam_star)];
        tail.extend(samples[i..].iter().filter(|s| s.t > t_star).copied());
        band.right_tail = Some(tail);
        real_hi = i - 1;
    } else {
        band.delta_n = Some(0.0);
    }

    let mut core: Vec<BlochEigenvalue> = samples[real_lo..=real_hi].to_vec();
    if let Some(tail) = &band.left_tail {
        core.insert(0, *tail.last().unwrap());
    }
    if let Some(tail) = &band.right_tail {
        core.push(tail[0]);
    }
    band.real_segment = Some(segment_of(&core));
    Ok(band)
}

fn closing_sample(n: i32, t: f64, lambda: Complex64) -> BlochEigenvalue {
    BlochEigenvalue {
        n,
        t,
        // The closing endpoint is the double point on the real axis.
        lambda: Complex64::new(lambda.re, 0.0),
        multiplicity: 2,
        simple: false,
        residual: f64::NAN,
    }
}

fn segment_of(samples: &[BlochEigenvalue]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in samples {
        lo = lo.min(s.lambda.re);
        hi = hi.max(s.lambda.re);
    }
    (lo, hi)
}

/// Build all bands from numbered curves.
pub fn build_bands(
    eng: &DiscriminantEngine,
    curves: &BandCurves,
    loc: &LocalizationConfig,
    tol: &Tolerances,
) -> Result<Vec<Band>> {
    let mut out = Vec::with_capacity(curves.curves.len());
    for (&n, samples) in &curves.curves {
        out.push(build_band(eng, n, samples, loc, tol)?);
    }
    Ok(out)
}

/// Complexation points of a built band, each cross-checked to be a multiple
/// eigenvalue (the double point is refined at the critical point of F).
pub fn detect_complexation_points(
    eng: &DiscriminantEngine,
    band: &Band,
    tol: &Tolerances,
) -> Result<Vec<ComplexationPoint>> {
    let mut out = Vec::new();
    let check = |t: f64, lambda: Complex64, side: Side| -> Result<ComplexationPoint> {
        let polished = bloch::refine_critical_point(eng, t, lambda, tol)?;
        let lam = if polished.residual <= tol.tau_root(polished.lambda) {
            polished.lambda
        } else {
            lambda
        };
        let mult = bloch::multiplicity_of(eng, lam, t, tol)?;
        if mult < 2 {
            return Err(Error::TheoryViolation(format!(
                "complexation candidate of band {} at t = {t:.6} has multiplicity {mult}",
                band.n
            )));
        }
        Ok(ComplexationPoint { n: band.n, t, lambda: lam, side })
    };
    if band.has_left_tail() {
        let eps = band.eps_n.expect("left tail implies eps_n");
        let lam = band.left_tail.as_ref().unwrap().last().unwrap().lambda;
        out.push(check(eps, lam, Side::Left)?);
    }
    if band.has_right_tail() {
        let delta = band.delta_n.expect("right tail implies delta_n");
        let lam = band.right_tail.as_ref().unwrap()[0].lambda;
        out.push(check(PI - delta, lam, Side::Right)?);
    }
    Ok(out)
}

/// Union the real segments and report the bounded complementary intervals.
pub fn real_gaps(bands: &[Band], merge_tol: f64) -> Vec<(f64, f64)> {
    let mut segs: Vec<(f64, f64)> = bands.iter().filter_map(|b| b.real_segment).collect();
    segs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for s in segs {
        match merged.last_mut() {
            Some(last) if s.0 <= last.1 + merge_tol => last.1 = last.1.max(s.1),
            _ => merged.push(s),
        }
    }
    merged.windows(2).map(|w| (w[0].1, w[1].0)).collect()
}

/// Worst-case distance from the conjugate of any nonreal sample to the
/// nearest sample across all bands (0 when the spectrum is real).
///
/// Nonreal arcs come in conjugate pairs of bands ({n, -n} near t = 0,
/// {n, -n-1} near t = pi), so a finite index window always cuts the
/// outermost pair: samples whose partner index falls outside the window
/// are excluded, as their conjugates belong to bands that were not scanned.
pub fn conjugation_symmetry_check(bands: &[Band], tol: &Tolerances) -> f64 {
    let window = bands.iter().map(|b| b.n).max().unwrap_or(0);
    let mut all: Vec<Complex64> = Vec::new();
    for b in bands {
        all.extend(b.samples.iter().map(|s| s.lambda));
    }
    let mut worst = 0.0f64;
    for b in bands {
        for s in &b.samples {
            if is_real(s.lambda, tol) {
                continue;
            }
            let partner = if s.t < PI / 2.0 { -b.n } else { -b.n - 1 };
            if partner.abs() > window || bands.iter().all(|o| o.n != partner) {
                continue;
            }
            let target = s.lambda.conj();
            let best = all.iter().map(|&l| (l - target).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
    }
    worst
}

/// Roots of F = 2 (periodic) or F = -2 (antiperiodic) up to band index
/// n_max, scanned by the argument principle.
pub fn periodic_antiperiodic_roots(
    eng: &DiscriminantEngine,
    antiperiodic: bool,
    n_max: i32,
    loc: &LocalizationConfig,
    tol: &Tolerances,
) -> Result<Vec<RootCluster>> {
    let t = if antiperiodic { PI } else { 0.0 };
    let q = eng.potential();
    let s = q.coeff_abs_sum();
    let lo = -(1.0 + s) * (1.0 + s) - 10.0;
    let hi = if antiperiodic {
        let a = (PI * (2 * n_max + 1) as f64).powi(2);
        let b = (PI * (2 * n_max + 3) as f64).powi(2);
        0.5 * (a + b)
    } else {
        let a = (2.0 * PI * n_max as f64).powi(2);
        let b = (2.0 * PI * (n_max + 1) as f64).powi(2);
        0.5 * (a + b)
    };
    let height = if loc.rect_height > 0.0 { loc.rect_height } else { 2.0 * s + 20.0 };
    bloch::eigenvalues_in_region(eng, t, Rect::new(lo, hi, -height, height), tol)
}

/// Shape test: are all roots of F^2 = 4 real in the scanned window?
/// A nonreal root gives `No` with the witness; contour failures give
/// `Inconclusive`; `Yes` covers the scanned indices only.
pub fn real_spectrum_test(
    eng: &DiscriminantEngine,
    scan_depth: i32,
    loc: &LocalizationConfig,
    tol: &Tolerances,
) -> Result<(Ternary, Option<Complex64>)> {
    for &anti in &[false, true] {
        match periodic_antiperiodic_roots(eng, anti, scan_depth, loc, tol) {
            Ok(roots) => {
                for r in roots {
                    if !is_real(r.lambda, tol) {
                        return Ok((Ternary::No, Some(r.lambda)));
                    }
                }
            }
            Err(Error::ContourAccuracy(_)) => return Ok((Ternary::Inconclusive, None)),
            Err(e) => return Err(e),
        }
    }
    Ok((Ternary::Yes, None))
}

/// Half-line test: the spectrum is [a, inf) iff exactly one periodic
/// eigenvalue is simple while every other periodic and every antiperiodic
/// eigenvalue is double -- all real. Returns the verdict and a witness for
/// `No`.
pub fn half_line_test(
    eng: &DiscriminantEngine,
    n_max: i32,
    loc: &LocalizationConfig,
    tol: &Tolerances,
) -> Result<(Ternary, Option<RootCluster>)> {
    let periodic = match periodic_antiperiodic_roots(eng, false, n_max, loc, tol) {
        Ok(r) => r,
        Err(Error::ContourAccuracy(_)) => return Ok((Ternary::Inconclusive, None)),
        Err(e) => return Err(e),
    };
    let antiperiodic = match periodic_antiperiodic_roots(eng, true, n_max, loc, tol) {
        Ok(r) => r,
        Err(Error::ContourAccuracy(_)) => return Ok((Ternary::Inconclusive, None)),
        Err(e) => return Err(e),
    };

    let mut simple_count = 0;
    for r in &periodic {
        if !is_real(r.lambda, tol) {
            return Ok((Ternary::No, Some(*r)));
        }
        match r.multiplicity {
            1 => simple_count += 1,
            2 => {}
            _ => return Ok((Ternary::No, Some(*r))),
        }
    }
    if simple_count != 1 {
        let witness = periodic.iter().find(|r| r.multiplicity == 1).copied();
        return Ok((Ternary::No, witness.or_else(|| periodic.first().copied())));
    }
    for r in &antiperiodic {
        if !is_real(r.lambda, tol) || r.multiplicity != 2 {
            return Ok((Ternary::No, Some(*r)));
        }
    }
    Ok((Ternary::Yes, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{default_t_grid, number_eigenvalues};
    use crate::monodromy::IntegratorConfig;
    use crate::potential::PotentialSpec;

    fn free_setup() -> (DiscriminantEngine, BandCurves, LocalizationConfig, Tolerances) {
        let q = PotentialSpec::zero();
        let eng = DiscriminantEngine::new(&q, &IntegratorConfig::default()).unwrap();
        let loc = LocalizationConfig::default();
        let tol = Tolerances::default();
        let grid = default_t_grid(&loc);
        let curves = number_eigenvalues(&eng, &grid, 3, &loc, &tol).unwrap();
        (eng, curves, loc, tol)
    }

    #[test]
    fn free_bands_are_real_intervals() {
        let (eng, curves, loc, tol) = free_setup();
        let bands = build_bands(&eng, &curves, &loc, &tol).unwrap();
        for b in &bands {
            assert!(!b.has_left_tail() && !b.has_right_tail(), "n = {}", b.n);
            let (lo, hi) = b.real_segment.unwrap();
            if b.n > 0 {
                let expect_lo = (2.0 * PI * b.n as f64).powi(2);
                let expect_hi = (2.0 * PI * b.n as f64 + PI).powi(2);
                assert!((lo - expect_lo).abs() < 1e-7, "n = {}: lo {lo} vs {expect_lo}", b.n);
                assert!((hi - expect_hi).abs() < 1e-7, "n = {}: hi {hi} vs {expect_hi}", b.n);
            }
            assert!(detect_complexation_points(&eng, b, &tol).unwrap().is_empty());
        }
    }

    #[test]
    fn free_spectrum_has_no_gaps_and_is_half_line() {
        let (eng, curves, loc, tol) = free_setup();
        let bands = build_bands(&eng, &curves, &loc, &tol).unwrap();
        let gaps = real_gaps(&bands, tol.merge_tol);
        assert!(gaps.is_empty(), "gaps: {gaps:?}");
        assert_eq!(conjugation_symmetry_check(&bands, &tol), 0.0);

        let (verdict, witness) = half_line_test(&eng, 3, &loc, &tol).unwrap();
        assert_eq!(verdict, Ternary::Yes, "witness: {witness:?}");
        let (verdict, _) = real_spectrum_test(&eng, 3, &loc, &tol).unwrap();
        assert_eq!(verdict, Ternary::Yes);
    }

    #[test]
    fn gap_merging() {
        let mk = |n: i32, seg: (f64, f64)| Band {
            n,
            samples: Vec::new(),
            eps_n: Some(0.0),
            delta_n: Some(0.0),
            real_segment: Some(seg),
            left_tail: None,
            right_tail: None,
            endpoints: (Complex64::new(seg.0, 0.0), Complex64::new(seg.1, 0.0)),
        };
        // Abutting within merge_tol plus one true gap.
        let bands = vec![mk(0, (0.0, 1.0)), mk(1, (1.0 + 1e-8, 2.0)), mk(2, (3.0, 4.0))];
        let gaps = real_gaps(&bands, 1e-6);
        assert_eq!(gaps.len(), 1);
        assert!((gaps[0].0 - 2.0).abs() < 1e-12 && (gaps[0].1 - 3.0).abs() < 1e-12);
    }
}
