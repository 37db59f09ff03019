//! Coefficient-side perturbation series and the reality / finite-gap
//! criteria built on them.
//!
//! The series A, A' sum products q_{n_1} ... q_{n_k} q_{-(n_1+...+n_k)} over
//! multi-indices, weighted by reciprocal distances of lambda to the free
//! levels at the partial sums; B, B' replace the closing coefficient by
//! q_{2n - sum} and q_{-2n - sum}. The eigenvalue then satisfies
//!
//!   (lambda - (2 pi n)^2 - t^2 - (A + A')/2)^2 = D,
//!   D = (4 pi n t)^2 + q_{2n} q_{-2n} + 8 pi n t C + C^2
//!       + q_{2n} B' + q_{-2n} B + B B',        C = (A - A')/2,
//!
//! and for large n the eigenvalue lambda_n(t) with t in an end zone is real
//! exactly when D >= 0.
//!
//! Multi-index sums are evaluated by dynamic programming over the partial
//! sum: the denominator depends only on the running total, so each extra
//! factor is one convolution with the coefficient table. Partial sums that
//! hit the resonant free level of lambda itself are excluded, matching the
//! structure of the series; any other small denominator is reported as a
//! resonance error.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::{ClosedForm, FourierTable, PotentialSpec, SpVerdict};
use crate::types::Ternary;

/// Truncation controls for the series.
#[derive(Debug, Clone)]
pub struct SeriesConfig {
    /// Number of a_k terms retained.
    pub k_max: u32,
    /// Multi-index bound |n_s| <= index_bound; 0 means 2 * n_trunc.
    pub index_bound: i32,
    /// Verdicts below this band index are inconclusive.
    pub n_asym: i32,
    /// Dominance factor delta > 1 for the g-coefficient finite-gap test.
    pub delta: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { k_max: 4, index_bound: 0, n_asym: 6, delta: 2.0 }
    }
}

/// Values of the six series at one (lambda, t, n).
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub a: Complex64,
    pub a_prime: Complex64,
    pub b: Complex64,
    pub b_prime: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub k_max: u32,
    pub index_bound: i32,
    /// Geometric extrapolation of the dropped terms from the last ratio.
    pub tail_estimate: f64,
}

/// Dense map from a bounded integer range to complex weights.
struct StateVec {
    offset: i32,
    data: Vec<Complex64>,
}

impl StateVec {
    fn new(bound: i32) -> Self {
        StateVec { offset: bound, data: vec![Complex64::new(0.0, 0.0); (2 * bound + 1) as usize] }
    }

    fn get(&self, idx: i32) -> Complex64 {
        let i = idx + self.offset;
        if i < 0 || i as usize >= self.data.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.data[i as usize]
        }
    }

    fn set(&mut self, idx: i32, v: Complex64) {
        let i = (idx + self.offset) as usize;
        self.data[i] = v;
    }

    fn indices(&self) -> impl Iterator<Item = i32> + '_ {
        (-self.offset..=self.offset).filter(|&i| self.get(i) != Complex64::new(0.0, 0.0))
    }
}

/// Evaluate the six series at lambda for band index n and quasimomentum t.
pub fn series_terms(
    q: &PotentialSpec,
    lambda: Complex64,
    t: f64,
    n: i32,
    cfg: &SeriesConfig,
) -> Result<SeriesValue> {
    let index_bound = if cfg.index_bound > 0 { cfg.index_bound } else { 2 * q.n_trunc().max(1) };
    let support: Vec<(i32, Complex64)> = q
        .support()
        .into_iter()
        .filter(|&m| m.abs() <= index_bound)
        .map(|m| (m, q.coeff(m)))
        .collect();
    let tau_denom = PI * PI * n.abs().max(1) as f64;
    let lambda_site = {
        let v = 2.0 * PI * n as f64 + t;
        Complex64::new(v * v, 0.0)
    };

    // denom(sigma) for the unprimed series: lambda - (2 pi (n - sigma) + t)^2;
    // for the primed series: lambda - (2 pi (n + sigma) - t)^2.
    let denom = |sigma: i32, primed: bool| -> Complex64 {
        let v = if primed {
            2.0 * PI * (n + sigma) as f64 - t
        } else {
            2.0 * PI * (n - sigma) as f64 + t
        };
        lambda - Complex64::new(v * v, 0.0)
    };
    // Structural exclusion: the partial-sum site coincides with the free
    // level carrying lambda itself.
    let structural = |sigma: i32, primed: bool| -> bool {
        let v = if primed {
            2.0 * PI * (n + sigma) as f64 - t
        } else {
            2.0 * PI * (n - sigma) as f64 + t
        };
        let site = Complex64::new(v * v, 0.0);
        (site - lambda_site).norm() < 1e-9 * lambda_site.norm().max(1.0)
    };

    let k_max = cfg.k_max.max(1);
    let bound = (k_max as i32) * index_bound;
    let mut sum_a = Complex64::new(0.0, 0.0);
    let mut sum_ap = Complex64::new(0.0, 0.0);
    let mut sum_b = Complex64::new(0.0, 0.0);
    let mut sum_bp = Complex64::new(0.0, 0.0);
    let mut last_terms = [0.0f64; 4];
    let mut prev_terms = [0.0f64; 4];

    for &primed in &[false, true] {
        let mut w = StateVec::new(bound);
        w.set(0, Complex64::new(1.0, 0.0));
        for _k in 1..=k_max {
            let mut next = StateVec::new(bound);
            for sigma_prev in w.indices() {
                let weight = w.get(sigma_prev);
                for &(m, qm) in &support {
                    let sigma = sigma_prev + m;
                    if sigma.abs() > bound {
                        continue;
                    }
                    let cur = next.get(sigma);
                    next.set(sigma, cur + weight * qm);
                }
            }
            // Divide by the denominator at each reachable state; excluded
            // states are zeroed.
            for sigma in -bound..=bound {
                let v = next.get(sigma);
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                if structural(sigma, primed) {
                    next.set(sigma, Complex64::new(0.0, 0.0));
                    continue;
                }
                let d = denom(sigma, primed);
                if d.norm() < tau_denom {
                    return Err(Error::Resonance { index: sigma, denom: d.norm() });
                }
                next.set(sigma, v / d);
            }
            // Contract with the closing coefficients.
            let mut ak = Complex64::new(0.0, 0.0);
            let mut bk = Complex64::new(0.0, 0.0);
            for sigma in next.indices() {
                let wv = next.get(sigma);
                ak += wv * q.coeff(-sigma);
                let close = if primed { q.coeff(-2 * n - sigma) } else { q.coeff(2 * n - sigma) };
                bk += wv * close;
            }
            if primed {
                sum_ap += ak;
                sum_bp += bk;
                prev_terms[1] = last_terms[1];
                prev_terms[3] = last_terms[3];
                last_terms[1] = ak.norm();
                last_terms[3] = bk.norm();
            } else {
                sum_a += ak;
                sum_b += bk;
                prev_terms[0] = last_terms[0];
                prev_terms[2] = last_terms[2];
                last_terms[0] = ak.norm();
                last_terms[2] = bk.norm();
            }
            w = next;
        }
    }

    // Geometric tail from the last term ratios.
    let mut tail = 0.0;
    for i in 0..4 {
        let (last, prev) = (last_terms[i], prev_terms[i]);
        if last == 0.0 {
            continue;
        }
        let r = if prev > 0.0 { (last / prev).min(0.9) } else { 0.5 };
        tail += last * r / (1.0 - r);
    }

    let c = 0.5 * (sum_a - sum_ap);
    let q2n = q.coeff(2 * n);
    let qm2n = q.coeff(-2 * n);
    let fournt = 4.0 * PI * n as f64 * t;
    let d = Complex64::new(fournt * fournt, 0.0)
        + q2n * qm2n
        + 2.0 * fournt * c
        + c * c
        + q2n * sum_bp
        + qm2n * sum_b
        + sum_b * sum_bp;
    Ok(SeriesValue {
        a: sum_a,
        a_prime: sum_ap,
        b: sum_b,
        b_prime: sum_bp,
        c,
        d,
        k_max,
        index_bound,
        tail_estimate: tail,
    })
}

/// Outcome of the end-zone reality test at one (n, t).
#[derive(Debug, Clone, Copy)]
pub struct DVerdict {
    /// D >= 0 (up to rounding floor): the eigenvalue is real.
    pub nonneg: bool,
    pub d: f64,
    /// Set when lambda was nonreal and D was evaluated at Re lambda as a
    /// consistency check.
    pub evaluated_at_re: bool,
    pub series: SeriesValue,
}

/// Rounding floor below which the sign of D is not trusted.
fn d_floor(series: &SeriesValue, q: &PotentialSpec, n: i32, t: f64) -> f64 {
    let fournt = 4.0 * PI * n as f64 * t;
    let mag = fournt * fournt
        + (q.coeff(2 * n) * q.coeff(-2 * n)).norm()
        + (2.0 * fournt * series.c).norm()
        + series.c.norm_sqr()
        + (q.coeff(2 * n) * series.b_prime).norm()
        + (q.coeff(-2 * n) * series.b).norm()
        + (series.b * series.b_prime).norm();
    1e-14 + 1e-12 * mag
}

/// Sign test D(lambda_n(t), t) >= 0 for t in an end zone.
pub fn reality_criterion_d(
    q: &PotentialSpec,
    lambda: Complex64,
    n: i32,
    t: f64,
    cfg: &SeriesConfig,
) -> Result<DVerdict> {
    let evaluated_at_re = lambda.im.abs() > 1e-7 * lambda.norm().max(1.0);
    let at = if evaluated_at_re { Complex64::new(lambda.re, 0.0) } else { lambda };
    let series = series_terms(q, at, t, n, cfg)?;
    let floor = d_floor(&series, q, n, t);
    Ok(DVerdict { nonneg: series.d.re >= -floor, d: series.d.re, evaluated_at_re, series })
}

/// Reality of the whole band for large |n|: the coefficient-product
/// criterion when q lies in the comparability class, otherwise the D-sign
/// test at both band edges.
pub fn band_reality_criterion(
    q: &PotentialSpec,
    n: i32,
    edges: Option<(Complex64, Complex64)>,
    sp: &SpVerdict,
    cfg: &SeriesConfig,
) -> Result<Ternary> {
    if n.abs() < cfg.n_asym {
        return Ok(Ternary::Inconclusive);
    }
    if sp.holds == Ternary::Yes {
        let even = (q.coeff(2 * n) * q.coeff(-2 * n)).re;
        let odd = (q.coeff(2 * n + 1) * q.coeff(-2 * n - 1)).re;
        return Ok(if even > 0.0 && odd > 0.0 { Ternary::Yes } else { Ternary::No });
    }
    let Some((lam0, lam_pi)) = edges else {
        return Ok(Ternary::Inconclusive);
    };
    let v0 = reality_criterion_d(q, lam0, n, 0.0, cfg)?;
    let vpi = reality_criterion_d(q, lam_pi, n, PI, cfg)?;
    for v in [&v0, &vpi] {
        if v.d != 0.0 && v.d.abs() <= v.series.tail_estimate {
            return Ok(Ternary::Inconclusive);
        }
    }
    Ok(if v0.nonneg && vpi.nonneg { Ternary::Yes } else { Ternary::No })
}

/// P_n = q_n q_{-n} - q_n (S_{-n} - 2 Q_0 Q_{-n}) - q_{-n} (S_n - 2 Q_0 Q_n).
pub fn compute_pn(table: &FourierTable, n: i32, pt_symmetric: bool) -> Result<f64> {
    let qn = table.q(n)?;
    let qmn = table.q(-n)?;
    let q0 = table.q0_mean();
    let corr_m = table.s_coeff(-n)? - 2.0 * q0 * table.q_anti(-n)?;
    let corr_p = table.s_coeff(n)? - 2.0 * q0 * table.q_anti(n)?;
    let p = qn * qmn - qn * corr_m - qmn * corr_p;
    if pt_symmetric && p.im.abs() >= 1e-10 {
        return Err(Error::TheoryViolation(format!(
            "P_{n} has imaginary part {:.3e} for a PT-symmetric potential",
            p.im
        )));
    }
    Ok(p.re)
}

/// Verdicts and fitted constants of the three finite-gap tests.
#[derive(Debug, Clone)]
pub struct FiniteGapVerdicts {
    /// All P_n < -alpha n^{-2s-2} over the scanned range.
    pub negative_pn: Ternary,
    pub alpha: f64,
    /// |g_n| > beta n^{-s-1} and |g_n| > delta |f_n| over the range.
    pub g_dominance: Ternary,
    pub beta: f64,
    pub delta: f64,
    /// Jump comparison |d| < |c| for the s-th derivative of Re q vs Im q.
    pub jump_comparison: Ternary,
    pub jump_c: f64,
    pub jump_d: f64,
}

impl FiniteGapVerdicts {
    /// Combined verdict: each test alone is sufficient for finitely many
    /// gaps, so any `Yes` wins; the tests are not necessary, so the
    /// alternative to `Yes` is `Inconclusive`.
    pub fn combined(&self) -> Ternary {
        if self.negative_pn == Ternary::Yes
            || self.g_dominance == Ternary::Yes
            || self.jump_comparison == Ternary::Yes
        {
            Ternary::Yes
        } else {
            Ternary::Inconclusive
        }
    }
}

/// The three explicit finite-gap sufficient conditions over n in
/// [n_range.0, n_range.1], for smoothness order s.
pub fn finite_gap_tests(
    q: &PotentialSpec,
    table: &FourierTable,
    s: i32,
    n_range: (i32, i32),
    cfg: &SeriesConfig,
) -> Result<FiniteGapVerdicts> {
    let (n_lo, n_hi) = n_range;
    if n_lo < 1 || n_hi < n_lo {
        return Err(Error::Domain("finite-gap scan range must satisfy 1 <= lo <= hi".into()));
    }
    let pt = q.is_pt_symmetric();
    let floor = 1e-12;

    // --- negative P_n with power bound ------------------------------------
    let mut alpha = f64::INFINITY;
    let mut neg = Ternary::Yes;
    for n in n_lo..=n_hi {
        let p = compute_pn(table, n, pt)?;
        if p.abs() <= floor {
            neg = Ternary::Inconclusive;
            break;
        }
        if p >= 0.0 {
            neg = Ternary::No;
            break;
        }
        alpha = alpha.min(-p * (n as f64).powi(2 * s + 2));
    }
    if !alpha.is_finite() {
        alpha = 0.0;
    }

    // --- g-coefficient dominance -------------------------------------------
    let mut beta = f64::INFINITY;
    let mut dom = Ternary::Yes;
    for n in n_lo..=n_hi {
        let (f, g) = table.split(n)?;
        let (fa, ga) = (f.norm(), g.norm());
        if ga <= floor || ga <= fa {
            dom = Ternary::No;
            break;
        }
        if ga <= cfg.delta * fa {
            dom = Ternary::Inconclusive;
        }
        beta = beta.min(ga * (n as f64).powi(s + 1));
    }
    if !beta.is_finite() {
        beta = 0.0;
    }

    // --- jump comparison ----------------------------------------------------
    let (jump_comparison, jump_c, jump_d) = match q.closed_form() {
        None => (Ternary::Inconclusive, 0.0, 0.0),
        Some(form) => jump_test(form, table, s, n_range),
    };

    Ok(FiniteGapVerdicts {
        negative_pn: neg,
        alpha,
        g_dominance: dom,
        beta,
        delta: cfg.delta,
        jump_comparison,
        jump_c,
        jump_d,
    })
}

fn jump_test(
    form: &ClosedForm,
    table: &FourierTable,
    s: i32,
    n_range: (i32, i32),
) -> (Ternary, f64, f64) {
    let jumps = form.derivative_jumps(s as usize);
    // g = Im q carries the c jump, f = Re q the d jump.
    let c = jumps.iter().map(|(_, j)| j.im.abs()).fold(0.0, f64::max);
    let d = jumps.iter().map(|(_, j)| j.re.abs()).fold(0.0, f64::max);
    if c <= 1e-13 {
        return (Ternary::Inconclusive, c, d);
    }
    if d >= c {
        return (Ternary::No, c, d);
    }
    // Verify the implied asymptotics |g_n| = |c| (2 pi n)^{-s-1} + o(...)
    // over the top of the scanned range.
    let (n_lo, n_hi) = n_range;
    let top = ((n_lo + n_hi) / 2).max(n_lo)..=n_hi;
    let mut devs = Vec::new();
    for n in top {
        if let Ok((_, g)) = table.split(n) {
            let implied = g.norm() * (2.0 * PI * n as f64).powi(s + 1);
            devs.push((implied - c).abs() / c);
        }
    }
    if devs.is_empty() {
        return (Ternary::Inconclusive, c, d);
    }
    let mean_dev = devs.iter().sum::<f64>() / devs.len() as f64;
    if mean_dev > 0.3 {
        return (Ternary::Inconclusive, c, d);
    }
    (Ternary::Yes, c, d)
}

/// Defect of the eigenvalue equation at the computed lambda_n(t):
/// |(lambda - (2 pi n)^2 - t^2 - (A + A')/2)^2 - D|.
pub fn d_equation_residual(
    q: &PotentialSpec,
    lambda: Complex64,
    n: i32,
    t: f64,
    cfg: &SeriesConfig,
) -> Result<f64> {
    let sv = series_terms(q, lambda, t, n, cfg)?;
    let base = lambda
        - Complex64::new((2.0 * PI * n as f64).powi(2) + t * t, 0.0)
        - 0.5 * (sv.a + sv.a_prime);
    Ok((base * base - sv.d).norm())
}

/// Per-band record of the criterion scalars, as emitted in reports.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionRecord {
    pub n: i32,
    /// D(lambda_n(0), 0), when the edge eigenvalue was available.
    pub d0: Option<f64>,
    /// D(lambda_n(pi), pi).
    pub d_pi: Option<f64>,
    /// q_{2n} q_{-2n} (real part; exactly real for PT-symmetric q).
    pub qq_even: f64,
    /// q_{2n+1} q_{-2n-1}.
    pub qq_odd: f64,
    /// P_{2n}.
    pub p_even: Option<f64>,
    /// P_{2n+1}.
    pub p_odd: Option<f64>,
    /// Band reality verdict from the coefficient/D criteria.
    pub band_real: Ternary,
}

/// Assemble the criterion record for one band index.
pub fn criterion_record(
    q: &PotentialSpec,
    table: &FourierTable,
    sp: &SpVerdict,
    n: i32,
    edges: Option<(Complex64, Complex64)>,
    cfg: &SeriesConfig,
) -> Result<CriterionRecord> {
    let pt = q.is_pt_symmetric();
    let mut d0 = None;
    let mut d_pi = None;
    if let Some((lam0, lam_pi)) = edges {
        d0 = Some(reality_criterion_d(q, lam0, n, 0.0, cfg)?.d);
        d_pi = Some(reality_criterion_d(q, lam_pi, n, PI, cfg)?.d);
    }
    let p_even = compute_pn(table, 2 * n, pt).ok();
    let p_odd = compute_pn(table, 2 * n + 1, pt).ok();
    Ok(CriterionRecord {
        n,
        d0,
        d_pi,
        qq_even: (q.coeff(2 * n) * q.coeff(-2 * n)).re,
        qq_odd: (q.coeff(2 * n + 1) * q.coeff(-2 * n - 1)).re,
        p_even,
        p_odd,
        band_real: band_reality_criterion(q, n, edges, sp, cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn series_vanish_for_zero_potential() {
        let q = PotentialSpec::zero();
        let cfg = SeriesConfig::default();
        let n = 5;
        let t = 0.01;
        let lam = c((2.0 * PI * 5.0 + t).powi(2), 0.0);
        let sv = series_terms(&q, lam, t, n, &cfg).unwrap();
        assert_eq!(sv.a, c(0.0, 0.0));
        assert_eq!(sv.b_prime, c(0.0, 0.0));
        let expect = (4.0 * PI * 5.0 * t).powi(2);
        assert!((sv.d - c(expect, 0.0)).norm() < 1e-12 * expect);
    }

    #[test]
    fn symmetric_coefficients_cancel_c() {
        // q_1 = q_{-1}: A and A' coincide at t = 0, so C = 0.
        let q = PotentialSpec::cosine();
        let cfg = SeriesConfig::default();
        let lam = c((10.0 * PI).powi(2) + 0.1, 0.0);
        let sv = series_terms(&q, lam, 0.0, 5, &cfg).unwrap();
        assert!(sv.c.norm() < 1e-15, "C = {}", sv.c);
        assert!(sv.a.norm() > 0.0);
    }

    #[test]
    fn d_equation_residual_zero_for_free() {
        let q = PotentialSpec::zero();
        let cfg = SeriesConfig::default();
        let n = 3;
        let t = 0.4;
        let lam = c((2.0 * PI * 3.0 + t).powi(2), 0.0);
        let r = d_equation_residual(&q, lam, n, t, &cfg).unwrap();
        assert!(r < 1e-9, "residual {r}");
    }

    #[test]
    fn sawtooth_products_are_negative() {
        let q = PotentialSpec::sawtooth();
        let sp = q.sp_membership(0);
        assert_eq!(sp.holds, Ternary::Yes);
        let cfg = SeriesConfig::default();
        for n in 6..=12 {
            let v = band_reality_criterion(&q, n, None, &sp, &cfg).unwrap();
            assert_eq!(v, Ternary::No, "n = {n}");
        }
    }

    #[test]
    fn symmetric_real_products_are_positive() {
        // q_n = q_{-n} = 1/|n|: products positive, bands real.
        let entries: Vec<(i32, Complex64)> = (-32..=32)
            .filter(|&m: &i32| m != 0)
            .map(|m| (m, c(1.0 / m.abs() as f64, 0.0)))
            .collect();
        let q = PotentialSpec::from_coeffs(entries, Some(32), "even-sawtooth").unwrap();
        let sp = q.sp_membership(0);
        assert_eq!(sp.holds, Ternary::Yes);
        let cfg = SeriesConfig::default();
        for n in 6..=12 {
            let v = band_reality_criterion(&q, n, None, &sp, &cfg).unwrap();
            assert_eq!(v, Ternary::Yes, "n = {n}");
        }
    }

    #[test]
    fn pn_values() {
        let q = PotentialSpec::zero();
        let table = q.antiderivative_coefficients(8).unwrap();
        assert_eq!(compute_pn(&table, 3, true).unwrap(), 0.0);

        let q = PotentialSpec::sawtooth();
        let table = q.antiderivative_coefficients(64).unwrap();
        let p5 = compute_pn(&table, 5, true).unwrap();
        // P_5 = -1/25 (1 + small): dominated by q_5 q_{-5}.
        assert!(p5 < 0.0);
        assert!((p5 + 1.0 / 25.0).abs() < 0.3 / 25.0, "P_5 = {p5}");

        let q = PotentialSpec::cosine();
        let table = q.antiderivative_coefficients(8).unwrap();
        let p1 = compute_pn(&table, 1, true).unwrap();
        assert!((p1 - 1.0).abs() < 0.2, "P_1 = {p1}");
    }

    #[test]
    fn finite_gap_verdicts_for_presets() {
        let cfg = SeriesConfig::default();
        let q = PotentialSpec::sawtooth();
        let table = q.antiderivative_coefficients(64).unwrap();
        let v = finite_gap_tests(&q, &table, 0, (6, 16), &cfg).unwrap();
        assert_eq!(v.negative_pn, Ternary::Yes, "alpha = {}", v.alpha);
        assert_eq!(v.g_dominance, Ternary::Yes, "beta = {}", v.beta);
        assert_eq!(v.jump_comparison, Ternary::Yes, "c = {}, d = {}", v.jump_c, v.jump_d);
        assert!((v.jump_c - 2.0 * PI).abs() < 1e-10);
        assert_eq!(v.jump_d, 0.0);
        assert_eq!(v.combined(), Ternary::Yes);

        let q = PotentialSpec::cosine();
        let table = q.antiderivative_coefficients(40).unwrap();
        let v = finite_gap_tests(&q, &table, 0, (6, 16), &cfg).unwrap();
        assert_eq!(v.g_dominance, Ternary::No);
    }

    #[test]
    fn resonance_is_reported() {
        // lambda parked on a neighboring free level triggers the guard.
        let q = PotentialSpec::sawtooth();
        let cfg = SeriesConfig::default();
        let n = 6;
        let t = 0.3;
        let neighbor = (2.0 * PI * 5.0 + t).powi(2);
        let err = series_terms(&q, c(neighbor, 0.0), t, n, &cfg).unwrap_err();
        assert!(matches!(err, Error::Resonance { .. }), "{err}");
    }
}
