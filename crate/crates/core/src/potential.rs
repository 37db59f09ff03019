//! 1-periodic complex potentials and their Fourier-side machinery.
//!
//! A potential is canonically a truncated table of Fourier coefficients
//! q_n = integral of q(x) exp(-i 2 pi n x) over one period, with q_0 = 0 (zero
//! mean). A piecewise-polynomial closed form may accompany the table; it is
//! the exact representation for jump examples and drives both quadrature and
//! the ODE integrator across discontinuities.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;
use crate::types::Ternary;

const I2PI: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// One smooth piece of a closed form: a polynomial in x valid on
/// [start, next piece's start).
#[derive(Debug, Clone)]
pub struct Piece {
    pub start: f64,
    /// Polynomial coefficients in ascending powers of x (absolute coordinate).
    pub coeffs: Vec<Complex64>,
}

impl Piece {
    fn eval(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn derivative(&self) -> Piece {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Piece { start: self.start, coeffs }
    }
}

/// Piecewise-polynomial description of q on [0, 1), extended 1-periodically.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    pieces: Vec<Piece>,
}

impl ClosedForm {
    pub fn new(mut pieces: Vec<Piece>) -> Self {
        assert!(!pieces.is_empty());
        pieces.sort_by(|a, b| a.start.total_cmp(&b.start));
        assert!(
            pieces[0].start == 0.0,
            "first piece must start at 0 (shift breakpoints into [0,1))"
        );
        ClosedForm { pieces }
    }

    /// Breakpoints in [0, 1): the start of every piece.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.start).collect()
    }

    fn piece_index(&self, x: f64) -> usize {
        match self.pieces.iter().rposition(|p| p.start <= x) {
            Some(i) => i,
            None => self.pieces.len() - 1,
        }
    }

    /// Evaluate at x (reduced mod 1).
    pub fn eval(&self, x: f64) -> Complex64 {
        let xr = x.rem_euclid(1.0);
        self.pieces[self.piece_index(xr)].eval(xr)
    }

    /// Evaluate at a point known to lie inside the open interval whose
    /// midpoint is `mid`; endpoint samples then take the one-sided limit
    /// from within that interval.
    pub fn eval_in_interval(&self, x: f64, mid: f64) -> Complex64 {
        let midr = mid.rem_euclid(1.0);
        let idx = self.piece_index(midr);
        self.pieces[idx].eval(x - (x - midr).round())
    }

    fn derivative(&self) -> ClosedForm {
        ClosedForm { pieces: self.pieces.iter().map(Piece::derivative).collect() }
    }

    /// Jumps of the s-th derivative: (breakpoint, right limit - left limit),
    /// with the wrap-around jump at 0 computed against x -> 1-.
    pub fn derivative_jumps(&self, s: usize) -> Vec<(f64, Complex64)> {
        let mut d = self.clone();
        for _ in 0..s {
            d = d.derivative();
        }
        let n = d.pieces.len();
        let mut jumps = Vec::with_capacity(n);
        for j in 0..n {
            let a = d.pieces[j].start;
            let left = if j == 0 {
                d.pieces[n - 1].eval(1.0)
            } else {
                d.pieces[j - 1].eval(a)
            };
            let right = d.pieces[j].eval(a);
            jumps.push((a, right - left));
        }
        jumps
    }
}

/// A Fourier coefficient together with the quadrature error estimate attached
/// to its computation (zero for table entries).
#[derive(Debug, Clone, Copy)]
pub struct CoefficientEstimate {
    pub value: Complex64,
    pub error: f64,
}

/// A 1-periodic complex potential with zero mean.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    coeffs: BTreeMap<i32, Complex64>,
    closed_form: Option<ClosedForm>,
    label: String,
    n_trunc: i32,
    pt_symmetric: bool,
    pt_deviation: f64,
}

/// Default tolerance below which imaginary parts of coefficients are noise.
pub const TAU_PT_DEFAULT: f64 = 1e-10;

impl PotentialSpec {
    /// Build from an explicit coefficient table. Entries at n = 0 must be
    /// zero (the mean is normalized away); `n_trunc` declares the truncation
    /// index and defaults to the largest stored |n|.
    pub fn from_coeffs(
        entries: impl IntoIterator<Item = (i32, Complex64)>,
        n_trunc: Option<i32>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (n, v) in entries {
            if n == 0 {
                if v.norm() > 1e-14 {
                    return Err(Error::Domain(format!(
                        "q_0 must vanish (mean-normalized potential), got {v}"
                    )));
                }
                continue;
            }
            if v != Complex64::new(0.0, 0.0) {
                coeffs.insert(n, v);
            }
        }
        let support = coeffs.keys().map(|n| n.abs()).max().unwrap_or(0);
        let n_trunc = n_trunc.unwrap_or(support).max(support);
        Ok(Self::finish(coeffs, None, label.into(), n_trunc))
    }

    /// Build from a closed form; the coefficient table is filled by
    /// quadrature up to |n| <= n_trunc.
    pub fn from_closed_form(
        form: ClosedForm,
        n_trunc: i32,
        label: impl Into<String>,
    ) -> Result<Self> {
        let brk = form.breakpoints();
        let mean = quad::integrate_periodic(|x| form.eval(x), &brk, 1e-13);
        if mean.value.norm() > 1e-10 {
            return Err(Error::Domain(format!(
                "closed form has nonzero mean {}",
                mean.value
            )));
        }
        let mut coeffs = BTreeMap::new();
        for n in -n_trunc..=n_trunc {
            if n == 0 {
                continue;
            }
            let est = quad::integrate_periodic(
                |x| form.eval(x) * (-I2PI * (n as f64) * x).exp(),
                &brk,
                1e-13,
            );
            if est.value.norm() > 1e-13 {
                coeffs.insert(n, est.value);
            }
        }
        Ok(Self::finish(coeffs, Some(form), label.into(), n_trunc))
    }

    fn finish(
        coeffs: BTreeMap<i32, Complex64>,
        closed_form: Option<ClosedForm>,
        label: String,
        n_trunc: i32,
    ) -> Self {
        let pt_deviation = coeffs.values().map(|v| v.im.abs()).fold(0.0, f64::max);
        PotentialSpec {
            coeffs,
            closed_form,
            label,
            n_trunc,
            pt_symmetric: pt_deviation <= TAU_PT_DEFAULT,
            pt_deviation,
        }
    }

    // ----- presets ---------------------------------------------------------

    /// q = 0.
    pub fn zero() -> Self {
        Self::from_coeffs([], Some(32), "zero").unwrap()
    }

    /// q = 2 cos 2 pi x (q_1 = q_{-1} = 1).
    pub fn cosine() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::from_coeffs([(1, one), (-1, one)], Some(32), "cos").unwrap()
    }

    /// q = a exp(-i 2 pi x) + b exp(i 2 pi x), a and b real.
    pub fn mathieu(a: f64, b: f64) -> Self {
        Self::from_coeffs(
            [(-1, Complex64::new(a, 0.0)), (1, Complex64::new(b, 0.0))],
            Some(32),
            format!("mathieu({a},{b})"),
        )
        .unwrap()
    }

    /// One-sided spectrum: q_{-n} = 0, q_n real, from the given list
    /// (index n = 1, 2, ...). The default single-coefficient case [1.0]
    /// is q = exp(i 2 pi x).
    pub fn gasymov(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|&c| c == 0.0) {
            return Err(Error::Domain(
                "one-sided preset needs a nonempty list of nonzero real coefficients".into(),
            ));
        }
        let entries: Vec<(i32, Complex64)> = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (k as i32 + 1, Complex64::new(c, 0.0)))
            .collect();
        Self::from_coeffs(entries, Some(32), "gasymov")
    }

    /// q(x) = i pi (1 - 2x) on [0, 1): exact coefficients q_n = 1/n.
    pub fn sawtooth() -> Self {
        let n_trunc = 64;
        let coeffs: Vec<(i32, Complex64)> = (-n_trunc..=n_trunc)
            .filter(|&n| n != 0)
            .map(|n| (n, Complex64::new(1.0 / n as f64, 0.0)))
            .collect();
        let form = ClosedForm::new(vec![Piece {
            start: 0.0,
            coeffs: vec![Complex64::new(0.0, PI), Complex64::new(0.0, -2.0 * PI)],
        }]);
        let mut p = Self::from_coeffs(coeffs, Some(n_trunc), "sawtooth").unwrap();
        p.closed_form = Some(form);
        p
    }

    // ----- accessors -------------------------------------------------------

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_trunc(&self) -> i32 {
        self.n_trunc
    }

    pub fn is_pt_symmetric(&self) -> bool {
        self.pt_symmetric
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    /// Breakpoints of the closed form (empty for trigonometric tables).
    pub fn breakpoints(&self) -> Vec<f64> {
        self.closed_form.as_ref().map(|f| f.breakpoints()).unwrap_or_default()
    }

    /// Stored table entry, zero if absent.
    pub fn coeff(&self, n: i32) -> Complex64 {
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    /// Sum of |q_n| over the table; a crude norm used for search regions.
    pub fn coeff_abs_sum(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm()).sum()
    }

    /// Indices with nonzero stored coefficients.
    pub fn support(&self) -> Vec<i32> {
        self.coeffs.keys().copied().collect()
    }

    /// Pointwise complex conjugate of the potential: coefficients
    /// conj(q_{-n}), closed-form pieces conjugated.
    pub fn conjugate(&self) -> PotentialSpec {
        let coeffs: BTreeMap<i32, Complex64> =
            self.coeffs.iter().map(|(&n, &v)| (-n, v.conj())).collect();
        let closed_form = self.closed_form.as_ref().map(|f| ClosedForm {
            pieces: f
                .pieces
                .iter()
                .map(|p| Piece {
                    start: p.start,
                    coeffs: p.coeffs.iter().map(|c| c.conj()).collect(),
                })
                .collect(),
        });
        Self::finish(coeffs, closed_form, format!("conj({})", self.label), self.n_trunc)
    }

    /// Evaluate q at x: the closed form when present (exact across jumps),
    /// otherwise the truncated Fourier sum.
    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.closed_form {
            Some(f) => f.eval(x),
            None => self.eval_fourier(x),
        }
    }

    /// Like `eval`, but one-sided at interval endpoints: the value is taken
    /// from the piece containing `mid`. Integration steps that end exactly on
    /// a jump need the limit from inside the step.
    pub fn eval_in_interval(&self, x: f64, mid: f64) -> Complex64 {
        match &self.closed_form {
            Some(f) => f.eval_in_interval(x, mid),
            None => self.eval_fourier(x),
        }
    }

    fn eval_fourier(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&n, &c) in &self.coeffs {
            acc += c * (I2PI * (n as f64) * x).exp();
        }
        acc
    }

    // ----- operations ------------------------------------------------------

    /// Fourier coefficient with error estimate: table entry when stored,
    /// otherwise quadrature over the closed form.
    pub fn fourier_coefficient(&self, n: i32) -> Result<CoefficientEstimate> {
        if n == 0 {
            return Ok(CoefficientEstimate { value: Complex64::new(0.0, 0.0), error: 0.0 });
        }
        if let Some(&v) = self.coeffs.get(&n) {
            return Ok(CoefficientEstimate { value: v, error: 0.0 });
        }
        if n.abs() <= self.n_trunc {
            // Inside the declared truncation range an absent entry is a
            // stored zero.
            return Ok(CoefficientEstimate { value: Complex64::new(0.0, 0.0), error: 0.0 });
        }
        match &self.closed_form {
            Some(f) => {
                let est = quad::integrate_periodic(
                    |x| f.eval(x) * (-I2PI * (n as f64) * x).exp(),
                    &f.breakpoints(),
                    1e-13,
                );
                Ok(CoefficientEstimate { value: est.value, error: est.error })
            }
            None => Err(Error::RepresentationMissing(format!(
                "coefficient q_{n} beyond the table (|n| > {}) and no closed form",
                self.n_trunc
            ))),
        }
    }

    /// Max |Im q_n| over the table against the given tolerance.
    pub fn check_pt_symmetry(&self, tau_pt: f64) -> (bool, f64) {
        (self.pt_deviation <= tau_pt, self.pt_deviation)
    }

    /// Split q_n into the coefficients of Re q and Im q:
    /// f_n = (q_n + q_{-n})/2, g_n = (q_n - q_{-n})/2 (both real for
    /// PT-symmetric q).
    pub fn real_imag_split(&self, n: i32) -> Result<(f64, f64)> {
        if !self.pt_symmetric {
            return Err(Error::Domain(format!(
                "real/imag split needs a PT-symmetric potential (max |Im q_n| = {:.3e})",
                self.pt_deviation
            )));
        }
        let qp = self.coeff(n).re;
        let qm = self.coeff(-n).re;
        Ok((0.5 * (qp + qm), 0.5 * (qp - qm)))
    }

    /// Fourier data for Q(x) = integral of q from 0 to x and S = Q^2,
    /// truncated at |k| <= n_max.
    pub fn antiderivative_coefficients(&self, n_max: i32) -> Result<FourierTable> {
        FourierTable::build(self, n_max)
    }

    /// Empirical membership test for the coefficient class with lower bound
    /// |q_n| > c1 n^{-s-1} and two-sided comparability
    /// c2 |q_n| <= |q_{-n}| <= c3 |q_n|.
    pub fn sp_membership(&self, p: i32) -> SpVerdict {
        let n_q = self.n_trunc.max(1);
        let lo = (n_q / 4).max(1);
        let window: Vec<i32> = (lo..=n_q).collect();
        let noise = 1e-13;

        let mut verdict = SpVerdict {
            p,
            s: 0,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            n_lower: lo - 1,
            fit_residual: f64::NAN,
            holds: Ternary::Inconclusive,
        };

        // Exact zeros in the window defeat the lower bound outright.
        if window.iter().any(|&n| self.coeff(n).norm() == 0.0 || self.coeff(-n).norm() == 0.0) {
            verdict.holds = Ternary::No;
            return verdict;
        }
        // Sub-noise trailing coefficients cannot support a fit.
        if window.iter().any(|&n| self.coeff(n).norm() < noise) {
            verdict.holds = Ternary::Inconclusive;
            return verdict;
        }
        if window.len() < 4 {
            verdict.holds = Ternary::Inconclusive;
            return verdict;
        }

        // Log-log least squares for |q_n| ~ c n^{-s-1}.
        let pts: Vec<(f64, f64)> = window
            .iter()
            .map(|&n| ((n as f64).ln(), self.coeff(n).norm().ln()))
            .collect();
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        let intercept = (sy - slope * sx) / m;
        let residual = (pts
            .iter()
            .map(|&(x, y)| (y - slope * x - intercept).powi(2))
            .sum::<f64>()
            / m)
            .sqrt();

        let s_fit = -slope - 1.0;
        let s = s_fit.round() as i32;
        verdict.s = s;
        verdict.fit_residual = residual;
        verdict.c1 = window
            .iter()
            .map(|&n| self.coeff(n).norm() * (n as f64).powi(s + 1))
            .fold(f64::INFINITY, f64::min);
        let ratios: Vec<f64> = window
            .iter()
            .map(|&n| self.coeff(-n).norm() / self.coeff(n).norm())
            .collect();
        verdict.c2 = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        verdict.c3 = ratios.iter().copied().fold(0.0, f64::max);

        verdict.holds = if residual > 0.1 {
            Ternary::Inconclusive
        } else if s > p || verdict.c2 <= 0.0 || verdict.c3 / verdict.c2 > 100.0 {
            Ternary::No
        } else {
            Ternary::Yes
        };
        verdict
    }
}

/// Fitted constants for the coefficient-class test.
#[derive(Debug, Clone)]
pub struct SpVerdict {
    pub p: i32,
    /// Fitted decay exponent: |q_n| ~ c1 n^{-s-1}.
    pub s: i32,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Bounds were checked for n_lower < n <= n_trunc.
    pub n_lower: i32,
    pub fit_residual: f64,
    pub holds: Ternary,
}

/// Fourier data of q, Q(x) = integral of q, and S = Q^2.
#[derive(Debug, Clone)]
pub struct FourierTable {
    n_max: i32,
    q: Vec<Complex64>,
    big_q: Vec<Complex64>,
    s: Vec<Complex64>,
    q0_mean: Complex64,
    truncation_error: f64,
}

impl FourierTable {
    fn build(p: &PotentialSpec, n_max: i32) -> Result<Self> {
        if p.coeff(0).norm() != 0.0 {
            return Err(Error::Domain("Q is periodic only for zero-mean q".into()));
        }
        let len = (2 * n_max + 1) as usize;
        let mut q = vec![Complex64::new(0.0, 0.0); len];
        let mut big_q = vec![Complex64::new(0.0, 0.0); len];
        for k in -n_max..=n_max {
            let idx = (k + n_max) as usize;
            let qk = if k.abs() <= p.n_trunc {
                p.coeff(k)
            } else {
                match p.fourier_coefficient(k) {
                    Ok(est) => est.value,
                    Err(_) => Complex64::new(0.0, 0.0),
                }
            };
            q[idx] = qk;
            if k != 0 {
                big_q[idx] = qk / (I2PI * k as f64);
            }
        }

        // Q_0: quadrature over the closed form when available, otherwise from
        // Q(0) = 0 applied to the truncated series.
        let mut truncation_error = 0.0f64;
        let q0_mean = match &p.closed_form {
            Some(form) => {
                let brk = form.breakpoints();
                let est = quad::integrate_periodic(
                    |x| {
                        // Inner integral of the polynomial pieces is cheap to
                        // do by nested quadrature of q over [0, x].
                        quad_antiderivative(form, &brk, x)
                    },
                    &brk,
                    1e-12,
                );
                truncation_error = truncation_error.max(est.error);
                est.value
            }
            None => {
                let sum: Complex64 =
                    big_q.iter().enumerate().filter(|(i, _)| *i != n_max as usize).map(|(_, v)| v).sum();
                let tail = if n_max > 0 {
                    big_q[(2 * n_max) as usize].norm() * n_max as f64
                } else {
                    0.0
                };
                truncation_error = truncation_error.max(tail);
                -sum
            }
        };
        let center = n_max as usize;
        big_q[center] = q0_mean;

        // S_k by discrete convolution of the Q-coefficients.
        let mut s = vec![Complex64::new(0.0, 0.0); len];
        for (k, sk) in s.iter_mut().enumerate() {
            let k_shift = k as i32 - n_max;
            let mut acc = Complex64::new(0.0, 0.0);
            for m in (-n_max).max(k_shift - n_max)..=n_max.min(k_shift + n_max) {
                acc += big_q[(m + n_max) as usize] * big_q[(k_shift - m + n_max) as usize];
            }
            *sk = acc;
        }
        let q_tail = big_q[(2 * n_max) as usize].norm().max(big_q[0].norm()) * n_max as f64;
        let q_abs: f64 = big_q.iter().map(|v| v.norm()).sum();
        truncation_error = truncation_error.max(2.0 * q_tail * q_abs);

        Ok(FourierTable { n_max, q, big_q, s, q0_mean, truncation_error })
    }

    pub fn n_max(&self) -> i32 {
        self.n_max
    }

    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    fn checked(&self, k: i32) -> Result<usize> {
        if k.abs() > self.n_max {
            return Err(Error::Range { needed: k, available: self.n_max });
        }
        Ok((k + self.n_max) as usize)
    }

    pub fn q(&self, k: i32) -> Result<Complex64> {
        Ok(self.q[self.checked(k)?])
    }

    /// Coefficient Q_k of the antiderivative; Q_0 is the mean of Q.
    pub fn q_anti(&self, k: i32) -> Result<Complex64> {
        Ok(self.big_q[self.checked(k)?])
    }

    pub fn s_coeff(&self, k: i32) -> Result<Complex64> {
        Ok(self.s[self.checked(k)?])
    }

    pub fn q0_mean(&self) -> Complex64 {
        self.q0_mean
    }

    /// (f_n, g_n) with q_n = f_n + g_n, q_{-n} = f_n - g_n.
    pub fn split(&self, n: i32) -> Result<(Complex64, Complex64)> {
        let qp = self.q(n)?;
        let qm = self.q(-n)?;
        Ok((0.5 * (qp + qm), 0.5 * (qp - qm)))
    }
}

/// Q(x) = integral of the closed form from 0 to x, by panel quadrature.
fn quad_antiderivative(form: &ClosedForm, brk: &[f64], x: f64) -> Complex64 {
    if x <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let rule = quad::GaussLegendre::new(16);
    let mut edges: Vec<f64> = brk.iter().copied().filter(|&b| b > 0.0 && b < x).collect();
    edges.push(0.0);
    edges.push(x);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut acc = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        acc += rule.integrate(w[0], w[1], |t| form.eval(t));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cosine_coefficient_by_orthogonality() {
        let q = PotentialSpec::cosine();
        assert_eq!(q.fourier_coefficient(1).unwrap().value, c(1.0, 0.0));
        assert_eq!(q.fourier_coefficient(2).unwrap().value, c(0.0, 0.0));
    }

    #[test]
    fn one_sided_exponential_has_no_negative_coefficient() {
        let q = PotentialSpec::gasymov(&[1.0]).unwrap();
        assert_eq!(q.fourier_coefficient(-1).unwrap().value, c(0.0, 0.0));
        assert_eq!(q.fourier_coefficient(1).unwrap().value, c(1.0, 0.0));
    }

    #[test]
    fn sawtooth_coefficient_matches_quadrature() {
        // Table says q_3 = 1/3; quadrature over the closed form must agree.
        let q = PotentialSpec::sawtooth();
        let form = q.closed_form().unwrap();
        let est = quad::integrate_periodic(
            |x| form.eval(x) * (-I2PI * 3.0 * x).exp(),
            &form.breakpoints(),
            1e-13,
        );
        assert!((est.value - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert_eq!(q.coeff(3), c(1.0 / 3.0, 0.0));
    }

    #[test]
    fn pt_symmetry_check() {
        assert_eq!(PotentialSpec::cosine().check_pt_symmetry(1e-10), (true, 0.0));
        // q_1 = 1, q_{-1} = -1: both real, PT-symmetric.
        let q = PotentialSpec::mathieu(-1.0, 1.0);
        assert_eq!(q.check_pt_symmetry(1e-10), (true, 0.0));
        // q = e^{i2pix} + i e^{-i2pix}: q_{-1} = i breaks the symmetry.
        let q =
            PotentialSpec::from_coeffs([(1, c(1.0, 0.0)), (-1, c(0.0, 1.0))], None, "bad").unwrap();
        let (ok, dev) = q.check_pt_symmetry(1e-10);
        assert!(!ok);
        assert_eq!(dev, 1.0);
    }

    #[test]
    fn split_identities() {
        let q = PotentialSpec::cosine();
        assert_eq!(q.real_imag_split(1).unwrap(), (1.0, 0.0));
        let q = PotentialSpec::mathieu(-1.0, 1.0); // 2i sin 2 pi x
        assert_eq!(q.real_imag_split(1).unwrap(), (0.0, 1.0));
        let q = PotentialSpec::sawtooth();
        assert_eq!(q.real_imag_split(2).unwrap(), (0.0, 0.5));
    }

    #[test]
    fn split_rejects_non_pt() {
        let q =
            PotentialSpec::from_coeffs([(1, c(1.0, 0.0)), (-1, c(0.0, 1.0))], None, "bad").unwrap();
        assert!(matches!(q.real_imag_split(1), Err(Error::Domain(_))));
    }

    #[test]
    fn antiderivative_of_cosine() {
        let q = PotentialSpec::cosine();
        let t = q.antiderivative_coefficients(8).unwrap();
        let expect = c(1.0, 0.0) / (I2PI);
        assert!((t.q_anti(1).unwrap() - expect).norm() < 1e-14);
        assert!((t.q_anti(-1).unwrap() + expect).norm() < 1e-14);
    }

    #[test]
    fn antiderivative_of_zero() {
        let t = PotentialSpec::zero().antiderivative_coefficients(6).unwrap();
        for k in -6..=6 {
            assert_eq!(t.q_anti(k).unwrap(), c(0.0, 0.0));
            assert_eq!(t.s_coeff(k).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn sawtooth_q0_mean() {
        // Q(x) = i pi (x - x^2), mean i pi / 6.
        let t = PotentialSpec::sawtooth().antiderivative_coefficients(16).unwrap();
        assert!((t.q0_mean() - c(0.0, PI / 6.0)).norm() < 1e-10);
    }

    #[test]
    fn antiderivative_rejects_nonzero_mean() {
        let r = PotentialSpec::from_coeffs([(0, c(1.0, 0.0))], None, "mean");
        assert!(r.is_err());
    }

    #[test]
    fn sp_membership_verdicts() {
        let saw = PotentialSpec::sawtooth().sp_membership(0);
        assert_eq!(saw.holds, Ternary::Yes);
        assert_eq!(saw.s, 0);
        assert!((saw.c2 - 1.0).abs() < 1e-12 && (saw.c3 - 1.0).abs() < 1e-12);

        assert_eq!(PotentialSpec::cosine().sp_membership(0).holds, Ternary::No);
        assert_eq!(PotentialSpec::zero().sp_membership(0).holds, Ternary::No);
        // One-sided coefficients break the two-sided bound.
        assert_eq!(PotentialSpec::gasymov(&[1.0]).unwrap().sp_membership(0).holds, Ternary::No);
    }

    #[test]
    fn parseval_inequality_for_sawtooth() {
        let q = PotentialSpec::sawtooth();
        let sum_sq: f64 = q.support().iter().map(|&n| q.coeff(n).norm_sqr()).sum();
        let form = q.closed_form().unwrap();
        let l2 = quad::integrate_periodic(
            |x| Complex64::new(form.eval(x).norm_sqr(), 0.0),
            &form.breakpoints(),
            1e-13,
        );
        assert!(sum_sq <= l2.value.re + 1e-12);
        // And the truncated sum is close: tail of 2/n^2 beyond 64.
        assert!(l2.value.re - sum_sq < 2.0 / 60.0);
    }

    #[test]
    fn sawtooth_jump_metadata() {
        let q = PotentialSpec::sawtooth();
        let jumps = q.closed_form().unwrap().derivative_jumps(0);
        assert_eq!(jumps.len(), 1);
        // q(0+) - q(1-) = i pi - (-i pi) = 2 pi i; g = Im q jumps by 2 pi.
        assert!((jumps[0].1 - c(0.0, 2.0 * PI)).norm() < 1e-12);
    }
}
