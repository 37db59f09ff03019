//! Spectral singularities, the projection-norm diagnostic, and the
//! two-exponential (Mathieu-type) special case.
//!
//! For large |n| an interior multiple eigenvalue, a complexation point, and
//! a nonreal-tail boundary are the same object; the scan records them with a
//! cross-check flag. The projection-norm diagnostic kappa =
//! |Psi| |Psi*| / |<Psi*, Psi>| is a pointwise condition number of the
//! eigenprojection: about 1 in self-adjoint-like situations and divergent on
//! approach to a singularity. It is reported as a diagnostic only, never
//! used to assert a theorem.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::bands::{Band, ComplexationPoint};
use crate::bloch::{self, LocalizationConfig};
use crate::error::{Error, Result};
use crate::monodromy::{DiscriminantEngine, IntegratorConfig};
use crate::potential::PotentialSpec;
use crate::quad::GaussLegendre;
use crate::types::{Ternary, Tolerances};

/// Classification of a multiple-eigenvalue record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityKind {
    /// Multiple eigenvalue at interior quasimomentum: a spectral singularity.
    InteriorMultiple,
    /// Degenerate periodic/antiperiodic eigenvalue (t = 0 or pi); not a
    /// singularity by itself.
    BandEdgeDegenerate,
}

/// One detected multiple-eigenvalue site.
#[derive(Debug, Clone, Copy)]
pub struct SingularityRecord {
    pub n: i32,
    pub t: f64,
    pub lambda: Complex64,
    pub kind: SingularityKind,
    /// Projection-norm diagnostic at a nearby simple sample (NaN when it
    /// could not be evaluated).
    pub projection_kappa: f64,
    /// Interior records: does the site match a detected complexation point
    /// of the bands (within the t tolerance)?
    pub is_complexation: bool,
}

/// t distance within which an interior multiple and a complexation point
/// are identified.
pub const SINGULARITY_T_TOL: f64 = 1e-5;

/// Refine an interior double eigenvalue: solve Re(F(lambda) - 2 cos t) = 0,
/// Re F'(lambda) = 0 for real (lambda, t) by a 2x2 Newton iteration.
/// Meaningful for PT-symmetric potentials, where F is real on the real axis.
pub fn refine_interior_double(
    eng: &DiscriminantEngine,
    seed_lambda: f64,
    seed_t: f64,
) -> Result<(f64, f64)> {
    let mut lam = seed_lambda;
    let mut t = seed_t.clamp(1e-9, PI - 1e-9);
    for _ in 0..50 {
        let s = eng.sample(Complex64::new(lam, 0.0))?;
        let r1 = s.f.re - 2.0 * t.cos();
        let r2 = s.df.re;
        let a = s.df.re;
        let b = 2.0 * t.sin();
        let c = s.d2f.re;
        if c.abs() < 1e-300 || b.abs() < 1e-300 {
            break;
        }
        let dlam = -r2 / c;
        let dt = (-r1 - a * dlam) / b;
        lam += dlam;
        t = (t + dt).clamp(1e-9, PI - 1e-9);
        if dlam.abs() < 1e-12 * lam.abs().max(1.0) && dt.abs() < 1e-13 {
            break;
        }
    }
    Ok((lam, t))
}

/// Scan built bands for multiple eigenvalues. Interior sites are refined by
/// the 2D Newton iteration and cross-checked against the detected
/// complexation points; endpoint degeneracies are recorded as band-edge
/// entries.
pub fn singularity_scan(
    eng: &DiscriminantEngine,
    bands: &[Band],
    complexation_points: &[ComplexationPoint],
    tol: &Tolerances,
) -> Result<Vec<SingularityRecord>> {
    let mut out = Vec::new();
    for band in bands {
        // Interior candidates: boundaries of the real/nonreal classification.
        let mut candidates: Vec<(f64, f64)> = Vec::new();
        for w in band.samples.windows(2) {
            let r0 = w[0].lambda.im.abs() < tol.tau_real(w[0].lambda);
            let r1 = w[1].lambda.im.abs() < tol.tau_real(w[1].lambda);
            if r0 != r1 {
                let t_mid = 0.5 * (w[0].t + w[1].t);
                let lam_mid = 0.5 * (w[0].lambda.re + w[1].lambda.re);
                candidates.push((lam_mid, t_mid));
            }
        }
        for (lam_seed, t_seed) in candidates {
            if !eng.potential().is_pt_symmetric() {
                continue;
            }
            let (lam, t) = refine_interior_double(eng, lam_seed, t_seed)?;
            if !(SINGULARITY_T_TOL..=PI - SINGULARITY_T_TOL).contains(&t) {
                continue;
            }
            let lambda = Complex64::new(lam, 0.0);
            if bloch::multiplicity_of(eng, lambda, t, tol)? < 2 {
                continue;
            }
            let matched = complexation_points
                .iter()
                .any(|cp| cp.n == band.n && (cp.t - t).abs() <= SINGULARITY_T_TOL);
            let kappa = kappa_near(eng, band, t, tol);
            out.push(SingularityRecord {
                n: band.n,
                t,
                lambda,
                kind: SingularityKind::InteriorMultiple,
                projection_kappa: kappa,
                is_complexation: matched,
            });
        }
        // Endpoint degeneracies.
        for (t, lambda) in [(0.0, band.endpoints.0), (PI, band.endpoints.1)] {
            let mult = bloch::multiplicity_of(eng, lambda, t, tol)?;
            if mult >= 2 {
                out.push(SingularityRecord {
                    n: band.n,
                    t,
                    lambda,
                    kind: SingularityKind::BandEdgeDegenerate,
                    projection_kappa: f64::NAN,
                    is_complexation: false,
                });
            }
        }
    }
    out.sort_by(|a, b| (a.n, a.t).partial_cmp(&(b.n, b.t)).unwrap());
    out.dedup_by(|a, b| a.n == b.n && (a.t - b.t).abs() < SINGULARITY_T_TOL && a.kind == b.kind);
    Ok(out)
}

/// Kappa evaluated at simple samples adjacent to an interior multiple point.
fn kappa_near(eng: &DiscriminantEngine, band: &Band, t_star: f64, tol: &Tolerances) -> f64 {
    let mut best = f64::NAN;
    for offset in [3e-3, -3e-3] {
        let t = t_star + offset;
        if !(1e-6..=PI - 1e-6).contains(&t) {
            continue;
        }
        let Some(nearest) = band
            .samples
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
        else {
            continue;
        };
        if let Ok(root) = bloch::refine_root(eng, t, nearest.lambda, tol) {
            if let Ok(k) = projection_norm_diagnostic(eng, root.lambda, t, tol) {
                if best.is_nan() || k > best {
                    best = k;
                }
            }
        }
    }
    best
}

/// Quadrature mesh for eigenfunction inner products: composite Gauss-Legendre
/// nodes over uniform panels of [0, 1].
fn quadrature_mesh(panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(order);
    let mut xs = Vec::with_capacity(panels * order);
    let mut ws = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = p as f64 / panels as f64;
        let b = (p + 1) as f64 / panels as f64;
        let (nodes, weights) = rule.scaled_to(a, b);
        xs.extend(nodes);
        ws.extend(weights);
    }
    (xs, ws)
}

/// Floquet eigenfunction data: initial vector (y(0), y'(0)) for the
/// monodromy eigenvector with multiplier rho.
fn floquet_initial(m: [[Complex64; 2]; 2], rho: Complex64) -> (Complex64, Complex64) {
    // (M - rho) v = 0: two candidate null vectors, pick the better scaled.
    let v1 = (m[0][1], rho - m[0][0]);
    let v2 = (rho - m[1][1], m[1][0]);
    let n1 = v1.0.norm() + v1.1.norm();
    let n2 = v2.0.norm() + v2.1.norm();
    if n1 >= n2 {
        v1
    } else {
        v2
    }
}

/// Condition number kappa = |Psi| |Psi*| / |<Psi*, Psi>| of the spectral
/// projection at a simple Bloch eigenvalue, with L2[0,1] norms by
/// quadrature. Psi solves the problem itself with multiplier e^{it}; Psi*
/// solves the adjoint equation -y'' + conj(q) y = conj(lambda) y with the
/// same boundary multiplier.
pub fn projection_norm_diagnostic(
    eng: &DiscriminantEngine,
    lambda: Complex64,
    t: f64,
    tol: &Tolerances,
) -> Result<f64> {
    if bloch::multiplicity_of(eng, lambda, t, tol)? != 1 {
        return Err(Error::UndefinedDiagnostic(lambda));
    }
    let rho = Complex64::new(0.0, t).exp();
    let (xs, ws) = quadrature_mesh(64, 10);

    let m = eng.monodromy_matrix(lambda)?;
    let init = floquet_initial(m, rho);
    let psi = eng.trace_solution(lambda, init, &xs)?;

    // Adjoint problem: conjugated potential at conjugated energy.
    let adj_q = eng.potential().conjugate();
    let adj_eng = DiscriminantEngine::new(&adj_q, eng.config())?;
    let m_adj = adj_eng.monodromy_matrix(lambda.conj())?;
    let init_adj = floquet_initial(m_adj, rho);
    let psi_star = adj_eng.trace_solution(lambda.conj(), init_adj, &xs)?;

    let mut norm_psi = 0.0;
    let mut norm_star = 0.0;
    let mut inner = Complex64::new(0.0, 0.0);
    for i in 0..xs.len() {
        let y = psi[i].0;
        let z = psi_star[i].0;
        norm_psi += ws[i] * y.norm_sqr();
        norm_star += ws[i] * z.norm_sqr();
        inner += ws[i] * y * z.conj();
    }
    let denom = inner.norm();
    if denom == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((norm_psi * norm_star).sqrt() / denom)
}

/// Asymptotic spectrality from the coefficient criterion: decidable only
/// inside the comparability class, where band reality for all large scanned
/// |n| is equivalent to it.
pub fn asymptotic_spectrality_verdict(
    sp_holds: Ternary,
    band_reality: impl IntoIterator<Item = Ternary>,
) -> Ternary {
    if sp_holds != Ternary::Yes {
        return Ternary::Inconclusive;
    }
    let mut verdict = Ternary::Yes;
    let mut any = false;
    for v in band_reality {
        match v {
            Ternary::No => return Ternary::No,
            Ternary::Yes => any = true,
            Ternary::Inconclusive => {}
        }
    }
    if !any {
        verdict = Ternary::Inconclusive;
    }
    verdict
}

// ---------------------------------------------------------------------------
// Two-exponential potentials q = a e^{-i 2 pi x} + b e^{i 2 pi x}
// ---------------------------------------------------------------------------

/// Parameters of the two-exponential case.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MathieuCase {
    pub a: f64,
    pub b: f64,
    /// arg(ab) / pi: 0 or 1 for real coefficients.
    pub alpha: f64,
    pub product: f64,
}

impl MathieuCase {
    pub fn new(a: f64, b: f64) -> Self {
        let product = a * b;
        let alpha = if product < 0.0 { 1.0 } else { 0.0 };
        MathieuCase { a, b, alpha, product }
    }
}

/// Spectrality classification of the two-exponential operator.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MathieuSpectrality {
    pub case: MathieuCase,
    /// Spectral operator: exactly the self-adjoint case a = b.
    pub spectral: bool,
    pub asymptotically_spectral: Ternary,
    pub reason: String,
}

/// Classify H(a, b) for real a, b. The characteristic equation depends on
/// (a, b) only through ab; spectrality does not.
pub fn mathieu_spectrality(a: f64, b: f64) -> MathieuSpectrality {
    let case = MathieuCase::new(a, b);
    let (spectral, asym, reason) = if a == b {
        (true, Ternary::Yes, format!("a = b = {a}: the real self-adjoint case"))
    } else if a.abs() != b.abs() {
        (
            false,
            Ternary::No,
            format!("|a| = {} != |b| = {}: spectral singularity at infinity", a.abs(), b.abs()),
        )
    } else {
        // b = -a, a != 0: alpha = 1, and |q alpha - (2p - 1)| reaches 0.
        (
            false,
            Ternary::No,
            "b = -a: arg(ab)/pi = 1, so the parity condition inf |q alpha - (2p-1)| = 0 fails"
                .to_string(),
        )
    };
    MathieuSpectrality { case, spectral, asymptotically_spectral: asym, reason }
}

/// Max over the lambda grid of |F_{(a,b)} - F_{(c,d)}|; defined only when
/// ab = cd, which forces identical characteristic equations.
pub fn mathieu_isospectrality_check(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    lambda_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<f64> {
    if (a * b - c * d).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "isospectrality needs ab = cd, got {} vs {}",
            a * b,
            c * d
        )));
    }
    let eng1 = DiscriminantEngine::new(&PotentialSpec::mathieu(a, b), cfg)?;
    let eng2 = DiscriminantEngine::new(&PotentialSpec::mathieu(c, d), cfg)?;
    let mut worst = 0.0f64;
    for &lam in lambda_grid {
        let z = Complex64::new(lam, 0.0);
        let diff = (eng1.discriminant(z)? - eng2.discriminant(z)?).norm();
        worst = worst.max(diff);
    }
    Ok(worst)
}

/// The canonical partner with the same coefficient product: (c, c) with
/// c = sqrt(ab) when ab > 0, the swapped pair when ab < 0, and the free
/// potential when ab = 0.
pub fn canonical_isospectral_partner(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    if p > 0.0 {
        let c = p.sqrt();
        (c, c)
    } else if p < 0.0 {
        (b, a)
    } else {
        (0.0, 0.0)
    }
}

/// Localization-config re-export hook used by report assembly.
pub fn interior_zone(loc: &LocalizationConfig) -> (f64, f64) {
    (loc.h, PI - loc.h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Tolerances;

    #[test]
    fn kappa_is_one_for_free_operator() {
        let q = PotentialSpec::zero();
        let eng = DiscriminantEngine::new(&q, &IntegratorConfig::default()).unwrap();
        let tol = Tolerances::default();
        let t = PI / 3.0;
        let lam = Complex64::new((2.0 * PI + t).powi(2), 0.0);
        let kappa = projection_norm_diagnostic(&eng, lam, t, &tol).unwrap();
        assert!((kappa - 1.0).abs() < 1e-6, "kappa = {kappa}");
    }

    #[test]
    fn kappa_order_one_for_selfadjoint_case() {
        let q = PotentialSpec::cosine();
        let eng = DiscriminantEngine::new(&q, &IntegratorConfig::default()).unwrap();
        let tol = Tolerances::default();
        let t = PI / 2.0;
        let seed = Complex64::new((2.0 * PI * 2.0 + t).powi(2), 0.0);
        let root = crate::bloch::refine_root(&eng, t, seed, &tol).unwrap();
        let kappa = projection_norm_diagnostic(&eng, root.lambda, t, &tol).unwrap();
        assert!(kappa < 2.0, "kappa = {kappa}");
        assert!(kappa >= 1.0 - 1e-9);
    }

    #[test]
    fn diagnostic_rejects_multiple_eigenvalue() {
        let q = PotentialSpec::zero();
        let eng = DiscriminantEngine::new(&q, &IntegratorConfig::default()).unwrap();
        let tol = Tolerances::default();
        let lam = Complex64::new(4.0 * PI * PI, 0.0);
        assert!(matches!(
            projection_norm_diagnostic(&eng, lam, 0.0, &tol),
            Err(Error::UndefinedDiagnostic(_))
        ));
    }

    #[test]
    fn mathieu_classification() {
        let m = mathieu_spectrality(3.0, 3.0);
        assert!(m.spectral);
        assert_eq!(m.asymptotically_spectral, Ternary::Yes);

        let m = mathieu_spectrality(2.0, 1.0);
        assert!(!m.spectral);
        assert_eq!(m.asymptotically_spectral, Ternary::No);
        assert_eq!(m.case.alpha, 0.0);

        let m = mathieu_spectrality(1.0, -1.0);
        assert!(!m.spectral);
        assert_eq!(m.asymptotically_spectral, Ternary::No);
        assert_eq!(m.case.alpha, 1.0);
    }

    #[test]
    fn isospectrality_requires_matching_product() {
        let cfg = IntegratorConfig::default();
        let err = mathieu_isospectrality_check(2.0, 1.0, 1.0, 1.0, &[0.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        // Trivial equal pair.
        let dev = mathieu_isospectrality_check(0.0, 0.0, 0.0, 0.0, &[0.0, 10.0], &cfg).unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn canonical_partners() {
        assert_eq!(canonical_isospectral_partner(2.0, 1.0), (2f64.sqrt(), 2f64.sqrt()));
        assert_eq!(canonical_isospectral_partner(1.0, -1.0), (-1.0, 1.0));
        assert_eq!(canonical_isospectral_partner(0.0, 5.0), (0.0, 0.0));
    }
}
