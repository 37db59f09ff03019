//! Monodromy of -y'' + q y = lambda y over one period.
//!
//! Integrates the fundamental solutions theta, phi (theta(0) = phi'(0) = 1,
//! theta'(0) = phi(0) = 0) with a fixed-step 6-stage order-5 Runge-Kutta
//! scheme and returns the Hill discriminant F(lambda) = theta(1) + phi'(1).
//! The lambda-derivative (variational) systems are integrated jointly with
//! the same stepper, so F' and F'' stay accurate near double roots where
//! finite differences cancel.
//!
//! The step grid is fixed per (potential, config) pair: potential samples are
//! precomputed once and reused across lambda, which makes F deterministic and
//! smooth in lambda. Steps are split at the potential's breakpoints so the
//! scheme never straddles a jump.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

// Cash-Karp tableau (6 stages, order 5 weights).
const STAGE_X: [f64; 6] = [0.0, 0.2, 0.3, 0.6, 1.0, 7.0 / 8.0];
const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
    [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
    [
        1631.0 / 55296.0,
        175.0 / 512.0,
        575.0 / 13824.0,
        44275.0 / 110592.0,
        253.0 / 4096.0,
    ],
];
const B: [f64; 6] = [
    37.0 / 378.0,
    0.0,
    250.0 / 621.0,
    125.0 / 594.0,
    0.0,
    512.0 / 1771.0,
];

/// Fixed-step integrator configuration.
#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    /// Base step count per period (before breakpoint splitting).
    pub steps: u32,
    /// Scheme order; only the 6-stage order-5 scheme is implemented.
    pub order: u32,
    /// Extra step boundaries in [0, 1) beyond the potential's own breakpoints.
    pub breakpoints: Vec<f64>,
    /// Wronskian residual tolerance.
    pub tau_w: f64,
    /// |Im F| tolerance for PT-symmetric potentials at real lambda.
    pub tau_f: f64,
    /// Reject |lambda| beyond this cap instead of risking overflow.
    pub energy_cap: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            steps: 1 << 12,
            order: 5,
            breakpoints: Vec::new(),
            tau_w: 1e-8,
            tau_f: 1e-9,
            energy_cap: (128.0 * std::f64::consts::PI).powi(2),
        }
    }
}

/// F(lambda) with derivatives and the basis-solution data behind it.
#[derive(Debug, Clone, Copy)]
pub struct DiscriminantSample {
    pub lambda: Complex64,
    pub f: Complex64,
    pub df: Complex64,
    pub d2f: Complex64,
    pub theta1: Complex64,
    pub dtheta1: Complex64,
    pub phi1: Complex64,
    pub dphi1: Complex64,
    /// |theta(1) phi'(1) - theta'(1) phi(1) - 1|, divided by the magnitude of
    /// the products when they exceed 1 (deep in the negative half-axis the
    /// basis solutions reach 1e19 and the absolute defect is pure
    /// cancellation noise).
    pub wronskian_residual: f64,
}

#[derive(Debug, Clone)]
struct StepData {
    h: f64,
    q: [Complex64; 6],
}

/// Reusable evaluator of F(lambda) for one (potential, config) pair.
#[derive(Debug, Clone)]
pub struct DiscriminantEngine {
    potential: PotentialSpec,
    cfg: IntegratorConfig,
    steps: Vec<StepData>,
}

fn build_grid(n: u32, cuts: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    for &c in cuts {
        let c = c.rem_euclid(1.0);
        if c > 0.0 && c < 1.0 {
            grid.push(c);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}

impl DiscriminantEngine {
    pub fn new(potential: &PotentialSpec, cfg: &IntegratorConfig) -> Result<Self> {
        if cfg.order != 5 {
            return Err(Error::Domain(format!(
                "only the 6-stage order-5 scheme is implemented (requested order {})",
                cfg.order
            )));
        }
        if cfg.steps < 16 {
            return Err(Error::Domain("step count must be at least 16".into()));
        }
        let mut cuts = potential.breakpoints();
        cuts.extend_from_slice(&cfg.breakpoints);
        let grid = build_grid(cfg.steps, &cuts);
        let steps = sample_steps(potential, &grid);
        Ok(DiscriminantEngine { potential: potential.clone(), cfg: cfg.clone(), steps })
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    fn check_cap(&self, lambda: Complex64) -> Result<()> {
        let mag = lambda.norm();
        if mag > self.cfg.energy_cap {
            return Err(Error::Magnitude { magnitude: mag, cap: self.cfg.energy_cap });
        }
        Ok(())
    }

    /// F(lambda) only: integrates the 4-component (theta, phi) system.
    pub fn discriminant(&self, lambda: Complex64) -> Result<Complex64> {
        self.check_cap(lambda)?;
        let mut u = [
            Complex64::new(1.0, 0.0),
            ZERO,
            ZERO,
            Complex64::new(1.0, 0.0),
        ];
        for s in &self.steps {
            rk_step(&mut u, s, |q, v| {
                let g = q - lambda;
                [v[1], g * v[0], v[3], g * v[2]]
            });
        }
        Ok(u[0] + u[3])
    }

    /// Full sample: F, F', F'' from the 12-component joint system.
    pub fn sample(&self, lambda: Complex64) -> Result<DiscriminantSample> {
        self.check_cap(lambda)?;
        let one = Complex64::new(1.0, 0.0);
        let mut u = [ZERO; 12];
        u[0] = one; // theta
        u[7] = one; // phi'
        for s in &self.steps {
            rk_step(&mut u, s, |q, v| {
                let g = q - lambda;
                [
                    v[1],
                    g * v[0],
                    v[3],
                    g * v[2] - v[0],
                    v[5],
                    g * v[4] - 2.0 * v[2],
                    v[7],
                    g * v[6],
                    v[9],
                    g * v[8] - v[6],
                    v[11],
                    g * v[10] - 2.0 * v[8],
                ]
            });
        }
        let (theta1, dtheta1) = (u[0], u[1]);
        let (phi1, dphi1) = (u[6], u[7]);
        let prod_scale = (theta1 * dphi1).norm().max((dtheta1 * phi1).norm()).max(1.0);
        Ok(DiscriminantSample {
            lambda,
            f: theta1 + dphi1,
            df: u[2] + u[9],
            d2f: u[4] + u[11],
            theta1,
            dtheta1,
            phi1,
            dphi1,
            wronskian_residual: (theta1 * dphi1 - dtheta1 * phi1 - one).norm() / prod_scale,
        })
    }

    /// Monodromy matrix [[theta(1), phi(1)], [theta'(1), phi'(1)]].
    pub fn monodromy_matrix(&self, lambda: Complex64) -> Result<[[Complex64; 2]; 2]> {
        self.check_cap(lambda)?;
        let mut u = [
            Complex64::new(1.0, 0.0),
            ZERO,
            ZERO,
            Complex64::new(1.0, 0.0),
        ];
        for s in &self.steps {
            rk_step(&mut u, s, |q, v| {
                let g = q - lambda;
                [v[1], g * v[0], v[3], g * v[2]]
            });
        }
        Ok([[u[0], u[2]], [u[1], u[3]]])
    }

    /// Integrate a single solution with initial data (y(0), y'(0)), returning
    /// (y, y') at each of the requested x in [0, 1] (sorted ascending). The
    /// record points are inserted as step boundaries, so the values are
    /// integration-grade, not interpolated.
    pub fn trace_solution(
        &self,
        lambda: Complex64,
        init: (Complex64, Complex64),
        record: &[f64],
    ) -> Result<Vec<(Complex64, Complex64)>> {
        self.check_cap(lambda)?;
        let mut cuts = self.potential.breakpoints();
        cuts.extend_from_slice(&self.cfg.breakpoints);
        cuts.extend(record.iter().copied().filter(|&x| x > 0.0 && x < 1.0));
        let grid = build_grid(self.cfg.steps, &cuts);
        let steps = sample_steps(&self.potential, &grid);

        let mut out = Vec::with_capacity(record.len());
        let mut u = [init.0, init.1];
        let mut ri = 0;
        while ri < record.len() && record[ri] <= grid[0] {
            out.push((u[0], u[1]));
            ri += 1;
        }
        for (k, s) in steps.iter().enumerate() {
            rk_step(&mut u, s, |q, v| {
                let g = q - lambda;
                [v[1], g * v[0]]
            });
            let x_end = grid[k + 1];
            while ri < record.len() && record[ri] <= x_end + 1e-13 {
                out.push((u[0], u[1]));
                ri += 1;
            }
        }
        while ri < record.len() {
            out.push((u[0], u[1]));
            ri += 1;
        }
        Ok(out)
    }
}

fn sample_steps(potential: &PotentialSpec, grid: &[f64]) -> Vec<StepData> {
    grid.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let h = b - a;
            let mid = 0.5 * (a + b);
            let mut q = [ZERO; 6];
            for (i, qi) in q.iter_mut().enumerate() {
                *qi = potential.eval_in_interval(a + STAGE_X[i] * h, mid);
            }
            StepData { h, q }
        })
        .collect()
}

#[inline]
fn rk_step<const N: usize>(
    u: &mut [Complex64; N],
    step: &StepData,
    rhs: impl Fn(Complex64, &[Complex64; N]) -> [Complex64; N],
) {
    let h = step.h;
    let mut k = [[ZERO; N]; 6];
    k[0] = rhs(step.q[0], u);
    for i in 1..6 {
        let mut v = *u;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = A[i][j] * h;
            if a != 0.0 {
                for (vn, kn) in v.iter_mut().zip(kj.iter()) {
                    *vn += a * kn;
                }
            }
        }
        k[i] = rhs(step.q[i], &v);
    }
    for (i, ki) in k.iter().enumerate() {
        let b = B[i] * h;
        if b != 0.0 {
            for (un, kn) in u.iter_mut().zip(ki.iter()) {
                *un += b * kn;
            }
        }
    }
}

/// One-off basis solve; pipelines should build a `DiscriminantEngine` and
/// reuse it across lambda.
pub fn solve_basis(
    q: &PotentialSpec,
    lambda: Complex64,
    cfg: &IntegratorConfig,
) -> Result<DiscriminantSample> {
    DiscriminantEngine::new(q, cfg)?.sample(lambda)
}

/// The Hill discriminant F(lambda).
pub fn discriminant(q: &PotentialSpec, lambda: Complex64, cfg: &IntegratorConfig) -> Result<Complex64> {
    DiscriminantEngine::new(q, cfg)?.discriminant(lambda)
}

/// (dF/dlambda, d2F/dlambda2) from the jointly integrated variational system.
pub fn discriminant_derivatives(
    q: &PotentialSpec,
    lambda: Complex64,
    cfg: &IntegratorConfig,
) -> Result<(Complex64, Complex64)> {
    let s = solve_basis(q, lambda, cfg)?;
    Ok((s.df, s.d2f))
}

/// Reference discriminant of the free operator: 2 cos sqrt(lambda).
pub fn free_discriminant(lambda: Complex64) -> Complex64 {
    2.0 * lambda.sqrt().cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn free_engine() -> DiscriminantEngine {
        DiscriminantEngine::new(&PotentialSpec::zero(), &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn free_basis_at_pi_squared() {
        let s = free_engine().sample(c(PI * PI, 0.0)).unwrap();
        assert!((s.theta1 - c(-1.0, 0.0)).norm() < 1e-10);
        assert!(s.phi1.norm() < 1e-10);
        assert!((s.f - c(-2.0, 0.0)).norm() < 1e-10);
        // F' = -sin(sqrt(lambda))/sqrt(lambda) = 0 at lambda = pi^2.
        assert!(s.df.norm() < 1e-10);
        assert!(s.wronskian_residual < 1e-12);
    }

    #[test]
    fn free_basis_at_zero() {
        // Solutions 1 and x.
        let s = free_engine().sample(ZERO).unwrap();
        assert!((s.theta1 - c(1.0, 0.0)).norm() < 1e-12);
        assert!((s.phi1 - c(1.0, 0.0)).norm() < 1e-12);
        assert!((s.dphi1 - c(1.0, 0.0)).norm() < 1e-12);
        assert!((s.f - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn free_discriminant_values() {
        let eng = free_engine();
        let f = eng.discriminant(c(4.0 * PI * PI, 0.0)).unwrap();
        assert!((f - c(2.0, 0.0)).norm() < 1e-10);
        let f = eng.discriminant(c(-1.0, 0.0)).unwrap();
        assert!((f.re - 2.0 * 1.0f64.cosh()).abs() < 1e-10);
        // Band edge of the free operator at 4 pi^2.
        let s = eng.sample(c(4.0 * PI * PI, 0.0)).unwrap();
        assert!(s.df.norm() < 1e-10);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let q = PotentialSpec::cosine();
        let eng = DiscriminantEngine::new(&q, &IntegratorConfig::default()).unwrap();
        let lam = c(17.3, 0.4);
        let s = eng.sample(lam).unwrap();
        let h = 1e-4;
        let fp = eng.discriminant(lam + c(h, 0.0)).unwrap();
        let fm = eng.discriminant(lam - c(h, 0.0)).unwrap();
        let df_fd = (fp - fm) / (2.0 * h);
        let d2f_fd = (fp - 2.0 * s.f + fm) / (h * h);
        assert!((s.df - df_fd).norm() < 1e-7 * s.df.norm().max(1.0));
        assert!((s.d2f - d2f_fd).norm() < 1e-4 * s.d2f.norm().max(1.0));
    }

    #[test]
    fn wronskian_residual_bound() {
        let q = PotentialSpec::sawtooth();
        let eng = DiscriminantEngine::new(&q, &IntegratorConfig::default()).unwrap();
        for &lam in &[c(-2000.0, 0.0), c(2000.0, 0.0), c(500.0, 120.0), c(3.0, -40.0)] {
            let s = eng.sample(lam).unwrap();
            assert!(s.wronskian_residual < 1e-8, "residual {} at {}", s.wronskian_residual, lam);
        }
    }

    #[test]
    fn conjugate_symmetry_for_pt_potential() {
        let q = PotentialSpec::sawtooth();
        let eng = DiscriminantEngine::new(&q, &IntegratorConfig::default()).unwrap();
        for &lam in &[c(25.0, 3.0), c(300.0, -10.0), c(-8.0, 1.5)] {
            let f = eng.discriminant(lam).unwrap();
            let fc = eng.discriminant(lam.conj()).unwrap();
            assert!((fc - f.conj()).norm() < 1e-9);
        }
    }

    #[test]
    fn fifth_order_convergence_on_free_potential() {
        let q = PotentialSpec::zero();
        let lam = c(300.0, 0.0);
        let exact = free_discriminant(lam);
        let err = |steps: u32| {
            let cfg = IntegratorConfig { steps, ..Default::default() };
            (discriminant(&q, lam, &cfg).unwrap() - exact).norm()
        };
        let e64 = err(64);
        let e128 = err(128);
        assert!(
            e64 / e128 >= 2f64.powf(4.5),
            "halving gained only {:.2}x",
            e64 / e128
        );
    }

    #[test]
    fn energy_cap_is_enforced() {
        let eng = free_engine();
        let too_big = c(2.0 * eng.config().energy_cap, 0.0);
        assert!(matches!(eng.discriminant(too_big), Err(Error::Magnitude { .. })));
    }

    #[test]
    fn determinism_across_engines() {
        let q = PotentialSpec::mathieu(1.0, -1.0);
        let cfg = IntegratorConfig::default();
        let a = DiscriminantEngine::new(&q, &cfg).unwrap();
        let b = DiscriminantEngine::new(&q, &cfg).unwrap();
        let lam = c(123.456, 7.89);
        assert_eq!(a.discriminant(lam).unwrap(), b.discriminant(lam).unwrap());
    }

    #[test]
    fn trace_recovers_floquet_solution() {
        // Free operator: y = exp(i sqrt(lambda) x) from (1, i sqrt(lambda)).
        let eng = free_engine();
        let lam = c(PI * PI, 0.0);
        let root = lam.sqrt();
        let xs: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let tr = eng.trace_solution(lam, (c(1.0, 0.0), Complex64::i() * root), &xs).unwrap();
        for (k, &(y, _)) in tr.iter().enumerate() {
            let expect = (Complex64::i() * root * xs[k]).exp();
            assert!((y - expect).norm() < 1e-10);
        }
    }
}
