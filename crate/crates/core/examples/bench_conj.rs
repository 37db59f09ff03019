use pt_hill_core::bands::build_bands;
use pt_hill_core::bloch::{default_t_grid, number_eigenvalues, LocalizationConfig};
use pt_hill_core::monodromy::{DiscriminantEngine, IntegratorConfig};
use pt_hill_core::potential::PotentialSpec;
use pt_hill_core::types::Tolerances;
use std::f64::consts::PI;

fn main() {
    let q = PotentialSpec::sawtooth();
    let eng = DiscriminantEngine::new(&q, &IntegratorConfig::default()).unwrap();
    let loc = LocalizationConfig::default();
    let tol = Tolerances::default();
    let grid = default_t_grid(&loc);
    let curves = number_eigenvalues(&eng, &grid, 12, &loc, &tol).unwrap();
    let bands = build_bands(&eng, &curves, &loc, &tol).unwrap();
    let mut all = vec![];
    for b in &bands { for s in &b.samples { all.push(s.lambda); } }
    let window = 12;
    let mut worst = (0.0f64, 0, 0.0f64, num_complex::Complex64::default());
    for b in &bands {
        for s in &b.samples {
            if s.lambda.im.abs() < 1e-7 * s.lambda.norm().max(1.0) { continue; }
            let partner = if s.t < PI / 2.0 { -b.n } else { -b.n - 1 };
            if partner.abs() > window { continue; }
            let t = s.lambda.conj();
            let best = all.iter().map(|&l| (l - t).norm()).fold(f64::INFINITY, f64::min);
            if best > worst.0 { worst = (best, b.n, s.t, s.lambda); }
        }
    }
    println!("worst defect {:.3e} band n={} t={:.9} lambda={}", worst.0, worst.1, worst.2, worst.3);
}
