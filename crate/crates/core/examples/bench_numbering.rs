use pt_hill_core::bloch::{default_t_grid, matrix_oracle, number_eigenvalues, LocalizationConfig};
use pt_hill_core::monodromy::{DiscriminantEngine, IntegratorConfig};
use pt_hill_core::potential::PotentialSpec;
use pt_hill_core::types::Tolerances;
use std::time::Instant;

fn main() {
    let q = PotentialSpec::sawtooth();
    let eng = DiscriminantEngine::new(&q, &IntegratorConfig::default()).unwrap();
    let loc = LocalizationConfig::default();
    let tol = Tolerances::default();
    let grid = default_t_grid(&loc);
    println!("grid points: {}", grid.len());
    let t0 = Instant::now();
    let curves = number_eigenvalues(&eng, &grid, 12, &loc, &tol).unwrap();
    println!("numbering |n|<=12 took {:.2?}", t0.elapsed());
    // Spot check against the Galerkin oracle at t = pi/2.
    let t0 = Instant::now();
    let oracle = matrix_oracle(&q, std::f64::consts::PI / 2.0, 64).unwrap();
    println!("oracle M=64 took {:.2?}", t0.elapsed());
    let tref = grid.iter().copied().min_by(|a, b| (a - std::f64::consts::FRAC_PI_2).abs().total_cmp(&(b - std::f64::consts::FRAC_PI_2).abs())).unwrap();
    let mut worst: f64 = 0.0;
    for n in -8..=8i32 {
        let s = curves.curve(n).unwrap().iter().find(|s| s.t == tref).unwrap();
        let best = oracle.iter().map(|&v| (v - s.lambda).norm()).fold(f64::INFINITY, f64::min);
        let rel = best / s.lambda.norm().max(1.0);
        worst = worst.max(rel);
        if n.abs() <= 3 {
            println!("n={n:+} lambda={:.6}{:+.6}i rel={:.2e}", s.lambda.re, s.lambda.im, rel);
        }
    }
    println!("worst relative oracle mismatch |n|<=8: {worst:.2e}");
}
