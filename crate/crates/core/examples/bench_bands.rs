use pt_hill_core::bands::{build_bands, detect_complexation_points, real_gaps, conjugation_symmetry_check, half_line_test, real_spectrum_test};
use pt_hill_core::bloch::{default_t_grid, number_eigenvalues, LocalizationConfig};
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
    let t0 = Instant::now();
    let curves = number_eigenvalues(&eng, &grid, 12, &loc, &tol).unwrap();
    let bands = build_bands(&eng, &curves, &loc, &tol).unwrap();
    println!("bands built in {:.2?}", t0.elapsed());
    for b in &bands {
        if b.n.abs() < 5 || b.n < 0 { continue; }
        let cps = detect_complexation_points(&eng, b, &tol).unwrap();
        println!(
            "n={:+} eps={:?} delta={:?} tails=({},{}) cps={} im(l0)={:+.3e}",
            b.n, b.eps_n, b.delta_n,
            b.left_tail.as_ref().map_or(0, |t| t.len()),
            b.right_tail.as_ref().map_or(0, |t| t.len()),
            cps.len(), b.endpoints.0.im
        );
    }
    let gaps = real_gaps(&bands, tol.merge_tol);
    println!("gaps ({}): {:?}", gaps.len(), &gaps.iter().take(8).collect::<Vec<_>>());
    println!("conj defect: {:.3e}", conjugation_symmetry_check(&bands, &tol));
    let t0 = Instant::now();
    let (hl, _) = half_line_test(&eng, 8, &loc, &tol).unwrap();
    let (rs, wit) = real_spectrum_test(&eng, 8, &loc, &tol).unwrap();
    println!("half_line={hl} real_spectrum={rs} witness={wit:?} in {:.2?}", t0.elapsed());
}
