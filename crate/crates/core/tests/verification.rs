use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use lissajous_core::classical::{ehrenfest_centroid, lissajous};
use lissajous_core::fields::Grid2D;
use lissajous_core::states::{build_from_zeta, evolve_glauber, ComplexAmplitude, DegenerateSubspace, GlauberProduct, LcsState};
use lissajous_core::verify::{
    check_state, completeness_general, run_suite, Comparison, QuadratureSpec, Tolerances,
};
use num_complex::Complex64;

fn vortex(n: usize) -> (DegenerateSubspace, ComplexAmplitude) {
    (DegenerateSubspace::new(n, 1, 1).unwrap(), ComplexAmplitude::new(1.0, FRAC_PI_2).unwrap())
}

#[test]
fn empty_parameter_list_reports_only_completeness() {
    let grid = Grid2D::square(8.0, 101).unwrap();
    let report = run_suite(&[], &grid, QuadratureSpec::default(), &Tolerances::default()).unwrap();
    assert!(report.overall, "{}", report.to_text());
    assert!(!report.checks.is_empty());
    assert!(report.checks.iter().all(|c| c.name.starts_with("completeness")));
}

#[test]
fn isotropic_vortex_passes_every_check() {
    let start = Instant::now();
    let grid = Grid2D::square(8.0, 401).unwrap();
    let report = run_suite(&[vortex(20)], &grid, QuadratureSpec::default(), &Tolerances::default()).unwrap();
    eprintln!("{}elapsed {:?}", report.to_text(), start.elapsed());
    assert!(report.overall);
    for name in ["norm", "construction_equivalence", "eigenvalue_consistency", "divergence", "divergence_order", "two_form_current", "winding_number", "localization"] {
        assert!(report.checks.iter().any(|c| c.name == name), "missing {name}");
    }
}

#[test]
fn corrupted_coefficient_fails_eigenvalue_consistency() {
    let (sub, zeta) = vortex(20);
    let good = build_from_zeta(sub, zeta).unwrap();
    let mut coeffs = good.coeffs().to_vec();
    coeffs[7] += Complex64::new(1e-3, 0.0);
    let bad = LcsState::from_coefficients(sub, zeta, coeffs).unwrap();
    let grid = Grid2D::square(8.0, 201).unwrap();
    let checks = check_state(&bad, &grid, &Tolerances::default()).unwrap();
    let eigen = checks.iter().find(|c| c.name == "eigenvalue_consistency").unwrap();
    assert!(!eigen.pass);
    let clean = check_state(&good, &grid, &Tolerances::default()).unwrap();
    assert!(clean.iter().find(|c| c.name == "eigenvalue_consistency").unwrap().pass);
}

#[test]
fn unattainable_tolerance_is_recorded_not_thrown() {
    let tol = Tolerances {
        completeness: 1e-16,
        ..Tolerances::default()
    };
    let report = run_suite(&[], &Grid2D::square(8.0, 51).unwrap(), QuadratureSpec::default(), &tol).unwrap();
    assert!(!report.overall);
}

#[test]
fn truncating_grid_aborts() {
    let grid = Grid2D::square(2.0, 51).unwrap();
    assert!(run_suite(&[vortex(20)], &grid, QuadratureSpec::default(), &Tolerances::default()).is_err());
}

#[test]
fn completeness_is_hermitian_and_improves_with_radial_nodes() {
    let sub = DegenerateSubspace::new(10, 1, 2).unwrap();
    let mut previous = f64::INFINITY;
    for radial in 4..=30 {
        let m = completeness_general(sub, QuadratureSpec { radial_nodes: radial, angular_nodes: 41 }).unwrap();
        assert!(m.hermitian_residual() <= 1e-13);
        let r = m.identity_residual();
        assert!(r <= previous + 1e-12, "radial={radial}: {r} > {previous}");
        previous = r;
    }
    assert!(previous < 1e-12);
}

#[test]
fn check_comparisons() {
    use lissajous_core::verify::Check;
    assert!(Check::new("a", "", 4.5, 0.2, Comparison::Near { target: 4.0 }).pass);
    assert!(!Check::new("a", "", 5.0, 0.2, Comparison::Near { target: 4.0 }).pass);
    assert!(Check::new("a", "", 0.95, 0.9, Comparison::AtLeast).pass);
    assert!(!Check::new("a", "", f64::NAN, 0.9, Comparison::AtMost).pass);
}

#[test]
fn centroid_is_time_shifted_lissajous_curve() {
    for (p, q) in [(1usize, 1usize), (1, 2), (2, 3), (3, 5)] {
        let g = GlauberProduct::new(Complex64::from_polar(1.2, 0.7), Complex64::from_polar(0.9, -0.4));
        let (ra, ta) = g.alpha.to_polar();
        let (rb, tb) = g.beta.to_polar();
        let centroid = ehrenfest_centroid(g, p, q, 512).unwrap();
        let curve = lissajous(
            2f64.sqrt() * ra / (q as f64).sqrt(),
            2f64.sqrt() * rb / (p as f64).sqrt(),
            p,
            q,
            q as f64 * tb / p as f64 - ta,
            512,
        )
        .unwrap();
        let shift = -tb / p as f64;
        for (&t, &(x, y)) in centroid.times().iter().zip(centroid.samples()) {
            let (cx, cy) = curve.params().position(t + shift);
            assert!((x - cx).abs() < 1e-12 && (y - cy).abs() < 1e-12);
        }
    }
}

#[test]
fn centroid_follows_evolved_amplitudes() {
    let g = GlauberProduct::new(Complex64::from_polar(1.1, 0.3), Complex64::from_polar(0.6, 1.9));
    let (p, q) = (2, 3);
    let path = ehrenfest_centroid(g, p, q, 64).unwrap();
    for (&t, &(x, y)) in path.times().iter().zip(path.samples()) {
        let e = evolve_glauber(g, q as f64, p as f64, t);
        // <x> = sqrt(2/q) Re alpha(t), <y> = sqrt(2/p) Re beta(t)
        assert!((x - (2.0 / q as f64).sqrt() * e.alpha.re).abs() < 1e-12);
        assert!((y - (2.0 / p as f64).sqrt() * e.beta.re).abs() < 1e-12);
    }
    assert!((path.period() - 2.0 * PI).abs() < 1e-15);
}
