use std::f64::consts::{FRAC_PI_2, PI};

use lissajous_core::classical::{energy_matched, lissajous};
use lissajous_core::fields::{
    current_density, divergence_residual, eval_wavefunction, localization_mass, phase_field, phase_of,
    probability_density, two_form_residual, winding_number, Grid2D, WaveFunction,
};
use lissajous_core::specfun::LogFactorialTable;
use lissajous_core::states::{build_from_zeta, wrap_angle, ComplexAmplitude, DegenerateSubspace, LcsState};
use proptest::prelude::*;

fn state(n: usize, p: usize, q: usize, modulus: f64, theta: f64) -> LcsState {
    build_from_zeta(DegenerateSubspace::new(n, p, q).unwrap(), ComplexAmplitude::new(modulus, theta).unwrap()).unwrap()
}

/// `r^{2N} e^{-r^2} / (pi N!)`
fn circular_density(n: usize, r: f64) -> f64 {
    let lf = LogFactorialTable::shared().values()[n];
    if r == 0.0 {
        return if n == 0 { 1.0 / PI } else { 0.0 };
    }
    (2.0 * n as f64 * r.ln() - r * r - PI.ln() - lf).exp()
}

#[test]
fn ground_state_is_anisotropic_gaussian() {
    for (p, q) in [(1, 1), (1, 2), (2, 3), (3, 5)] {
        let wf = WaveFunction::new(&state(0, p, q, 1.0, 0.3)).unwrap();
        let peak = (p as f64 * q as f64).sqrt() / PI;
        assert!((wf.density(0.0, 0.0).unwrap() - peak).abs() < 1e-15);
        for (x, y) in [(0.3, -0.7), (1.1, 0.2), (-0.9, 1.4)] {
            let want = peak * (-(q as f64) * x * x - p as f64 * y * y).exp();
            assert!((wf.density(x, y).unwrap() - want).abs() < 1e-14 * peak);
        }
    }
}

#[test]
fn single_quantum_vanishes_at_origin() {
    let wf = WaveFunction::new(&state(1, 1, 1, 0.7, 1.0)).unwrap();
    assert!(wf.psi(0.0, 0.0).unwrap().norm() < 1e-15);
}

#[test]
fn real_unit_amplitude_is_symmetric_under_exchange() {
    let wf = WaveFunction::new(&state(12, 1, 1, 1.0, 0.0)).unwrap();
    for (x, y) in [(0.4, 1.9), (-2.2, 0.5), (3.0, -1.0)] {
        let a = wf.density(x, y).unwrap();
        let b = wf.density(y, x).unwrap();
        assert!((a - b).abs() <= 1e-13 * a.max(1e-300));
    }
}

#[test]
fn vortex_limit_matches_circular_oracle() {
    let n = 20;
    let wf = WaveFunction::new(&state(n, 1, 1, 1.0, -FRAC_PI_2)).unwrap();
    let reference = wf.psi(1.0, 0.0).unwrap();
    for r in [0.5, 1.5, 2.5, (n as f64).sqrt(), 5.5, 7.0] {
        for k in 0..24 {
            let phi = 2.0 * PI * k as f64 / 24.0 + 0.05;
            let (x, y) = (r * phi.cos(), r * phi.sin());
            let want = circular_density(n, r);
            let got = wf.density(x, y).unwrap();
            if want <= 1e-6 {
                continue;
            }
            assert!((got - want).abs() <= 1e-10 * want, "r={r} phi={phi}: {got} vs {want}");
            let psi = wf.psi(x, y).unwrap();
            let offset = wrap_angle(phase_of(psi) - phase_of(reference) - n as f64 * phi);
            assert!(offset.abs() < 1e-9, "phase offset {offset} at r={r} phi={phi}");
        }
    }
}

#[test]
fn vortex_current_is_tangential() {
    let n = 20;
    let s = state(n, 1, 1, 1.0, -FRAC_PI_2);
    let grid = Grid2D::new(-6.0, 6.0, -6.0, 6.0, 61, 61).unwrap();
    let field = eval_wavefunction(&s, &grid).unwrap();
    let j = current_density(&field);
    let rho = probability_density(&field);
    let peak = field.peak_density();
    for i in 0..grid.nx {
        for k in 0..grid.ny {
            let (x, y) = (grid.x(i), grid.y(k));
            let r = x.hypot(y);
            if r < 1e-9 {
                continue;
            }
            let want = [-(n as f64) * rho.values[[i, k]] * y / (r * r), n as f64 * rho.values[[i, k]] * x / (r * r)];
            let got = j.values[[i, k]];
            assert!((got[0] - want[0]).abs() < 1e-12 * peak && (got[1] - want[1]).abs() < 1e-12 * peak);
        }
    }
}

#[test]
fn vortex_density_is_rotationally_symmetric() {
    let wf = WaveFunction::new(&state(20, 1, 1, 1.0, FRAC_PI_2)).unwrap();
    for r in [2.0, 3.7, 4.47, 5.9] {
        let base = wf.density(r, 0.0).unwrap();
        for k in 1..37 {
            let phi = 2.0 * PI * k as f64 / 37.0;
            let v = wf.density(r * phi.cos(), r * phi.sin()).unwrap();
            assert!((v - base).abs() <= 1e-8 * base);
        }
    }
}

#[test]
fn vortex_winding_and_its_reversal() {
    let n = 20;
    let grid = Grid2D::square(8.0, 81).unwrap();
    let ccw = eval_wavefunction(&state(n, 1, 1, 1.0, -FRAC_PI_2), &grid).unwrap();
    let cw = eval_wavefunction(&state(n, 1, 1, 1.0, FRAC_PI_2), &grid).unwrap();
    let radius = (n as f64).sqrt();
    assert_eq!(winding_number(&ccw, (0.0, 0.0), radius, 1024).unwrap(), n as i64);
    assert_eq!(winding_number(&cw, (0.0, 0.0), radius, 1024).unwrap(), -(n as i64));
    for n in [1usize, 3, 7] {
        let f = eval_wavefunction(&state(n, 1, 1, 1.0, -FRAC_PI_2), &grid).unwrap();
        assert_eq!(winding_number(&f, (0.0, 0.0), 1.5, 512).unwrap(), n as i64);
    }
}

#[test]
fn vortex_phase_field_equals_angle_multiple() {
    let n = 5;
    let s = state(n, 1, 1, 1.0, -FRAC_PI_2);
    let grid = Grid2D::square(4.0, 41).unwrap();
    let field = eval_wavefunction(&s, &grid).unwrap();
    let chi = phase_field(&field, field.default_rho_floor());
    let offset = phase_of(WaveFunction::new(&s).unwrap().psi(1.0, 0.0).unwrap());
    for i in 0..grid.nx {
        for k in 0..grid.ny {
            let v = chi.values[[i, k]];
            let (x, y) = (grid.x(i), grid.y(k));
            if x == 0.0 && y == 0.0 {
                assert!(v.is_nan());
                continue;
            }
            if v.is_nan() {
                continue;
            }
            let d = wrap_angle(v - offset - n as f64 * y.atan2(x));
            assert!(d.abs() < 1e-9);
        }
    }
}

#[test]
fn standing_wave_has_no_current() {
    for (p, q) in [(1, 1), (1, 2), (2, 3)] {
        for theta in [0.0, PI] {
            let s = state(10, p, q, 1.0, theta);
            let field = eval_wavefunction(&s, &Grid2D::square(7.0, 101).unwrap()).unwrap();
            assert!(current_density(&field).max_norm() <= 1e-12 * field.peak_density());
        }
    }
}

#[test]
fn divergence_converges_at_second_order() {
    let s = state(10, 1, 2, 1.0, FRAC_PI_2);
    let grid = Grid2D::square(7.0, 201).unwrap();
    let coarse = divergence_residual(&current_density(&eval_wavefunction(&s, &grid).unwrap()));
    let fine = divergence_residual(&current_density(&eval_wavefunction(&s, &grid.refined()).unwrap()));
    let ratio = coarse / fine;
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}

#[test]
fn two_form_agrees_for_intermediate_state() {
    let s = state(8, 1, 1, 1.0, PI / 5.0);
    let field = eval_wavefunction(&s, &Grid2D::square(6.0, 121).unwrap()).unwrap();
    assert!(two_form_residual(&field, 1e-8, 1e-5).unwrap() < 1e-6);
}

#[test]
fn total_mass_and_unbounded_tube() {
    let s = state(20, 2, 3, 1.0, PI / 4.0);
    let grid = Grid2D::square(8.0, 241).unwrap();
    let rho = probability_density(&eval_wavefunction(&s, &grid).unwrap());
    assert!((rho.trapezoid_integral() - 1.0).abs() < 1e-6);
    let orbit = energy_matched(&s, 2048).unwrap();
    assert!((localization_mass(&rho, &orbit, 100.0) - 1.0).abs() < 1e-12);
    let far = lissajous(0.1, 0.1, 2, 3, 0.0, 64).unwrap();
    assert!(localization_mass(&rho, &far, 1e-3) < 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn density_is_nonnegative_and_conjugation_reflects_current(
        n in 0usize..12,
        pair in 0usize..3,
        theta in -3.1f64..3.1,
        x in -4.0f64..4.0,
        y in -4.0f64..4.0,
    ) {
        let (p, q) = [(1, 1), (1, 2), (2, 3)][pair];
        let s = state(n, p, q, 1.0, theta);
        let a = WaveFunction::new(&s).unwrap();
        let b = WaveFunction::new(&s.conj()).unwrap();
        let (pa, ga) = a.eval(x, y).unwrap();
        let (pb, gb) = b.eval(x, y).unwrap();
        prop_assert!(pa.norm_sqr() >= 0.0);
        prop_assert!((pa.norm_sqr() - pb.norm_sqr()).abs() <= 1e-14);
        for axis in 0..2 {
            let ja = (pa.conj() * ga[axis]).im;
            let jb = (pb.conj() * gb[axis]).im;
            prop_assert!((ja + jb).abs() <= 1e-13);
        }
    }
}
