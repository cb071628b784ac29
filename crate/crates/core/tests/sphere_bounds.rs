use std::f64::consts::PI;

use delsarte_core::sphere::{self, IsotropicCoeffs, TuranSphereInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn legendre_closed(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        2 => (3.0 * x * x - 1.0) / 2.0,
        3 => (5.0 * x.powi(3) - 3.0 * x) / 2.0,
        4 => (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0,
        _ => unreachable!(),
    }
}

#[test]
fn legendre_matches_closed_forms() {
    let angles: Vec<f64> = (0..=20).map(|i| PI * i as f64 / 20.0).collect();
    let v = sphere::gegenbauer_values(2, 4, &angles).unwrap();
    for n in 0..=4 {
        for (j, t) in angles.iter().enumerate() {
            assert!((v[n][j] - legendre_closed(n, t.cos())).abs() < 1e-14);
        }
    }
}

#[test]
fn convolution_factor_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let angles: Vec<f64> = (0..64).map(|i| PI * i as f64 / 63.0).collect();
    for _ in 0..20 {
        let n = rng.gen_range(1..12);
        let a = IsotropicCoeffs::new(2, (0..=n).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
        let b = IsotropicCoeffs::new(2, (0..=n).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
        let coeff = sphere::isotropic_convolve(&a, &b).unwrap().evaluate_grid(&angles);
        let quad = sphere::quadrature_convolve(&a, &b, &angles).unwrap();
        for (x, y) in coeff.iter().zip(&quad) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn cap_volume_closed_form_on_s2() {
    for i in 1..=12 {
        let r = PI * i as f64 / 12.0;
        assert!((sphere::cap_volume(2, r) - 2.0 * PI * (1.0 - r.cos())).abs() < 1e-11);
    }
    // S^3: 2 pi^2 * (r - sin r cos r) / pi.
    for i in 1..=6 {
        let r = PI * i as f64 / 6.0;
        let closed = PI * (2.0 * r - (2.0 * r).sin());
        assert!((sphere::cap_volume(3, r) - closed).abs() < 1e-11);
    }
}

#[test]
fn witness_is_schoenberg_and_vanishes_beyond_c() {
    for d in [2usize, 3] {
        for c in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
            let lb = sphere::turan_lower_bound(d, c, 48).unwrap();
            assert!(lb.witness.b.iter().all(|&b| b >= 0.0));
            assert!((lb.witness.integral() - lb.value).abs() < 1e-10);
            // Truncated, so psi(0) is below 1 and approaches it as N grows.
            let at0 = lb.witness.evaluate(0.0);
            assert!(at0 <= 1.0 + 1e-12 && at0 > 0.8, "d={d} c={c}: {at0}");
        }
    }
}

#[test]
fn root_recovers_cap_coefficients() {
    let lb = sphere::turan_lower_bound(2, PI / 2.0, 24).unwrap();
    let root = sphere::sphere_convolution_root(&lb.witness, 1e-12).unwrap();
    let back = sphere::isotropic_convolve(&root, &root).unwrap();
    for (x, y) in back.b.iter().zip(&lb.witness.b) {
        assert!((x - y).abs() < 1e-12);
    }
    // Cap indicator coefficients by independent quadrature (closed form for d = 2:
    // beta_n = (2n+1)/2 * ∫_{cos r}^1 P_n(x) dx).
    let r = PI / 4.0;
    let vol = sphere::cap_volume(2, r);
    for n in 0..5 {
        let steps = 20_000;
        let lo = r.cos();
        let h = (1.0 - lo) / steps as f64;
        let integral: f64 = (0..steps).map(|i| legendre_closed(n, lo + (i as f64 + 0.5) * h) * h).sum();
        let beta = (2 * n + 1) as f64 / 2.0 * integral;
        assert!((root.b[n] - beta.abs() / vol.sqrt()).abs() < 1e-7, "n={n}");
    }
}

#[test]
fn random_roots_reconvolve() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let d = rng.gen_range(1..5);
        let n = rng.gen_range(0..20);
        let a = IsotropicCoeffs::new(d, (0..=n).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
        let r = sphere::sphere_convolution_root(&a, 1e-12).unwrap();
        let back = sphere::isotropic_convolve(&r, &r).unwrap();
        let err = back.b.iter().zip(&a.b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8);
    }
}

#[test]
fn bounds_bracket_and_refine() {
    for d in [2usize, 3] {
        let mut prev_upper = 0.0;
        for c in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
            let coarse = sphere::solve_turan_sphere(&TuranSphereInstance::new(d, c, 24, 32).unwrap()).unwrap();
            let fine = sphere::solve_turan_sphere(&TuranSphereInstance::new(d, c, 24, 64).unwrap()).unwrap();
            assert!(coarse.certificate_ok && fine.certificate_ok);
            assert!(fine.lower <= fine.upper + 1e-9, "d={d} c={c}");
            assert!(fine.upper <= coarse.upper + 1e-9, "d={d} c={c}");
            assert!(fine.upper <= fine.omega_d + 1e-9);
            assert!(fine.upper >= prev_upper - 1e-9);
            prev_upper = fine.upper;
        }
    }
}

#[test]
fn invalid_instances_rejected() {
    assert!(TuranSphereInstance::new(2, 0.0, 16, 32).is_err());
    assert!(TuranSphereInstance::new(2, 4.0, 16, 32).is_err());
    assert!(TuranSphereInstance::new(2, 1.0, 4, 32).is_err());
    assert!(TuranSphereInstance::new(2, 1.0, 16, 8).is_err());
    assert!(TuranSphereInstance::new(0, 1.0, 16, 32).is_err());
}

#[test]
fn circle_case_is_flagged() {
    let b = sphere::solve_turan_sphere(&TuranSphereInstance::new(1, PI / 2.0, 16, 32).unwrap()).unwrap();
    assert!(b.extrapolated);
    assert!(b.lower <= b.upper + 1e-9);
}

#[test]
fn tail_relaxation_value_is_half_the_area() {
    // b_0 = r = 1/2 is always feasible, and the row at t = pi gives
    // b_0 <= r + sum_{n>=1} b_n = 1 - b_0. So the relaxation sits at omega_d / 2.
    for d in [2usize, 3, 4] {
        for c in [0.3, 1.0, 2.0, 3.0] {
            let b = sphere::solve_turan_sphere(&TuranSphereInstance::new(d, c, 16, 32).unwrap()).unwrap();
            assert!((b.upper_b0 - 0.5).abs() < 1e-12, "d={d} c={c}: {}", b.upper_b0);
        }
    }
}
