mod common;

use common::{c, canonical_matrix, ci, det_from_definition, eiz, random_smooth_system, simpson};
use diracspec::boundary::{delta0, BoundaryConditions, Canonical};
use diracspec::gridfn::SampledFunction;
use diracspec::ode::{char_det_direct, closed_form_q12_zero, e_pm, fundamental_matrix, monodromy, DiracSystem, Sign};
use diracspec::DiracError;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q21_fn(x: f64) -> C {
    ci((2.0 * std::f64::consts::PI * x).cos(), 0.5 * x)
}

fn q12_zero_system(b1: f64, b2: f64, n: usize) -> DiracSystem<f64> {
    DiracSystem::new(b1, b2, SampledFunction::zeros(n).unwrap(), SampledFunction::from_fn(n, q21_fn).unwrap()).unwrap()
}

/// `−i b2 e^{i b2 λ x} ∫_0^x Q21(t) e^{i(b1−b2)λt} dt` by Simpson on the analytic `Q21`.
fn phi21_oracle(b1: f64, b2: f64, l: C, x: f64) -> C {
    let integral = simpson(|t| q21_fn(t) * eiz(l * (b1 - b2) * t), 0.0, x, 2000);
    -C::i() * b2 * eiz(l * b2 * x) * integral
}

#[test]
fn invalid_weights_are_rejected() {
    let z = SampledFunction::<f64>::zeros(8).unwrap();
    assert!(matches!(DiracSystem::new(1.0, 2.0, z.clone(), z.clone()), Err(DiracError::InvalidWeights { .. })));
    let z2 = SampledFunction::<f64>::zeros(16).unwrap();
    assert!(matches!(DiracSystem::new(-1.0, 2.0, z, z2), Err(DiracError::GridMismatch { .. })));
}

#[test]
fn derived_constants() {
    let sys = DiracSystem::<f64>::free(-1.0, 2.0, 8).unwrap();
    assert_eq!(sys.a(1), -1.0);
    assert_eq!(sys.a(2), 0.5);
    // α_k = b_j/(b_j − b_k), γ_k = b_j/b_k.
    assert!((sys.alpha(1) - 2.0 / 3.0).abs() < 1e-15);
    assert!((sys.alpha(2) - 1.0 / 3.0).abs() < 1e-15);
    assert!((sys.alpha(1) + sys.alpha(2) - 1.0).abs() < 1e-15);
    assert_eq!(sys.gamma(1), -2.0);
    assert_eq!(sys.gamma(2), -0.5);
}

#[test]
fn free_fundamental_matrix_is_diagonal_exponential() {
    let sys = DiracSystem::<f64>::free(-1.0, 2.0, 64).unwrap();
    let l = ci(3.0, 0.7);
    let fm = fundamental_matrix(&sys, l, 64).unwrap();
    assert_eq!(fm.at(0), diracspec::mat2::Mat2::identity());
    for i in 0..=64 {
        let x = i as f64 / 64.0;
        let m = fm.at(i);
        assert!((m.get(0, 0) - eiz(l * -1.0 * x)).norm() < 1e-13);
        assert!((m.get(1, 1) - eiz(l * 2.0 * x)).norm() < 1e-13);
        assert_eq!(m.get(0, 1), c(0.0));
        assert_eq!(m.get(1, 0), c(0.0));
    }
}

#[test]
fn q12_zero_lower_left_entry_matches_closed_form() {
    let (b1, b2) = (-1.0, 1.0);
    let sys = q12_zero_system(b1, b2, 512);
    for l in [c(0.0), c(5.0), ci(3.0, 1.0)] {
        let fm = fundamental_matrix(&sys, l, 512).unwrap();
        let cf = closed_form_q12_zero(sys.q21(), b1, b2, l, 512).unwrap();
        for i in (0..=512).step_by(64) {
            let x = i as f64 / 512.0;
            let want = phi21_oracle(b1, b2, l, x);
            assert!((fm.at(i).get(1, 0) - want).norm() < 1e-5, "ode λ={l} x={x}");
            assert!((cf.at(i).get(1, 0) - want).norm() < 1e-5, "closed form λ={l} x={x}");
            assert_eq!(fm.at(i).get(0, 1), c(0.0));
        }
    }
}

#[test]
fn liouville_identity_for_random_potentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..4 {
        let sys = random_smooth_system(&mut rng, -1.0, 2.0, 512, 1.0);
        for _ in 0..5 {
            let l = ci(rng.gen_range(-20.0..20.0), rng.gen_range(-2.0..2.0));
            let det = monodromy(&sys, l, 512).unwrap().det();
            let want = eiz(l * 1.0);
            assert!((det - want).norm() <= 1e-6 * want.norm(), "λ = {l}");
        }
    }
}

#[test]
fn free_e_pm_and_superposition() {
    let free = DiracSystem::<f64>::free(-1.0, 1.0, 32).unwrap();
    let l = ci(2.0, -0.3);
    let ep = e_pm(&free, l, Sign::Plus, 32).unwrap();
    let em = e_pm(&free, l, Sign::Minus, 32).unwrap();
    for i in 0..=32 {
        let x = i as f64 / 32.0;
        assert!((ep.at(i)[0] - eiz(-l * x)).norm() < 1e-14);
        assert!((ep.at(i)[1] - eiz(l * x)).norm() < 1e-14);
        assert!((em.at(i)[1] + eiz(l * x)).norm() < 1e-14);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let sys = random_smooth_system(&mut rng, -1.0, 2.0, 128, 1.0);
    let fm = fundamental_matrix(&sys, l, 128).unwrap();
    let ep = e_pm(&sys, l, Sign::Plus, 128).unwrap();
    let em = e_pm(&sys, l, Sign::Minus, 128).unwrap();
    for i in 0..=128 {
        let col = fm.at(i).column(0);
        for k in 0..2 {
            assert!((ep.at(i)[k] + em.at(i)[k] - col[k] * 2.0).norm() < 1e-13);
        }
    }
}

#[test]
fn free_characteristic_determinant_is_delta0() {
    let can = Canonical::new(ci(0.4, 0.1), c(1.0), c(-0.5), c(2.0));
    let bc = BoundaryConditions::from_canonical(can);
    let free = DiracSystem::<f64>::free(-1.0, 2.0, 64).unwrap();
    for l in [c(0.0), c(7.5), ci(-3.0, 1.5)] {
        let got = char_det_direct(&free, &bc, l, 64).unwrap();
        assert!((got - delta0(&can, -1.0, 2.0, l)).norm() < 1e-8);
    }
}

#[test]
fn q12_zero_determinant_matches_definition() {
    // The determinant of the boundary forms, evaluated on the closed-form
    // fundamental matrix, gives Δ₀ + i b2 b e^{i b2 λ} ∫ Q21 e^{i(b1−b2)λt} dt.
    let (b1, b2) = (-1.0, 1.0);
    let sys = q12_zero_system(b1, b2, 512);
    let (a, b, cc, d) = (ci(0.3, 0.2), c(1.5), ci(-0.7, 0.0), c(0.8));
    let can = Canonical::new(a, b, cc, d);
    let bc = BoundaryConditions::from_canonical(can);
    for l in [c(1.0), c(-6.0), ci(4.0, -1.0)] {
        let phi1 = [[eiz(l * b1), c(0.0)], [phi21_oracle(b1, b2, l, 1.0), eiz(l * b2)]];
        let want = det_from_definition(&canonical_matrix(a, b, cc, d), phi1);
        let integral = simpson(|t| q21_fn(t) * eiz(l * (b1 - b2) * t), 0.0, 1.0, 2000);
        let formula = delta0(&can, b1, b2, l) + C::i() * b2 * b * eiz(l * b2) * integral;
        assert!((want - formula).norm() < 1e-10);
        let got = char_det_direct(&sys, &bc, l, 512).unwrap();
        assert!((got - want).norm() < 1e-4, "λ = {l}: {got} vs {want}");
    }
}

#[test]
fn b_zero_and_q12_zero_leave_determinant_unperturbed() {
    let (b1, b2) = (-1.0, 2.0);
    let sys = q12_zero_system(b1, b2, 256);
    let can = Canonical::new(c(2.0), c(0.0), ci(1.0, 1.0), c(0.5));
    let bc = BoundaryConditions::from_canonical(can);
    for l in [c(0.0), c(3.3), ci(-8.0, 0.9)] {
        let got = char_det_direct(&sys, &bc, l, 256).unwrap();
        assert!((got - delta0(&can, b1, b2, l)).norm() < 1e-12 * (1.0 + got.norm()));
    }
}

#[test]
fn fundamental_matrix_is_entire_in_lambda() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let sys = random_smooth_system(&mut rng, -1.0, 1.0, 256, 1.0);
    let h = 1e-4;
    for l in [ci(1.0, 0.5), ci(-4.0, -1.0)] {
        let f = |z: C| monodromy(&sys, z, 256).unwrap();
        let dx = (f(l + c(h)) - f(l - c(h))).scale_real(0.5 / h);
        let dy = (f(l + ci(0.0, h)) - f(l - ci(0.0, h))).scale_real(0.5 / h);
        // ∂/∂λ̄ = (∂x + i ∂y) / 2.
        let dbar = (dx + dy.scale(C::i())).scale_real(0.5);
        assert!(dbar.max_abs() < 1e-5, "∂Φ/∂λ̄ = {}", dbar.max_abs());
    }
}

#[test]
fn fourth_order_convergence_for_smooth_potential() {
    let fine = 8192;
    let sys = DiracSystem::new(
        -1.0,
        1.0,
        SampledFunction::from_fn(fine, |x: f64| ci(0.5 * (3.0 * x).sin(), 0.2)).unwrap(),
        SampledFunction::from_fn(fine, |x: f64| ci(0.3 * x * x, -0.4 * (2.0 * x).cos())).unwrap(),
    )
    .unwrap();
    let l = ci(0.3, 0.1);
    // Every Runge-Kutta stage of a grid with fine/2 cells lands on a sample node.
    let reference = monodromy(&sys, l, fine / 2).unwrap();
    let err = |n: usize| (monodromy(&sys, l, n).unwrap() - reference).max_abs();
    for n in [32, 64] {
        let ratio = err(n) / err(2 * n);
        assert!((ratio - 16.0).abs() <= 0.3 * 16.0, "N = {n}: ratio {ratio}");
    }
}
