mod common;

use approx::assert_abs_diff_eq;
use common::{c, canonical_matrix, ci, delta0_from_definition};
use diracspec::boundary::{
    classify, delta0, delta0_minors, delta0_polynomial, detect_ratio, BoundaryConditions, Canonical, RatioSource,
    RegularityKind,
};
use diracspec::DiracError;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn rc(rng: &mut ChaCha8Rng) -> C {
    ci(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

fn random_matrix(rng: &mut ChaCha8Rng) -> [[C; 4]; 2] {
    [[rc(rng), rc(rng), rc(rng), rc(rng)], [rc(rng), rc(rng), rc(rng), rc(rng)]]
}

fn antiperiodic() -> BoundaryConditions<f64> {
    BoundaryConditions::from_canonical(Canonical::new(c(1.0), c(0.0), c(0.0), c(1.0)))
}

#[test]
fn minors_of_initial_conditions() {
    let bc = BoundaryConditions::new([[c(1.0), c(0.0), c(0.0), c(0.0)], [c(0.0), c(1.0), c(0.0), c(0.0)]]).unwrap();
    let m = bc.minors();
    assert_eq!(m.j(1, 2), c(1.0));
    for (j, k) in [(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] {
        assert_eq!(m.j(j, k), c(0.0));
    }
}

#[test]
fn minors_of_embedded_separated_conditions() {
    let bc = BoundaryConditions::new(canonical_matrix(c(0.0), c(1.0), c(1.0), c(0.0))).unwrap();
    let m = bc.minors();
    assert_eq!(m.j(1, 4), c(1.0));
    // J32 = a13 a22 − a12 a23 = 0·0 − 1·1.
    assert_eq!(m.j(3, 2), c(-1.0));
}

#[test]
fn dependent_rows_are_rejected() {
    let row = [c(1.0), c(2.0), c(3.0), c(4.0)];
    let twice = row.map(|v| v * 2.0);
    assert!(matches!(BoundaryConditions::new([row, twice]), Err(DiracError::DependentRows)));
}

#[test]
fn canonical_input_is_unchanged() {
    let can = Canonical::new(ci(0.3, 1.0), c(-2.0), ci(0.0, 0.5), c(4.0));
    let bc = BoundaryConditions::new(can.to_matrix()).unwrap();
    let out = bc.canonicalize().unwrap();
    for (x, y) in [(out.a, can.a), (out.b, can.b), (out.c, can.c), (out.d, can.d)] {
        assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-15);
    }
}

#[test]
fn row_scaling_does_not_change_canonical_form() {
    let can = Canonical::new(ci(0.3, 1.0), c(-2.0), ci(0.0, 0.5), c(4.0));
    let [r1, r2] = can.to_matrix();
    let bc = BoundaryConditions::new([r1.map(|v| v * 2.0), r2.map(|v| -v)]).unwrap();
    let out = bc.canonicalize().unwrap();
    for (x, y) in [(out.a, can.a), (out.b, can.b), (out.c, can.c), (out.d, can.d)] {
        assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-15);
    }
}

#[test]
fn canonicalization_requires_nonzero_j14() {
    let bc = BoundaryConditions::new([[c(1.0), c(0.0), c(0.0), c(0.0)], [c(0.0), c(1.0), c(0.0), c(0.0)]]).unwrap();
    assert!(matches!(bc.canonicalize(), Err(DiracError::NotCanonicalizable)));
    assert_eq!(classify(&bc, -1.0, 1.0, None).kind, RegularityKind::Nonregular);
}

#[test]
fn canonical_form_is_row_equivalent_to_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let a = random_matrix(&mut rng);
        let bc = BoundaryConditions::new(a).unwrap();
        let can = bc.canonicalize().unwrap();
        let m = can.to_matrix();
        // Columns 1 and 4 of `a` form A₁₄; A must equal A₁₄ · M.
        for (r, row) in a.iter().enumerate() {
            for col in 0..4 {
                let rebuilt = row[0] * m[0][col] + row[3] * m[1][col];
                assert!((rebuilt - a[r][col]).norm() < 1e-12 * (1.0 + a[r][col].norm()));
            }
        }
        let j = bc.minors();
        assert!((can.det() - j.j(3, 2) / j.j(1, 4)).norm() < 1e-11 * (1.0 + can.det().norm()));
    }
}

#[test]
fn dirac_antiperiodic_is_regular_but_not_strictly() {
    let v = classify(&antiperiodic(), -1.0, 1.0, None);
    assert_eq!(v.kind, RegularityKind::Regular);
    assert_eq!(v.reason, "dirac_discriminant_zero");
    assert!(v.is_regular() && !v.is_strictly_regular());
}

#[test]
fn one_two_antiperiodic_is_strictly_regular() {
    let v = classify(&antiperiodic(), -1.0, 2.0, None);
    assert_eq!(v.kind, RegularityKind::StrictlyRegular);
    assert_eq!(v.ratio, Some((1, 2)));
}

#[test]
fn separated_conditions_are_strictly_regular() {
    let bc = BoundaryConditions::from_canonical(Canonical::new(c(0.0), c(1.0), c(1.0), c(0.0)));
    for (b1, b2) in [(-1.0, 1.0), (-1.0, 2.0), (-1.0, 2f64.sqrt())] {
        assert!(classify(&bc, b1, b2, None).is_strictly_regular());
    }
}

#[test]
fn zero_determinant_is_nonregular() {
    let bc = BoundaryConditions::from_canonical(Canonical::new(c(1.0), c(1.0), c(1.0), c(1.0)));
    let v = classify(&bc, -1.0, 2.0, None);
    assert_eq!(v.kind, RegularityKind::Nonregular);
    assert_eq!(v.reason, "j32_zero");
}

#[test]
fn ratio_detection_and_hint() {
    assert_eq!(detect_ratio(-1.0, 2.0), Some((1, 2)));
    assert_eq!(detect_ratio(-3.0, 2.0), Some((3, 2)));
    assert_eq!(detect_ratio(-1.0, 2f64.sqrt()), None);
    let v = classify(&antiperiodic(), -1.0, 2.0, Some((2, 4)));
    assert_eq!(v.ratio, Some((1, 2)));
    assert_eq!(v.ratio_source, RatioSource::Hint);
    assert_eq!(classify(&antiperiodic(), -1.0, 2f64.sqrt(), None).ratio_source, RatioSource::Irrational);
}

#[test]
fn irrational_generic_case_is_reported_unknown() {
    let bc = BoundaryConditions::from_canonical(Canonical::new(ci(0.5, 0.2), c(1.0), c(0.7), c(2.0)));
    let v = classify(&bc, -1.0, 2f64.sqrt(), None);
    assert_eq!(v.kind, RegularityKind::RegularUnknownStrictness);
}

#[test]
fn constructed_double_root_is_detected() {
    // z³ + a z² + d z + (ad − bc) = (z − r)²(z − s).
    let (r, s) = (ci(0.8, 0.3), ci(-1.2, 0.5));
    let a = -(r * 2.0 + s);
    let d = r * r + r * s * 2.0;
    let det = -(r * r * s);
    let bc_prod = a * d - det;
    let bc = BoundaryConditions::from_canonical(Canonical::new(a, c(1.0), bc_prod, d));
    let v = classify(&bc, -1.0, 2.0, None);
    assert_eq!(v.kind, RegularityKind::Regular);
    assert_eq!(v.reason, "polynomial_multiple_roots");
    let p = delta0_polynomial(&bc.canonicalize().unwrap(), 1, 2);
    assert_eq!(p.len(), 4);
}

#[test]
fn delta0_examples() {
    let can = Canonical::new(c(1.0), c(0.0), c(0.0), c(1.0));
    assert_abs_diff_eq!((delta0(&can, -1.0, 1.0, c(0.0)) - c(4.0)).norm(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(delta0(&can, -1.0, 1.0, c(PI)).norm(), 0.0, epsilon = 1e-14);
    let sep = Canonical::new(c(0.0), c(1.0), c(1.0), c(0.0));
    assert_abs_diff_eq!(delta0(&sep, -1.0, 1.0, c(0.0)).norm(), 0.0, epsilon = 1e-15);
}

#[test]
fn classification_is_invariant_under_row_operations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (b1, b2) in [(-1.0, 1.0), (-1.0, 2.0), (-2.0, 3.0)] {
        for _ in 0..20 {
            let a = random_matrix(&mut rng);
            let bc = BoundaryConditions::new(a).unwrap();
            let direct = classify(&bc, b1, b2, None);
            let canon = BoundaryConditions::from_canonical(bc.canonicalize().unwrap());
            assert_eq!(direct, classify(&canon, b1, b2, None));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minors_are_antisymmetric(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bc = BoundaryConditions::new(random_matrix(&mut rng)).unwrap();
        let m = bc.minors();
        for j in 1..=4 {
            for k in 1..=4 {
                prop_assert_eq!(m.j(j, k), -m.j(k, j));
            }
        }
    }

    #[test]
    fn delta0_agrees_with_definition(seed in 0u64..10_000, re in -20.0f64..20.0, im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng);
        let bc = BoundaryConditions::new(a).unwrap();
        let l = ci(re, im);
        let want = delta0_from_definition(&a, -1.0, 2.0, l);
        let got = delta0_minors(&bc.minors(), -1.0, 2.0, l);
        prop_assert!((got - want).norm() <= 1e-12 * (1.0 + want.norm()) * 100.0);
        if let Ok(can) = bc.canonicalize() {
            let j14 = bc.minors().j(1, 4);
            let scaled = delta0(&can, -1.0, 2.0, l) * j14;
            prop_assert!((scaled - want).norm() <= 1e-10 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn delta0_is_periodic_for_rational_ratio(seed in 0u64..10_000, re in -10.0f64..10.0, im in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let can = Canonical::new(rc(&mut rng), rc(&mut rng), rc(&mut rng), rc(&mut rng));
        // b1 = −2, b2 = 3: n1/n2 = 2/3 and β = b2/n2 = 1.
        let l = ci(re, im);
        let p = delta0(&can, -2.0, 3.0, l + c(2.0 * PI));
        let q = delta0(&can, -2.0, 3.0, l);
        prop_assert!((p - q).norm() <= 1e-11 * (1.0 + q.norm()));
    }
}
