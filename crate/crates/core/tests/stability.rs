mod common;

use common::{c, ci, random_smooth_system};
use diracspec::boundary::{BoundaryConditions, Canonical};
use diracspec::gridfn::{lp_norm_components, PNorm, SampledFunction};
use diracspec::ode::DiracSystem;
use diracspec::potential::{spline, step, trig, PotentialTable};
use diracspec::stability::{
    eigen_deviation, eigenfunction, eigenfunction_deviation, run_ball_experiment, two_sided_check, Aggregates,
    ExperimentOptions, PotentialBallSampler, PotentialFamily,
};
use num_complex::Complex64 as C;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn opts() -> ExperimentOptions<f64> {
    let mut o = ExperimentOptions::default();
    o.spectrum.grid = 256;
    o.kernel_grid = 64;
    o
}

fn bc(a: f64, b: f64, c_: f64, d: f64) -> BoundaryConditions<f64> {
    BoundaryConditions::from_canonical(Canonical::real(a, b, c_, d))
}

fn scaled(sys: &DiracSystem<f64>, s: f64) -> DiracSystem<f64> {
    DiracSystem::new(sys.b1(), sys.b2(), sys.q12().scale(c(s)), sys.q21().scale(c(s))).unwrap()
}

fn lower_triangular(rng: &mut ChaCha8Rng, n: usize) -> DiracSystem<f64> {
    let q21 = random_smooth_system(rng, -1.0, 1.0, n, 1.0).q21().clone();
    DiracSystem::new(-1.0, 1.0, SampledFunction::zeros(n).unwrap(), q21).unwrap()
}

#[test]
fn identical_potentials_have_zero_deviation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sys = random_smooth_system(&mut rng, -1.0, 1.0, 256, 0.5);
    let bc = bc(0.0, 1.0, 1.0, 0.0);
    let rep = eigenfunction_deviation(&sys, &sys, &bc, 6, PNorm::two(), &opts()).unwrap();
    assert_eq!(rep.q_distance, 0.0);
    for r in &rep.rows {
        assert_eq!(r.eigenvalue, 0.0);
        assert_eq!(r.eigenfunction, Some(0.0));
    }
    let ts = two_sided_check(&sys, &sys, &bc, 6, &opts()).unwrap();
    assert!(ts.rows.iter().all(|r| r.ratio.is_none()));
    assert!(ts.tail_min.is_none() && ts.tail_max.is_none());
}

#[test]
fn lower_triangular_pairs_share_eigenvalues_and_second_branch_eigenfunctions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let sys = lower_triangular(&mut rng, 256);
    let other = lower_triangular(&mut rng, 256);
    let bc = bc(2.0, 0.0, 0.5, 0.5);
    let rep = eigenfunction_deviation(&sys, &other, &bc, 6, PNorm::two(), &opts()).unwrap();
    let mut first_branch = 0.0f64;
    let mut second = 0;
    for r in &rep.rows {
        assert!(r.eigenvalue < 1e-6, "n = {}: {}", r.n, r.eigenvalue);
        // Second branch: d + e^{i b2 λ} = 0.
        let on_second = (c(0.5) + (C::i() * r.lambda).exp()).norm() < 1e-6;
        let dev = r.eigenfunction.unwrap();
        if on_second {
            assert!(dev < 1e-8, "n = {}: {dev}", r.n);
            second += 1;
        } else {
            first_branch = first_branch.max(dev);
        }
    }
    assert!(second > 0 && first_branch > 1e-4);
}

#[test]
fn eigenfunctions_are_normalized_and_satisfy_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sys = random_smooth_system(&mut rng, -1.0, 2.0, 256, 1.0);
    let can = Canonical::new(ci(0.5, 0.2), c(0.7), c(-0.4), c(0.3));
    let bcs = BoundaryConditions::from_canonical(can);
    let w = diracspec::spectrum::zeros_delta_q(&sys, &bcs, 4, &opts().spectrum).unwrap();
    for e in &w.entries {
        for f_formula in [true, false] {
            let Some(f) = eigenfunction(&sys, &can, f_formula, e.lambda, 256, PNorm::Infinity).unwrap() else {
                continue;
            };
            assert!((f.lp_norm(PNorm::Infinity) - 1.0).abs() < 1e-12);
            let (y0, y1) = (f.at(0), f.at(256));
            let u1 = y0[0] + can.b * y0[1] + can.a * y1[0];
            let u2 = can.d * y0[1] + can.c * y1[0] + y1[1];
            assert!(u1.norm() < 1e-6 && u2.norm() < 1e-6, "{} {}", u1.norm(), u2.norm());
        }
    }
}

#[test]
fn eigenvalue_deviation_scales_linearly() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sys = random_smooth_system(&mut rng, -1.0, 1.0, 256, 1.0);
    let free = DiracSystem::free(-1.0, 1.0, 256).unwrap();
    let bc = bc(0.0, 1.0, 1.0, 0.0);
    let p = PNorm::two();
    let ratios: Vec<f64> = [0.25, 0.5, 1.0]
        .iter()
        .map(|s| {
            let rep = eigen_deviation(&scaled(&sys, *s), &free, &bc, 10, p, &opts()).unwrap();
            rep.eigenvalue.all.lp_conj_norm / rep.q_distance
        })
        .collect();
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(hi / lo <= 3.0, "{ratios:?}");
}

#[test]
fn two_sided_ratio_is_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sys = random_smooth_system(&mut rng, -1.0, 1.0, 256, 0.3);
    let free = DiracSystem::free(-1.0, 1.0, 256).unwrap();
    let bc = bc(0.0, 1.0, 1.0, 0.0);
    let fwd = two_sided_check(&sys, &free, &bc, 10, &opts()).unwrap();
    let (lo, hi) = (fwd.tail_min.unwrap(), fwd.tail_max.unwrap());
    assert!(lo > 0.0 && hi / lo <= 100.0, "{lo} {hi}");
    let back = two_sided_check(&free, &sys, &bc, 10, &opts()).unwrap();
    let (blo, bhi) = (back.tail_min.unwrap(), back.tail_max.unwrap());
    assert!(bhi / lo <= 100.0 && hi / blo <= 100.0);
}

#[test]
fn aggregates_are_recomputable_from_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sys = random_smooth_system(&mut rng, -1.0, 1.0, 256, 0.5);
    let other = random_smooth_system(&mut rng, -1.0, 1.0, 256, 0.5);
    let p = PNorm::new(1.5).unwrap();
    let rep = eigenfunction_deviation(&sys, &other, &bc(0.0, 1.0, 1.0, 0.0), 6, p, &opts()).unwrap();
    let sum3: f64 = rep.rows.iter().map(|r| r.eigenvalue.powi(3)).sum();
    assert!((rep.eigenvalue.all.lp_conj_sum - sum3).abs() <= 1e-14 * (1.0 + sum3));
    let weighted: f64 = rep.rows.iter().map(|r| (1.0 + r.n.abs() as f64).powf(-0.5) * r.eigenvalue.powf(1.5)).sum();
    assert!((rep.eigenvalue.all.weighted_sum - weighted).abs() <= 1e-14 * (1.0 + weighted));
    let sup = rep.rows.iter().map(|r| r.eigenvalue).fold(0.0, f64::max);
    assert_eq!(rep.eigenvalue.all.sup, sup);
    let want_q = lp_norm_components(&[&sys.q12().sub(other.q12()).unwrap(), &sys.q21().sub(other.q21()).unwrap()], p);
    assert!((rep.q_distance - want_q).abs() < 1e-14);
    let csv = rep.to_csv();
    assert_eq!(csv.lines().count(), rep.rows.len() + 1);

    let agg = Aggregates::from_values(vec![(0, 0.5), (3, 0.25)], PNorm::one());
    assert_eq!((agg.lp_conj_sum, agg.lp_conj_norm, agg.sup), (0.5, 0.5, 0.5));
}

#[test]
fn triangle_consistency_and_weighted_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let q = random_smooth_system(&mut rng, -1.0, 1.0, 256, 0.4);
    let qt = random_smooth_system(&mut rng, -1.0, 1.0, 256, 0.4);
    let free = DiracSystem::free(-1.0, 1.0, 256).unwrap();
    let bc = bc(0.0, 1.0, 1.0, 0.0);
    let p = PNorm::two();
    let d = |a: &DiracSystem<f64>, b: &DiracSystem<f64>| eigen_deviation(a, b, &bc, 8, p, &opts()).unwrap();
    let (direct, left, right) = (d(&q, &qt), d(&q, &free), d(&free, &qt));
    assert!(direct.eigenvalue.all.sup <= 1.1 * (left.eigenvalue.all.sup + right.eigenvalue.all.sup));
    for rep in [&direct, &left, &right] {
        let small = rep.rows.iter().all(|r| r.eigenvalue <= (1.0 + r.n.abs() as f64).powf(-0.5));
        if small {
            assert!(rep.eigenvalue.all.weighted_sum <= rep.eigenvalue.all.lp_conj_sum * (1.0 + 1e-12));
        }
    }
}

#[test]
fn mismatched_weights_are_rejected() {
    let a = DiracSystem::free(-1.0, 1.0, 32).unwrap();
    let b = DiracSystem::free(-1.0, 2.0, 32).unwrap();
    assert!(eigen_deviation(&a, &b, &bc(0.0, 1.0, 1.0, 0.0), 2, PNorm::two(), &opts()).is_err());
}

#[test]
fn sampler_respects_the_ball_and_is_deterministic() {
    for family in [
        PotentialFamily::Trig { modes: 3 },
        PotentialFamily::Step { pieces: 4 },
        PotentialFamily::Spline { knots: 5 },
    ] {
        let p = PNorm::new(1.5).unwrap();
        let s = PotentialBallSampler::new(p, 0.8, 42, family, 128).unwrap();
        for i in 0..5 {
            let sys = s.sample(i, -1.0, 1.0).unwrap();
            let norm = lp_norm_components(&[sys.q12(), sys.q21()], p);
            assert!((0.4 * (1.0 - 1e-12)..=0.8 * (1.0 + 1e-12)).contains(&norm), "{norm}");
            assert_eq!(sys, s.sample(i, -1.0, 1.0).unwrap());
        }
        assert_ne!(s.sample(0, -1.0, 1.0).unwrap(), s.sample(1, -1.0, 1.0).unwrap());
    }
    assert!(PotentialBallSampler::new(PNorm::two(), -1.0, 0, PotentialFamily::Trig { modes: 2 }, 32).is_err());
    assert!(PotentialBallSampler::new(PNorm::two(), 1.0, 0, PotentialFamily::Trig { modes: 0 }, 32).is_err());
}

#[test]
fn ball_experiment_edge_cases_and_determinism() {
    let bc = bc(0.0, 1.0, 1.0, 0.0);
    let p = PNorm::two();
    let s = PotentialBallSampler::new(p, 0.5, 9, PotentialFamily::Trig { modes: 2 }, 128).unwrap();
    let empty = run_ball_experiment(&s, -1.0, 1.0, &bc, 0, 4, p, &opts()).unwrap();
    assert!(empty.rows.is_empty());
    assert_eq!(empty.to_csv().lines().count(), 1);

    let zero = PotentialBallSampler::new(p, 0.0, 9, PotentialFamily::Trig { modes: 2 }, 128).unwrap();
    let t = run_ball_experiment(&zero, -1.0, 1.0, &bc, 2, 4, p, &opts()).unwrap();
    for r in &t.rows {
        assert_eq!((r.q_distance, r.kernel_dev, r.eigen_dev, r.eigenfunction_dev), (0.0, 0.0, 0.0, 0.0));
        assert_eq!((r.kernel_ratio, r.eigen_ratio, r.eigenfunction_ratio), (0.0, 0.0, 0.0));
    }

    let a = run_ball_experiment(&s, -1.0, 1.0, &bc, 2, 4, p, &opts()).unwrap();
    let b = run_ball_experiment(&s, -1.0, 1.0, &bc, 2, 4, p, &opts()).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    for r in &a.rows {
        assert!(r.kernel_ratio.is_finite() && r.eigen_ratio.is_finite() && r.eigenfunction_ratio.is_finite());
        assert!(r.q_distance > 0.0);
    }
}

#[test]
fn potential_builders() {
    let f = trig(64, &[c(1.0)]).unwrap();
    for i in 0..=64 {
        let x = i as f64 / 64.0;
        assert!((f.sample(i) - (C::i() * TAU * x).exp()).norm() < 1e-14);
    }
    let s = step(8, &[0.5], &[c(1.0), c(-2.0)]).unwrap();
    assert_eq!(s.sample(3), c(1.0));
    assert_eq!(s.sample(4), c(-2.0));
    assert!(step(8, &[0.5, 0.25], &[c(1.0), c(2.0), c(3.0)]).is_err());
    assert!(step(8, &[0.5], &[c(1.0)]).is_err());
    let knots = [c(0.0), c(1.0), ci(0.5, 2.0), c(-1.0), c(3.0)];
    let sp = spline(64, &knots).unwrap();
    for (k, v) in knots.iter().enumerate() {
        assert!((sp.sample(16 * k) - v).norm() < 1e-14);
    }
    assert!(spline(8, &[c(1.0)]).is_err());
}

#[test]
fn potential_table_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let sys = random_smooth_system(&mut rng, -1.0, 2.0, 32, 1.3);
    let table = PotentialTable::from_system(&sys);
    let csv = table.to_csv();
    assert!(csv.starts_with("x,re_q12,im_q12,re_q21,im_q21\n"));
    let back = PotentialTable::parse_csv(&csv).unwrap();
    assert_eq!(back, table);
    assert_eq!(back.to_system(-1.0, 2.0, 32).unwrap(), sys);
    let coarse = back.to_system(-1.0, 2.0, 64).unwrap();
    let mid = 0.5 * (sys.q12().sample(3) + sys.q12().sample(4));
    assert!((coarse.q12().sample(7) - mid).norm() < 1e-15);

    assert!(PotentialTable::<f64>::parse_csv("x,a,b,c,d\n0,1,2,3\n").is_err());
    assert!(PotentialTable::<f64>::parse_csv("0,0,0,0,0\n0,0,0,0,0\n").is_err());
    let ok = PotentialTable::<f64>::parse_csv("# comment\n0,1,0,0,0\n\n1,1,0,0,0\n").unwrap();
    assert_eq!(ok.x, vec![0.0, 1.0]);
}
