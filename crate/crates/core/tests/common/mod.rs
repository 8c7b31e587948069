//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use diracspec::gridfn::{lp_norm_components, PNorm, SampledFunction};
use diracspec::ode::DiracSystem;
use diracspec::transformop::{KernelSet, SolveOptions};
use num_complex::Complex64 as C;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn ci(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Composite Simpson rule for a complex integrand with `m` (even) panels.
pub fn simpson(f: impl Fn(f64) -> C, a: f64, b: f64, m: usize) -> C {
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for k in 1..m {
        acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

/// `e^{iz}`.
pub fn eiz(z: C) -> C {
    (C::i() * z).exp()
}

/// Characteristic determinant from its definition: the 2×2 matrix of the
/// boundary forms applied to the columns of a fundamental matrix whose value at
/// `x = 1` is `phi1` (and the identity at `x = 0`).
pub fn det_from_definition(a: &[[C; 4]; 2], phi1: [[C; 2]; 2]) -> C {
    let u = |row: &[C; 4], col: usize| {
        let y0 = if col == 0 { [c(1.0), c(0.0)] } else { [c(0.0), c(1.0)] };
        let y1 = [phi1[0][col], phi1[1][col]];
        row[0] * y0[0] + row[1] * y0[1] + row[2] * y1[0] + row[3] * y1[1]
    };
    u(&a[0], 0) * u(&a[1], 1) - u(&a[0], 1) * u(&a[1], 0)
}

/// `Δ₀(λ)` from the definition with `Φ⁰(1, λ) = diag(e^{i b1 λ}, e^{i b2 λ})`.
pub fn delta0_from_definition(a: &[[C; 4]; 2], b1: f64, b2: f64, l: C) -> C {
    det_from_definition(a, [[eiz(l * b1), c(0.0)], [c(0.0), eiz(l * b2)]])
}

/// Canonical boundary matrix `[[1, b, a, 0], [0, d, c, 1]]`.
pub fn canonical_matrix(a: C, b: C, c_: C, d: C) -> [[C; 4]; 2] {
    [[c(1.0), b, a, c(0.0)], [c(0.0), d, c_, c(1.0)]]
}

/// Zeros of `Δ₀` in one period strip `0 ≤ Re λ < period`, found by Newton from
/// a dense lattice of starting points with the analytic derivative of the
/// exponential sum.  Returns the distinct zeros and the minimal derivative
/// modulus among them.
pub fn brute_force_period_zeros(
    a: &[[C; 4]; 2],
    b1: f64,
    b2: f64,
    period: f64,
    height: f64,
) -> Vec<(C, f64)> {
    let f = |l: C| delta0_from_definition(a, b1, b2, l);
    let df = |l: C| {
        let h = 1e-7;
        (f(l + c(h)) - f(l - c(h))) / (2.0 * h)
    };
    let mut found: Vec<(C, f64)> = Vec::new();
    let (nx, ny) = (48, 64);
    for ix in 0..nx {
        for iy in 0..=ny {
            let mut z = ci(period * (ix as f64 + 0.5) / nx as f64, -height + 2.0 * height * iy as f64 / ny as f64);
            let mut ok = false;
            for _ in 0..200 {
                let d = df(z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = f(z) / d;
                let step = if step.norm() > 0.5 { step * (0.5 / step.norm()) } else { step };
                z -= step;
                if step.norm() < 1e-14 * (1.0 + z.norm()) {
                    ok = true;
                    break;
                }
            }
            if !ok || f(z).norm() > 1e-9 || z.im.abs() > height {
                continue;
            }
            let re = z.re.rem_euclid(period);
            let z = ci(if (period - re) < 1e-9 { 0.0 } else { re }, z.im);
            let dup = found.iter().any(|(w, _)| {
                let dre = (w.re - z.re).abs();
                dre.min(period - dre).hypot(w.im - z.im) < 1e-5
            });
            if !dup {
                found.push((z, df(z).norm()));
            }
        }
    }
    found
}

/// Separation verdict of the brute-force oracle: all zeros simple (the count
/// in one period equals `degree`, no vanishing derivative) and pairwise gaps,
/// including across neighbouring periods, of at least `gap`.
pub fn brute_force_separated(zeros: &[(C, f64)], degree: usize, period: f64, gap: f64) -> bool {
    if zeros.len() != degree || zeros.iter().any(|(_, d)| *d < 1e-6) {
        return false;
    }
    for (i, (z, _)) in zeros.iter().enumerate() {
        for (w, _) in zeros.iter().skip(i + 1) {
            for shift in [-period, 0.0, period] {
                if (z - w - c(shift)).norm() < gap {
                    return false;
                }
            }
        }
        if period < gap {
            return false;
        }
    }
    true
}

/// Smooth random potential: low trigonometric modes with random complex
/// coefficients, rescaled so that `‖Q‖₁ = l1`.
pub fn random_smooth_system(rng: &mut ChaCha8Rng, b1: f64, b2: f64, n: usize, l1: f64) -> DiracSystem<f64> {
    let entry = |rng: &mut ChaCha8Rng| {
        let coef: Vec<(C, f64)> = (0..4)
            .map(|k| {
                (
                    ci(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + k as f64),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        move |x: f64| {
            coef.iter()
                .enumerate()
                .map(|(k, (a, ph))| *a * (std::f64::consts::TAU * k as f64 * x + ph).cos())
                .sum::<C>()
        }
    };
    let f12 = entry(rng);
    let f21 = entry(rng);
    let q12 = SampledFunction::from_fn(n, f12).unwrap();
    let q21 = SampledFunction::from_fn(n, f21).unwrap();
    let norm = lp_norm_components(&[&q12, &q21], PNorm::one());
    let s = c(l1 / norm);
    DiracSystem::new(b1, b2, q12.scale(s), q21.scale(s)).unwrap()
}

/// `cos 2πx`.
pub fn cos_potential(x: f64) -> C {
    c((std::f64::consts::TAU * x).cos())
}

/// Lower-triangular system with `Q21 = cos 2πx`.
pub fn q12_zero_system(b1: f64, b2: f64, n: usize) -> DiracSystem<f64> {
    DiracSystem::new(b1, b2, SampledFunction::zeros(n).unwrap(), SampledFunction::from_fn(n, cos_potential).unwrap()).unwrap()
}

/// Maximal node errors of `R`, `P±`, `K±` of [`q12_zero_system`] against
/// their closed forms.
pub fn closed_form_errors(b1: f64, b2: f64, n: usize) -> [f64; 3] {
    let sys = q12_zero_system(b1, b2, n);
    let (a1, a2) = (sys.alpha(1), sys.alpha(2));
    let qt = |x: f64| -C::i() * b2 * cos_potential(x);
    let ks = KernelSet::build(&sys, n, SolveOptions::default()).unwrap();
    let mut err = [0.0f64; 3];
    for i in 0..=n {
        let x = i as f64 / n as f64;
        for (p, s) in [(&ks.p_plus, 1.0), (&ks.p_minus, -1.0)] {
            err[1] = err[1].max(p.p1.sample(i).norm());
            err[1] = err[1].max((p.p2.sample(i) - qt(a1 * x) * (s * a1)).norm());
        }
        for j in 0..=i {
            let t = j as f64 / n as f64;
            let r = ks.r.get(i, j);
            let want21 = qt(a1 * x + a2 * t) * a2;
            err[0] = err[0].max((r.get(1, 0) - want21).norm());
            err[0] = err[0].max(r.get(0, 0).norm().max(r.get(0, 1).norm()).max(r.get(1, 1).norm()));
            for (k, s) in [(&ks.k_plus, 1.0), (&ks.k_minus, -1.0)] {
                let m = k.get(i, j);
                err[2] = err[2].max((m.get(1, 0) - want21).norm());
                err[2] = err[2].max((m.get(1, 1) - qt(a1 * (x - t)) * (s * a1)).norm());
                err[2] = err[2].max(m.get(0, 0).norm().max(m.get(0, 1).norm()));
            }
        }
    }
    err
}

