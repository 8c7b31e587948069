//! Zeros of `Δ₀` and `Δ_Q`, argument-principle counting and the canonical
//! pairing `λ_n ↔ λ_n⁰`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::boundary::{classify, delta0, delta0_polynomial, BoundaryConditions, Canonical, Minors};
use crate::error::{DiracError, Result};
use crate::ode::{det_from_monodromy, monodromy, DiracSystem};
use crate::poly;
use crate::scalar::{cis, Real};

/// Zeros closer than this (relative to `1 + |λ|`) are one multiple zero.
const MERGE_TOL: f64 = 1e-7;
/// Real parts closer than this are ordered by imaginary part.
const RE_TIE_TOL: f64 = 1e-9;
const POLY_CLUSTER_RADIUS: f64 = 1e-6;
const MIN_CONTOUR_MODULUS: f64 = 1e-6;
const MAX_WINDING_DEFECT: f64 = 0.2;

/// One entry of the ordered zero set of `Δ₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnperturbedZero<T> {
    pub n: i64,
    pub lambda: Complex<T>,
    pub multiplicity: usize,
}

fn sort_and_merge<T: Real>(mut zeros: Vec<(Complex<T>, usize)>) -> Vec<(Complex<T>, usize)> {
    zeros.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).expect("finite zeros"));
    let mut out: Vec<(Complex<T>, usize)> = Vec::with_capacity(zeros.len());
    for (z, m) in zeros {
        let tol = T::lit(MERGE_TOL) * (T::one() + z.norm());
        match out.iter_mut().rev().take(8).find(|(w, _)| (*w - z).norm() <= tol) {
            Some(slot) => slot.1 += m,
            None => out.push((z, m)),
        }
    }
    let tie = T::lit(RE_TIE_TOL);
    out.sort_by(|a, b| {
        let d = a.0.re - b.0.re;
        if d.abs() <= tie * (T::one() + a.0.re.abs()) {
            a.0.im.partial_cmp(&b.0.im).expect("finite zeros")
        } else {
            a.0.re.partial_cmp(&b.0.re).expect("finite zeros")
        }
    });
    out
}

/// Assigns canonical indices: `n = 0` is the first zero with `Re λ ≥ 0`.
/// Returns `None` unless the list covers `|n| ≤ n_max` strictly inside `(lo, hi)`.
fn index_window<T: Real>(
    sorted: &[(Complex<T>, usize)],
    n_max: usize,
    lo: T,
    hi: T,
) -> Option<Vec<UnperturbedZero<T>>> {
    let tol = T::lit(RE_TIE_TOL);
    let zero_pos = sorted.iter().position(|(z, _)| z.re >= -tol)?;
    let first = zero_pos.checked_sub(n_max)?;
    let last = zero_pos + n_max;
    if last + 1 >= sorted.len() || first == 0 {
        return None;
    }
    if sorted[first - 1].0.re <= lo || sorted[last + 1].0.re >= hi {
        return None;
    }
    Some(
        (first..=last)
            .map(|k| UnperturbedZero {
                n: k as i64 - zero_pos as i64,
                lambda: sorted[k].0,
                multiplicity: sorted[k].1,
            })
            .collect(),
    )
}

/// Canonically ordered zeros `λ_n⁰` of `Δ₀` for `|n| ≤ n_max`.
pub fn zeros_delta0<T: Real>(
    bc: &BoundaryConditions<T>,
    b1: T,
    b2: T,
    n_max: usize,
) -> Result<Vec<UnperturbedZero<T>>> {
    let verdict = classify(bc, b1, b2, None);
    if !verdict.is_regular() {
        return Err(DiracError::NonRegular);
    }
    let c = bc.canonicalize()?;
    let two_pi = T::PI() + T::PI();
    let mut periods = n_max + 3;
    for _ in 0..8 {
        let (zeros, reach) = if (c.b * c.c).norm() == T::zero() {
            let mut zs = Vec::new();
            let m_range = periods as i64;
            for m in -m_range..=m_range {
                let mt = T::from_i64(m).expect("small index");
                zs.push((
                    Complex::new(((-c.d).arg() + two_pi * mt) / b2, -c.d.norm().ln() / b2),
                    1,
                ));
                zs.push((
                    Complex::new(((-c.a).inv().arg() + two_pi * mt) / b1, c.a.norm().ln() / b1),
                    1,
                ));
            }
            let reach = two_pi * T::from_index(periods - 1) / b2.max(-b1);
            (zs, reach)
        } else if let Some((n1, n2)) = verdict.ratio {
            let beta = b2 / T::from_u64(n2).expect("small integer");
            let roots = poly::roots(&delta0_polynomial(&c, n1, n2));
            let clusters = poly::cluster_roots(&roots, T::lit(POLY_CLUSTER_RADIUS));
            let mut zs = Vec::new();
            let m_range = periods as i64;
            for (z, mult) in clusters {
                for m in -m_range..=m_range {
                    let mt = T::from_i64(m).expect("small index");
                    zs.push((Complex::new((z.arg() + two_pi * mt) / beta, -z.norm().ln() / beta), mult));
                }
            }
            (zs, two_pi * T::from_index(periods - 1) / beta)
        } else {
            let reach = two_pi * T::from_index(periods) / (b2 - b1) + T::lit(2.0);
            let h = strip_height_delta0(&c, b1, b2);
            let f = |l: Complex<T>| delta0(&c, b1, b2, l);
            let mut zs = Vec::new();
            let cells = (reach + reach).ceil().to_usize().expect("finite reach");
            for k in 0..cells {
                let x0 = -reach + T::from_index(k) + T::lit(1e-3);
                let rect = Rect {
                    re_lo: x0,
                    re_hi: x0 + T::one(),
                    im_lo: -h,
                    im_hi: h,
                };
                zs.extend(zeros_in_rect(&f, rect, 0)?);
            }
            (zs, reach - T::one())
        };
        let sorted = sort_and_merge(zeros);
        if let Some(window) = index_window(&sorted, n_max, -reach, reach) {
            return Ok(window);
        }
        periods *= 2;
    }
    Err(DiracError::ZeroSearch {
        re: 0.0,
        im: 0.0,
        detail: format!("could not cover the index window |n| <= {n_max}"),
    })
}

/// Half-width `h` of a strip containing every zero of `Δ₀`.
pub fn strip_height_delta0<T: Real>(c: &Canonical<T>, b1: T, b2: T) -> T {
    let det = c.det().norm();
    let (an, dn) = (c.a.norm(), c.d.norm());
    let step = T::lit(0.05);
    let cap = T::lit(200.0);
    let mut up = T::zero();
    while up < cap && det * (-b1 * up).exp() <= dn + an * ((-b1 - b2) * up).exp() + (-b2 * up).exp() {
        up += step;
    }
    let mut down = T::zero();
    while down < cap && (b2 * down).exp() <= dn + an * ((b1 + b2) * down).exp() + det * (b1 * down).exp() {
        down += step;
    }
    up.max(down) + T::lit(0.25)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect<T> {
    pub re_lo: T,
    pub re_hi: T,
    pub im_lo: T,
    pub im_hi: T,
}

impl<T: Real> Rect<T> {
    fn corners(&self) -> [Complex<T>; 4] {
        [
            Complex::new(self.re_lo, self.im_lo),
            Complex::new(self.re_hi, self.im_lo),
            Complex::new(self.re_hi, self.im_hi),
            Complex::new(self.re_lo, self.im_hi),
        ]
    }

    fn diameter(&self) -> T {
        (self.re_hi - self.re_lo).hypot(self.im_hi - self.im_lo)
    }

    fn center(&self) -> Complex<T> {
        Complex::new(
            (self.re_lo + self.re_hi) * T::lit(0.5),
            (self.im_lo + self.im_hi) * T::lit(0.5),
        )
    }

    fn contains(&self, z: Complex<T>) -> bool {
        z.re >= self.re_lo && z.re <= self.re_hi && z.im >= self.im_lo && z.im <= self.im_hi
    }

    fn split(&self) -> [Self; 2] {
        let golden = T::lit(0.4876);
        if self.re_hi - self.re_lo >= self.im_hi - self.im_lo {
            let mid = self.re_lo + (self.re_hi - self.re_lo) * golden;
            [
                Self { re_hi: mid, ..*self },
                Self { re_lo: mid, ..*self },
            ]
        } else {
            let mid = self.im_lo + (self.im_hi - self.im_lo) * golden;
            [
                Self { im_hi: mid, ..*self },
                Self { im_lo: mid, ..*self },
            ]
        }
    }
}

/// Total change of `arg f` along the segment `a → b`, refined until each
/// increment is below `π/4`.
fn arg_change<T: Real, F: Fn(Complex<T>) -> Complex<T> + ?Sized>(
    f: &F,
    a: Complex<T>,
    b: Complex<T>,
    fa: Complex<T>,
    fb: Complex<T>,
    depth: usize,
    min_mod: &mut T,
) -> T {
    let d = (fb / fa).arg();
    if d.abs() < T::FRAC_PI_4() || depth == 0 {
        return d;
    }
    let mid = (a + b) * T::lit(0.5);
    let fm = f(mid);
    *min_mod = min_mod.min(fm.norm());
    arg_change(f, a, mid, fa, fm, depth - 1, min_mod) + arg_change(f, mid, b, fm, fb, depth - 1, min_mod)
}

/// Winding number of `f` along a closed polygon, with the minimum modulus seen.
fn winding_polygon<T: Real, F: Fn(Complex<T>) -> Complex<T> + ?Sized>(
    f: &F,
    points: &[Complex<T>],
) -> (T, T) {
    let values: Vec<Complex<T>> = points.iter().map(|z| f(*z)).collect();
    let mut min_mod = values.iter().map(|v| v.norm()).fold(T::infinity(), T::min);
    let mut total = T::zero();
    for k in 0..points.len() {
        let k1 = (k + 1) % points.len();
        total += arg_change(f, points[k], points[k1], values[k], values[k1], 24, &mut min_mod);
    }
    (total / (T::PI() + T::PI()), min_mod)
}

fn rect_points<T: Real>(rect: &Rect<T>, per_side: usize) -> Vec<Complex<T>> {
    let c = rect.corners();
    let mut out = Vec::with_capacity(4 * per_side);
    for s in 0..4 {
        let (a, b) = (c[s], c[(s + 1) % 4]);
        for k in 0..per_side {
            out.push(a + (b - a) * (T::from_index(k) / T::from_index(per_side)));
        }
    }
    out
}

fn circle_points<T: Real>(center: Complex<T>, radius: T, nodes: usize) -> Vec<Complex<T>> {
    let two_pi = T::PI() + T::PI();
    (0..nodes)
        .map(|k| center + cis(two_pi * T::from_index(k) / T::from_index(nodes)) * radius)
        .collect()
}

fn rounded_winding<T: Real>(value: T, min_mod: T) -> Result<usize> {
    if !(min_mod >= T::lit(MIN_CONTOUR_MODULUS)) {
        return Err(DiracError::ContourTooClose {
            min_modulus: min_mod.as_f64(),
        });
    }
    let r = value.round();
    if (value - r).abs() > T::lit(MAX_WINDING_DEFECT) || r < T::zero() {
        return Err(DiracError::NonIntegerWinding {
            value: value.as_f64(),
        });
    }
    Ok(r.to_usize().unwrap_or(0))
}

/// Number of zeros of `f` inside a rectangle by the argument principle.
pub fn count_zeros_rect<T: Real, F: Fn(Complex<T>) -> Complex<T> + ?Sized>(
    f: &F,
    rect: &Rect<T>,
) -> Result<usize> {
    let (w, m) = winding_polygon(f, &rect_points(rect, 8));
    rounded_winding(w, m)
}

/// Number of zeros of `f` inside a disk from the increments of `arg f` along
/// the circle.
pub fn count_zeros_disk_arg<T: Real, F: Fn(Complex<T>) -> Complex<T> + ?Sized>(
    f: &F,
    center: Complex<T>,
    radius: T,
    nodes: usize,
) -> Result<usize> {
    let (w, m) = winding_polygon(f, &circle_points(center, radius, nodes.max(8)));
    rounded_winding(w, m)
}

/// `(1/2πi) ∮ Δ'/Δ` over the circle `|λ − center| = radius` by the trapezoid
/// rule on `quad_nodes` points, with `Δ'` from central differences.
pub fn count_zeros_disk<T: Real, F: Fn(Complex<T>) -> Complex<T> + ?Sized>(
    f: &F,
    center: Complex<T>,
    radius: T,
    quad_nodes: usize,
) -> Result<usize> {
    let nodes = quad_nodes.max(4);
    let two_pi = T::PI() + T::PI();
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut min_mod = T::infinity();
    for k in 0..nodes {
        let e = cis(two_pi * T::from_index(k) / T::from_index(nodes));
        let z = center + e * radius;
        let fz = f(z);
        min_mod = min_mod.min(fz.norm());
        let d = derivative(f, z);
        acc += d / fz * e * radius;
    }
    let winding = acc / T::from_index(nodes);
    if winding.im.abs() > T::lit(MAX_WINDING_DEFECT) {
        return Err(DiracError::NonIntegerWinding {
            value: winding.norm().as_f64(),
        });
    }
    rounded_winding(winding.re, min_mod)
}

/// Central difference with step `10⁻⁶ (1 + |λ|)`.
pub fn derivative<T: Real, F: Fn(Complex<T>) -> Complex<T> + ?Sized>(
    f: &F,
    z: Complex<T>,
) -> Complex<T> {
    let h = T::lit(1e-6) * (T::one() + z.norm());
    (f(z + h) - f(z - h)) / (h + h)
}

/// Newton iteration with central-difference derivative and steps capped at
/// `max_step`.  Returns `None` on divergence.
pub fn newton<T: Real, F: Fn(Complex<T>) -> Complex<T> + ?Sized>(
    f: &F,
    start: Complex<T>,
    max_step: T,
    max_iter: usize,
) -> Option<Complex<T>> {
    let mut z = start;
    for _ in 0..max_iter {
        let fz = f(z);
        if fz.norm() == T::zero() {
            return Some(z);
        }
        let d = derivative(f, z);
        let mut step = fz / d;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        if step.norm() > max_step {
            step = step * (max_step / step.norm());
        }
        z -= step;
        if step.norm() <= T::lit(1e-13) * (T::one() + z.norm()) {
            return Some(z);
        }
    }
    let fz = f(z);
    let d = derivative(f, z);
    ((fz / d).norm() <= T::lit(1e-10) * (T::one() + z.norm())).then_some(z)
}

/// Zeros of `f` in a rectangle by recursive winding bisection with Newton
/// polish; returns `(zero, multiplicity)` pairs.
pub fn zeros_in_rect<T: Real, F: Fn(Complex<T>) -> Complex<T> + ?Sized>(
    f: &F,
    rect: Rect<T>,
    depth: usize,
) -> Result<Vec<(Complex<T>, usize)>> {
    let count = count_zeros_rect(f, &rect)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    if rect.diameter() < T::lit(1e-7) || depth > 80 {
        return Ok(vec![(rect.center(), count)]);
    }
    if count == 1 && rect.diameter() < T::lit(1.5) {
        if let Some(z) = newton(f, rect.center(), rect.diameter() * T::lit(0.25), 60) {
            if rect.contains(z) {
                return Ok(vec![(z, 1)]);
            }
        }
    }
    let mut out = Vec::new();
    for half in rect.split() {
        out.extend(zeros_in_rect(f, half, depth + 1)?);
    }
    Ok(out)
}

/// Characteristic determinant `Δ_Q` evaluated through the ODE.
#[derive(Clone, Debug)]
pub struct DeltaQ<'a, T> {
    sys: &'a DiracSystem<T>,
    minors: Minors<T>,
    n: usize,
}

impl<'a, T: Real> DeltaQ<'a, T> {
    pub fn new(sys: &'a DiracSystem<T>, bc: &BoundaryConditions<T>, n: usize) -> Self {
        Self {
            sys,
            minors: bc.minors(),
            n,
        }
    }

    pub fn eval(&self, lambda: Complex<T>) -> Complex<T> {
        let phi = monodromy(self.sys, lambda, self.n).expect("grid size validated");
        det_from_monodromy(&self.minors, self.sys.b1(), self.sys.b2(), lambda, &phi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumOptions<T> {
    /// Grid used by the ODE integrator for `Δ_Q`.
    pub grid: usize,
    /// Disk radii tried for the pairing, smallest first.
    pub eps_ladder: Vec<T>,
    /// Contour points for the verification windings.
    pub contour_nodes: usize,
    pub newton_max_iter: usize,
}

impl<T: Real> Default for SpectrumOptions<T> {
    fn default() -> Self {
        Self {
            grid: 512,
            eps_ladder: [0.4, 0.2, 0.1, 0.05].iter().map(|e| T::lit(*e)).collect(),
            contour_nodes: 32,
            newton_max_iter: 50,
        }
    }
}

/// How an entry's perturbed zero was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroMethod {
    /// `Q ≡ 0`: copied from `λ_n⁰`.
    Unperturbed,
    Newton,
    WindingBisection,
    /// No verified zero; `λ_n` holds the best available estimate.
    Unresolved,
}

impl ZeroMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Unperturbed => "unperturbed",
            Self::Newton => "newton",
            Self::WindingBisection => "winding_bisection",
            Self::Unresolved => "unresolved",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEntry<T> {
    pub n: i64,
    pub lambda0: Complex<T>,
    pub lambda: Complex<T>,
    pub multiplicity: usize,
    /// Smallest ladder radius at which the pairing was winding-verified.
    pub ladder_eps: Option<T>,
    pub method: ZeroMethod,
}

impl<T: Real> SpectrumEntry<T> {
    pub fn verified(&self) -> bool {
        self.ladder_eps.is_some()
    }
}

/// Canonically ordered eigenvalues `λ_n` paired with `λ_n⁰`, `|n| ≤ n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumWindow<T> {
    pub entries: Vec<SpectrumEntry<T>>,
    pub strip_height: T,
    pub n_max: usize,
}

impl<T: Real> SpectrumWindow<T> {
    pub fn entry(&self, n: i64) -> Option<&SpectrumEntry<T>> {
        self.entries.iter().find(|e| e.n == n)
    }

    /// Indices whose pairing could not be winding-verified.
    pub fn head(&self) -> Vec<i64> {
        self.entries
            .iter()
            .filter(|e| !e.verified())
            .map(|e| e.n)
            .collect()
    }

    /// Smallest `m` such that every entry with `|n| ≥ m` is verified.
    pub fn tail_start(&self) -> i64 {
        self.head().iter().map(|n| n.abs() + 1).max().unwrap_or(0)
    }

    /// CSV with header `n,re_lambda0,im_lambda0,re_lambda,im_lambda,multiplicity,ladder_eps`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re_lambda0,im_lambda0,re_lambda,im_lambda,multiplicity,ladder_eps\n");
        for e in &self.entries {
            let eps = e.ladder_eps.map(|v| format!("{v}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.n, e.lambda0.re, e.lambda0.im, e.lambda.re, e.lambda.im, e.multiplicity, eps
            ));
        }
        out
    }
}

/// Canonically ordered zeros of `Δ_Q` for `|n| ≤ n_max`.
pub fn zeros_delta_q<T: Real>(
    sys: &DiracSystem<T>,
    bc: &BoundaryConditions<T>,
    n_max: usize,
    opts: &SpectrumOptions<T>,
) -> Result<SpectrumWindow<T>> {
    let delta = DeltaQ::new(sys, bc, opts.grid);
    let f = |l: Complex<T>| delta.eval(l);
    let free = sys.is_free();
    pair_zeros(&f, bc, sys.b1(), sys.b2(), n_max, opts, free)
}

/// Canonical pairing for an arbitrary determinant evaluator `f` whose
/// unperturbed counterpart is `Δ₀` of `bc`.
pub fn pair_zeros<T: Real, F: Fn(Complex<T>) -> Complex<T> + Sync + ?Sized>(
    f: &F,
    bc: &BoundaryConditions<T>,
    b1: T,
    b2: T,
    n_max: usize,
    opts: &SpectrumOptions<T>,
    unperturbed: bool,
) -> Result<SpectrumWindow<T>> {
    let padded = zeros_delta0(bc, b1, b2, n_max + 2)?;
    let mut ladder = opts.eps_ladder.clone();
    ladder.sort_by(|a, b| a.partial_cmp(b).expect("finite ladder"));
    let largest = *ladder.last().unwrap_or(&T::lit(0.4));
    let entries: Vec<Result<SpectrumEntry<T>>> = padded
        .par_iter()
        .filter(|z| z.n.unsigned_abs() as usize <= n_max)
        .map(|z| {
            let gap = padded
                .iter()
                .filter(|o| o.n != z.n)
                .map(|o| (o.lambda - z.lambda).norm())
                .fold(T::infinity(), T::min);
            let isolated: Vec<T> = ladder.iter().copied().filter(|e| *e + *e < gap).collect();
            if unperturbed {
                return Ok(SpectrumEntry {
                    n: z.n,
                    lambda0: z.lambda,
                    lambda: z.lambda,
                    multiplicity: z.multiplicity,
                    ladder_eps: isolated.first().copied(),
                    method: ZeroMethod::Unperturbed,
                });
            }
            let newton_zero = newton(f, z.lambda, largest * T::lit(0.5), opts.newton_max_iter);
            if let Some(lam) = newton_zero {
                for eps in &isolated {
                    if (lam - z.lambda).norm() < *eps
                        && count_zeros_disk_arg(f, z.lambda, *eps, opts.contour_nodes).ok()
                            == Some(z.multiplicity)
                    {
                        return Ok(SpectrumEntry {
                            n: z.n,
                            lambda0: z.lambda,
                            lambda: lam,
                            multiplicity: z.multiplicity,
                            ladder_eps: Some(*eps),
                            method: ZeroMethod::Newton,
                        });
                    }
                }
            }
            for eps in isolated.iter().rev() {
                if count_zeros_disk_arg(f, z.lambda, *eps, opts.contour_nodes).ok()
                    != Some(z.multiplicity)
                {
                    continue;
                }
                let rect = Rect {
                    re_lo: z.lambda.re - *eps,
                    re_hi: z.lambda.re + *eps,
                    im_lo: z.lambda.im - *eps,
                    im_hi: z.lambda.im + *eps,
                };
                if let Ok(found) = zeros_in_rect(f, rect, 0) {
                    let inside: Vec<_> = found
                        .iter()
                        .filter(|(w, _)| (*w - z.lambda).norm() < *eps)
                        .collect();
                    if let Some((w, _)) = inside.first() {
                        return Ok(SpectrumEntry {
                            n: z.n,
                            lambda0: z.lambda,
                            lambda: *w,
                            multiplicity: z.multiplicity,
                            ladder_eps: Some(*eps),
                            method: ZeroMethod::WindingBisection,
                        });
                    }
                }
            }
            Ok(SpectrumEntry {
                n: z.n,
                lambda0: z.lambda,
                lambda: newton_zero.unwrap_or(z.lambda),
                multiplicity: z.multiplicity,
                ladder_eps: None,
                method: if newton_zero.is_some() {
                    ZeroMethod::Newton
                } else {
                    ZeroMethod::Unresolved
                },
            })
        })
        .collect();
    let entries = entries.into_iter().collect::<Result<Vec<_>>>()?;
    let strip_height = entries
        .iter()
        .map(|e| e.lambda.im.abs().max(e.lambda0.im.abs()))
        .fold(T::zero(), T::max)
        + T::lit(0.5);
    Ok(SpectrumWindow {
        entries,
        strip_height,
        n_max,
    })
}

/// Largest number of entries with `|Re λ − t| ≤ 1` over `t` on a grid of step ¼
/// spanning `window`.
pub fn incompressible_density<T: Real>(seq: &[Complex<T>], window: (T, T)) -> usize {
    let (lo, hi) = window;
    let step = T::lit(0.25);
    let count = ((hi - lo) / step).floor().to_usize().unwrap_or(0);
    (0..=count)
        .map(|k| {
            let t = lo + step * T::from_index(k);
            seq.iter().filter(|z| (z.re - t).abs() <= T::one()).count()
        })
        .max()
        .unwrap_or(0)
}
