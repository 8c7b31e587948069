//! Boundary conditions `U_j(y) = a_{j1} y1(0) + a_{j2} y2(0) + a_{j3} y1(1) + a_{j4} y2(1) = 0`,
//! their minors, canonical reduction and the regularity classifier.

use num_complex::Complex;

use crate::error::{DiracError, Result};
use crate::poly;
use crate::scalar::{cone, czero, expi, Real};

const ZERO_TOL: f64 = 1e-12;
const RATIO_TOL: f64 = 1e-12;
const MAX_DENOMINATOR: u64 = 64;
const ROOT_CLUSTER_RADIUS: f64 = 1e-6;

/// Canonical coefficients of
/// `y1(0) + b y2(0) + a y1(1) = 0`, `d y2(0) + c y1(1) + y2(1) = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Canonical<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Real> Canonical<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self { a, b, c, d }
    }

    /// Canonical form with real coefficients.
    pub fn real(a: T, b: T, c: T, d: T) -> Self {
        let r = |x| Complex::new(x, T::zero());
        Self::new(r(a), r(b), r(c), r(d))
    }

    /// `ad − bc`, which equals `J₃₂` of the canonical matrix.
    pub fn det(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn to_matrix(&self) -> [[Complex<T>; 4]; 2] {
        [
            [cone(), self.b, self.a, czero()],
            [czero(), self.d, self.c, cone()],
        ]
    }
}

/// The six independent minors `J_{jk} = det(A_{jk})` of the 2×4 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minors<T> {
    values: [[Complex<T>; 4]; 4],
}

impl<T: Real> Minors<T> {
    /// `J_{jk}` with one-based column indices.
    pub fn j(&self, j: usize, k: usize) -> Complex<T> {
        self.values[j - 1][k - 1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConditions<T> {
    a: [[Complex<T>; 4]; 2],
    canonical: Option<Canonical<T>>,
}

impl<T: Real> BoundaryConditions<T> {
    pub fn new(a: [[Complex<T>; 4]; 2]) -> Result<Self> {
        let bc = Self { a, canonical: None };
        let m = bc.minors();
        let scale = bc.scale();
        let independent = (1..=4)
            .flat_map(|j| (j + 1..=4).map(move |k| (j, k)))
            .any(|(j, k)| !is_zero(m.j(j, k), scale));
        if !independent {
            return Err(DiracError::DependentRows);
        }
        Ok(bc)
    }

    pub fn from_canonical(c: Canonical<T>) -> Self {
        Self {
            a: c.to_matrix(),
            canonical: Some(c),
        }
    }

    pub fn matrix(&self) -> &[[Complex<T>; 4]; 2] {
        &self.a
    }

    fn scale(&self) -> T {
        let m = self
            .a
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(T::zero(), T::max);
        m * m
    }

    pub fn minors(&self) -> Minors<T> {
        let mut values = [[czero(); 4]; 4];
        for (j, row) in values.iter_mut().enumerate() {
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = self.a[0][j] * self.a[1][k] - self.a[0][k] * self.a[1][j];
            }
        }
        Minors { values }
    }

    /// Reduces to canonical form by left multiplication with `A₁₄⁻¹`.
    pub fn canonicalize(&self) -> Result<Canonical<T>> {
        if let Some(c) = self.canonical {
            return Ok(c);
        }
        let j14 = self.minors().j(1, 4);
        if is_zero(j14, self.scale()) {
            return Err(DiracError::NotCanonicalizable);
        }
        let [r1, r2] = &self.a;
        let inv = cone::<T>() / j14;
        let (m11, m12, m21, m22) = (r2[3] * inv, -r1[3] * inv, -r2[0] * inv, r1[0] * inv);
        let row = |col: usize| (m11 * r1[col] + m12 * r2[col], m21 * r1[col] + m22 * r2[col]);
        let (b, d) = row(1);
        let (a, c) = row(2);
        Ok(Canonical { a, b, c, d })
    }
}

fn is_zero<T: Real>(v: Complex<T>, scale: T) -> bool {
    v.norm() <= T::lit(ZERO_TOL) * scale.max(T::one())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularityKind {
    Nonregular,
    Regular,
    StrictlyRegular,
    RegularUnknownStrictness,
}

impl RegularityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Nonregular => "nonregular",
            Self::Regular => "regular",
            Self::StrictlyRegular => "strictly_regular",
            Self::RegularUnknownStrictness => "regular_unknown_strictness",
        }
    }
}

/// How the rationality of `b1/b2` was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioSource {
    Hint,
    Detected,
    Irrational,
}

impl RatioSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Hint => "hint",
            Self::Detected => "detected",
            Self::Irrational => "irrational",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegularityVerdict {
    pub kind: RegularityKind,
    /// Code naming the criterion that decided the verdict.
    pub reason: &'static str,
    /// `(n1, n2)` with `b1 = −n1 β`, `b2 = n2 β` when the ratio is rational.
    pub ratio: Option<(u64, u64)>,
    pub ratio_source: RatioSource,
}

impl RegularityVerdict {
    pub fn is_regular(&self) -> bool {
        self.kind != RegularityKind::Nonregular
    }

    pub fn is_strictly_regular(&self) -> bool {
        self.kind == RegularityKind::StrictlyRegular
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Coprime `(n1, n2)` with `−b1/b2 = n1/n2` found by continued fractions
/// (denominator at most 64, relative residual at most `10⁻¹²`).
pub fn detect_ratio<T: Real>(b1: T, b2: T) -> Option<(u64, u64)> {
    let r = (-b1 / b2).as_f64();
    if !(r.is_finite() && r > 0.0) {
        return None;
    }
    let (mut h_prev, mut h) = (1u64, r.floor() as u64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut frac = r - r.floor();
    loop {
        if (r - h as f64 / k as f64).abs() <= RATIO_TOL * r.max(1.0) {
            let g = gcd(h, k);
            return (h > 0).then_some((h / g, k / g));
        }
        if frac.abs() < 1e-300 {
            return None;
        }
        let x = 1.0 / frac;
        let q = x.floor();
        frac = x - q;
        let q = q as u64;
        let h_next = q.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = q.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > MAX_DENOMINATOR {
            return None;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
    }
}

/// Ascending coefficients of `z^{n1} Δ₀` as a polynomial in `z = e^{iβλ}`:
/// `(ad − bc) + d z^{n1} + a z^{n2} + z^{n1+n2}`.
pub fn delta0_polynomial<T: Real>(c: &Canonical<T>, n1: u64, n2: u64) -> Vec<Complex<T>> {
    let (n1, n2) = (n1 as usize, n2 as usize);
    let mut coeffs = vec![czero(); n1 + n2 + 1];
    coeffs[0] += c.det();
    coeffs[n1] += c.d;
    coeffs[n2] += c.a;
    coeffs[n1 + n2] += cone();
    coeffs
}

/// Whether a polynomial has roots that coincide within the cluster radius.
pub fn has_multiple_roots<T: Real>(coeffs: &[Complex<T>]) -> bool {
    let r = poly::roots(coeffs);
    poly::cluster_roots(&r, T::lit(ROOT_CLUSTER_RADIUS))
        .iter()
        .any(|(_, m)| *m > 1)
}

/// Regularity and strict-regularity verdict.
pub fn classify<T: Real>(
    bc: &BoundaryConditions<T>,
    b1: T,
    b2: T,
    ratio_hint: Option<(u64, u64)>,
) -> RegularityVerdict {
    let (ratio, ratio_source) = match ratio_hint {
        Some((n1, n2)) if n1 > 0 && n2 > 0 => {
            let g = gcd(n1, n2);
            (Some((n1 / g, n2 / g)), RatioSource::Hint)
        }
        _ => match detect_ratio(b1, b2) {
            Some(r) => (Some(r), RatioSource::Detected),
            None => (None, RatioSource::Irrational),
        },
    };
    let verdict = |kind, reason| RegularityVerdict {
        kind,
        reason,
        ratio,
        ratio_source,
    };
    let Ok(c) = bc.canonicalize() else {
        return verdict(RegularityKind::Nonregular, "j14_zero");
    };
    let scale = [c.a, c.b, c.c, c.d]
        .iter()
        .map(|v| v.norm())
        .fold(T::one(), T::max);
    if is_zero(c.det(), scale * scale) {
        return verdict(RegularityKind::Nonregular, "j32_zero");
    }
    let zero = |v: Complex<T>| is_zero(v, scale);
    let bc_prod = c.b * c.c;

    if ratio == Some((1, 1)) {
        let disc = (c.a - c.d) * (c.a - c.d) + bc_prod * T::lit(4.0);
        return if is_zero(disc, scale * scale) {
            verdict(RegularityKind::Regular, "dirac_discriminant_zero")
        } else {
            verdict(RegularityKind::StrictlyRegular, "dirac_discriminant_nonzero")
        };
    }
    if zero(c.a) && zero(c.d) {
        return verdict(RegularityKind::StrictlyRegular, "separated");
    }
    if zero(bc_prod) {
        let log_sum = b1 * c.d.norm().ln() + b2 * c.a.norm().ln();
        let log_separated = log_sum.abs() > T::lit(ZERO_TOL) * (b2 - b1);
        if log_separated {
            return verdict(RegularityKind::StrictlyRegular, "bc_zero_log_criterion");
        }
        return match ratio {
            Some((n1, n2)) => {
                let two_pi = T::PI() + T::PI();
                let phase = T::from_u64(n1).unwrap() * (-c.d).arg()
                    - T::from_u64(n2).unwrap() * (-c.a).arg();
                let k = (phase / two_pi).round();
                if (phase - k * two_pi).abs() > T::lit(1e-10) {
                    verdict(RegularityKind::StrictlyRegular, "bc_zero_arg_criterion")
                } else {
                    verdict(RegularityKind::Regular, "bc_zero_progressions_collide")
                }
            }
            None => verdict(RegularityKind::Regular, "bc_zero_log_equal"),
        };
    }
    if let Some((n1, n2)) = ratio {
        return if has_multiple_roots(&delta0_polynomial(&c, n1, n2)) {
            verdict(RegularityKind::Regular, "polynomial_multiple_roots")
        } else {
            verdict(RegularityKind::StrictlyRegular, "polynomial_simple_roots")
        };
    }
    let im_tol = T::lit(ZERO_TOL) * scale;
    if zero(c.a) && bc_prod.im.abs() <= im_tol * scale && c.d.im.abs() <= im_tol {
        let alpha = -b1 / b2;
        let critical = -(alpha + T::one())
            * (bc_prod.norm() * alpha.powf(-alpha)).powf(T::one() / (alpha + T::one()));
        return if (c.d.re - critical).abs() <= T::lit(1e-10) * critical.abs() {
            verdict(RegularityKind::Regular, "a_zero_real_critical")
        } else {
            verdict(RegularityKind::StrictlyRegular, "a_zero_real_criterion")
        };
    }
    verdict(
        RegularityKind::RegularUnknownStrictness,
        "irrational_general_unknown",
    )
}

/// `Δ₀(λ) = d + a e^{i(b1+b2)λ} + (ad − bc) e^{i b1 λ} + e^{i b2 λ}`.
pub fn delta0<T: Real>(c: &Canonical<T>, b1: T, b2: T, lambda: Complex<T>) -> Complex<T> {
    c.d + c.a * expi(lambda * (b1 + b2)) + c.det() * expi(lambda * b1) + expi(lambda * b2)
}

/// `Δ₀` for a general (not necessarily canonical) matrix through its minors:
/// `J₁₂ + J₃₄ e^{i(b1+b2)λ} + J₃₂ e^{i b1 λ} + J₁₄ e^{i b2 λ}`.
pub fn delta0_minors<T: Real>(m: &Minors<T>, b1: T, b2: T, lambda: Complex<T>) -> Complex<T> {
    m.j(1, 2)
        + m.j(3, 4) * expi(lambda * (b1 + b2))
        + m.j(3, 2) * expi(lambda * b1)
        + m.j(1, 4) * expi(lambda * b2)
}
