//! Bari-basis criterion for the unperturbed operator: closed-form eigenvector
//! pairs, the terms `α_n`, criterion partial sums and the unitarity test.

use num_complex::Complex;

use crate::boundary::{BoundaryConditions, Canonical};
use crate::error::{DiracError, Result};
use crate::scalar::{cone, expi, Real};
use crate::spectrum::zeros_delta0;

const GATE_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-12;
const CAUCHY_SHARE: f64 = 1e-6;
const CAUCHY_ABS: f64 = 1e-10;
const GROWTH_SHARE: f64 = 0.2;

/// `e_j = e^{i b_j λ}` and `E_j^± = ∫_0^1 e^{∓2 b_j Im λ x} dx`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EjQuantities<T> {
    pub e1: Complex<T>,
    pub e2: Complex<T>,
    pub e1_plus: T,
    pub e1_minus: T,
    pub e2_plus: T,
    pub e2_minus: T,
}

/// `(e^y − 1)/y`, continued by 1 at `y = 0`.
fn exp_ratio<T: Real>(y: T) -> T {
    if y.abs() < T::lit(1e-8) {
        T::one() + y * T::lit(0.5)
    } else {
        y.exp_m1() / y
    }
}

pub fn ej_quantities<T: Real>(b1: T, b2: T, lambda: Complex<T>) -> EjQuantities<T> {
    let two_im = lambda.im + lambda.im;
    EjQuantities {
        e1: expi(lambda * b1),
        e2: expi(lambda * b2),
        e1_plus: exp_ratio(-b1 * two_im),
        e1_minus: exp_ratio(b1 * two_im),
        e2_plus: exp_ratio(-b2 * two_im),
        e2_minus: exp_ratio(b2 * two_im),
    }
}

/// Closed-form norms and pairing of the eigenvector `f_n` of `L(0)` and the
/// eigenvector `g_n` of its adjoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairGeometry<T> {
    pub f_norm_sq: T,
    pub g_norm_sq: T,
    pub pairing: Complex<T>,
}

/// Coefficients `(f₁, f₂, ḡ₁, ḡ₂)` with `f(x) = (f₁ e^{i b1 λ x}, f₂ e^{i b2 λ x})`
/// and `conj g(x) = (ḡ₁ e^{−i b1 λ x}, ḡ₂ e^{−i b2 λ x})`.
pub fn eigenvector_coefficients<T: Real>(
    c: &Canonical<T>,
    b1: T,
    b2: T,
    lambda: Complex<T>,
) -> [Complex<T>; 4] {
    let q = ej_quantities(b1, b2, lambda);
    let k = -b2 / b1;
    let one = cone::<T>();
    if c.b.norm() > T::zero() {
        [
            c.b,
            -(one + c.a * q.e1),
            one + c.d / q.e2,
            -c.b * k,
        ]
    } else if c.c.norm() > T::zero() {
        [
            c.d + q.e2,
            -c.c * q.e1,
            -c.c * q.e1 / k,
            (one + c.a * q.e1) * q.e2,
        ]
    } else if (c.d + q.e2).norm() <= (one + c.a * q.e1).norm() {
        [Complex::new(T::zero(), T::zero()), one, Complex::new(T::zero(), T::zero()), one]
    } else {
        [one, Complex::new(T::zero(), T::zero()), one, Complex::new(T::zero(), T::zero())]
    }
}

pub fn pair_geometry<T: Real>(c: &Canonical<T>, b1: T, b2: T, lambda: Complex<T>) -> PairGeometry<T> {
    let q = ej_quantities(b1, b2, lambda);
    let [f1, f2, g1, g2] = eigenvector_coefficients(c, b1, b2, lambda);
    PairGeometry {
        f_norm_sq: f1.norm_sqr() * q.e1_plus + f2.norm_sqr() * q.e2_plus,
        g_norm_sq: g1.norm_sqr() * q.e1_minus + g2.norm_sqr() * q.e2_minus,
        pairing: f1 * g1 + f2 * g2,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BariTerm<T> {
    pub n: i64,
    pub lambda: Complex<T>,
    /// `‖f_n‖²‖g_n‖²/|(f_n,g_n)|² − 1`, or `None` when the pairing degenerates.
    pub alpha: Option<T>,
}

/// `α_n` for every `(n, λ_n⁰)` in `lambdas`.
pub fn bari_terms<T: Real>(
    c: &Canonical<T>,
    b1: T,
    b2: T,
    lambdas: &[(i64, Complex<T>)],
) -> Vec<BariTerm<T>> {
    lambdas
        .iter()
        .map(|&(n, lambda)| {
            let g = pair_geometry(c, b1, b2, lambda);
            let scale = (g.f_norm_sq * g.g_norm_sq).sqrt();
            let alpha = (g.pairing.norm() > T::lit(1e-12) * scale).then(|| {
                (g.f_norm_sq * g.g_norm_sq / g.pairing.norm_sqr() - T::one()).max(T::zero())
            });
            BariTerm { n, lambda, alpha }
        })
        .collect()
}

/// `α_n` for one index, failing on a degenerate pairing.
pub fn bari_term<T: Real>(c: &Canonical<T>, b1: T, b2: T, n: i64, lambda: Complex<T>) -> Result<T> {
    bari_terms(c, b1, b2, &[(n, lambda)])[0]
        .alpha
        .ok_or(DiracError::DegeneratePairing { n })
}

/// `z_n = (1 + d e^{−i b2 λ}) · conj(1 + a e^{i b1 λ})`.
pub fn z_term<T: Real>(c: &Canonical<T>, b1: T, b2: T, lambda: Complex<T>) -> Complex<T> {
    let one = cone::<T>();
    (one + c.d * expi(-lambda * b2)) * (one + c.a * expi(lambda * b1)).conj()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BariVerdict {
    Bari,
    NotBari,
    Inconclusive,
}

impl BariVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Bari => "bari",
            Self::NotBari => "not_bari",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BariRow<T> {
    pub n: i64,
    pub lambda: Complex<T>,
    pub z: Complex<T>,
    pub alpha: Option<T>,
}

/// Partial sum over the window with the share of its last quarter in `|n|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesTail<T> {
    pub total: T,
    pub last_quarter: T,
}

impl<T: Real> SeriesTail<T> {
    fn share(&self) -> T {
        if self.total > T::zero() {
            self.last_quarter / self.total
        } else {
            T::zero()
        }
    }

    pub fn is_cauchy(&self) -> bool {
        self.last_quarter < T::lit(CAUCHY_ABS) || self.share() < T::lit(CAUCHY_SHARE)
    }

    pub fn grows(&self) -> bool {
        self.share() > T::lit(GROWTH_SHARE)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BariReport<T> {
    pub rows: Vec<BariRow<T>>,
    /// Indices `|n| ≤ head` are excluded from the sums.
    pub head: i64,
    pub im_squares: SeriesTail<T>,
    pub z_defect: SeriesTail<T>,
    pub alpha_sum: SeriesTail<T>,
    /// `b1|c| + b2|b|`.
    pub gate: T,
    pub gate_holds: bool,
    pub verdict: BariVerdict,
}

fn series<T: Real>(rows: &[BariRow<T>], head: i64, n_max: i64, f: impl Fn(&BariRow<T>) -> T) -> SeriesTail<T> {
    let cut = head.max(n_max - (n_max - head) / 4);
    let mut total = T::zero();
    let mut last = T::zero();
    for r in rows.iter().filter(|r| r.n.abs() > head) {
        let v = f(r);
        total += v;
        if r.n.abs() > cut {
            last += v;
        }
    }
    SeriesTail {
        total,
        last_quarter: last,
    }
}

/// Evaluates the Bari criterion on the window `|n| ≤ n_max`.
pub fn bari_criterion<T: Real>(
    bc: &BoundaryConditions<T>,
    b1: T,
    b2: T,
    n_max: usize,
) -> Result<BariReport<T>> {
    let c = bc.canonicalize()?;
    let zeros = zeros_delta0(bc, b1, b2, n_max)?;
    let lambdas: Vec<(i64, Complex<T>)> = zeros.iter().map(|z| (z.n, z.lambda)).collect();
    let terms = bari_terms(&c, b1, b2, &lambdas);
    let rows: Vec<BariRow<T>> = terms
        .iter()
        .map(|t| BariRow {
            n: t.n,
            lambda: t.lambda,
            z: z_term(&c, b1, b2, t.lambda),
            alpha: t.alpha,
        })
        .collect();
    let split = c.b.norm() == T::zero() && c.c.norm() == T::zero();
    let head = zeros
        .iter()
        .zip(&terms)
        .filter(|(z, t)| (z.multiplicity > 1 && !split) || t.alpha.is_none())
        .map(|(z, _)| z.n.abs())
        .max()
        .unwrap_or(-1);
    let n_max = n_max as i64;
    let im_squares = series(&rows, head, n_max, |r| r.lambda.im * r.lambda.im);
    let z_defect = series(&rows, head, n_max, |r| (r.z.norm() - r.z.re).max(T::zero()));
    let alpha_sum = series(&rows, head, n_max, |r| r.alpha.unwrap_or(T::zero()));
    let gate = b1 * c.c.norm() + b2 * c.b.norm();
    let gate_scale = (-b1 * c.c.norm() + b2 * c.b.norm()).max(T::one());
    let gate_holds = gate.abs() <= T::lit(GATE_TOL) * gate_scale;
    let verdict = if !gate_holds {
        BariVerdict::NotBari
    } else if head >= n_max {
        BariVerdict::Inconclusive
    } else if im_squares.is_cauchy() && z_defect.is_cauchy() {
        BariVerdict::Bari
    } else if im_squares.grows() || z_defect.grows() {
        BariVerdict::NotBari
    } else {
        BariVerdict::Inconclusive
    };
    Ok(BariReport {
        rows,
        head,
        im_squares,
        z_defect,
        alpha_sum,
        gate,
        gate_holds,
        verdict,
    })
}

/// Whether `M = [[a, μb], [c/μ, d]]`, `μ = √(−b2/b1)`, is unitary.
pub fn selfadjoint_check<T: Real>(c: &Canonical<T>, b1: T, b2: T) -> bool {
    let mu = (-b2 / b1).sqrt();
    let m = [[c.a, c.b * mu], [c.c / mu, c.d]];
    (0..2).all(|i| {
        (0..2).all(|j| {
            let v = m[i][0] * m[j][0].conj() + m[i][1] * m[j][1].conj();
            let want = if i == j { T::one() } else { T::zero() };
            (v - Complex::new(want, T::zero())).norm() <= T::lit(UNITARY_TOL)
        })
    })
}
