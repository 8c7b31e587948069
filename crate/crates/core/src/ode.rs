//! The system `y' = iB(λI − Q(x))y` and its fundamental matrix.

use num_complex::Complex;

use crate::boundary::{BoundaryConditions, Minors};
use crate::error::{DiracError, Result};
use crate::gridfn::{SampledFunction, SampledVector};
use crate::mat2::{Mat2, Vec2};
use crate::scalar::{cone, czero, expi, Real};

/// Largest phase advance `(b2 − b1)|λ| h` allowed in one integrator sub-step.
const MAX_PHASE_STEP: f64 = 0.02;
/// Largest `max|b| sup|Q| h` allowed in one integrator sub-step.
const MAX_COUPLING_STEP: f64 = 0.05;

/// Weights `b1 < 0 < b2` and off-diagonal potential entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracSystem<T> {
    b1: T,
    b2: T,
    q12: SampledFunction<T>,
    q21: SampledFunction<T>,
}

impl<T: Real> DiracSystem<T> {
    pub fn new(b1: T, b2: T, q12: SampledFunction<T>, q21: SampledFunction<T>) -> Result<Self> {
        if !(b1 < T::zero() && b2 > T::zero() && b1.is_finite() && b2.is_finite()) {
            return Err(DiracError::InvalidWeights {
                b1: b1.as_f64(),
                b2: b2.as_f64(),
            });
        }
        if q12.grid_size() != q21.grid_size() {
            return Err(DiracError::GridMismatch {
                left: q12.grid_size(),
                right: q21.grid_size(),
            });
        }
        Ok(Self { b1, b2, q12, q21 })
    }

    /// System with `Q ≡ 0` on a grid with `n` intervals.
    pub fn free(b1: T, b2: T, n: usize) -> Result<Self> {
        Self::new(b1, b2, SampledFunction::zeros(n)?, SampledFunction::zeros(n)?)
    }

    pub fn b1(&self) -> T {
        self.b1
    }

    pub fn b2(&self) -> T {
        self.b2
    }

    /// `b_k` for `k ∈ {1, 2}`.
    pub fn b(&self, k: usize) -> T {
        if k == 1 {
            self.b1
        } else {
            self.b2
        }
    }

    /// `a_k = 1/b_k`.
    pub fn a(&self, k: usize) -> T {
        T::one() / self.b(k)
    }

    /// `α_k = b_j/(b_j − b_k)`, `j ≠ k`; `α₁ + α₂ = 1`.
    pub fn alpha(&self, k: usize) -> T {
        let j = 3 - k;
        self.b(j) / (self.b(j) - self.b(k))
    }

    /// `γ_k = b_j/b_k`, `j ≠ k`.
    pub fn gamma(&self, k: usize) -> T {
        self.b(3 - k) / self.b(k)
    }

    pub fn q12(&self) -> &SampledFunction<T> {
        &self.q12
    }

    pub fn q21(&self) -> &SampledFunction<T> {
        &self.q21
    }

    /// Off-diagonal entry `Q_{jk}`, `j ≠ k`, one-based.
    pub fn q(&self, j: usize, k: usize) -> &SampledFunction<T> {
        assert!(j != k && (1..=2).contains(&j) && (1..=2).contains(&k));
        if j == 1 {
            &self.q12
        } else {
            &self.q21
        }
    }

    pub fn grid_size(&self) -> usize {
        self.q12.grid_size()
    }

    pub fn is_free(&self) -> bool {
        self.q12.is_zero() && self.q21.is_zero()
    }

    fn q_sup(&self) -> T {
        self.q12.sup().max(self.q21.sup())
    }
}

/// `Φ(x_i, λ)` at every grid node, with `Φ(0, λ) = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalMatrix<T> {
    pub lambda: Complex<T>,
    values: Vec<Mat2<T>>,
}

impl<T: Real> FundamentalMatrix<T> {
    pub fn values(&self) -> &[Mat2<T>] {
        &self.values
    }

    pub fn at(&self, i: usize) -> Mat2<T> {
        self.values[i]
    }

    pub fn at_end(&self) -> Mat2<T> {
        *self.values.last().expect("nonempty grid")
    }

    pub fn grid_size(&self) -> usize {
        self.values.len() - 1
    }

    /// `x ↦ Φ(x, λ) v` as a vector function.
    pub fn apply(&self, v: Vec2<T>) -> SampledVector<T> {
        SampledVector::new(self.values.iter().map(|m| m.mul_vec(&v)).collect())
            .expect("grid size validated at construction")
    }
}

/// Integrates `W' = e^{−iBλx}(−iBQ)e^{iBλx} W`, `Φ = e^{iBλx} W`, with the
/// classical fourth-order Runge–Kutta method on sub-steps of each grid cell.
fn propagate<T: Real>(sys: &DiracSystem<T>, lambda: Complex<T>, n: usize, store: bool) -> Vec<Mat2<T>> {
    let (b1, b2) = (sys.b1, sys.b2);
    let h = T::one() / T::from_index(n);
    let omega = lambda * (b2 - b1);
    let phase_rate = omega.norm();
    let coupling = b1.abs().max(b2) * sys.q_sup();
    let per_cell = (h * phase_rate / T::lit(MAX_PHASE_STEP))
        .max(h * coupling / T::lit(MAX_COUPLING_STEP))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let hs = h / T::from_index(per_cell);
    let half = T::lit(0.5);
    let i = Complex::<T>::i();
    let free = sys.is_free();

    let rhs = |x: T, w: &Mat2<T>| -> Mat2<T> {
        let rot = expi(omega * x);
        let c12 = -i * b1 * sys.q12.eval(x) * rot;
        let c21 = -i * b2 * sys.q21.eval(x) / rot;
        Mat2::new(
            c12 * w.m[1][0],
            c12 * w.m[1][1],
            c21 * w.m[0][0],
            c21 * w.m[0][1],
        )
    };

    let node = |x: T, w: &Mat2<T>| -> Mat2<T> {
        let e1 = expi(lambda * b1 * x);
        let e2 = expi(lambda * b2 * x);
        Mat2::new(e1 * w.m[0][0], e1 * w.m[0][1], e2 * w.m[1][0], e2 * w.m[1][1])
    };

    let mut w = Mat2::identity();
    let mut out = Vec::with_capacity(if store { n + 1 } else { 1 });
    if store {
        out.push(Mat2::identity());
    }
    for cell in 0..n {
        let x0 = T::from_index(cell) * h;
        if !free {
            for s in 0..per_cell {
                let x = x0 + T::from_index(s) * hs;
                let k1 = rhs(x, &w);
                let k2 = rhs(x + half * hs, &(w + k1.scale_real(half * hs)));
                let k3 = rhs(x + half * hs, &(w + k2.scale_real(half * hs)));
                let k4 = rhs(x + hs, &(w + k3.scale_real(hs)));
                let incr = k1 + k2.scale_real(T::lit(2.0)) + k3.scale_real(T::lit(2.0)) + k4;
                w += incr.scale_real(hs / T::lit(6.0));
            }
        }
        if store {
            out.push(node(T::from_index(cell + 1) * h, &w));
        }
    }
    if !store {
        out.push(node(T::one(), &w));
    }
    out
}

pub fn fundamental_matrix<T: Real>(
    sys: &DiracSystem<T>,
    lambda: Complex<T>,
    n: usize,
) -> Result<FundamentalMatrix<T>> {
    if n < 2 {
        return Err(DiracError::GridTooSmall { min: 2, actual: n });
    }
    Ok(FundamentalMatrix {
        lambda,
        values: propagate(sys, lambda, n, true),
    })
}

/// `Φ(1, λ)` without storing intermediate nodes.
pub fn monodromy<T: Real>(sys: &DiracSystem<T>, lambda: Complex<T>, n: usize) -> Result<Mat2<T>> {
    if n < 2 {
        return Err(DiracError::GridTooSmall { min: 2, actual: n });
    }
    Ok(propagate(sys, lambda, n, false)[0])
}

/// Solution `e_±(x, λ) = Φ(x, λ)(1, ±1)ᵀ`.
pub fn e_pm<T: Real>(
    sys: &DiracSystem<T>,
    lambda: Complex<T>,
    sign: Sign,
    n: usize,
) -> Result<SampledVector<T>> {
    Ok(fundamental_matrix(sys, lambda, n)?.apply([cone(), sign.complex()]))
}

/// Characteristic determinant from `φ_jk = Φ_jk(1, λ)`:
/// `J₁₂ + J₃₄ e^{i(b1+b2)λ} + J₃₂ φ₁₁ + J₁₃ φ₁₂ + J₄₂ φ₂₁ + J₁₄ φ₂₂`.
pub fn char_det_direct<T: Real>(
    sys: &DiracSystem<T>,
    bc: &BoundaryConditions<T>,
    lambda: Complex<T>,
    n: usize,
) -> Result<Complex<T>> {
    let phi = monodromy(sys, lambda, n)?;
    Ok(det_from_monodromy(&bc.minors(), sys.b1, sys.b2, lambda, &phi))
}

pub(crate) fn det_from_monodromy<T: Real>(
    m: &Minors<T>,
    b1: T,
    b2: T,
    lambda: Complex<T>,
    phi: &Mat2<T>,
) -> Complex<T> {
    m.j(1, 2)
        + m.j(3, 4) * expi(lambda * (b1 + b2))
        + m.j(3, 2) * phi.m[0][0]
        + m.j(1, 3) * phi.m[0][1]
        + m.j(4, 2) * phi.m[1][0]
        + m.j(1, 4) * phi.m[1][1]
}

/// `±` selector for the solutions `e_±` and kernels `K^±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Real>(&self) -> T {
        match self {
            Self::Plus => T::one(),
            Self::Minus => -T::one(),
        }
    }

    pub fn complex<T: Real>(&self) -> Complex<T> {
        Complex::new(self.value(), T::zero())
    }
}

const GAUSS5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Closed-form fundamental matrix for `Q12 = 0`:
/// `Φ = [[e^{i b1 λ x}, 0], [φ21, e^{i b2 λ x}]]` with
/// `φ21(x) = −i b2 e^{i b2 λ x} ∫_0^x Q21(t) e^{i(b1−b2)λt} dt`.
///
/// The integral is evaluated exactly for the piecewise-linear `Q21` up to
/// five-point Gauss–Legendre error per cell.
pub fn closed_form_q12_zero<T: Real>(
    q21: &SampledFunction<T>,
    b1: T,
    b2: T,
    lambda: Complex<T>,
    n: usize,
) -> Result<FundamentalMatrix<T>> {
    if n < 2 {
        return Err(DiracError::GridTooSmall { min: 2, actual: n });
    }
    let h = T::one() / T::from_index(n);
    let kappa = lambda * (b1 - b2);
    let i = Complex::<T>::i();
    let mut integral = czero::<T>();
    let mut values = vec![Mat2::identity()];
    for cell in 0..n {
        let x0 = T::from_index(cell) * h;
        for (g, w) in GAUSS5_NODES.iter().zip(GAUSS5_WEIGHTS) {
            let t = x0 + h * T::lit(0.5) * (T::one() + T::lit(*g));
            integral += q21.eval(t) * expi(kappa * t) * (T::lit(w) * h * T::lit(0.5));
        }
        let x = x0 + h;
        let e1 = expi(lambda * b1 * x);
        let e2 = expi(lambda * b2 * x);
        values.push(Mat2::new(e1, czero(), -i * b2 * e2 * integral, e2));
    }
    Ok(FundamentalMatrix { lambda, values })
}
