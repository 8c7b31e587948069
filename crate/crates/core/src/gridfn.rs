//! Grid functions on `[0, 1]`, triangular kernels on `Ω = {0 ≤ t ≤ x ≤ 1}`,
//! their norms, composition and resolvent kernels.

use num_complex::Complex;

use crate::error::{DiracError, Result};
use crate::mat2::{Mat2, Vec2};
use crate::scalar::{czero, Real};

/// Integrability exponent `p ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PNorm<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> PNorm<T> {
    pub fn new(p: T) -> Result<Self> {
        if p.is_infinite() && p > T::zero() {
            Ok(Self::Infinity)
        } else if p.is_nan() || p < T::one() {
            Err(DiracError::InvalidExponent { p: p.as_f64() })
        } else {
            Ok(Self::Finite(p))
        }
    }

    pub fn one() -> Self {
        Self::Finite(T::one())
    }

    pub fn two() -> Self {
        Self::Finite(T::lit(2.0))
    }

    /// The exponent `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(&self) -> Self {
        match *self {
            Self::Infinity => Self::Finite(T::one()),
            Self::Finite(p) if p == T::one() => Self::Infinity,
            Self::Finite(p) => Self::Finite(p / (p - T::one())),
        }
    }

    /// `Some(p)` for finite exponents and `None` for `p = ∞`.
    pub fn finite(&self) -> Option<T> {
        match *self {
            Self::Finite(p) => Some(p),
            Self::Infinity => None,
        }
    }

    pub fn value(&self) -> T {
        self.finite().unwrap_or_else(T::infinity)
    }
}

/// Trapezoid weight of node `l` for the integral over `[0, x_i]` on a grid of step `h`.
#[inline]
pub(crate) fn trap_weight<T: Real>(i: usize, l: usize, h: T) -> T {
    if i == 0 {
        T::zero()
    } else if l == 0 || l == i {
        h * T::lit(0.5)
    } else {
        h
    }
}

/// Complex scalar function sampled at `x_i = i/N`, `i = 0..=N`, with linear
/// interpolation between nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction<T> {
    samples: Vec<Complex<T>>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(samples: Vec<Complex<T>>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(DiracError::GridTooSmall {
                min: 2,
                actual: samples.len().saturating_sub(1),
            });
        }
        Ok(Self { samples })
    }

    pub fn from_fn(n: usize, f: impl Fn(T) -> Complex<T>) -> Result<Self> {
        let nt = T::from_index(n);
        Self::new((0..=n).map(|i| f(T::from_index(i) / nt)).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![czero(); n + 1])
    }

    /// Number of grid intervals `N`.
    pub fn grid_size(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn step(&self) -> T {
        T::one() / T::from_index(self.grid_size())
    }

    pub fn node(&self, i: usize) -> T {
        T::from_index(i) / T::from_index(self.grid_size())
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> Complex<T> {
        self.samples[i]
    }

    /// Linear interpolation at `x ∈ [0, 1]`; arguments outside are clamped.
    pub fn eval(&self, x: T) -> Complex<T> {
        self.eval_scaled(x * T::from_index(self.grid_size()))
    }

    /// Interpolation at fractional node position `s = x·N`.
    pub fn eval_scaled(&self, s: T) -> Complex<T> {
        let n = self.grid_size();
        let nt = T::from_index(n);
        let s = s.max(T::zero()).min(nt);
        let r = s.round();
        if (s - r).abs() <= T::lit(1e-12) * nt {
            return self.samples[r.to_usize().unwrap_or(0).min(n)];
        }
        let i = s.floor().to_usize().unwrap_or(0).min(n - 1);
        let frac = s - T::from_index(i);
        self.samples[i] * (T::one() - frac) + self.samples[i + 1] * frac
    }

    pub fn sup(&self) -> T {
        self.samples.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// Composite-trapezoid `L^p` norm; for `p = ∞` the largest sample modulus.
    pub fn lp_norm(&self, p: PNorm<T>) -> T {
        match p {
            PNorm::Infinity => self.sup(),
            PNorm::Finite(p) => {
                let h = self.step();
                let n = self.grid_size();
                let sum = self
                    .samples
                    .iter()
                    .enumerate()
                    .map(|(i, v)| trap_weight(n, i, h) * pow_abs(v.norm(), p))
                    .fold(T::zero(), |a, b| a + b);
                sum.powf(T::one() / p)
            }
        }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            samples: self.samples.iter().map(|v| *v * c).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(T, Complex<T>) -> Complex<T>) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .enumerate()
                .map(|(i, v)| f(self.node(i), *v))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_grid(self.grid_size(), other.grid_size())?;
        Ok(Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| *a - *b)
                .collect(),
        })
    }

    /// Samples of this function resampled onto a grid with `n` intervals.
    pub fn resample(&self, n: usize) -> Result<Self> {
        if n == self.grid_size() {
            return Ok(self.clone());
        }
        Self::from_fn(n, |x| self.eval(x))
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|v| v.re == T::zero() && v.im == T::zero())
    }
}

#[inline]
fn pow_abs<T: Real>(x: T, p: T) -> T {
    if p == T::one() {
        x
    } else if p == T::lit(2.0) {
        x * x
    } else {
        x.powf(p)
    }
}

/// `(Σ_i ‖f_i‖_p^p)^{1/p}` for a vector function, or `max_i ‖f_i‖_∞` when `p = ∞`.
pub fn lp_norm_components<T: Real>(components: &[&SampledFunction<T>], p: PNorm<T>) -> T {
    match p {
        PNorm::Infinity => components
            .iter()
            .map(|f| f.sup())
            .fold(T::zero(), T::max),
        PNorm::Finite(q) => components
            .iter()
            .map(|f| pow_abs(f.lp_norm(p), q))
            .fold(T::zero(), |a, b| a + b)
            .powf(T::one() / q),
    }
}

fn check_grid(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(DiracError::GridMismatch { left, right });
    }
    Ok(())
}

/// A `ℂ²`-valued function sampled on the uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledVector<T> {
    values: Vec<Vec2<T>>,
}

impl<T: Real> SampledVector<T> {
    pub fn new(values: Vec<Vec2<T>>) -> Result<Self> {
        if values.len() < 3 {
            return Err(DiracError::GridTooSmall {
                min: 2,
                actual: values.len().saturating_sub(1),
            });
        }
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(T) -> Vec2<T>) -> Result<Self> {
        let nt = T::from_index(n);
        Self::new((0..=n).map(|i| f(T::from_index(i) / nt)).collect())
    }

    pub fn grid_size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Vec2<T>] {
        &self.values
    }

    pub fn at(&self, i: usize) -> Vec2<T> {
        self.values[i]
    }

    pub fn component(&self, k: usize) -> SampledFunction<T> {
        SampledFunction {
            samples: self.values.iter().map(|v| v[k]).collect(),
        }
    }

    /// `max_i max_k |v_k(x_i)|`.
    pub fn sup(&self) -> T {
        self.values
            .iter()
            .map(|v| v[0].norm().max(v[1].norm()))
            .fold(T::zero(), T::max)
    }

    /// Sup-norm distance to another vector function on the same grid.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        check_grid(self.grid_size(), other.grid_size())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a[0] - b[0]).norm().max((a[1] - b[1]).norm()))
            .fold(T::zero(), T::max))
    }

    /// `L^s` norm with the component convention of [`lp_norm_components`].
    pub fn lp_norm(&self, p: PNorm<T>) -> T {
        let c0 = self.component(0);
        let c1 = self.component(1);
        lp_norm_components(&[&c0, &c1], p)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            values: self.values.iter().map(|v| [v[0] * c, v[1] * c]).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_grid(self.grid_size(), other.grid_size())?;
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| [a[0] + b[0], a[1] + b[1]])
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_grid(self.grid_size(), other.grid_size())?;
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| [a[0] - b[0], a[1] - b[1]])
                .collect(),
        })
    }
}

/// Which mixed norm of a triangular kernel to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XFamily {
    /// `X₁,p`: sup over `t` of `(∫_t^1 |F(x,t)|_{1→p}^p dx)^{1/p}`.
    One,
    /// `X∞,p`: sup over `x` of `(∫_0^x |F(x,t)|_{p'→∞}^p dt)^{1/p}`.
    Infinity,
}

/// Complex 2×2-matrix valued kernel sampled at the nodes `(x_i, t_j)`, `j ≤ i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularKernel<T> {
    n: usize,
    data: Vec<Mat2<T>>,
}

#[inline]
fn offset(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

impl<T: Real> TriangularKernel<T> {
    pub fn zeros(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(DiracError::GridTooSmall { min: 2, actual: n });
        }
        Ok(Self {
            n,
            data: vec![Mat2::zero(); offset(n + 1, 0)],
        })
    }

    pub fn from_fn(n: usize, f: impl Fn(T, T) -> Mat2<T>) -> Result<Self> {
        let mut out = Self::zeros(n)?;
        let nt = T::from_index(n);
        for i in 0..=n {
            for j in 0..=i {
                out.data[offset(i, j)] = f(T::from_index(i) / nt, T::from_index(j) / nt);
            }
        }
        Ok(out)
    }

    /// Builds a kernel from node-indexed values.
    pub fn from_index_fn(n: usize, f: impl Fn(usize, usize) -> Mat2<T>) -> Result<Self> {
        let mut out = Self::zeros(n)?;
        for i in 0..=n {
            for j in 0..=i {
                out.data[offset(i, j)] = f(i, j);
            }
        }
        Ok(out)
    }

    /// Builds a kernel from row-major triangular data (`(N+1)(N+2)/2` entries).
    pub fn from_data(n: usize, data: Vec<Mat2<T>>) -> Result<Self> {
        if n < 2 {
            return Err(DiracError::GridTooSmall { min: 2, actual: n });
        }
        if data.len() != offset(n + 1, 0) {
            return Err(DiracError::InvalidArgument(format!(
                "triangular kernel with N = {n} needs {} entries, got {}",
                offset(n + 1, 0),
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> T {
        T::one() / T::from_index(self.n)
    }

    pub fn data(&self) -> &[Mat2<T>] {
        &self.data
    }

    /// Entry at node `(x_i, t_j)`.
    ///
    /// # Panics
    /// If `j > i` or `i > N`: such nodes lie outside `Ω`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Mat2<T> {
        assert!(
            j <= i && i <= self.n,
            "node ({i}, {j}) outside the triangular domain of a grid with N = {}",
            self.n
        );
        self.data[offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Mat2<T>) {
        assert!(
            j <= i && i <= self.n,
            "node ({i}, {j}) outside the triangular domain of a grid with N = {}",
            self.n
        );
        self.data[offset(i, j)] = value;
    }

    pub fn row(&self, i: usize) -> &[Mat2<T>] {
        &self.data[offset(i, 0)..offset(i + 1, 0)]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [Mat2<T>] {
        &mut self.data[offset(i, 0)..offset(i + 1, 0)]
    }

    /// Entry `(r, c)` of every matrix in row `i`.
    pub fn entry_row(&self, i: usize, r: usize, c: usize) -> Vec<Complex<T>> {
        self.row(i).iter().map(|m| m.m[r][c]).collect()
    }

    /// Piecewise-linear interpolation on the triangulated grid of `Ω`.
    ///
    /// Square cells strictly below the diagonal use bilinear interpolation;
    /// diagonal cells are triangles and use barycentric weights.
    pub fn eval(&self, x: T, t: T) -> Mat2<T> {
        let nt = T::from_index(self.n);
        let s = (x * nt).max(T::zero()).min(nt);
        let u = (t * nt).max(T::zero()).min(s);
        let i = s.floor().to_usize().unwrap_or(0).min(self.n - 1);
        let j = u.floor().to_usize().unwrap_or(0).min(i);
        let fs = s - T::from_index(i);
        let fu = u - T::from_index(j);
        if j == i {
            let fu = fu.min(fs);
            self.get(i, i).scale_real(T::one() - fs)
                + self.get(i + 1, i).scale_real(fs - fu)
                + self.get(i + 1, i + 1).scale_real(fu)
        } else {
            let a = self.get(i, j).scale_real((T::one() - fs) * (T::one() - fu));
            let b = self.get(i + 1, j).scale_real(fs * (T::one() - fu));
            let c = self.get(i, j + 1).scale_real((T::one() - fs) * fu);
            let d = self.get(i + 1, j + 1).scale_real(fs * fu);
            a + b + c + d
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|m| m.max_abs()).fold(T::zero(), T::max)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_grid(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_grid(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|m| m.scale(c)).collect(),
        }
    }

    /// Mixed `X₁,p` / `X∞,p` norm with the grid maximum in place of the
    /// essential supremum.
    pub fn x_norm(&self, family: XFamily, p: PNorm<T>) -> T {
        let h = self.step();
        let n = self.n;
        let Some(q) = p.finite() else {
            return self.max_abs();
        };
        let mut best = T::zero();
        match family {
            XFamily::Infinity => {
                for i in 1..=n {
                    let row = self.row(i);
                    let mut acc = T::zero();
                    for (l, m) in row.iter().enumerate() {
                        acc += trap_weight(i, l, h) * pow_abs(m.norm_pconj_to_inf(Some(q)), q);
                    }
                    best = best.max(acc);
                }
            }
            XFamily::One => {
                for j in 0..n {
                    let mut acc = T::zero();
                    for i in j..=n {
                        let w = if i == j || i == n { h * T::lit(0.5) } else { h };
                        acc += w * pow_abs(self.get(i, j).norm_1_to_p(Some(q)), q);
                    }
                    best = best.max(acc);
                }
            }
        }
        best.powf(T::one() / q)
    }

    /// Kernel composition `(N1 ∗ N2)(x,t) = ∫_t^x N1(x,ξ) N2(ξ,t) dξ` by trapezoid.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_grid(self.n, other.n)?;
        Ok(self.product(other, false))
    }

    /// Kernel of the product of the discrete Volterra operators `𝓝₁𝓝₂`.  It
    /// differs from [`compose`](Self::compose) by the diagonal node term and by
    /// the weightless node `(0, 0)` in the first column.
    fn operator_product(&self, other: &Self) -> Self {
        self.product(other, true)
    }

    fn product(&self, other: &Self, operator_form: bool) -> Self {
        let n = self.n;
        let h = self.step();
        let half = h * T::lit(0.5);
        let mut out = Self::zeros(n).expect("grid size already validated");
        for i in 1..=n {
            let row = self.row(i);
            let out_row = out.row_mut(i);
            for (j, slot) in out_row.iter_mut().enumerate().take(i) {
                let mut acc = if operator_form && j == 0 {
                    Mat2::zero()
                } else {
                    (row[j] * other.get(j, j)).scale_real(half)
                };
                for (m, nm) in row.iter().enumerate().take(i).skip(j + 1) {
                    acc += (*nm * other.get(m, j)).scale_real(h);
                }
                acc += (row[i] * other.get(i, j)).scale_real(half);
                *slot = acc;
            }
            if operator_form {
                out_row[i] = (row[i] * other.get(i, i)).scale_real(half);
            }
        }
        out
    }

    /// `f + ∫_0^x K(x,t) f(t) dt` by trapezoid.
    pub fn apply_identity_plus(&self, f: &SampledVector<T>) -> Result<SampledVector<T>> {
        check_grid(self.n, f.grid_size())?;
        let h = self.step();
        let values = (0..=self.n)
            .map(|i| {
                let mut acc = f.at(i);
                for (l, m) in self.row(i).iter().enumerate() {
                    let w = trap_weight(i, l, h);
                    if w > T::zero() {
                        let v = m.mul_vec(&f.at(l));
                        acc[0] += v[0] * w;
                        acc[1] += v[1] * w;
                    }
                }
                acc
            })
            .collect();
        SampledVector::new(values)
    }

    /// Resolvent kernel `S` of `(I + 𝓝)⁻¹ = I + 𝓢` by the Neumann series
    /// `S = Σ_{k≥1} (−1)^k N^{∗k}`.
    ///
    /// The products are those of the discrete trapezoid operators, so the
    /// returned kernel inverts [`apply_identity_plus`](Self::apply_identity_plus)
    /// up to the reported residual `‖N + S + N∗S‖_{X∞,1}`.
    pub fn resolvent(&self, max_iter: usize, tol: T) -> Result<Resolvent<T>> {
        let neg_one = Complex::new(-T::one(), T::zero());
        let mut term = self.scale(neg_one);
        let mut sum = term.clone();
        let mut last = T::infinity();
        for iter in 1..=max_iter {
            let next = self.operator_product(&term).scale(neg_one);
            last = next.x_norm(XFamily::Infinity, PNorm::one());
            if last < tol * T::lit(0.1) || last == T::zero() {
                let residual = self.resolvent_residual(&sum);
                if residual < tol {
                    return Ok(Resolvent {
                        kernel: sum,
                        residual,
                        iterations: iter,
                    });
                }
            }
            sum = sum.add(&next)?;
            term = next;
        }
        Err(DiracError::IterationLimit {
            stage: "resolvent kernel",
            max_iter,
            residual: last.as_f64(),
        })
    }

    /// `‖N + S + N∗S‖_{X∞,1}` with the discrete operator product.
    pub fn resolvent_residual(&self, s: &Self) -> T {
        let ns = self.operator_product(s);
        let mut out = Self::zeros(self.n).expect("grid size already validated");
        for (k, slot) in out.data.iter_mut().enumerate() {
            *slot = self.data[k] + s.data[k] + ns.data[k];
        }
        out.x_norm(XFamily::Infinity, PNorm::one())
    }
}

/// Output of [`TriangularKernel::resolvent`].
#[derive(Clone, Debug)]
pub struct Resolvent<T> {
    pub kernel: TriangularKernel<T>,
    pub residual: T,
    pub iterations: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cone, creal};

    #[test]
    fn conjugate_exponents() {
        assert_eq!(PNorm::<f64>::one().conjugate(), PNorm::Infinity);
        assert_eq!(PNorm::<f64>::two().conjugate(), PNorm::two());
        assert_eq!(PNorm::<f64>::Infinity.conjugate(), PNorm::one());
        assert!(PNorm::new(0.5f64).is_err());
        assert_eq!(PNorm::new(f64::INFINITY).unwrap(), PNorm::Infinity);
    }

    #[test]
    fn node_evaluation_is_exact() {
        let f = SampledFunction::<f64>::from_fn(7, |x| Complex::new(x.sin(), x * x)).unwrap();
        for i in 0..=7 {
            assert_eq!(f.eval(i as f64 / 7.0), f.sample(i));
        }
    }

    #[test]
    fn too_small_grid_rejected() {
        assert!(SampledFunction::<f64>::new(vec![cone(), cone()]).is_err());
        assert!(TriangularKernel::<f64>::zeros(1).is_err());
    }

    #[test]
    fn triangular_eval_reproduces_linear_kernel() {
        let k = TriangularKernel::<f64>::from_fn(10, |x, t| {
            Mat2::unit(1, 0, creal(2.0 * x - 3.0 * t + 1.0))
        })
        .unwrap();
        for &(x, t) in &[(0.33, 0.12), (0.57, 0.55), (0.91, 0.0), (1.0, 1.0)] {
            let v = k.eval(x, t).get(1, 0);
            assert!((v - creal(2.0 * x - 3.0 * t + 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    #[should_panic(expected = "outside the triangular domain")]
    fn lookup_above_diagonal_panics() {
        let k = TriangularKernel::<f64>::zeros(4).unwrap();
        let _ = k.get(1, 2);
    }

    #[test]
    fn f32_instantiation() {
        let f = SampledFunction::<f32>::from_fn(64, |_| Complex::new(1.0f32, 0.0)).unwrap();
        assert!((f.lp_norm(PNorm::two()) - 1.0).abs() < 1e-6);
        let k = TriangularKernel::<f32>::from_fn(16, |_, _| Mat2::unit(0, 0, cone())).unwrap();
        assert!((k.x_norm(XFamily::Infinity, PNorm::one()) - 1.0).abs() < 1e-6);
    }
}
