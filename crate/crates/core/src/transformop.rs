//! Transformation-operator kernels `R`, `P±`, `K±` and the reconstruction of
//! solutions and characteristic determinants from them.

use std::io::{Read, Write};

use num_complex::Complex;

use crate::boundary::{delta0_minors, BoundaryConditions};
use crate::error::{DiracError, Result};
use crate::gridfn::{
    lp_norm_components, trap_weight, PNorm, SampledFunction, SampledVector, TriangularKernel,
    XFamily,
};
use crate::mat2::{Mat2, Vec2};
use crate::ode::{DiracSystem, Sign};
use crate::scalar::{czero, expi, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions<T> {
    pub max_iter: usize,
    pub tol: T,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: T::lit(1e-10),
        }
    }
}

/// Kernel `R` with its certified equation residual.
#[derive(Clone, Debug)]
pub struct RSolution<T> {
    pub kernel: TriangularKernel<T>,
    /// `max(‖T(R) − R‖_{X∞,1}, max node |T(R) − R|)` where `T` is the right-hand
    /// side of the kernel equations.
    pub residual: T,
    pub sweeps: usize,
}

struct REquations<'a, T> {
    sys: &'a DiracSystem<T>,
    n: usize,
    h: T,
    /// `Q_{12}` and `Q_{21}` at the grid nodes.
    qn: [Vec<Complex<T>>; 2],
}

impl<'a, T: Real> REquations<'a, T> {
    fn new(sys: &'a DiracSystem<T>, n: usize) -> Self {
        let h = T::one() / T::from_index(n);
        let nodes = |f: &SampledFunction<T>| {
            (0..=n)
                .map(|m| f.eval(T::from_index(m) * h))
                .collect::<Vec<_>>()
        };
        Self {
            sys,
            n,
            h,
            qn: [nodes(sys.q12()), nodes(sys.q21())],
        }
    }

    /// `Q_{jk}` with zero-based `j ≠ k`.
    fn q(&self, j: usize) -> &SampledFunction<T> {
        if j == 0 {
            self.sys.q12()
        } else {
            self.sys.q21()
        }
    }

    fn diag_interp(r: &TriangularKernel<T>, k: usize, s: T, n: usize) -> Complex<T> {
        let m = s.floor().to_usize().unwrap_or(0);
        if m >= n {
            return r.get(n, n).m[k][k];
        }
        let fr = s - T::from_index(m);
        r.get(m, m).m[k][k] * (T::one() - fr) + r.get(m + 1, m + 1).m[k][k] * fr
    }

    fn row_interp(r: &TriangularKernel<T>, k: usize, m: usize, u: T) -> Complex<T> {
        let u = u.max(T::zero()).min(T::from_index(m));
        let l0 = u.floor().to_usize().unwrap_or(0).min(m);
        if l0 == m {
            return r.get(m, m).m[k][k];
        }
        let fr = u - T::from_index(l0);
        r.get(m, l0).m[k][k] * (T::one() - fr) + r.get(m, l0 + 1).m[k][k] * fr
    }

    /// Right-hand side of the `R_{jk}` equation at node `(i, l)`, zero-based `k`.
    fn rjk(&self, r: &TriangularKernel<T>, i: usize, l: usize, k: usize) -> Complex<T> {
        let j = 1 - k;
        let sys = self.sys;
        let (kk, jj) = (k + 1, j + 1);
        let (ak, aj) = (sys.a(kk), sys.a(jj));
        let (alk, alj) = (sys.alpha(kk), sys.alpha(jj));
        let iu = Complex::<T>::i();
        let it = T::from_index(i);
        let lt = T::from_index(l);
        let sd = (alk * it + alj * lt).min(it);
        let explicit = iu / (ak - aj) * self.q(j).eval_scaled(sd);
        if l == i {
            return explicit;
        }
        let gamma = sys.gamma(kk);
        let qjk = &self.qn[j];
        let mut prev_pos = sd;
        let mut prev_f = self.q(j).eval_scaled(sd) * Self::diag_interp(r, k, sd, self.n);
        let mut acc = czero::<T>();
        let start = sd.floor().to_usize().unwrap_or(0) + 1;
        for m in start..=i {
            let mt = T::from_index(m);
            let u = gamma * (mt - it) + lt;
            let f = qjk[m] * Self::row_interp(r, k, m, u);
            acc += (prev_f + f) * ((mt - prev_pos) * T::lit(0.5));
            prev_pos = mt;
            prev_f = f;
        }
        explicit - iu * sys.b(jj) * self.h * acc
    }

    /// Integrand `−i b_k Q_{kj}(x_m) R_{jk}(x_m, t_l)` of the `R_{kk}` equation.
    fn rkk_integrand(&self, r: &TriangularKernel<T>, m: usize, l: usize, k: usize) -> Complex<T> {
        let j = 1 - k;
        -Complex::<T>::i() * self.sys.b(k + 1) * self.qn[k][m] * r.get(m, l).m[j][k]
    }

    fn initial(&self) -> TriangularKernel<T> {
        let zero = TriangularKernel::zeros(self.n).expect("grid size validated");
        let mut out = zero.clone();
        for i in 0..=self.n {
            for l in 0..=i {
                let mut m = Mat2::zero();
                for k in 0..2 {
                    m.m[1 - k][k] = self.rjk(&zero, i, l, k);
                }
                out.set(i, l, m);
            }
        }
        out
    }

    /// One Gauss–Seidel sweep in increasing `x`.
    fn sweep(&self, r: &mut TriangularKernel<T>) {
        let half_h = self.h * T::lit(0.5);
        let mut off = vec![[czero::<T>(); 2]; self.n + 1];
        for i in 0..=self.n {
            for (l, slot) in off.iter_mut().enumerate().take(i + 1) {
                for k in 0..2 {
                    slot[k] = self.rjk(r, i, l, k);
                }
            }
            for (l, slot) in off.iter().enumerate().take(i + 1) {
                let mut m = r.get(i, l);
                m.m[1][0] = slot[0];
                m.m[0][1] = slot[1];
                r.set(i, l, m);
            }
            for l in 0..=i {
                let mut m = r.get(i, l);
                for k in 0..2 {
                    m.m[k][k] = if l == 0 {
                        czero()
                    } else {
                        r.get(i - 1, l - 1).m[k][k]
                            + (self.rkk_integrand(r, i - 1, l - 1, k)
                                + self.rkk_integrand(r, i, l, k))
                                * half_h
                    };
                }
                r.set(i, l, m);
            }
        }
    }

    /// `T(R)` evaluated with `R` held fixed on both sides.
    fn apply(&self, r: &TriangularKernel<T>) -> TriangularKernel<T> {
        let mut out = TriangularKernel::zeros(self.n).expect("grid size validated");
        for i in 0..=self.n {
            for l in 0..=i {
                let mut m = Mat2::zero();
                for k in 0..2 {
                    m.m[1 - k][k] = self.rjk(r, i, l, k);
                    let mut acc = czero::<T>();
                    for s in 0..=l {
                        let w = if s == 0 || s == l { T::lit(0.5) } else { T::one() };
                        acc += self.rkk_integrand(r, i - l + s, s, k) * w;
                    }
                    m.m[k][k] = if l == 0 { czero() } else { acc * self.h };
                }
                out.set(i, l, m);
            }
        }
        out
    }

    fn residual(&self, r: &TriangularKernel<T>) -> T {
        let diff = self.apply(r).sub(r).expect("same grid");
        diff.x_norm(XFamily::Infinity, PNorm::one())
            .max(diff.max_abs())
    }
}

/// Solves the coupled kernel equations for `R` by Gauss–Seidel sweeps.
pub fn solve_r<T: Real>(
    sys: &DiracSystem<T>,
    n: usize,
    opts: SolveOptions<T>,
) -> Result<RSolution<T>> {
    if n < 8 {
        return Err(DiracError::GridTooSmall { min: 8, actual: n });
    }
    let eq = REquations::new(sys, n);
    let mut r = eq.initial();
    let mut last = T::infinity();
    for sweep in 1..=opts.max_iter {
        let before = r.clone();
        eq.sweep(&mut r);
        let change = r.sub(&before)?;
        last = change
            .x_norm(XFamily::Infinity, PNorm::one())
            .max(change.max_abs());
        if last < opts.tol {
            let residual = eq.residual(&r);
            if residual < opts.tol {
                return Ok(RSolution {
                    kernel: r,
                    residual,
                    sweeps: sweep,
                });
            }
            last = residual;
        }
    }
    Err(DiracError::IterationLimit {
        stage: "kernel R",
        max_iter: opts.max_iter,
        residual: last.as_f64(),
    })
}

/// Residual of the `R` equations for an arbitrary candidate kernel.
pub fn r_equation_residual<T: Real>(sys: &DiracSystem<T>, r: &TriangularKernel<T>) -> T {
    REquations::new(sys, r.grid_size()).residual(r)
}

/// Pointwise residual kernel `T(R) − R` of the `R` equations.
pub fn r_equation_defect<T: Real>(
    sys: &DiracSystem<T>,
    r: &TriangularKernel<T>,
) -> TriangularKernel<T> {
    let eq = REquations::new(sys, r.grid_size());
    eq.apply(r).sub(r).expect("same grid")
}

/// `diag(P1, P2)` sampled as a function of `x − t`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalFunction<T> {
    pub p1: SampledFunction<T>,
    pub p2: SampledFunction<T>,
}

impl<T: Real> DiagonalFunction<T> {
    pub fn at(&self, i: usize) -> Mat2<T> {
        Mat2::diag(self.p1.sample(i), self.p2.sample(i))
    }

    pub fn sup(&self) -> T {
        self.p1.sup().max(self.p2.sup())
    }
}

/// `P±` with the residuals of their Volterra systems.
#[derive(Clone, Debug)]
pub struct PSolution<T> {
    pub plus: DiagonalFunction<T>,
    pub minus: DiagonalFunction<T>,
    pub residual_plus: T,
    pub residual_minus: T,
}

/// Solves the second-kind Volterra systems for `P±` by forward substitution.
pub fn solve_p<T: Real>(r: &TriangularKernel<T>, sys: &DiracSystem<T>) -> Result<PSolution<T>> {
    let (plus, residual_plus) = solve_p_sign(r, sys, Sign::Plus)?;
    let (minus, residual_minus) = solve_p_sign(r, sys, Sign::Minus)?;
    Ok(PSolution {
        plus,
        minus,
        residual_plus,
        residual_minus,
    })
}

fn solve_p_sign<T: Real>(
    r: &TriangularKernel<T>,
    sys: &DiracSystem<T>,
    sign: Sign,
) -> Result<(DiagonalFunction<T>, T)> {
    let n = r.grid_size();
    let h = r.step();
    let s: T = sign.value();
    let (a1, a2) = (sys.a(1), sys.a(2));
    let rhs: Vec<Vec2<T>> = (0..=n)
        .map(|i| {
            let r0 = r.get(i, 0);
            [r0.m[0][1] * (-s * a2), r0.m[1][0] * (-a1)]
        })
        .collect();
    let mut u: Vec<Vec2<T>> = Vec::with_capacity(n + 1);
    u.push(rhs[0]);
    for i in 1..=n {
        let row = r.row(i);
        let mut acc = rhs[i];
        for (l, ul) in u.iter().enumerate() {
            let v = row[l].mul_vec(ul);
            let w = trap_weight(i, l, h);
            acc[0] -= v[0] * w;
            acc[1] -= v[1] * w;
        }
        let lhs = Mat2::identity() + row[i].scale_real(h * T::lit(0.5));
        let inv = lhs.inverse().ok_or_else(|| {
            DiracError::InvalidArgument(format!("singular Volterra diagonal block at node {i}"))
        })?;
        u.push(inv.mul_vec(&acc));
    }
    let mut residual = T::zero();
    for i in 0..=n {
        let row = r.row(i);
        let mut lhs = u[i];
        for (l, ul) in u.iter().enumerate().take(i + 1) {
            let v = row[l].mul_vec(ul);
            let w = trap_weight(i, l, h);
            lhs[0] += v[0] * w;
            lhs[1] += v[1] * w;
        }
        residual = residual
            .max((lhs[0] - rhs[i][0]).norm())
            .max((lhs[1] - rhs[i][1]).norm());
    }
    let p1 = SampledFunction::new(u.iter().map(|v| v[0] / a1).collect())?;
    let p2 = SampledFunction::new(u.iter().map(|v| v[1] * s / a2).collect())?;
    Ok((DiagonalFunction { p1, p2 }, residual))
}

/// `K(x,t) = R(x,t) + P(x−t) + ∫_t^x R(x,s) P(s−t) ds` by trapezoid.
pub fn assemble_k<T: Real>(
    r: &TriangularKernel<T>,
    p: &DiagonalFunction<T>,
) -> Result<TriangularKernel<T>> {
    let n = r.grid_size();
    if p.p1.grid_size() != n {
        return Err(DiracError::GridMismatch {
            left: n,
            right: p.p1.grid_size(),
        });
    }
    let h = r.step();
    let half = h * T::lit(0.5);
    TriangularKernel::from_index_fn(n, |i, l| {
        let row = r.row(i);
        let mut acc = row[l] + p.at(i - l);
        if i > l {
            acc += (row[l] * p.at(0)).scale_real(half);
            for (m, rm) in row.iter().enumerate().take(i).skip(l + 1) {
                acc += (*rm * p.at(m - l)).scale_real(h);
            }
            acc += (row[i] * p.at(i - l)).scale_real(half);
        }
        acc
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelResiduals<T> {
    pub r: T,
    pub p_plus: T,
    pub p_minus: T,
    /// `max_x |K±(x,0) B⁻¹ (1, ±1)ᵀ|` over both signs.
    pub boundary: T,
}

/// All transformation-operator kernels of one system on one grid.
#[derive(Clone, Debug)]
pub struct KernelSet<T> {
    pub b1: T,
    pub b2: T,
    pub r: TriangularKernel<T>,
    pub p_plus: DiagonalFunction<T>,
    pub p_minus: DiagonalFunction<T>,
    pub k_plus: TriangularKernel<T>,
    pub k_minus: TriangularKernel<T>,
    pub residuals: KernelResiduals<T>,
}

impl<T: Real> KernelSet<T> {
    pub fn build(sys: &DiracSystem<T>, n: usize, opts: SolveOptions<T>) -> Result<Self> {
        let r = solve_r(sys, n, opts)?;
        let p = solve_p(&r.kernel, sys)?;
        let k_plus = assemble_k(&r.kernel, &p.plus)?;
        let k_minus = assemble_k(&r.kernel, &p.minus)?;
        let boundary = boundary_defect(&k_plus, sys, Sign::Plus)
            .max(boundary_defect(&k_minus, sys, Sign::Minus));
        Ok(Self {
            b1: sys.b1(),
            b2: sys.b2(),
            r: r.kernel,
            p_plus: p.plus,
            p_minus: p.minus,
            k_plus,
            k_minus,
            residuals: KernelResiduals {
                r: r.residual,
                p_plus: p.residual_plus,
                p_minus: p.residual_minus,
                boundary,
            },
        })
    }

    pub fn grid_size(&self) -> usize {
        self.r.grid_size()
    }

    pub fn k(&self, sign: Sign) -> &TriangularKernel<T> {
        match sign {
            Sign::Plus => &self.k_plus,
            Sign::Minus => &self.k_minus,
        }
    }

    pub fn combos(&self) -> ComboKernels<T> {
        combos(&self.k_plus, &self.k_minus).expect("kernels share a grid")
    }

    /// `e_±(x,λ) = e⁰_±(x,λ) + ∫_0^x K±(x,t) e⁰_±(t,λ) dt`.
    pub fn reconstruct_e(&self, sign: Sign, lambda: Complex<T>) -> SampledVector<T> {
        let n = self.grid_size();
        let s = sign.complex::<T>();
        let (b1, b2) = (self.b1, self.b2);
        let e0 = SampledVector::from_fn(n, |x| [expi(lambda * b1 * x), s * expi(lambda * b2 * x)])
            .expect("grid size validated");
        self.k(sign)
            .apply_identity_plus(&e0)
            .expect("kernels and samples share a grid")
    }
}

/// `max_x |K(x,0) B⁻¹ (1, ±1)ᵀ|`.
pub fn boundary_defect<T: Real>(k: &TriangularKernel<T>, sys: &DiracSystem<T>, sign: Sign) -> T {
    let v = [
        Complex::new(sys.a(1), T::zero()),
        Complex::new(sign.value::<T>() * sys.a(2), T::zero()),
    ];
    (0..=k.grid_size())
        .map(|i| {
            let w = k.get(i, 0).mul_vec(&v);
            w[0].norm().max(w[1].norm())
        })
        .fold(T::zero(), T::max)
}

/// Kernels `K_{jl,k} = ½(K⁺_{jl} + (−1)^{l+k} K⁻_{jl})`; `by_k[k−1]` holds the
/// matrix `(K_{jl,k})_{j,l}`.
#[derive(Clone, Debug)]
pub struct ComboKernels<T> {
    pub by_k: [TriangularKernel<T>; 2],
}

impl<T: Real> ComboKernels<T> {
    /// `K_{jl,k}` at node `(i, m)`, one-based `j, l, k`.
    pub fn entry(&self, j: usize, l: usize, k: usize, i: usize, m: usize) -> Complex<T> {
        self.by_k[k - 1].get(i, m).m[j - 1][l - 1]
    }

    pub fn grid_size(&self) -> usize {
        self.by_k[0].grid_size()
    }

    /// `φ_{jk}(x_i, λ) = δ_{jk} e^{i b_k λ x} + Σ_l ∫_0^x K_{jl,k}(x,t) e^{i b_l λ t} dt`.
    pub fn reconstruct_phi(&self, b1: T, b2: T, lambda: Complex<T>) -> Vec<Mat2<T>> {
        let n = self.grid_size();
        let e0 = SampledVector::from_fn(n, |x| [expi(lambda * b1 * x), expi(lambda * b2 * x)])
            .expect("grid size validated");
        let cols: Vec<SampledVector<T>> = (0..2)
            .map(|k| {
                let integral = self.by_k[k]
                    .apply_identity_plus(&e0)
                    .expect("same grid")
                    .sub(&e0)
                    .expect("same grid");
                let mut vals = integral.values().to_vec();
                for (i, v) in vals.iter_mut().enumerate() {
                    v[k] += e0.at(i)[k];
                }
                SampledVector::new(vals).expect("grid size validated")
            })
            .collect();
        (0..=n)
            .map(|i| {
                let (c1, c2) = (cols[0].at(i), cols[1].at(i));
                Mat2::new(c1[0], c2[0], c1[1], c2[1])
            })
            .collect()
    }
}

pub fn combos<T: Real>(
    k_plus: &TriangularKernel<T>,
    k_minus: &TriangularKernel<T>,
) -> Result<ComboKernels<T>> {
    let n = k_plus.grid_size();
    if k_minus.grid_size() != n {
        return Err(DiracError::GridMismatch {
            left: n,
            right: k_minus.grid_size(),
        });
    }
    let half = T::lit(0.5);
    let build = |k: usize| {
        TriangularKernel::from_index_fn(n, |i, m| {
            let (kp, km) = (k_plus.get(i, m), k_minus.get(i, m));
            let mut out = Mat2::zero();
            for j in 0..2 {
                for l in 0..2 {
                    let sign = if (l + k) % 2 == 0 { T::one() } else { -T::one() };
                    out.m[j][l] = (kp.m[j][l] + km.m[j][l] * sign) * half;
                }
            }
            out
        })
    };
    Ok(ComboKernels {
        by_k: [build(0)?, build(1)?],
    })
}

/// `Δ_Q(λ) = Δ₀(λ) + ∫_0^1 g₁(t) e^{i b1 λ t} dt + ∫_0^1 g₂(t) e^{i b2 λ t} dt`.
pub fn det_via_kernels<T: Real>(
    bc: &BoundaryConditions<T>,
    combos: &ComboKernels<T>,
    b1: T,
    b2: T,
    lambda: Complex<T>,
) -> Complex<T> {
    let m = bc.minors();
    let n = combos.grid_size();
    let h = T::one() / T::from_index(n);
    let mut out = delta0_minors(&m, b1, b2, lambda);
    for (l, bl) in [(1usize, b1), (2usize, b2)] {
        for t in 0..=n {
            let g = m.j(3, 2) * combos.entry(1, l, 1, n, t)
                + m.j(4, 2) * combos.entry(2, l, 1, n, t)
                + m.j(1, 3) * combos.entry(1, l, 2, n, t)
                + m.j(1, 4) * combos.entry(2, l, 2, n, t);
            let x = T::from_index(t) * h;
            out += g * expi(lambda * bl * x) * trap_weight(n, t, h);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelDeviation<T> {
    /// `max_± ‖K± − K̃±‖_{X∞,p}`.
    pub x_inf: T,
    /// `max_± ‖K± − K̃±‖_{X₁,p}`.
    pub x_one: T,
    /// `‖Q − Q̃‖_p`.
    pub q: T,
}

pub fn kernel_deviation_norms<T: Real>(
    sys: &DiracSystem<T>,
    other: &DiracSystem<T>,
    p: PNorm<T>,
    n: usize,
    opts: SolveOptions<T>,
) -> Result<KernelDeviation<T>> {
    let k = KernelSet::build(sys, n, opts)?;
    let kt = KernelSet::build(other, n, opts)?;
    kernel_deviation_between(&k, &kt, sys, other, p)
}

/// Deviation norms for already constructed kernel sets.
pub fn kernel_deviation_between<T: Real>(
    k: &KernelSet<T>,
    kt: &KernelSet<T>,
    sys: &DiracSystem<T>,
    other: &DiracSystem<T>,
    p: PNorm<T>,
) -> Result<KernelDeviation<T>> {
    let dp = k.k_plus.sub(&kt.k_plus)?;
    let dm = k.k_minus.sub(&kt.k_minus)?;
    let n = k.grid_size();
    let d12 = sys.q12().resample(n)?.sub(&other.q12().resample(n)?)?;
    let d21 = sys.q21().resample(n)?.sub(&other.q21().resample(n)?)?;
    Ok(KernelDeviation {
        x_inf: dp
            .x_norm(XFamily::Infinity, p)
            .max(dm.x_norm(XFamily::Infinity, p)),
        x_one: dp.x_norm(XFamily::One, p).max(dm.x_norm(XFamily::One, p)),
        q: lp_norm_components(&[&d12, &d21], p),
    })
}

/// Writes a kernel as `u64 N`, `u64 entry count`, then the complex entries of
/// every node matrix in row-major order (`x` rows, then `t`, then matrix rows and
/// columns), each as little-endian `f64` real and imaginary parts.
pub fn write_kernel<W: Write>(k: &TriangularKernel<f64>, mut w: W) -> std::io::Result<()> {
    let n = k.grid_size() as u64;
    let count = (k.data().len() * 4) as u64;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&count.to_le_bytes())?;
    for m in k.data() {
        for row in &m.m {
            for v in row {
                w.write_all(&v.re.to_le_bytes())?;
                w.write_all(&v.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_kernel<R: Read>(mut r: R) -> std::io::Result<TriangularKernel<f64>> {
    let invalid = |msg: String| std::io::Error::new(std::io::ErrorKind::InvalidData, msg);
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let count = u64::from_le_bytes(word) as usize;
    let nodes = (n + 1) * (n + 2) / 2;
    if count != 4 * nodes {
        return Err(invalid(format!(
            "entry count {count} inconsistent with N = {n}"
        )));
    }
    let mut data = Vec::with_capacity(nodes);
    let mut next = || -> std::io::Result<f64> {
        r.read_exact(&mut word)?;
        Ok(f64::from_le_bytes(word))
    };
    for _ in 0..nodes {
        let mut m = Mat2::zero();
        for row in m.m.iter_mut() {
            for v in row.iter_mut() {
                *v = Complex::new(next()?, next()?);
            }
        }
        data.push(m);
    }
    TriangularKernel::from_data(n, data).map_err(|e| invalid(e.to_string()))
}
