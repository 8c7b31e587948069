//! Ordinary and maximal Fourier transforms of grid functions and the
//! Bessel-type sums over eigenvalue sequences.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{DiracError, Result};
use crate::gridfn::{trap_weight, PNorm, SampledFunction};
use crate::ode::DiracSystem;
use crate::scalar::{czero, expi, Real};

/// `F[g](λ) = ∫_0^1 g(t) e^{iλt} dt` by trapezoid.
pub fn fourier<T: Real>(g: &SampledFunction<T>, lambda: Complex<T>) -> Complex<T> {
    let n = g.grid_size();
    let h = g.step();
    g.samples()
        .iter()
        .enumerate()
        .map(|(i, v)| *v * expi(lambda * g.node(i)) * trap_weight(n, i, h))
        .fold(czero(), |a, b| a + b)
}

/// Cumulative trapezoid values `∫_0^{x_i} g(t) e^{iλt} dt`, `i = 0..=N`.
pub fn cumulative_fourier<T: Real>(g: &SampledFunction<T>, lambda: Complex<T>) -> Vec<Complex<T>> {
    let h = g.step();
    let half = h * T::lit(0.5);
    let mut prev = g.sample(0);
    let mut acc = czero();
    let mut out = Vec::with_capacity(g.grid_size() + 1);
    out.push(acc);
    for i in 1..=g.grid_size() {
        let cur = g.sample(i) * expi(lambda * g.node(i));
        acc += (prev + cur) * half;
        out.push(acc);
        prev = cur;
    }
    out
}

/// Maximal transform `𝓕[g](λ) = max_{x_i} |∫_0^{x_i} g(t) e^{iλt} dt|`.
pub fn maximal_fourier<T: Real>(g: &SampledFunction<T>, lambda: Complex<T>) -> T {
    cumulative_fourier(g, lambda)
        .iter()
        .map(|v| v.norm())
        .fold(T::zero(), T::max)
}

/// `𝓕_k(x, λ) = sup_{s ≤ x} |∫_0^s Q_{jk}(t) e^{i(b_k − b_j)λt} dt|`, `j ≠ k`,
/// with the supremum taken over grid nodes `s ≤ x`.
pub fn s_fk<T: Real>(sys: &DiracSystem<T>, x: T, lambda: Complex<T>, k: usize) -> Result<T> {
    if !(k == 1 || k == 2) {
        return Err(DiracError::InvalidArgument(format!("k must be 1 or 2, got {k}")));
    }
    let j = 3 - k;
    let q = sys.q(j, k);
    let cum = cumulative_fourier(q, lambda * (sys.b(k) - sys.b(j)));
    let n = q.grid_size();
    let x = x.max(T::zero()).min(T::one());
    let s = x * T::from_index(n) * (T::one() + T::epsilon() * T::lit(16.0));
    let last = s.floor().to_usize().unwrap_or(0).min(n);
    Ok(cum
        .iter()
        .take(last + 1)
        .map(|v| v.norm())
        .fold(T::zero(), T::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselReport<T> {
    pub sum: T,
    /// `‖g‖_p^{p'}` for unweighted sums, `‖g‖_p^p` for weighted sums.
    pub norm_ref: T,
    /// `sum / norm_ref`, or zero when `norm_ref` vanishes.
    pub ratio: T,
    pub weighted: bool,
    pub p: PNorm<T>,
}

/// `Σ_n 𝓕[g](μ_n)^{p'}` or `Σ_n (1+|n|)^{p−2} 𝓕[g](μ_n)^p` over `seq = {(n, μ_n)}`;
/// with `use_maximal = false` the ordinary transform replaces `𝓕`.
pub fn bessel_sum<T: Real>(
    g: &SampledFunction<T>,
    seq: &[(i64, Complex<T>)],
    p: PNorm<T>,
    weighted: bool,
    use_maximal: bool,
) -> Result<BesselReport<T>> {
    let pv = match p.finite() {
        Some(pv) if pv > T::one() && pv <= T::lit(2.0) => pv,
        _ => {
            return Err(DiracError::ExponentOutOfRange {
                p: p.value().as_f64(),
                range: "(1, 2]",
            })
        }
    };
    let pc = pv / (pv - T::one());
    let terms: Vec<T> = seq
        .par_iter()
        .map(|(n, mu)| {
            let f = if use_maximal {
                maximal_fourier(g, *mu)
            } else {
                fourier(g, *mu).norm()
            };
            if weighted {
                let w = (T::one() + T::from_i64(n.abs()).expect("index fits")).powf(pv - T::lit(2.0));
                w * f.powf(pv)
            } else {
                f.powf(pc)
            }
        })
        .collect();
    let sum = terms.into_iter().fold(T::zero(), |a, b| a + b);
    let norm = g.lp_norm(p);
    let norm_ref = if weighted { norm.powf(pv) } else { norm.powf(pc) };
    let ratio = if norm_ref > T::zero() { sum / norm_ref } else { T::zero() };
    Ok(BesselReport {
        sum,
        norm_ref,
        ratio,
        weighted,
        p,
    })
}
