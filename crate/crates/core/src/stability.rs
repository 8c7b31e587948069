//! Stability experiments: eigenvalue and eigenfunction deviation reports for
//! pairs of potentials, and batches of such reports over random potentials
//! drawn from an `L^p` ball.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::boundary::{BoundaryConditions, Canonical};
use crate::error::{DiracError, Result};
use crate::gridfn::{lp_norm_components, PNorm, SampledFunction, SampledVector};
use crate::ode::{fundamental_matrix, DiracSystem};
use crate::potential::{spline, step, trig};
use crate::scalar::{cone, expi, Real};
use crate::spectrum::{zeros_delta_q, DeltaQ, SpectrumOptions, SpectrumWindow};
use crate::transformop::{kernel_deviation_between, KernelSet, SolveOptions};

const VANISHING_NORM: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialFamily {
    /// Trigonometric polynomials with `modes` positive frequencies.
    Trig { modes: usize },
    /// Step functions with `pieces` random constant pieces.
    Step { pieces: usize },
    /// Catmull-Rom splines through `knots` random values.
    Spline { knots: usize },
}

/// Random potentials `Q` with `‖Q‖_p ≤ r`, sampled on a grid with `grid` cells.
///
/// Sample `i` depends only on `(seed, i)`.  Its norm is drawn uniformly from
/// `[r/2, r]` and imposed by rescaling after generation.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialBallSampler<T> {
    pub p: PNorm<T>,
    pub r: T,
    pub seed: u64,
    pub family: PotentialFamily,
    pub grid: usize,
}

impl<T: Real> PotentialBallSampler<T> {
    pub fn new(p: PNorm<T>, r: T, seed: u64, family: PotentialFamily, grid: usize) -> Result<Self> {
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(DiracError::InvalidArgument(format!("ball radius must be finite and nonnegative, got {r}")));
        }
        let size = match family {
            PotentialFamily::Trig { modes } => modes,
            PotentialFamily::Step { pieces } => pieces,
            PotentialFamily::Spline { knots } => knots.saturating_sub(1),
        };
        if size == 0 {
            return Err(DiracError::InvalidArgument("potential family needs at least one degree of freedom".into()));
        }
        Ok(Self { p, r, seed, family, grid })
    }

    fn entry(&self, rng: &mut ChaCha8Rng) -> Result<SampledFunction<T>> {
        let mut draw = |scale: f64| {
            Complex::new(
                T::lit(rng.gen_range(-1.0..1.0) * scale),
                T::lit(rng.gen_range(-1.0..1.0) * scale),
            )
        };
        match self.family {
            PotentialFamily::Trig { modes } => {
                let coeffs: Vec<_> = (1..=modes).map(|k| draw(1.0 / k as f64)).collect();
                trig(self.grid, &coeffs)
            }
            PotentialFamily::Step { pieces } => {
                let values: Vec<_> = (0..pieces).map(|_| draw(1.0)).collect();
                let breaks: Vec<T> = (1..pieces).map(|j| T::from_index(j) / T::from_index(pieces)).collect();
                step(self.grid, &breaks, &values)
            }
            PotentialFamily::Spline { knots } => {
                let values: Vec<_> = (0..knots).map(|_| draw(1.0)).collect();
                spline(self.grid, &values)
            }
        }
    }

    /// The `index`-th potential of the stream as a system with weights `b1, b2`.
    pub fn sample(&self, index: u64, b1: T, b2: T) -> Result<DiracSystem<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let q12 = self.entry(&mut rng)?;
        let q21 = self.entry(&mut rng)?;
        let target = self.r * T::lit(0.5 + 0.5 * rng.gen::<f64>());
        let norm = lp_norm_components(&[&q12, &q21], self.p);
        let factor = if norm > T::zero() { target / norm } else { T::zero() };
        let factor = Complex::new(factor, T::zero());
        DiracSystem::new(b1, b2, q12.scale(factor), q21.scale(factor))
    }
}

/// Sums of a per-index deviation `d_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aggregates<T> {
    pub count: usize,
    /// `Σ d_n^{p'}`, or `max d_n` when `p' = ∞`.
    pub lp_conj_sum: T,
    /// `(Σ d_n^{p'})^{1/p'}`, or `max d_n` when `p' = ∞`.
    pub lp_conj_norm: T,
    /// `Σ (1+|n|)^{p−2} d_n^p`.
    pub weighted_sum: T,
    pub sup: T,
}

impl<T: Real> Aggregates<T> {
    pub fn from_values(values: impl IntoIterator<Item = (i64, T)>, p: PNorm<T>) -> Self {
        let pv = p.value();
        let mut agg = Self {
            count: 0,
            lp_conj_sum: T::zero(),
            lp_conj_norm: T::zero(),
            weighted_sum: T::zero(),
            sup: T::zero(),
        };
        let q = p.conjugate();
        for (n, d) in values {
            agg.count += 1;
            agg.sup = agg.sup.max(d);
            if let PNorm::Finite(qv) = q {
                agg.lp_conj_sum += d.powf(qv);
            }
            let w = (T::one() + T::lit(n.unsigned_abs() as f64)).powf(pv - T::lit(2.0));
            agg.weighted_sum += w * d.powf(pv);
        }
        match q {
            PNorm::Finite(qv) => agg.lp_conj_norm = agg.lp_conj_sum.powf(T::one() / qv),
            PNorm::Infinity => {
                agg.lp_conj_sum = agg.sup;
                agg.lp_conj_norm = agg.sup;
            }
        }
        agg
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviationRow<T> {
    pub n: i64,
    pub lambda: Complex<T>,
    pub lambda_tilde: Complex<T>,
    /// `|λ_n − λ̃_n|`.
    pub eigenvalue: T,
    /// `‖f_n − f̃_n‖_∞` for normalized eigenfunctions, when computed.
    pub eigenfunction: Option<T>,
    /// Set when an eigenfunction had vanishing norm and the row was skipped.
    pub eigenfunction_skipped: bool,
    /// `|Δ_{Q̃}(λ_n)|`.
    pub delta_tilde: T,
    /// Both eigenvalues of the row are winding-verified.
    pub verified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregatePair<T> {
    pub all: Aggregates<T>,
    /// Restricted to `|n| ≥ tail_start`.
    pub tail: Aggregates<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationReport<T> {
    pub p: PNorm<T>,
    pub rows: Vec<DeviationRow<T>>,
    /// Indices whose pairing is not verified for `Q` or `Q̃`.
    pub head: Vec<i64>,
    pub tail_start: i64,
    pub eigenvalue: AggregatePair<T>,
    pub eigenfunction: Option<AggregatePair<T>>,
    /// `‖Q − Q̃‖_p`.
    pub q_distance: T,
}

impl<T: Real> DeviationReport<T> {
    fn aggregate(rows: &[DeviationRow<T>], tail_start: i64, p: PNorm<T>, f: impl Fn(&DeviationRow<T>) -> Option<T>) -> AggregatePair<T> {
        let all = Aggregates::from_values(rows.iter().filter_map(|r| f(r).map(|v| (r.n, v))), p);
        let tail = Aggregates::from_values(
            rows.iter()
                .filter(|r| r.n.abs() >= tail_start)
                .filter_map(|r| f(r).map(|v| (r.n, v))),
            p,
        );
        AggregatePair { all, tail }
    }

    /// CSV with header `n,eigenvalue_dev,eigenfunction_dev,delta_tilde,verified`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,eigenvalue_dev,eigenfunction_dev,delta_tilde,verified\n");
        for r in &self.rows {
            let ef = r.eigenfunction.map(|v| format!("{v}")).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{}\n", r.n, r.eigenvalue, ef, r.delta_tilde, r.verified));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentOptions<T> {
    /// Grid for the kernel deviation in ball experiments.
    pub kernel_grid: usize,
    pub solve: SolveOptions<T>,
    pub spectrum: SpectrumOptions<T>,
    /// Norm used to normalize eigenfunctions.
    pub s_norm: PNorm<T>,
}

impl<T: Real> Default for ExperimentOptions<T> {
    fn default() -> Self {
        Self {
            kernel_grid: 256,
            solve: SolveOptions::default(),
            spectrum: SpectrumOptions::default(),
            s_norm: PNorm::Infinity,
        }
    }
}

fn q_distance<T: Real>(sys: &DiracSystem<T>, other: &DiracSystem<T>, p: PNorm<T>) -> Result<T> {
    let n = sys.grid_size().max(other.grid_size());
    let d12 = sys.q12().resample(n)?.sub(&other.q12().resample(n)?)?;
    let d21 = sys.q21().resample(n)?.sub(&other.q21().resample(n)?)?;
    Ok(lp_norm_components(&[&d12, &d21], p))
}

fn check_pair<T: Real>(sys: &DiracSystem<T>, other: &DiracSystem<T>) -> Result<()> {
    if sys.b1() != other.b1() || sys.b2() != other.b2() {
        return Err(DiracError::InvalidArgument("compared systems must share b1 and b2".into()));
    }
    Ok(())
}

/// Whether the `F`-formula (as opposed to the `G`-formula) produces the
/// eigenfunction near `λ⁰`.
fn uses_f_formula<T: Real>(c: &Canonical<T>, b1: T, b2: T, lambda0: Complex<T>) -> bool {
    if c.b.norm() > T::zero() {
        return true;
    }
    let one = cone::<T>();
    (one + c.a * expi(lambda0 * b1)).norm() >= (c.d + expi(lambda0 * b2)).norm()
}

/// Eigenfunction at an eigenvalue `λ`, normalized in `L^s`; `None` when the
/// chosen formula yields a vanishing function.
///
/// `F = (b + aφ₁₂)Φ₁ − (1 + aφ₁₁)Φ₂` satisfies the first boundary condition
/// identically, `G = (d + cφ₁₂ + φ₂₂)Φ₁ − (cφ₁₁ + φ₂₁)Φ₂` the second.
pub fn eigenfunction<T: Real>(
    sys: &DiracSystem<T>,
    c: &Canonical<T>,
    f_formula: bool,
    lambda: Complex<T>,
    grid: usize,
    s_norm: PNorm<T>,
) -> Result<Option<SampledVector<T>>> {
    let fm = fundamental_matrix(sys, lambda, grid)?;
    let phi = fm.at_end();
    let one = cone::<T>();
    let coeffs = if f_formula {
        [c.b + c.a * phi.get(0, 1), -(one + c.a * phi.get(0, 0))]
    } else {
        [c.d + c.c * phi.get(0, 1) + phi.get(1, 1), -(c.c * phi.get(0, 0) + phi.get(1, 0))]
    };
    let f = fm.apply(coeffs);
    let norm = f.lp_norm(s_norm);
    if !(norm > T::lit(VANISHING_NORM)) {
        return Ok(None);
    }
    Ok(Some(f.scale(Complex::new(T::one() / norm, T::zero()))))
}

fn deviation_from_windows<T: Real>(
    sys: &DiracSystem<T>,
    other: &DiracSystem<T>,
    bc: &BoundaryConditions<T>,
    w: &SpectrumWindow<T>,
    wt: &SpectrumWindow<T>,
    p: PNorm<T>,
    opts: &ExperimentOptions<T>,
    eigenfunctions: bool,
) -> Result<DeviationReport<T>> {
    let c = bc.canonicalize()?;
    let delta_t = DeltaQ::new(other, bc, opts.spectrum.grid);
    let rows = w
        .entries
        .par_iter()
        .map(|e| {
            let et = wt
                .entry(e.n)
                .ok_or_else(|| DiracError::InvalidArgument(format!("index {} missing from the second spectrum", e.n)))?;
            let mut row = DeviationRow {
                n: e.n,
                lambda: e.lambda,
                lambda_tilde: et.lambda,
                eigenvalue: (e.lambda - et.lambda).norm(),
                eigenfunction: None,
                eigenfunction_skipped: false,
                delta_tilde: delta_t.eval(e.lambda).norm(),
                verified: e.verified() && et.verified(),
            };
            if eigenfunctions {
                let use_f = uses_f_formula(&c, sys.b1(), sys.b2(), e.lambda0);
                let grid = opts.spectrum.grid;
                let f = if e.multiplicity == 1 {
                    eigenfunction(sys, &c, use_f, e.lambda, grid, opts.s_norm)?
                } else {
                    None
                };
                let ft = if et.multiplicity == 1 {
                    eigenfunction(other, &c, use_f, et.lambda, grid, opts.s_norm)?
                } else {
                    None
                };
                match (f, ft) {
                    (Some(f), Some(ft)) => row.eigenfunction = Some(f.sup_distance(&ft)?),
                    _ => row.eigenfunction_skipped = true,
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut head: Vec<i64> = w.head();
    head.extend(wt.head());
    head.sort_unstable();
    head.dedup();
    let tail_start = w.tail_start().max(wt.tail_start());
    let eigenvalue = DeviationReport::aggregate(&rows, tail_start, p, |r| Some(r.eigenvalue));
    let eigenfunction = eigenfunctions.then(|| DeviationReport::aggregate(&rows, tail_start, p, |r| r.eigenfunction));
    Ok(DeviationReport {
        p,
        rows,
        head,
        tail_start,
        eigenvalue,
        eigenfunction,
        q_distance: q_distance(sys, other, p)?,
    })
}

fn windows<T: Real>(
    sys: &DiracSystem<T>,
    other: &DiracSystem<T>,
    bc: &BoundaryConditions<T>,
    n_max: usize,
    opts: &SpectrumOptions<T>,
) -> Result<(SpectrumWindow<T>, SpectrumWindow<T>)> {
    check_pair(sys, other)?;
    let w = zeros_delta_q(sys, bc, n_max, opts)?;
    let wt = if sys == other { w.clone() } else { zeros_delta_q(other, bc, n_max, opts)? };
    Ok((w, wt))
}

/// Eigenvalue deviations `|λ_n − λ̃_n|` over `|n| ≤ n_max` with their sums.
pub fn eigen_deviation<T: Real>(
    sys: &DiracSystem<T>,
    other: &DiracSystem<T>,
    bc: &BoundaryConditions<T>,
    n_max: usize,
    p: PNorm<T>,
    opts: &ExperimentOptions<T>,
) -> Result<DeviationReport<T>> {
    let (w, wt) = windows(sys, other, bc, n_max, &opts.spectrum)?;
    deviation_from_windows(sys, other, bc, &w, &wt, p, opts, false)
}

/// As [`eigen_deviation`], with sup-norm deviations of `L^{s}`-normalized
/// eigenfunctions filled in and aggregated.
pub fn eigenfunction_deviation<T: Real>(
    sys: &DiracSystem<T>,
    other: &DiracSystem<T>,
    bc: &BoundaryConditions<T>,
    n_max: usize,
    p: PNorm<T>,
    opts: &ExperimentOptions<T>,
) -> Result<DeviationReport<T>> {
    let (w, wt) = windows(sys, other, bc, n_max, &opts.spectrum)?;
    deviation_from_windows(sys, other, bc, &w, &wt, p, opts, true)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSidedRow<T> {
    pub n: i64,
    pub deviation: T,
    pub delta_tilde: T,
    /// `|λ_n − λ̃_n| / |Δ_{Q̃}(λ_n)|`, absent when the deviation is exactly zero.
    pub ratio: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoSidedReport<T> {
    pub rows: Vec<TwoSidedRow<T>>,
    pub tail_start: i64,
    /// Extremes of the ratio over `|n| ≥ tail_start`.
    pub tail_min: Option<T>,
    pub tail_max: Option<T>,
}

pub fn two_sided_check<T: Real>(
    sys: &DiracSystem<T>,
    other: &DiracSystem<T>,
    bc: &BoundaryConditions<T>,
    n_max: usize,
    opts: &ExperimentOptions<T>,
) -> Result<TwoSidedReport<T>> {
    let report = eigen_deviation(sys, other, bc, n_max, PNorm::two(), opts)?;
    let rows: Vec<TwoSidedRow<T>> = report
        .rows
        .iter()
        .map(|r| TwoSidedRow {
            n: r.n,
            deviation: r.eigenvalue,
            delta_tilde: r.delta_tilde,
            ratio: (r.eigenvalue > T::zero()).then(|| r.eigenvalue / r.delta_tilde),
        })
        .collect();
    let tail: Vec<T> = rows
        .iter()
        .filter(|r| r.n.abs() >= report.tail_start)
        .filter_map(|r| r.ratio)
        .collect();
    Ok(TwoSidedReport {
        tail_start: report.tail_start,
        tail_min: tail.iter().copied().reduce(T::min),
        tail_max: tail.iter().copied().reduce(T::max),
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallRow<T> {
    pub pair: usize,
    pub q_distance: T,
    /// `max_± ‖K± − K̃±‖_{X∞,p}`.
    pub kernel_dev: T,
    /// Tail `ℓ^{p'}` norm of the eigenvalue deviations.
    pub eigen_dev: T,
    /// Tail `ℓ^{p'}` norm of the eigenfunction deviations.
    pub eigenfunction_dev: T,
    pub kernel_ratio: T,
    pub eigen_ratio: T,
    pub eigenfunction_ratio: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallTable<T> {
    pub rows: Vec<BallRow<T>>,
    pub max_kernel_ratio: T,
    pub max_eigen_ratio: T,
    pub max_eigenfunction_ratio: T,
}

impl<T: Real> BallTable<T> {
    /// CSV with one line per pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "pair,q_distance,kernel_dev,eigen_dev,eigenfunction_dev,kernel_ratio,eigen_ratio,eigenfunction_ratio\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.pair, r.q_distance, r.kernel_dev, r.eigen_dev, r.eigenfunction_dev, r.kernel_ratio, r.eigen_ratio, r.eigenfunction_ratio
            ));
        }
        out
    }
}

fn ratio<T: Real>(num: T, den: T) -> T {
    if den > T::zero() {
        num / den
    } else {
        T::zero()
    }
}

/// Runs kernel, eigenvalue and eigenfunction deviation over `pairs` pairs
/// `(Q_{2i}, Q_{2i+1})` of the sampler's stream.
pub fn run_ball_experiment<T: Real>(
    sampler: &PotentialBallSampler<T>,
    b1: T,
    b2: T,
    bc: &BoundaryConditions<T>,
    pairs: usize,
    n_max: usize,
    p: PNorm<T>,
    opts: &ExperimentOptions<T>,
) -> Result<BallTable<T>> {
    let rows = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let sys = sampler.sample(2 * i as u64, b1, b2)?;
            let other = sampler.sample(2 * i as u64 + 1, b1, b2)?;
            let k = KernelSet::build(&sys, opts.kernel_grid, opts.solve)?;
            let kt = KernelSet::build(&other, opts.kernel_grid, opts.solve)?;
            let kd = kernel_deviation_between(&k, &kt, &sys, &other, p)?;
            let (w, wt) = windows(&sys, &other, bc, n_max, &opts.spectrum)?;
            let rep = deviation_from_windows(&sys, &other, bc, &w, &wt, p, opts, true)?;
            let eigen_dev = rep.eigenvalue.tail.lp_conj_norm;
            let eigenfunction_dev = rep.eigenfunction.map(|a| a.tail.lp_conj_norm).unwrap_or(T::zero());
            Ok(BallRow {
                pair: i,
                q_distance: rep.q_distance,
                kernel_dev: kd.x_inf,
                eigen_dev,
                eigenfunction_dev,
                kernel_ratio: ratio(kd.x_inf, rep.q_distance),
                eigen_ratio: ratio(eigen_dev, rep.q_distance),
                eigenfunction_ratio: ratio(eigenfunction_dev, rep.q_distance),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_of = |f: fn(&BallRow<T>) -> T| rows.iter().map(f).fold(T::zero(), T::max);
    Ok(BallTable {
        max_kernel_ratio: max_of(|r| r.kernel_ratio),
        max_eigen_ratio: max_of(|r| r.eigen_ratio),
        max_eigenfunction_ratio: max_of(|r| r.eigenfunction_ratio),
        rows,
    })
}
