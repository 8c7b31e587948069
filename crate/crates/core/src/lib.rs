//! Numerical spectral theory for 2×2 Dirac-type boundary value problems
//!
//! ```text
//! -i B^{-1} y' + Q(x) y = λ y,   B = diag(b1, b2),  b1 < 0 < b2,
//! Q = [[0, Q12], [Q21, 0]],      x ∈ [0, 1]
//! ```
//!
//! The crate computes transformation-operator kernels, characteristic
//! determinants, canonically ordered eigenvalues and eigenfunctions, and
//! provides experiment harnesses for eigenvalue stability and Bari-basis
//! criteria.
//!
//! All numerical code is generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`).  Tolerances used by the root finders and
//! the classifier are calibrated for `f64`; the aliases at the crate root fix
//! that choice for everyday use.
//!
//! ```
//! use diracspec::boundary::{classify, BoundaryConditions, Canonical};
//! use diracspec::ode::DiracSystem;
//! use diracspec::potential::trig;
//! use diracspec::spectrum::{zeros_delta_q, SpectrumOptions};
//! use diracspec::transformop::{KernelSet, SolveOptions};
//! use diracspec::Complex64;
//!
//! # fn main() -> diracspec::Result<()> {
//! let q21 = trig(256, &[Complex64::new(0.2, 0.0)])?;
//! let q12 = trig(256, &[Complex64::new(0.0, 0.1)])?;
//! let sys = DiracSystem::new(-1.0, 2.0, q12, q21)?;
//! let bc = BoundaryConditions::from_canonical(Canonical::real(0.0, 1.0, 1.0, 0.0));
//!
//! assert!(classify(&bc, -1.0, 2.0, None).is_strictly_regular());
//! let kernels = KernelSet::build(&sys, 64, SolveOptions::default())?;
//! assert!(kernels.residuals.r < 1e-8);
//! let window = zeros_delta_q(&sys, &bc, 5, &SpectrumOptions::default())?;
//! assert_eq!(window.entries.len(), 11);
//! # Ok(())
//! # }
//! ```

pub mod bari;
pub mod boundary;
pub mod error;
pub mod fourier;
pub mod gridfn;
pub mod mat2;
pub mod ode;
pub mod poly;
pub mod potential;
pub mod scalar;
pub mod spectrum;
pub mod stability;
pub mod transformop;

pub use error::{DiracError, Result};
pub use num_complex::Complex;
pub use scalar::Real;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Complex64 = Complex<f64>;
pub type SampledFunction = gridfn::SampledFunction<f64>;
pub type SampledVector = gridfn::SampledVector<f64>;
pub type TriangularKernel = gridfn::TriangularKernel<f64>;
pub type PNorm = gridfn::PNorm<f64>;
pub type Mat2 = mat2::Mat2<f64>;
pub type DiracSystem = ode::DiracSystem<f64>;
pub type FundamentalMatrix = ode::FundamentalMatrix<f64>;
pub type BoundaryConditions = boundary::BoundaryConditions<f64>;
pub type Canonical = boundary::Canonical<f64>;
pub type Minors = boundary::Minors<f64>;
pub type KernelSet = transformop::KernelSet<f64>;
pub type ComboKernels = transformop::ComboKernels<f64>;
pub type SpectrumWindow = spectrum::SpectrumWindow<f64>;
pub type BesselReport = fourier::BesselReport<f64>;
pub type BariReport = bari::BariReport<f64>;
pub type DeviationReport = stability::DeviationReport<f64>;
pub type PotentialBallSampler = stability::PotentialBallSampler<f64>;
