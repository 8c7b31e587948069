//! Experiment configuration: a JSON document, parsed strictly and validated
//! before any computation starts.

use std::path::{Path, PathBuf};

use diracspec::boundary::{BoundaryConditions, Canonical};
use diracspec::gridfn::{PNorm, SampledFunction};
use diracspec::ode::DiracSystem;
use diracspec::potential::{spline, step, trig, PotentialTable};
use diracspec::stability::PotentialFamily;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const MIN_GRID: usize = 8;
pub const MAX_GRID: usize = 1 << 14;
pub const MAX_N_MAX: usize = 2000;
pub const MAX_PAIRS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Classify,
    Spectrum,
    Kernels,
    Stability,
    Bari,
    Fourier,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Classify => "classify",
            Self::Spectrum => "spectrum",
            Self::Kernels => "kernels",
            Self::Stability => "stability",
            Self::Bari => "bari",
            Self::Fourier => "fourier",
        }
    }
}

/// A complex number written either as a plain real or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexSpec {
    pub fn value(&self) -> Complex64 {
        match *self {
            Self::Real(re) => Complex64::new(re, 0.0),
            Self::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

fn values(list: &[ComplexSpec]) -> Vec<Complex64> {
    list.iter().map(ComplexSpec::value).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero {},
    /// `Q_jk(x) = Σ_{k=1}^{m} c_k e^{2πikx}`; an omitted entry is zero.
    Trig {
        m: usize,
        #[serde(default)]
        q12: Vec<ComplexSpec>,
        #[serde(default)]
        q21: Vec<ComplexSpec>,
    },
    Step {
        breakpoints: Vec<f64>,
        #[serde(default)]
        q12: Vec<ComplexSpec>,
        #[serde(default)]
        q21: Vec<ComplexSpec>,
    },
    Spline {
        #[serde(default)]
        q12: Vec<ComplexSpec>,
        #[serde(default)]
        q21: Vec<ComplexSpec>,
    },
    /// CSV file of `x, Re Q12, Im Q12, Re Q21, Im Q21`, relative to the config file.
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub b1: f64,
    pub b2: f64,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_potential")]
    pub potential: PotentialSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalSpec {
    pub a: ComplexSpec,
    pub b: ComplexSpec,
    pub c: ComplexSpec,
    pub d: ComplexSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BcSpec {
    Canonical(CanonicalSpec),
    Matrix([[ComplexSpec; 4]; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iter: default_max_iter(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default = "default_ladder")]
    pub eps_ladder: Vec<f64>,
    #[serde(default = "default_contour_nodes")]
    pub contour_nodes: usize,
    #[serde(default = "default_newton_iter")]
    pub newton_max_iter: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            eps_ladder: default_ladder(),
            contour_nodes: default_contour_nodes(),
            newton_max_iter: default_newton_iter(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelsConfig {
    #[serde(default = "default_kernel_grid")]
    pub grid: usize,
    /// Every `stride`-th node in each direction goes to the sample CSV.
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl Default for KernelsConfig {
    fn default() -> Self {
        Self {
            grid: default_kernel_grid(),
            stride: default_stride(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Trig { modes: usize },
    Step { pieces: usize },
    Spline { knots: usize },
}

impl FamilySpec {
    pub fn family(&self) -> PotentialFamily {
        match *self {
            Self::Trig { modes } => PotentialFamily::Trig { modes },
            Self::Step { pieces } => PotentialFamily::Step { pieces },
            Self::Spline { knots } => PotentialFamily::Spline { knots },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NormSpec {
    Finite(f64),
    Named(NamedNorm),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedNorm {
    Inf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    #[serde(default = "default_radius")]
    pub r: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_family")]
    pub family: FamilySpec,
    #[serde(default = "default_kernel_grid")]
    pub sampler_grid: usize,
    #[serde(default = "default_kernel_grid")]
    pub kernel_grid: usize,
    #[serde(default = "default_s_norm")]
    pub s_norm: NormSpec,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            r: default_radius(),
            seed: 0,
            pairs: default_pairs(),
            family: default_family(),
            sampler_grid: default_kernel_grid(),
            kernel_grid: default_kernel_grid(),
            s_norm: default_s_norm(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entry {
    Q12,
    Q21,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierConfig {
    #[serde(default = "default_entry")]
    pub entry: Entry,
    #[serde(default)]
    pub weighted: bool,
    #[serde(default = "default_true")]
    pub maximal: bool,
}

impl Default for FourierConfig {
    fn default() -> Self {
        Self {
            entry: default_entry(),
            weighted: false,
            maximal: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    pub system: SystemConfig,
    pub bc: BcSpec,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub kernels: KernelsConfig,
    #[serde(default)]
    pub stability: StabilityConfig,
    #[serde(default)]
    pub fourier: FourierConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_grid() -> usize {
    512
}
fn default_potential() -> PotentialSpec {
    PotentialSpec::Zero {}
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    200
}
fn default_ladder() -> Vec<f64> {
    vec![0.4, 0.2, 0.1, 0.05]
}
fn default_contour_nodes() -> usize {
    32
}
fn default_newton_iter() -> usize {
    50
}
fn default_kernel_grid() -> usize {
    256
}
fn default_stride() -> usize {
    8
}
fn default_radius() -> f64 {
    1.0
}
fn default_pairs() -> usize {
    10
}
fn default_family() -> FamilySpec {
    FamilySpec::Trig { modes: 3 }
}
fn default_s_norm() -> NormSpec {
    NormSpec::Named(NamedNorm::Inf)
}
fn default_entry() -> Entry {
    Entry::Q21
}
fn default_true() -> bool {
    true
}
fn default_n_max() -> usize {
    10
}
fn default_p() -> f64 {
    2.0
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn check_grid(name: &str, n: usize) -> Result<(), Failure> {
    if !(MIN_GRID..=MAX_GRID).contains(&n) {
        return Err(invalid(format!("{name} must lie in [{MIN_GRID}, {MAX_GRID}], got {n}")));
    }
    Ok(())
}

fn check_finite(name: &str, list: &[ComplexSpec]) -> Result<(), Failure> {
    if list.iter().any(|c| !(c.value().re.is_finite() && c.value().im.is_finite())) {
        return Err(invalid(format!("{name} contains a non-finite number")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| invalid(format!("config does not parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let s = &self.system;
        if !(s.b1.is_finite() && s.b2.is_finite() && s.b1 < 0.0 && s.b2 > 0.0) {
            return Err(invalid(format!("weights must satisfy b1 < 0 < b2, got b1 = {}, b2 = {}", s.b1, s.b2)));
        }
        check_grid("system.grid", s.grid)?;
        match &s.potential {
            PotentialSpec::Zero {} | PotentialSpec::File { .. } => {}
            PotentialSpec::Trig { m, q12, q21 } => {
                for (name, list) in [("q12", q12), ("q21", q21)] {
                    if !list.is_empty() && list.len() != *m {
                        return Err(invalid(format!("trig {name} needs {m} coefficients, got {}", list.len())));
                    }
                    check_finite(name, list)?;
                }
            }
            PotentialSpec::Step { breakpoints, q12, q21 } => {
                for (name, list) in [("q12", q12), ("q21", q21)] {
                    if !list.is_empty() && list.len() != breakpoints.len() + 1 {
                        return Err(invalid(format!(
                            "step {name} needs {} values, got {}",
                            breakpoints.len() + 1,
                            list.len()
                        )));
                    }
                    check_finite(name, list)?;
                }
                let inside = breakpoints.iter().all(|b| *b > 0.0 && *b < 1.0);
                if !inside || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("step breakpoints must increase strictly inside (0, 1)"));
                }
            }
            PotentialSpec::Spline { q12, q21 } => {
                for (name, list) in [("q12", q12), ("q21", q21)] {
                    if list.len() == 1 {
                        return Err(invalid(format!("spline {name} needs at least two knots")));
                    }
                    check_finite(name, list)?;
                }
            }
        }
        match &self.bc {
            BcSpec::Canonical(c) => check_finite("bc", &[c.a, c.b, c.c, c.d])?,
            BcSpec::Matrix(m) => check_finite("bc", &[m[0].as_slice(), m[1].as_slice()].concat())?,
        }
        if self.n_max > MAX_N_MAX {
            return Err(invalid(format!("n_max must not exceed {MAX_N_MAX}, got {}", self.n_max)));
        }
        if !(self.p > 1.0 && self.p <= 2.0) {
            return Err(invalid(format!("p must lie in (1, 2], got {}", self.p)));
        }
        if !(self.solver.tol > 0.0 && self.solver.tol < 1.0) || self.solver.max_iter == 0 {
            return Err(invalid("solver.tol must lie in (0, 1) and solver.max_iter must be positive"));
        }
        let sp = &self.spectrum;
        if sp.eps_ladder.is_empty() || sp.eps_ladder.iter().any(|e| !(*e > 0.0 && *e < 10.0)) {
            return Err(invalid("spectrum.eps_ladder must be a nonempty list of radii in (0, 10)"));
        }
        if !(8..=4096).contains(&sp.contour_nodes) || sp.newton_max_iter == 0 {
            return Err(invalid("spectrum.contour_nodes must lie in [8, 4096] and newton_max_iter be positive"));
        }
        check_grid("kernels.grid", self.kernels.grid)?;
        if self.kernels.stride == 0 {
            return Err(invalid("kernels.stride must be positive"));
        }
        let st = &self.stability;
        if !(st.r >= 0.0 && st.r.is_finite()) {
            return Err(invalid(format!("stability.r must be finite and nonnegative, got {}", st.r)));
        }
        if st.pairs > MAX_PAIRS {
            return Err(invalid(format!("stability.pairs must not exceed {MAX_PAIRS}")));
        }
        check_grid("stability.sampler_grid", st.sampler_grid)?;
        check_grid("stability.kernel_grid", st.kernel_grid)?;
        let size = match st.family {
            FamilySpec::Trig { modes } => modes,
            FamilySpec::Step { pieces } => pieces,
            FamilySpec::Spline { knots } => knots.saturating_sub(1),
        };
        if size == 0 {
            return Err(invalid("stability.family needs at least one degree of freedom"));
        }
        if let NormSpec::Finite(s) = st.s_norm {
            if !(s >= 1.0 && s.is_finite()) {
                return Err(invalid(format!("stability.s_norm must be at least 1 or \"inf\", got {s}")));
            }
        }
        Ok(())
    }

    pub fn p_norm(&self) -> PNorm<f64> {
        PNorm::Finite(self.p)
    }

    pub fn s_norm(&self) -> PNorm<f64> {
        match self.stability.s_norm {
            NormSpec::Finite(s) => PNorm::Finite(s),
            NormSpec::Named(NamedNorm::Inf) => PNorm::Infinity,
        }
    }

    pub fn boundary_conditions(&self) -> Result<BoundaryConditions<f64>, Failure> {
        match &self.bc {
            BcSpec::Canonical(c) => Ok(BoundaryConditions::from_canonical(Canonical::new(
                c.a.value(),
                c.b.value(),
                c.c.value(),
                c.d.value(),
            ))),
            BcSpec::Matrix(m) => {
                let row = |r: &[ComplexSpec; 4]| [r[0].value(), r[1].value(), r[2].value(), r[3].value()];
                BoundaryConditions::new([row(&m[0]), row(&m[1])])
                    .map_err(|e| invalid(format!("boundary matrix rejected: {e}")))
            }
        }
    }

    /// The system on the configured grid; file paths resolve against `base`.
    pub fn load_system(&self, base: &Path) -> Result<DiracSystem<f64>, Failure> {
        load_potential(&self.system.potential, self.system.b1, self.system.b2, self.system.grid, base)
    }
}

fn entry_or_zero(
    n: usize,
    list: &[ComplexSpec],
    build: impl Fn(&[Complex64]) -> diracspec::Result<SampledFunction<f64>>,
) -> Result<SampledFunction<f64>, Failure> {
    let result = if list.is_empty() {
        SampledFunction::zeros(n)
    } else {
        build(&values(list))
    };
    result.map_err(|e| invalid(format!("potential rejected: {e}")))
}

/// Builds the system for a potential spec on a grid with `n` cells.
pub fn load_potential(
    spec: &PotentialSpec,
    b1: f64,
    b2: f64,
    n: usize,
    base: &Path,
) -> Result<DiracSystem<f64>, Failure> {
    let (q12, q21) = match spec {
        PotentialSpec::Zero {} => (
            SampledFunction::zeros(n).map_err(|e| invalid(e.to_string()))?,
            SampledFunction::zeros(n).map_err(|e| invalid(e.to_string()))?,
        ),
        PotentialSpec::Trig { q12, q21, .. } => (
            entry_or_zero(n, q12, |c| trig(n, c))?,
            entry_or_zero(n, q21, |c| trig(n, c))?,
        ),
        PotentialSpec::Step { breakpoints, q12, q21 } => (
            entry_or_zero(n, q12, |c| step(n, breakpoints, c))?,
            entry_or_zero(n, q21, |c| step(n, breakpoints, c))?,
        ),
        PotentialSpec::Spline { q12, q21 } => (
            entry_or_zero(n, q12, |c| spline(n, c))?,
            entry_or_zero(n, q21, |c| spline(n, c))?,
        ),
        PotentialSpec::File { path } => {
            let full = base.join(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| Failure::Io(format!("cannot read potential file {}: {e}", full.display())))?;
            let table = PotentialTable::parse_csv(&text)
                .map_err(|e| invalid(format!("potential file {} is malformed: {e}", full.display())))?;
            return table
                .to_system(b1, b2, n)
                .map_err(|e| invalid(format!("potential file {} is malformed: {e}", full.display())));
        }
    };
    DiracSystem::new(b1, b2, q12, q21).map_err(|e| invalid(format!("system rejected: {e}")))
}
