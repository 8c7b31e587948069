//! Builders for the off-diagonal potential entries: trigonometric polynomials,
//! step functions, cubic splines and a plain-text table format.

use num_complex::Complex;

use crate::error::{DiracError, Result};
use crate::gridfn::SampledFunction;
use crate::ode::DiracSystem;
use crate::scalar::{expi, Real};

/// `Σ_{k=1}^{m} c_k e^{2πikx}` with `m = coeffs.len()`.
pub fn trig<T: Real>(n: usize, coeffs: &[Complex<T>]) -> Result<SampledFunction<T>> {
    SampledFunction::from_fn(n, |x| {
        coeffs.iter().enumerate().fold(Complex::new(T::zero(), T::zero()), |acc, (k, c)| {
            acc + *c * expi(Complex::new(T::TAU() * T::from_index(k + 1) * x, T::zero()))
        })
    })
}

/// Piecewise constant function taking `values[j]` on the `j`-th interval cut
/// out by the increasing `breakpoints` inside `(0, 1)`.
pub fn step<T: Real>(n: usize, breakpoints: &[T], values: &[Complex<T>]) -> Result<SampledFunction<T>> {
    if values.len() != breakpoints.len() + 1 {
        return Err(DiracError::InvalidArgument(format!(
            "step function needs {} values for {} breakpoints, got {}",
            breakpoints.len() + 1,
            breakpoints.len(),
            values.len()
        )));
    }
    let inside = breakpoints.iter().all(|b| *b > T::zero() && *b < T::one());
    let increasing = breakpoints.windows(2).all(|w| w[0] < w[1]);
    if !inside || !increasing {
        return Err(DiracError::InvalidArgument(
            "step breakpoints must increase strictly inside (0, 1)".into(),
        ));
    }
    SampledFunction::from_fn(n, |x| values[breakpoints.partition_point(|b| *b <= x)])
}

/// Catmull-Rom spline through `knots` placed uniformly on `[0, 1]`.
pub fn spline<T: Real>(n: usize, knots: &[Complex<T>]) -> Result<SampledFunction<T>> {
    let m = knots.len();
    if m < 2 {
        return Err(DiracError::InvalidArgument("a spline needs at least two knots".into()));
    }
    let at = |i: isize| -> Complex<T> { knots[i.clamp(0, m as isize - 1) as usize] };
    let half = T::lit(0.5);
    SampledFunction::from_fn(n, |x: T| {
        let s = x * T::from_index(m - 1);
        let i = s.floor().to_usize().unwrap_or(0).min(m - 2) as isize;
        let u = s - T::from_index(i as usize);
        let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
        let u2 = u * u;
        let u3 = u2 * u;
        (p1 * T::lit(2.0)
            + (p2 - p0) * u
            + (p0 * T::lit(2.0) - p1 * T::lit(5.0) + p2 * T::lit(4.0) - p3) * u2
            + (p1 * T::lit(3.0) - p0 - p2 * T::lit(3.0) + p3) * u3)
            * half
    })
}

/// Potential given as rows `(x, Q12(x), Q21(x))` with strictly increasing `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialTable<T> {
    pub x: Vec<T>,
    pub q12: Vec<Complex<T>>,
    pub q21: Vec<Complex<T>>,
}

impl<T: Real> PotentialTable<T> {
    pub fn new(x: Vec<T>, q12: Vec<Complex<T>>, q21: Vec<Complex<T>>) -> Result<Self> {
        if x.len() < 2 || q12.len() != x.len() || q21.len() != x.len() {
            return Err(DiracError::InvalidArgument(
                "potential table needs at least two rows of equal length".into(),
            ));
        }
        if let Some(i) = x.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(DiracError::InvalidArgument(format!(
                "x column is not strictly increasing at row {}",
                i + 2
            )));
        }
        Ok(Self { x, q12, q21 })
    }

    /// Samples of a system on its own grid.
    pub fn from_system(sys: &DiracSystem<T>) -> Self {
        let q12 = sys.q12();
        Self {
            x: (0..=q12.grid_size()).map(|i| q12.node(i)).collect(),
            q12: q12.samples().to_vec(),
            q21: sys.q21().samples().to_vec(),
        }
    }

    /// Parses comma-separated rows `x, Re Q12, Im Q12, Re Q21, Im Q21`.
    /// Blank lines, `#` comments and a non-numeric header line are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut x = Vec::new();
        let mut q12 = Vec::new();
        let mut q21 = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            let values = match parsed {
                Ok(v) => v,
                Err(_) if x.is_empty() && lineno == 0 => continue,
                Err(e) => {
                    return Err(DiracError::InvalidArgument(format!(
                        "line {}: {e}",
                        lineno + 1
                    )))
                }
            };
            if values.len() != 5 {
                return Err(DiracError::InvalidArgument(format!(
                    "line {}: expected 5 fields, found {}",
                    lineno + 1,
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(DiracError::InvalidArgument(format!(
                    "line {}: non-finite value",
                    lineno + 1
                )));
            }
            x.push(T::lit(values[0]));
            q12.push(Complex::new(T::lit(values[1]), T::lit(values[2])));
            q21.push(Complex::new(T::lit(values[3]), T::lit(values[4])));
        }
        Self::new(x, q12, q21)
    }

    /// Inverse of [`PotentialTable::parse_csv`]; values are written in
    /// shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re_q12,im_q12,re_q21,im_q21\n");
        for i in 0..self.x.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.x[i], self.q12[i].re, self.q12[i].im, self.q21[i].re, self.q21[i].im
            ));
        }
        out
    }

    fn resample_column(&self, col: &[Complex<T>], n: usize) -> Result<SampledFunction<T>> {
        SampledFunction::from_fn(n, |t| {
            let j = self.x.partition_point(|v| *v < t);
            if j < self.x.len() && self.x[j] == t {
                return col[j];
            }
            if j == 0 {
                return col[0];
            }
            if j == self.x.len() {
                return col[j - 1];
            }
            let w = (t - self.x[j - 1]) / (self.x[j] - self.x[j - 1]);
            col[j - 1] * (T::one() - w) + col[j] * w
        })
    }

    /// Linear interpolation onto the uniform grid with `n` cells; nodes that
    /// coincide with table abscissae take the stored values exactly.
    pub fn to_system(&self, b1: T, b2: T, n: usize) -> Result<DiracSystem<T>> {
        DiracSystem::new(
            b1,
            b2,
            self.resample_column(&self.q12, n)?,
            self.resample_column(&self.q21, n)?,
        )
    }
}
