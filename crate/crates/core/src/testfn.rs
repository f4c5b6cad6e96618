//! Smearing functions `f(x)` and their transforms `f̃(k) = ∫f(x)e^{-ik·x}d³x`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::params::Params;

/// A real test function on the `t = t₀` hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `A·exp(-|x-x₀|²/(2s²))`.
    Gaussian { center: [f64; 3], width: f64, amplitude: f64 },
    /// Indicator of the box `|x_i - c_i| < h_i`.
    Box { center: [f64; 3], half_widths: [f64; 3] },
    /// Site values on a lattice (same flattening as [`LatticeSpec::flat_index`]).
    Tabulated { values: Arc<[f64]> },
}

impl TestFunction {
    pub fn gaussian(width: f64) -> Self {
        Self::Gaussian { center: [0.0; 3], width, amplitude: 1.0 }
    }

    pub fn gaussian_at(center: [f64; 3], width: f64) -> Self {
        Self::Gaussian { center, width, amplitude: 1.0 }
    }

    pub fn cube(center: [f64; 3], half_width: f64) -> Self {
        Self::Box { center, half_widths: [half_width; 3] }
    }

    pub fn tabulated(values: Vec<f64>) -> Self {
        Self::Tabulated { values: values.into() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Gaussian { center, width, amplitude } => {
                *width > 0.0 && width.is_finite() && amplitude.is_finite() && center.iter().all(|c| c.is_finite())
            }
            Self::Box { center, half_widths } => {
                half_widths.iter().all(|h| *h > 0.0 && h.is_finite()) && center.iter().all(|c| c.is_finite())
            }
            Self::Tabulated { values } => !values.is_empty() && values.iter().all(|v| v.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid test function {self}")))
        }
    }

    /// Position-space value (continuum kinds only).
    pub fn value(&self, x: &[f64; 3]) -> Option<f64> {
        match self {
            Self::Gaussian { center, width, amplitude } => {
                let r2: f64 = (0..3).map(|i| (x[i] - center[i]).powi(2)).sum();
                Some(amplitude * (-r2 / (2.0 * width * width)).exp())
            }
            Self::Box { center, half_widths } => {
                let inside = (0..3).all(|i| (x[i] - center[i]).abs() < half_widths[i]);
                Some(if inside { 1.0 } else { 0.0 })
            }
            Self::Tabulated { .. } => None,
        }
    }

    /// Closed-form transform for the continuum kinds; `None` for tabulated data.
    pub fn fourier_continuum(&self, k: &[f64; 3]) -> Option<Complex64> {
        match self {
            Self::Gaussian { center, width, amplitude } => {
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                let mag = amplitude * (2.0 * PI).powf(1.5) * width.powi(3) * (-0.5 * width * width * k2).exp();
                Some(Complex64::from_polar(mag, -dot(k, center)))
            }
            Self::Box { center, half_widths } => {
                let mag: f64 = (0..3).map(|i| 2.0 * half_widths[i] * sinc(k[i] * half_widths[i])).product();
                Some(Complex64::from_polar(1.0, -dot(k, center)) * mag)
            }
            Self::Tabulated { .. } => None,
        }
    }

    /// `f̃(k)`. Tabulated data needs the lattice it lives on and is transformed as
    /// `a³ Σ_x f(x) e^{-ik·x}`.
    pub fn fourier(&self, k: &[f64; 3], lattice: Option<&LatticeSpec>) -> Result<Complex64> {
        if let Some(v) = self.fourier_continuum(k) {
            return Ok(v);
        }
        let Self::Tabulated { values } = self else { unreachable!() };
        let lattice = lattice.ok_or_else(|| Error::Config("tabulated test function needs a lattice".into()))?;
        check_table(values, lattice)?;
        let cell = lattice.spacing().powi(3);
        let sum: Complex64 = values
            .iter()
            .enumerate()
            .map(|(i, &f)| Complex64::from_polar(f, -dot(k, &lattice.position(i))))
            .sum();
        Ok(sum * cell)
    }

    /// Transform at every lattice mode, Hermitian-symmetric by construction.
    ///
    /// A self-conjugate mode stands for both `k` and `-k`, so it carries `Re f̃(k)`.
    pub fn lattice_transform(&self, lattice: &LatticeSpec) -> Result<Vec<Complex64>> {
        let count = lattice.mode_count();
        let mut out: Vec<Complex64> = match self {
            Self::Tabulated { values } => {
                check_table(values, lattice)?;
                dft3(values, lattice)
            }
            _ => (0..count)
                .map(|i| self.fourier_continuum(&lattice.wavenumber(i)).unwrap())
                .collect(),
        };
        for i in 0..count {
            let p = lattice.partner(i);
            if p == i {
                out[i].im = 0.0;
            } else if p > i {
                // average the pair so that conj symmetry is exact, not just up to roundoff
                let v = 0.5 * (out[i] + out[p].conj());
                out[i] = v;
                out[p] = v.conj();
            }
        }
        Ok(out)
    }

    /// Radius of a ball around the origin holding essentially all of `f`; sets
    /// the angular resolution needed by spectral quadrature.
    pub fn extent(&self) -> f64 {
        match self {
            Self::Gaussian { center, width, .. } => norm3(center) + 8.0 * width,
            Self::Box { center, half_widths } => norm3(center) + norm3(half_widths),
            Self::Tabulated { .. } => f64::INFINITY,
        }
    }

    /// Samples the continuum function on lattice sites (periodic images ignored).
    pub fn tabulate(&self, lattice: &LatticeSpec) -> Result<TestFunction> {
        let values = (0..lattice.mode_count())
            .map(|i| self.value(&lattice.position(i)))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::Config("cannot tabulate tabulated data".into()))?;
        Ok(TestFunction::tabulated(values))
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian { center, width, amplitude } => write!(
                f,
                "gaussian:s={width},x={},y={},z={},A={amplitude}",
                center[0], center[1], center[2]
            ),
            Self::Box { center, half_widths } => write!(
                f,
                "box:a={},b={},c={},x={},y={},z={}",
                half_widths[0], half_widths[1], half_widths[2], center[0], center[1], center[2]
            ),
            Self::Tabulated { values } => write!(f, "tabulated:{}", values.len()),
        }
    }
}

/// Parses the [`Display`](fmt::Display) grammar. Omitted centers default to the
/// origin, `A` to 1, and `b`, `c` to `a`.
impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Params::parse(s)?;
        let f = match p.name {
            "gaussian" => {
                let width = p.require("s")?;
                let center = [p.get("x").unwrap_or(0.0), p.get("y").unwrap_or(0.0), p.get("z").unwrap_or(0.0)];
                Self::Gaussian { center, width, amplitude: p.get("A").unwrap_or(1.0) }
            }
            "box" => {
                let a = p.require("a")?;
                let half_widths = [a, p.get("b").unwrap_or(a), p.get("c").unwrap_or(a)];
                let center = [p.get("x").unwrap_or(0.0), p.get("y").unwrap_or(0.0), p.get("z").unwrap_or(0.0)];
                Self::Box { center, half_widths }
            }
            other => return Err(Error::Config(format!("unknown test function `{other}` (gaussian or box)"))),
        };
        p.finish()?;
        f.validate()?;
        Ok(f)
    }
}

fn check_table(values: &[f64], lattice: &LatticeSpec) -> Result<()> {
    if values.len() != lattice.mode_count() {
        return Err(Error::Config(format!(
            "tabulated test function has {} values, lattice has {} sites",
            values.len(),
            lattice.mode_count()
        )));
    }
    Ok(())
}

/// Separable 3-D DFT `a³ Σ_x f(x) e^{-ik·x}` at the lattice wavenumbers.
fn dft3(values: &[f64], lattice: &LatticeSpec) -> Vec<Complex64> {
    let n = lattice.n_per_side();
    let twiddle: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64))
        .collect();
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..3 {
        let stride = n.pow(2 - axis as u32);
        for base in 0..data.len() {
            let coord = (base / stride) % n;
            if coord != 0 {
                continue;
            }
            for (kk, out) in line.iter_mut().enumerate() {
                *out = (0..n).map(|x| data[base + x * stride] * twiddle[(kk * x) % n]).sum();
            }
            for (kk, v) in line.iter().enumerate() {
                data[base + kk * stride] = *v;
            }
        }
    }
    let cell = lattice.spacing().powi(3);
    data.iter_mut().for_each(|v| *v *= cell);
    data
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// `sin(x)/x` with the removable singularity filled in.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}
