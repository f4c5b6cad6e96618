//! Dispersion and the spectral weight `ξ(k)` of the Hamiltonian `H_ξ[φ] = ∫d³k/(2π)³ ξ(k)|φ̃(k)|²`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::norm;
use crate::params::Params;

/// Continuum dispersion `ω = √(|k|² + m²)`, also used at lattice wavenumbers.
pub fn dispersion(k: &[f64; 3], mass: f64) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + mass * mass).sqrt()
}

/// The functional form of `ξ(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularizerKind {
    /// `ξ(k) = kT·√(k²+m²)/ℏ`, the form whose fluctuations match the quantized vacuum.
    KgVacuum,
    /// `ξ(k) = ½(k²+m²)` for `|k| ≤ Λ`, frozen above.
    SharpCutoff { lambda: f64 },
    /// `ξ(k) = ½(k² + m²·e^{|k|/Λ})`.
    ExpMass { lambda: f64 },
    /// `ξ(k) = ½(k²+m²)^α`, `α > 3/2`.
    PowerLaw { alpha: f64 },
}

/// Value of `ξ` at a wavenumber. `Frozen` stands for `ξ = ∞`: the mode has zero variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiValue {
    Finite(f64),
    Frozen,
}

impl XiValue {
    /// Per-mode variance `kT/(2ξ)`; zero for frozen modes.
    ///
    /// A vanishing `ξ` (the `k = 0` mode at `m = 0`) has no finite variance and is
    /// also reported as zero: the constant mode is dropped from the ensemble.
    pub fn variance(self, kt: f64) -> f64 {
        match self {
            XiValue::Finite(xi) if xi > 0.0 => kt / (2.0 * xi),
            _ => 0.0,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            XiValue::Finite(x) => Some(x),
            XiValue::Frozen => None,
        }
    }
}

/// Selects a Gibbs measure: the `ξ(k)` form plus the physical constants it uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularizer {
    kind: RegularizerKind,
    mass: f64,
    kt: f64,
    hbar: f64,
}

impl Regularizer {
    pub fn new(kind: RegularizerKind, mass: f64, kt: f64, hbar: f64) -> Result<Self> {
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::Config(format!("mass must be nonnegative, got {mass}")));
        }
        if !(kt > 0.0 && kt.is_finite()) {
            return Err(Error::Config(format!("kT must be positive, got {kt}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Config(format!("hbar must be positive, got {hbar}")));
        }
        match kind {
            RegularizerKind::SharpCutoff { lambda } | RegularizerKind::ExpMass { lambda }
                if !(lambda > 0.0 && lambda.is_finite()) =>
            {
                return Err(Error::Config(format!("cutoff scale must be positive, got {lambda}")));
            }
            RegularizerKind::PowerLaw { alpha } if !(alpha > 1.5 && alpha.is_finite()) => {
                return Err(Error::Config(format!("power-law exponent must exceed 3/2, got {alpha}")));
            }
            _ => {}
        }
        Ok(Self { kind, mass, kt, hbar })
    }

    pub fn kg_vacuum(mass: f64, kt: f64, hbar: f64) -> Result<Self> {
        Self::new(RegularizerKind::KgVacuum, mass, kt, hbar)
    }

    pub fn kind(&self) -> RegularizerKind {
        self.kind
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn kt(&self) -> f64 {
        self.kt
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Same form and constants with a different `kT`.
    pub fn with_kt(&self, kt: f64) -> Result<Self> {
        Self::new(self.kind, self.mass, kt, self.hbar)
    }

    /// `ξ` as a function of `|k|`.
    pub fn xi_radial(&self, k: f64) -> XiValue {
        let m2 = self.mass * self.mass;
        let k2 = k * k;
        match self.kind {
            RegularizerKind::KgVacuum => XiValue::Finite(self.kt * (k2 + m2).sqrt() / self.hbar),
            RegularizerKind::SharpCutoff { lambda } => {
                if k > lambda {
                    XiValue::Frozen
                } else {
                    XiValue::Finite(0.5 * (k2 + m2))
                }
            }
            RegularizerKind::ExpMass { lambda } => XiValue::Finite(0.5 * (k2 + m2 * (k / lambda).exp())),
            RegularizerKind::PowerLaw { alpha } => XiValue::Finite(0.5 * (k2 + m2).powf(alpha)),
        }
    }

    /// `ξ(k)` at a wavevector.
    pub fn xi(&self, k: &[f64; 3]) -> XiValue {
        self.xi_radial(norm(k))
    }

    /// Radius beyond which every mode is frozen, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match self.kind {
            RegularizerKind::SharpCutoff { lambda } => Some(lambda),
            _ => None,
        }
    }
}

impl fmt::Display for RegularizerKind {
    /// Same grammar the command line accepts: `kg`, `cutoff:L=2`, `expmass:L=2`, `power:a=2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularizerKind::KgVacuum => write!(f, "kg"),
            RegularizerKind::SharpCutoff { lambda } => write!(f, "cutoff:L={lambda}"),
            RegularizerKind::ExpMass { lambda } => write!(f, "expmass:L={lambda}"),
            RegularizerKind::PowerLaw { alpha } => write!(f, "power:a={alpha}"),
        }
    }
}

impl FromStr for RegularizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Params::parse(s)?;
        let kind = match p.name {
            "kg" => RegularizerKind::KgVacuum,
            "cutoff" => RegularizerKind::SharpCutoff { lambda: p.require("L")? },
            "expmass" => RegularizerKind::ExpMass { lambda: p.require("L")? },
            "power" => RegularizerKind::PowerLaw { alpha: p.require("a")? },
            other => {
                return Err(Error::Config(format!(
                    "unknown regularizer `{other}` (kg, cutoff:L=, expmass:L=, power:a=)"
                )))
            }
        };
        p.finish()?;
        Ok(kind)
    }
}
