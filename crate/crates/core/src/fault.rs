//! Deliberate defects used to check that the verification suites can fail.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A known-wrong variant of one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fault {
    /// Anti-local kernel constant off by 1%.
    KernelConstant,
    /// Sampler writes `φ̃(-k) = φ̃(k)` instead of its conjugate.
    HermitianSymmetry,
    /// One-particle amplitude drawn from a unit-variance Maxwell instead of `χ₃`.
    MaxwellScale,
    /// Boosted inner product uses the boosted energy in the measure.
    BoostMeasure,
    /// Energy-momentum tensor built with `k⁰ = |k|` instead of `ω`.
    OffShellEnergy,
}

impl Fault {
    pub const ALL: [Fault; 5] = [
        Fault::KernelConstant,
        Fault::HermitianSymmetry,
        Fault::MaxwellScale,
        Fault::BoostMeasure,
        Fault::OffShellEnergy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fault::KernelConstant => "kernel-constant",
            Fault::HermitianSymmetry => "hermitian",
            Fault::MaxwellScale => "maxwell-scale",
            Fault::BoostMeasure => "boost-measure",
            Fault::OffShellEnergy => "off-shell",
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown fault `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Fault::ALL {
            assert_eq!(f.name().parse::<Fault>().unwrap(), f);
        }
        assert!("nope".parse::<Fault>().is_err());
    }
}
