//! One-sample Kolmogorov–Smirnov test with asymptotic critical values.

use crate::error::{Error, Result};

/// Smallest sample the asymptotic critical values are trusted for.
pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// `D_n = sup |F_emp - F|`.
    pub statistic: f64,
    /// `c(α)/√n`.
    pub critical: f64,
    pub pass: bool,
}

fn coefficient(alpha: f64) -> Result<f64> {
    if alpha == 0.01 {
        Ok(1.628)
    } else if alpha == 0.05 {
        Ok(1.358)
    } else {
        Err(Error::Config(format!("KS significance must be 0.01 or 0.05, got {alpha}")))
    }
}

/// Tests `samples` against the distribution function `cdf` at level `alpha`.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, alpha: f64) -> Result<KsResult> {
    let c = coefficient(alpha)?;
    let n = samples.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { required: MIN_SAMPLES, got: n });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / nf) - f).max(f - i as f64 / nf)
        })
        .fold(0.0, f64::max);
    let critical = c / nf.sqrt();
    Ok(KsResult { statistic, critical, pass: statistic < critical })
}
