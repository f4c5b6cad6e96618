//! Modified Bessel functions of the second kind.
//!
//! `K₀` and `K₁` come from their power series for `x ≤ 2` and from Steed's
//! continued fraction (Temme's CF2) above; `K₂ = K₀ + (2/x)·K₁` by upward
//! recurrence, which is stable for the second kind.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Above this argument `K₂` is reported as exactly zero.
pub const UNDERFLOW_ARGUMENT: f64 = 700.0;

/// `K₂(x)` for `x > 0`. Returns `0` for `x > 700` where the value is below `1e-305`.
pub fn bessel_k2(x: f64) -> Result<f64> {
    check_domain(x)?;
    if x > UNDERFLOW_ARGUMENT {
        return Ok(0.0);
    }
    if x <= 2.0 {
        let (k0, k1) = k0_k1_series(x);
        Ok(k0 + 2.0 * k1 / x)
    } else {
        Ok(bessel_k2_scaled(x)? * (-x).exp())
    }
}

/// `e^x·K₂(x)` for `x > 0`; never underflows.
pub fn bessel_k2_scaled(x: f64) -> Result<f64> {
    check_domain(x)?;
    let (k0, k1) = if x <= 2.0 {
        let (k0, k1) = k0_k1_series(x);
        (k0 * x.exp(), k1 * x.exp())
    } else {
        k0_k1_scaled_cf2(x)
    };
    Ok(k0 + 2.0 * k1 / x)
}

/// `K₀(x)` and `K₁(x)`.
pub fn bessel_k0_k1(x: f64) -> Result<(f64, f64)> {
    check_domain(x)?;
    if x <= 2.0 {
        Ok(k0_k1_series(x))
    } else {
        let (k0, k1) = k0_k1_scaled_cf2(x);
        let e = (-x).exp();
        Ok((k0 * e, k1 * e))
    }
}

fn check_domain(x: f64) -> Result<()> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("modified Bessel K needs x > 0, got {x}")))
    }
}

fn k0_k1_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // I₀, and Σ y^k/(k!)² H_k
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut k0_sum = 0.0;
    // I₁/(x/2), and Σ (ψ(k+1)+ψ(k+2)) y^k/(k!(k+1)!)
    let mut term1 = 1.0;
    let mut i1_half = 1.0;
    let mut psi_k1 = -EULER_GAMMA;
    let mut psi_k2 = 1.0 - EULER_GAMMA;
    let mut k1_sum = psi_k1 + psi_k2;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        k0_sum += term * harmonic;

        term1 *= y / (kf * (kf + 1.0));
        psi_k1 += 1.0 / kf;
        psi_k2 += 1.0 / (kf + 1.0);
        i1_half += term1;
        k1_sum += term1 * (psi_k1 + psi_k2);
        if term < 1e-18 * i0 && term1 < 1e-18 * i1_half {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_sum;
    let i1 = 0.5 * x * i1_half;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_sum;
    (k0, k1)
}

/// Steed's continued fraction for `e^x K₀(x)`, `e^x K₁(x)`; converges quickly for `x ≥ 2`.
fn k0_k1_scaled_cf2(x: f64) -> (f64, f64) {
    let nu = 0.0_f64;
    let mut bi = 2.0 * (1.0 + x);
    let mut di = 1.0 / bi;
    let mut delhi = di;
    let mut hi = di;
    let mut qi = 0.0;
    let mut qip1 = 1.0;
    let mut ai = -(0.25 - nu * nu);
    let a1 = ai;
    let mut ci = -ai;
    let mut bqi = -ai;
    let mut s = 1.0 + bqi * delhi;
    for i in 2..10_000 {
        ai -= 2.0 * (i - 1) as f64;
        ci = -ai * ci / i as f64;
        let tmp = (qi - bi * qip1) / ai;
        qi = qip1;
        qip1 = tmp;
        bqi += ci * qip1;
        bi += 2.0;
        di = 1.0 / (bi + ai * di);
        delhi *= bi * di - 1.0;
        hi += delhi;
        let dels = bqi * delhi;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    hi *= -a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (nu + x + 0.5 - hi) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent series for `K₂` (integer-order expansion with n = 2).
    fn k2_series_oracle(x: f64) -> f64 {
        let y = 0.25 * x * x;
        let mut i2_term = y / 2.0; // (x/2)²/2!
        let mut i2 = i2_term;
        let mut psi_k1 = -EULER_GAMMA;
        let mut psi_k3 = 1.5 - EULER_GAMMA;
        let mut series_term = 1.0 / 2.0; // y⁰/(0!·2!)
        let mut series = series_term * (psi_k1 + psi_k3);
        for k in 1..80 {
            let kf = k as f64;
            i2_term *= y / (kf * (kf + 2.0));
            i2 += i2_term;
            series_term *= y / (kf * (kf + 2.0));
            psi_k1 += 1.0 / kf;
            psi_k3 += 1.0 / (kf + 2.0);
            series += series_term * (psi_k1 + psi_k3);
        }
        2.0 / (x * x) * (1.0 - y) - (0.5 * x).ln() * i2 + 0.5 * y * series
    }

    /// `K₂(x) = ∫_0^∞ e^{-x cosh t} cosh(2t) dt` by the trapezoid rule, which
    /// converges geometrically for this doubly-exponentially decaying integrand.
    fn k2_integral_oracle(x: f64) -> f64 {
        let h = 0.01;
        let mut sum = 0.5 * (-x).exp();
        let mut t: f64 = h;
        loop {
            let v = (-x * t.cosh()).exp() * (2.0 * t).cosh();
            sum += v;
            if v < 1e-30 * sum {
                break;
            }
            t += h;
        }
        sum * h
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn small_argument_limit() {
        for x in [1e-6, 1e-5, 1e-4] {
            let v = bessel_k2(x).unwrap();
            assert!((x * x * v - 2.0).abs() < 1e-7, "x={x}");
        }
    }

    #[test]
    fn unit_argument_against_series() {
        let v = bessel_k2(1.0).unwrap();
        assert!(rel(v, k2_series_oracle(1.0)) < 1e-13);
        // 30-digit reference: K₂(1) = 1.62483889863517748...
        assert!(rel(v, 1.624_838_898_635_177_5) < 1e-14);
    }

    #[test]
    fn asymptotic_regime() {
        let x: f64 = 20.0;
        let v = bessel_k2(x).unwrap() * x.exp() * x.sqrt();
        let leading = (std::f64::consts::PI / 2.0).sqrt();
        assert!(rel(v, leading) < 1e-1);
        // with the 1 + 15/(8x) correction it is much closer
        assert!(rel(v, leading * (1.0 + 15.0 / (8.0 * x))) < 1e-2);
    }

    #[test]
    fn reference_values() {
        // mpmath besselk(2, x) at 30 digits
        let table = [
            (1e-6, 1999999999999.5),
            (1e-3, 1999999.5000009717109),
            (0.5, 7.5501835512408694366),
            (2.0, 0.25375975456605586294),
            (5.0, 0.0053089437122234599581),
            (10.0, 0.000021509817006932768731),
            (20.0, 6.3295436122922281105e-10),
            (100.0, 4.7502253038886402047e-45),
            (700.0, 4.6831281768188282127e-306),
        ];
        for (x, expected) in table {
            let v = bessel_k2(x).unwrap();
            assert!(rel(v, expected) < 1e-10, "x={x}: {v} vs {expected}");
        }
    }

    #[test]
    fn matches_oracles_across_range() {
        let mut x = 1e-3;
        while x < 50.0 {
            let v = bessel_k2(x).unwrap();
            let oracle = if x < 3.0 { k2_series_oracle(x) } else { k2_integral_oracle(x) };
            assert!(rel(v, oracle) < 1e-11, "x={x}: {v} vs {oracle}");
            if x > 0.05 {
                assert!(rel(v, k2_integral_oracle(x)) < 1e-11, "x={x}");
            }
            x *= 1.37;
        }
    }

    #[test]
    fn continuous_across_method_switch() {
        let below = bessel_k2(2.0).unwrap();
        let above = bessel_k2(2.0 + 1e-12).unwrap();
        assert!(rel(above, below) < 1e-11);
        let (k0s, k1s) = k0_k1_series(2.0);
        let (k0c, k1c) = k0_k1_scaled_cf2(2.0);
        let e = (-2.0f64).exp();
        assert!(rel(k0c * e, k0s) < 1e-14);
        assert!(rel(k1c * e, k1s) < 1e-14);
    }

    #[test]
    fn domain_and_underflow() {
        assert!(matches!(bessel_k2(0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_k2(-1.0), Err(Error::Domain(_))));
        assert!(bessel_k2(f64::NAN).is_err());
        assert_eq!(bessel_k2(701.0).unwrap(), 0.0);
        let scaled = bessel_k2_scaled(1000.0).unwrap();
        assert!(rel(scaled, (std::f64::consts::PI / 2000.0).sqrt() * (1.0 + 15.0 / 8000.0)) < 1e-5);
    }

    proptest::proptest! {
        #[test]
        fn positive_and_decreasing(x in 1e-4f64..600.0) {
            let a = bessel_k2(x).unwrap();
            let b = bessel_k2(x * 1.01).unwrap();
            proptest::prop_assert!(a > 0.0 && b < a);
        }
    }
}
