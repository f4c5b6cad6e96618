//! Separable route for weights of the form `c·(k²+m²)^{-β}`.
//!
//! Writing `(k²+m²)^{-β} = Γ(β)⁻¹ ∫_0^∞ t^{β-1} e^{-t(k²+m²)} dt`, the spectral
//! integral becomes a one-dimensional `t` integral of position-space overlaps
//! through a heat kernel of variance `2t` per axis. For Gaussians and boxes each
//! overlap factorizes into three closed-form 1-D pieces, which sidesteps the
//! slowly decaying `sinc` transforms of boxes.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::quadrature::integrate_partitioned;
use crate::testfn::TestFunction;

/// `weight(k) = coef·(k²+mass²)^{-beta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PowerForm {
    pub coef: f64,
    pub beta: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy)]
enum Profile {
    Gauss { center: f64, var: f64, amp: f64 },
    Interval { center: f64, half: f64 },
}

impl Profile {
    fn scale(&self) -> f64 {
        match *self {
            Profile::Gauss { var, .. } => var.sqrt(),
            Profile::Interval { half, .. } => half,
        }
    }

    fn reach(&self) -> f64 {
        match *self {
            Profile::Gauss { center, var, .. } => center.abs() + 8.0 * var.sqrt(),
            Profile::Interval { center, half } => center.abs() + half,
        }
    }
}

fn profiles(f: &TestFunction) -> Option<[Profile; 3]> {
    match f {
        TestFunction::Gaussian { center, width, amplitude } => {
            let var = width * width;
            // the amplitude rides on the first axis only
            Some([
                Profile::Gauss { center: center[0], var, amp: *amplitude },
                Profile::Gauss { center: center[1], var, amp: 1.0 },
                Profile::Gauss { center: center[2], var, amp: 1.0 },
            ])
        }
        TestFunction::Box { center, half_widths } => Some(std::array::from_fn(|i| Profile::Interval {
            center: center[i],
            half: half_widths[i],
        })),
        TestFunction::Tabulated { .. } => None,
    }
}

/// Upper tail of the standard normal.
fn phi_c(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

fn density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `Φ(b) - Φ(a)` for `a ≤ b`, without cancellation in either tail.
fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        phi_c(a) - phi_c(b)
    } else if b <= 0.0 {
        phi_c(-b) - phi_c(-a)
    } else {
        1.0 - phi_c(b) - phi_c(-a)
    }
}

/// `h(ζ) = φ(ζ) - ζ·Φc(ζ)` for `ζ ≥ 0`: the smoothing correction of a ramp.
fn ramp(zeta: f64) -> f64 {
    if zeta < 10.0 {
        return density(zeta) - zeta * phi_c(zeta);
    }
    // φ(ζ)·Σ_{n≥1} (-1)^{n+1}(2n-1)!!/ζ^{2n}
    let inv2 = 1.0 / (zeta * zeta);
    let mut term = inv2;
    let mut sum = term;
    for n in 2..60 {
        term *= -((2 * n - 1) as f64) * inv2;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    density(zeta) * sum
}

/// `∫∫ a(x) b(y) N(x - y; 0, tau) dx dy`.
fn overlap(a: &Profile, b: &Profile, tau: f64) -> f64 {
    match (*a, *b) {
        (Profile::Gauss { center: c1, var: v1, amp: a1 }, Profile::Gauss { center: c2, var: v2, amp: a2 }) => {
            let v = v1 + v2 + tau;
            let d = c1 - c2;
            a1 * a2 * 2.0 * PI * (v1 * v2).sqrt() * (-0.5 * d * d / v).exp() / (2.0 * PI * v).sqrt()
        }
        (Profile::Interval { center: c1, half }, Profile::Gauss { center: c2, var, amp })
        | (Profile::Gauss { center: c2, var, amp }, Profile::Interval { center: c1, half }) => {
            let s = (var + tau).sqrt();
            amp * (2.0 * PI * var).sqrt() * normal_mass((c1 - half - c2) / s, (c1 + half - c2) / s)
        }
        (Profile::Interval { center: c1, half: a1 }, Profile::Interval { center: c2, half: a2 }) => {
            let d = c1 - c2;
            let flat = (a1.min(a2 - d) - (-a1).max(-a2 - d)).max(0.0);
            if tau == 0.0 {
                return flat;
            }
            let s = tau.sqrt();
            let h = |z: f64| ramp(z.abs() / s);
            flat + s * (h(d + a1 + a2) - h(d + a2 - a1) - h(d - a2 + a1) + h(d - a1 - a2))
        }
    }
}

/// `∫d³k/(2π)³ f̃*(k) g̃(k)·coef·(k²+m²)^{-β}` for Gaussians and boxes.
pub(crate) fn integral(f: &TestFunction, g: &TestFunction, form: &PowerForm, rel_tol: f64) -> Result<f64> {
    let (pf, pg) = match (profiles(f), profiles(g)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Config("separable route needs Gaussian or box test functions".into())),
    };
    let PowerForm { coef, beta, mass } = *form;
    let m2 = mass * mass;
    if m2 == 0.0 && beta >= 1.5 {
        return Err(Error::Divergent(format!(
            "weight (k²)^-{beta} is not integrable at k = 0 in three dimensions"
        )));
    }

    let small = pf.iter().chain(pg.iter()).map(Profile::scale).fold(f64::INFINITY, f64::min);
    let large = pf.iter().chain(pg.iter()).map(Profile::reach).fold(0.0, f64::max) * 2.0;
    // below u_lo the integrand is e^{βu}·∫fg ≲ e^{-45}; above u_hi the mass or the
    // t^{β-3/2} decay has killed it
    let u_lo = (small * small).ln() - 45.0 / beta;
    let mut u_hi = (large * large).ln() + if beta < 1.5 { 45.0 / (1.5 - beta) } else { 0.0 };
    if m2 > 0.0 {
        let mass_cut = (60.0 / m2).ln();
        u_hi = if beta < 1.5 { u_hi.min(mass_cut) } else { mass_cut };
    }
    if u_hi <= u_lo {
        u_hi = u_lo + 1.0;
    }
    let pieces = (u_hi - u_lo).ceil() as usize;

    let integrand = |u: f64| {
        let t = u.exp();
        let tau = 2.0 * t;
        let p: f64 = (0..3).map(|i| overlap(&pf[i], &pg[i], tau)).product();
        (beta * u - m2 * t).exp() * p
    };
    let est = integrate_partitioned(integrand, u_lo, u_hi, pieces, 1e-300, 0.1 * rel_tol, 20_000)?;
    Ok(coef / libm::tgamma(beta) * est.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `∫∫ a(x) b(y) N(x-y; 0, τ)` by brute-force 2-D Gauss–Kronrod.
    fn overlap_oracle(a: &Profile, b: &Profile, tau: f64) -> f64 {
        let value = |p: &Profile, x: f64| match *p {
            Profile::Gauss { center, var, amp } => amp * (-0.5 * (x - center).powi(2) / var).exp(),
            Profile::Interval { center, half } => {
                if (x - center).abs() < half {
                    1.0
                } else {
                    0.0
                }
            }
        };
        let range = |p: &Profile| match *p {
            Profile::Gauss { center, var, .. } => (center - 12.0 * var.sqrt(), center + 12.0 * var.sqrt()),
            Profile::Interval { center, half } => (center - half, center + half),
        };
        let (xa, xb) = range(a);
        let (ya, yb) = range(b);
        let inner = |x: f64| {
            crate::quadrature::integrate(
                |y: f64| value(b, y) * density((x - y) / tau.sqrt()) / tau.sqrt(),
                ya,
                yb,
                1e-300,
                1e-12,
                2000,
            )
            .unwrap()
            .value
        };
        crate::quadrature::integrate(|x: f64| value(a, x) * inner(x), xa, xb, 1e-300, 1e-11, 2000)
            .unwrap()
            .value
    }

    #[test]
    fn one_dimensional_overlaps_match_brute_force() {
        let cases = [
            (Profile::Interval { center: 0.0, half: 0.5 }, Profile::Interval { center: 2.0, half: 0.5 }),
            (Profile::Interval { center: 0.3, half: 1.0 }, Profile::Interval { center: 0.0, half: 0.25 }),
            (Profile::Interval { center: 0.0, half: 0.5 }, Profile::Gauss { center: 1.5, var: 0.36, amp: 2.0 }),
            (Profile::Gauss { center: -1.0, var: 0.5, amp: 1.0 }, Profile::Gauss { center: 1.0, var: 2.0, amp: 3.0 }),
        ];
        for (a, b) in cases {
            for tau in [0.01, 0.3, 2.0] {
                let got = overlap(&a, &b, tau);
                let want = overlap_oracle(&a, &b, tau);
                assert!(((got - want) / want).abs() < 1e-9, "{a:?} {b:?} tau={tau}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn ramp_series_joins_direct_formula() {
        let direct = |z: f64| density(z) - z * phi_c(z);
        let (a, b) = (ramp(10.0), direct(10.0));
        assert!(((a - b) / b).abs() < 1e-11);
        assert!(ramp(40.0) == 0.0 || ramp(40.0) < 1e-300);
    }

    #[test]
    fn box_limit_without_smoothing_is_interval_overlap() {
        let a = Profile::Interval { center: 0.0, half: 1.0 };
        let b = Profile::Interval { center: 0.5, half: 1.0 };
        assert!((overlap(&a, &b, 0.0) - 1.5).abs() < 1e-15);
        let c = Profile::Interval { center: 3.0, half: 1.0 };
        assert_eq!(overlap(&a, &c, 0.0), 0.0);
    }
}
