//! Spectral integrals: inner products, smeared variances, two-point functions,
//! the overlap `θ`, boosted inner products and the anti-local kernel.
//!
//! All integrals are `∫d³k/(2π)³ f̃*(k) g̃(k) w(|k|)` for an isotropic weight `w`.
//! Three evaluation routes are used:
//!
//! * two Gaussians: the angular integral is closed-form (`sinc(k·|x₁-x₂|)`),
//!   leaving a tail-checked radial integral;
//! * a box with a weight `c·(k²+m²)^{-β}`: the separable proper-time route of
//!   [`proper_time`];
//! * anything else: a radial-angular product rule, Gauss–Legendre in `cos θ`
//!   and trapezoid in `φ`, with the angular order growing with `|k|`.

#![allow(clippy::excessive_precision)]

mod kernel;
mod proper_time;

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fault::Fault;
use crate::quadrature::{gauss_legendre, radial_integral, QuadratureSpec};
use crate::regularizer::{dispersion, Regularizer, RegularizerKind, XiValue};
use crate::testfn::{sinc, TestFunction};

pub use kernel::{antilocal_kernel, bessel_reference, kernel_oracle, KERNEL_CONSTANT};
pub(crate) use kernel::antilocal_kernel_with;
use proper_time::PowerForm;

/// The isotropic weight of a spectral integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralWeight {
    /// `ℏ/(2√(k²+m²))`, the quantized vacuum.
    Quantum { hbar: f64, mass: f64 },
    /// `kT/(2ξ(k))`; zero where the regularizer freezes modes.
    Classical(Regularizer),
}

impl SpectralWeight {
    pub fn quantum(mass: f64, hbar: f64) -> Result<Self> {
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::Config(format!("mass must be nonnegative, got {mass}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Config(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self::Quantum { hbar, mass })
    }

    pub fn mass(&self) -> f64 {
        match self {
            Self::Quantum { mass, .. } => *mass,
            Self::Classical(r) => r.mass(),
        }
    }

    /// `w(|k|)`.
    pub fn eval(&self, k: f64) -> f64 {
        match self {
            Self::Quantum { hbar, mass } => hbar / (2.0 * (k * k + mass * mass).sqrt()),
            Self::Classical(r) => match r.xi_radial(k) {
                XiValue::Finite(xi) => r.kt() / (2.0 * xi),
                XiValue::Frozen => 0.0,
            },
        }
    }

    fn power_form(&self) -> Option<PowerForm> {
        match self {
            Self::Quantum { hbar, mass } => Some(PowerForm { coef: 0.5 * hbar, beta: 0.5, mass: *mass }),
            Self::Classical(r) => match r.kind() {
                RegularizerKind::KgVacuum => Some(PowerForm {
                    coef: r.kt() / (2.0 * r.kt() / r.hbar()),
                    beta: 0.5,
                    mass: r.mass(),
                }),
                RegularizerKind::PowerLaw { alpha } => Some(PowerForm { coef: r.kt(), beta: alpha, mass: r.mass() }),
                _ => None,
            },
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match self {
            Self::Classical(r) => r.support_radius().into_iter().collect(),
            Self::Quantum { .. } => Vec::new(),
        }
    }
}

fn require_continuum(f: &TestFunction) -> Result<()> {
    f.validate()?;
    if matches!(f, TestFunction::Tabulated { .. }) {
        return Err(Error::Config(
            "tabulated test functions only have lattice transforms; use lattice sums".into(),
        ));
    }
    Ok(())
}

/// `∫d³k/(2π)³ f̃*(k) g̃(k) w(|k|)` for an arbitrary isotropic weight.
///
/// `breaks` lists radii where `w` is not smooth (cutoffs).
pub fn spectral_integral<W: Fn(f64) -> f64>(
    f: &TestFunction,
    g: &TestFunction,
    weight: W,
    breaks: &[f64],
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    require_continuum(f)?;
    require_continuum(g)?;
    quad.validate()?;
    match (f, g) {
        (
            TestFunction::Gaussian { center: c1, width: s1, amplitude: a1 },
            TestFunction::Gaussian { center: c2, width: s2, amplitude: a2 },
        ) => gaussian_pair(*a1, *s1, c1, *a2, *s2, c2, weight, breaks, quad).map(|v| Complex64::new(v, 0.0)),
        _ => full_rule(
            |k| f.fourier_continuum(k).unwrap().conj() * g.fourier_continuum(k).unwrap(),
            weight,
            f.extent() + g.extent(),
            breaks,
            quad,
        ),
    }
}

/// Closed-form angular reduction for two Gaussians.
#[allow(clippy::too_many_arguments)]
fn gaussian_pair<W: Fn(f64) -> f64>(
    a1: f64,
    s1: f64,
    c1: &[f64; 3],
    a2: f64,
    s2: f64,
    c2: &[f64; 3],
    weight: W,
    breaks: &[f64],
    quad: &QuadratureSpec,
) -> Result<f64> {
    let d = ((c1[0] - c2[0]).powi(2) + (c1[1] - c2[1]).powi(2) + (c1[2] - c2[2]).powi(2)).sqrt();
    let pref = a1 * a2 * (2.0 * PI).powi(3) * (s1 * s2).powi(3) / (2.0 * PI * PI);
    let beta = 0.5 * (s1 * s1 + s2 * s2);
    let mut edges = breaks.to_vec();
    // the Gaussian bulk sits below a few 1/√β; help the first pass find it
    edges.push(4.0 / beta.sqrt());
    let spec = QuadratureSpec { k_max: quad.k_max.max(8.0 / beta.sqrt()), ..*quad };
    radial_integral(|k: f64| pref * k * k * (-beta * k * k).exp() * sinc(k * d) * weight(k), &edges, &spec)
}

/// Angular points in `cos θ` for a shell of radius `k` and source reach `reach`.
fn angular_order(k: f64, reach: f64) -> usize {
    let n = (k * reach).ceil() + 16.0;
    if n.is_finite() {
        (n as usize).clamp(16, 512).div_ceil(8) * 8
    } else {
        512
    }
}

/// Full radial-angular product rule for a non-isotropic integrand `F(k)`.
fn full_rule<F, W>(integrand: F, weight: W, reach: f64, breaks: &[f64], quad: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(&[f64; 3]) -> Complex64,
    W: Fn(f64) -> f64,
{
    let rules: RefCell<HashMap<usize, (Vec<f64>, Vec<f64>)>> = RefCell::new(HashMap::new());
    let shell = |k: f64| -> Complex64 {
        let w = weight(k);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let n_mu = angular_order(k, reach);
        let n_phi = 2 * n_mu;
        let mut cache = rules.borrow_mut();
        let (nodes, weights) = cache.entry(n_mu).or_insert_with(|| gauss_legendre(n_mu));
        let mut sum = Complex64::new(0.0, 0.0);
        for (mu, wmu) in nodes.iter().zip(weights.iter()) {
            let sin_t = (1.0 - mu * mu).max(0.0).sqrt();
            let mut ring = Complex64::new(0.0, 0.0);
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                let kv = [k * sin_t * phi.cos(), k * sin_t * phi.sin(), k * mu];
                ring += integrand(&kv);
            }
            sum += ring * *wmu;
        }
        // (1/4π)∫dΩ → ½Σ_μ w_μ (1/n_φ)Σ_φ ; times k²/(2π²) from d³k/(2π)³
        sum * (0.5 / n_phi as f64) * (k * k * w / (2.0 * PI * PI))
    };
    radial_integral(shell, breaks, quad)
}

fn weighted_integral(f: &TestFunction, g: &TestFunction, w: &SpectralWeight, quad: &QuadratureSpec) -> Result<Complex64> {
    require_continuum(f)?;
    require_continuum(g)?;
    quad.validate()?;
    let has_box = matches!(f, TestFunction::Box { .. }) || matches!(g, TestFunction::Box { .. });
    if has_box {
        if let Some(form) = w.power_form() {
            return proper_time::integral(f, g, &form, quad.rel_tol).map(|v| Complex64::new(v, 0.0));
        }
    }
    spectral_integral(f, g, |k| w.eval(k), &w.breaks(), quad)
}

/// The relativistically invariant inner product `ℏ∫d³k/(2π)³ f̃*(k)g̃(k)/(2ω)`.
pub fn inner_product(f: &TestFunction, g: &TestFunction, mass: f64, hbar: f64, quad: &QuadratureSpec) -> Result<Complex64> {
    weighted_integral(f, g, &SpectralWeight::quantum(mass, hbar)?, quad)
}

/// Variance of the smeared field `φ_f` under the measure selected by `w`.
pub fn smeared_variance(f: &TestFunction, w: &SpectralWeight, quad: &QuadratureSpec) -> Result<f64> {
    Ok(weighted_integral(f, f, w, quad)?.re)
}

/// Covariance `⟨φ_f φ_g⟩` in the vacuum; the same integral as [`inner_product`].
pub fn connected_two_point(
    f: &TestFunction,
    g: &TestFunction,
    mass: f64,
    hbar: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    inner_product(f, g, mass, hbar, quad)
}

/// Covariance `⟨φ_f φ_g⟩` under an arbitrary weight.
pub fn weighted_two_point(f: &TestFunction, g: &TestFunction, w: &SpectralWeight, quad: &QuadratureSpec) -> Result<Complex64> {
    weighted_integral(f, g, w, quad)
}

/// `θ = |(f,g)|²/((f,f)(g,g))`.
pub fn theta(f: &TestFunction, g: &TestFunction, mass: f64, hbar: f64, quad: &QuadratureSpec) -> Result<f64> {
    let ff = inner_product(f, f, mass, hbar, quad)?.re;
    let gg = inner_product(g, g, mass, hbar, quad)?.re;
    let fg = inner_product(f, g, mass, hbar, quad)?;
    theta_from(ff, gg, fg, quad.rel_tol)
}

pub(crate) fn theta_from(ff: f64, gg: f64, fg: Complex64, rel_tol: f64) -> Result<f64> {
    for norm in [ff, gg] {
        if !(norm > f64::MIN_POSITIVE * 1e8) {
            return Err(Error::DegenerateTestFunction { norm });
        }
    }
    let t = fg.norm_sqr() / ff / gg;
    if !t.is_finite() {
        return Err(Error::DegenerateTestFunction { norm: ff.min(gg) });
    }
    if t > 1.0 + rel_tol || t < -rel_tol {
        return Err(Error::NonConvergent(format!(
            "overlap {t} violates Cauchy-Schwarz beyond tolerance {rel_tol}"
        )));
    }
    Ok(t.clamp(0.0, 1.0))
}

/// Boost of the on-shell momentum `(ω(k), k)` along `z` with rapidity `eta`.
fn boost(k: &[f64; 3], mass: f64, eta: f64) -> [f64; 3] {
    let w = dispersion(k, mass);
    [k[0], k[1], k[2] * eta.cosh() + w * eta.sinh()]
}

/// Inner product with both transforms pulled back through a boost along `z`.
///
/// The invariant measure `d³k/(2ω)` makes the result independent of `rapidity`.
pub fn boosted_inner_product(
    f: &TestFunction,
    g: &TestFunction,
    rapidity: f64,
    mass: f64,
    hbar: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    boosted_inner_product_with(f, g, rapidity, mass, hbar, quad, None)
}

pub(crate) fn boosted_inner_product_with(
    f: &TestFunction,
    g: &TestFunction,
    rapidity: f64,
    mass: f64,
    hbar: f64,
    quad: &QuadratureSpec,
    fault: Option<Fault>,
) -> Result<Complex64> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::Config(format!("boosts need a positive mass, got {mass}")));
    }
    if !rapidity.is_finite() {
        return Err(Error::Config(format!("rapidity must be finite, got {rapidity}")));
    }
    require_continuum(f)?;
    require_continuum(g)?;
    if rapidity == 0.0 && fault.is_none() {
        return inner_product(f, g, mass, hbar, quad);
    }
    let broken_measure = fault == Some(Fault::BoostMeasure);
    let integrand = |k: &[f64; 3]| {
        let kb = boost(k, mass, rapidity);
        let v = f.fourier_continuum(&kb).unwrap().conj() * g.fourier_continuum(&kb).unwrap();
        if broken_measure {
            // the boosted energy in place of the one the measure is built on
            v * (dispersion(k, mass) / dispersion(&kb, mass))
        } else {
            v
        }
    };
    let reach = (f.extent() + g.extent()) * rapidity.abs().exp();
    full_rule(integrand, |k| hbar / (2.0 * (k * k + mass * mass).sqrt()), reach, &[], quad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // (f,f) for a centered unit Gaussian, ℏ = 1: 50-digit quadrature references.
    const GOLDEN_NORMS: [(f64, f64, f64); 12] = [
        (0.0, 0.5, 0.1963495408493620774),
        (0.0, 1.0, 3.1415926535897932385),
        (0.0, 2.0, 50.265482457436691815),
        (0.5, 0.5, 0.17949700153054663781),
        (0.5, 1.0, 2.5022691812217427633),
        (0.5, 2.0, 30.332713492687875928),
        (1.0, 0.5, 0.15639182382635892271),
        (1.0, 1.0, 1.8957945932929922455),
        (1.0, 2.0, 19.292759950243957114),
        (5.0, 0.5, 0.063014513171761944477),
        (5.0, 1.0, 0.54125383944377828124),
        (5.0, 2.0, 4.4218612811048298285),
    ];

    #[test]
    fn gaussian_norms_match_references() {
        for (m, s, want) in GOLDEN_NORMS {
            let v = inner_product(&TestFunction::gaussian(s), &TestFunction::gaussian(s), m, 1.0, &q()).unwrap();
            assert!(rel(v.re, want) < 1e-11, "m={m} s={s}: {} vs {want}", v.re);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn massless_gaussian_closed_form() {
        // (f,f) = π s⁴ A² ℏ at m = 0
        for (s, a, hbar) in [(0.7, 1.3, 1.0), (1.5, 0.4, 2.5)] {
            let f = TestFunction::Gaussian { center: [0.2, 0.0, -1.0], width: s, amplitude: a };
            let v = inner_product(&f, &f, 0.0, hbar, &q()).unwrap().re;
            assert!(rel(v, PI * s.powi(4) * a * a * hbar) < 1e-11);
        }
    }

    #[test]
    fn two_point_of_separated_gaussians() {
        let table = [
            (1.0, 1.5373439458880454639),
            (2.0, 0.82922923976177145838),
            (3.0, 0.30969090511253495979),
            (4.0, 0.087217950744226194243),
        ];
        let f = TestFunction::gaussian(1.0);
        let mut last = f64::INFINITY;
        for (d, want) in table {
            let g = TestFunction::gaussian_at([d, 0.0, 0.0], 1.0);
            let v = connected_two_point(&f, &g, 1.0, 1.0, &q()).unwrap().re;
            assert!(rel(v, want) < 1e-10, "d={d}: {v} vs {want}");
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn theta_golden_value() {
        let t = theta(&TestFunction::gaussian(1.0), &TestFunction::gaussian(2.0), 1.0, 1.0, &q()).unwrap();
        assert!(rel(t, 0.57461548697309360985) < 1e-10, "{t}");
        let f = TestFunction::cube([0.0; 3], 0.5);
        assert_eq!(theta(&f, &f, 1.0, 1.0, &q()).unwrap(), 1.0);
    }

    #[test]
    fn theta_rejects_underflowing_norms() {
        let f = TestFunction::Gaussian { center: [0.0; 3], width: 1.0, amplitude: 1e-200 };
        let err = theta(&f, &TestFunction::gaussian(1.0), 1.0, 1.0, &q()).unwrap_err();
        assert!(matches!(err, Error::DegenerateTestFunction { .. }));
        assert!(theta_from(1.0, 1.0, Complex64::new(1.1, 0.0), 1e-12).is_err());
        assert_eq!(theta_from(1.0, 1.0, Complex64::new(1.0 + 1e-14, 0.0), 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn classical_matching_weight_reproduces_quantum() {
        for m in [0.0, 0.5, 1.0, 5.0] {
            for s in [0.5, 1.0, 2.0] {
                let f = TestFunction::gaussian(s);
                let quantum = smeared_variance(&f, &SpectralWeight::quantum(m, 1.0).unwrap(), &q()).unwrap();
                for kt in [1.0, 1e3] {
                    let reg = Regularizer::kg_vacuum(m, kt, 1.0).unwrap();
                    let classical = smeared_variance(&f, &SpectralWeight::Classical(reg), &q()).unwrap();
                    assert!(rel(classical, quantum) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn angular_reduction_agrees_with_full_rule() {
        let f = TestFunction::Gaussian { center: [0.3, -0.2, 0.5], width: 0.8, amplitude: 1.0 };
        let g = TestFunction::Gaussian { center: [-0.4, 0.1, 0.0], width: 1.1, amplitude: 2.0 };
        let w = |k: f64| 1.0 / (2.0 * (k * k + 1.0).sqrt());
        let reduced = spectral_integral(&f, &g, w, &[], &q()).unwrap();
        let full = full_rule(
            |k| f.fourier_continuum(k).unwrap().conj() * g.fourier_continuum(k).unwrap(),
            w,
            f.extent() + g.extent(),
            &[],
            &QuadratureSpec::with_rel_tol(1e-10),
        )
        .unwrap();
        assert!(rel(full.re, reduced.re) < 1e-9, "{full} vs {reduced}");
        assert!(full.im.abs() < 1e-9 * reduced.re);
    }

    #[test]
    fn proper_time_agrees_with_angular_reduction() {
        let f = TestFunction::Gaussian { center: [0.0, 0.0, 0.0], width: 1.0, amplitude: 1.0 };
        let g = TestFunction::Gaussian { center: [1.5, 0.5, 0.0], width: 0.7, amplitude: 1.5 };
        for (m, beta) in [(1.0, 0.5), (0.0, 0.5), (1.0, 2.0)] {
            let form = PowerForm { coef: 0.5, beta, mass: m };
            let pt = proper_time::integral(&f, &g, &form, 1e-12).unwrap();
            let w = |k: f64| 0.5 * (k * k + m * m).powf(-beta);
            let radial = spectral_integral(&f, &g, w, &[], &q()).unwrap().re;
            assert!(rel(pt, radial) < 1e-10, "m={m} beta={beta}: {pt} vs {radial}");
        }
    }

    #[test]
    fn boxes_agree_between_routes() {
        // a box against a Gaussian converges fast enough for the full rule
        let f = TestFunction::cube([0.0; 3], 0.5);
        let g = TestFunction::gaussian_at([0.5, 0.0, 0.0], 0.8);
        let pt = inner_product(&f, &g, 1.0, 1.0, &q()).unwrap().re;
        let full = spectral_integral(&f, &g, |k| 0.5 / (k * k + 1.0).sqrt(), &[], &QuadratureSpec::with_rel_tol(1e-8))
            .unwrap()
            .re;
        assert!(rel(full, pt) < 1e-7, "{full} vs {pt}");
    }

    #[test]
    fn parseval_against_position_space_overlap() {
        let f = TestFunction::Gaussian { center: [0.2, 0.0, 0.1], width: 0.9, amplitude: 1.0 };
        let g = TestFunction::Gaussian { center: [-0.3, 0.4, 0.0], width: 1.3, amplitude: 0.5 };
        let spectral = spectral_integral(&f, &g, |_| 1.0, &[], &q()).unwrap().re;
        let axis = |a: usize| {
            crate::quadrature::integrate(
                |x: f64| {
                    let (TestFunction::Gaussian { center: c1, width: s1, .. }, TestFunction::Gaussian { center: c2, width: s2, .. }) = (&f, &g) else {
                        unreachable!()
                    };
                    (-(x - c1[a]).powi(2) / (2.0 * s1 * s1) - (x - c2[a]).powi(2) / (2.0 * s2 * s2)).exp()
                },
                -30.0,
                30.0,
                1e-300,
                1e-13,
                1000,
            )
            .unwrap()
            .value
        };
        let direct = 0.5 * axis(0) * axis(1) * axis(2);
        assert!(rel(spectral, direct) < 1e-6);
    }

    #[test]
    fn disjoint_boxes_have_nonzero_overlap_decaying_with_distance() {
        let f = TestFunction::cube([0.0; 3], 0.5);
        let mut logs = Vec::new();
        for d in [2.0, 4.0, 6.0, 8.0] {
            let g = TestFunction::cube([d, 0.0, 0.0], 0.5);
            let v = inner_product(&f, &g, 1.0, 1.0, &q()).unwrap().re;
            assert!(v > 0.0);
            logs.push(v.ln());
        }
        for w in logs.windows(2) {
            assert!((w[1] - w[0]) / 2.0 <= -1.0, "{logs:?}");
        }
    }

    #[test]
    fn variance_weights_are_ordered() {
        // ξ₁ ≥ ξ₂ pointwise ⇒ σ²(ξ₁) ≤ σ²(ξ₂)
        let f = TestFunction::gaussian(1.0);
        let low = Regularizer::new(RegularizerKind::PowerLaw { alpha: 2.0 }, 1.5, 1.0, 1.0).unwrap();
        let high = Regularizer::new(RegularizerKind::PowerLaw { alpha: 2.5 }, 1.5, 1.0, 1.0).unwrap();
        let a = smeared_variance(&f, &SpectralWeight::Classical(low), &q()).unwrap();
        let b = smeared_variance(&f, &SpectralWeight::Classical(high), &q()).unwrap();
        assert!(b <= a);
    }

    #[test]
    fn sharp_cutoff_variance_grows_with_cutoff() {
        let f = TestFunction::gaussian(0.3);
        let mut last = 0.0;
        for lambda in [1.0, 2.0, 4.0, 8.0] {
            let reg = Regularizer::new(RegularizerKind::SharpCutoff { lambda }, 1.0, 1.0, 1.0).unwrap();
            let v = smeared_variance(&f, &SpectralWeight::Classical(reg), &q()).unwrap();
            assert!(v.is_finite() && v > last);
            last = v;
        }
    }

    #[test]
    fn power_law_box_variance_is_finite() {
        let reg = Regularizer::new(RegularizerKind::PowerLaw { alpha: 2.0 }, 1.0, 1.0, 1.0).unwrap();
        let v = smeared_variance(&TestFunction::cube([0.0; 3], 0.5), &SpectralWeight::Classical(reg), &q()).unwrap();
        assert!(v.is_finite() && v > 0.0);
        let massless = Regularizer::new(RegularizerKind::PowerLaw { alpha: 2.0 }, 0.0, 1.0, 1.0).unwrap();
        let err = smeared_variance(&TestFunction::cube([0.0; 3], 0.5), &SpectralWeight::Classical(massless), &q());
        assert!(matches!(err, Err(Error::Divergent(_))));
    }

    #[test]
    fn tabulated_functions_are_refused() {
        let t = TestFunction::tabulated(vec![1.0; 8]);
        assert!(matches!(inner_product(&t, &t, 1.0, 1.0, &q()), Err(Error::Config(_))));
    }

    #[test]
    fn boost_invariance() {
        let f = TestFunction::gaussian(1.0);
        let g = TestFunction::gaussian_at([0.0, 0.5, 1.0], 0.8);
        let quad = QuadratureSpec::with_rel_tol(1e-9);
        let base = inner_product(&f, &g, 1.0, 1.0, &quad).unwrap().re;
        assert_eq!(boosted_inner_product(&f, &g, 0.0, 1.0, 1.0, &quad).unwrap().re, base);
        for eta in [0.25, -0.5, 1.0] {
            let v = boosted_inner_product(&f, &g, eta, 1.0, 1.0, &quad).unwrap();
            assert!(rel(v.re, base) < 1e-7, "eta={eta}: {v} vs {base}");
        }
        let broken = boosted_inner_product_with(&f, &g, 0.5, 1.0, 1.0, &quad, Some(Fault::BoostMeasure)).unwrap();
        assert!(rel(broken.re, base) > 1e-3);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn conjugate_symmetry_and_cauchy_schwarz(
            x in -2.0f64..2.0, y in -2.0f64..2.0, s1 in 0.4f64..2.0, s2 in 0.4f64..2.0,
            h in 0.2f64..1.0, m in 0.0f64..3.0, use_box in proptest::bool::ANY,
        ) {
            let f = TestFunction::gaussian_at([x, y, 0.0], s1);
            let g = if use_box { TestFunction::cube([y, 0.0, x], h) } else { TestFunction::gaussian_at([0.0, x, y], s2) };
            let fg = inner_product(&f, &g, m, 1.0, &q()).unwrap();
            let gf = inner_product(&g, &f, m, 1.0, &q()).unwrap();
            proptest::prop_assert!((fg - gf.conj()).norm() <= 1e-10 * fg.norm().max(1e-300));
            let ff = inner_product(&f, &f, m, 1.0, &q()).unwrap().re;
            let gg = inner_product(&g, &g, m, 1.0, &q()).unwrap().re;
            proptest::prop_assert!(fg.norm_sqr() <= ff * gg * (1.0 + 1e-10));
        }

        #[test]
        fn classical_kg_weight_is_kt_invariant(s in 0.3f64..3.0, m in 0.0f64..5.0, scale in 1e-3f64..1e3) {
            let f = TestFunction::gaussian(s);
            let a = smeared_variance(&f, &SpectralWeight::Classical(Regularizer::kg_vacuum(m, 1.0, 1.0).unwrap()), &q()).unwrap();
            let b = smeared_variance(&f, &SpectralWeight::Classical(Regularizer::kg_vacuum(m, scale, 1.0).unwrap()), &q()).unwrap();
            proptest::prop_assert!(rel(a, b) < 1e-10);
        }
    }
}
