//! Marginal densities `ρ(q)` of a smeared field `φ_f` in vacuum, n-particle,
//! coherent and superposition states created with a test function `g`.
//!
//! Every density is a polynomial times the Gaussian `ρ₀(q) = e^{-q²/2(f,f)}/√(2π(f,f))`
//! (shifted by `2·Re(f,g)` for the coherent state). The densities use `ℏ = 1`.
//! `ρ₂` and `ρ₃` are kept exactly as they arise from the unnormalized states
//! `(a_g†)ⁿ|0⟩`, so their total masses are 2 and 6; [`cdf`] and
//! [`sample_density`] normalize.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_hermite, integrate};
use crate::rng::stream;

/// Which state the density belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    Vacuum,
    /// `(a_g†)ⁿ|0⟩`, `n ∈ {1, 2, 3}`.
    NParticle(u8),
    /// `exp(a_g†)|0⟩`.
    Coherent,
    /// `(u·a_g† + v)|0⟩`.
    Superposition { u: Complex64, v: Complex64 },
}

/// A state together with the inner products `(f,f)`, `(g,g)`, `(f,g)` it depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpec {
    pub kind: StateKind,
    pub ff: f64,
    pub gg: f64,
    pub fg: Complex64,
}

const CAUCHY_SCHWARZ_SLACK: f64 = 1e-12;

impl StateSpec {
    pub fn new(kind: StateKind, ff: f64, gg: f64, fg: Complex64) -> Result<Self> {
        if !(ff > 0.0 && ff.is_finite()) {
            return Err(Error::Config(format!("(f,f) must be positive, got {ff}")));
        }
        if !(gg > 0.0 && gg.is_finite()) {
            return Err(Error::Config(format!("(g,g) must be positive, got {gg}")));
        }
        if !(fg.re.is_finite() && fg.im.is_finite()) {
            return Err(Error::Config(format!("(f,g) must be finite, got {fg}")));
        }
        if fg.norm_sqr() > ff * gg * (1.0 + CAUCHY_SCHWARZ_SLACK) {
            return Err(Error::Config(format!(
                "|(f,g)|² = {} exceeds (f,f)(g,g) = {}",
                fg.norm_sqr(),
                ff * gg
            )));
        }
        match kind {
            StateKind::NParticle(n) if !(1..=3).contains(&n) => {
                return Err(Error::Config(format!("particle number must be 1, 2 or 3, got {n}")));
            }
            StateKind::Superposition { u, v } if u.norm_sqr() == 0.0 && v.norm_sqr() == 0.0 => {
                return Err(Error::Config("superposition needs (u, v) ≠ (0, 0)".into()));
            }
            StateKind::Superposition { u, v } if !(u.norm_sqr().is_finite() && v.norm_sqr().is_finite()) => {
                return Err(Error::Config("superposition coefficients must be finite".into()));
            }
            _ => {}
        }
        Ok(Self { kind, ff, gg, fg })
    }

    /// A state with `(g,g) = 1` and real `(f,g) = √(θ(f,f))`.
    pub fn with_theta(kind: StateKind, ff: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Config(format!("θ must lie in [0, 1], got {theta}")));
        }
        Self::new(kind, ff, 1.0, Complex64::new((theta * ff).sqrt(), 0.0))
    }

    /// `θ = |(f,g)|²/((f,f)(g,g))`, clamped to `[0, 1]`.
    pub fn theta(&self) -> f64 {
        (self.fg.norm_sqr() / (self.ff * self.gg)).clamp(0.0, 1.0)
    }

    /// Polynomial coefficients `c_n` with `ρ(q) = Σ c_n (q-μ)ⁿ · ρ₀(q-μ)`.
    fn polynomial(&self) -> Vec<f64> {
        let t = self.theta();
        let v = self.ff;
        match self.kind {
            StateKind::Vacuum | StateKind::Coherent => vec![1.0],
            StateKind::NParticle(1) => vec![1.0 - t, 0.0, t / v],
            StateKind::NParticle(2) => {
                vec![2.0 - 4.0 * t + 3.0 * t * t, 0.0, (4.0 * t - 6.0 * t * t) / v, 0.0, t * t / (v * v)]
            }
            StateKind::NParticle(_) => {
                let t2 = t * t;
                let t3 = t2 * t;
                vec![
                    6.0 - 18.0 * t + 27.0 * t2 - 15.0 * t3,
                    0.0,
                    (18.0 * t - 54.0 * t2 + 45.0 * t3) / v,
                    0.0,
                    (9.0 * t2 - 15.0 * t3) / (v * v),
                    0.0,
                    t3 / (v * v * v),
                ]
            }
            StateKind::Superposition { u, v: w } => {
                let d = u.norm_sqr() * self.gg + w.norm_sqr();
                let x = u.norm_sqr() * self.fg.norm_sqr() / (v * d);
                // v̄u(f,g) + ūv(g,f) = 2·Re(v̄u(f,g))
                let odd = 2.0 * (w.conj() * u * self.fg).re / d;
                vec![1.0 - x, odd / v, x / v]
            }
        }
    }

    fn center(&self) -> f64 {
        match self.kind {
            StateKind::Coherent => 2.0 * self.fg.re,
            _ => 0.0,
        }
    }
}

fn gaussian(x: f64, var: f64) -> f64 {
    (-0.5 * x * x / var).exp() / (2.0 * PI * var).sqrt()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// `ρ(q)` exactly as displayed for the state.
pub fn density(state: &StateSpec, q: f64) -> f64 {
    let x = q - state.center();
    horner(&state.polynomial(), x) * gaussian(x, state.ff)
}

const HERMITE_NODES: usize = 24;

/// `∫ q^order ρ(q) dq` by Gauss–Hermite quadrature about the Gaussian factor;
/// exact for every polynomial order used here.
fn raw_moment(state: &StateSpec, order: u32) -> f64 {
    let (x, w) = gauss_hermite(HERMITE_NODES);
    let scale = (2.0 * state.ff).sqrt();
    let mu = state.center();
    let poly = state.polynomial();
    let sum: f64 = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let d = scale * xi;
            wi * horner(&poly, d) * (mu + d).powi(order as i32)
        })
        .sum();
    sum / PI.sqrt()
}

/// `∫ρ(q)dq`.
pub fn total_mass(state: &StateSpec) -> f64 {
    raw_moment(state, 0)
}

/// `∫qᵏρ(q)dq / ∫ρ(q)dq` for `k ∈ 1..=6`.
pub fn moments(state: &StateSpec, order: u32) -> Result<f64> {
    if !(1..=6).contains(&order) {
        return Err(Error::Config(format!("moment order must be in 1..=6, got {order}")));
    }
    Ok(raw_moment(state, order) / total_mass(state))
}

fn phi(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Normalized cumulative distribution `∫_{-∞}^q ρ / ∫ρ`.
///
/// Uses the exact recurrence `J_n(x) = -(f,f)·xⁿ⁻¹ρ₀(x) + (f,f)(n-1)·J_{n-2}(x)`
/// for `J_n(x) = ∫_{-∞}^x yⁿρ₀(y)dy`.
pub fn cdf(state: &StateSpec, q: f64) -> f64 {
    let x = q - state.center();
    let v = state.ff;
    let poly = state.polynomial();
    let g = gaussian(x, v);
    let mut j = vec![0.0; poly.len().max(2)];
    j[0] = if x.is_infinite() { if x > 0.0 { 1.0 } else { 0.0 } } else { phi(x / v.sqrt()) };
    j[1] = if x.is_infinite() { 0.0 } else { -v * g };
    for n in 2..j.len() {
        let boundary = if x.is_infinite() { 0.0 } else { -v * x.powi(n as i32 - 1) * g };
        j[n] = boundary + v * (n - 1) as f64 * j[n - 2];
    }
    let value: f64 = poly.iter().zip(&j).map(|(c, jn)| c * jn).sum();
    (value / total_mass(state)).clamp(0.0, 1.0)
}

/// `∫e^{itq}ρ(q)dq / ∫ρ`, by adaptive quadrature over twenty standard deviations.
pub fn characteristic_function(state: &StateSpec, t: f64) -> Complex64 {
    let sd = state.ff.sqrt();
    let mu = state.center();
    let est = integrate(
        |q: f64| Complex64::from_polar(density(state, q), t * q),
        mu - 20.0 * sd,
        mu + 20.0 * sd,
        1e-15,
        1e-13,
        4000,
    )
    .expect("smooth integrand on a finite interval");
    est.value / total_mass(state)
}

/// Rejection envelope: Gaussians of variance `{1, 2, 3}·(f,f)` with these weights.
fn envelope_weights(kind: StateKind) -> Option<[f64; 3]> {
    match kind {
        StateKind::NParticle(2) => Some([0.3, 0.4, 0.3]),
        StateKind::NParticle(3) => Some([0.2, 0.3, 0.5]),
        StateKind::Superposition { .. } => Some([0.4, 0.4, 0.2]),
        _ => None,
    }
}

const MIN_ACCEPTANCE: f64 = 0.01;

/// `count` independent draws from the normalized density.
///
/// Vacuum and coherent states are sampled directly; the one-particle density is
/// the mixture `(1-θ)·ρ₀ + θ·(q²/(f,f))ρ₀` of a Gaussian and a signed `χ₃`;
/// the rest use rejection from a Gaussian-mixture envelope. Draw `i` uses its
/// own random stream, so results do not depend on thread count.
pub fn sample_density(state: &StateSpec, count: usize, seed: u64) -> Result<Vec<f64>> {
    let sd = state.ff.sqrt();
    let mu = state.center();
    match state.kind {
        StateKind::Vacuum | StateKind::Coherent => Ok((0..count)
            .into_par_iter()
            .map(|i| {
                let z: f64 = stream(seed, i as u64).sample(StandardNormal);
                mu + sd * z
            })
            .collect()),
        StateKind::NParticle(1) => {
            let theta = state.theta();
            Ok((0..count)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream(seed, i as u64);
                    let pick: f64 = rng.random();
                    if pick < theta {
                        let r: f64 = (0..3).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).sum::<f64>().sqrt();
                        if rng.random::<bool>() {
                            sd * r
                        } else {
                            -sd * r
                        }
                    } else {
                        sd * rng.sample::<f64, _>(StandardNormal)
                    }
                })
                .collect())
        }
        kind => rejection_sample(state, envelope_weights(kind).expect("envelope for every remaining kind"), count, seed),
    }
}

fn rejection_sample(state: &StateSpec, weights: [f64; 3], count: usize, seed: u64) -> Result<Vec<f64>> {
    let v = state.ff;
    let mass = total_mass(state);
    let target = |q: f64| density(state, q) / mass;
    let envelope = |q: f64| (0..3).map(|i| weights[i] * gaussian(q, (i + 1) as f64 * v)).sum::<f64>();
    let sd = v.sqrt();
    let bound = (-4000..=4000)
        .map(|i| {
            let q = 12.0 * sd * i as f64 / 4000.0;
            target(q) / envelope(q)
        })
        .fold(0.0, f64::max)
        * 1.05;
    if 1.0 / bound < MIN_ACCEPTANCE {
        return Err(Error::EnvelopeFailure { rate: 1.0 / bound });
    }
    let draws: Vec<(f64, u64)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let mut tries = 0u64;
            loop {
                tries += 1;
                let pick: f64 = rng.random();
                let comp = if pick < weights[0] {
                    1.0
                } else if pick < weights[0] + weights[1] {
                    2.0
                } else {
                    3.0
                };
                let q = (comp * v).sqrt() * rng.sample::<f64, _>(StandardNormal);
                let u: f64 = rng.random();
                if u * bound * envelope(q) <= target(q) {
                    return (q, tries);
                }
            }
        })
        .collect();
    let tries: u64 = draws.iter().map(|d| d.1).sum();
    let rate = count as f64 / tries.max(1) as f64;
    if count > 0 && rate < MIN_ACCEPTANCE {
        return Err(Error::EnvelopeFailure { rate });
    }
    Ok(draws.into_iter().map(|d| d.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

    fn kinds() -> Vec<StateKind> {
        vec![
            StateKind::Vacuum,
            StateKind::NParticle(1),
            StateKind::NParticle(2),
            StateKind::NParticle(3),
            StateKind::Coherent,
            StateKind::Superposition { u: Complex64::new(0.6, 0.3), v: Complex64::new(-0.2, 0.9) },
        ]
    }

    /// `Σ c_n E[xⁿ]` with `E[x²ᵏ] = (2k-1)!!·vᵏ`, odd moments zero.
    fn gaussian_moment_mass(s: &StateSpec) -> f64 {
        let v = s.ff;
        let even = [1.0, v, 3.0 * v * v, 15.0 * v * v * v];
        s.polynomial().iter().enumerate().map(|(n, c)| if n % 2 == 0 { c * even[n / 2] } else { 0.0 }).sum()
    }

    #[test]
    fn masses_are_fixed_by_kind() {
        let expected = [1.0, 1.0, 2.0, 6.0, 1.0, 1.0];
        for (kind, want) in kinds().into_iter().zip(expected) {
            for theta in THETAS {
                for ff in [0.3, 1.0, 7.0] {
                    let s = StateSpec::with_theta(kind, ff, theta).unwrap();
                    assert!((total_mass(&s) - want).abs() < 1e-8, "{kind:?} θ={theta}");
                    assert!((gaussian_moment_mass(&s) - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn reductions() {
        let ff: f64 = 1.7;
        let q_grid: Vec<f64> = (-80..=80).map(|i| i as f64 * 0.1 * ff.sqrt()).collect();
        let vac = StateSpec::with_theta(StateKind::Vacuum, ff, 0.0).unwrap();
        let one0 = StateSpec::with_theta(StateKind::NParticle(1), ff, 0.0).unwrap();
        let one1 = StateSpec::with_theta(StateKind::NParticle(1), ff, 1.0).unwrap();
        for &q in &q_grid {
            let r0 = density(&vac, q);
            assert!((density(&one0, q) - r0).abs() <= 1e-12 * r0.max(1e-300));
            assert!((density(&one1, q) - q * q / ff * r0).abs() <= 1e-12 * r0.max(1e-300));
            let two0 = StateSpec::with_theta(StateKind::NParticle(2), ff, 0.0).unwrap();
            assert!((density(&two0, q) - 2.0 * r0).abs() <= 1e-12 * r0.max(1e-300));
            let three0 = StateSpec::with_theta(StateKind::NParticle(3), ff, 0.0).unwrap();
            assert!((density(&three0, q) - 6.0 * r0).abs() <= 1e-12 * r0.max(1e-300));
        }
        // superposition with v = 0 is the one-particle density with (g,g)-normalized θ
        let fg = Complex64::new(0.4, -0.7);
        let sup = StateSpec::new(
            StateKind::Superposition { u: Complex64::new(0.3, 1.1), v: Complex64::new(0.0, 0.0) },
            ff,
            2.0,
            fg,
        )
        .unwrap();
        let one = StateSpec::new(StateKind::NParticle(1), ff, 2.0, fg).unwrap();
        for &q in &q_grid {
            let r = density(&one, q);
            assert!((density(&sup, q) - r).abs() <= 1e-12 * r.max(1e-300));
        }
        // coherent with purely imaginary (f,g) has no shift
        let coh = StateSpec::new(StateKind::Coherent, ff, 1.0, Complex64::new(0.0, 0.5)).unwrap();
        for &q in &q_grid {
            assert_eq!(density(&coh, q), density(&vac, q));
        }
    }

    #[test]
    fn moment_examples() {
        for theta in THETAS {
            let s = StateSpec::with_theta(StateKind::NParticle(1), 2.0, theta).unwrap();
            assert!((moments(&s, 2).unwrap() - 2.0 * (1.0 + 2.0 * theta)).abs() < 1e-12);
            for kind in [StateKind::Vacuum, StateKind::NParticle(1), StateKind::NParticle(2), StateKind::NParticle(3)] {
                let s = StateSpec::with_theta(kind, 2.0, theta).unwrap();
                for k in [1, 3, 5] {
                    assert!(moments(&s, k).unwrap().abs() < 1e-12);
                }
            }
        }
        let coh = StateSpec::new(StateKind::Coherent, 1.0, 1.0, Complex64::new(0.3, 0.2)).unwrap();
        assert!((moments(&coh, 1).unwrap() - 0.6).abs() < 1e-13);
        assert!(moments(&coh, 7).is_err());
    }

    #[test]
    fn cdf_examples() {
        for kind in [StateKind::Vacuum, StateKind::NParticle(1), StateKind::NParticle(2), StateKind::NParticle(3)] {
            let s = StateSpec::with_theta(kind, 1.3, 0.5).unwrap();
            assert!((cdf(&s, 0.0) - 0.5).abs() < 1e-14);
            assert_eq!(cdf(&s, f64::NEG_INFINITY), 0.0);
            assert!((cdf(&s, f64::INFINITY) - 1.0).abs() < 1e-14);
        }
        let coh = StateSpec::new(StateKind::Coherent, 1.0, 1.0, Complex64::new(0.45, 0.0)).unwrap();
        assert!((cdf(&coh, 0.9) - 0.5).abs() < 1e-14);
        let one1 = StateSpec::with_theta(StateKind::NParticle(1), 1.0, 1.0).unwrap();
        assert_eq!(density(&one1, 0.0), 0.0);
        let h = 1e-4;
        assert!((cdf(&one1, h) - cdf(&one1, -h)) / (2.0 * h) < 1e-7);
    }

    #[test]
    fn cdf_matches_quadrature_of_density() {
        for kind in kinds() {
            let s = StateSpec::new(kind, 0.8, 1.5, Complex64::new(0.5, 0.3)).unwrap();
            let mass = total_mass(&s);
            let mut last = 0.0;
            for i in -20..=20 {
                let q = 0.3 * i as f64;
                let direct = integrate(|x: f64| density(&s, x), -30.0, q, 1e-300, 1e-13, 2000).unwrap().value / mass;
                let c = cdf(&s, q);
                assert!((c - direct).abs() < 1e-12, "{kind:?} q={q}: {c} vs {direct}");
                assert!(c >= last);
                last = c;
            }
        }
    }

    #[test]
    fn densities_are_nonnegative() {
        for kind in kinds() {
            for theta in THETAS {
                let s = StateSpec::with_theta(kind, 1.0, theta).unwrap();
                for i in -800..=800 {
                    assert!(density(&s, i as f64 * 0.01) >= 0.0, "{kind:?} θ={theta}");
                }
            }
        }
    }

    #[test]
    fn one_particle_characteristic_function() {
        for theta in THETAS {
            let ff = 1.4;
            let s = StateSpec::with_theta(StateKind::NParticle(1), ff, theta).unwrap();
            for i in 0..=20 {
                let t = 0.2 * i as f64;
                let got = characteristic_function(&s, t);
                let want = (1.0 - theta * ff * t * t) * (-0.5 * ff * t * t).exp();
                assert!((got.re - want).abs() < 1e-8 && got.im.abs() < 1e-8, "θ={theta} t={t}");
            }
        }
    }

    #[test]
    fn invalid_states_are_rejected() {
        assert!(StateSpec::new(StateKind::NParticle(4), 1.0, 1.0, Complex64::new(0.0, 0.0)).is_err());
        assert!(StateSpec::new(StateKind::Vacuum, 1.0, 1.0, Complex64::new(2.0, 0.0)).is_err());
        assert!(StateSpec::new(StateKind::Vacuum, 0.0, 1.0, Complex64::new(0.0, 0.0)).is_err());
        let zero = Complex64::new(0.0, 0.0);
        assert!(StateSpec::new(StateKind::Superposition { u: zero, v: zero }, 1.0, 1.0, zero).is_err());
        assert!(StateSpec::with_theta(StateKind::Vacuum, 1.0, 1.5).is_err());
    }

    #[test]
    fn signed_maxwell_moment_ratio() {
        let ff = 2.0;
        let s = StateSpec::with_theta(StateKind::NParticle(1), ff, 1.0).unwrap();
        let x = sample_density(&s, 100_000, 3).unwrap();
        let q2: Vec<f64> = x.iter().map(|v| v * v).collect();
        let q4: Vec<f64> = x.iter().map(|v| v.powi(4)).collect();
        // ratio of means; first-order error propagation for its standard error
        let (m2, m4) = (mean(&q2), mean(&q4));
        let n = x.len() as f64;
        let (v2, v4, c24) = (var(&q2, m2), var(&q4, m4), cov(&q2, m2, &q4, m4));
        let r = m4 / m2;
        let se = ((v4 / (m2 * m2) - 2.0 * r * c24 / (m2 * m2) + r * r * v2 / (m2 * m2)) / n).sqrt();
        assert!(((r - 5.0 * ff) / se).abs() < 4.0, "{r} ± {se}");
    }

    fn mean(x: &[f64]) -> f64 {
        x.iter().sum::<f64>() / x.len() as f64
    }
    fn var(x: &[f64], m: f64) -> f64 {
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
    }
    fn cov(x: &[f64], mx: f64, y: &[f64], my: f64) -> f64 {
        x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (x.len() as f64 - 1.0)
    }

    #[test]
    fn samplers_reproduce_low_moments() {
        for kind in kinds() {
            let s = StateSpec::new(kind, 1.2, 1.0, Complex64::new(0.6, 0.2)).unwrap();
            let x = sample_density(&s, 40_000, 17).unwrap();
            let m1 = moments(&s, 1).unwrap();
            let m2 = moments(&s, 2).unwrap();
            let sd = (m2 - m1 * m1).sqrt();
            let se = sd / (x.len() as f64).sqrt();
            assert!(((mean(&x) - m1) / se).abs() < 4.0, "{kind:?}");
            assert_eq!(x, sample_density(&s, 40_000, 17).unwrap());
        }
    }
}
