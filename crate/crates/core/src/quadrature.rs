//! Quadrature rules: adaptive Gauss–Kronrod, Gauss–Legendre and Gauss–Hermite,
//! and the tail-checked radial integrals used for the improper `d³k` integrals.

#![allow(clippy::excessive_precision)]

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values an integrator can accumulate.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod = kronrod + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    let err = (kronrod - gauss).magnitude();
    (kronrod, err)
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Globally adaptive Gauss–Kronrod (7/15) integration over `[a, b]`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<T: Scalar, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<Estimate<T>> {
    integrate_partitioned(f, a, b, 1, abs_tol, rel_tol, max_segments)
}

/// As [`integrate`], starting from `pieces` equal segments so that narrow
/// features of a long interval are not missed by the first coarse rule.
pub fn integrate_partitioned<T: Scalar, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    pieces: usize,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<Estimate<T>> {
    if a == b {
        return Ok(Estimate { value: T::zero(), error: 0.0 });
    }
    let pieces = pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = 0.0;
    for i in 0..pieces {
        let lo = a + width * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + width };
        let (value, err) = gk15(&f, lo, hi);
        total = total + value;
        total_err += err;
        heap.push(Segment { a: lo, b: hi, value, err });
    }
    while total_err > abs_tol.max(rel_tol * total.magnitude()) {
        if heap.len() >= max_segments.max(pieces + 1) {
            return Err(Error::NonConvergent(format!(
                "adaptive quadrature on [{a}, {b}] exhausted {max_segments} segments (error {total_err:e})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        total = total - worst.value + lv + rv;
        total_err = total_err - worst.err + le + re;
        heap.push(Segment { a: worst.a, b: mid, value: lv, err: le });
        heap.push(Segment { a: mid, b: worst.b, value: rv, err: re });
    }
    // resum in a fixed order to shed accumulated update roundoff
    let mut segs: Vec<_> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().fold(T::zero(), |acc, s| acc + s.value);
    let error = segs.iter().map(|s| s.err).sum();
    Ok(Estimate { value, error })
}

/// Controls the radial `|k|` integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Initial radial truncation; doubled until the tail is negligible.
    pub k_max: f64,
    pub rel_tol: f64,
    /// How many times `k_max` may be doubled before giving up.
    pub max_doublings: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { k_max: 16.0, rel_tol: 1e-12, max_doublings: 24 }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_max > 0.0 && self.k_max.is_finite()) {
            return Err(Error::Config(format!("k_max must be positive, got {}", self.k_max)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Config(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        Ok(())
    }
}

const MAX_SEGMENTS: usize = 4000;

/// `∫_0^∞ f(k) dk`, with interior `breaks` honoured and the tail checked.
///
/// The integral over `[0, K]` is accepted once the next shell `[K, 2K]` contributes
/// less than `rel_tol` of the running estimate. A tail that stops shrinking across
/// the whole refinement budget is reported as divergent.
pub fn radial_integral<T: Scalar, F: Fn(f64) -> T>(f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<T> {
    spec.validate()?;
    let mut edges: Vec<f64> = breaks.iter().copied().filter(|b| *b > 0.0 && b.is_finite()).collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let k_max = spec.k_max.max(edges.last().copied().unwrap_or(0.0));
    let piece_tol = 0.1 * spec.rel_tol;

    let mut total = T::zero();
    let mut lo = 0.0;
    for &e in edges.iter().filter(|e| **e < k_max) {
        total = total + integrate(&f, lo, e, 1e-300, piece_tol, MAX_SEGMENTS)?.value;
        lo = e;
    }
    total = total + integrate(&f, lo, k_max, 1e-300, piece_tol, MAX_SEGMENTS)?.value;

    let mut upper = k_max;
    let mut tails: Vec<f64> = Vec::new();
    for _ in 0..=spec.max_doublings {
        // the shell only needs accuracy relative to the running total
        let shell_abs = (piece_tol * total.magnitude()).max(1e-300);
        let mut shell = T::zero();
        let mut a = upper;
        for &e in edges.iter().filter(|e| **e > upper && **e < 2.0 * upper) {
            shell = shell + integrate(&f, a, e, shell_abs, piece_tol, MAX_SEGMENTS)?.value;
            a = e;
        }
        let shell_est = integrate(&f, a, 2.0 * upper, shell_abs, piece_tol, MAX_SEGMENTS)?;
        shell = shell + shell_est.value;
        let running = total + shell;
        if shell.magnitude() <= spec.rel_tol * running.magnitude() || running.magnitude() == 0.0 {
            return Ok(running);
        }
        tails.push(shell.magnitude());
        total = running;
        upper *= 2.0;
    }
    let growing = tails.len() >= 3 && {
        let t = &tails[tails.len() - 3..];
        t[2] >= 0.5 * t[1] && t[1] >= 0.5 * t[0]
    };
    if growing {
        Err(Error::Divergent(format!(
            "spectral integrand does not decay: shell contribution {:e} at |k| = {upper:e}",
            tails.last().unwrap()
        )))
    } else {
        Err(Error::NonConvergent(format!(
            "radial tail still {:e} of the estimate at |k| = {upper:e}",
            tails.last().unwrap() / total.magnitude()
        )))
    }
}

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// `n`-point Gauss–Hermite rule for `∫ g(x) e^{-x²} dx` (physicists' weight).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let (p, d) = hermite_normalized(n, z);
            pp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = hermite_normalized(n, z);
        if d != 0.0 {
            pp = d;
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    // nodes were generated largest-first
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Orthonormal Hermite recurrence: value and derivative of `H̃_n(x)`.
fn hermite_normalized(n: usize, x: f64) -> (f64, f64) {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = x * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    let d = (2.0 * n as f64).sqrt() * p2;
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_smooth_functions() {
        let est = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 0.0, 1e-14, 100).unwrap();
        assert!((est.value - 2.0).abs() < 1e-14);
        let est = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 0.0, 1e-12, 500).unwrap();
        assert!((est.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gk_complex() {
        let est = integrate(|x: f64| Complex64::from_polar(1.0, x), 0.0, 1.0, 0.0, 1e-14, 100).unwrap();
        let exact = Complex64::new(1f64.sin(), 1.0 - 1f64.cos());
        assert!((est.value - exact).norm() < 1e-14);
    }

    #[test]
    fn gk_budget_exhaustion() {
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-9, 1.0, 0.0, 1e-15, 5);
        assert!(matches!(r, Err(Error::NonConvergent(_))));
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for n in [1, 2, 5, 16, 64, 200] {
            let (x, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 2;
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((m - 2.0 / (deg as f64 + 1.0)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn hermite_rule_gaussian_moments() {
        let (x, w) = gauss_hermite(24);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        // ∫x^{2j} e^{-x²} = Γ(j+1/2)
        let mut gamma = sqrt_pi;
        for j in 0..20 {
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(2 * j)).sum();
            assert!((m - gamma).abs() < 1e-12 * gamma, "j={j}: {m} vs {gamma}");
            gamma *= j as f64 + 0.5;
        }
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn radial_integral_gaussian_and_tail_growth() {
        let spec = QuadratureSpec::default();
        let v = radial_integral(|k: f64| k * k * (-k * k).exp(), &[], &spec).unwrap();
        assert!((v - std::f64::consts::PI.sqrt() / 4.0).abs() < 1e-13);

        // wide integrand: starts well inside the bulk and has to double outward
        let v = radial_integral(|k: f64| (-k / 300.0).exp(), &[], &spec).unwrap();
        assert!((v - 300.0).abs() < 1e-8);

        let r = radial_integral(|k: f64| k, &[], &spec);
        assert!(matches!(r, Err(Error::Divergent(_))));
    }

    #[test]
    fn radial_integral_respects_breaks() {
        let spec = QuadratureSpec::default();
        let v = radial_integral(|k: f64| if k <= 2.5 { k * k } else { 0.0 }, &[2.5], &spec).unwrap();
        assert!((v - 2.5f64.powi(3) / 3.0).abs() < 1e-12);
    }
}
