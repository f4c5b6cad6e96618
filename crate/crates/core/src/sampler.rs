//! Gibbs-measure ensembles on a periodic lattice, smeared observables and `T^{μν}`.
//!
//! Normalization: `φ(x) = (1/V) Σ_k φ̃(k) e^{ik·x}` with `⟨|φ̃(k)|²⟩ = V·kT/(2ξ(k))`.
//! Then `φ_f = (1/V) Σ_k φ̃(k) f̃*(k)` has variance `(1/V) Σ_k |f̃(k)|² kT/(2ξ(k))`,
//! the Riemann sum of `∫d³k/(2π)³ |f̃|² kT/(2ξ)` on the grid `dk = 2π/L`, so the
//! lattice reproduces the continuum integrals as `L → ∞` and `a → 0`.
//!
//! Ensembles are lazy: configuration `i` is regenerated on demand from its own
//! random stream, and the estimators stream over samples without storing them.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fault::Fault;
use crate::lattice::{norm, LatticeSpec};
use crate::regularizer::{dispersion, Regularizer};
use crate::rng::{normal_pair, stream};
use crate::testfn::TestFunction;

/// Relative size of the imaginary part a smear may carry before it is rejected.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Lattice, measure, sample count and seed of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub lattice: LatticeSpec,
    pub reg: Regularizer,
    pub count: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(lattice: LatticeSpec, reg: Regularizer, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::Config("an ensemble needs at least one sample".into()));
        }
        Ok(Self { lattice, reg, count, seed })
    }
}

/// Fourier coefficients `φ̃(k)` of one field on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfiguration {
    lattice: LatticeSpec,
    coefficients: Vec<Complex64>,
}

impl FieldConfiguration {
    pub fn zeros(lattice: LatticeSpec) -> Self {
        Self { lattice, coefficients: vec![Complex64::new(0.0, 0.0); lattice.mode_count()] }
    }

    /// Wraps raw coefficients; Hermitian symmetry is not enforced here (see
    /// [`FieldConfiguration::hermitian_residue`]).
    pub fn from_coefficients(lattice: LatticeSpec, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != lattice.mode_count() {
            return Err(Error::Config(format!(
                "{} coefficients for a lattice with {} modes",
                coefficients.len(),
                lattice.mode_count()
            )));
        }
        Ok(Self { lattice, coefficients })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `max_k |φ̃(-k) - φ̃(k)*| / max_k |φ̃(k)|`; zero for a real field.
    pub fn hermitian_residue(&self) -> f64 {
        let scale = self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let worst = (0..self.coefficients.len())
            .map(|i| (self.coefficients[self.lattice.partner(i)] - self.coefficients[i].conj()).norm())
            .fold(0.0, f64::max);
        worst / scale
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

impl MCEstimate {
    /// `(mean - target)/std_error`.
    pub fn sigmas(&self, target: f64) -> f64 {
        (self.mean - target) / self.std_error
    }
}

/// Means and pairwise covariances of several smeared fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub means: Vec<MCEstimate>,
    pub covariances: Vec<Vec<MCEstimate>>,
}

/// `(1/V) Σ_k f̃*(k) g̃(k) ℏ/(2ω)`, the lattice version of the inner product.
/// A mode with `ω = 0` is dropped, as in the sampler.
pub fn lattice_inner_product(
    f_tilde: &[Complex64],
    g_tilde: &[Complex64],
    lattice: &LatticeSpec,
    mass: f64,
    hbar: f64,
) -> Complex64 {
    let sum: Complex64 = (0..lattice.mode_count())
        .map(|i| {
            let w = dispersion(&lattice.wavenumber(i), mass);
            if w > 0.0 {
                f_tilde[i].conj() * g_tilde[i] * (hbar / (2.0 * w))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .sum();
    sum / lattice.volume()
}

/// `(1/V) Σ_k |f̃(k)|² kT/(2ξ(k))`: the exact variance of `φ_f` on the lattice.
pub fn lattice_variance(f_tilde: &[Complex64], lattice: &LatticeSpec, reg: &Regularizer) -> f64 {
    lattice_covariance(f_tilde, f_tilde, lattice, reg)
}

/// `(1/V) Re Σ_k f̃*(k) g̃(k) kT/(2ξ(k))`: the exact covariance of `φ_f` and `φ_g`.
pub fn lattice_covariance(f_tilde: &[Complex64], g_tilde: &[Complex64], lattice: &LatticeSpec, reg: &Regularizer) -> f64 {
    let sum: f64 = (0..lattice.mode_count())
        .map(|i| (f_tilde[i].conj() * g_tilde[i]).re * reg.xi(&lattice.wavenumber(i)).variance(reg.kt()))
        .sum();
    sum / lattice.volume()
}

/// `φ_f = (1/V) Σ_k φ̃(k) f̃*(k)`.
pub fn smear(config: &FieldConfiguration, f: &TestFunction) -> Result<f64> {
    smear_transformed(config, &f.lattice_transform(&config.lattice)?)
}

/// [`smear`] with the lattice transform of `f` precomputed.
///
/// Fails with [`Error::HermitianViolation`] when the imaginary part exceeds
/// [`HERMITIAN_TOLERANCE`] relative to `Σ|φ̃ f̃|`.
pub fn smear_transformed(config: &FieldConfiguration, f_tilde: &[Complex64]) -> Result<f64> {
    if f_tilde.len() != config.coefficients.len() {
        return Err(Error::Config("test function transform does not match the lattice".into()));
    }
    let (sum, scale) = smear_raw(&config.coefficients, f_tilde);
    if sum.im.abs() > HERMITIAN_TOLERANCE * scale {
        return Err(Error::HermitianViolation { residue: sum.im.abs() / scale });
    }
    Ok(sum.re / config.lattice.volume())
}

fn smear_raw(c: &[Complex64], f: &[Complex64]) -> (Complex64, f64) {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (a, b) in c.iter().zip(f) {
        let t = a * b.conj();
        sum += t;
        scale += t.norm();
    }
    (sum, scale)
}

#[derive(Debug, Clone)]
struct OneParticle {
    g_tilde: Vec<Complex64>,
    h_tilde: Vec<Complex64>,
    g_norm: f64,
}

/// A lazily generated ensemble. Sample `i` depends only on the spec and `i`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    spec: EnsembleSpec,
    variances: Arc<[f64]>,
    pairs: Arc<[usize]>,
    one_particle: Option<Arc<OneParticle>>,
    fault: Option<Fault>,
}

/// Equilibrium ensemble of `exp(-H_ξ/kT)`.
pub fn sample_vacuum(spec: EnsembleSpec) -> Ensemble {
    sample_vacuum_with(spec, None)
}

pub(crate) fn sample_vacuum_with(spec: EnsembleSpec, fault: Option<Fault>) -> Ensemble {
    let lat = spec.lattice;
    let variances: Vec<f64> = (0..lat.mode_count())
        .map(|i| spec.reg.xi(&lat.wavenumber(i)).variance(spec.reg.kt()))
        .collect();
    let pairs: Vec<usize> = (0..lat.mode_count()).map(|i| lat.partner(i)).collect();
    Ensemble { spec, variances: variances.into(), pairs: pairs.into(), one_particle: None, fault }
}

/// One-particle ensemble for the state created by smearing with `g`.
///
/// Each vacuum sample is split along `h = Σ_k (ℏ/2ω) g̃(k)/√(g,g)` into
/// `A·h + φ_⊥` with `A = φ_g/√(g,g)` standard normal and `φ_⊥` independent of `A`;
/// `A` is then replaced by `±χ₃`. For every `f` the smear `φ_f` acquires the
/// characteristic function `(1 - θt²(f,f))·e^{-(f,f)t²/2}`. All inner products
/// are lattice sums, so the identity is exact on the lattice.
pub fn sample_one_particle(
    lattice: LatticeSpec,
    mass: f64,
    kt: f64,
    hbar: f64,
    g: &TestFunction,
    count: usize,
    seed: u64,
) -> Result<Ensemble> {
    sample_one_particle_with(lattice, mass, kt, hbar, g, count, seed, None)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn sample_one_particle_with(
    lattice: LatticeSpec,
    mass: f64,
    kt: f64,
    hbar: f64,
    g: &TestFunction,
    count: usize,
    seed: u64,
    fault: Option<Fault>,
) -> Result<Ensemble> {
    let reg = Regularizer::kg_vacuum(mass, kt, hbar)?;
    let spec = EnsembleSpec::new(lattice, reg, count, seed)?;
    let mut ens = sample_vacuum_with(spec, fault);
    let g_tilde = g.lattice_transform(&lattice)?;
    let gg = lattice_inner_product(&g_tilde, &g_tilde, &lattice, mass, hbar).re;
    if !(gg > f64::MIN_POSITIVE * 1e8) {
        return Err(Error::DegenerateTestFunction { norm: gg });
    }
    let g_norm = gg.sqrt();
    let h_tilde = g_tilde.iter().zip(ens.variances.iter()).map(|(g, v)| g * (v / g_norm)).collect();
    ens.one_particle = Some(Arc::new(OneParticle { g_tilde, h_tilde, g_norm }));
    Ok(ens)
}

impl Ensemble {
    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.spec.count
    }

    pub fn is_empty(&self) -> bool {
        self.spec.count == 0
    }

    /// Same ensemble truncated to its first `count` samples.
    pub fn truncated(&self, count: usize) -> Self {
        let mut out = self.clone();
        out.spec.count = count.min(self.spec.count);
        out
    }

    /// Sample `index`.
    pub fn config(&self, index: usize) -> FieldConfiguration {
        let mut c = FieldConfiguration::zeros(self.spec.lattice);
        self.fill(index, &mut c.coefficients);
        c
    }

    /// Every sample, materialized.
    pub fn retain(&self) -> Vec<FieldConfiguration> {
        self.map(|c| c.clone())
    }

    fn fill(&self, index: usize, c: &mut [Complex64]) {
        let volume = self.spec.lattice.volume();
        let mut rng = stream(self.spec.seed, index as u64);
        let mirror_conj = self.fault != Some(Fault::HermitianSymmetry);
        // every mode consumes one normal pair, used or not
        for j in 0..c.len() {
            let (z1, z2) = normal_pair(&mut rng);
            let p = self.pairs[j];
            let var = self.variances[j];
            if p == j {
                c[j] = Complex64::new((volume * var).sqrt() * z1, 0.0);
            } else if j < p {
                let s = (0.5 * volume * var).sqrt();
                let v = Complex64::new(s * z1, s * z2);
                c[j] = v;
                c[p] = if mirror_conj { v.conj() } else { v };
            }
        }
        if let Some(op) = &self.one_particle {
            let (b1, b2) = normal_pair(&mut rng);
            let (b3, b4) = normal_pair(&mut rng);
            let mut b = (b1 * b1 + b2 * b2 + b3 * b3).sqrt();
            if b4 < 0.0 {
                b = -b;
            }
            if self.fault == Some(Fault::MaxwellScale) {
                b /= 3f64.sqrt();
            }
            let a = smear_raw(c, &op.g_tilde).0.re / volume / op.g_norm;
            for (cj, hj) in c.iter_mut().zip(&op.h_tilde) {
                *cj += hj * (b - a);
            }
        }
    }

    /// Applies `f` to every sample in parallel; results come back in sample order.
    pub fn map<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&FieldConfiguration) -> T + Sync + Send,
    {
        (0..self.spec.count)
            .into_par_iter()
            .map_init(
                || FieldConfiguration::zeros(self.spec.lattice),
                |buf, i| {
                    self.fill(i, &mut buf.coefficients);
                    f(buf)
                },
            )
            .collect()
    }

    /// `smears(fs)[a][i]` is `φ_{f_a}` in sample `i`.
    pub fn smears(&self, fs: &[TestFunction]) -> Result<Vec<Vec<f64>>> {
        let transforms = fs
            .iter()
            .map(|f| f.lattice_transform(&self.spec.lattice))
            .collect::<Result<Vec<_>>>()?;
        // stops at the first failing sample
        let rows: Vec<Vec<f64>> = (0..self.spec.count)
            .into_par_iter()
            .map_init(
                || FieldConfiguration::zeros(self.spec.lattice),
                |buf, i| {
                    self.fill(i, &mut buf.coefficients);
                    transforms.iter().map(|t| smear_transformed(buf, t)).collect::<Result<Vec<f64>>>()
                },
            )
            .collect::<Result<_>>()?;
        let mut out = vec![Vec::with_capacity(self.spec.count); fs.len()];
        for row in rows {
            for (col, v) in out.iter_mut().zip(row) {
                col.push(v);
            }
        }
        Ok(out)
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Means (standard error `s/√n`) and covariances (delete-one jackknife errors).
///
/// `samples[a]` holds the draws of observable `a`; all rows have equal length.
/// With fewer than three samples the covariance errors are infinite.
pub fn estimate_moments(samples: &[Vec<f64>]) -> Result<Moments> {
    let n = samples.first().map_or(0, Vec::len);
    if n == 0 {
        return Err(Error::InsufficientSamples { required: 1, got: 0 });
    }
    if samples.iter().any(|s| s.len() != n) {
        return Err(Error::Config("observables have different sample counts".into()));
    }
    let nf = n as f64;
    let centered: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| {
            let m = mean(s);
            s.iter().map(|x| x - m).collect()
        })
        .collect();
    let means = samples
        .iter()
        .zip(&centered)
        .map(|(s, d)| {
            let var = if n > 1 { d.iter().map(|x| x * x).sum::<f64>() / (nf - 1.0) } else { f64::INFINITY };
            MCEstimate { mean: mean(s), std_error: (var / nf).sqrt(), count: n }
        })
        .collect();
    let mut covariances = vec![Vec::with_capacity(samples.len()); samples.len()];
    for a in 0..samples.len() {
        for b in 0..samples.len() {
            let est = if b < a { covariances[b][a] } else { covariance(&centered[a], &centered[b]) };
            covariances[a].push(est);
        }
    }
    Ok(Moments { means, covariances })
}

/// Sample covariance of two centered series with a delete-one jackknife error.
fn covariance(d: &[f64], e: &[f64]) -> MCEstimate {
    let n = d.len();
    let nf = n as f64;
    let s: f64 = d.iter().zip(e).map(|(x, y)| x * y).sum();
    let cov = if n > 1 { s / (nf - 1.0) } else { 0.0 };
    if n < 3 {
        return MCEstimate { mean: cov, std_error: f64::INFINITY, count: n };
    }
    // leaving out i shifts both means, which changes S by d_i e_i·n/(n-1)
    let loo = |i: usize| (s - d[i] * e[i] * nf / (nf - 1.0)) / (nf - 2.0);
    let avg = (0..n).map(loo).sum::<f64>() / nf;
    let ss: f64 = (0..n).map(|i| (loo(i) - avg).powi(2)).sum();
    MCEstimate { mean: cov, std_error: ((nf - 1.0) / nf * ss).sqrt(), count: n }
}

/// Moments of the smeared fields `fs` over an ensemble.
pub fn ensemble_moments(ens: &Ensemble, fs: &[TestFunction]) -> Result<Moments> {
    estimate_moments(&ens.smears(fs)?)
}

/// Excess kurtosis `m₄/m₂² - 3` with a delete-one jackknife error.
pub fn excess_kurtosis(x: &[f64]) -> Result<MCEstimate> {
    let n = x.len();
    if n < 4 {
        return Err(Error::InsufficientSamples { required: 4, got: n });
    }
    let m = mean(x);
    let y: Vec<f64> = x.iter().map(|v| v - m).collect();
    let mut r = [0.0f64; 5];
    for v in &y {
        let v2 = v * v;
        r[1] += v;
        r[2] += v2;
        r[3] += v2 * v;
        r[4] += v2 * v2;
    }
    let kurt = |r1: f64, r2: f64, r3: f64, r4: f64, count: f64| {
        let mu = r1 / count;
        let m2 = r2 / count - mu * mu;
        let m4 = r4 / count - 4.0 * mu * r3 / count + 6.0 * mu * mu * r2 / count - 3.0 * mu.powi(4);
        m4 / (m2 * m2) - 3.0
    };
    let nf = n as f64;
    let full = kurt(r[1], r[2], r[3], r[4], nf);
    let loo: Vec<f64> = y
        .iter()
        .map(|v| {
            let v2 = v * v;
            kurt(r[1] - v, r[2] - v2, r[3] - v2 * v, r[4] - v2 * v2, nf - 1.0)
        })
        .collect();
    let avg = mean(&loo);
    let ss: f64 = loo.iter().map(|k| (k - avg).powi(2)).sum();
    Ok(MCEstimate { mean: full, std_error: ((nf - 1.0) / nf * ss).sqrt(), count: n })
}

/// `T^{μν} = (kT/ℏ)(1/V) Σ_k k^μ k^ν/ω |φ̃(k)|²` with `k^μ = (ω(k), k)`.
///
/// Every listed mode contributes on its own; a mode with `ω = 0` carries no
/// momentum and is skipped.
pub fn emt_components(config: &FieldConfiguration, mass: f64, kt: f64, hbar: f64) -> [[f64; 4]; 4] {
    emt_components_with(config, mass, kt, hbar, None)
}

pub(crate) fn emt_components_with(
    config: &FieldConfiguration,
    mass: f64,
    kt: f64,
    hbar: f64,
    fault: Option<Fault>,
) -> [[f64; 4]; 4] {
    let lat = config.lattice;
    emt_sum(&lat, mass, kt / hbar / lat.volume(), fault, |i| config.coefficients[i].norm_sqr())
}

fn emt_sum(lat: &LatticeSpec, mass: f64, pref: f64, fault: Option<Fault>, weight: impl Fn(usize) -> f64) -> [[f64; 4]; 4] {
    let mut t = [[0.0; 4]; 4];
    for i in 0..lat.mode_count() {
        let p = weight(i);
        if p == 0.0 {
            continue;
        }
        let k = lat.wavenumber(i);
        let w = dispersion(&k, mass);
        if w == 0.0 {
            continue;
        }
        let k0 = if fault == Some(Fault::OffShellEnergy) { norm(&k) } else { w };
        let kv = [k0, k[0], k[1], k[2]];
        for mu in 0..4 {
            for nu in mu..4 {
                t[mu][nu] += kv[mu] * kv[nu] / w * p;
            }
        }
    }
    for mu in 0..4 {
        for nu in 0..4 {
            t[mu][nu] *= pref;
        }
    }
    for mu in 0..4 {
        for nu in 0..mu {
            t[mu][nu] = t[nu][mu];
        }
    }
    t
}

/// Ensemble mean of [`emt_components`] predicted by inserting `⟨|φ̃|²⟩ = V·kT/(2ξ)`.
pub fn emt_vacuum_target(lattice: &LatticeSpec, reg: &Regularizer) -> [[f64; 4]; 4] {
    let lat = *lattice;
    let pref = reg.kt() / reg.hbar();
    emt_sum(&lat, reg.mass(), pref, None, |i| reg.xi(&lat.wavenumber(i)).variance(reg.kt()))
}

/// Lattice Hamiltonian `H_ξ = (1/V) Σ_k ξ(k)|φ̃(k)|²`; frozen modes must vanish.
pub fn hamiltonian(config: &FieldConfiguration, reg: &Regularizer) -> f64 {
    let lat = config.lattice;
    let sum: f64 = (0..lat.mode_count())
        .map(|i| match reg.xi(&lat.wavenumber(i)).finite() {
            Some(xi) => xi * config.coefficients[i].norm_sqr(),
            None => 0.0,
        })
        .sum();
    sum / lat.volume()
}
