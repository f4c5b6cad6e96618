//! The check lists behind each named suite.

use num_complex::Complex64;

use super::{ks_test, Check, Profile};
use crate::analytic::{
    antilocal_kernel_with, boosted_inner_product_with, connected_two_point, inner_product, kernel_oracle,
    smeared_variance, SpectralWeight,
};
use crate::error::Result;
use crate::fault::Fault;
use crate::lattice::LatticeSpec;
use crate::quadrature::QuadratureSpec;
use crate::regularizer::{dispersion, Regularizer, RegularizerKind};
use crate::sampler::{
    emt_components_with, emt_vacuum_target, estimate_moments, excess_kurtosis, hamiltonian, lattice_inner_product,
    sample_one_particle_with, sample_vacuum_with, EnsembleSpec, FieldConfiguration,
};
use crate::states::{self, StateKind, StateSpec};
use crate::testfn::TestFunction;

pub(super) struct Context {
    pub profile: Profile,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Context {
    /// Independent seed for the `k`-th ensemble of a suite.
    fn seed(&self, k: u64) -> u64 {
        self.seed.wrapping_add(k.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

fn or_failed(name: String, target: f64, tol: f64, r: Result<Check>) -> Check {
    r.unwrap_or_else(|_| Check::failed(name, target, tol))
}

fn pretty(x: f64) -> String {
    format!("{x}")
}

pub(super) fn variance(ctx: &Context) -> Vec<Check> {
    let mut out = Vec::new();
    let quad = QuadratureSpec::default();
    for m in [0.0, 0.5, 1.0, 5.0] {
        for s in [0.5, 1.0, 2.0] {
            let f = TestFunction::gaussian(s);
            let label = format!("m={},s={}", pretty(m), pretty(s));
            let quantum = SpectralWeight::quantum(m, 1.0).and_then(|w| smeared_variance(&f, &w, &quad));
            let classical = |kt: f64| {
                Regularizer::kg_vacuum(m, kt, 1.0)
                    .and_then(|r| smeared_variance(&f, &SpectralWeight::Classical(r), &quad))
            };
            let (c1, c3) = (classical(1.0), classical(1e3));
            out.push(match (&quantum, &c1) {
                (Ok(q), Ok(c)) => Check::relative(format!("variance.match[{label}]"), *q, *c, 1e-10),
                _ => Check::failed(format!("variance.match[{label}]"), f64::NAN, 0.0),
            });
            out.push(match (&c1, &c3) {
                (Ok(a), Ok(b)) => Check::relative(format!("variance.kt-invariance[{label}]"), *a, *b, 1e-10),
                _ => Check::failed(format!("variance.kt-invariance[{label}]"), f64::NAN, 0.0),
            });
        }
    }
    out.extend(variance_mc(ctx));
    out
}

fn mc_functions() -> Vec<TestFunction> {
    vec![
        TestFunction::gaussian_at([0.0, 0.0, 0.0], 0.6),
        TestFunction::gaussian_at([1.0, 0.0, 0.0], 0.8),
        TestFunction::gaussian_at([0.0, 1.5, 0.0], 1.0),
        TestFunction::gaussian_at([-1.0, 0.0, 1.0], 1.4),
        TestFunction::gaussian_at([0.5, 0.5, 0.5], 2.0),
    ]
}

fn variance_mc(ctx: &Context) -> Vec<Check> {
    let (mass, n_moments, n_dist) = (1.0, ctx.profile.moment_samples(), ctx.profile.distribution_samples());
    let fs = mc_functions();
    let nf = fs.len();
    let quad = QuadratureSpec::default();
    let mut names = Vec::new();
    for a in 0..nf {
        names.push(format!("variance.mc.mean[f{a}]"));
        names.push(format!("variance.mc.var[f{a}]"));
        for b in a + 1..nf {
            names.push(format!("variance.mc.cov[f{a},f{b}]"));
        }
    }
    let kurt_names: Vec<String> = (0..nf).map(|a| format!("variance.mc.kurtosis[f{a}]")).collect();

    let run = || -> Result<(Vec<Check>, Vec<Check>)> {
        let lattice = LatticeSpec::new(32, 0.5)?;
        let reg = Regularizer::kg_vacuum(mass, 1.0, 1.0)?;
        let spec = EnsembleSpec::new(lattice, reg, n_dist, ctx.seed(1))?;
        let smears = sample_vacuum_with(spec, ctx.fault).smears(&fs)?;
        let head: Vec<Vec<f64>> = smears.iter().map(|x| x[..n_moments].to_vec()).collect();
        let m = estimate_moments(&head)?;
        let mut checks = Vec::new();
        let mut i = 0;
        for a in 0..nf {
            checks.push(Check::sigmas(names[i].clone(), 0.0, m.means[a].mean, m.means[a].std_error, 4.0));
            i += 1;
            let var = smeared_variance(&fs[a], &SpectralWeight::Classical(reg), &quad)?;
            let c = m.covariances[a][a];
            checks.push(Check::sigmas(names[i].clone(), var, c.mean, c.std_error, 4.0));
            i += 1;
            for b in a + 1..nf {
                let target = connected_two_point(&fs[a], &fs[b], mass, 1.0, &quad)?.re;
                let c = m.covariances[a][b];
                checks.push(Check::sigmas(names[i].clone(), target, c.mean, c.std_error, 4.0));
                i += 1;
            }
        }
        let mut kurt = Vec::new();
        for (a, x) in smears.iter().enumerate() {
            let k = excess_kurtosis(x)?;
            kurt.push(Check::sigmas(kurt_names[a].clone(), 0.0, k.mean, k.std_error, 5.0));
        }
        Ok((checks, kurt))
    };
    match run() {
        Ok((mut checks, kurt)) => {
            checks.extend(kurt);
            checks
        }
        Err(_) => names.into_iter().chain(kurt_names).map(|n| Check::failed(n, f64::NAN, f64::NAN)).collect(),
    }
}

const THETA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn state_kinds() -> [(StateKind, &'static str, f64); 6] {
    [
        (StateKind::Vacuum, "vacuum", 1.0),
        (StateKind::NParticle(1), "n1", 1.0),
        (StateKind::NParticle(2), "n2", 2.0),
        (StateKind::NParticle(3), "n3", 6.0),
        (StateKind::Coherent, "coherent", 1.0),
        (
            StateKind::Superposition { u: Complex64::new(1.0, 0.0), v: Complex64::new(0.6, 0.3) },
            "superposition",
            1.0,
        ),
    ]
}

pub(super) fn density(ctx: &Context) -> Vec<Check> {
    let mut out = Vec::new();
    let ff: f64 = 1.3;
    for (kind, label, mass) in state_kinds() {
        for theta in THETA_GRID {
            let name = format!("density.mass[{label},theta={}]", pretty(theta));
            out.push(or_failed(
                name.clone(),
                mass,
                1e-8,
                StateSpec::with_theta(kind, ff, theta).map(|s| Check::absolute(name, mass, states::total_mass(&s), 1e-8)),
            ));
        }
    }
    out.extend(reductions(ff));
    out.extend(characteristic_function_checks(ff));
    out.extend(one_particle_ks(ctx));
    out
}

fn reductions(ff: f64) -> Vec<Check> {
    let grid: Vec<f64> = (-400..=400).map(|i| i as f64 * 0.02 * ff.sqrt()).collect();
    let worst = |a: &StateSpec, b: &dyn Fn(f64) -> f64| -> f64 {
        let vac = StateSpec::with_theta(StateKind::Vacuum, a.ff, 0.0).unwrap();
        grid.iter()
            .map(|&q| (states::density(a, q) - b(q)).abs() / states::density(&vac, q))
            .fold(0.0, f64::max)
    };
    let with = |kind, theta| StateSpec::with_theta(kind, ff, theta).unwrap();
    let vac = with(StateKind::Vacuum, 0.0);
    let one_half = StateSpec::new(StateKind::NParticle(1), ff, 1.7, Complex64::new(0.5, -0.6)).unwrap();
    let sup = StateSpec::new(
        StateKind::Superposition { u: Complex64::new(0.8, -0.4), v: Complex64::new(0.0, 0.0) },
        ff,
        1.7,
        Complex64::new(0.5, -0.6),
    )
    .unwrap();
    let coherent = StateSpec::new(StateKind::Coherent, ff, 1.0, Complex64::new(0.0, 0.7)).unwrap();
    vec![
        Check::absolute(
            "density.reduction[n1(theta=0)=vacuum]",
            0.0,
            worst(&with(StateKind::NParticle(1), 0.0), &|q| states::density(&vac, q)),
            1e-12,
        ),
        Check::absolute(
            "density.reduction[n1(theta=1)=q^2/ff*vacuum]",
            0.0,
            worst(&with(StateKind::NParticle(1), 1.0), &|q| q * q / ff * states::density(&vac, q)),
            1e-12,
        ),
        Check::absolute(
            "density.reduction[superposition(v=0)=n1]",
            0.0,
            worst(&sup, &|q| states::density(&one_half, q)),
            1e-12,
        ),
        Check::absolute(
            "density.reduction[coherent(Re fg=0)=vacuum]",
            0.0,
            worst(&coherent, &|q| states::density(&vac, q)),
            1e-12,
        ),
    ]
}

fn characteristic_function_checks(ff: f64) -> Vec<Check> {
    THETA_GRID
        .iter()
        .map(|&theta| {
            let s = StateSpec::with_theta(StateKind::NParticle(1), ff, theta).unwrap();
            let worst = (0..=40)
                .map(|i| {
                    let t = i as f64 * 0.1 / ff.sqrt();
                    let exact = (1.0 - theta * ff * t * t) * (-0.5 * ff * t * t).exp();
                    (states::characteristic_function(&s, t) - exact).norm()
                })
                .fold(0.0, f64::max);
            Check::absolute(format!("density.characteristic-function[theta={}]", pretty(theta)), 0.0, worst, 1e-8)
        })
        .collect()
}

/// One-particle smear marginals against the analytic `ρ₁`.
///
/// `g` is a Gaussian at the origin of a 16³ lattice; `f` runs over a distant
/// Gaussian (θ ≈ 0), a displaced one tuned to θ = 0.5 on the lattice, and `g`
/// itself (θ = 1). All inner products are lattice sums.
fn one_particle_ks(ctx: &Context) -> Vec<Check> {
    let labels = ["theta~0", "theta~0.5", "theta=1"];
    let mut names: Vec<String> = labels.iter().map(|l| format!("density.one-particle.ks[{l}]")).collect();
    names.push("density.one-particle.theta[~0]".into());
    names.push("density.one-particle.theta[~0.5]".into());
    names.push("density.one-particle.second-moment[f=g]".into());

    let run = || -> Result<Vec<Check>> {
        let (mass, width) = (1.0, 0.8);
        let lattice = LatticeSpec::new(16, 0.5)?;
        let g = TestFunction::gaussian(width);
        let g_t = g.lattice_transform(&lattice)?;
        let ip = |a: &[Complex64], b: &[Complex64]| lattice_inner_product(a, b, &lattice, mass, 1.0);
        let gg = ip(&g_t, &g_t).re;
        let theta_at = |d: f64| -> Result<(f64, TestFunction)> {
            let f = TestFunction::gaussian_at([d, 0.0, 0.0], width);
            let f_t = f.lattice_transform(&lattice)?;
            Ok((ip(&f_t, &g_t).norm_sqr() / (ip(&f_t, &f_t).re * gg), f))
        };
        let (theta_far, far) = theta_at(lattice.extent() / 2.0)?;
        let (mut lo, mut hi) = (0.0, lattice.extent() / 2.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if theta_at(mid)?.0 > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (theta_mid, mid) = theta_at(0.5 * (lo + hi))?;
        let fs = vec![far, mid, g.clone()];

        let n = ctx.profile.distribution_samples();
        let ens = sample_one_particle_with(lattice, mass, 1.0, 1.0, &g, n, ctx.seed(2), ctx.fault)?;
        let smears = ens.smears(&fs)?;
        let mut checks = Vec::new();
        for (i, f) in fs.iter().enumerate() {
            let f_t = f.lattice_transform(&lattice)?;
            let state = StateSpec::new(StateKind::NParticle(1), ip(&f_t, &f_t).re, gg, ip(&f_t, &g_t))?;
            let ks = ks_test(&smears[i], |q| states::cdf(&state, q), 0.01)?;
            checks.push(Check::below(names[i].clone(), ks.critical, ks.statistic));
        }
        checks.push(Check::below(names[3].clone(), 0.05, theta_far));
        checks.push(Check::absolute(names[4].clone(), 0.5, theta_mid, 1e-9));
        let sq: Vec<f64> = smears[2].iter().map(|x| x * x).collect();
        let m = estimate_moments(&[sq])?;
        checks.push(Check::sigmas(names[5].clone(), 3.0 * gg, m.means[0].mean, m.means[0].std_error, 4.0));
        Ok(checks)
    };
    run().unwrap_or_else(|_| names.into_iter().map(|n| Check::failed(n, f64::NAN, f64::NAN)).collect())
}

pub(super) fn kernel(ctx: &Context) -> Vec<Check> {
    let mut out = Vec::new();
    let points = match ctx.profile {
        Profile::Quick => 12,
        Profile::Full => 40,
    };
    let oracle_quad = QuadratureSpec::with_rel_tol(1e-6);
    for mass in [1.0, 2.0] {
        for i in 0..points {
            let mr = 0.5 * 20f64.powf(i as f64 / (points - 1) as f64);
            let r = mr / mass;
            let name = format!("kernel.oracle[m={},mr={mr:.6}]", pretty(mass));
            let check = kernel_oracle(r, mass, &oracle_quad).and_then(|o| {
                antilocal_kernel_with(r, mass, ctx.fault).map(|k| Check::relative(name.clone(), -o, k, 1e-4))
            });
            out.push(or_failed(name, f64::NAN, f64::NAN, check));
        }
    }

    let name = "kernel.faster-than-exponential[m=1,r=2..10]".to_string();
    let logs: Result<Vec<f64>> =
        (0..=80).map(|i| 2.0 + 0.1 * i as f64).map(|r| antilocal_kernel_with(r, 1.0, ctx.fault).map(|k| k.ln() + r)).collect();
    out.push(or_failed(
        name.clone(),
        0.0,
        0.0,
        logs.map(|l| Check::below(name, 0.0, l.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max))),
    ));

    for mass in [1.0, 2.0] {
        let name = format!("kernel.positive[m={}]", pretty(mass));
        let min: Result<f64> = (0..=200)
            .map(|i| 0.01 * 5000f64.powf(i as f64 / 200.0) / mass)
            .map(|r| antilocal_kernel_with(r, mass, ctx.fault))
            .try_fold(f64::INFINITY, |acc, k| k.map(|k| acc.min(k)));
        out.push(or_failed(name.clone(), 0.0, 0.0, min.map(|m| Check::above(name, 0.0, m))));
    }

    out.extend(nonlocality());
    out
}

/// Overlap of disjoint boxes: nonzero, with `log|(f,g)|` falling at least as fast as `m·d`.
fn nonlocality() -> Vec<Check> {
    let quad = QuadratureSpec::with_rel_tol(1e-10);
    let mut out = Vec::new();
    for mass in [1.0, 2.0] {
        let f = TestFunction::cube([0.0; 3], 0.5 / mass);
        let mut logs = Vec::new();
        for md in [2.0, 4.0, 6.0, 8.0] {
            let g = TestFunction::cube([md / mass, 0.0, 0.0], 0.5 / mass);
            let name = format!("kernel.disjoint-overlap[m={},md={}]", pretty(mass), pretty(md));
            match inner_product(&f, &g, mass, 1.0, &quad) {
                Ok(v) => {
                    logs.push(Some(v.norm().ln()));
                    out.push(Check::above(name, 0.0, v.norm()));
                }
                Err(_) => {
                    logs.push(None);
                    out.push(Check::failed(name, 0.0, 0.0));
                }
            }
        }
        for (i, w) in logs.windows(2).enumerate() {
            let name = format!("kernel.disjoint-decay[m={},md={}..{}]", pretty(mass), 2 * i + 2, 2 * i + 4);
            out.push(match (w[0], w[1]) {
                (Some(a), Some(b)) => Check::below(name, -1.0, (b - a) / 2.0),
                _ => Check::failed(name, -1.0, 0.0),
            });
        }
    }
    out
}

pub(super) fn boost(ctx: &Context) -> Vec<Check> {
    let quad = QuadratureSpec::with_rel_tol(1e-9);
    let f = TestFunction::gaussian(1.0);
    let pairs = [
        ("f,f", f.clone(), f.clone()),
        ("f,g", f.clone(), TestFunction::gaussian_at([0.0, 0.5, 1.0], 0.8)),
        ("g,h", TestFunction::gaussian_at([0.0, 0.5, 1.0], 0.8), TestFunction::gaussian_at([0.3, -0.2, -1.2], 1.3)),
    ];
    let mut out = Vec::new();
    for (label, a, b) in &pairs {
        let base = inner_product(a, b, 1.0, 1.0, &quad);
        for eta in [0.0, 0.25, 0.5, 1.0] {
            let name = format!("boost.invariance[{label},eta={}]", pretty(eta));
            let check = base.as_ref().map_err(Clone::clone).and_then(|base| {
                boosted_inner_product_with(a, b, eta, 1.0, 1.0, &quad, ctx.fault)
                    .map(|v| Check::relative(name.clone(), base.re, v.re, 1e-6))
            });
            out.push(or_failed(name, f64::NAN, f64::NAN, check));
        }
    }
    out
}

pub(super) fn emt(ctx: &Context) -> Vec<Check> {
    let mut out = rank_one(ctx);
    out.extend(emt_mean(ctx));
    out
}

/// Single-mode configurations: `T^{μν}` must equal `T⁰⁰·k^μk^ν/ω²`.
fn rank_one(ctx: &Context) -> Vec<Check> {
    let (mass, kt, hbar) = (1.0, 1.0, 1.0);
    let lattice = LatticeSpec::new(8, 0.75).unwrap();
    let modes = [lattice.flat_index(1, 0, 0), lattice.flat_index(2, 5, 7), lattice.flat_index(4, 4, 3)];
    modes
        .iter()
        .map(|&i| {
            let mut c = vec![Complex64::new(0.0, 0.0); lattice.mode_count()];
            c[i] = Complex64::new(0.7, -1.3);
            let config = FieldConfiguration::from_coefficients(lattice, c).unwrap();
            let t = emt_components_with(&config, mass, kt, hbar, ctx.fault);
            let k = lattice.wavenumber(i);
            let w = dispersion(&k, mass);
            let kv = [w, k[0], k[1], k[2]];
            let mut worst: f64 = 0.0;
            for mu in 0..4 {
                for nu in 0..4 {
                    worst = worst.max((t[mu][nu] - t[0][0] * kv[mu] * kv[nu] / (w * w)).abs() / t[0][0]);
                }
            }
            let [x, y, z] = lattice.split_index(i);
            Check::absolute(format!("emt.rank-one[mode=({x},{y},{z})]"), 0.0, worst, 1e-12)
        })
        .collect()
}

const COMPONENTS: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

/// Ensemble means of `T^{μν}` against the plug-in spectral sums.
fn emt_mean(ctx: &Context) -> Vec<Check> {
    let regs = [("kg", RegularizerKind::KgVacuum), ("power:a=2", RegularizerKind::PowerLaw { alpha: 2.0 })];
    let mut out = Vec::new();
    for (r, (label, kind)) in regs.into_iter().enumerate() {
        let components: &[(usize, usize)] = if r == 0 { &COMPONENTS } else { &COMPONENTS[..1] };
        let mut names: Vec<String> =
            components.iter().map(|(m, n)| format!("emt.mean[{label},T{m}{n}]")).collect();
        if r == 0 {
            names.push("emt.t00-equals-hamiltonian[kg]".into());
        }
        let run = || -> Result<Vec<Check>> {
            let lattice = LatticeSpec::new(16, 0.5)?;
            let reg = Regularizer::new(kind, 1.0, 1.0, 1.0)?;
            let n = ctx.profile.moment_samples();
            let spec = EnsembleSpec::new(lattice, reg, n, ctx.seed(3 + r as u64))?;
            let ens = sample_vacuum_with(spec, None);
            let tensors = ens.map(|c| emt_components_with(c, reg.mass(), reg.kt(), reg.hbar(), ctx.fault));
            let rows: Vec<Vec<f64>> =
                components.iter().map(|&(m, n)| tensors.iter().map(|t| t[m][n]).collect()).collect();
            let means = estimate_moments(&rows)?.means;
            let target = emt_vacuum_target(&lattice, &reg);
            let mut checks: Vec<Check> = components
                .iter()
                .zip(&means)
                .zip(&names)
                .map(|((&(m, n), e), name)| Check::sigmas(name.clone(), target[m][n], e.mean, e.std_error, 4.0))
                .collect();
            if r == 0 {
                let c = ens.config(0);
                checks.push(Check::relative(names[components.len()].clone(), hamiltonian(&c, &reg), tensors[0][0][0], 1e-12));
            }
            Ok(checks)
        };
        out.extend(
            run().unwrap_or_else(|_| names.into_iter().map(|n| Check::failed(n, f64::NAN, f64::NAN)).collect()),
        );
    }
    out
}
