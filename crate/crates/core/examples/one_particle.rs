//! One-particle ensembles: smear marginals against the analytic density, with a
//! Kolmogorov-Smirnov test for three overlaps θ.

use kgfield::lattice::LatticeSpec;
use kgfield::sampler::{lattice_inner_product, sample_one_particle};
use kgfield::states::{cdf, StateKind, StateSpec};
use kgfield::testfn::TestFunction;
use kgfield::verify::ks_test;

fn main() -> kgfield::Result<()> {
    let lattice = LatticeSpec::new(16, 0.5)?;
    let g = TestFunction::gaussian(0.8);
    let fs = [
        TestFunction::gaussian_at([4.0, 0.0, 0.0], 0.8),
        TestFunction::gaussian_at([0.9, 0.0, 0.0], 0.8),
        g.clone(),
    ];
    let ens = sample_one_particle(lattice, 1.0, 1.0, 1.0, &g, 20_000, 7)?;
    let smears = ens.smears(&fs)?;

    let g_t = g.lattice_transform(&lattice)?;
    let ip = |a: &[_], b: &[_]| lattice_inner_product(a, b, &lattice, 1.0, 1.0);
    for (f, x) in fs.iter().zip(&smears) {
        let f_t = f.lattice_transform(&lattice)?;
        let state = StateSpec::new(StateKind::NParticle(1), ip(&f_t, &f_t).re, ip(&g_t, &g_t).re, ip(&f_t, &g_t))?;
        let ks = ks_test(x, |q| cdf(&state, q), 0.01)?;
        println!(
            "theta = {:.4}: D = {:.5}, critical {:.5}, {}",
            state.theta(),
            ks.statistic,
            ks.critical,
            if ks.pass { "consistent" } else { "rejected" }
        );
    }
    Ok(())
}
