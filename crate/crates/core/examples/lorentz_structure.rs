//! Boost invariance of the inner product and the energy-momentum tensor of
//! lattice configurations.

use kgfield::analytic::{boosted_inner_product, inner_product};
use kgfield::lattice::LatticeSpec;
use kgfield::quadrature::QuadratureSpec;
use kgfield::regularizer::Regularizer;
use kgfield::sampler::{emt_components, emt_vacuum_target, hamiltonian, sample_vacuum, EnsembleSpec};
use kgfield::testfn::TestFunction;

fn main() -> kgfield::Result<()> {
    let quad = QuadratureSpec::with_rel_tol(1e-9);
    let f = TestFunction::gaussian(1.0);
    let g = TestFunction::gaussian_at([0.0, 0.5, 1.0], 0.8);
    let base = inner_product(&f, &g, 1.0, 1.0, &quad)?.re;
    for eta in [0.0, 0.25, 0.5, 1.0] {
        let v = boosted_inner_product(&f, &g, eta, 1.0, 1.0, &quad)?.re;
        println!("rapidity {eta}: (f,g) = {v:.15e}  rel diff {:.1e}", (v - base).abs() / base);
    }

    let lattice = LatticeSpec::new(16, 0.5)?;
    let reg = Regularizer::kg_vacuum(1.0, 1.0, 1.0)?;
    let ens = sample_vacuum(EnsembleSpec::new(lattice, reg, 2000, 9)?);
    let t00: Vec<f64> = ens.map(|c| emt_components(c, 1.0, 1.0, 1.0)[0][0]);
    let mean = t00.iter().sum::<f64>() / t00.len() as f64;
    println!("\n<T00> = {mean:.3}, plug-in sum {:.3}", emt_vacuum_target(&lattice, &reg)[0][0]);
    let c = ens.config(0);
    println!("sample 0: T00 = {:.6}, H = {:.6}", emt_components(&c, 1.0, 1.0, 1.0)[0][0], hamiltonian(&c, &reg));
    Ok(())
}
