//! Lattice ensemble of the Klein-Gordon Gibbs measure: sample moments of a few
//! smeared fields against the exact lattice covariance and the continuum
//! two-point function. The box's sharp edges carry wavenumbers beyond the
//! lattice cutoff, so its continuum value differs from the lattice one.

use kgfield::analytic::connected_two_point;
use kgfield::lattice::LatticeSpec;
use kgfield::quadrature::QuadratureSpec;
use kgfield::regularizer::Regularizer;
use kgfield::sampler::{ensemble_moments, lattice_covariance, sample_vacuum, EnsembleSpec};
use kgfield::testfn::TestFunction;

fn main() -> kgfield::Result<()> {
    let lattice = LatticeSpec::new(16, 0.5)?;
    let reg = Regularizer::kg_vacuum(1.0, 1.0, 1.0)?;
    let ens = sample_vacuum(EnsembleSpec::new(lattice, reg, 5000, 42)?);
    let fs = [
        TestFunction::gaussian(0.8),
        TestFunction::gaussian_at([1.0, 0.0, 0.0], 0.8),
        TestFunction::cube([2.0, 2.0, 0.0], 0.5),
    ];
    let m = ensemble_moments(&ens, &fs)?;
    let quad = QuadratureSpec::with_rel_tol(1e-10);
    let transforms = fs.iter().map(|f| f.lattice_transform(&lattice)).collect::<kgfield::Result<Vec<_>>>()?;
    for a in 0..fs.len() {
        for b in a..fs.len() {
            let exact = lattice_covariance(&transforms[a], &transforms[b], &lattice, &reg);
            let continuum = connected_two_point(&fs[a], &fs[b], 1.0, 1.0, &quad)?.re;
            let e = m.covariances[a][b];
            println!(
                "<phi_{a} phi_{b}> = {:.5} ± {:.5}   lattice {exact:.5} ({:+.2} se)   continuum {continuum:.5}",
                e.mean,
                e.std_error,
                e.sigmas(exact)
            );
        }
    }
    Ok(())
}
