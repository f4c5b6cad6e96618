//! Smeared-field variance under the classical Gibbs measure and under the
//! quantized vacuum, for several masses, widths and regularizers.

use kgfield::analytic::{smeared_variance, SpectralWeight};
use kgfield::quadrature::QuadratureSpec;
use kgfield::regularizer::{Regularizer, RegularizerKind};
use kgfield::testfn::TestFunction;

fn main() -> kgfield::Result<()> {
    let quad = QuadratureSpec::default();
    println!("{:>5} {:>5} {:>22} {:>22} {:>10}", "m", "s", "quantum", "classical (kT=1000)", "rel diff");
    for m in [0.0, 0.5, 1.0, 5.0] {
        for s in [0.5, 1.0, 2.0] {
            let f = TestFunction::gaussian(s);
            let q = smeared_variance(&f, &SpectralWeight::quantum(m, 1.0)?, &quad)?;
            let reg = Regularizer::kg_vacuum(m, 1000.0, 1.0)?;
            let c = smeared_variance(&f, &SpectralWeight::Classical(reg), &quad)?;
            println!("{m:>5} {s:>5} {q:>22.15e} {c:>22.15e} {:>10.1e}", (c - q).abs() / q);
        }
    }

    // other regularizers give other variances for the same test function
    let f = TestFunction::cube([0.0; 3], 0.5);
    for kind in [
        RegularizerKind::KgVacuum,
        RegularizerKind::PowerLaw { alpha: 2.0 },
        RegularizerKind::SharpCutoff { lambda: 8.0 },
        RegularizerKind::ExpMass { lambda: 4.0 },
    ] {
        let reg = Regularizer::new(kind, 1.0, 1.0, 1.0)?;
        let v = smeared_variance(&f, &SpectralWeight::Classical(reg), &QuadratureSpec::with_rel_tol(1e-9))?;
        println!("box a=0.5, xi={kind}: variance {v:.12e}");
    }
    Ok(())
}
