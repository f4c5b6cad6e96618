//! The anti-local kernel against its numerical Fourier transform, and the
//! nonzero overlap of test functions with disjoint supports.

use kgfield::analytic::{antilocal_kernel, inner_product, kernel_oracle};
use kgfield::quadrature::QuadratureSpec;
use kgfield::testfn::TestFunction;

fn main() -> kgfield::Result<()> {
    let m = 1.0;
    let quad = QuadratureSpec::with_rel_tol(1e-6);
    println!("{:>6} {:>22} {:>22} {:>10}", "r", "kernel", "-oracle", "rel diff");
    for r in [0.5, 1.0, 2.0, 4.0, 7.0, 10.0] {
        let k = antilocal_kernel(r, m)?;
        let o = -kernel_oracle(r, m, &quad)?;
        println!("{r:>6} {k:>22.15e} {o:>22.15e} {:>10.1e}", (k - o).abs() / o);
    }

    println!("\nunit boxes at separation d, m = {m}");
    let f = TestFunction::cube([0.0; 3], 0.5);
    let quad = QuadratureSpec::with_rel_tol(1e-10);
    for d in [2.0, 4.0, 6.0, 8.0] {
        let g = TestFunction::cube([d, 0.0, 0.0], 0.5);
        let v = inner_product(&f, &g, m, 1.0, &quad)?;
        println!("d = {d}: (f,g) = {:.6e}", v.re);
    }
    Ok(())
}
