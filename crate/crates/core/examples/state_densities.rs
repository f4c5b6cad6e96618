//! Marginal densities of a smeared field in non-vacuum states: total masses,
//! moments and exact samples.

use num_complex::Complex64;

use kgfield::states::{density, moments, sample_density, total_mass, StateKind, StateSpec};

fn main() -> kgfield::Result<()> {
    let kinds = [
        ("vacuum", StateKind::Vacuum),
        ("one particle", StateKind::NParticle(1)),
        ("two particles", StateKind::NParticle(2)),
        ("three particles", StateKind::NParticle(3)),
        ("coherent", StateKind::Coherent),
        ("superposition", StateKind::Superposition { u: Complex64::new(1.0, 0.0), v: Complex64::new(0.5, 0.0) }),
    ];
    for (name, kind) in kinds {
        let s = StateSpec::with_theta(kind, 1.0, 0.5)?;
        let draws = sample_density(&s, 50_000, 3)?;
        let m2 = draws.iter().map(|q| q * q).sum::<f64>() / draws.len() as f64;
        println!(
            "{name:>15}: mass {:.10}  rho(0) {:.6}  <q^2> {:.4} (sampled {:.4})",
            total_mass(&s),
            density(&s, 0.0),
            moments(&s, 2)?,
            m2
        );
    }
    Ok(())
}
