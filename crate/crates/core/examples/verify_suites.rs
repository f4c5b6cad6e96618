//! Runs the named verification suites and prints one line per check.
//!
//! `cargo run --release --example verify_suites -- [suite] [quick|full]`

use kgfield::verify::{run_suite, Profile, Suite};

fn main() -> Result<(), kgfield::Error> {
    let mut args = std::env::args().skip(1);
    let suite: Suite = args.next().as_deref().unwrap_or("all").parse()?;
    let profile: Profile = args.next().as_deref().unwrap_or("quick").parse()?;

    let report = run_suite(suite, profile);
    for c in &report.checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        println!("{mark} {:<55} target={:<24e} observed={:<24e} tol={:e}", c.name, c.target, c.observed, c.tol);
    }
    println!(
        "{} checks, {} failed, {:.1} s",
        report.checks.len(),
        report.failures().count(),
        report.wall_time.as_secs_f64()
    );
    Ok(())
}
