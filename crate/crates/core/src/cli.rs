//! The `kgfield` command line.
//!
//! Every command prints a `#` provenance header whose `# command:` line lists
//! every parameter explicitly; running that line again reproduces the output
//! byte for byte. `verify` prints JSON on stdout and the header on stderr.
//!
//! Exit codes: 0 success, 1 usage, 2 divergent integral (or `m = 0` kernel),
//! 3 non-convergent numerics, 4 verification failure.
//!
//! Environment: `SEED` supplies the seed when `--seed` is absent;
//! `FAULT_INJECT=1` runs `verify` under each suite's documented fault, and
//! `FAULT_INJECT=<fault name>` under that fault everywhere.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, CommandFactory, Parser, Subcommand};
use num_complex::Complex64;

use crate::analytic::{antilocal_kernel, bessel_reference, kernel_oracle, smeared_variance, SpectralWeight};
use crate::error::{Error, Result};
use crate::fault::Fault;
use crate::lattice::LatticeSpec;
use crate::quadrature::QuadratureSpec;
use crate::regularizer::{Regularizer, RegularizerKind};
use crate::sampler::{
    emt_components, emt_vacuum_target, estimate_moments, excess_kurtosis, lattice_covariance, lattice_inner_product,
    sample_one_particle, sample_vacuum, EnsembleSpec, MCEstimate,
};
use crate::states::{self, StateKind, StateSpec};
use crate::testfn::TestFunction;
use crate::verify::{run_suite_with, Injection, Profile, RunOptions, Suite, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DIVERGENT: i32 = 2;
pub const EXIT_NONCONVERGENT: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "kgfield", version, about = "Classical random-field model of the Klein-Gordon vacuum")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Variance of a smeared field under a spectral measure.
    Variance(VarianceArgs),
    /// The anti-local kernel on a radial grid (CSV).
    Kernel(KernelArgs),
    /// Monte Carlo estimates from a lattice ensemble (CSV).
    Sample(SampleArgs),
    /// Marginal density of a smeared field in a given state (CSV).
    Density(DensityArgs),
    /// Run a verification suite (JSON report).
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Io {
    /// Flat `key = value` file; entries act as flags the command line overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Physics {
    #[arg(long, allow_negative_numbers = true)]
    mass: f64,
    #[arg(long = "kT", default_value_t = 1.0)]
    kt: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
}

impl Physics {
    fn canonical(&self, out: &mut Vec<String>) {
        out.push(format!("--mass={}", Num(self.mass)));
        out.push(format!("--kT={}", Num(self.kt)));
        out.push(format!("--hbar={}", Num(self.hbar)));
    }
}

#[derive(Args, Debug)]
struct VarianceArgs {
    #[command(flatten)]
    physics: Physics,
    /// Regularizer: kg, cutoff:L=, expmass:L=, power:a=.
    #[arg(long, default_value = "kg")]
    xi: RegularizerKind,
    /// Test function, e.g. gaussian:s=1,x=0,y=0,z=0,A=1 or box:a=0.5.
    #[arg(long, default_value = "gaussian:s=1")]
    testfn: TestFunction,
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
    /// Also print the quantum variance and the relative difference.
    #[arg(long)]
    compare: bool,
    #[command(flatten)]
    io: Io,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long, allow_negative_numbers = true)]
    mass: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    rmin: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    rmax: f64,
    #[arg(long, default_value_t = 40)]
    points: usize,
    /// Append the signed numerical transform (the kernel is minus this value).
    #[arg(long)]
    oracle: bool,
    /// Convergence tolerance of the oracle extrapolation.
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
    #[command(flatten)]
    io: Io,
}

#[derive(Debug, Clone)]
enum EnsembleState {
    Vacuum,
    OneParticle(TestFunction),
}

impl FromStr for EnsembleState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "vacuum" {
            return Ok(Self::Vacuum);
        }
        match s.strip_prefix("one-particle:g=") {
            Some(g) => Ok(Self::OneParticle(g.parse()?)),
            None => Err(Error::Config(format!("unknown state `{s}` (vacuum or one-particle:g=<testfn>)"))),
        }
    }
}

impl std::fmt::Display for EnsembleState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Vacuum => f.write_str("vacuum"),
            Self::OneParticle(g) => write!(f, "one-particle:g={g}"),
        }
    }
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long, default_value = "kg")]
    xi: RegularizerKind,
    /// Lattice sites per side.
    #[arg(long, default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Smearing functions (repeatable); defaults to gaussian:s=1.
    #[arg(long)]
    testfn: Vec<TestFunction>,
    /// vacuum or one-particle:g=<testfn>.
    #[arg(long, default_value = "vacuum")]
    state: EnsembleState,
    /// Append the ten independent energy-momentum tensor means (vacuum only).
    #[arg(long)]
    emt: bool,
    #[command(flatten)]
    io: Io,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum DensityState {
    Vacuum,
    N(u8),
    Coherent,
    Superposition,
}

impl FromStr for DensityState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vacuum" => Ok(Self::Vacuum),
            "n:1" => Ok(Self::N(1)),
            "n:2" => Ok(Self::N(2)),
            "n:3" => Ok(Self::N(3)),
            "coherent" => Ok(Self::Coherent),
            "superposition" => Ok(Self::Superposition),
            _ => Err(Error::Config(format!(
                "unknown state `{s}` (vacuum, n:1, n:2, n:3, coherent, superposition)"
            ))),
        }
    }
}

impl std::fmt::Display for DensityState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Vacuum => f.write_str("vacuum"),
            Self::N(n) => write!(f, "n:{n}"),
            Self::Coherent => f.write_str("coherent"),
            Self::Superposition => f.write_str("superposition"),
        }
    }
}

/// Shortest round-trip decimal, switching to exponent form outside `[1e-4, 1e15)`.
struct Num(f64);

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let a = self.0.abs();
        if self.0 == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{:e}", self.0)
        }
    }
}

/// Complex numbers as `re`, `re+imi` or `re-imi`.
/// Signed zeros are normalized to `+0`.
fn parse_complex(s: &str) -> Result<Complex64> {
    let z = match s.parse::<f64>() {
        Ok(re) => Complex64::new(re, 0.0),
        Err(_) => Complex64::from_str(s).map_err(|_| Error::Config(format!("`{s}` is not a complex number")))?,
    };
    Ok(Complex64::new(z.re + 0.0, z.im + 0.0))
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}{}{}i", Num(z.re), if z.im.is_sign_negative() { "" } else { "+" }, Num(z.im))
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// vacuum, n:1, n:2, n:3, coherent or superposition.
    #[arg(long, default_value = "vacuum")]
    state: DensityState,
    /// `(f,f)`.
    #[arg(long, default_value_t = 1.0)]
    ff: f64,
    /// `(g,g)`.
    #[arg(long, default_value_t = 1.0)]
    gg: f64,
    /// `(f,g)`; zero unless given.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "theta")]
    fg: Option<Complex64>,
    /// Sets a real `(f,g) = √(θ(f,f)(g,g))`.
    #[arg(long)]
    theta: Option<f64>,
    /// Superposition coefficient of the one-particle part.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    u: Complex64,
    /// Superposition coefficient of the vacuum part.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    v: Complex64,
    #[arg(long, default_value_t = 401)]
    points: usize,
    /// Half-width of the grid in units of `√(f,f)`.
    #[arg(long, default_value_t = 8.0)]
    width: f64,
    #[command(flatten)]
    io: Io,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// variance, density, kernel, boost, emt or all.
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// quick or full.
    #[arg(long, default_value = "quick")]
    profile: Profile,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    io: Io,
}

/// Parses and runs one command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse(&args) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Divergent(_) | Error::Domain(_) => EXIT_DIVERGENT,
        Error::NonConvergent(_) | Error::EnvelopeFailure { .. } => EXIT_NONCONVERGENT,
        Error::HermitianViolation { .. } => EXIT_VERIFY,
        Error::Config(_) | Error::DegenerateTestFunction { .. } | Error::InsufficientSamples { .. } => EXIT_USAGE,
    }
}

fn clap_parse(args: &[OsString]) -> std::result::Result<Cli, i32> {
    Cli::try_parse_from(args).map_err(|e| {
        let _ = e.print();
        match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
            _ => EXIT_USAGE,
        }
    })
}

/// Parses the command line with any `--config` entries inserted ahead of the user's flags.
fn parse(args: &[OsString]) -> std::result::Result<Cli, i32> {
    let Some(path) = config_path(args) else {
        return clap_parse(args);
    };
    let merged = merge_config(args, &path).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_USAGE
    })?;
    clap_parse(&merged)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_str()?;
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn merge_config(args: &[OsString], path: &PathBuf) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let sub_name = args[1..]
        .iter()
        .find_map(|a| a.to_str().filter(|s| !s.starts_with('-')))
        .ok_or_else(|| Error::Config("missing subcommand".into()))?
        .to_string();
    let root = Cli::command();
    let sub = root
        .find_subcommand(&sub_name)
        .ok_or_else(|| Error::Config(format!("unknown subcommand `{sub_name}`")))?;
    let user_keys: Vec<String> = args
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();

    let mut extra: Vec<OsString> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Config(format!("{}:{}: expected key = value", path.display(), lineno + 1)))?;
        if key == "config" || key == "output" {
            return Err(Error::Config(format!("`{key}` cannot be set from a config file")));
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key))
            .ok_or_else(|| Error::Config(format!("{}: unknown key `{key}` for `{sub_name}`", path.display())))?;
        if user_keys.iter().any(|k| k == key) {
            continue;
        }
        if arg.get_action().takes_values() {
            extra.push(format!("--{key}={value}").into());
        } else {
            match value {
                "true" => extra.push(format!("--{key}").into()),
                "false" => {}
                _ => return Err(Error::Config(format!("`{key}` takes true or false, got `{value}`"))),
            }
        }
    }
    let pos = args.iter().position(|a| a.to_str() == Some(&sub_name)).expect("found above");
    let mut merged = args[..=pos].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[pos + 1..]);
    Ok(merged)
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("SEED") {
        Ok(v) if !v.is_empty() => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("SEED must be an unsigned integer, got `{v}`"))),
        _ => Ok(DEFAULT_SEED),
    }
}

fn resolve_injection() -> Result<Injection> {
    match std::env::var("FAULT_INJECT") {
        Ok(v) => match v.trim() {
            "" | "0" => Ok(Injection::None),
            "1" => Ok(Injection::Documented),
            name => Ok(Injection::Only(name.parse::<Fault>()?)),
        },
        Err(_) => Ok(Injection::None),
    }
}

fn header(sub: &str, flags: &[String]) -> String {
    let mut h = format!("# kgfield {}\n# command: kgfield {sub}", env!("CARGO_PKG_VERSION"));
    for f in flags {
        h.push(' ');
        h.push_str(f);
    }
    h.push('\n');
    h
}

fn emit(io: &Io, text: &str) -> Result<()> {
    match &io.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Config(format!("cannot write output: {e}")))
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Variance(a) => variance(a),
        Command::Kernel(a) => kernel(a),
        Command::Sample(a) => sample(a),
        Command::Density(a) => density(a),
        Command::Verify(a) => verify(a),
    }
}

fn variance(a: VarianceArgs) -> Result<i32> {
    let p = &a.physics;
    let quad = QuadratureSpec::with_rel_tol(a.rel_tol);
    quad.validate()?;
    let reg = Regularizer::new(a.xi, p.mass, p.kt, p.hbar)?;
    let classical = smeared_variance(&a.testfn, &SpectralWeight::Classical(reg), &quad)?;

    let mut flags = Vec::new();
    p.canonical(&mut flags);
    flags.push(format!("--xi={}", a.xi));
    flags.push(format!("--testfn={}", a.testfn));
    flags.push(format!("--rel-tol={}", Num(a.rel_tol)));
    if a.compare {
        flags.push("--compare".into());
    }
    let mut text = header("variance", &flags);
    text.push_str("quantity,value\n");
    writeln!(text, "classical_variance,{}", Num(classical)).unwrap();
    if a.compare {
        let quantum = smeared_variance(&a.testfn, &SpectralWeight::quantum(p.mass, p.hbar)?, &quad)?;
        writeln!(text, "quantum_variance,{}", Num(quantum)).unwrap();
        writeln!(text, "relative_difference,{}", Num((classical - quantum).abs() / quantum.abs())).unwrap();
    }
    emit(&a.io, &text)?;
    Ok(EXIT_OK)
}

fn kernel(a: KernelArgs) -> Result<i32> {
    if !(a.rmin > 0.0 && a.rmin.is_finite() && a.rmax.is_finite() && a.rmax >= a.rmin) {
        return Err(Error::Config(format!("need 0 < rmin ≤ rmax, got rmin={} rmax={}", a.rmin, a.rmax)));
    }
    if a.points == 0 || (a.points == 1 && a.rmax != a.rmin) {
        return Err(Error::Config("need at least two points for a range".into()));
    }
    if a.mass < 0.0 || a.mass.is_nan() {
        return Err(Error::Config(format!("mass must be nonnegative, got {}", a.mass)));
    }
    let quad = QuadratureSpec::with_rel_tol(a.rel_tol);
    quad.validate()?;

    let mut flags = vec![
        format!("--mass={}", Num(a.mass)),
        format!("--rmin={}", Num(a.rmin)),
        format!("--rmax={}", Num(a.rmax)),
        format!("--points={}", a.points),
        format!("--rel-tol={}", Num(a.rel_tol)),
    ];
    if a.oracle {
        flags.push("--oracle".into());
    }
    let mut text = header("kernel", &flags);
    text.push_str(if a.oracle { "r,kernel,bessel_reference,oracle\n" } else { "r,kernel,bessel_reference\n" });
    for i in 0..a.points {
        let r = if a.points == 1 { a.rmin } else { a.rmin + (a.rmax - a.rmin) * i as f64 / (a.points - 1) as f64 };
        write!(text, "{},{},{}", Num(r), Num(antilocal_kernel(r, a.mass)?), Num(bessel_reference(r, a.mass)?)).unwrap();
        if a.oracle {
            write!(text, ",{}", Num(kernel_oracle(r, a.mass, &quad)?)).unwrap();
        }
        text.push('\n');
    }
    emit(&a.io, &text)?;
    Ok(EXIT_OK)
}

fn estimate_row(text: &mut String, name: &str, e: &MCEstimate, target: f64) {
    writeln!(text, "{name},{},{},{},{}", Num(e.mean), Num(e.std_error), Num(target), Num(e.sigmas(target))).unwrap();
}

fn sample(a: SampleArgs) -> Result<i32> {
    let p = &a.physics;
    let seed = resolve_seed(a.seed)?;
    if a.count == 0 {
        return Err(Error::Config("--count must be positive".into()));
    }
    let lattice = LatticeSpec::new(a.n, a.spacing)?;
    let reg = Regularizer::new(a.xi, p.mass, p.kt, p.hbar)?;
    let fs = if a.testfn.is_empty() { vec![TestFunction::gaussian(1.0)] } else { a.testfn.clone() };
    let transforms = fs.iter().map(|f| f.lattice_transform(&lattice)).collect::<Result<Vec<_>>>()?;

    let mut flags = Vec::new();
    p.canonical(&mut flags);
    flags.push(format!("--xi={}", a.xi));
    flags.push(format!("--n={}", a.n));
    flags.push(format!("--spacing={}", Num(a.spacing)));
    flags.push(format!("--count={}", a.count));
    flags.push(format!("--seed={seed}"));
    for f in &fs {
        flags.push(format!("--testfn={f}"));
    }
    flags.push(format!("--state={}", a.state));
    if a.emt {
        flags.push("--emt".into());
    }
    let mut text = header("sample", &flags);
    text.push_str("observable,estimate,std_error,analytic_target,sigmas\n");

    match &a.state {
        EnsembleState::Vacuum => {
            let ens = sample_vacuum(EnsembleSpec::new(lattice, reg, a.count, seed)?);
            let smears = ens.smears(&fs)?;
            let m = estimate_moments(&smears)?;
            for (i, e) in m.means.iter().enumerate() {
                estimate_row(&mut text, &format!("mean[f{i}]"), e, 0.0);
            }
            for i in 0..fs.len() {
                for j in i..fs.len() {
                    let target = lattice_covariance(&transforms[i], &transforms[j], &lattice, &reg);
                    let name = if i == j { format!("var[f{i}]") } else { format!("cov[f{i},f{j}]") };
                    estimate_row(&mut text, &name, &m.covariances[i][j], target);
                }
            }
            if a.count >= 4 {
                for (i, x) in smears.iter().enumerate() {
                    estimate_row(&mut text, &format!("excess_kurtosis[f{i}]"), &excess_kurtosis(x)?, 0.0);
                }
            }
            if a.emt {
                let tensors = ens.map(|c| emt_components(c, reg.mass(), reg.kt(), reg.hbar()));
                let pairs: Vec<(usize, usize)> = (0..4).flat_map(|m| (m..4).map(move |n| (m, n))).collect();
                let rows: Vec<Vec<f64>> = pairs.iter().map(|&(m, n)| tensors.iter().map(|t| t[m][n]).collect()).collect();
                let means = estimate_moments(&rows)?.means;
                let target = emt_vacuum_target(&lattice, &reg);
                for (&(m, n), e) in pairs.iter().zip(&means) {
                    estimate_row(&mut text, &format!("T{m}{n}"), e, target[m][n]);
                }
            }
        }
        EnsembleState::OneParticle(g) => {
            if a.xi != RegularizerKind::KgVacuum {
                return Err(Error::Config("one-particle ensembles use --xi=kg".into()));
            }
            if a.emt {
                return Err(Error::Config("--emt is only available for the vacuum state".into()));
            }
            let ens = sample_one_particle(lattice, p.mass, p.kt, p.hbar, g, a.count, seed)?;
            let smears = ens.smears(&fs)?;
            let m = estimate_moments(&smears)?;
            for (i, e) in m.means.iter().enumerate() {
                estimate_row(&mut text, &format!("mean[f{i}]"), e, 0.0);
            }
            let g_t = g.lattice_transform(&lattice)?;
            let gg = lattice_inner_product(&g_t, &g_t, &lattice, p.mass, p.hbar).re;
            let squares: Vec<Vec<f64>> = smears.iter().map(|x| x.iter().map(|v| v * v).collect()).collect();
            let sq = estimate_moments(&squares)?;
            for (i, f_t) in transforms.iter().enumerate() {
                let ff = lattice_inner_product(f_t, f_t, &lattice, p.mass, p.hbar).re;
                let fg = lattice_inner_product(f_t, &g_t, &lattice, p.mass, p.hbar);
                // ⟨φ_f²⟩ = (f,f)(1 + 2θ)
                let target = ff + 2.0 * fg.norm_sqr() / gg;
                estimate_row(&mut text, &format!("second_moment[f{i}]"), &sq.means[i], target);
            }
        }
    }
    emit(&a.io, &text)?;
    Ok(EXIT_OK)
}

fn density(a: DensityArgs) -> Result<i32> {
    if a.points < 2 {
        return Err(Error::Config("--points must be at least 2".into()));
    }
    if !(a.width > 0.0 && a.width.is_finite()) {
        return Err(Error::Config(format!("--width must be positive, got {}", a.width)));
    }
    let fg = match (a.fg, a.theta) {
        (Some(fg), _) => fg,
        (None, Some(t)) if (0.0..=1.0).contains(&t) => Complex64::new((t * a.ff * a.gg).sqrt(), 0.0),
        (None, Some(t)) => return Err(Error::Config(format!("θ must lie in [0, 1], got {t}"))),
        (None, None) => Complex64::new(0.0, 0.0),
    };
    let kind = match a.state {
        DensityState::Vacuum => StateKind::Vacuum,
        DensityState::N(n) => StateKind::NParticle(n),
        DensityState::Coherent => StateKind::Coherent,
        DensityState::Superposition => StateKind::Superposition { u: a.u, v: a.v },
    };
    let state = StateSpec::new(kind, a.ff, a.gg, fg)?;

    let mut flags = vec![format!("--state={}", a.state), format!("--ff={}", Num(a.ff)), format!("--gg={}", Num(a.gg))];
    match a.theta {
        Some(t) => flags.push(format!("--theta={}", Num(t))),
        None => flags.push(format!("--fg={}", fmt_complex(fg))),
    }
    if a.state == DensityState::Superposition {
        flags.push(format!("--u={}", fmt_complex(a.u)));
        flags.push(format!("--v={}", fmt_complex(a.v)));
    }
    flags.push(format!("--points={}", a.points));
    flags.push(format!("--width={}", Num(a.width)));
    let mut text = header("density", &flags);
    writeln!(text, "# total_mass={}", Num(states::total_mass(&state))).unwrap();
    text.push_str("q,rho\n");
    let center = if a.state == DensityState::Coherent { 2.0 * fg.re } else { 0.0 };
    let half = a.width * a.ff.sqrt();
    for i in 0..a.points {
        let q = center - half + 2.0 * half * i as f64 / (a.points - 1) as f64;
        writeln!(text, "{},{}", Num(q), Num(states::density(&state, q))).unwrap();
    }
    emit(&a.io, &text)?;
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs) -> Result<i32> {
    let seed = resolve_seed(a.seed)?;
    let injection = resolve_injection()?;
    let flags = vec![format!("--suite={}", a.suite), format!("--profile={}", a.profile), format!("--seed={seed}")];
    let mut head = header("verify", &flags);
    match injection {
        Injection::None => {}
        Injection::Documented => head.push_str("# fault-injection: documented\n"),
        Injection::Only(f) => writeln!(head, "# fault-injection: {f}").unwrap(),
    }
    eprint!("{head}");
    let report = run_suite_with(a.suite, &RunOptions { profile: a.profile, seed, injection });
    let mut text = report.to_json();
    text.push('\n');
    emit(&a.io, &text)?;
    eprintln!(
        "# {} checks, {} failed, {:.1} s",
        report.checks.len(),
        report.failures().count(),
        report.wall_time.as_secs_f64()
    );
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY })
}
