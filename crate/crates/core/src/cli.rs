//! Command-line front end: argument parsing, the analysis pipeline, and
//! report emission.
//!
//! Exit codes: 0 when every check passes, 1 for input errors (unreadable or
//! malformed files, bad flags), 2 when a certificate is invalid, fails
//! verification, or the system falls outside the assumptions.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::certificate::{
    build_block_matrix, build_gram, make_certificate_t1, make_certificate_t2, modified_log_norm, optimize_rate,
    semigroup_contraction, AccretivityCheck, Certificate, SearchConfig, Variant, CONTRACTION_TIMES, VERIFY_TOL,
};
use crate::constants::{omega1_breakdown, omega2_bounds, Theorem1Params, Theorem2Params};
use crate::decomposition::{check_assumptions, decompose, Decomposition, OperatorPair};
use crate::error::{DecayError, Result};
use crate::generators;
use crate::linalg::{self, MatrixExponential};
use crate::mtx;
use crate::pencil::{spectrum_from_decomposition, verify_localization_with_tol};
use crate::report::{
    CertificateEntry, EnvelopeEntry, ErrorEntry, InputDescriptor, LocalizationEntry, RunReport, SimulationSummary,
    SpectrumSummary,
};
use crate::simulate::{self, Propagator, Trajectory};

/// Relative slack of the semigroup contraction check.
pub const CONTRACTION_RTOL: f64 = 1e-6;
/// Allowed shortfall of the fitted rate below the certified one.
pub const FIT_RATE_SLACK: f64 = 1e-3;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CERTIFICATE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "decaycert", version, about = "Exponential decay certificates for u'' + Du' + Au = 0")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structural splitting and assumption flags.
    Decompose(DecomposeArgs),
    /// Search (or evaluate pinned) certificate parameters and verify them.
    Certify(CertifyArgs),
    /// Pencil eigenvalues and localization against the certificates.
    Spectrum(CertifyArgs),
    /// Trajectory, envelope check and fitted rate.
    Simulate(SimulateArgs),
    /// Full pipeline: decompose, certify, spectrum, simulate.
    Check(SimulateArgs),
    /// Write a generated pair as Matrix Market files.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Scalar,
    DampedWave,
    Random,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Scalar => "scalar",
            Family::DampedWave => "damped-wave",
            Family::Random => "random",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantChoice {
    T1,
    T2,
    Both,
}

impl VariantChoice {
    fn variants(self) -> &'static [Variant] {
        match self {
            VariantChoice::T1 => &[Variant::Theorem1],
            VariantChoice::T2 => &[Variant::Theorem2],
            VariantChoice::Both => &[Variant::Theorem1, Variant::Theorem2],
        }
    }
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    Complex64::from_str(s.trim()).map_err(|e| format!("'{s}' is not a complex number: {e}"))
}

#[derive(Clone, Debug, Args)]
pub struct GeneratorArgs {
    /// Generator family.
    #[arg(long, value_enum)]
    pub generate: Option<Family>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dimension (damped-wave default 7, random default 5).
    #[arg(long)]
    pub n: Option<usize>,
    /// Scalar stiffness, e.g. `1+1i`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub a: Option<Complex64>,
    /// Scalar damping, or the damped-wave coefficient (default 1).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub d: Option<Complex64>,
    /// Damped-wave loss tangent (default 0).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Random family: bound on the sector tangent (default 0.5).
    #[arg(long)]
    pub sector_tan_max: Option<f64>,
    /// Random family: lower bound on β (default 1).
    #[arg(long)]
    pub beta_min: Option<f64>,
}

#[derive(Clone, Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["a_path", "generate"])))]
pub struct InputArgs {
    /// Stiffness matrix (Matrix Market).
    #[arg(long = "A", value_name = "PATH", requires = "d_path", conflicts_with = "generate")]
    pub a_path: Option<PathBuf>,
    /// Damping matrix (Matrix Market).
    #[arg(long = "D", value_name = "PATH", requires = "a_path")]
    pub d_path: Option<PathBuf>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

#[derive(Clone, Debug, Args)]
pub struct OutputArgs {
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct CertArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub variant: VariantChoice,
    /// Pin k (skips the search).
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Search grid points per axis.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Verification tolerance.
    #[arg(long, default_value_t = VERIFY_TOL)]
    pub tol: f64,
}

#[derive(Clone, Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub cert: CertArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct SimArgs {
    /// Trajectory CSV path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Seed for the initial data.
    #[arg(long, default_value_t = 0)]
    pub ic_seed: u64,
    #[arg(long, default_value_t = simulate::DEFAULT_SAMPLES)]
    pub samples: usize,
}

#[derive(Clone, Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub cert: CertArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Directory receiving `A.mtx` and `D.mtx`.
    #[arg(long)]
    pub out: PathBuf,
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    /// Absent for `generate` and for runs that failed before a report existed.
    pub report: Option<RunReport>,
    pub trajectory: Option<Trajectory>,
    /// Human-readable lines for stderr.
    pub messages: Vec<String>,
}

fn input_error(msg: impl Into<String>) -> DecayError {
    DecayError::InvalidInput(msg.into())
}

/// Builds the generated pair and the descriptor recording its arguments.
pub fn generate_pair(args: &GeneratorArgs) -> Result<(OperatorPair, InputDescriptor)> {
    let family = args.generate.ok_or_else(|| input_error("--generate <family> is required"))?;
    let mut desc = InputDescriptor { family: Some(family.name().to_string()), ..Default::default() };
    let pair = match family {
        Family::Scalar => {
            let a = args.a.ok_or_else(|| input_error("scalar family needs --a"))?;
            let d = args.d.ok_or_else(|| input_error("scalar family needs --d"))?;
            desc.params.insert("a".into(), a.to_string());
            desc.params.insert("d".into(), d.to_string());
            generators::gen_scalar(a, d)?.pair
        }
        Family::DampedWave => {
            let n = args.n.unwrap_or(7);
            let gamma = args.gamma.unwrap_or(0.0);
            let d = args.d.unwrap_or(linalg::real(1.0));
            if d.im != 0.0 {
                return Err(DecayError::InvalidParams(format!("damped-wave --d must be real, got {d}")));
            }
            desc.params.insert("n".into(), n.to_string());
            desc.params.insert("gamma".into(), format!("{gamma:?}"));
            desc.params.insert("d".into(), format!("{:?}", d.re));
            generators::gen_damped_wave(n, gamma, d.re)?
        }
        Family::Random => {
            let n = args.n.unwrap_or(5);
            let tan = args.sector_tan_max.unwrap_or(0.5);
            let beta_min = args.beta_min.unwrap_or(1.0);
            if n == 0 || !(tan >= 0.0 && tan.is_finite()) || !(beta_min > 0.0 && beta_min.is_finite()) {
                return Err(DecayError::InvalidParams(format!(
                    "random family needs n >= 1, sector-tan-max >= 0, beta-min > 0; got {n}, {tan}, {beta_min}"
                )));
            }
            desc.seed = Some(args.seed);
            desc.params.insert("n".into(), n.to_string());
            desc.params.insert("sector_tan_max".into(), format!("{tan:?}"));
            desc.params.insert("beta_min".into(), format!("{beta_min:?}"));
            generators::gen_random_valid(n, tan, beta_min, args.seed)
        }
    };
    Ok((pair, desc))
}

/// Reads the files or runs the generator.
pub fn load_input(args: &InputArgs) -> Result<(OperatorPair, InputDescriptor)> {
    match (&args.a_path, &args.d_path) {
        (Some(a), Some(d)) => {
            let desc = InputDescriptor {
                a_path: Some(a.display().to_string()),
                d_path: Some(d.display().to_string()),
                ..Default::default()
            };
            let pair = OperatorPair::new(mtx::load_matrix(a)?, mtx::load_matrix(d)?)?;
            Ok((pair, desc))
        }
        (None, None) => generate_pair(&args.generator),
        _ => Err(input_error("--A and --D must be given together")),
    }
}

/// Evaluates pinned parameters, or `None` when the search should run.
fn pinned_certificate(dec: &Decomposition, args: &CertArgs, variant: Variant) -> Option<Result<Certificate>> {
    let k = args.k?;
    Some(match variant {
        Variant::Theorem1 => match args.m {
            Some(m) => make_certificate_t1(dec, Theorem1Params::new(k, m)),
            None => Err(input_error("pinned t1 parameters need --m")),
        },
        Variant::Theorem2 => match (args.p, args.q) {
            (Some(p), Some(q)) => make_certificate_t2(dec, Theorem2Params::new(k, p, q)),
            _ => Err(input_error("pinned t2 parameters need --p and --q")),
        },
    })
}

fn check_cert_args(args: &CertArgs) -> Result<()> {
    if args.k.is_none() && (args.m.is_some() || args.p.is_some() || args.q.is_some()) {
        return Err(input_error("--m, --p and --q require --k"));
    }
    if !(args.tol >= 0.0 && args.tol.is_finite()) {
        return Err(input_error(format!("--tol must be finite and nonnegative, got {}", args.tol)));
    }
    SearchConfig::with_grid(args.grid).validate().map_err(|e| input_error(e.to_string()))
}

fn verify_entry(
    dec: &Decomposition,
    cert: Certificate,
    pinned: bool,
    exp: &MatrixExponential,
) -> Result<CertificateEntry> {
    let bounds = omega2_bounds(dec, cert.k);
    let omega1_unsquared = match (cert.variant, cert.m) {
        (Variant::Theorem1, Some(m)) => {
            omega1_breakdown(dec, Theorem1Params::new(cert.k, m)).ok().map(|b| b.unsquared_at_minimizer)
        }
        _ => None,
    };
    let mut entry = CertificateEntry {
        energy_constant: cert.energy_constant(),
        pinned,
        accretivity: None,
        contraction_worst_ratio: None,
        contraction_holds: None,
        omega1_unsquared,
        omega2_footnote_bound: Some(bounds.footnote),
        omega2_in_text_bound: Some(bounds.in_text),
        certificate: cert,
    };
    if entry.certificate.valid {
        let cert = &entry.certificate;
        let gram = build_gram(dec, cert.k)?;
        let lambda_max = modified_log_norm(dec, &gram);
        entry.accretivity = Some(AccretivityCheck { lambda_max, bound: -cert.rate, margin: -cert.rate - lambda_max });
        let samples = semigroup_contraction(dec, cert, exp, &CONTRACTION_TIMES)?;
        entry.contraction_worst_ratio = Some(samples.iter().map(|s| s.norm / s.bound).fold(0.0, f64::max));
        entry.contraction_holds = Some(samples.iter().all(|s| s.holds(CONTRACTION_RTOL)));
    }
    Ok(entry)
}

fn entry_passes(entry: &CertificateEntry, tol: f64) -> bool {
    entry.certificate.valid
        && entry.accretivity.is_some_and(|a| a.margin >= -tol)
        && entry.contraction_holds == Some(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Depth {
    Decompose,
    Certify,
    Spectrum,
    Simulate,
    Check,
}

struct Pipeline<'a> {
    depth: Depth,
    input: &'a InputArgs,
    cert: Option<&'a CertArgs>,
    sim: Option<&'a SimArgs>,
}

struct Timer<'r> {
    report: &'r mut RunReport,
}

impl Timer<'_> {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.report.timings.insert(stage.to_string(), start.elapsed().as_secs_f64());
        out
    }
}

impl Pipeline<'_> {
    fn command_name(&self) -> &'static str {
        match self.depth {
            Depth::Decompose => "decompose",
            Depth::Certify => "certify",
            Depth::Spectrum => "spectrum",
            Depth::Simulate => "simulate",
            Depth::Check => "check",
        }
    }

    fn run(&self) -> Outcome {
        let mut messages = Vec::new();
        let started = Instant::now();
        let loaded = load_input(self.input);
        let (pair, desc) = match loaded {
            Ok(v) => v,
            Err(err) => {
                let mut report = RunReport::new(self.command_name(), InputDescriptor::default());
                report.errors.push(ErrorEntry::new("load", &err));
                messages.push(format!("error: {err}"));
                return Outcome { exit_code: exit_code_for(&err), report: Some(report), trajectory: None, messages };
            }
        };
        let mut report = RunReport::new(self.command_name(), desc);
        report.timings.insert("load".into(), started.elapsed().as_secs_f64());
        let mut trajectory = None;
        let result = self.analyze(&pair, &mut report, &mut trajectory);
        let mut exit_code = match &result {
            Ok(()) => EXIT_PASS,
            Err(err) => {
                messages.push(format!("error: {err}"));
                exit_code_for(err)
            }
        };
        if let Err(err) = &result {
            report.errors.push(ErrorEntry::new(err_stage(&report), err));
        }
        if exit_code == EXIT_PASS && !self.checks_pass(&report) {
            exit_code = EXIT_CERTIFICATE;
        }
        report.passed = exit_code == EXIT_PASS;
        for e in report.errors.iter().filter(|e| !e.fatal) {
            messages.push(format!("note: {} ({})", e.message, e.stage));
        }
        Outcome { exit_code, report: Some(report), trajectory, messages }
    }

    fn checks_pass(&self, report: &RunReport) -> bool {
        if report.errors.iter().any(|e| e.fatal) {
            return false;
        }
        let tol = self.cert.map_or(VERIFY_TOL, |c| c.tol);
        if self.depth >= Depth::Certify
            && (report.certificates.is_empty() || !report.certificates.iter().all(|e| entry_passes(e, tol)))
        {
            return false;
        }
        if let Some(s) = &report.spectrum {
            if !s.residuals_ok || s.localized == Some(false) {
                return false;
            }
        }
        if let Some(s) = &report.simulation {
            if s.envelope_holds == Some(false) || s.envelopes.iter().any(|e| e.rate_consistent == Some(false)) {
                return false;
            }
        }
        true
    }

    fn analyze(&self, pair: &OperatorPair, report: &mut RunReport, trajectory: &mut Option<Trajectory>) -> Result<()> {
        let mut timer = Timer { report };
        let dec = timer.time("decompose", || decompose(pair))?;
        let report = timer.report;
        report.assumptions = Some(check_assumptions(&dec));
        report.decomposition = Some((&dec).into());
        if self.depth == Depth::Decompose {
            return Ok(());
        }
        let cert_args = self.cert.expect("certificate arguments for this command");
        check_cert_args(cert_args)?;

        let block = build_block_matrix(&dec);
        let mut timer = Timer { report };
        let eig = timer.time("eigen", || linalg::eigen_decomposition(&block))?;
        let exp = MatrixExponential::from_decomposition(&block, eig.clone());
        let report = timer.report;

        let start = Instant::now();
        self.certify(&dec, cert_args, &exp, report)?;
        report.timings.insert("certify".into(), start.elapsed().as_secs_f64());

        let valid: Vec<Certificate> =
            report.certificates.iter().filter(|e| e.certificate.valid).map(|e| e.certificate.clone()).collect();

        if matches!(self.depth, Depth::Spectrum | Depth::Check) {
            let start = Instant::now();
            let spec = spectrum_from_decomposition(&dec, &eig);
            let mut localization = Vec::new();
            for cert in &valid {
                let loc = verify_localization_with_tol(&spec, cert, cert_args.tol)?;
                localization.push(LocalizationEntry {
                    variant: cert.variant.short_name().to_string(),
                    rate: cert.rate,
                    localized: loc.localized,
                    gap: loc.gap,
                });
            }
            report.spectrum = Some(SpectrumSummary {
                spectral_abscissa: spec.spectral_abscissa,
                max_residual: spec.residuals.iter().copied().fold(0.0, f64::max),
                residuals_ok: spec.residuals_ok(&dec),
                eigenvalues: spec.eigenvalues.iter().map(|&z| z.into()).collect(),
                localized: (!localization.is_empty()).then(|| localization.iter().all(|l| l.localized)),
                gap: localization.iter().map(|l| l.gap).reduce(f64::min),
                localization,
            });
            report.timings.insert("spectrum".into(), start.elapsed().as_secs_f64());
        }

        if matches!(self.depth, Depth::Simulate | Depth::Check) {
            let sim_args = self.sim.expect("simulation arguments for this command");
            let start = Instant::now();
            let traj = simulate_run(&dec, exp, &valid, sim_args, report)?;
            if let Some(path) = &sim_args.csv {
                let file = fs::File::create(path).map_err(|e| DecayError::Io(format!("{}: {e}", path.display())))?;
                let mut out = std::io::BufWriter::new(file);
                simulate::write_csv(&traj, &mut out)?;
                out.flush()?;
            }
            *trajectory = Some(traj);
            report.timings.insert("simulate".into(), start.elapsed().as_secs_f64());
        }
        Ok(())
    }

    fn certify(&self, dec: &Decomposition, args: &CertArgs, exp: &MatrixExponential, report: &mut RunReport) -> Result<()> {
        let config = SearchConfig::with_grid(args.grid);
        let variants = args.variant.variants();
        let mut failures = Vec::new();
        for &variant in variants {
            let pinned = pinned_certificate(dec, args, variant);
            let is_pinned = pinned.is_some();
            let cert = pinned.unwrap_or_else(|| optimize_rate(dec, variant, &config));
            match cert.and_then(|c| verify_entry(dec, c, is_pinned, exp)) {
                Ok(entry) => report.certificates.push(entry),
                Err(err) if err.is_input_error() => return Err(err),
                Err(err) => failures.push(ErrorEntry::new(&format!("certify:{}", variant.short_name()), &err)),
            }
        }
        // with both variants requested, one failing variant is tolerated if
        // the other produced a valid certificate
        let any_valid = report.certificates.iter().any(|e| e.certificate.valid);
        let tolerate = variants.len() > 1 && any_valid;
        for mut f in failures {
            f.fatal = !tolerate;
            report.errors.push(f);
        }
        Ok(())
    }
}

fn simulate_run(
    dec: &Decomposition,
    exp: MatrixExponential,
    valid: &[Certificate],
    args: &SimArgs,
    report: &mut RunReport,
) -> Result<Trajectory> {
    if args.samples < 2 {
        return Err(input_error("--samples must be at least 2"));
    }
    let rate = valid.iter().map(|c| c.rate).fold(0.0, f64::max);
    let times = simulate::default_time_grid(rate, args.samples);
    let (u0, u1) = simulate::random_initial_data(dec.dim(), args.ic_seed);
    let traj = Propagator::with_exponential(dec, exp).propagate(&u0, &u1, &times)?;
    let envelopes: Vec<EnvelopeEntry> = valid
        .iter()
        .map(|cert| {
            let constant = cert.energy_constant();
            let env = simulate::check_envelope(&traj, cert, constant);
            EnvelopeEntry {
                variant: cert.variant.short_name().to_string(),
                rate: cert.rate,
                constant,
                holds: env.holds,
                worst_ratio: env.worst_ratio,
                worst_time: env.worst_time,
                rate_consistent: traj.fitted_rate.map(|f| f >= cert.rate - FIT_RATE_SLACK),
            }
        })
        .collect();
    report.simulation = Some(SimulationSummary {
        ic_seed: args.ic_seed,
        horizon: *times.last().expect("non-empty grid"),
        samples: times.len(),
        initial_energy: traj.energies[0],
        final_energy: *traj.energies.last().expect("non-empty grid"),
        fitted_rate: traj.fitted_rate,
        envelope_holds: (!envelopes.is_empty()).then(|| envelopes.iter().all(|e| e.holds)),
        envelopes,
    });
    Ok(traj)
}

fn err_stage(report: &RunReport) -> &'static str {
    if report.decomposition.is_none() {
        "decompose"
    } else if report.certificates.is_empty() {
        "certify"
    } else {
        "analysis"
    }
}

pub fn exit_code_for(err: &DecayError) -> i32 {
    if err.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_CERTIFICATE
    }
}

fn run_generate(args: &GenerateArgs) -> Result<Vec<String>> {
    let (pair, _) = generate_pair(&args.generator)?;
    fs::create_dir_all(&args.out).map_err(|e| DecayError::Io(format!("{}: {e}", args.out.display())))?;
    let a = args.out.join("A.mtx");
    let d = args.out.join("D.mtx");
    mtx::save_matrix(pair.stiffness(), &a)?;
    mtx::save_matrix(pair.damping(), &d)?;
    Ok(vec![a.display().to_string(), d.display().to_string()])
}

/// Executes a parsed command without touching stdout or the report file.
pub fn execute(cli: &Cli) -> Outcome {
    let pipeline = match &cli.command {
        Command::Decompose(a) => Pipeline { depth: Depth::Decompose, input: &a.input, cert: None, sim: None },
        Command::Certify(a) => Pipeline { depth: Depth::Certify, input: &a.input, cert: Some(&a.cert), sim: None },
        Command::Spectrum(a) => Pipeline { depth: Depth::Spectrum, input: &a.input, cert: Some(&a.cert), sim: None },
        Command::Simulate(a) => {
            Pipeline { depth: Depth::Simulate, input: &a.input, cert: Some(&a.cert), sim: Some(&a.sim) }
        }
        Command::Check(a) => Pipeline { depth: Depth::Check, input: &a.input, cert: Some(&a.cert), sim: Some(&a.sim) },
        Command::Generate(a) => {
            return match run_generate(a) {
                Ok(paths) => Outcome { exit_code: EXIT_PASS, report: None, trajectory: None, messages: paths },
                Err(err) => Outcome {
                    exit_code: exit_code_for(&err),
                    report: None,
                    trajectory: None,
                    messages: vec![format!("error: {err}")],
                },
            };
        }
    };
    pipeline.run()
}

fn report_path(cli: &Cli) -> Option<&Path> {
    match &cli.command {
        Command::Decompose(a) => a.output.out.as_deref(),
        Command::Certify(a) | Command::Spectrum(a) => a.output.out.as_deref(),
        Command::Simulate(a) | Command::Check(a) => a.output.out.as_deref(),
        Command::Generate(_) => None,
    }
}

/// Parses `args`, runs the command, writes the report, and returns the exit
/// code. Usage errors exit with the input-error code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = err.print();
            return code;
        }
    };
    let outcome = execute(&cli);
    let mut code = outcome.exit_code;
    if let Some(report) = &outcome.report {
        match report.to_json() {
            Ok(json) => {
                let written = match report_path(&cli) {
                    Some(path) => fs::write(path, json + "\n")
                        .map_err(|e| DecayError::Io(format!("{}: {e}", path.display()))),
                    None => {
                        let mut stdout = std::io::stdout().lock();
                        writeln!(stdout, "{json}").map_err(DecayError::from)
                    }
                };
                if let Err(err) = written {
                    eprintln!("error: {err}");
                    code = EXIT_INPUT;
                }
            }
            Err(err) => {
                eprintln!("error: report failed validation: {err}");
                code = code.max(EXIT_CERTIFICATE);
            }
        }
    }
    for line in &outcome.messages {
        eprintln!("{line}");
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Outcome {
        let cli = Cli::try_parse_from(std::iter::once("decaycert").chain(args.iter().copied())).unwrap();
        execute(&cli)
    }

    #[test]
    fn parses_complex_flags() {
        assert_eq!(parse_complex("1+1i").unwrap(), Complex64::new(1.0, 1.0));
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert!(parse_complex("one").is_err());
    }

    #[test]
    fn scalar_check_passes() {
        let out = run(&["check", "--generate", "scalar", "--a", "1+1i", "--d", "2", "--grid", "16"]);
        assert_eq!(out.exit_code, EXIT_PASS, "{:?}", out.messages);
        let report = out.report.unwrap();
        let spec = report.spectrum.as_ref().unwrap();
        assert_eq!(spec.localized, Some(true));
        assert!(report.certificates.iter().all(|e| e.certificate.rate <= 0.2929));
        assert!(report.passed);
    }

    #[test]
    fn pinned_parameters() {
        let out = run(&["certify", "--generate", "scalar", "--a", "1", "--d", "2", "--variant", "t1", "--k", "1", "--m", "0.5"]);
        assert_eq!(out.exit_code, EXIT_PASS, "{:?}", out.messages);
        let report = out.report.unwrap();
        assert!((report.certificates[0].certificate.rate - 0.125).abs() < 1e-12);
        assert!(report.certificates[0].pinned);
    }

    #[test]
    fn k_above_beta_exits_two() {
        let out = run(&["certify", "--generate", "scalar", "--a", "1", "--d", "2", "--variant", "t1", "--k", "2.5", "--m", "0.5"]);
        assert_eq!(out.exit_code, EXIT_CERTIFICATE);
        assert_eq!(out.report.unwrap().errors[0].kind, "InvalidParams");
    }

    #[test]
    fn missing_generator_value_is_input_error() {
        let out = run(&["decompose", "--generate", "scalar", "--a", "1"]);
        assert_eq!(out.exit_code, EXIT_INPUT);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["decaycert", "certify"]), EXIT_INPUT);
        assert_eq!(main_with_args(["decaycert", "frobnicate"]), EXIT_INPUT);
    }
}
