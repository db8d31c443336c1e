//! `henon-morse`: solve, transform checks, spectra, Morse indices and
//! theorem verification from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use henon_morse::report::{
    self, format_real, lowest_eigenvalue_table, parse_domain, profile_table, spectrum_table,
    Artifact, CsvTable, Payload, RunConfig,
};
use henon_morse::spectral::{mode_spectra, morse_index};
use henon_morse::verify::{
    check_transform, default_matrix, run_suite, verify_theorems, Status, TransformCheckOptions,
    VerdictBundle, VerifyOptions,
};
use henon_morse::{
    radial, Error, Nonlinearity, RadialGrid, RadialProfile, ShootingConfig,
    SpectralConfig, Tolerances,
};
use serde::Serialize;

const THREADS_VAR: &str = "HENON_MORSE_THREADS";

#[derive(Parser)]
#[command(name = "henon-morse", version, about = "Radial nodal solutions of Hénon-type equations and their Morse indices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shoot the radial solution with a given number of nodal sets.
    Solve(SolveArgs),
    /// Transform identities.
    Transform {
        #[command(subcommand)]
        command: TransformCommand,
    },
    /// Per-mode eigenvalues of the linearization about a stored profile.
    Spectrum(SpectrumArgs),
    /// Morse index of a stored profile, as JSON.
    Morse(MorseArgs),
    /// Verify the index bounds, correspondence and non-degeneracy.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Domain: `ball`, `ball:R` or `annulus:RIN:ROUT`.
    #[arg(long, default_value = "ball")]
    domain: String,
    /// Radial grid points.
    #[arg(long, default_value_t = 4000)]
    grid: usize,
    #[arg(long, default_value_t = Tolerances::default().ode)]
    ode_tol: f64,
    #[arg(long, default_value_t = Tolerances::default().eigen)]
    eigen_tol: f64,
    #[arg(long, default_value_t = Tolerances::default().identity)]
    identity_tol: f64,
    #[arg(long, default_value_t = report::DEFAULT_SEED)]
    seed: u64,
}

impl Common {
    fn config(&self, command: &str, alpha: f64, p: f64, nodal: usize) -> Result<RunConfig, Failure> {
        let config = RunConfig {
            command: command.into(),
            alpha,
            p,
            nodal,
            domain: parse_domain(&self.domain).map_err(Failure::usage)?,
            points: self.grid,
            tolerances: Tolerances {
                ode: self.ode_tol,
                eigen: self.eigen_tol,
                identity: self.identity_tol,
            },
            seed: self.seed,
        };
        config.validate().map_err(Failure::usage)?;
        Ok(config)
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SolveArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    p: f64,
    /// Number of nodal sets.
    #[arg(long)]
    nodal: usize,
    /// Profile CSV (`r,u,du`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum TransformCommand {
    /// Jacobian, composition and gradient identities for one κ.
    Check(TransformArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct TransformArgs {
    /// Weight exponent; sets κ = 2/(α+2) unless --kappa is given.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    grid: usize,
    #[arg(long, default_value_t = report::DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct ProfileArgs {
    /// Profile CSV written by `solve`.
    #[arg(long)]
    profile: PathBuf,
    /// Weight exponent; defaults to the profile's embedded configuration.
    #[arg(long)]
    alpha: Option<f64>,
    /// Hénon exponent; defaults to the profile's embedded configuration.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = Tolerances::default().eigen)]
    eigen_tol: f64,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SpectrumArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    /// Highest angular mode.
    #[arg(long, default_value_t = 4)]
    modes: u32,
    /// Eigenvalues per mode.
    #[arg(long, default_value_t = 8)]
    count: usize,
    #[arg(long, conflicts_with = "unweighted")]
    weighted: bool,
    #[arg(long)]
    unweighted: bool,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct MorseArgs {
    #[command(flatten)]
    profile: ProfileArgs,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true, allow_negative_numbers = true)]
struct VerifyArgs {
    #[command(subcommand)]
    suite: Option<SuiteCommand>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    nodal: Option<usize>,
    /// Also run every even α = 2, 4, …, A_MAX with the same p and n.
    #[arg(long, value_name = "A_MAX")]
    all_even_upto: Option<u32>,
    /// Write (r,u) and (k,λ₁(k)) CSV series into this directory.
    #[arg(long, value_name = "DIR")]
    emit_plots: Option<PathBuf>,
    /// Human-readable table instead of JSON.
    #[arg(long)]
    pretty: bool,
    /// JSON output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum SuiteCommand {
    /// Run the full verification matrix.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct SuiteArgs {
    /// Directory for report.json and per-case spectra.
    #[arg(long, default_value = "suite-report")]
    out_dir: PathBuf,
    #[arg(long)]
    pretty: bool,
    #[command(flatten)]
    common: Common,
}

/// Why a command did not succeed, with its exit code.
#[derive(Debug)]
enum Failure {
    Verification(String),
    Solver(Error),
    Usage(String),
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure::Usage(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Usage(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDomain(_)
            | Error::InvalidGrid(_)
            | Error::InvalidParameter { .. }
            | Error::Parse { .. } => Failure::Usage(e.to_string()),
            other => Failure::Solver(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(3);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Verification(m) => eprintln!("verification failed: {m}"),
                Failure::Solver(e) => eprintln!("solver failure: {e}"),
                Failure::Usage(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(failure.code())
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve(args) => solve(args),
        Command::Transform {
            command: TransformCommand::Check(args),
        } => transform_check(args),
        Command::Spectrum(args) => spectrum(args),
        Command::Morse(args) => morse(args),
        Command::Verify(args) => match args.suite {
            Some(SuiteCommand::Suite(suite_args)) => suite(suite_args),
            None => verify(args),
        },
    }
}

fn shooting(config: &RunConfig) -> ShootingConfig {
    ShootingConfig::with_tolerance(config.tolerances.ode)
}

fn spectral(eigen_tolerance: f64) -> SpectralConfig {
    SpectralConfig {
        eigen_tolerance,
        ..SpectralConfig::default()
    }
}

fn print_or_write(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|source| Failure::Solver(Error::Io { context: parent.to_path_buf(), source }))?;
    }
    std::fs::write(path, text)
        .map_err(|source| Failure::Solver(Error::Io { context: path.to_path_buf(), source }))
}

fn json<T: Serialize>(config: &RunConfig, value: &T) -> Result<String, Failure> {
    Ok(report::render(&Payload::Json(value), config)?)
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let config = args.common.config("solve", args.alpha, args.p, args.nodal)?;
    let nonlinearity = Nonlinearity::henon(config.p)?;
    let grid = RadialGrid::midpoint(config.domain, config.points)?;
    let profile =
        radial::shoot_nodal_solution(&nonlinearity, config.alpha, &grid, config.nodal, &shooting(&config))?;
    let csv = profile_table(&profile).render(&config)?;
    match &args.out {
        Some(path) => {
            write(path, &csv)?;
            let summary = SolveSummary::of(&profile, path);
            print!("{}", json(&config, &summary)?);
        }
        None => print!("{csv}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveSummary {
    profile: String,
    points: usize,
    nodal_sets: usize,
    zeros: Vec<f64>,
    amplitude: f64,
    residual: Option<f64>,
}

impl SolveSummary {
    fn of(profile: &RadialProfile, path: &Path) -> Self {
        Self {
            profile: path.display().to_string(),
            points: profile.grid.len(),
            nodal_sets: profile.nodal_sets,
            zeros: profile.zeros.clone(),
            amplitude: profile.values[0],
            residual: profile.residual,
        }
    }
}

fn transform_check(args: TransformArgs) -> Result<(), Failure> {
    if !(args.alpha >= 0.0) {
        return Err(Failure::Usage("alpha must be ≥ 0".into()));
    }
    let kappa = args.kappa.unwrap_or(2.0 / (args.alpha + 2.0));
    if args.grid < report::MIN_GRID_POINTS {
        return Err(Failure::Usage(format!(
            "grid must have ≥ {} points, got {}",
            report::MIN_GRID_POINTS,
            args.grid
        )));
    }
    let options = TransformCheckOptions {
        points: args.grid,
        seed: args.seed,
        ..TransformCheckOptions::default()
    };
    let result = check_transform(kappa, &options)?;
    let config = RunConfig {
        command: "transform check".into(),
        alpha: args.alpha,
        points: args.grid,
        seed: args.seed,
        ..RunConfig::default()
    };
    if args.pretty {
        let worst = |v: &[henon_morse::transform::IdentityReport]| {
            v.iter().map(|r| r.rel_error).fold(0.0, f64::max)
        };
        println!("kappa                      {}", result.kappa);
        println!(
            "jacobian vs FD             {:e} over {} points",
            result.jacobian.max_rel_error, result.jacobian.samples
        );
        println!("composition identities     {:e}", worst(&result.composition));
        println!("L^r identities             {:e}", worst(&result.lr));
        let radial = result.h1.last().and_then(|h| h.radial_equality);
        if let Some(r) = radial {
            println!("radial energy factor κ     {:e}", r.rel_error);
        }
        println!("pass                       {}", result.pass);
    } else {
        print!("{}", json(&config, &result)?);
    }
    if result.pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!("transform identities fail for κ = {kappa}")))
    }
}

struct LoadedProfile {
    config: RunConfig,
    profile: RadialProfile,
    nonlinearity: Nonlinearity,
}

fn load_profile(args: &ProfileArgs, command: &str) -> Result<LoadedProfile, Failure> {
    let file = report::read_profile(&args.profile, args.alpha, None)?;
    let embedded = file.config.clone();
    let p = args
        .p
        .or(embedded.as_ref().map(|c| c.p))
        .ok_or_else(|| Failure::Usage("--p is required: the profile carries no configuration".into()))?;
    let mut config = embedded.unwrap_or_default();
    config.command = command.into();
    config.alpha = file.profile.alpha;
    config.p = p;
    config.nodal = file.profile.nodal_sets;
    config.points = file.profile.grid.len();
    config.tolerances.eigen = args.eigen_tol;
    config.validate().map_err(Failure::usage)?;
    let nonlinearity = Nonlinearity::henon(p)?;
    Ok(LoadedProfile {
        config,
        profile: file.profile,
        nonlinearity,
    })
}

fn spectrum(args: SpectrumArgs) -> Result<(), Failure> {
    let loaded = load_profile(&args.profile, "spectrum")?;
    let config = SpectralConfig {
        eigen_count: args.count,
        ..spectral(args.profile.eigen_tol)
    };
    let spectra = mode_spectra(
        &loaded.profile,
        &loaded.nonlinearity,
        args.modes,
        args.weighted,
        &config,
    )?;
    print!("{}", spectrum_table(&spectra).render(&loaded.config)?);
    Ok(())
}

fn morse(args: MorseArgs) -> Result<(), Failure> {
    let loaded = load_profile(&args.profile, "morse")?;
    let result = morse_index(
        &loaded.profile,
        &loaded.nonlinearity,
        &spectral(args.profile.eigen_tol),
    )?;
    print!("{}", json(&loaded.config, &result)?);
    if result.verdict {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "Morse index {} below the bound {}",
            result.total, result.bound
        )))
    }
}

fn verify_options(config: &RunConfig) -> VerifyOptions {
    let defaults = VerifyOptions::default();
    VerifyOptions {
        points: config.points,
        // the default verification integrates tighter than the record default
        shooting: ShootingConfig::with_tolerance(config.tolerances.ode.min(defaults.shooting.ode_tolerance)),
        spectral: spectral(config.tolerances.eigen),
        transport_points: 3 * config.points,
        ..defaults
    }
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let missing = |flag: &str| Failure::Usage(format!("--{flag} is required (or use `verify suite`)"));
    let alpha = args.alpha.ok_or_else(|| missing("alpha"))?;
    let p = args.p.ok_or_else(|| missing("p"))?;
    let nodal = args.nodal.ok_or_else(|| missing("nodal"))?;
    let config = args.common.config("verify", alpha, p, nodal)?;
    let options = verify_options(&config);

    let mut alphas = vec![alpha];
    if let Some(max) = args.all_even_upto {
        alphas.extend((2..=max).step_by(2).map(f64::from).filter(|a| *a != alpha));
    }
    let bundles: Vec<VerdictBundle> = alphas
        .iter()
        .map(|&a| verify_theorems(a, p, nodal, config.domain, &options))
        .collect::<Result<_, _>>()?;

    if let Some(dir) = &args.emit_plots {
        for bundle in &bundles {
            emit_plots(dir, bundle, &config, &options)?;
        }
    }
    let text = if args.pretty {
        bundles.iter().map(pretty_bundle).collect::<Vec<_>>().join("\n")
    } else if bundles.len() == 1 {
        json(&config, &bundles[0])?
    } else {
        json(&config, &bundles)?
    };
    print_or_write(&text, args.out.as_deref())?;
    let failed: Vec<String> = bundles
        .iter()
        .filter(|b| !b.pass)
        .map(|b| format!("α = {}", b.alpha))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("checks failed for {}", failed.join(", "))))
    }
}

fn emit_plots(dir: &Path, bundle: &VerdictBundle, config: &RunConfig, options: &VerifyOptions) -> Result<(), Failure> {
    let nonlinearity = Nonlinearity::henon(bundle.p)?;
    let grid = RadialGrid::midpoint(bundle.domain, options.points)?;
    let profile = radial::shoot_nodal_solution(&nonlinearity, bundle.alpha, &grid, bundle.nodal, &options.shooting)?;
    let stem = case_stem(bundle.alpha, bundle.p, bundle.nodal);
    let case_config = RunConfig {
        alpha: bundle.alpha,
        ..config.clone()
    };
    let mut table = CsvTable::new(&["r", "u"]);
    for (r, u) in profile.grid.nodes().iter().zip(&profile.values) {
        table.push(vec![format_real(*r), format_real(*u)]);
    }
    write(&dir.join(format!("{stem}-profile.csv")), &table.render(&case_config)?)?;
    write(
        &dir.join(format!("{stem}-lowest.csv")),
        &lowest_eigenvalue_table(bundle.spectra()).render(&case_config)?,
    )?;
    Ok(())
}

fn case_stem(alpha: f64, p: f64, nodal: usize) -> String {
    format!("alpha{alpha}-p{p}-n{nodal}")
}

fn pretty_bundle(bundle: &VerdictBundle) -> String {
    let mut out = format!(
        "α = {}, p = {}, n = {} on {}\n  Morse index {} (radial {}), bound {}\n",
        bundle.alpha,
        bundle.p,
        bundle.nodal,
        report::format_domain(&bundle.domain),
        bundle.morse.total,
        bundle.morse.radial_count,
        bundle.morse.bound
    );
    for check in &bundle.checks {
        let status = match check.status {
            Status::Pass => "pass",
            Status::Fail if check.gating => "FAIL",
            Status::Fail => "note",
            Status::Skipped => "skip",
        };
        let value = check.value.map(|v| format!("{v:.3e}")).unwrap_or_default();
        let threshold = check.threshold.map(|v| format!("{v:.1e}")).unwrap_or_default();
        out.push_str(&format!(
            "  {status:<4}  {:<28} {value:>11} {threshold:>9}  {}\n",
            check.name, check.detail
        ));
    }
    out.push_str(&format!("  {}\n", bundle.implication));
    out
}

fn suite(args: SuiteArgs) -> Result<(), Failure> {
    let config = args.common.config("verify suite", 0.0, 3.0, 1)?;
    let options = verify_options(&config);
    let cases = default_matrix();
    let result = run_suite(&cases, config.domain, &options);

    let spectra_dir = args.out_dir.join("spectra");
    for case in &result.cases {
        if let Some(bundle) = &case.bundle {
            let case_config = RunConfig {
                alpha: case.alpha,
                p: case.p,
                nodal: case.nodal,
                ..config.clone()
            };
            let path = spectra_dir.join(format!("{}.csv", case_stem(case.alpha, case.p, case.nodal)));
            write(&path, &spectrum_table(bundle.spectra()).render(&case_config)?)?;
        }
    }
    write(&args.out_dir.join("report.json"), &report::to_json(&Artifact::new(&config, &result))?)?;

    if args.pretty {
        for case in &result.cases {
            match &case.bundle {
                Some(bundle) => print!("{}", pretty_bundle(bundle)),
                None => println!(
                    "α = {}, p = {}, n = {}: error {}",
                    case.alpha,
                    case.p,
                    case.nodal,
                    case.error.as_deref().unwrap_or("")
                ),
            }
        }
    }
    println!(
        "{} cases: {} passed, {} failed; report in {}",
        result.cases.len(),
        result.passed,
        result.failed,
        args.out_dir.join("report.json").display()
    );
    if result.pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} of {} cases failed", result.failed, result.cases.len())))
    }
}
