//! Command-line front end: spectra, series, stationary points, potential
//! profiles, and verification reports for the shifted sextic oscillator.
//!
//! Exit codes: 0 success, 1 bad input, 2 solver non-convergence,
//! 3 verification failed (the report is still written).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use ptsextic::error::Error as CoreError;
use ptsextic::potential::{self, Coupling};
use ptsextic::shooting::{self, ShootOptions};
use ptsextic::verify::{self, ScalingMethod, VerificationReport};
use ptsextic::Contour;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "ptsextic",
    about = "Bound states of V(x) = x^2 + g^2/x^6 on the shifted line x = s - i*eps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The eight stationary points of the potential and their curvature.
    Stationary(StationaryArgs),
    /// Expansion of the potential about the lowest stationary point.
    Taylor(TaylorArgs),
    /// Low-lying spectrum from the shooting solver.
    Spectrum(SpectrumArgs),
    /// Measured verification reports for the spectral claims.
    Verify(VerifyArgs),
    /// Potential along the line, as plot-ready samples.
    PotentialProfile(ProfileArgs),
}

#[derive(Args)]
struct CouplingArgs {
    /// Coupling strength g (exclusive with --R).
    #[arg(long = "g", value_name = "G")]
    g: Option<f64>,
    /// Stationary radius R = 3^(1/8) g^(1/4) (exclusive with --g).
    #[arg(long = "R", value_name = "R")]
    r: Option<f64>,
}

impl CouplingArgs {
    fn coupling(&self) -> Result<Coupling, CliError> {
        match (self.g, self.r) {
            (Some(g), None) => Coupling::from_g(g).map_err(CliError::bad_input),
            (None, Some(r)) => Coupling::from_r(r).map_err(CliError::bad_input),
            (None, None) => Err(CliError::input("one of --g or --R is required")),
            (Some(_), Some(_)) => Err(CliError::input("--g and --R are mutually exclusive")),
        }
    }
}

#[derive(Args)]
struct EpsilonArgs {
    /// Line shift as a fraction of R (default 1, crossing the stationary point).
    #[arg(long = "epsilon-frac", value_name = "F")]
    epsilon_frac: Option<f64>,
    /// Line shift as an absolute value.
    #[arg(long = "epsilon-abs", value_name = "E")]
    epsilon_abs: Option<f64>,
}

impl EpsilonArgs {
    fn epsilon(&self, c: &Coupling) -> Result<(f64, Option<f64>), CliError> {
        let (eps, frac) = match (self.epsilon_frac, self.epsilon_abs) {
            (Some(_), Some(_)) => {
                return Err(CliError::input(
                    "--epsilon-frac and --epsilon-abs are mutually exclusive",
                ))
            }
            (None, Some(abs)) => (abs, None),
            (Some(f), None) => (f * c.r(), Some(f)),
            (None, None) => (c.r(), Some(1.0)),
        };
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(CliError::input(format!(
                "line shift must be positive, got {eps}"
            )));
        }
        Ok((eps, frac))
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the machine-readable payload here ("-" for stdout).
    #[arg(long = "out", value_name = "PATH")]
    out: Option<PathBuf>,
    /// Payload format.
    #[arg(long = "format", value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct StationaryArgs {
    #[command(flatten)]
    coupling: CouplingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TaylorArgs {
    #[command(flatten)]
    coupling: CouplingArgs,
    /// Highest retained power of s.
    #[arg(long = "k-max", default_value_t = 10)]
    k_max: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    coupling: CouplingArgs,
    #[command(flatten)]
    epsilon: EpsilonArgs,
    /// Number of levels.
    #[arg(long = "n-max", default_value_t = 6)]
    n_max: usize,
    /// Base integration steps per half-line (default: automatic).
    #[arg(long = "steps")]
    steps: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Claim {
    EpsilonIndependence,
    Reality,
    Scaling,
    PerturbationMatch,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Shooting,
    FdOracle,
    Rs0,
    Rs1,
    Rs2,
}

impl MethodArg {
    fn to_scaling(self) -> ScalingMethod {
        match self {
            MethodArg::Shooting => ScalingMethod::Shooting,
            MethodArg::FdOracle => ScalingMethod::FdOracle,
            MethodArg::Rs0 => ScalingMethod::Perturbation(0),
            MethodArg::Rs1 => ScalingMethod::Perturbation(1),
            MethodArg::Rs2 => ScalingMethod::Perturbation(2),
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Which claim to measure.
    #[arg(long = "claim", value_enum)]
    claim: Claim,
    #[command(flatten)]
    coupling: CouplingArgs,
    /// Number of levels.
    #[arg(long = "n-max", default_value_t = 4)]
    n_max: usize,
    /// Series truncation for the perturbative comparison.
    #[arg(long = "k-max", default_value_t = 10)]
    k_max: usize,
    /// Shift fractions for the independence sweep, comma separated.
    #[arg(long = "eps-fracs", value_delimiter = ',', default_values_t = vec![1.0, 0.8])]
    eps_fracs: Vec<f64>,
    /// Coupling ladder for the scaling study, comma separated, ascending.
    #[arg(long = "g-list", value_delimiter = ',', default_values_t = vec![1e4, 1e5, 1e6])]
    g_list: Vec<f64>,
    /// Level index for the scaling study.
    #[arg(long = "level", default_value_t = 0)]
    level: usize,
    /// Energy source for the scaling study.
    #[arg(long = "method", value_enum, default_value_t = MethodArg::Shooting)]
    method: MethodArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    coupling: CouplingArgs,
    #[command(flatten)]
    epsilon: EpsilonArgs,
    /// Sample count (odd, so s = 0 is sampled).
    #[arg(long = "grid-points", default_value_t = 2001)]
    grid_points: usize,
    /// Plot range half-width (default: max(10, 2 eps)).
    #[arg(long = "half-width")]
    half_width: Option<f64>,
    /// Divide both columns by this factor.
    #[arg(long = "rescale", default_value_t = 1.0)]
    rescale: f64,
    #[command(flatten)]
    output: OutputArgs,
}

/// Everything the run was configured with, echoed into the payload.
#[derive(Serialize, Default)]
struct ConfigEcho {
    g: f64,
    r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon_frac: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rescale: Option<f64>,
}

#[derive(Serialize)]
struct Payload<T: Serialize> {
    schema_version: u32,
    command: &'static str,
    config: ConfigEcho,
    results: Vec<T>,
    passed: bool,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn bad_input(e: CoreError) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }

    fn from_core(e: CoreError) -> Self {
        let code = match e {
            CoreError::NoConvergence { .. }
            | CoreError::LevelFailed { .. }
            | CoreError::IntegrationBlowup { .. }
            | CoreError::NodeAtMatchingPoint { .. }
            | CoreError::DuplicateLevel { .. }
            | CoreError::UnorderedLevels { .. }
            | CoreError::LuBreakdown { .. }
            | CoreError::InverseIterationStalled { .. } => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }

    fn io(e: std::io::Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit 2 on usage errors; keep 2 for solver failures
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let outcome = match cli.command {
        Command::Stationary(args) => cmd_stationary(args),
        Command::Taylor(args) => cmd_taylor(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Verify(args) => cmd_verify(args),
        Command::PotentialProfile(args) => cmd_potential_profile(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_payload(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.out {
        None => Ok(()),
        Some(path) if path.as_os_str() == "-" => {
            println!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text).map_err(CliError::io),
    }
}

fn json_payload<T: Serialize>(payload: &Payload<T>) -> String {
    let mut text = serde_json::to_string_pretty(payload).expect("payload serializes");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct StationaryRow {
    m: usize,
    re_x: f64,
    im_x: f64,
    abs_v_prime: f64,
    re_v_second: f64,
    im_v_second: f64,
}

fn cmd_stationary(args: StationaryArgs) -> Result<u8, CliError> {
    let c = args.coupling.coupling()?;
    let rows: Vec<StationaryRow> = potential::stationary_points(&c)
        .iter()
        .map(|p| {
            let d1 = potential::v_prime(&c, p.location).expect("away from origin");
            StationaryRow {
                m: p.m,
                re_x: p.location.re,
                im_x: p.location.im,
                abs_v_prime: d1.norm(),
                re_v_second: p.second_derivative.re,
                im_v_second: p.second_derivative.im,
            }
        })
        .collect();
    let passed = rows.iter().all(|row| {
        row.abs_v_prime / c.r() <= 1e-10
            && (Complex64::new(row.re_v_second - 16.0, row.im_v_second)).norm() <= 1e-10
    });

    println!("stationary points of V at R = {}", c.r());
    for row in &rows {
        println!(
            "  m={}  x = {:+.6} {:+.6}i  |V'| = {:.2e}  V'' = {:+.12} {:+.2e}i",
            row.m, row.re_x, row.im_x, row.abs_v_prime, row.re_v_second, row.im_v_second
        );
    }
    println!("all roots satisfy V' = 0 and V'' = 16: {passed}");

    let config = ConfigEcho {
        g: c.g(),
        r: c.r(),
        ..Default::default()
    };
    let text = match args.output.format {
        Format::Json => json_payload(&Payload {
            schema_version: SCHEMA_VERSION,
            command: "stationary",
            config,
            results: rows,
            passed,
        }),
        Format::Csv => {
            let mut text = String::from("m,re_x,im_x,abs_v_prime,re_v_second,im_v_second\n");
            for row in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.m,
                    fmt17(row.re_x),
                    fmt17(row.im_x),
                    fmt17(row.abs_v_prime),
                    fmt17(row.re_v_second),
                    fmt17(row.im_v_second)
                ));
            }
            text
        }
    };
    write_payload(&args.output, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct TaylorRow {
    k: usize,
    exact_form: String,
    re: f64,
    im: f64,
}

fn cmd_taylor(args: TaylorArgs) -> Result<u8, CliError> {
    let c = args.coupling.coupling()?;
    if args.k_max < 2 {
        return Err(CliError::input("--k-max must be at least 2"));
    }
    let series = potential::taylor_series(&c, args.k_max).map_err(CliError::from_core)?;
    let rows: Vec<TaylorRow> = (0..=args.k_max)
        .map(|k| TaylorRow {
            k,
            exact_form: series.exact_form(k),
            re: series.coefficient(k).re,
            im: series.coefficient(k).im,
        })
        .collect();

    println!(
        "expansion of W(s) about the stationary point -iR, R = {}",
        c.r()
    );
    for row in &rows {
        println!(
            "  k={:>2}  {:<14} = {} {}i",
            row.k,
            row.exact_form,
            fmt17(row.re),
            fmt17(row.im)
        );
    }

    let config = ConfigEcho {
        g: c.g(),
        r: c.r(),
        k_max: Some(args.k_max),
        ..Default::default()
    };
    let text = match args.output.format {
        Format::Json => json_payload(&Payload {
            schema_version: SCHEMA_VERSION,
            command: "taylor",
            config,
            results: rows,
            passed: true,
        }),
        Format::Csv => {
            let mut text = String::from("k,exact_form,re_c,im_c\n");
            for row in &rows {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    row.k,
                    row.exact_form,
                    fmt17(row.re),
                    fmt17(row.im)
                ));
            }
            text
        }
    };
    write_payload(&args.output, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct SpectrumRow {
    n: usize,
    re_e: f64,
    im_e: f64,
    residual: f64,
    method: String,
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<u8, CliError> {
    let c = args.coupling.coupling()?;
    let (eps, frac) = args.epsilon.epsilon(&c)?;
    if args.n_max < 1 {
        return Err(CliError::input("--n-max must be at least 1"));
    }
    let opts = ShootOptions {
        base_steps: args.steps,
        ..Default::default()
    };
    let states = shooting::spectrum_opts(&c, eps, args.n_max, opts).map_err(CliError::from_core)?;
    let rows: Vec<SpectrumRow> = states
        .iter()
        .map(|st| SpectrumRow {
            n: st.n,
            re_e: st.energy.re,
            im_e: st.energy.im,
            residual: st.residual,
            method: st.method.to_string(),
        })
        .collect();

    println!(
        "spectrum at g = {}, R = {}, eps = {eps}",
        c.g(),
        c.r()
    );
    for row in &rows {
        println!(
            "  n={}  E = {:+.12} {:+.3e}i  (|mismatch| = {:.1e}, {})",
            row.n, row.re_e, row.im_e, row.residual, row.method
        );
    }

    let config = ConfigEcho {
        g: c.g(),
        r: c.r(),
        epsilon: Some(eps),
        epsilon_frac: frac,
        n_max: Some(args.n_max),
        steps: args.steps,
        ..Default::default()
    };
    let text = match args.output.format {
        Format::Json => json_payload(&Payload {
            schema_version: SCHEMA_VERSION,
            command: "spectrum",
            config,
            results: rows,
            passed: true,
        }),
        Format::Csv => {
            let mut text = String::from("n,re_e,im_e,residual,method\n");
            for row in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.n,
                    fmt17(row.re_e),
                    fmt17(row.im_e),
                    fmt17(row.residual),
                    row.method
                ));
            }
            text
        }
    };
    write_payload(&args.output, &text)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    if args.output.format == Format::Csv {
        return Err(CliError::input("verification reports are JSON only"));
    }
    let report: VerificationReport = match args.claim {
        Claim::EpsilonIndependence => {
            let c = args.coupling.coupling()?;
            verify::epsilon_independence(&c, &args.eps_fracs, args.n_max)
                .map_err(CliError::from_core)?
        }
        Claim::Reality => {
            let c = args.coupling.coupling()?;
            verify::reality_report(&c, args.n_max).map_err(CliError::from_core)?
        }
        Claim::Scaling => verify::scaling_study(&args.g_list, args.level, args.method.to_scaling())
            .map_err(CliError::from_core)?,
        Claim::PerturbationMatch => {
            let c = args.coupling.coupling()?;
            verify::perturbation_match(&c, args.n_max, args.k_max).map_err(CliError::from_core)?
        }
    };

    println!("claim: {:?}  passed: {}", report.claim, report.passed);
    for chk in &report.per_level {
        println!(
            "  {:<12} value = {:.3e}  threshold = {:.3e}  ok = {}   {}",
            chk.label, chk.value, chk.threshold, chk.ok, chk.note
        );
    }
    if let Some(slope) = report.fitted_slope {
        println!(
            "  fitted slope = {slope:.4} (threshold {})",
            report.slope_threshold.unwrap_or(f64::NAN)
        );
    }
    for note in &report.notes {
        println!("  note: {note}");
    }
    for failure in &report.solver_failures {
        println!("  solver failure: {failure}");
    }

    let (g, r) = (report.inputs.g, report.inputs.r);
    let passed = report.passed;
    let config = ConfigEcho {
        g: g.unwrap_or(f64::NAN),
        r: r.unwrap_or(f64::NAN),
        n_max: Some(args.n_max),
        k_max: Some(args.k_max),
        ..Default::default()
    };
    let text = json_payload(&Payload {
        schema_version: SCHEMA_VERSION,
        command: "verify",
        config,
        results: vec![report],
        passed,
    });
    write_payload(&args.output, &text)?;
    Ok(if passed { 0 } else { 3 })
}

#[derive(Serialize)]
struct ProfileRow {
    s: f64,
    re_w: f64,
    im_w: f64,
}

fn cmd_potential_profile(args: ProfileArgs) -> Result<u8, CliError> {
    let c = args.coupling.coupling()?;
    let (eps, frac) = args.epsilon.epsilon(&c)?;
    if !(args.rescale > 0.0) {
        return Err(CliError::input("--rescale must be positive"));
    }
    let half_width = args.half_width.unwrap_or_else(|| (2.0 * eps).max(10.0));
    let contour =
        Contour::new(eps, half_width, args.grid_points).map_err(CliError::bad_input)?;
    let rho = args.rescale;
    let rows: Vec<ProfileRow> = contour
        .grid()
        .iter()
        .map(|&s| {
            let w = potential::w_of_s(&c, eps, s).expect("eps > 0");
            ProfileRow {
                s,
                re_w: w.re / rho,
                im_w: w.im / rho,
            }
        })
        .collect();

    let min = rows
        .iter()
        .min_by(|a, b| a.re_w.total_cmp(&b.re_w))
        .expect("grid is nonempty");
    let peak = rows.iter().map(|r| r.re_w.abs()).fold(0.0, f64::max);
    println!(
        "profile over [-{half_width}, {half_width}] at eps = {eps} ({} points, rescale {rho})",
        rows.len()
    );
    println!("  min Re W/rho = {} at s = {}", fmt17(min.re_w), min.s);
    println!("  max |Re W|/rho = {}", fmt17(peak));

    let config = ConfigEcho {
        g: c.g(),
        r: c.r(),
        epsilon: Some(eps),
        epsilon_frac: frac,
        grid_points: Some(args.grid_points),
        half_width: Some(half_width),
        rescale: Some(rho),
        ..Default::default()
    };
    let text = match args.output.format {
        Format::Csv => {
            let mut text = String::from("s,re_w,im_w\n");
            for row in &rows {
                text.push_str(&format!(
                    "{},{},{}\n",
                    fmt17(row.s),
                    fmt17(row.re_w),
                    fmt17(row.im_w)
                ));
            }
            text
        }
        Format::Json => json_payload(&Payload {
            schema_version: SCHEMA_VERSION,
            command: "potential-profile",
            config,
            results: rows,
            passed: true,
        }),
    };
    write_payload(&args.output, &text)?;
    Ok(0)
}
