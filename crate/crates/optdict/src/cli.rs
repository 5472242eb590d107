//! Subcommands `optimize`, `verify`, `encode` and `robustness`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use optdict_core::dictionary::{design, encode_least_squares, expected_cost};
use optdict_core::samples::empirical_moments;
use optdict_core::verify::{monte_carlo_cost, robustness_sweep, tight_frame_residual};
use optdict_core::{CovarianceDivisor, Error, LengthProfile, MomentEstimate, Tolerances};
use serde::Serialize;

use crate::error::{AppError, AppResult};
use crate::io;

/// Version tag of every JSON report.
pub const REPORT_VERSION: u32 = 1;

const TIGHT_FRAME_TOL: f64 = 1e-8;
const DEFAULT_DELTAS: &str = "1e-1,1e-2,1e-3,1e-4";
const PERTURBATION_MODEL: &str =
    "synthetic: mean + delta*|mean|*g, covariance + delta*|covariance|_F*G (seeded unit g, symmetric unit-norm G, negative eigenvalues clipped)";

#[derive(Debug, Parser)]
#[command(name = "optdict", version, about = "Least-squares optimal dictionaries with prescribed squared lengths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the optimal dictionary for a covariance (and mean) or for samples.
    Optimize(OptimizeArgs),
    /// Compare a dictionary's Monte-Carlo cost on samples with its optimum.
    Verify(VerifyArgs),
    /// Write the minimum-norm coefficients of each input row.
    Encode(EncodeArgs),
    /// Excess cost of dictionaries built from perturbed moments.
    Robustness(RobustnessArgs),
}

#[derive(Debug, Args)]
struct MomentSource {
    /// CSV of samples, one per row.
    #[arg(long, conflicts_with = "cov", required_unless_present = "cov")]
    samples: Option<PathBuf>,
    /// JSON covariance matrix.
    #[arg(long)]
    cov: Option<PathBuf>,
    /// JSON mean vector (zero when omitted).
    #[arg(long, requires = "cov")]
    mean: Option<PathBuf>,
    /// Squared lengths c_1,c_2,... of the dictionary vectors (not norms).
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    lengths: Vec<f64>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[command(flatten)]
    source: MomentSource,
    /// Where to write the dictionary JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    dict: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, env = "OPTDICT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[arg(long)]
    dict: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RobustnessArgs {
    #[command(flatten)]
    source: MomentSource,
    /// Relative perturbation sizes.
    #[arg(long, value_delimiter = ',', default_value = DEFAULT_DELTAS, allow_negative_numbers = true)]
    deltas: Vec<f64>,
    #[arg(long, env = "OPTDICT_SEED", default_value_t = 0)]
    seed: u64,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct Meta {
    version: u32,
    command: &'static str,
}

impl Meta {
    fn new(command: &'static str) -> Self {
        Meta {
            version: REPORT_VERSION,
            command,
        }
    }
}

#[derive(Serialize)]
struct OptimizeReport {
    meta: Meta,
    cost: f64,
    q_star: f64,
    spectrum: Vec<f64>,
    /// Blocks of 1-based eigenvalue indices.
    partition: Vec<Vec<usize>>,
    effective_rank: usize,
    lengths: Vec<f64>,
    tight_frame_residual: f64,
    tight_frame: bool,
    dictionary: String,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct Gaps {
    monte_carlo_vs_optimal: f64,
    monte_carlo_vs_expected: Option<f64>,
}

#[derive(Serialize)]
struct VerifyReport {
    meta: Meta,
    seed: u64,
    samples: usize,
    monte_carlo_cost: f64,
    standard_error: f64,
    optimal_cost: f64,
    expected_cost: Option<f64>,
    tight_frame_residual: f64,
    gaps: Gaps,
    bound: f64,
    status: &'static str,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct EncodeReport {
    meta: Meta,
    rows: usize,
    outside_span: usize,
    max_residual: f64,
    output: String,
}

#[derive(Serialize)]
struct RobustnessEntry {
    delta: f64,
    cost_gap: f64,
    psd_clipped: bool,
}

#[derive(Serialize)]
struct RobustnessReport {
    meta: Meta,
    seed: u64,
    perturbation: &'static str,
    rows: Vec<RobustnessEntry>,
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Optimize(a) => optimize(a, out, err),
        Command::Verify(a) => verify(a, out),
        Command::Encode(a) => encode(a, out, err),
        Command::Robustness(a) => robustness(a, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit_json<S: Serialize>(out: &mut dyn Write, report: &S) -> AppResult<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    writeln!(out, "{text}").map_err(|e| AppError::io("<stdout>", e))
}

fn warn(err: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

fn load_source(source: &MomentSource, warnings: &mut Vec<String>) -> AppResult<(MomentEstimate, LengthProfile)> {
    let moments = match (&source.samples, &source.cov) {
        (Some(samples), _) => empirical_moments(&io::load_samples(samples)?, CovarianceDivisor::Population)?,
        (None, Some(cov)) => io::load_moments(cov, source.mean.as_deref())?,
        (None, None) => return Err(AppError::Invalid("one of --samples or --cov is required".into())),
    };
    let (profile, was_sorted) = LengthProfile::sorted(source.lengths.clone())?;
    if !was_sorted {
        warnings.push(format!("lengths were not non-increasing; sorted to {:?}", profile.as_slice()));
    }
    Ok((moments, profile))
}

fn optimize(args: OptimizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<()> {
    let tol = Tolerances::default();
    let mut warnings = Vec::new();
    let (moments, profile) = load_source(&args.source, &mut warnings)?;
    warn(err, &warnings);
    let d = design(&moments, &profile, &tol)?;
    io::save_dictionary(&d.dictionary, &tol, &args.out)?;
    let residual = tight_frame_residual(&d.dictionary);
    let report = OptimizeReport {
        meta: Meta::new("optimize"),
        cost: d.p_star(),
        q_star: d.q_star(),
        spectrum: d.dictionary.spectrum().lambda_star.clone(),
        partition: d.partition.blocks().map(|b| b.map(|i| i + 1).collect()).collect(),
        effective_rank: d.effective_rank(),
        lengths: profile.to_vec(),
        tight_frame_residual: residual,
        tight_frame: residual <= TIGHT_FRAME_TOL,
        dictionary: args.out.display().to_string(),
        warnings,
    };
    emit_json(out, &report)
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> AppResult<()> {
    let (dict, tol) = io::load_dictionary(&args.dict)?;
    let samples = io::load_samples(&args.samples)?;
    let estimate = monte_carlo_cost(&dict, &samples)?;
    let moments = empirical_moments(&samples, CovarianceDivisor::Population)?;
    let mut warnings = Vec::new();
    let expected = match expected_cost(&dict, &moments, &tol) {
        Ok(v) => Some(v),
        Err(Error::SpanDeficiency { leakage }) => {
            warnings.push(format!("samples leave the dictionary span (leakage {leakage:e})"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let gap = (estimate.mean - dict.cost()).abs();
    let bound = 4.0 * estimate.standard_error();
    let report = VerifyReport {
        meta: Meta::new("verify"),
        seed: args.seed,
        samples: estimate.count,
        monte_carlo_cost: estimate.mean,
        standard_error: estimate.standard_error(),
        optimal_cost: dict.cost(),
        expected_cost: expected,
        tight_frame_residual: tight_frame_residual(&dict),
        gaps: Gaps {
            monte_carlo_vs_optimal: gap,
            monte_carlo_vs_expected: expected.map(|e| (estimate.mean - e).abs()),
        },
        bound,
        status: if gap <= bound { "PASS" } else { "FAIL" },
        warnings,
    };
    emit_json(out, &report)
}

fn encode(args: EncodeArgs, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<()> {
    let (dict, tol) = io::load_dictionary(&args.dict)?;
    let samples = io::load_samples(&args.input)?;
    if samples.dim() != dict.dim() {
        return Err(Error::DimensionMismatch {
            expected: dict.dim(),
            found: samples.dim(),
        }
        .into());
    }
    let mut table = String::new();
    let header: Vec<String> = (1..=dict.len()).map(|i| format!("r{i}")).collect();
    table.push_str(&header.join(","));
    table.push_str(",residual\n");
    let (mut outside, mut max_residual) = (0usize, 0.0f64);
    for v in samples.rows() {
        let enc = encode_least_squares(&dict, v)?;
        let scale = (v - dict.center()).norm().max(1.0);
        if enc.residual > tol.representation * scale {
            outside += 1;
        }
        max_residual = max_residual.max(enc.residual);
        for c in enc.coefficients.iter() {
            table.push_str(&format!("{c},"));
        }
        table.push_str(&format!("{}\n", enc.residual));
    }
    io::write_text(&args.out, &table)?;
    if outside > 0 {
        warn(err, &[format!("{outside} of {} rows lie outside the dictionary span", samples.len())]);
    }
    emit_json(
        out,
        &EncodeReport {
            meta: Meta::new("encode"),
            rows: samples.len(),
            outside_span: outside,
            max_residual,
            output: args.out.display().to_string(),
        },
    )
}

fn robustness(args: RobustnessArgs, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<()> {
    let tol = Tolerances::default();
    let mut warnings = Vec::new();
    let (moments, profile) = load_source(&args.source, &mut warnings)?;
    warn(err, &warnings);
    let rows = robustness_sweep(&moments, &profile, &args.deltas, args.seed, &tol)?;
    let rows: Vec<RobustnessEntry> = rows
        .into_iter()
        .map(|r| RobustnessEntry {
            delta: r.delta,
            cost_gap: r.cost_gap,
            psd_clipped: r.psd_clipped,
        })
        .collect();
    if args.json {
        return emit_json(
            out,
            &RobustnessReport {
                meta: Meta::new("robustness"),
                seed: args.seed,
                perturbation: PERTURBATION_MODEL,
                rows,
            },
        );
    }
    let mut text = format!("# perturbation: {PERTURBATION_MODEL}\ndelta\tcost_gap\tpsd_clipped\n");
    for r in &rows {
        text.push_str(&format!("{:e}\t{:e}\t{}\n", r.delta, r.cost_gap, r.psd_clipped));
    }
    out.write_all(text.as_bytes()).map_err(|e| AppError::io("<stdout>", e))
}
