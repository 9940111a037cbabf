//! `cylquant` command-line front end.
//!
//! Every command writes its artifact (matrix JSON/CSV, distribution CSV,
//! report CSV) to `--out` when given, otherwise to stdout, and prints a JSON
//! summary otherwise. Exit status: 0 on success, 1 on invalid input or a
//! numerical failure, 2 on a command-line usage error, 3 when a computed
//! check misses its tolerance.

mod settings;
mod states;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use cylquant::angle::{
    angle_convergence, angle_operator_report, ConvergenceRow, CONVERGENCE_LADDER,
};
use cylquant::kernel::{validate_kernel, ValidationGrid};
use cylquant::matrix::format_float;
use cylquant::observable::{make_builtin, ObservableParams};
use cylquant::phase::{
    gw_phase_matrix, gw_variance_quoted_formula, gw_variance_series, number_state_phase_variance,
    pb_distribution, pb_phase_matrix, pb_phase_matrix_spectral, pov_distribution, PhaseMethod,
};
use cylquant::quantizer::{
    restricted_quantizer, weyl_apply, weyl_apply_closed_symmetric, weyl_apply_closed_weyl,
};
use cylquant::uncertainty::{
    check_theta_l_uncertainty, conjecture_phase_number_experiment, reports_to_csv, theta_l_batch,
    PhaseSource, UncertaintyReport, DEFAULT_CENTERING_TOL,
};
use cylquant::{Matrix, Phase};
use serde_json::json;

use settings::{Common, FileConfig, Settings};
use states::StateSource;

#[derive(Parser)]
#[command(
    name = "cylquant",
    version,
    about = "Generalized Weyl quantization on the cylinder"
)]
struct Cli {
    /// TOML config file; command-line flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantize a classical observable f(Theta, L) on [-N, N].
    Quantize(QuantizeArgs),
    /// The restricted quantizer Omega_N(Theta, n).
    Quantizer(QuantizerArgs),
    /// The angle operator Theta_N with limit and norm diagnostics.
    AngleOp(AngleOpArgs),
    /// Angle-operator entries along an N-ladder.
    AngleConverge(AngleConvergeArgs),
    /// Garrison-Wong or Pegg-Barnett phase operator on [0, s].
    PhaseOp(PhaseOpArgs),
    /// Phase distribution of an oscillator state.
    PovDist(PovDistArgs),
    /// Phase variance of the number state |n>.
    Variance(VarianceArgs),
    /// Uncertainty-relation checks over a batch of states.
    Uncertainty(UncertaintyArgs),
    /// Structural checks of an ordering kernel.
    ValidateKernel(ValidateKernelArgs),
}

#[derive(clap::Args)]
struct Output {
    /// Output file; `.csv` selects CSV, anything else JSON. Stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct QuantizeArgs {
    /// angle, momentum, angle_squared, unity, cos_angle, sin_angle,
    /// angle_times_momentum, momentum_power, phase_pullback
    #[arg(long)]
    observable: String,
    /// Harmonic for cos_angle / sin_angle.
    #[arg(long)]
    frequency: Option<i64>,
    /// Exponent for momentum_power.
    #[arg(long)]
    power: Option<u32>,
    /// Phase function for phase_pullback (phase, phase_squared, cos_phase, sin_phase, unity).
    #[arg(long)]
    phase: Option<String>,
    #[arg(long = "N", allow_hyphen_values = true)]
    n_max: Option<i64>,
    #[arg(long, value_enum, default_value_t = Method::General)]
    method: Method,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Moment sums valid for any kernel.
    General,
    /// Closed form of the chosen built-in kernel.
    Closed,
}

#[derive(clap::Args)]
struct QuantizerArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    /// Phase-space momentum index.
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    #[arg(long = "N", allow_hyphen_values = true)]
    n_max: Option<i64>,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    output: Output,
}

#[derive(clap::Args)]
struct AngleOpArgs {
    #[arg(long = "N", allow_hyphen_values = true)]
    n_max: Option<i64>,
    /// Power-iteration budget for the spectral norm estimate (skipped if absent).
    #[arg(long)]
    spectral_iterations: Option<usize>,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    output: Output,
}

#[derive(clap::Args)]
struct AngleConvergeArgs {
    /// Entries as `j,k` pairs separated by `;`.
    #[arg(long, default_value = "1,0")]
    entries: String,
    /// Comma-separated N values.
    #[arg(long)]
    ladder: Option<String>,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhaseKind {
    Gw,
    Pb,
    PbSpectral,
}

#[derive(clap::Args)]
struct PhaseOpArgs {
    #[arg(long, value_enum, default_value_t = PhaseKind::Gw)]
    kind: PhaseKind,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    phi0: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistMethod {
    Pov,
    Pb,
}

#[derive(clap::Args)]
struct PovDistArgs {
    /// Number-state JSON file `{"s": .., "coefficients": [[re, im], ...]}`.
    #[arg(long)]
    state: PathBuf,
    #[arg(long, value_enum, default_value_t = DistMethod::Pov)]
    method: DistMethod,
    /// Density grid size (POV).
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// PB truncation.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    phi0: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(clap::Args)]
struct VarianceArgs {
    /// gw, pb or pov.
    #[arg(long)]
    method: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    phi0: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Circle,
    PhaseConjecture,
}

#[derive(clap::Args)]
struct UncertaintyArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// JSON file of states, or `random:<count>:<seed>`.
    #[arg(long)]
    states: String,
    /// Circle truncation (circle mode) or largest random truncation s (phase mode).
    #[arg(long = "N", allow_hyphen_values = true)]
    n_max: Option<i64>,
    #[arg(long, default_value_t = DEFAULT_CENTERING_TOL)]
    centering_tol: f64,
    /// Phase-conjecture source of Delta Phi: `pov` or `pb:<s>`.
    #[arg(long, default_value = "pov")]
    source: String,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    output: Output,
}

#[derive(clap::Args)]
struct ValidateKernelArgs {
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 33)]
    sigma_points: usize,
    #[arg(long, default_value_t = 10)]
    l_max: i64,
    #[command(flatten)]
    common: Common,
}

/// Result of a command that ran to completion.
enum Status {
    Ok,
    /// A check missed its tolerance.
    Failed,
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn emit(
    output: &Output,
    json: impl FnOnce() -> String,
    csv: impl FnOnce() -> String,
) -> Result<()> {
    match &output.out {
        Some(path) => {
            let text = if is_csv(path) { csv() } else { json() };
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{}", json());
            Ok(())
        }
    }
}

fn emit_matrix(output: &Output, m: &Matrix) -> Result<()> {
    emit(output, || m.to_json_string(), || m.to_csv_string())?;
    if let Some(path) = &output.out {
        summary(json!({
            "path": path,
            "lo": m.lo(),
            "hi": m.hi(),
            "hermiticity_defect": m.hermiticity_defect(),
        }));
    }
    Ok(())
}

fn summary(value: serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("JSON values serialize")
    );
}

fn resolve(file: &Option<FileConfig>, common: &Common, phi0: Option<f64>) -> Result<Settings> {
    Settings::resolve(file.clone().unwrap_or_default(), common, phi0)
}

fn run(cli: Cli) -> Result<Status> {
    let file = cli.config.as_deref().map(FileConfig::load).transpose()?;
    match cli.command {
        Command::Quantize(a) => {
            let st = resolve(&file, &a.common, None)?;
            let cfg = st.quantizer(st.n_max(a.n_max)?)?;
            let phase = a.phase.as_deref().map(Phase::by_name).transpose()?;
            let params = ObservableParams {
                frequency: a.frequency,
                power: a.power,
                phase,
            };
            let f = make_builtin(&a.observable, &params)?;
            let kernel = st.kernel();
            let m = match a.method {
                Method::General => weyl_apply(&f, &kernel, &cfg)?,
                Method::Closed if kernel.is_weyl() => weyl_apply_closed_weyl(&f, &cfg)?,
                Method::Closed => weyl_apply_closed_symmetric(&f, &cfg)?,
            };
            emit_matrix(&a.output, &m)?;
        }
        Command::Quantizer(a) => {
            let st = resolve(&file, &a.common, None)?;
            let cfg = st.quantizer(st.n_max(a.n_max)?)?;
            emit_matrix(
                &a.output,
                &restricted_quantizer(&st.kernel(), a.theta, a.n, &cfg)?,
            )?;
        }
        Command::AngleOp(a) => {
            let st = resolve(&file, &a.common, None)?;
            let cfg = st.quantizer(st.n_max(a.n_max)?)?;
            let report = angle_operator_report(&st.kernel(), &cfg, a.spectral_iterations)?;
            let mut value = serde_json::to_value(&report)?;
            if let Some(path) = &a.output.out {
                emit(
                    &a.output,
                    || report.matrix.to_json_string(),
                    || report.matrix.to_csv_string(),
                )?;
                value["path"] = json!(path);
            }
            summary(value);
        }
        Command::AngleConverge(a) => {
            let st = resolve(&file, &a.common, None)?;
            let entries = parse_entries(&a.entries)?;
            let ladder = match &a.ladder {
                Some(text) => parse_list::<i64>(text)?,
                None => CONVERGENCE_LADDER.to_vec(),
            };
            let cfg = st.quantizer(*ladder.first().context("empty ladder")?)?;
            let rows = angle_convergence(&st.kernel(), &entries, &ladder, &cfg)?;
            emit(
                &a.output,
                || serde_json::to_string_pretty(&rows).unwrap() + "\n",
                || convergence_csv(&rows),
            )?;
        }
        Command::PhaseOp(a) => {
            let st = resolve(&file, &Common::default(), a.phi0)?;
            let s = st.s(a.s)?;
            let m = match a.kind {
                PhaseKind::Gw => gw_phase_matrix(s, st.phi0)?,
                PhaseKind::Pb => pb_phase_matrix(s, st.phi0)?,
                PhaseKind::PbSpectral => pb_phase_matrix_spectral(s, st.phi0)?,
            };
            emit_matrix(&a.output, &m)?;
        }
        Command::PovDist(a) => {
            let st = resolve(&file, &Common::default(), a.phi0)?;
            let psi = cylquant::NumberState::read_json(&a.state)?;
            let dist = match a.method {
                DistMethod::Pov => pov_distribution(&psi, a.grid, st.phi0)?,
                DistMethod::Pb => pb_distribution(&psi, st.s(a.s)?, st.phi0)?,
            };
            emit(&a.output, || dist.to_csv_string(), || dist.to_csv_string())?;
            if a.output.out.is_some() {
                summary(json!({
                    "total_probability": dist.total_probability(),
                    "mean": dist.mean(),
                    "variance": dist.variance(),
                    "min_value": dist.min_value(),
                }));
            }
        }
        Command::Variance(a) => {
            let st = resolve(&file, &Common::default(), a.phi0)?;
            let method: PhaseMethod = a.method.parse()?;
            let s = match method {
                PhaseMethod::Pov => st.s(a.s).unwrap_or(a.n),
                _ => st.s(a.s)?,
            };
            let value = number_state_phase_variance(method, a.n, s, st.phi0, &st.quad())?;
            let mut report = json!({
                "method": method,
                "n": a.n,
                "s": s,
                "phi0": st.phi0,
                "variance": value,
            });
            if method == PhaseMethod::GwTruncated {
                report["series_oracle"] = json!(gw_variance_series(a.n, s));
                report["quoted_closed_form"] = json!(gw_variance_quoted_formula(a.n));
            }
            summary(report);
        }
        Command::Uncertainty(a) => return uncertainty(&file, a),
        Command::ValidateKernel(a) => {
            let st = resolve(&file, &a.common, None)?;
            let grid = ValidationGrid {
                sigma_points: a.sigma_points,
                l_max: a.l_max,
            };
            let report = validate_kernel(&st.kernel(), grid, a.tol)?;
            summary(serde_json::to_value(&report)?);
            if !report.all_passed() {
                return Ok(Status::Failed);
            }
        }
    }
    Ok(Status::Ok)
}

fn uncertainty(file: &Option<FileConfig>, a: UncertaintyArgs) -> Result<Status> {
    let st = resolve(file, &a.common, None)?;
    if !(a.centering_tol > 0.0 && a.centering_tol.is_finite()) {
        bail!("centering tolerance must be positive and finite");
    }
    let source = a.states.parse::<StateSource>()?.with_seed(st.seed(None))?;
    let (reports, status): (Vec<UncertaintyReport>, Status) = match a.mode {
        Mode::Circle => {
            let n_max = st.n_max(a.n_max)?;
            let reports = match source.random_parts() {
                // random draws are centered (and redrawn if that fails)
                Some((count, seed)) => {
                    theta_l_batch(count, seed, n_max, st.hbar, a.centering_tol)?.0
                }
                None => states::circle_states(&source, n_max)?
                    .iter()
                    .map(|psi| {
                        check_theta_l_uncertainty(
                            &psi.normalized()?,
                            n_max,
                            st.hbar,
                            a.centering_tol,
                        )
                    })
                    .collect::<cylquant::Result<_>>()?,
            };
            let failed = reports.iter().any(UncertaintyReport::is_violation);
            (reports, if failed { Status::Failed } else { Status::Ok })
        }
        Mode::PhaseConjecture => {
            let phase_source = match a.source.as_str() {
                "pov" => PhaseSource::Pov,
                other => match other.strip_prefix("pb:") {
                    Some(s) => PhaseSource::PbFinite(
                        s.parse()
                            .with_context(|| format!("bad PB truncation `{s}`"))?,
                    ),
                    None => bail!("unknown phase source `{other}` (pov or pb:<s>)"),
                },
            };
            let s_max = usize::try_from(a.n_max.unwrap_or(8)).context("N must be non-negative")?;
            let quad = st.quad();
            let reports = states::number_states(&source, s_max)?
                .iter()
                .map(|psi| conjecture_phase_number_experiment(psi, phase_source, &quad))
                .collect::<cylquant::Result<_>>()?;
            // a conjecture: violations are reported, never a failure
            (reports, Status::Ok)
        }
    };
    let tested = reports.iter().filter(|r| !r.precondition_violated).count();
    let violations = reports.iter().filter(|r| r.is_violation()).count();
    emit(
        &a.output,
        || reports_to_csv(&reports),
        || reports_to_csv(&reports),
    )?;
    if a.output.out.is_some() {
        summary(json!({
            "states": reports.len(),
            "tested": tested,
            "precondition_violated": reports.len() - tested,
            "violations": violations,
            "conjecture": matches!(a.mode, Mode::PhaseConjecture),
        }));
    }
    Ok(status)
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| anyhow::anyhow!("bad list element `{p}`"))
        })
        .collect()
}

fn parse_entries(text: &str) -> Result<Vec<(i64, i64)>> {
    text.split(';')
        .map(|pair| match parse_list::<i64>(pair)?.as_slice() {
            [j, k] => Ok((*j, *k)),
            _ => bail!("entry `{pair}` is not a `j,k` pair"),
        })
        .collect()
}

fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n_max,j,k,re,im,limit_re,limit_im,deviation\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.n_max,
            r.j,
            r.k,
            format_float(r.re),
            format_float(r.im),
            format_float(r.limit_re),
            format_float(r.limit_im),
            format_float(r.deviation)
        ));
    }
    out
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(3),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entry_lists() {
        assert_eq!(parse_entries("1,0;2,-1").unwrap(), vec![(1, 0), (2, -1)]);
        assert!(parse_entries("1,0,3").is_err());
        assert_eq!(parse_list::<i64>("2, 8,32").unwrap(), vec![2, 8, 32]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
