//! The `sharpkernel` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asymptotics::{asymptotic_row, compute_mu};
use crate::error::Error;
use crate::format::sig17;
use crate::kernels::{
    constant_kernel, epanechnikov_kernel, optimal_kernel, read_kernel_file, triangle_kernel, write_kernel_csv,
    GeneralKernel, Kernel, SymmetricKernel, KERNEL_TOL,
};
use crate::multiplier::{closed_form_c2, operator_norm, operator_norm_via_polynomial, MultiplierBound, NormMethod};
use crate::signal::{convolve, derivative, l2_norm, Boundary, CsvTable};
use crate::verify::{self, Suite, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable multiplying the `verify` tolerances.
pub const TOL_SCALE_ENV: &str = "SHARPKERNEL_TOL_SCALE";

#[derive(Debug, Parser)]
#[command(name = "sharpkernel", version, about = "Optimal smoothing kernels and sharp multiplier norms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a kernel as a `k,weight` table.
    Kernel {
        #[arg(long = "type", value_enum)]
        kind: KernelType,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compute the operator norm C_m(u) as JSON.
    Norm {
        #[command(flatten)]
        kernel: KernelSource,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Torus)]
        method: MethodArg,
    },
    /// Smooth one column of a CSV file.
    Smooth {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
        #[command(flatten)]
        kernel: KernelSource,
        #[arg(long, value_enum, default_value_t = BoundaryArg::Reflect)]
        boundary: BoundaryArg,
        /// Overwrite the input column instead of appending `<column>_smoothed`.
        #[arg(long)]
        replace: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the invariant suites; prints a JSON summary.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        /// Tolerance multiplier; defaults to $SHARPKERNEL_TOL_SCALE or 1.
        #[arg(long)]
        tol_scale: Option<f64>,
    },
    /// Tabulate the scaled optimal and Epanechnikov constants.
    Asympt {
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 256, 1024, 2048])]
        n: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelType {
    Optimal,
    Epanechnikov,
    Constant,
    Triangle,
}

#[derive(Debug, Clone, Args)]
pub struct KernelSource {
    #[arg(long = "type", value_enum, requires = "n", conflicts_with = "file")]
    pub kind: Option<KernelType>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Read the kernel from a `k,weight` file.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Torus,
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Reflect,
    Zero,
    Extend,
    Valid,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Reflect => Boundary::Reflect,
            BoundaryArg::Zero => Boundary::Zero,
            BoundaryArg::Extend => Boundary::Extend,
            BoundaryArg::Valid => Boundary::Valid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Extremal,
    Multiplier,
    Asymptotics,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Extremal => Suite::Extremal,
            SuiteArg::Multiplier => Suite::Multiplier,
            SuiteArg::Asymptotics => Suite::Asymptotics,
            SuiteArg::All => Suite::All,
        }
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_io() { EXIT_IO } else { EXIT_USAGE },
            message: e.to_string(),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    Error::io(path, e).into()
}

/// A kernel resolved from the command line.
enum LoadedKernel {
    Named { kind: KernelType, kernel: SymmetricKernel },
    Symmetric(SymmetricKernel),
    General(GeneralKernel),
}

impl LoadedKernel {
    fn as_kernel(&self) -> &dyn Kernel {
        match self {
            LoadedKernel::Named { kernel, .. } | LoadedKernel::Symmetric(kernel) => kernel,
            LoadedKernel::General(k) => k,
        }
    }

    fn symmetric(&self) -> Option<&SymmetricKernel> {
        match self {
            LoadedKernel::Named { kernel, .. } | LoadedKernel::Symmetric(kernel) => Some(kernel),
            LoadedKernel::General(_) => None,
        }
    }
}

fn named_kernel(kind: KernelType, n: usize) -> Result<SymmetricKernel, CliError> {
    Ok(match kind {
        KernelType::Optimal => optimal_kernel(n)?,
        KernelType::Epanechnikov => epanechnikov_kernel(n)?,
        KernelType::Constant => constant_kernel(n),
        KernelType::Triangle => triangle_kernel(n),
    })
}

fn load_kernel(src: &KernelSource) -> Result<LoadedKernel, CliError> {
    match (&src.file, src.kind, src.n) {
        (Some(path), None, _) => {
            let k = read_kernel_file(path)?;
            // Exactly mirrored files take the symmetric code path so that
            // emitted kernels reproduce library norms bit for bit.
            Ok(match k.is_symmetric() {
                true => LoadedKernel::Symmetric(k.to_symmetric(0.0)?),
                false => LoadedKernel::General(k),
            })
        }
        (None, Some(kind), Some(n)) => Ok(LoadedKernel::Named {
            kind,
            kernel: named_kernel(kind, n)?,
        }),
        _ => Err(CliError::usage("give either --file PATH or both --type and --n")),
    }
}

#[derive(Debug, Serialize)]
pub struct NormReport {
    pub order: usize,
    pub half_width: usize,
    pub value: f64,
    pub argmax_xi: f64,
    pub method: NormMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SmoothSummary {
    pub rows: usize,
    pub half_width: usize,
    pub norm_f: f64,
    pub norm_laplacian_f: Option<f64>,
    pub norm_laplacian_smoothed: Option<f64>,
    /// `‖Δ(u∗f)‖ / ‖Δf‖`.
    pub laplacian_ratio: Option<f64>,
    /// `‖Δ(u∗f)‖ / ‖f‖`.
    pub quotient: Option<f64>,
    /// `C_2(u)`.
    pub bound: f64,
}

fn write_out(output: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, bytes).map_err(|e| io_err(path, e)),
        None => stdout.write_all(bytes).map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

fn cmd_kernel(kind: KernelType, n: usize, output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let kernel = named_kernel(kind, n)?;
    let mut buf = Vec::new();
    write_kernel_csv(&kernel, &mut buf)?;
    write_out(output, stdout, &buf)
}

fn cmd_norm(src: &KernelSource, order: usize, method: MethodArg, stdout: &mut dyn Write) -> Result<(), CliError> {
    if order == 0 {
        return Err(CliError::usage("--order must be at least 1"));
    }
    let loaded = load_kernel(src)?;
    let bound: MultiplierBound = match method {
        MethodArg::Torus => operator_norm(loaded.as_kernel(), order),
        MethodArg::Polynomial => {
            if order != 2 {
                return Err(CliError::usage("the polynomial method only computes order 2"));
            }
            let sym = match &loaded {
                LoadedKernel::General(k) => k.to_symmetric(KERNEL_TOL)?,
                other => other.symmetric().expect("symmetric variant").clone(),
            };
            operator_norm_via_polynomial(&sym)
        }
    };
    let n = loaded.as_kernel().half_width();
    let closed_form = match &loaded {
        LoadedKernel::Named {
            kind: KernelType::Optimal,
            ..
        } if order == 2 => Some(closed_form_c2(n)),
        _ => None,
    };
    let report = NormReport {
        order,
        half_width: n,
        value: bound.value,
        argmax_xi: bound.argmax_xi,
        method: bound.method,
        closed_form,
        gap: closed_form.map(|c| bound.value - c),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("serializable report");
    text.push('\n');
    write_out(None, stdout, text.as_bytes())
}

#[allow(clippy::too_many_arguments)]
fn cmd_smooth(
    input: &Path,
    column: &str,
    src: &KernelSource,
    boundary: Boundary,
    replace: bool,
    output: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let loaded = load_kernel(src)?;
    let u = loaded.as_kernel();
    let mut table = CsvTable::read(input)?;
    let f = table.column(column)?;
    let smoothed = convolve(u, &f, boundary)?;

    let n = u.half_width();
    let observed = match boundary {
        Boundary::Valid => {
            table.retain_rows(n, f.len() - n);
            // Compare against the rows that survive.
            crate::signal::TimeSeries::new(f.values()[n..f.len() - n].to_vec())?
        }
        _ => f.clone(),
    };
    let target = if replace {
        column.to_owned()
    } else {
        format!("{column}_smoothed")
    };
    table.set_column(&target, smoothed.values())?;

    let mut buf = Vec::new();
    table.write(&mut buf)?;
    write_out(output, stdout, &buf)?;

    let lap_f = derivative(&f, 2).ok().map(|d| l2_norm(&d));
    let lap_s = derivative(&smoothed, 2).ok().map(|d| l2_norm(&d));
    let norm_f = l2_norm(&f);
    let summary = SmoothSummary {
        rows: observed.len(),
        half_width: n,
        norm_f,
        norm_laplacian_f: lap_f,
        norm_laplacian_smoothed: lap_s,
        laplacian_ratio: lap_f.zip(lap_s).and_then(|(a, b)| (a > 0.0).then(|| b / a)),
        quotient: lap_s.and_then(|b| (norm_f > 0.0).then(|| b / norm_f)),
        bound: operator_norm(u, 2).value,
    };
    let line = serde_json::to_string(&summary).expect("serializable summary");
    writeln!(stderr, "{line}").map_err(|e| io_err(Path::new("<stderr>"), e))
}

fn cmd_verify(suite: Suite, opts: VerifyOptions, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let report = verify::run(suite, &opts);
    let mut text = serde_json::to_string_pretty(&report).expect("serializable report");
    text.push('\n');
    write_out(None, stdout, text.as_bytes())?;
    Ok(report.exit_code())
}

fn cmd_asympt(ns: &[usize], stdout: &mut dyn Write) -> Result<(), CliError> {
    if let Some(bad) = ns.iter().find(|&&n| n < 2) {
        return Err(CliError::usage(format!("asymptotic rows need n >= 2, got {bad}")));
    }
    let mu = compute_mu();
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["n", "optimal_ratio", "epanechnikov_ratio", "ratio_over_limit"])
        .map_err(Error::from)?;
    for &n in ns {
        let row = asymptotic_row(n, &mu)?;
        wtr.write_record([
            n.to_string(),
            sig17(row.optimal_ratio),
            sig17(row.epanechnikov_ratio),
            sig17(row.ratio_over_limit),
        ])
        .map_err(Error::from)?;
    }
    let buf = wtr
        .into_inner()
        .map_err(|e| io_err(Path::new("<stdout>"), e.into_error()))?;
    write_out(None, stdout, &buf)
}

fn tol_scale_from_env() -> Result<f64, CliError> {
    match std::env::var(TOL_SCALE_ENV) {
        Ok(v) => v
            .parse::<f64>()
            .ok()
            .filter(|s| *s > 0.0)
            .ok_or_else(|| CliError::usage(format!("{TOL_SCALE_ENV} must be a positive number, got `{v}`"))),
        Err(_) => Ok(1.0),
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Kernel { kind, n, output } => cmd_kernel(kind, n, output.as_deref(), stdout).map(|_| EXIT_OK),
        Command::Norm { kernel, order, method } => cmd_norm(&kernel, order, method, stdout).map(|_| EXIT_OK),
        Command::Smooth {
            input,
            column,
            kernel,
            boundary,
            replace,
            output,
        } => cmd_smooth(
            &input,
            &column,
            &kernel,
            boundary.into(),
            replace,
            output.as_deref(),
            stdout,
            stderr,
        )
        .map(|_| EXIT_OK),
        Command::Verify { suite, n_max, tol_scale } => {
            let tol_scale = match tol_scale {
                Some(s) if s > 0.0 => s,
                Some(s) => return Err(CliError::usage(format!("--tol-scale must be positive, got {s}"))),
                None => tol_scale_from_env()?,
            };
            cmd_verify(suite.into(), VerifyOptions { n_max, tol_scale }, stdout)
        }
        Command::Asympt { n } => cmd_asympt(&n, stdout).map(|_| EXIT_OK),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
