//! `wigner`: phase-space geometry, MUB construction, point-operator census,
//! DWF extrema and evaluation, and QRAC rates from the command line.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O or
//! other failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wigner_core::census::{ReportMeta, ScanOptions};
use wigner_core::dwf::{DwfMap, StateFile};
use wigner_core::mub::{mub_prime, mub_qubit};
use wigner_core::pauli::{three_qubit_table, two_qubit_table};
use wigner_core::{
    census, evaluate, mub_from_pauli_table, qrac_rate, scan_summary, simulate, AxiomReport, DensityMatrix,
    Error as CoreError, FieldSpec, Line, MubReport, MubSet, PhaseSpace, QracCode, QracReport, QuantumNet,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "wigner", version, about = "Discrete Wigner functions over finite-field phase spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the d×d phase space and check the affine-plane axioms.
    Geometry {
        #[command(flatten)]
        field: FieldArgs,
        /// Include every line as a list of point indices.
        #[arg(long)]
        lines: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Build a complete MUB set, verify it, and write it as JSON.
    Mub {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        mub: MubArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Group all point operators by spectrum.
    Census {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        mub: MubArgs,
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Decimal places for printed spectra.
        #[arg(long, default_value_t = 5)]
        round: u32,
    },
    /// Extremal DWF values over every definition built on one MUB set.
    Extrema {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        mub: MubArgs,
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Average success rate of the (d+1) → d random access code.
    Qrac {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        mub: MubArgs,
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Also run a Monte Carlo simulation with this many trials.
        #[arg(long, value_name = "TRIALS")]
        simulate: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate the DWF of a state on the d×d grid.
    Dwf {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        mub: MubArgs,
        #[command(flatten)]
        out: OutArgs,
        /// `maximally-mixed` or a JSON state file.
        #[arg(long, default_value = "maximally-mixed")]
        state: String,
        #[arg(long, value_enum, default_value_t = NetChoice::Canonical)]
        net: NetChoice,
        /// Seed for `--net random`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct FieldArgs {
    /// Hilbert-space dimension, a prime power.
    #[arg(long, conflicts_with_all = ["p", "n"])]
    dim: Option<usize>,
    /// Field characteristic.
    #[arg(long, requires = "n")]
    p: Option<u32>,
    /// Extension degree.
    #[arg(long, requires = "p")]
    n: Option<u32>,
    /// Irreducible modulus as coefficients low-to-high, e.g. `1,1,0,1`.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceChoice {
    Ivanovic,
    PauliTable,
}

#[derive(Args)]
struct MubArgs {
    /// Construction to use; defaults to the Pauli tables for d = 2, 4, 8
    /// and Ivanovic's formula for odd primes.
    #[arg(long, value_enum, conflicts_with = "mub_file")]
    mub_source: Option<SourceChoice>,
    /// Read the MUB set from a JSON file instead.
    #[arg(long)]
    mub_file: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Permit scans above 10^8 operators (d = 8).
    #[arg(long)]
    allow_heavy: bool,
    /// Report scan progress on stderr.
    #[arg(long)]
    progress: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutArgs {
    /// Output path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum NetChoice {
    Canonical,
    Random,
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Failure::Usage(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(f) = err.downcast_ref::<Failure>() {
        return match f {
            Failure::Usage(_) => 2,
            Failure::Validation(_) => 1,
        };
    }
    match err.downcast_ref::<CoreError>() {
        Some(
            CoreError::NotPrime(_)
            | CoreError::UnsupportedField { .. }
            | CoreError::InvalidModulus(_)
            | CoreError::NotPrimePower(_)
            | CoreError::CoefficientOutOfRange { .. }
            | CoreError::UnsupportedDimension(..)
            | CoreError::HeavyScan { .. }
            | CoreError::InvalidArgument(_),
        ) => 2,
        Some(
            CoreError::MubVerification { .. }
            | CoreError::SpotCheck { .. }
            | CoreError::NotHermitian(_)
            | CoreError::NotUnitVector(_)
            | CoreError::InvalidDensity(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::InvalidNet(_)
            | CoreError::PauliTable(_)
            | CoreError::ProjectorRank { .. },
        ) => 1,
        _ => 3,
    }
}

impl FieldArgs {
    /// Field from `--dim` or `--p/--n`, with an optional modulus override.
    fn spec(&self) -> anyhow::Result<Option<Arc<FieldSpec>>> {
        let (p, n) = match (self.dim, self.p, self.n) {
            (Some(d), _, _) => wigner_core::field::prime_power(d).ok_or(CoreError::NotPrimePower(d))?,
            (None, Some(p), Some(n)) => (p, n),
            _ => {
                if self.modulus.is_some() {
                    return Err(usage("--modulus needs --dim or --p/--n"));
                }
                return Ok(None);
            }
        };
        Ok(Some(match &self.modulus {
            Some(m) => FieldSpec::with_modulus(p, n, m.clone())?,
            None => FieldSpec::new(p, n)?,
        }))
    }

    fn require(&self) -> anyhow::Result<Arc<FieldSpec>> {
        self.spec()?.ok_or_else(|| usage("one of --dim or --p/--n is required"))
    }
}

impl MubArgs {
    fn build(&self, spec: Option<&Arc<FieldSpec>>) -> anyhow::Result<MubSet> {
        let set = match (&self.mub_file, self.mub_source) {
            (Some(path), _) => {
                MubSet::load(path).map_err(|e| anyhow::Error::from(e).context(format!("reading {}", path.display())))?
            }
            (None, source) => {
                let d = spec.ok_or_else(|| usage("one of --dim, --p/--n or --mub-file is required"))?.order();
                match source {
                    None => wigner_core::default_mub(d)?,
                    Some(SourceChoice::Ivanovic) => mub_prime(d)?,
                    Some(SourceChoice::PauliTable) => match d {
                        2 => mub_qubit(),
                        4 => mub_from_pauli_table(&two_qubit_table())?,
                        8 => mub_from_pauli_table(&three_qubit_table())?,
                        _ => return Err(usage(format!("no Pauli table for d = {d}"))),
                    },
                }
            }
        };
        if let Some(s) = spec {
            if s.order() != set.dimension() {
                return Err(usage(format!(
                    "MUB set has dimension {} but the field has order {}",
                    set.dimension(),
                    s.order()
                )));
            }
        }
        Ok(set)
    }
}

impl ScanArgs {
    fn workers(&self) -> usize {
        self.workers
            .map(|w| w as usize)
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }
}

fn progress_line(done: u64, total: u64) {
    eprint!("\r{done}/{total} operators");
    if done == total {
        eprintln!();
    }
}

fn scan_options<'a>(scan: &ScanArgs, progress: &'a (dyn Fn(u64, u64) + Sync)) -> ScanOptions<'a> {
    ScanOptions {
        workers: scan.workers(),
        allow_heavy: scan.allow_heavy,
        progress: scan.progress.then_some(progress),
        ..ScanOptions::default()
    }
}

fn meta(spec: Option<&Arc<FieldSpec>>, net: &str, workers: usize) -> ReportMeta {
    ReportMeta {
        tool_version: VERSION.to_string(),
        modulus: spec.map(|s| s.modulus_string()),
        net: Some(net.to_string()),
        workers,
    }
}

/// Label for reports that range over every point operator, hence every net.
const ALL_NETS: &str = "all";

fn open_out(out: &OutArgs) -> anyhow::Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: &OutArgs, value: &T) -> anyhow::Result<()> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_csv_rows(out: &OutArgs, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(open_out(out)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct GeometryReport<'a> {
    dim: usize,
    p: u32,
    n: u32,
    modulus: String,
    points: usize,
    lines: usize,
    striations: usize,
    axioms: AxiomReport,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    line_points: Option<Vec<&'a Line>>,
    tool_version: &'static str,
}

fn cmd_geometry(field: &FieldArgs, lines: bool, out: &OutArgs) -> anyhow::Result<()> {
    let spec = field.require()?;
    let ps = PhaseSpace::build(&spec);
    let axioms = ps.verify_axioms();
    let pass = axioms.all_pass();
    let d = ps.dimension();
    match out.format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            out,
            &GeometryReport {
                dim: d,
                p: spec.characteristic(),
                n: spec.degree(),
                modulus: spec.modulus_string(),
                points: ps.points().len(),
                lines: ps.lines().count(),
                striations: ps.striations().len(),
                axioms,
                pass,
                line_points: lines.then(|| ps.lines().collect()),
                tool_version: VERSION,
            },
        )?,
        Format::Csv => write_csv_rows(
            out,
            &["dim", "unique_joining_line", "unique_parallel", "non_parallel_meet_once", "pass"],
            &[vec![
                d.to_string(),
                axioms.unique_joining_line.to_string(),
                axioms.unique_parallel.to_string(),
                axioms.non_parallel_meet_once.to_string(),
                pass.to_string(),
            ]],
        )?,
    }
    if !pass {
        return Err(Failure::Validation(format!("phase space of order {d} violates the affine-plane axioms")).into());
    }
    Ok(())
}

fn cmd_mub(field: &FieldArgs, mub: &MubArgs, out: &OutArgs) -> anyhow::Result<()> {
    if out.format == Some(Format::Csv) {
        return Err(usage("MUB files are JSON only"));
    }
    let spec = field.spec()?;
    let set = mub.build(spec.as_ref())?;
    let report: MubReport = set.verify();
    write_json(out, &set.to_file())?;
    eprintln!("{}", serde_json::to_string(&report)?);
    if !report.passes(1e-10) {
        return Err(Failure::Validation(format!("MUB set deviates by {:e}", report.max_deviation())).into());
    }
    Ok(())
}

fn cmd_census(field: &FieldArgs, mub: &MubArgs, scan: &ScanArgs, out: &OutArgs, round: u32) -> anyhow::Result<()> {
    let spec = field.spec()?;
    let set = mub.build(spec.as_ref())?;
    let report = census(&set, &scan_options(scan, &progress_line))?;
    match out.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &report.to_record(round, meta(spec.as_ref(), ALL_NETS, report.workers)))?,
        Format::Csv => {
            let mut w = open_out(out)?;
            report.write_csv(&mut w, round)?;
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ExtremaReport {
    d: usize,
    w_max: f64,
    w_min: f64,
    lambda_max: f64,
    lambda_min: f64,
    argmax: wigner_core::PointOperatorIndex,
    argmin: wigner_core::PointOperatorIndex,
    total_operators: u64,
    mub_source: String,
    elapsed_seconds: f64,
    meta: ReportMeta,
}

fn cmd_extrema(field: &FieldArgs, mub: &MubArgs, scan: &ScanArgs, out: &OutArgs) -> anyhow::Result<()> {
    let spec = field.spec()?;
    let set = mub.build(spec.as_ref())?;
    let s = scan_summary(&set, &scan_options(scan, &progress_line))?;
    let d = s.dimension as f64;
    let report = ExtremaReport {
        d: s.dimension,
        w_max: s.lambda_max / d,
        w_min: s.lambda_min / d,
        lambda_max: s.lambda_max,
        lambda_min: s.lambda_min,
        argmax: s.argmax,
        argmin: s.argmin,
        total_operators: s.total_operators,
        mub_source: set.source().to_string(),
        elapsed_seconds: s.elapsed_seconds,
        meta: meta(spec.as_ref(), ALL_NETS, s.workers),
    };
    match out.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &report),
        Format::Csv => write_csv_rows(
            out,
            &["d", "w_max", "w_min"],
            &[vec![report.d.to_string(), report.w_max.to_string(), report.w_min.to_string()]],
        ),
    }
}

#[derive(Serialize)]
struct QracOutput {
    #[serde(flatten)]
    report: QracReport,
    mub_source: String,
    meta: ReportMeta,
}

fn cmd_qrac(
    field: &FieldArgs,
    mub: &MubArgs,
    scan: &ScanArgs,
    out: &OutArgs,
    trials: Option<u64>,
    seed: u64,
) -> anyhow::Result<()> {
    let spec = field.spec()?;
    let set = mub.build(spec.as_ref())?;
    let report = match trials {
        Some(0) => return Err(usage("--simulate needs at least one trial")),
        Some(n) => {
            let code = QracCode::new(&set)?;
            simulate(&code, n, seed, scan.workers())?
        }
        None => qrac_rate(&set, &scan_options(scan, &progress_line))?,
    };
    let output = QracOutput {
        report,
        mub_source: set.source().to_string(),
        meta: meta(spec.as_ref(), ALL_NETS, scan.workers()),
    };
    match out.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &output),
        Format::Csv => {
            let opt = |x: Option<String>| x.unwrap_or_default();
            let r = &output.report;
            write_csv_rows(
                out,
                &["d", "p_q_exact", "p_q_empirical", "trials", "seed"],
                &[vec![
                    r.d.to_string(),
                    r.p_q_exact.to_string(),
                    opt(r.p_q_empirical.map(|x| x.to_string())),
                    opt(r.trials.map(|x| x.to_string())),
                    opt(r.seed.map(|x| x.to_string())),
                ]],
            )
        }
    }
}

#[derive(Serialize)]
struct DwfOutput {
    dim: usize,
    state: String,
    /// `values[x][y]` for the point `(x, y)` in field order.
    values: Vec<Vec<f64>>,
    total: f64,
    mub_source: String,
    net: QuantumNet,
    meta: ReportMeta,
}

fn load_state(arg: &str, d: usize) -> anyhow::Result<DensityMatrix> {
    if arg == "maximally-mixed" {
        return Ok(DensityMatrix::maximally_mixed(d));
    }
    let path = Path::new(arg);
    let file = StateFile::load(path).map_err(|e| anyhow::Error::from(e).context(format!("reading {arg}")))?;
    let rho: DensityMatrix = file.to_density()?;
    if rho.dimension() != d {
        return Err(Failure::Validation(format!("state has dimension {} but d = {d}", rho.dimension())).into());
    }
    Ok(rho)
}

fn cmd_dwf(
    field: &FieldArgs,
    mub: &MubArgs,
    out: &OutArgs,
    state: &str,
    net: NetChoice,
    seed: u64,
) -> anyhow::Result<()> {
    let given = field.spec()?;
    let set = mub.build(given.as_ref())?;
    let spec = match given {
        Some(s) => s,
        None => FieldSpec::of_order(set.dimension())?,
    };
    let d = spec.order();
    let ps = PhaseSpace::build(&spec);
    let qnet = match net {
        NetChoice::Canonical => QuantumNet::canonical(d),
        NetChoice::Random => QuantumNet::random(d, &mut ChaCha8Rng::seed_from_u64(seed)),
    };
    let rho = load_state(state, d)?;
    let w: DwfMap = evaluate(&rho, &set, &ps, &qnet)?;
    match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut o = open_out(out)?;
            w.write_csv(&mut o)?;
            o.flush()?;
            Ok(())
        }
        Format::Json => {
            let label = match net {
                NetChoice::Canonical => "canonical".to_string(),
                NetChoice::Random => format!("random(seed={seed})"),
            };
            write_json(
                out,
                &DwfOutput {
                    dim: d,
                    state: state.to_string(),
                    values: w.values.chunks(d).map(<[f64]>::to_vec).collect(),
                    total: w.total(),
                    mub_source: set.source().to_string(),
                    net: qnet,
                    meta: meta(Some(&spec), &label, 1),
                },
            )
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Geometry { field, lines, out } => cmd_geometry(field, *lines, out),
        Command::Mub { field, mub, out } => cmd_mub(field, mub, out),
        Command::Census { field, mub, scan, out, round } => cmd_census(field, mub, scan, out, *round),
        Command::Extrema { field, mub, scan, out } => cmd_extrema(field, mub, scan, out),
        Command::Qrac { field, mub, scan, out, simulate, seed } => cmd_qrac(field, mub, scan, out, *simulate, *seed),
        Command::Dwf { field, mub, out, state, net, seed } => cmd_dwf(field, mub, out, state, *net, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
