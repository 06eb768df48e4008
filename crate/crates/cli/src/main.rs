mod output;
mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use haar_coherence::closed_form::{
    avg_coherence_mixed, avg_coherence_pure, avg_cr_mixed, avg_cr_pure, coherent_subspace_dim,
    max_coherence,
};
use haar_coherence::linalg::ComplexMatrix;
use haar_coherence::mc::{
    estimate_average, estimate_tail, figure1_sweep, Ensemble, McConfig, Measure,
    DEFAULT_CHUNK_SIZE,
};
use haar_coherence::random::{sample_haar_pure, sample_haar_unitary, sample_hs_mixed, RngStream};
use haar_coherence::verify::{all_passed, run_suite, Suite};

use output::{
    write_records, ClosedFormRecord, Figure1Record, Format, McRecord, SampleRecord, TailRecord,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "haar-coherence", version, about = "Skew information-based coherence of random quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed-form expression.
    ClosedForm(ClosedFormArgs),
    /// Monte Carlo ensemble average of a coherence measure.
    Mc(McArgs),
    /// Empirical tail frequency against the concentration bound.
    Tail(TailArgs),
    /// Mixed-state average over N = 2^m: CSV table and optional SVG chart.
    Figure1(Figure1Args),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Draw one random state or unitary.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosedFormMeasure {
    PureAvg,
    MixedAvg,
    CrPureAvg,
    CrMixedAvg,
    Max,
    SubspaceDim,
}

impl ClosedFormMeasure {
    fn name(self) -> &'static str {
        match self {
            Self::PureAvg => "pure-avg",
            Self::MixedAvg => "mixed-avg",
            Self::CrPureAvg => "cr-pure-avg",
            Self::CrMixedAvg => "cr-mixed-avg",
            Self::Max => "max",
            Self::SubspaceDim => "subspace-dim",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Pure,
    Mixed,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Pure => Ensemble::Pure,
            EnsembleArg::Mixed => Ensemble::Mixed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Skew,
    RelEnt,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Skew => Measure::Skew,
            MeasureArg::RelEnt => Measure::RelativeEntropy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleEnsemble {
    Pure,
    Mixed,
    Unitary,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Oracles,
    Invariants,
    All,
}

fn parse_dim(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("'{s}' is not a positive integer"))?;
    if n == 0 {
        return Err("dimension must be at least 1".into());
    }
    Ok(n)
}

fn parse_samples(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("'{s}' is not an integer"))?;
    if n < 2 {
        return Err("at least 2 samples are required".into());
    }
    Ok(n)
}

fn parse_positive_usize(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("'{s}' is not a positive integer"))?;
    if n == 0 {
        return Err("must be at least 1".into());
    }
    Ok(n)
}

fn parse_max_exp(s: &str) -> Result<u32, String> {
    let m: u32 = s.parse().map_err(|_| format!("'{s}' is not a positive integer"))?;
    if !(1..=16).contains(&m) {
        return Err("must be between 1 and 16".into());
    }
    Ok(m)
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let e: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !e.is_finite() || e <= 0.0 {
        return Err(format!("{s} is not a finite positive number"));
    }
    Ok(e)
}

#[derive(clap::Args)]
struct ThreadArgs {
    /// Worker threads for Monte Carlo runs (results do not depend on it).
    #[arg(long, env = "HAAR_COHERENCE_THREADS", value_parser = parse_positive_usize)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct ClosedFormArgs {
    /// Hilbert space dimension N.
    #[arg(long = "dim", value_parser = parse_dim)]
    dim: usize,
    #[arg(long, value_enum)]
    measure: ClosedFormMeasure,
    /// Required for subspace-dim; must lie in (0, 1/N).
    #[arg(long, value_parser = parse_epsilon)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(clap::Args)]
struct McArgs {
    #[arg(long, value_enum)]
    ensemble: EnsembleArg,
    /// Hilbert space dimension N.
    #[arg(long = "dim", value_parser = parse_dim)]
    dim: usize,
    #[arg(long, default_value_t = 100_000, value_parser = parse_samples)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "skew")]
    measure: MeasureArg,
    /// Samples per chunk; each chunk has its own random stream.
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE, value_parser = parse_positive_usize)]
    chunk: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(clap::Args)]
struct TailArgs {
    #[arg(long, value_enum)]
    ensemble: EnsembleArg,
    /// Hilbert space dimension N.
    #[arg(long = "dim", value_parser = parse_dim)]
    dim: usize,
    #[arg(long, value_parser = parse_epsilon)]
    epsilon: f64,
    #[arg(long, default_value_t = 100_000, value_parser = parse_samples)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE, value_parser = parse_positive_usize)]
    chunk: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(clap::Args)]
struct Figure1Args {
    /// Largest exponent m; rows are N = 2, 4, ..., 2^m.
    #[arg(long = "max-exp", value_parser = parse_max_exp)]
    max_exp: u32,
    #[arg(long, default_value_t = 100_000, value_parser = parse_samples)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// CSV output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG chart path.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(clap::Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    ensemble: SampleEnsemble,
    /// Hilbert space dimension N.
    #[arg(long = "dim", value_parser = parse_dim)]
    dim: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Only JSON is supported.
    #[arg(long, default_value = "json", value_parser = ["json"])]
    format: String,
}

/// Failure of a subcommand, mapped onto the exit code.
enum Failure {
    Usage(String),
    Verification,
}

impl From<haar_coherence::Error> for Failure {
    fn from(e: haar_coherence::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn stdout_records<R: output::Record>(format: Format, records: &[R]) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    write_records(&mut lock, format, records)?;
    lock.flush()?;
    Ok(())
}

fn cmd_closed_form(args: ClosedFormArgs) -> Result<(), Failure> {
    let n = args.dim;
    if args.epsilon.is_some() != matches!(args.measure, ClosedFormMeasure::SubspaceDim) {
        return Err(Failure::Usage(
            "--epsilon is required for, and only accepted with, --measure subspace-dim".into(),
        ));
    }
    let value = match args.measure {
        ClosedFormMeasure::PureAvg => avg_coherence_pure(n),
        ClosedFormMeasure::MixedAvg => avg_coherence_mixed(n)?,
        ClosedFormMeasure::CrPureAvg => avg_cr_pure(n),
        ClosedFormMeasure::CrMixedAvg => avg_cr_mixed(n),
        ClosedFormMeasure::Max => max_coherence(n),
        ClosedFormMeasure::SubspaceDim => {
            let eps = args.epsilon.expect("checked above");
            coherent_subspace_dim(n, eps)? as f64
        }
    };
    stdout_records(
        args.format,
        &[ClosedFormRecord {
            measure: args.measure.name().to_string(),
            n,
            value,
        }],
    )
}

fn cmd_mc(args: McArgs) -> Result<(), Failure> {
    let config = McConfig::new(args.seed)
        .with_chunk_size(args.chunk)
        .with_threads(args.threads.threads);
    let ensemble: Ensemble = args.ensemble.into();
    let measure: Measure = args.measure.into();
    let est = estimate_average(ensemble, args.dim, args.samples, measure, &config)?;
    stdout_records(
        args.format,
        &[McRecord {
            ensemble: ensemble.as_str(),
            n: args.dim,
            measure: measure.as_str(),
            mean: est.mean,
            stderr: est.stderr,
            samples: est.n_samples,
            seed: args.seed,
        }],
    )
}

fn cmd_tail(args: TailArgs) -> Result<(), Failure> {
    let config = McConfig::new(args.seed)
        .with_chunk_size(args.chunk)
        .with_threads(args.threads.threads);
    let ensemble: Ensemble = args.ensemble.into();
    let t = estimate_tail(ensemble, args.dim, args.epsilon, args.samples, &config)?;
    stdout_records(
        args.format,
        &[TailRecord {
            ensemble: ensemble.as_str(),
            n: args.dim,
            epsilon: t.epsilon,
            frequency: t.frequency,
            bound: t.bound,
            samples: t.n_samples,
            seed: args.seed,
        }],
    )
}

fn create_file(path: &PathBuf) -> Result<fs::File, Failure> {
    fs::File::create(path).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_figure1(args: Figure1Args) -> Result<(), Failure> {
    // Open outputs first so an unwritable path fails before the sweep runs.
    let mut csv = create_file(&args.out)?;
    let mut svg_file = args.svg.as_ref().map(create_file).transpose()?;
    let config = McConfig::new(args.seed).with_threads(args.threads.threads);
    let rows = figure1_sweep(args.max_exp, args.samples, &config)?;
    let records: Vec<Figure1Record> = rows
        .iter()
        .map(|r| Figure1Record {
            n: r.n,
            analytic: r.analytic,
            mc_mean: r.mc_mean,
            mc_stderr: r.mc_stderr,
            n_samples: r.n_samples,
            seed: r.seed,
        })
        .collect();
    write_records(&mut csv, Format::Csv, &records)?;
    if let Some(file) = svg_file.as_mut() {
        file.write_all(svg::figure1_svg(&rows).as_bytes())?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let suite = match args.suite {
        SuiteArg::Oracles => Suite::Oracles,
        SuiteArg::Invariants => Suite::Invariants,
        SuiteArg::All => Suite::All,
    };
    let outcomes = run_suite(suite, args.seed, args.threads.threads);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} checks, {} passed, {} failed", outcomes.len(), outcomes.len() - failed, failed);
    if all_passed(&outcomes) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn matrix_record(ensemble: &'static str, dim: usize, seed: u64, m: &ComplexMatrix) -> SampleRecord {
    let (rows, cols) = m.shape();
    let mut re = Vec::with_capacity(rows * cols);
    let mut im = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            re.push(m[(i, j)].re);
            im.push(m[(i, j)].im);
        }
    }
    SampleRecord { ensemble, dim, seed, rows, cols, re, im }
}

fn cmd_sample(args: SampleArgs) -> Result<(), Failure> {
    let mut rng = RngStream::new(args.seed, 0);
    let n = args.dim;
    let record = match args.ensemble {
        SampleEnsemble::Pure => {
            let psi = sample_haar_pure(&mut rng, n);
            SampleRecord {
                ensemble: "pure",
                dim: n,
                seed: args.seed,
                rows: n,
                cols: 1,
                re: psi.amplitudes().iter().map(|z| z.re).collect(),
                im: psi.amplitudes().iter().map(|z| z.im).collect(),
            }
        }
        SampleEnsemble::Mixed => matrix_record("mixed", n, args.seed, sample_hs_mixed(&mut rng, n).as_matrix()),
        SampleEnsemble::Unitary => matrix_record("unitary", n, args.seed, &sample_haar_unitary(&mut rng, n)),
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    serde_json::to_writer(&mut lock, &record).map_err(io::Error::from)?;
    writeln!(lock)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ClosedForm(a) => cmd_closed_form(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Tail(a) => cmd_tail(a),
        Command::Figure1(a) => cmd_figure1(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sample(a) => cmd_sample(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
