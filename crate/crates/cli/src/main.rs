use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};

use pyralign_core::bench::{benchmark, BenchConfig};
use pyralign_core::fasta::write_sequences;
use pyralign_core::pipeline::{default_workers, read_fasta};
use pyralign_core::simulate::{simulate_reads, write_truth_file, SimulationConfig};
use pyralign_core::{
    run_pipeline, AlignOptions, Alphabet, OutputFormat, PipelineConfig, PipelineError,
    ScoringConfig, Sequence, DEFAULT_BLOCK_SIZE,
};

/// Reference-guided multiple alignment of short sequencing reads.
#[derive(Debug, Parser)]
#[command(name = "pyralign", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Align reads against a reference into one multiple alignment.
    Align(AlignArgs),
    /// Draw reads from a reference with substitution and indel errors.
    Simulate(SimulateArgs),
    /// Time each pipeline stage over a grid of read counts.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct ScoringArgs {
    #[arg(long = "match", default_value_t = 2.0, allow_hyphen_values = true)]
    match_score: f64,
    #[arg(long = "mismatch", default_value_t = -3.0, allow_hyphen_values = true)]
    mismatch_score: f64,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    gap_open: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    gap_extend: f64,
    /// Square substitution matrix; overrides --match and --mismatch.
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
}

impl ScoringArgs {
    fn config(&self) -> ScoringConfig {
        ScoringConfig {
            match_score: self.match_score,
            mismatch_score: self.mismatch_score,
            gap_open: self.gap_open,
            gap_extend: self.gap_extend,
            matrix_path: self.matrix.clone(),
        }
    }
}

#[derive(Debug, Args)]
struct AlignArgs {
    #[arg(long, value_name = "FASTA")]
    reference: PathBuf,
    #[arg(long, value_name = "FASTA")]
    reads: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// aligned-fasta or clustal.
    #[arg(long, default_value = "aligned-fasta")]
    format: OutputFormat,
    #[command(flatten)]
    scoring: ScoringArgs,
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    block_size: usize,
    /// Defaults to the number of available cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Write the run report as JSON.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Add the reference as the first row of the alignment.
    #[arg(long)]
    include_reference: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_name = "FASTA")]
    reference: PathBuf,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    length: usize,
    #[arg(long, default_value_t = 0.0)]
    sub_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    indel_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FASTA")]
    out: PathBuf,
    /// Tab-separated read id and true start, one line per read.
    #[arg(long, value_name = "TSV")]
    truth: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_name = "FASTA")]
    reference: PathBuf,
    /// Comma-separated read counts.
    #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000")]
    grid: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    length: usize,
    #[arg(long, default_value_t = 0.01)]
    sub_rate: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    block_size: usize,
    #[arg(long)]
    workers: Option<usize>,
}

/// A failure plus the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 1,
            error: error.into(),
        }
    }

    fn data(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 2,
            error: error.into(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        if e.is_usage() {
            Failure::usage(e)
        } else {
            Failure::data(e)
        }
    }
}

fn workers(requested: Option<usize>) -> Result<usize, Failure> {
    match requested {
        Some(0) => Err(Failure::usage(anyhow!("--workers must be at least 1"))),
        Some(n) => Ok(n),
        None => Ok(default_workers()),
    }
}

fn single_reference(path: &Path, alphabet: &Alphabet) -> Result<Sequence, Failure> {
    let mut refs = read_fasta(path, alphabet).map_err(Failure::data)?;
    if refs.len() != 1 {
        return Err(Failure::data(PipelineError::ReferenceCount(refs.len())));
    }
    Ok(refs.remove(0))
}

fn align(args: AlignArgs) -> Result<(), Failure> {
    let config = PipelineConfig {
        reference_path: args.reference,
        reads_path: args.reads,
        output_path: args.out,
        output_format: args.format,
        scoring: args.scoring.config(),
        block_size: args.block_size,
        worker_count: workers(args.workers)?,
        report_path: args.report,
        include_reference: args.include_reference,
    };
    let report = run_pipeline(&config)?;
    if !report.unplaceable_reads.is_empty() {
        eprintln!(
            "pyralign: warning: {} read(s) have no positive-scoring placement",
            report.unplaceable_reads.len()
        );
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let alphabet = Alphabet::dna();
    let reference = single_reference(&args.reference, &alphabet)?;
    let config = SimulationConfig {
        count: args.count,
        read_length: args.length,
        substitution_rate: args.sub_rate,
        indel_rate: args.indel_rate,
        seed: args.seed,
    };
    let sim = simulate_reads(&reference, &alphabet, &config).map_err(PipelineError::from)?;
    let reads: Vec<Sequence> = sim.reads.into_iter().map(|r| r.sequence).collect();
    write_sequences(&args.out, &reads).map_err(Failure::data)?;
    write_truth_file(&args.truth, &sim.truth)
        .map_err(|e| Failure::data(anyhow!("{}: {e}", args.truth.display())))?;
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    if args.grid.is_empty() {
        return Err(Failure::usage(anyhow!(
            "--grid needs at least one read count"
        )));
    }
    if args.block_size == 0 {
        return Err(Failure::usage(anyhow!("--block-size must be at least 1")));
    }
    let options = AlignOptions {
        block_size: args.block_size,
        workers: workers(args.workers)?,
        ..AlignOptions::default()
    };
    let reference = single_reference(&args.reference, options.scheme.alphabet())?;
    let config = BenchConfig {
        grid: args.grid,
        read_length: args.length,
        substitution_rate: args.sub_rate,
        seed: args.seed,
        repeats: args.repeats,
        options,
        ..BenchConfig::default()
    };
    let table = benchmark(&reference, &config)?;
    print!("{}", table.render());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Align(a) => align(a),
        Command::Simulate(a) => simulate(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pyralign: error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
