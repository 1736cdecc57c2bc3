//! End-to-end orchestration: overlap placement, ordering, pairing, profile
//! merging, output and the run report.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::fasta::{parse_fasta, FastaError};
use crate::merge::{execute_merge, plan_merge, MergeError, DEFAULT_BLOCK_SIZE};
use crate::output::{write_alignment, OutputFormat};
use crate::pairwise::{build_overlap_index, AlignError, OverlapIndex};
use crate::placement::{align_pairs, order_reads, pair_adjacent, GuideOrder, PlacementError, Seed};
use crate::profile::{align_profiles, build_profile, Profile, ProfileError};
use crate::scoring::{
    load_matrix_file, Score, ScoringError, ScoringScheme, DEFAULT_GAP_EXTEND, DEFAULT_GAP_OPEN,
    DEFAULT_MATCH, DEFAULT_MISMATCH,
};
use crate::seq::{AlignedSequence, Alphabet, Read, Sequence};
use crate::simulate::SimulationError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Fasta(#[from] FastaError),
    #[error("{path}: {source}")]
    Input { path: String, source: FastaError },
    #[error("no reads to align")]
    EmptyReads,
    #[error("reference file holds {0} records, expected exactly one")]
    ReferenceCount(usize),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Merge(#[from] MergeError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
}

impl PipelineError {
    /// Whether the failure stems from bad parameters rather than bad data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            PipelineError::InvalidConfig(_)
                | PipelineError::Scoring(ScoringError::InvalidScores { .. })
                | PipelineError::Scoring(ScoringError::InvalidGapPenalties { .. })
                | PipelineError::Simulation(SimulationError::InvalidRate { .. })
                | PipelineError::Simulation(SimulationError::ZeroLength)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoringConfig {
    pub match_score: Score,
    pub mismatch_score: Score,
    pub gap_open: Score,
    pub gap_extend: Score,
    pub matrix_path: Option<PathBuf>,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            match_score: DEFAULT_MATCH,
            mismatch_score: DEFAULT_MISMATCH,
            gap_open: DEFAULT_GAP_OPEN,
            gap_extend: DEFAULT_GAP_EXTEND,
            matrix_path: None,
        }
    }
}

impl ScoringConfig {
    pub fn build(&self) -> Result<ScoringScheme, PipelineError> {
        let scheme = match &self.matrix_path {
            Some(p) => {
                let (alphabet, matrix) = load_matrix_file(p)?;
                ScoringScheme::from_matrix(alphabet, matrix)?
            }
            None => crate::scoring::simple_dna_model(self.match_score, self.mismatch_score)?,
        };
        Ok(scheme.with_gaps(self.gap_open, self.gap_extend)?)
    }
}

/// In-memory pipeline settings.
#[derive(Debug, Clone)]
pub struct AlignOptions {
    pub scheme: ScoringScheme,
    pub block_size: usize,
    pub workers: usize,
    pub include_reference: bool,
}

impl Default for AlignOptions {
    fn default() -> Self {
        Self {
            scheme: ScoringScheme::default(),
            block_size: DEFAULT_BLOCK_SIZE,
            workers: default_workers(),
            include_reference: false,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub reference_path: PathBuf,
    pub reads_path: PathBuf,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
    pub scoring: ScoringConfig,
    pub block_size: usize,
    pub worker_count: usize,
    pub report_path: Option<PathBuf>,
    pub include_reference: bool,
}

impl PipelineConfig {
    pub fn new(
        reference: impl Into<PathBuf>,
        reads: impl Into<PathBuf>,
        output: impl Into<PathBuf>,
    ) -> Self {
        Self {
            reference_path: reference.into(),
            reads_path: reads.into(),
            output_path: output.into(),
            output_format: OutputFormat::AlignedFasta,
            scoring: ScoringConfig::default(),
            block_size: DEFAULT_BLOCK_SIZE,
            worker_count: default_workers(),
            report_path: None,
            include_reference: false,
        }
    }
}

/// Flat key-value run summary, serialized as JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub read_count: usize,
    pub reference_length: usize,
    pub worker_count: usize,
    pub block_size: usize,
    pub overlap_seconds: f64,
    pub ordering_seconds: f64,
    pub pairing_seconds: f64,
    pub merging_seconds: f64,
    pub total_seconds: f64,
    pub unplaceable_reads: Vec<String>,
    pub seed_profiles: usize,
    pub merge_blocks: usize,
    pub profile_merges: usize,
    pub alignment_rows: usize,
    pub alignment_width: usize,
    pub overlap_score_min: Score,
    pub overlap_score_max: Score,
    pub overlap_score_mean: Score,
    pub pair_score_min: Score,
    pub pair_score_max: Score,
    pub pair_score_mean: Score,
    pub sum_of_pairs: Score,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub msa: Profile,
    pub index: OverlapIndex,
    pub order: GuideOrder,
    pub report: RunReport,
}

impl PipelineOutput {
    pub fn rows(&self) -> &[AlignedSequence] {
        self.msa.members()
    }
}

fn stats(values: impl Iterator<Item = Score>) -> (Score, Score, Score) {
    let (mut min, mut max, mut sum, mut n) = (Score::INFINITY, Score::NEG_INFINITY, 0.0, 0usize);
    for v in values {
        min = min.min(v);
        max = max.max(v);
        sum += v;
        n += 1;
    }
    if n == 0 {
        (0.0, 0.0, 0.0)
    } else {
        (min, max, sum / n as f64)
    }
}

/// Runs every stage on in-memory inputs.
///
/// Work fans out on a dedicated pool of `workers` threads; every collection
/// point restores a fixed order, so output is identical for any worker count.
pub fn align_reads(
    reference: &Sequence,
    reads: Vec<Read>,
    opts: &AlignOptions,
) -> Result<PipelineOutput, PipelineError> {
    if reads.is_empty() {
        return Err(PipelineError::EmptyReads);
    }
    if opts.block_size == 0 {
        return Err(PipelineError::InvalidConfig(
            "block size must be at least 1".into(),
        ));
    }
    if opts.workers == 0 {
        return Err(PipelineError::InvalidConfig(
            "worker count must be at least 1".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
    pool.install(|| run_stages(reference, reads, opts))
}

fn run_stages(
    reference: &Sequence,
    reads: Vec<Read>,
    opts: &AlignOptions,
) -> Result<PipelineOutput, PipelineError> {
    let scheme = &opts.scheme;
    let alphabet = scheme.alphabet();
    let total = Instant::now();

    let t = Instant::now();
    let index = build_overlap_index(&reads, reference, scheme)?;
    let overlap_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let order = order_reads(&index)?;
    let ordering_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let pairing = pair_adjacent(&order)?;
    let by_id: HashMap<String, Sequence> = reads
        .iter()
        .map(|r| (r.id().to_string(), r.sequence.clone()))
        .collect();
    let seeds = align_pairs(&pairing, &by_id, scheme)?;
    let pairing_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mut profiles = Vec::with_capacity(seeds.len());
    for seed in &seeds {
        let offset = seed
            .ids()
            .iter()
            .filter_map(|id| index.get(id).map(|r| r.start))
            .min()
            .unwrap_or(0);
        let rows = match seed {
            Seed::Pair(p) => vec![p.row_a.clone(), p.row_b.clone()],
            Seed::Single(r) => vec![r.clone()],
        };
        let mut profile = build_profile(rows, alphabet)?;
        profile.pad_left(offset);
        profiles.push(profile);
    }
    let plan = plan_merge(profiles.len(), opts.block_size)?;
    let mut msa = execute_merge(&plan, profiles, scheme)?;
    let mut profile_merges = plan.merge_count();
    if opts.include_reference {
        let ref_profile = build_profile(vec![AlignedSequence::from_sequence(reference)], alphabet)?;
        msa = align_profiles(&ref_profile, &msa, scheme)?;
        profile_merges += 1;
    }
    let merging_seconds = t.elapsed().as_secs_f64();

    let (o_min, o_max, o_mean) = stats(index.iter().map(|r| r.score));
    let (p_min, p_max, p_mean) = stats(seeds.iter().filter_map(|s| match s {
        Seed::Pair(p) => Some(p.score),
        Seed::Single(_) => None,
    }));
    let report = RunReport {
        read_count: reads.len(),
        reference_length: reference.len(),
        worker_count: opts.workers,
        block_size: opts.block_size,
        overlap_seconds,
        ordering_seconds,
        pairing_seconds,
        merging_seconds,
        total_seconds: total.elapsed().as_secs_f64(),
        unplaceable_reads: order
            .ordered_read_ids
            .iter()
            .filter(|id| index.get(id).is_some_and(|r| r.score <= 0.0))
            .cloned()
            .collect(),
        seed_profiles: seeds.len(),
        merge_blocks: plan.blocks.len(),
        profile_merges,
        alignment_rows: msa.weight(),
        alignment_width: msa.width(),
        overlap_score_min: o_min,
        overlap_score_max: o_max,
        overlap_score_mean: o_mean,
        pair_score_min: p_min,
        pair_score_max: p_max,
        pair_score_mean: p_mean,
        sum_of_pairs: msa.sum_of_pairs(scheme),
    };
    Ok(PipelineOutput {
        msa,
        index,
        order,
        report,
    })
}

fn io_error(path: &std::path::Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Reads inputs, aligns, and writes the alignment plus the optional report.
/// [`parse_fasta`] with the file name attached to parse errors.
pub fn read_fasta(path: &Path, alphabet: &Alphabet) -> Result<Vec<Sequence>, PipelineError> {
    parse_fasta(path, alphabet).map_err(|e| match e {
        FastaError::Io { .. } => PipelineError::Fasta(e),
        other => PipelineError::Input {
            path: path.display().to_string(),
            source: other,
        },
    })
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    if config.block_size == 0 {
        return Err(PipelineError::InvalidConfig(
            "block size must be at least 1".into(),
        ));
    }
    if config.worker_count == 0 {
        return Err(PipelineError::InvalidConfig(
            "worker count must be at least 1".into(),
        ));
    }
    let scheme = config.scoring.build()?;
    let alphabet = scheme.alphabet().clone();

    let mut refs = read_fasta(&config.reference_path, &alphabet)?;
    if refs.len() != 1 {
        return Err(PipelineError::ReferenceCount(refs.len()));
    }
    let reference = refs.remove(0);
    let reads = Read::from_sequences(read_fasta(&config.reads_path, &alphabet)?);

    let opts = AlignOptions {
        scheme,
        block_size: config.block_size,
        workers: config.worker_count,
        include_reference: config.include_reference,
    };
    let out = align_reads(&reference, reads, &opts)?;

    write_alignment(out.rows(), config.output_format, &config.output_path)
        .map_err(|e| io_error(&config.output_path, e))?;
    if let Some(path) = &config.report_path {
        std::fs::write(path, out.report.to_json() + "\n").map_err(|e| io_error(path, e))?;
    }
    Ok(out.report)
}
