//! Reference-guided multiple alignment for large sets of short reads.
//!
//! Each read is overlap-aligned to a reference to fix its position, reads are
//! ordered by that position and paired with their neighbour, pairs are
//! locally aligned, and the resulting profiles are merged under a profile
//! sum-of-pairs score following balanced binary trees over blocks of at most
//! 100 profiles.
//!
//! ```
//! use pyralign_core::{align_reads, validate_sequence, AlignOptions, Alphabet, Read};
//!
//! let dna = Alphabet::dna();
//! let reference = validate_sequence("ref", "ACGTTGCAAGCTAGCTTACG", &dna).unwrap();
//! let reads = Read::from_sequences(vec![
//!     validate_sequence("a", "ACGTTGCA", &dna).unwrap(),
//!     validate_sequence("b", "GCTAGCTT", &dna).unwrap(),
//! ]);
//! let out = align_reads(&reference, reads, &AlignOptions::default()).unwrap();
//! assert_eq!(out.rows().len(), 2);
//! ```

pub mod bench;
pub mod fasta;
pub mod merge;
pub mod output;
pub mod pairwise;
pub mod pipeline;
pub mod placement;
pub mod profile;
pub mod scoring;
pub mod seq;
pub mod simulate;

pub use merge::{
    execute_merge, execute_merge_with, plan_merge, MergeError, MergePlan, MergeTree,
    DEFAULT_BLOCK_SIZE,
};
pub use output::{render_alignment, write_alignment, OutputFormat};
pub use pairwise::{
    build_overlap_index, local_align, overlap_align, AlignError, OverlapIndex, OverlapRecord,
    PairwiseAlignment,
};
pub use pipeline::{
    align_reads, run_pipeline, AlignOptions, PipelineConfig, PipelineError, RunReport,
    ScoringConfig,
};
pub use placement::{align_pairs, order_reads, pair_adjacent, GuideOrder, ReadPairing, Seed};
pub use profile::{
    align_profiles, build_profile, profile_of_pairwise, Profile, ProfileColumn, ProfileError,
};
pub use scoring::{
    log_odds_from_probabilities, psp_score, simple_dna_model, Score, ScoreMatrix, ScoringError,
    ScoringScheme, SubstitutionModel,
};
pub use seq::{strip_gaps, validate_sequence, AlignedSequence, Alphabet, Read, SeqError, Sequence};
