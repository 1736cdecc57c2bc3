//! Position-based read ordering and adjacent pairing.
//!
//! Reads are ordered by where they landed on the reference instead of by a
//! pairwise distance matrix and guide tree, then neighbours in that order are
//! paired and locally aligned.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::pairwise::{local_align, AlignError, OverlapIndex, PairwiseAlignment};
use crate::scoring::ScoringScheme;
use crate::seq::{AlignedSequence, Sequence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlacementError {
    #[error("overlap index is empty")]
    EmptyIndex,
    #[error("guide order is empty")]
    EmptyOrder,
    #[error("unknown read id {0}")]
    UnknownReadId(String),
    #[error(transparent)]
    Align(#[from] AlignError),
}

/// Read ids sorted by (start, end, source_index) on the reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuideOrder {
    pub ordered_read_ids: Vec<String>,
}

impl GuideOrder {
    pub fn len(&self) -> usize {
        self.ordered_read_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered_read_ids.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadPairing {
    pub pairs: Vec<(String, String)>,
    pub singleton: Option<String>,
}

/// Starting material for one leaf of the merge: an aligned pair, or the odd
/// read out as a single row.
#[derive(Debug, Clone, PartialEq)]
pub enum Seed {
    Pair(PairwiseAlignment),
    Single(AlignedSequence),
}

impl Seed {
    pub fn ids(&self) -> Vec<&str> {
        match self {
            Seed::Pair(p) => vec![p.row_a.id.as_str(), p.row_b.id.as_str()],
            Seed::Single(r) => vec![r.id.as_str()],
        }
    }
}

pub fn order_reads(index: &OverlapIndex) -> Result<GuideOrder, PlacementError> {
    if index.is_empty() {
        return Err(PlacementError::EmptyIndex);
    }
    let mut recs: Vec<_> = index.iter().collect();
    recs.sort_unstable_by_key(|r| (r.start, r.end, r.source_index));
    Ok(GuideOrder {
        ordered_read_ids: recs.into_iter().map(|r| r.read_id.clone()).collect(),
    })
}

pub fn pair_adjacent(order: &GuideOrder) -> Result<ReadPairing, PlacementError> {
    if order.is_empty() {
        return Err(PlacementError::EmptyOrder);
    }
    let chunks = order.ordered_read_ids.chunks_exact(2);
    let singleton = chunks.remainder().first().cloned();
    let pairs = chunks.map(|c| (c[0].clone(), c[1].clone())).collect();
    Ok(ReadPairing { pairs, singleton })
}

/// Locally aligns every pair; output follows pairing order with the
/// singleton, if any, last.
pub fn align_pairs(
    pairing: &ReadPairing,
    reads: &HashMap<String, Sequence>,
    scheme: &ScoringScheme,
) -> Result<Vec<Seed>, PlacementError> {
    let lookup = |id: &String| {
        reads
            .get(id)
            .ok_or_else(|| PlacementError::UnknownReadId(id.clone()))
    };
    // resolve everything up front so an unknown id fails before any DP work
    let resolved = pairing
        .pairs
        .iter()
        .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
        .collect::<Result<Vec<_>, PlacementError>>()?;
    let single = pairing.singleton.as_ref().map(lookup).transpose()?;

    let mut seeds = resolved
        .par_iter()
        .map(|(a, b)| local_align(a, b, scheme).map(Seed::Pair))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(s) = single {
        seeds.push(Seed::Single(AlignedSequence::from_sequence(s)));
    }
    Ok(seeds)
}
