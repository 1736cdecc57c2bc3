//! Merge scheduling: balanced binary trees over fixed-size blocks of seed
//! profiles, with block results folded left to right.

use std::sync::Mutex;

use thiserror::Error;

use crate::profile::{align_profiles, Profile, ProfileError};
use crate::scoring::ScoringScheme;

pub const DEFAULT_BLOCK_SIZE: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MergeError {
    #[error("nothing to merge")]
    ZeroProfiles,
    #[error("block size must be at least 1")]
    ZeroBlockSize,
    #[error("plan expects {expected} profiles, got {got}")]
    PlanMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Binary merge tree over leaf indices into the guide-ordered profile list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergeTree {
    Leaf(usize),
    Node(Box<MergeTree>, Box<MergeTree>),
}

impl MergeTree {
    /// Balanced tree over `leaves`; the left subtree takes the larger half.
    pub fn balanced(leaves: &[usize]) -> MergeTree {
        assert!(!leaves.is_empty(), "tree needs at least one leaf");
        if leaves.len() == 1 {
            return MergeTree::Leaf(leaves[0]);
        }
        let mid = leaves.len().div_ceil(2);
        MergeTree::Node(
            Box::new(Self::balanced(&leaves[..mid])),
            Box::new(Self::balanced(&leaves[mid..])),
        )
    }

    pub fn depth(&self) -> usize {
        match self {
            MergeTree::Leaf(_) => 0,
            MergeTree::Node(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Leaf indices left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    /// Leaf depths left to right.
    pub fn leaf_depths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_depths(&mut out, 0);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            MergeTree::Leaf(i) => out.push(*i),
            MergeTree::Node(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    fn collect_depths(&self, out: &mut Vec<usize>, d: usize) {
        match self {
            MergeTree::Leaf(_) => out.push(d),
            MergeTree::Node(l, r) => {
                l.collect_depths(out, d + 1);
                r.collect_depths(out, d + 1);
            }
        }
    }

    pub fn internal_nodes(&self) -> usize {
        match self {
            MergeTree::Leaf(_) => 0,
            MergeTree::Node(l, r) => 1 + l.internal_nodes() + r.internal_nodes(),
        }
    }
}

impl std::fmt::Display for MergeTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MergeTree::Leaf(i) => write!(f, "P{i}"),
            MergeTree::Node(l, r) => write!(f, "({l},{r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergePlan {
    pub blocks: Vec<Vec<usize>>,
    pub block_size: usize,
    pub trees: Vec<MergeTree>,
}

impl MergePlan {
    pub fn leaf_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Total pairwise profile merges the plan performs.
    pub fn merge_count(&self) -> usize {
        let within: usize = self.trees.iter().map(MergeTree::internal_nodes).sum();
        within + self.trees.len().saturating_sub(1)
    }
}

pub fn plan_merge(num_profiles: usize, block_size: usize) -> Result<MergePlan, MergeError> {
    if num_profiles == 0 {
        return Err(MergeError::ZeroProfiles);
    }
    if block_size == 0 {
        return Err(MergeError::ZeroBlockSize);
    }
    let all: Vec<usize> = (0..num_profiles).collect();
    let blocks: Vec<Vec<usize>> = all.chunks(block_size).map(<[usize]>::to_vec).collect();
    let trees = blocks.iter().map(|b| MergeTree::balanced(b)).collect();
    Ok(MergePlan {
        blocks,
        block_size,
        trees,
    })
}

/// Runs the plan with [`align_profiles`] as the merge step.
pub fn execute_merge(
    plan: &MergePlan,
    profiles: Vec<Profile>,
    scheme: &ScoringScheme,
) -> Result<Profile, MergeError> {
    execute_merge_with(plan, profiles, |x, y| align_profiles(x, y, scheme))
}

/// Runs the plan with an arbitrary merge step.
///
/// Sibling subtrees are evaluated with `rayon::join`; block results are then
/// folded left to right. Operand pairs are fixed by the plan, so the result
/// does not depend on how the pool schedules the work.
pub fn execute_merge_with<T, F>(plan: &MergePlan, items: Vec<T>, merge: F) -> Result<T, MergeError>
where
    T: Send,
    F: Fn(&T, &T) -> Result<T, ProfileError> + Sync,
{
    if items.len() != plan.leaf_count() {
        return Err(MergeError::PlanMismatch {
            expected: plan.leaf_count(),
            got: items.len(),
        });
    }
    if items.is_empty() {
        return Err(MergeError::ZeroProfiles);
    }
    let slots: Vec<Mutex<Option<T>>> = items.into_iter().map(|p| Mutex::new(Some(p))).collect();

    let mut acc: Option<T> = None;
    for tree in &plan.trees {
        let block = reduce_tree(tree, &slots, &merge)?;
        acc = Some(match acc {
            None => block,
            Some(prev) => merge(&prev, &block)?,
        });
    }
    acc.ok_or(MergeError::ZeroProfiles)
}

fn reduce_tree<T, F>(
    tree: &MergeTree,
    slots: &[Mutex<Option<T>>],
    merge: &F,
) -> Result<T, MergeError>
where
    T: Send,
    F: Fn(&T, &T) -> Result<T, ProfileError> + Sync,
{
    match tree {
        MergeTree::Leaf(i) => {
            let taken = slots
                .get(*i)
                .and_then(|s| s.lock().expect("slot lock poisoned").take());
            taken.ok_or(MergeError::PlanMismatch {
                expected: *i + 1,
                got: slots.len(),
            })
        }
        MergeTree::Node(l, r) => {
            let (left, right) = rayon::join(
                || reduce_tree(l, slots, merge),
                || reduce_tree(r, slots, merge),
            );
            Ok(merge(&left?, &right?)?)
        }
    }
}
