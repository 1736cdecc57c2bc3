//! Pairwise dynamic-programming kernels.
//!
//! * [`overlap_align`]: semi-global alignment of a read against the reference.
//!   The first row and column are zero, so gaps before the first residue of
//!   either sequence are free; the optimum is the best cell on the last row or
//!   last column, so trailing gaps are free as well.
//! * [`local_align`]: Smith-Waterman alignment between two reads.
//!
//! Both kernels use a linear gap cost and break ties as diagonal, then up
//! (consume a residue of the row sequence against a gap), then left.

use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use thiserror::Error;

use crate::scoring::{CodeTable, Score, ScoringScheme};
use crate::seq::{AlignedSequence, Read, Sequence, GAP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlignError {
    #[error("empty input")]
    EmptyInput,
    #[error("read {id}: {source}")]
    Read {
        id: String,
        #[source]
        source: Box<AlignError>,
    },
    #[error("duplicate read id {0}")]
    DuplicateReadId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Move {
    Stop = 0,
    Diag = 1,
    Up = 2,
    Left = 3,
}

impl Move {
    #[inline]
    fn from_u8(v: u8) -> Move {
        match v {
            1 => Move::Diag,
            2 => Move::Up,
            3 => Move::Left,
            _ => Move::Stop,
        }
    }
}

/// Score and traceback grids of one DP fill, `(m+1) x (n+1)` for a row
/// sequence of length `m` and a column sequence of length `n`.
#[derive(Debug, Clone)]
pub struct DpMatrix {
    rows: usize,
    cols: usize,
    scores: Vec<Score>,
    moves: Vec<u8>,
}

impl DpMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn score(&self, i: usize, j: usize) -> Score {
        self.scores[i * self.cols + j]
    }

    pub fn mv(&self, i: usize, j: usize) -> Move {
        Move::from_u8(self.moves[i * self.cols + j])
    }
}

/// Placement of one read on the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapRecord {
    pub read_id: String,
    pub source_index: usize,
    /// Reference offset of the read's first aligned residue.
    pub start: usize,
    /// One past the last reference position covered by the alignment.
    pub end: usize,
    pub leading_gaps: usize,
    pub trailing_gaps: usize,
    pub score: Score,
    /// The read's row in the full semi-global alignment against the
    /// reference: leading reference overhang as gaps, the aligned core, and
    /// trailing overhangs.
    pub aligned_read: AlignedSequence,
}

/// Placement records keyed by read id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OverlapIndex {
    pub records: BTreeMap<String, OverlapRecord>,
}

impl OverlapIndex {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&OverlapRecord> {
        self.records.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &OverlapRecord> {
        self.records.values()
    }
}

/// Two equal-length rows; `core_columns` is the locally aligned segment.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseAlignment {
    pub row_a: AlignedSequence,
    pub row_b: AlignedSequence,
    pub score: Score,
    pub core_columns: Range<usize>,
    pub a_core: Range<usize>,
    pub b_core: Range<usize>,
}

impl PairwiseAlignment {
    pub fn len(&self) -> usize {
        self.row_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_a.is_empty()
    }
}

struct Traceback {
    /// (row residue, column residue) per alignment column, in order; `None`
    /// marks a gap.
    columns: Vec<(Option<usize>, Option<usize>)>,
    start: (usize, usize),
}

fn trace(moves: &[u8], cols: usize, mut i: usize, mut j: usize, stop_on_border: bool) -> Traceback {
    let mut columns = Vec::new();
    loop {
        if stop_on_border && (i == 0 || j == 0) {
            break;
        }
        match Move::from_u8(moves[i * cols + j]) {
            Move::Stop => break,
            Move::Diag => {
                columns.push((Some(i - 1), Some(j - 1)));
                i -= 1;
                j -= 1;
            }
            Move::Up => {
                columns.push((Some(i - 1), None));
                i -= 1;
            }
            Move::Left => {
                columns.push((None, Some(j - 1)));
                j -= 1;
            }
        }
    }
    columns.reverse();
    Traceback {
        columns,
        start: (i, j),
    }
}

struct OverlapFill {
    cols: usize,
    moves: Vec<u8>,
    /// Reference column where each cell's traceback meets the first row,
    /// or 0 when it meets the first column.
    origin: Vec<u32>,
    last_row: Vec<Score>,
    last_col: Vec<Score>,
    full_scores: Option<Vec<Score>>,
}

fn overlap_fill(
    x: &[u8],
    y: &[u8],
    table: &CodeTable,
    gap: Score,
    keep_scores: bool,
) -> OverlapFill {
    let (m, n) = (x.len(), y.len());
    let cols = n + 1;
    let mut moves = vec![Move::Stop as u8; (m + 1) * cols];
    let mut origin = vec![0u32; (m + 1) * cols];
    for (j, o) in origin.iter_mut().enumerate().take(cols) {
        *o = j as u32;
    }
    let mut prev = vec![0.0; cols];
    let mut cur = vec![0.0; cols];
    let mut last_col = vec![0.0; m + 1];
    let mut full = keep_scores.then(|| vec![0.0; (m + 1) * cols]);

    for i in 1..=m {
        let xi = x[i - 1];
        cur[0] = 0.0;
        let row = i * cols;
        let prow = row - cols;
        for j in 1..=n {
            let diag = prev[j - 1] + table.get(xi, y[j - 1]);
            let up = prev[j] + gap;
            let left = cur[j - 1] + gap;
            let (mut best, mut mv, mut from) = (diag, Move::Diag, prow + j - 1);
            if up > best {
                best = up;
                mv = Move::Up;
                from = prow + j;
            }
            if left > best {
                best = left;
                mv = Move::Left;
                from = row + j - 1;
            }
            cur[j] = best;
            moves[row + j] = mv as u8;
            origin[row + j] = origin[from];
        }
        last_col[i] = cur[n];
        if let Some(f) = full.as_mut() {
            f[row..row + cols].copy_from_slice(&cur);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    OverlapFill {
        cols,
        moves,
        origin,
        last_row: prev,
        last_col,
        full_scores: full,
    }
}

/// Fills the overlap DP grid of `x` (rows) against `y` (columns).
pub fn overlap_matrix(x: &Sequence, y: &Sequence, scheme: &ScoringScheme) -> DpMatrix {
    let a = scheme.alphabet();
    let fill = overlap_fill(
        &a.encode(x.residues()),
        &a.encode(y.residues()),
        &scheme.code_table(),
        scheme.gap(),
        true,
    );
    DpMatrix {
        rows: x.len() + 1,
        cols: fill.cols,
        scores: fill.full_scores.unwrap_or_default(),
        moves: fill.moves,
    }
}

/// Semi-global alignment of `read` against `reference`.
///
/// Among end cells with equal score the smallest start wins, then the
/// smallest end, then the cell covering more of the read. If every end cell
/// is negative the empty overlap is returned instead: score 0, start 0, and the
/// whole read laid out ahead of the reference.
pub fn overlap_align(
    read: &Sequence,
    reference: &Sequence,
    scheme: &ScoringScheme,
) -> Result<OverlapRecord, AlignError> {
    if read.is_empty() || reference.is_empty() {
        return Err(AlignError::EmptyInput);
    }
    let alpha = scheme.alphabet();
    let ref_codes = alpha.encode(reference.residues());
    overlap_encoded(
        read,
        0,
        &alpha.encode(read.residues()),
        &ref_codes,
        &scheme.code_table(),
        scheme.gap(),
    )
}

fn overlap_encoded(
    read: &Sequence,
    source_index: usize,
    x: &[u8],
    y: &[u8],
    table: &CodeTable,
    gap: Score,
) -> Result<OverlapRecord, AlignError> {
    let (m, n) = (x.len(), y.len());
    if m == 0 || n == 0 {
        return Err(AlignError::EmptyInput);
    }
    let fill = overlap_fill(x, y, table, gap, false);
    let cols = fill.cols;

    // (score, start, end, i, j)
    let mut best: Option<(Score, usize, usize, usize, usize)> = None;
    let mut consider = |score: Score, i: usize, j: usize, end: usize| {
        let start = fill.origin[i * cols + j] as usize;
        let better = match best {
            None => true,
            Some((bs, bstart, bend, bi, _)) => {
                score > bs
                    || (score == bs
                        && (start, end, std::cmp::Reverse(i))
                            < (bstart, bend, std::cmp::Reverse(bi)))
            }
        };
        if better {
            best = Some((score, start, end, i, j));
        }
    };
    for j in 1..=n {
        consider(fill.last_row[j], m, j, j);
    }
    for i in 1..m {
        consider(fill.last_col[i], i, n, n);
    }
    let (mut score, _, _, mut bi, mut bj) = best.expect("non-empty inputs yield a candidate");
    if score < 0.0 {
        // every overlap loses to the empty one: read entirely before the reference
        (score, bi, bj) = (0.0, m, 0);
    }

    let tb = trace(&fill.moves, cols, bi, bj, true);
    let (i0, j0) = tb.start;
    let mut start = if i0 == 0 { j0 } else { 0 };
    let mut end = bj;
    if start >= n {
        start = n - 1;
    }
    if end <= start {
        end = start + 1;
    }

    let mut cells = Vec::with_capacity(m + n);
    let res = read.residues();
    // leading: reference overhang as gaps, or read overhang as residues
    cells.extend(std::iter::repeat_n(GAP, j0));
    cells.extend_from_slice(&res[..i0]);
    for (xi, _) in &tb.columns {
        cells.push(xi.map_or(GAP, |k| res[k]));
    }
    cells.extend_from_slice(&res[bi..]);
    cells.extend(std::iter::repeat_n(GAP, n - bj));

    Ok(OverlapRecord {
        read_id: read.id().to_string(),
        source_index,
        start,
        end,
        leading_gaps: start,
        trailing_gaps: n - end,
        score,
        aligned_read: AlignedSequence::new(read.id(), cells),
    })
}

struct LocalFill {
    cols: usize,
    moves: Vec<u8>,
    scores: Vec<Score>,
    best: (Score, usize, usize),
}

fn local_fill(x: &[u8], y: &[u8], table: &CodeTable, gap: Score) -> LocalFill {
    let (m, n) = (x.len(), y.len());
    let cols = n + 1;
    let mut moves = vec![Move::Stop as u8; (m + 1) * cols];
    let mut scores = vec![0.0; (m + 1) * cols];
    let mut best = (0.0, 0, 0);
    for i in 1..=m {
        let xi = x[i - 1];
        let row = i * cols;
        let prow = row - cols;
        for j in 1..=n {
            let diag = scores[prow + j - 1] + table.get(xi, y[j - 1]);
            let up = scores[prow + j] + gap;
            let left = scores[row + j - 1] + gap;
            let (mut h, mut mv) = (diag, Move::Diag);
            if up > h {
                h = up;
                mv = Move::Up;
            }
            if left > h {
                h = left;
                mv = Move::Left;
            }
            if h <= 0.0 {
                h = 0.0;
                mv = Move::Stop;
            }
            scores[row + j] = h;
            moves[row + j] = mv as u8;
            if h > best.0 {
                best = (h, i, j);
            }
        }
    }
    LocalFill {
        cols,
        moves,
        scores,
        best,
    }
}

/// Fills the Smith-Waterman grid of `x` (rows) against `y` (columns).
pub fn local_matrix(x: &Sequence, y: &Sequence, scheme: &ScoringScheme) -> DpMatrix {
    let a = scheme.alphabet();
    let fill = local_fill(
        &a.encode(x.residues()),
        &a.encode(y.residues()),
        &scheme.code_table(),
        scheme.gap(),
    );
    DpMatrix {
        rows: x.len() + 1,
        cols: fill.cols,
        scores: fill.scores,
        moves: fill.moves,
    }
}

/// Smith-Waterman alignment of `a` and `b`, returned as full-length rows.
///
/// The best cell is the highest score with the smallest `(row, column)`.
/// Unaligned prefixes are laid out before the core (`a`'s first, then
/// `b`'s) and unaligned suffixes after it in the same order, each opposite
/// gaps, so both rows carry their whole sequence.
pub fn local_align(
    a: &Sequence,
    b: &Sequence,
    scheme: &ScoringScheme,
) -> Result<PairwiseAlignment, AlignError> {
    if a.is_empty() || b.is_empty() {
        return Err(AlignError::EmptyInput);
    }
    let alpha = scheme.alphabet();
    let fill = local_fill(
        &alpha.encode(a.residues()),
        &alpha.encode(b.residues()),
        &scheme.code_table(),
        scheme.gap(),
    );
    let (score, bi, bj) = fill.best;
    let tb = trace(&fill.moves, fill.cols, bi, bj, false);
    let (i0, j0) = tb.start;
    let (ra, rb) = (a.residues(), b.residues());

    let width = ra.len() + rb.len();
    let mut row_a = Vec::with_capacity(width);
    let mut row_b = Vec::with_capacity(width);

    row_a.extend_from_slice(&ra[..i0]);
    row_b.extend(std::iter::repeat_n(GAP, i0));
    row_a.extend(std::iter::repeat_n(GAP, j0));
    row_b.extend_from_slice(&rb[..j0]);

    let core_start = row_a.len();
    for &(xi, yj) in &tb.columns {
        row_a.push(xi.map_or(GAP, |k| ra[k]));
        row_b.push(yj.map_or(GAP, |k| rb[k]));
    }
    let core_end = row_a.len();

    row_a.extend_from_slice(&ra[bi..]);
    row_b.extend(std::iter::repeat_n(GAP, ra.len() - bi));
    row_a.extend(std::iter::repeat_n(GAP, rb.len() - bj));
    row_b.extend_from_slice(&rb[bj..]);

    Ok(PairwiseAlignment {
        row_a: AlignedSequence::new(a.id(), row_a),
        row_b: AlignedSequence::new(b.id(), row_b),
        score,
        core_columns: core_start..core_end,
        a_core: i0..bi,
        b_core: j0..bj,
    })
}

/// Overlap-aligns every read against the reference.
///
/// Reads are aligned in parallel on the current rayon pool; the index is keyed
/// by read id so the result does not depend on completion order.
pub fn build_overlap_index(
    reads: &[Read],
    reference: &Sequence,
    scheme: &ScoringScheme,
) -> Result<OverlapIndex, AlignError> {
    if reads.is_empty() || reference.is_empty() {
        return Err(AlignError::EmptyInput);
    }
    let alpha = scheme.alphabet();
    let ref_codes = alpha.encode(reference.residues());
    let table = scheme.code_table();
    let gap = scheme.gap();

    let records: Vec<OverlapRecord> = reads
        .par_iter()
        .map(|read| {
            let seq = &read.sequence;
            overlap_encoded(
                seq,
                read.source_index,
                &alpha.encode(seq.residues()),
                &ref_codes,
                &table,
                gap,
            )
            .map_err(|e| AlignError::Read {
                id: seq.id().to_string(),
                source: Box::new(e),
            })
        })
        .collect::<Result<_, _>>()?;

    let mut index = OverlapIndex::default();
    for rec in records {
        let id = rec.read_id.clone();
        if index.records.insert(id.clone(), rec).is_some() {
            return Err(AlignError::DuplicateReadId(id));
        }
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{strip_gaps, validate_sequence, Alphabet};

    fn seq(id: &str, s: &str) -> Sequence {
        validate_sequence(id, s, &Alphabet::dna()).unwrap()
    }

    fn unit() -> ScoringScheme {
        crate::scoring::simple_dna_model(1.0, -1.0)
            .unwrap()
            .with_linear_gap(-2.0)
            .unwrap()
    }

    #[test]
    fn overlap_identical() {
        let r = overlap_align(&seq("r", "ACGT"), &seq("ref", "ACGT"), &unit()).unwrap();
        assert_eq!(r.score, 4.0);
        assert_eq!(
            (r.start, r.end, r.leading_gaps, r.trailing_gaps),
            (0, 4, 0, 0)
        );
        assert_eq!(r.aligned_read.as_str(), "ACGT");
    }

    #[test]
    fn overlap_embedded_read() {
        let r = overlap_align(&seq("r", "CGT"), &seq("ref", "AAACGTAAA"), &unit()).unwrap();
        assert_eq!(r.score, 3.0);
        assert_eq!(
            (r.start, r.end, r.leading_gaps, r.trailing_gaps),
            (3, 6, 3, 3)
        );
        assert_eq!(r.aligned_read.as_str(), "---CGT---");
    }

    #[test]
    fn overlap_right_overhang() {
        let r = overlap_align(&seq("r", "TTTT"), &seq("ref", "ACGT"), &unit()).unwrap();
        assert_eq!(r.score, 1.0);
        assert_eq!((r.start, r.end), (3, 4));
        assert_eq!(r.aligned_read.as_str(), "---TTTT");
    }

    #[test]
    fn overlap_left_overhang_clamps_start() {
        let r = overlap_align(&seq("r", "GGGAC"), &seq("ref", "ACTTTT"), &unit()).unwrap();
        assert_eq!(r.score, 2.0);
        assert_eq!((r.start, r.end), (0, 2));
        assert_eq!(strip_gaps(&r.aligned_read).unwrap().residues(), b"GGGAC");
    }

    #[test]
    fn overlap_falls_back_to_empty_overlap() {
        let r = overlap_align(&seq("r", "A"), &seq("ref", "C"), &ScoringScheme::default()).unwrap();
        assert_eq!(r.score, 0.0);
        assert_eq!((r.start, r.end), (0, 1));
        assert_eq!(r.aligned_read.as_str(), "A-");
    }

    #[test]
    fn overlap_first_row_and_column_are_zero() {
        let m = overlap_matrix(&seq("r", "ACG"), &seq("ref", "TTACGTT"), &unit());
        assert!((0..m.cols()).all(|j| m.score(0, j) == 0.0));
        assert!((0..m.rows()).all(|i| m.score(i, 0) == 0.0));
    }

    #[test]
    fn overlap_prefers_leftmost_placement() {
        let r = overlap_align(&seq("r", "ACG"), &seq("ref", "ACGTTACG"), &unit()).unwrap();
        assert_eq!(r.start, 0);
    }

    #[test]
    fn overlap_empty_input() {
        let s = seq("r", "A");
        let reads: Vec<Read> = Vec::new();
        assert_eq!(
            build_overlap_index(&reads, &s, &unit()),
            Err(AlignError::EmptyInput)
        );
    }

    #[test]
    fn local_identical() {
        let p = local_align(&seq("a", "ACGT"), &seq("b", "ACGT"), &unit()).unwrap();
        assert_eq!(p.score, 4.0);
        assert_eq!(p.row_a.as_str(), "ACGT");
        assert_eq!(p.row_b.as_str(), "ACGT");
        assert_eq!(p.core_columns, 0..4);
    }

    #[test]
    fn local_shared_segment() {
        let p = local_align(&seq("a", "AAATTT"), &seq("b", "TTTGGG"), &unit()).unwrap();
        assert_eq!(p.score, 3.0);
        assert_eq!(p.a_core, 3..6);
        assert_eq!(p.b_core, 0..3);
        assert_eq!(p.row_a.as_str(), "AAATTT---");
        assert_eq!(p.row_b.as_str(), "---TTTGGG");
    }

    #[test]
    fn local_no_positive_cell() {
        let p = local_align(&seq("a", "AAA"), &seq("b", "GGG"), &unit()).unwrap();
        assert_eq!(p.score, 0.0);
        assert!(p.core_columns.is_empty());
        assert_eq!(p.row_a.as_str(), "AAA---");
        assert_eq!(p.row_b.as_str(), "---GGG");
    }

    #[test]
    fn local_matrix_is_nonnegative() {
        let m = local_matrix(&seq("a", "ACGTTGCA"), &seq("b", "TTGACG"), &unit());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                assert!(m.score(i, j) >= 0.0);
            }
        }
    }

    #[test]
    fn local_rows_have_no_gap_over_gap() {
        let p = local_align(&seq("a", "GGACGTAC"), &seq("b", "TTACGAACC"), &unit()).unwrap();
        assert_eq!(p.row_a.len(), p.row_b.len());
        for (x, y) in p.row_a.cells.iter().zip(&p.row_b.cells) {
            assert!(!(*x == GAP && *y == GAP));
        }
        assert_eq!(strip_gaps(&p.row_a).unwrap().residues(), b"GGACGTAC");
        assert_eq!(strip_gaps(&p.row_b).unwrap().residues(), b"TTACGAACC");
    }

    #[test]
    fn index_recovers_substring_offsets() {
        let reference = seq("ref", "ACGTTGCAAGCTAGCTTACGGATCCA");
        let reads = Read::from_sequences(vec![
            seq("r0", "ACGTTG"),
            seq("r1", "GCTAGC"),
            seq("r2", "CGGATC"),
        ]);
        let idx = build_overlap_index(&reads, &reference, &unit()).unwrap();
        assert_eq!(idx.len(), 3);
        assert_eq!(idx.get("r0").unwrap().start, 0);
        assert_eq!(idx.get("r1").unwrap().start, 9);
        assert_eq!(idx.get("r2").unwrap().start, 18);
        assert_eq!(idx.get("r2").unwrap().source_index, 2);
    }

    #[test]
    fn index_rejects_duplicate_ids() {
        let reference = seq("ref", "ACGTACGT");
        let reads = Read::from_sequences(vec![seq("r", "ACG"), seq("r", "CGT")]);
        assert_eq!(
            build_overlap_index(&reads, &reference, &unit()),
            Err(AlignError::DuplicateReadId("r".into()))
        );
    }

    #[test]
    fn index_single_read() {
        let reference = seq("ref", "ACGTACGT");
        let reads = Read::from_sequences(vec![reference.clone().with_id("r")]);
        let idx = build_overlap_index(&reads, &reference, &unit()).unwrap();
        assert_eq!(idx.len(), 1);
        assert_eq!(idx.get("r").unwrap().start, 0);
    }
}
