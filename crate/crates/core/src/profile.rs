//! Profiles and profile-profile alignment.
//!
//! A [`Profile`] carries its member rows plus per-column residue counts. Two
//! profiles are merged by a global DP over their columns scored with the
//! profile sum-of-pairs function. Input columns are never split or
//! reordered: the merged profile only inserts all-gap columns into one side
//! or the other.

use thiserror::Error;

use crate::pairwise::PairwiseAlignment;
use crate::scoring::{psp_unchecked, Score, ScoringError, ScoringScheme, NORMALIZATION_TOLERANCE};
use crate::seq::{AlignedSequence, Alphabet, GAP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("profile has no rows")]
    EmptyProfile,
    #[error("row {id} has length {len}, expected {expected}")]
    RaggedRows {
        id: String,
        len: usize,
        expected: usize,
    },
    #[error("row {id} contains {symbol:?}, which is not in the alphabet")]
    UnknownSymbol { id: String, symbol: char },
    #[error("profiles use different alphabets")]
    AlphabetMismatch,
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

/// Residue and gap frequencies of one column.
///
/// Ambiguity symbols count toward neither; frequencies are taken over the
/// remaining cells. A column with no counted cells behaves as all-gap.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileColumn {
    pub residue_freq: Vec<f64>,
    pub gap_freq: f64,
}

impl ProfileColumn {
    pub fn new(residue_freq: Vec<f64>, gap_freq: f64) -> Result<Self, ScoringError> {
        let col = Self {
            residue_freq,
            gap_freq,
        };
        let sum = col.total_mass();
        let in_range = col
            .residue_freq
            .iter()
            .chain(std::iter::once(&col.gap_freq))
            .all(|f| (0.0..=1.0).contains(f));
        if !in_range || (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(ScoringError::UnnormalizedColumn { sum });
        }
        Ok(col)
    }

    pub fn total_mass(&self) -> f64 {
        self.gap_freq + self.residue_freq.iter().sum::<f64>()
    }
}

/// An alignment of one or more rows summarised column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    alphabet: Alphabet,
    members: Vec<AlignedSequence>,
    width: usize,
    /// Per column: `k` residue counts, then gaps, then ambiguity symbols.
    counts: Vec<u32>,
}

impl Profile {
    fn stride(&self) -> usize {
        self.alphabet.len() + 2
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn members(&self) -> &[AlignedSequence] {
        &self.members
    }

    pub fn into_members(self) -> Vec<AlignedSequence> {
        self.members
    }

    /// Number of member sequences.
    pub fn weight(&self) -> usize {
        self.members.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Raw counts of column `c`: residues by alphabet code, then gaps, then
    /// ambiguity symbols.
    pub fn counts(&self, c: usize) -> &[u32] {
        let s = self.stride();
        &self.counts[c * s..(c + 1) * s]
    }

    pub fn column(&self, c: usize) -> ProfileColumn {
        let k = self.alphabet.len();
        let counts = self.counts(c);
        let counted = self.weight() as u32 - counts[k + 1];
        if counted == 0 {
            return ProfileColumn {
                residue_freq: vec![0.0; k],
                gap_freq: 1.0,
            };
        }
        let d = counted as f64;
        ProfileColumn {
            residue_freq: counts[..k].iter().map(|&n| n as f64 / d).collect(),
            gap_freq: counts[k] as f64 / d,
        }
    }

    pub fn columns(&self) -> Vec<ProfileColumn> {
        (0..self.width).map(|c| self.column(c)).collect()
    }

    /// Frequencies as flat `width * k` residue and `width` gap arrays.
    fn dense(&self) -> (Vec<f64>, Vec<f64>) {
        let k = self.alphabet.len();
        let mut freq = Vec::with_capacity(self.width * k);
        let mut gap = Vec::with_capacity(self.width);
        for c in 0..self.width {
            let col = self.column(c);
            freq.extend_from_slice(&col.residue_freq);
            gap.push(col.gap_freq);
        }
        (freq, gap)
    }

    /// Prepends `n` all-gap columns.
    pub fn pad_left(&mut self, n: usize) {
        if n == 0 {
            return;
        }
        let s = self.stride();
        let k = self.alphabet.len();
        let mut counts = vec![0u32; (self.width + n) * s];
        for c in 0..n {
            counts[c * s + k] = self.weight() as u32;
        }
        counts[n * s..].copy_from_slice(&self.counts);
        self.counts = counts;
        for m in &mut self.members {
            let mut cells = Vec::with_capacity(m.cells.len() + n);
            cells.extend(std::iter::repeat_n(GAP, n));
            cells.extend_from_slice(&m.cells);
            m.cells = cells;
        }
        self.width += n;
    }

    /// Sum-of-pairs score over residue pairs in every column.
    pub fn sum_of_pairs(&self, scheme: &ScoringScheme) -> Score {
        let k = self.alphabet.len();
        let m = scheme.matrix();
        let mut total = 0.0;
        for c in 0..self.width {
            let counts = &self.counts(c)[..k];
            for (i, &ci) in counts.iter().enumerate() {
                let ci = ci as f64;
                if ci == 0.0 {
                    continue;
                }
                total += ci * (ci - 1.0) / 2.0 * m.get(i, i);
                for (j, &cj) in counts.iter().enumerate().skip(i + 1) {
                    total += ci * cj as f64 * m.get(i, j);
                }
            }
        }
        total
    }
}

/// Counts a profile from equal-length rows.
pub fn build_profile(
    rows: Vec<AlignedSequence>,
    alphabet: &Alphabet,
) -> Result<Profile, ProfileError> {
    let width = rows.first().ok_or(ProfileError::EmptyProfile)?.len();
    let k = alphabet.len();
    let stride = k + 2;
    let mut counts = vec![0u32; width * stride];
    for row in &rows {
        if row.len() != width {
            return Err(ProfileError::RaggedRows {
                id: row.id.clone(),
                len: row.len(),
                expected: width,
            });
        }
        for (c, &cell) in row.cells.iter().enumerate() {
            let slot = if cell == GAP {
                k
            } else {
                match alphabet.code(cell) {
                    Some(code) if code < k => code,
                    Some(_) => k + 1,
                    None => {
                        return Err(ProfileError::UnknownSymbol {
                            id: row.id.clone(),
                            symbol: cell as char,
                        })
                    }
                }
            };
            counts[c * stride + slot] += 1;
        }
    }
    Ok(Profile {
        alphabet: alphabet.clone(),
        members: rows,
        width,
        counts,
    })
}

pub fn profile_of_pairwise(
    pa: &PairwiseAlignment,
    alphabet: &Alphabet,
) -> Result<Profile, ProfileError> {
    build_profile(vec![pa.row_a.clone(), pa.row_b.clone()], alphabet)
}

pub fn profile_of_row(row: AlignedSequence, alphabet: &Alphabet) -> Result<Profile, ProfileError> {
    build_profile(vec![row], alphabet)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    /// x column over y column
    Both,
    /// x column over a new all-gap column in y
    XOnly,
    /// new all-gap column in x over y column
    YOnly,
}

const DIAG: u8 = 0;
const UP: u8 = 1;
const LEFT: u8 = 2;

/// Merged profile plus the DP score of the column correspondence.
#[derive(Debug, Clone)]
pub struct ProfileAlignment {
    pub profile: Profile,
    pub score: Score,
}

/// Aligns two profiles column-to-column; see [`align_profiles_scored`].
pub fn align_profiles(
    x: &Profile,
    y: &Profile,
    scheme: &ScoringScheme,
) -> Result<Profile, ProfileError> {
    align_profiles_scored(x, y, scheme).map(|a| a.profile)
}

/// Global DP over the columns of `x` (rows) and `y` (columns).
///
/// Matching two columns scores their profile sum of pairs. Inserting an
/// all-gap column opposite a column costs the scheme gap penalty scaled by
/// `1 - gap_freq` of that opposing column. Ties prefer diagonal, then
/// consuming an `x` column, then a `y` column.
pub fn align_profiles_scored(
    x: &Profile,
    y: &Profile,
    scheme: &ScoringScheme,
) -> Result<ProfileAlignment, ProfileError> {
    if x.weight() == 0 || y.weight() == 0 {
        return Err(ProfileError::EmptyProfile);
    }
    if x.alphabet != y.alphabet || &x.alphabet != scheme.alphabet() {
        return Err(ProfileError::AlphabetMismatch);
    }
    let k = x.alphabet.len();
    let (m, n) = (x.width, y.width);
    let gap = scheme.gap();
    let matrix = scheme.matrix();

    let (fx, gx_gap) = x.dense();
    let (fy, gy_gap) = y.dense();
    // S * f^x per x column, so each cell costs one k-length dot product
    let mut sx = vec![0.0; m * k];
    for i in 0..m {
        for a in 0..k {
            sx[i * k + a] = psp_unchecked(&fx[i * k..(i + 1) * k], &unit(k, a), matrix);
        }
    }
    let x_open: Vec<Score> = gx_gap.iter().map(|g| gap * (1.0 - g)).collect();
    let y_open: Vec<Score> = gy_gap.iter().map(|g| gap * (1.0 - g)).collect();

    let cols = n + 1;
    let mut moves = vec![DIAG; (m + 1) * cols];
    let mut prev = vec![0.0; cols];
    let mut cur = vec![0.0; cols];
    for j in 1..=n {
        prev[j] = prev[j - 1] + y_open[j - 1];
        moves[j] = LEFT;
    }
    for i in 1..=m {
        let row = i * cols;
        let si = &sx[(i - 1) * k..i * k];
        let xo = x_open[i - 1];
        cur[0] = prev[0] + xo;
        moves[row] = UP;
        for j in 1..=n {
            let fyj = &fy[(j - 1) * k..j * k];
            let mut s = 0.0;
            for a in 0..k {
                s += si[a] * fyj[a];
            }
            let diag = prev[j - 1] + s;
            let up = prev[j] + xo;
            let left = cur[j - 1] + y_open[j - 1];
            let (mut best, mut mv) = (diag, DIAG);
            if up > best {
                best = up;
                mv = UP;
            }
            if left > best {
                best = left;
                mv = LEFT;
            }
            cur[j] = best;
            moves[row + j] = mv;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let score = prev[n];

    let mut ops = Vec::with_capacity(m + n);
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        match moves[i * cols + j] {
            DIAG if i > 0 && j > 0 => {
                ops.push(Op::Both);
                i -= 1;
                j -= 1;
            }
            UP | DIAG if i > 0 => {
                ops.push(Op::XOnly);
                i -= 1;
            }
            _ => {
                ops.push(Op::YOnly);
                j -= 1;
            }
        }
    }
    ops.reverse();

    Ok(ProfileAlignment {
        profile: merge_by_ops(x, y, &ops),
        score,
    })
}

fn unit(k: usize, a: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[a] = 1.0;
    v
}

fn merge_by_ops(x: &Profile, y: &Profile, ops: &[Op]) -> Profile {
    let width = ops.len();
    let k = x.alphabet.len();
    let stride = k + 2;
    let mut counts = vec![0u32; width * stride];
    let (mut xi, mut yj) = (0, 0);
    for (c, op) in ops.iter().enumerate() {
        let dst = &mut counts[c * stride..(c + 1) * stride];
        match op {
            Op::Both => {
                for (d, (a, b)) in dst.iter_mut().zip(x.counts(xi).iter().zip(y.counts(yj))) {
                    *d = a + b;
                }
                xi += 1;
                yj += 1;
            }
            Op::XOnly => {
                dst.copy_from_slice(x.counts(xi));
                dst[k] += y.weight() as u32;
                xi += 1;
            }
            Op::YOnly => {
                dst.copy_from_slice(y.counts(yj));
                dst[k] += x.weight() as u32;
                yj += 1;
            }
        }
    }

    let mut members = Vec::with_capacity(x.weight() + y.weight());
    for (src, keep) in [(x, Op::XOnly), (y, Op::YOnly)] {
        for row in &src.members {
            let mut cells = Vec::with_capacity(width);
            let mut p = 0;
            for &op in ops {
                if op == Op::Both || op == keep {
                    cells.push(row.cells[p]);
                    p += 1;
                } else {
                    cells.push(GAP);
                }
            }
            members.push(AlignedSequence::new(row.id.clone(), cells));
        }
    }

    Profile {
        alphabet: x.alphabet.clone(),
        members,
        width,
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    use crate::scoring::log_odds_from_probabilities;

    fn row(id: &str, s: &str) -> AlignedSequence {
        AlignedSequence::new(id, s.as_bytes().to_vec())
    }

    fn prof(rows: &[&str]) -> Profile {
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, s)| row(&format!("r{i}"), s))
            .collect();
        build_profile(rows, &Alphabet::dna()).unwrap()
    }

    #[test]
    fn single_row_counts() {
        let p = prof(&["A-C"]);
        assert_eq!(p.column(0).residue_freq, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.column(1).gap_freq, 1.0);
        assert_eq!(p.column(2).residue_freq, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn two_identical_rows() {
        let p = prof(&["AC", "AC"]);
        assert_eq!(p.column(0).residue_freq[0], 1.0);
        assert_eq!(p.column(1).residue_freq[1], 1.0);
        assert_eq!(p.column(0).gap_freq, 0.0);
        assert_eq!(p.weight(), 2);
    }

    #[test]
    fn half_gap_column() {
        let p = prof(&["AC", "A-"]);
        assert_eq!(p.column(0).residue_freq[0], 1.0);
        assert_eq!(p.column(1).residue_freq[1], 0.5);
        assert_eq!(p.column(1).gap_freq, 0.5);
    }

    #[test]
    fn ambiguity_is_excluded_from_frequencies() {
        let p = prof(&["A", "N", "C", "-"]);
        let c = p.column(0);
        let third = 1.0 / 3.0;
        assert_eq!(c.residue_freq, vec![third, third, 0.0, 0.0]);
        assert_eq!(c.gap_freq, third);
        let all_n = prof(&["N", "N"]).column(0);
        assert_eq!(all_n.gap_freq, 1.0);
        assert!(all_n.residue_freq.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            build_profile(vec![], &Alphabet::dna()),
            Err(ProfileError::EmptyProfile)
        );
        assert!(matches!(
            build_profile(vec![row("a", "AC"), row("b", "A")], &Alphabet::dna()),
            Err(ProfileError::RaggedRows { .. })
        ));
        assert!(matches!(
            build_profile(vec![row("a", "AX")], &Alphabet::dna()),
            Err(ProfileError::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn all_gap_columns_are_allowed() {
        let p = prof(&["A--", "C--"]);
        assert_eq!(p.column(2).gap_freq, 1.0);
    }

    #[test]
    fn identical_profiles_align_column_to_column() {
        let s = ScoringScheme::default();
        let z = align_profiles(&prof(&["AC"]), &prof(&["AC"]), &s).unwrap();
        assert_eq!(z.width(), 2);
        assert_eq!(z.weight(), 2);
        assert_eq!(z.members()[0].as_str(), "AC");
        assert_eq!(z.members()[1].as_str(), "AC");
    }

    #[test]
    fn single_insertion() {
        let s = ScoringScheme::default();
        let z = align_profiles(&prof(&["AC"]), &prof(&["AGC"]), &s).unwrap();
        assert_eq!(z.width(), 3);
        assert_eq!(z.members()[0].as_str(), "A-C");
        assert_eq!(z.members()[1].as_str(), "AGC");
    }

    #[test]
    fn zero_log_odds_single_column() {
        let bg: BTreeMap<u8, f64> = b"ACGT".iter().map(|&c| (c, 0.25)).collect();
        let joint = b"ACGT"
            .iter()
            .flat_map(|&a| b"ACGT".iter().map(move |&b| ((a, b), 0.0625)))
            .collect();
        let model = log_odds_from_probabilities(&bg, &joint).unwrap();
        let s = ScoringScheme::from_model(model);
        let z = align_profiles_scored(&prof(&["A"]), &prof(&["A"]), &s).unwrap();
        assert_eq!(z.score, 0.0);
        assert_eq!(z.profile.width(), 1);
        assert_eq!(z.profile.column(0).residue_freq[0], 1.0);
        assert_eq!(z.profile.weight(), 2);
    }

    #[test]
    fn merged_counts_match_recount() {
        let s = ScoringScheme::default();
        let z = align_profiles(
            &prof(&["ACG-T", "AC-GT"]),
            &prof(&["AGGT", "NGGT", "A--T"]),
            &s,
        )
        .unwrap();
        let recount = build_profile(z.members().to_vec(), &Alphabet::dna()).unwrap();
        assert_eq!(recount, z);
    }

    #[test]
    fn pad_left_inserts_gap_columns() {
        let mut p = prof(&["AC", "A-"]);
        p.pad_left(2);
        assert_eq!(p.width(), 4);
        assert_eq!(p.members()[1].as_str(), "--A-");
        assert_eq!(p.column(0).gap_freq, 1.0);
        let recount = build_profile(p.members().to_vec(), &Alphabet::dna()).unwrap();
        assert_eq!(recount, p);
    }

    #[test]
    fn profile_of_pairwise_counts() {
        let pa = PairwiseAlignment {
            row_a: row("a", "AC-T"),
            row_b: row("b", "ACGT"),
            score: 0.0,
            core_columns: 0..4,
            a_core: 0..3,
            b_core: 0..4,
        };
        let p = profile_of_pairwise(&pa, &Alphabet::dna()).unwrap();
        assert_eq!(p.column(2).gap_freq, 0.5);
        assert_eq!(p.column(2).residue_freq[2], 0.5);
        assert_eq!(p.column(0).residue_freq[0], 1.0);
        let single = profile_of_row(row("s", "GT"), &Alphabet::dna()).unwrap();
        assert_eq!(single.weight(), 1);
        assert_eq!(single.column(1).residue_freq[3], 1.0);
    }

    #[test]
    fn sum_of_pairs_counts_residue_pairs() {
        let s = ScoringScheme::default();
        // col0: AAA -> 3 matches; col1: C C - -> 1 match; col2: G T N -> 1 mismatch
        let p = prof(&["ACG", "ACT", "A-N"]);
        assert_eq!(p.sum_of_pairs(&s), 3.0 * 2.0 + 2.0 - 3.0);
    }

    #[test]
    fn alphabet_mismatch() {
        let protein = build_profile(vec![row("p", "AR")], &Alphabet::protein()).unwrap();
        assert_eq!(
            align_profiles(&prof(&["AC"]), &protein, &ScoringScheme::default()).unwrap_err(),
            ProfileError::AlphabetMismatch
        );
    }
}
