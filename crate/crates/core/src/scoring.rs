//! Substitution models, gap penalties and the profile sum-of-pairs column score.
//!
//! Three substitution sources reduce to one dense residue-by-residue
//! [`ScoreMatrix`]:
//!
//! * a simple match/mismatch pair (the nucleotide default),
//! * a [`SubstitutionModel`] built from background and joint probabilities,
//!   whose scores are natural-log odds `ln(p_ij / (p_i * p_j))`,
//! * a scoring-matrix text file (PAM/BLOSUM/VTML layout).
//!
//! The ambiguity symbol always scores as a mismatch: the simple mismatch score,
//! or the smallest matrix entry for matrix-backed schemes.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::profile::ProfileColumn;
use crate::seq::{Alphabet, SeqError};

pub type Score = f64;

/// Tolerance for probability and frequency normalization checks.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("match score {match_score} must exceed mismatch score {mismatch_score}")]
    InvalidScores {
        match_score: Score,
        mismatch_score: Score,
    },
    #[error("gap penalties must satisfy gap_open <= gap_extend <= 0 (got {open}, {extend})")]
    InvalidGapPenalties { open: Score, extend: Score },
    #[error("{what} probabilities sum to {sum}, expected 1")]
    NotNormalized { what: &'static str, sum: f64 },
    #[error("probability for {key} is not positive ({value})")]
    NonPositiveProbability { key: String, value: f64 },
    #[error("joint probability missing for {0}")]
    MissingProbability(String),
    #[error("joint probabilities are not symmetric at {0}")]
    Asymmetric(String),
    #[error("profile column frequencies sum to {sum}, expected 1")]
    UnnormalizedColumn { sum: f64 },
    #[error("column has {got} residue frequencies, matrix expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix line {line}: {message}")]
    MatrixParse { line: usize, message: String },
    #[error("matrix file: {0}")]
    Io(String),
    #[error(transparent)]
    Alphabet(#[from] SeqError),
}

/// Dense square matrix of residue-pair scores, indexed by alphabet code.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    size: usize,
    values: Vec<Score>,
}

impl ScoreMatrix {
    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> Score) -> Self {
        let mut values = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                values.push(f(i, j));
            }
        }
        Self { size, values }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Score {
        self.values[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[Score] {
        &self.values[i * self.size..(i + 1) * self.size]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn min(&self) -> Score {
        self.values
            .iter()
            .copied()
            .fold(Score::INFINITY, Score::min)
    }
}

/// Background and joint residue probabilities with their log-odds scores.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionModel {
    alphabet: Alphabet,
    background: Vec<f64>,
    joint: Vec<f64>,
    log_odds: ScoreMatrix,
}

impl SubstitutionModel {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `p_i` indexed by alphabet code.
    pub fn background(&self) -> &[f64] {
        &self.background
    }

    /// `p_ij` for residue codes `i`, `j`.
    pub fn joint(&self, i: usize, j: usize) -> f64 {
        self.joint[i * self.background.len() + j]
    }

    pub fn log_odds(&self) -> &ScoreMatrix {
        &self.log_odds
    }
}

impl AsRef<ScoreMatrix> for SubstitutionModel {
    fn as_ref(&self) -> &ScoreMatrix {
        &self.log_odds
    }
}

/// Builds a model from `p_i` and `p_ij`; residues are the background keys in
/// sorted order. `N` is the ambiguity symbol unless it is itself a residue,
/// in which case `X` is used.
pub fn log_odds_from_probabilities(
    background: &BTreeMap<u8, f64>,
    joint: &BTreeMap<(u8, u8), f64>,
) -> Result<SubstitutionModel, ScoringError> {
    let symbols: Vec<u8> = background.keys().map(u8::to_ascii_uppercase).collect();
    let ambiguity = if symbols.contains(&b'N') { b'X' } else { b'N' };
    let alphabet = Alphabet::new(&symbols, ambiguity)?;
    let k = alphabet.len();

    let mut bg = Vec::with_capacity(k);
    for (&sym, &p) in background {
        if p.is_nan() || p <= 0.0 {
            return Err(ScoringError::NonPositiveProbability {
                key: (sym as char).to_string(),
                value: p,
            });
        }
        bg.push(p);
    }
    let sum: f64 = bg.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(ScoringError::NotNormalized {
            what: "background",
            sum,
        });
    }

    let mut pij = vec![0.0; k * k];
    for (i, &a) in background.keys().enumerate() {
        for (j, &b) in background.keys().enumerate() {
            let key = format!("({},{})", a as char, b as char);
            let p = *joint
                .get(&(a, b))
                .ok_or_else(|| ScoringError::MissingProbability(key.clone()))?;
            if p.is_nan() || p <= 0.0 {
                return Err(ScoringError::NonPositiveProbability { key, value: p });
            }
            pij[i * k + j] = p;
        }
    }
    for i in 0..k {
        for j in 0..i {
            if pij[i * k + j] != pij[j * k + i] {
                let (a, b) = (symbols[i] as char, symbols[j] as char);
                return Err(ScoringError::Asymmetric(format!("({a},{b})")));
            }
        }
    }
    let sum: f64 = pij.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(ScoringError::NotNormalized { what: "joint", sum });
    }

    let log_odds = ScoreMatrix::from_fn(k, |i, j| (pij[i * k + j] / (bg[i] * bg[j])).ln());
    Ok(SubstitutionModel {
        alphabet,
        background: bg,
        joint: pij,
        log_odds,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Substitution {
    Simple {
        match_score: Score,
        mismatch_score: Score,
    },
    Model(Box<SubstitutionModel>),
    Matrix(ScoreMatrix),
}

/// Everything the alignment kernels need to score residues and gaps.
///
/// The DP recurrences use a linear gap cost equal to `gap_open`; `gap_extend`
/// is validated and carried for callers that report it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringScheme {
    alphabet: Alphabet,
    substitution: Substitution,
    matrix: ScoreMatrix,
    ambiguity_score: Score,
    gap_open: Score,
    gap_extend: Score,
}

pub const DEFAULT_MATCH: Score = 2.0;
pub const DEFAULT_MISMATCH: Score = -3.0;
pub const DEFAULT_GAP_OPEN: Score = -5.0;
pub const DEFAULT_GAP_EXTEND: Score = -2.0;

/// Nucleotide match/mismatch scheme with the default gap penalties.
pub fn simple_dna_model(
    match_score: Score,
    mismatch_score: Score,
) -> Result<ScoringScheme, ScoringError> {
    ScoringScheme::simple(Alphabet::dna(), match_score, mismatch_score)
}

impl ScoringScheme {
    pub fn simple(
        alphabet: Alphabet,
        match_score: Score,
        mismatch_score: Score,
    ) -> Result<Self, ScoringError> {
        if match_score.is_nan() || mismatch_score.is_nan() || match_score <= mismatch_score {
            return Err(ScoringError::InvalidScores {
                match_score,
                mismatch_score,
            });
        }
        let matrix = ScoreMatrix::from_fn(alphabet.len(), |i, j| {
            if i == j {
                match_score
            } else {
                mismatch_score
            }
        });
        Ok(Self {
            alphabet,
            substitution: Substitution::Simple {
                match_score,
                mismatch_score,
            },
            matrix,
            ambiguity_score: mismatch_score,
            gap_open: DEFAULT_GAP_OPEN,
            gap_extend: DEFAULT_GAP_EXTEND,
        })
    }

    pub fn from_model(model: SubstitutionModel) -> Self {
        let matrix = model.log_odds().clone();
        Self {
            alphabet: model.alphabet().clone(),
            ambiguity_score: matrix.min(),
            matrix,
            substitution: Substitution::Model(Box::new(model)),
            gap_open: DEFAULT_GAP_OPEN,
            gap_extend: DEFAULT_GAP_EXTEND,
        }
    }

    pub fn from_matrix(alphabet: Alphabet, matrix: ScoreMatrix) -> Result<Self, ScoringError> {
        if matrix.size() != alphabet.len() {
            return Err(ScoringError::DimensionMismatch {
                expected: alphabet.len(),
                got: matrix.size(),
            });
        }
        Ok(Self {
            alphabet,
            ambiguity_score: matrix.min(),
            substitution: Substitution::Matrix(matrix.clone()),
            matrix,
            gap_open: DEFAULT_GAP_OPEN,
            gap_extend: DEFAULT_GAP_EXTEND,
        })
    }

    pub fn with_gaps(mut self, gap_open: Score, gap_extend: Score) -> Result<Self, ScoringError> {
        if !(gap_open <= gap_extend && gap_extend <= 0.0) {
            return Err(ScoringError::InvalidGapPenalties {
                open: gap_open,
                extend: gap_extend,
            });
        }
        self.gap_open = gap_open;
        self.gap_extend = gap_extend;
        Ok(self)
    }

    /// Linear-gap scheme: a single per-residue gap cost.
    pub fn with_linear_gap(self, gap: Score) -> Result<Self, ScoringError> {
        self.with_gaps(gap, gap)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn substitution(&self) -> &Substitution {
        &self.substitution
    }

    pub fn matrix(&self) -> &ScoreMatrix {
        &self.matrix
    }

    pub fn gap_open(&self) -> Score {
        self.gap_open
    }

    pub fn gap_extend(&self) -> Score {
        self.gap_extend
    }

    /// Per-residue gap cost used by the DP kernels.
    pub fn gap(&self) -> Score {
        self.gap_open
    }

    /// Score of two symbols (case-insensitive). Unknown symbols and the
    /// ambiguity symbol score as mismatch.
    pub fn score(&self, a: u8, b: u8) -> Score {
        let k = self.alphabet.len();
        match (self.alphabet.code(a), self.alphabet.code(b)) {
            (Some(i), Some(j)) if i < k && j < k => self.matrix.get(i, j),
            _ => self.ambiguity_score,
        }
    }

    /// `(k+1)^2` lookup over codes including the ambiguity code `k`.
    pub fn code_table(&self) -> CodeTable {
        let k = self.alphabet.len();
        let w = k + 1;
        let mut values = vec![self.ambiguity_score; w * w];
        for i in 0..k {
            for j in 0..k {
                values[i * w + j] = self.matrix.get(i, j);
            }
        }
        CodeTable { width: w, values }
    }
}

impl Default for ScoringScheme {
    fn default() -> Self {
        simple_dna_model(DEFAULT_MATCH, DEFAULT_MISMATCH)
            .and_then(|s| s.with_gaps(DEFAULT_GAP_OPEN, DEFAULT_GAP_EXTEND))
            .expect("default scheme is valid")
    }
}

/// Flat pair-score lookup over encoded symbols.
#[derive(Debug, Clone)]
pub struct CodeTable {
    width: usize,
    values: Vec<Score>,
}

impl CodeTable {
    #[inline]
    pub fn get(&self, a: u8, b: u8) -> Score {
        self.values[a as usize * self.width + b as usize]
    }
}

/// Profile sum-of-pairs score of two columns:
/// `sum_i sum_j f^x_i * f^y_j * S_ij`, over residues only.
///
/// Both columns must have residue and gap frequencies summing to one.
pub fn psp_score(
    col_x: &ProfileColumn,
    col_y: &ProfileColumn,
    matrix: &ScoreMatrix,
) -> Result<Score, ScoringError> {
    for col in [col_x, col_y] {
        if col.residue_freq.len() != matrix.size() {
            return Err(ScoringError::DimensionMismatch {
                expected: matrix.size(),
                got: col.residue_freq.len(),
            });
        }
        let sum = col.total_mass();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(ScoringError::UnnormalizedColumn { sum });
        }
    }
    Ok(psp_unchecked(
        &col_x.residue_freq,
        &col_y.residue_freq,
        matrix,
    ))
}

/// The bare double sum over raw residue-frequency vectors, with no
/// normalization requirement.
#[inline]
pub fn psp_unchecked(fx: &[f64], fy: &[f64], matrix: &ScoreMatrix) -> Score {
    let mut total = 0.0;
    for (i, &fi) in fx.iter().enumerate() {
        if fi == 0.0 {
            continue;
        }
        let row = matrix.row(i);
        let mut inner = 0.0;
        for (&fj, &s) in fy.iter().zip(row) {
            inner += fj * s;
        }
        total += fi * inner;
    }
    total
}

/// Parses a whitespace-separated square scoring matrix: a header row of
/// residue letters, then one row per residue led by its letter. `#` starts a
/// comment. Letters are case-insensitive.
///
/// Columns that are not ASCII letters (e.g. `*`) are dropped. If every letter
/// is a nucleotide code the ambiguity symbol is `N`, otherwise `X`; the
/// ambiguity row and column are dropped as well since that symbol always
/// scores as mismatch.
pub fn parse_matrix(text: &str) -> Result<(Alphabet, ScoreMatrix), ScoringError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or(ScoringError::MatrixParse {
        line: 1,
        message: "missing header row".into(),
    })?;
    let mut letters = Vec::new();
    for tok in header.split_whitespace() {
        let b = tok.as_bytes();
        if b.len() != 1 {
            return Err(ScoringError::MatrixParse {
                line: header_line,
                message: format!("header token {tok:?} is not a single symbol"),
            });
        }
        letters.push(b[0].to_ascii_uppercase());
    }

    let mut rows: BTreeMap<u8, (usize, Vec<Score>)> = BTreeMap::new();
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        let label = toks.next().unwrap_or_default();
        if label.len() != 1 {
            return Err(ScoringError::MatrixParse {
                line,
                message: format!("row label {label:?} is not a single symbol"),
            });
        }
        let label = label.as_bytes()[0].to_ascii_uppercase();
        let vals = toks
            .map(|t| {
                t.parse::<Score>().map_err(|_| ScoringError::MatrixParse {
                    line,
                    message: format!("bad score {t:?}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if vals.len() != letters.len() {
            return Err(ScoringError::MatrixParse {
                line,
                message: format!("expected {} scores, found {}", letters.len(), vals.len()),
            });
        }
        if rows.insert(label, (line, vals)).is_some() {
            return Err(ScoringError::MatrixParse {
                line,
                message: format!("duplicate row {:?}", label as char),
            });
        }
    }

    let nucleotide = letters
        .iter()
        .filter(|b| b.is_ascii_alphabetic())
        .all(|b| b"ACGTUN".contains(b));
    let ambiguity = if nucleotide { b'N' } else { b'X' };
    let keep: Vec<usize> = (0..letters.len())
        .filter(|&i| letters[i].is_ascii_alphabetic() && letters[i] != ambiguity)
        .collect();
    let symbols: Vec<u8> = keep.iter().map(|&i| letters[i]).collect();
    let alphabet = Alphabet::new(&symbols, ambiguity)?;

    let mut dense = Vec::with_capacity(keep.len() * keep.len());
    for &i in &keep {
        let (_, vals) = rows
            .get(&letters[i])
            .ok_or_else(|| ScoringError::MatrixParse {
                line: header_line,
                message: format!("no row for {:?}", letters[i] as char),
            })?;
        dense.extend(keep.iter().map(|&j| vals[j]));
    }
    let k = keep.len();
    let matrix = ScoreMatrix::from_fn(k, |i, j| dense[i * k + j]);
    if !matrix.is_symmetric() {
        return Err(ScoringError::MatrixParse {
            line: header_line,
            message: "matrix is not symmetric".into(),
        });
    }
    Ok((alphabet, matrix))
}

pub fn load_matrix_file(path: impl AsRef<Path>) -> Result<(Alphabet, ScoreMatrix), ScoringError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScoringError::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}
