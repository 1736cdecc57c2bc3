//! Alphabets, validated sequences, reads and aligned rows.

use std::fmt;

use thiserror::Error;

pub const GAP: u8 = b'-';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("sequence is empty")]
    EmptySequence,
    #[error("illegal symbol {character:?} at position {position}")]
    IllegalSymbol { position: usize, character: char },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
}

/// An ordered residue alphabet plus the gap and ambiguity symbols.
///
/// Residues are addressed by their index in `symbols`; the ambiguity symbol
/// maps to index `len()`, one past the last residue.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    ambiguity: u8,
    lookup: [u8; 256],
}

const UNMAPPED: u8 = u8::MAX;

impl Alphabet {
    pub fn new(symbols: &[u8], ambiguity: u8) -> Result<Self, SeqError> {
        if symbols.is_empty() {
            return Err(SeqError::InvalidAlphabet("no residue symbols".into()));
        }
        if symbols.len() >= UNMAPPED as usize {
            return Err(SeqError::InvalidAlphabet("too many residue symbols".into()));
        }
        let ambiguity = ambiguity.to_ascii_uppercase();
        if ambiguity == GAP || !ambiguity.is_ascii_graphic() {
            return Err(SeqError::InvalidAlphabet(format!(
                "bad ambiguity symbol {:?}",
                ambiguity as char
            )));
        }
        let mut lookup = [UNMAPPED; 256];
        let mut canonical = Vec::with_capacity(symbols.len());
        for &raw in symbols {
            let s = raw.to_ascii_uppercase();
            if s == GAP || s == ambiguity || !s.is_ascii_graphic() {
                return Err(SeqError::InvalidAlphabet(format!(
                    "{:?} cannot be a residue",
                    s as char
                )));
            }
            if lookup[s as usize] != UNMAPPED {
                return Err(SeqError::InvalidAlphabet(format!(
                    "duplicate residue {:?}",
                    s as char
                )));
            }
            let idx = canonical.len() as u8;
            lookup[s as usize] = idx;
            lookup[s.to_ascii_lowercase() as usize] = idx;
            canonical.push(s);
        }
        let amb_idx = canonical.len() as u8;
        lookup[ambiguity as usize] = amb_idx;
        lookup[ambiguity.to_ascii_lowercase() as usize] = amb_idx;
        Ok(Self {
            symbols: canonical,
            ambiguity,
            lookup,
        })
    }

    pub fn dna() -> Self {
        Self::new(b"ACGT", b'N').expect("DNA alphabet is valid")
    }

    pub fn protein() -> Self {
        Self::new(b"ARNDCQEGHILKMFPSTWYV", b'X').expect("protein alphabet is valid")
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Number of residue symbols (excluding gap and ambiguity).
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn gap_symbol(&self) -> u8 {
        GAP
    }

    pub fn ambiguity_symbol(&self) -> u8 {
        self.ambiguity
    }

    /// Code of a (case-insensitive) symbol: `0..len()` for residues, `len()`
    /// for the ambiguity symbol, `None` otherwise.
    #[inline]
    pub fn code(&self, symbol: u8) -> Option<usize> {
        match self.lookup[symbol as usize] {
            UNMAPPED => None,
            c => Some(c as usize),
        }
    }

    pub fn ambiguity_code(&self) -> usize {
        self.symbols.len()
    }

    /// Encodes validated residues into codes. Unknown symbols map to the
    /// ambiguity code.
    pub fn encode(&self, residues: &[u8]) -> Vec<u8> {
        let amb = self.symbols.len() as u8;
        residues
            .iter()
            .map(|&b| match self.lookup[b as usize] {
                UNMAPPED => amb,
                c => c,
            })
            .collect()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self::dna()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Alphabet")
            .field("symbols", &String::from_utf8_lossy(&self.symbols))
            .field("ambiguity", &(self.ambiguity as char))
            .finish()
    }
}

/// A validated, gap-free residue string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    id: String,
    residues: Vec<u8>,
}

impl Sequence {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn residues(&self) -> &[u8] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn as_str(&self) -> &str {
        // residues are always ASCII
        std::str::from_utf8(&self.residues).unwrap_or_default()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

/// Validates `raw` against `alphabet`, stripping whitespace and upper-casing.
pub fn validate_sequence(
    id: impl Into<String>,
    raw: &str,
    alphabet: &Alphabet,
) -> Result<Sequence, SeqError> {
    let mut residues = Vec::with_capacity(raw.len());
    for (position, ch) in raw.chars().filter(|c| !c.is_whitespace()).enumerate() {
        let ok = ch.is_ascii() && alphabet.code(ch as u8).is_some();
        if !ok {
            return Err(SeqError::IllegalSymbol {
                position,
                character: ch,
            });
        }
        residues.push((ch as u8).to_ascii_uppercase());
    }
    if residues.is_empty() {
        return Err(SeqError::EmptySequence);
    }
    Ok(Sequence {
        id: id.into(),
        residues,
    })
}

/// A sequence together with its ordinal in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Read {
    pub sequence: Sequence,
    pub source_index: usize,
}

impl Read {
    pub fn new(sequence: Sequence, source_index: usize) -> Self {
        Self {
            sequence,
            source_index,
        }
    }

    pub fn id(&self) -> &str {
        self.sequence.id()
    }

    /// Wraps sequences as reads numbered by position.
    pub fn from_sequences(seqs: impl IntoIterator<Item = Sequence>) -> Vec<Read> {
        seqs.into_iter()
            .enumerate()
            .map(|(i, s)| Read::new(s, i))
            .collect()
    }
}

/// One row of an alignment: residues, ambiguity symbols and gaps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlignedSequence {
    pub id: String,
    pub cells: Vec<u8>,
}

impl AlignedSequence {
    pub fn new(id: impl Into<String>, cells: Vec<u8>) -> Self {
        Self {
            id: id.into(),
            cells,
        }
    }

    /// Row for an unaligned sequence: its residues with no gaps.
    pub fn from_sequence(seq: &Sequence) -> Self {
        Self::new(seq.id(), seq.residues().to_vec())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.cells).unwrap_or_default()
    }

    pub fn residue_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != GAP).count()
    }
}

/// Removes every gap cell, keeping the row id.
pub fn strip_gaps(row: &AlignedSequence) -> Result<Sequence, SeqError> {
    let residues: Vec<u8> = row.cells.iter().copied().filter(|&c| c != GAP).collect();
    if residues.is_empty() {
        return Err(SeqError::EmptySequence);
    }
    Ok(Sequence {
        id: row.id.clone(),
        residues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dna(raw: &str) -> Result<Sequence, SeqError> {
        validate_sequence("s", raw, &Alphabet::dna())
    }

    #[test]
    fn lowercase_is_normalized() {
        assert_eq!(dna("acgt").unwrap().residues(), b"ACGT");
    }

    #[test]
    fn ambiguity_is_admitted() {
        assert_eq!(dna("ACGN").unwrap().residues(), b"ACGN");
        assert_eq!(dna("acgn").unwrap().residues(), b"ACGN");
    }

    #[test]
    fn gap_is_rejected_in_raw_reads() {
        assert_eq!(
            dna("AC-T"),
            Err(SeqError::IllegalSymbol {
                position: 2,
                character: '-'
            })
        );
    }

    #[test]
    fn whitespace_is_stripped_and_empty_rejected() {
        assert_eq!(dna(" A C\nG ").unwrap().residues(), b"ACG");
        assert_eq!(dna("  \n"), Err(SeqError::EmptySequence));
        assert_eq!(dna(""), Err(SeqError::EmptySequence));
    }

    #[test]
    fn non_ascii_is_rejected() {
        assert!(matches!(
            dna("ACé"),
            Err(SeqError::IllegalSymbol { position: 2, .. })
        ));
    }

    #[test]
    fn validation_is_idempotent() {
        let s = dna("acgNt").unwrap();
        let again = validate_sequence("s", s.as_str(), &Alphabet::dna()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn strip_gaps_cases() {
        let row = AlignedSequence::new("r", b"A-C".to_vec());
        assert_eq!(strip_gaps(&row).unwrap().residues(), b"AC");
        assert_eq!(strip_gaps(&row).unwrap().id(), "r");
        let row = AlignedSequence::new("r", b"ACGT".to_vec());
        assert_eq!(strip_gaps(&row).unwrap().residues(), b"ACGT");
        let row = AlignedSequence::new("r", b"--".to_vec());
        assert_eq!(strip_gaps(&row), Err(SeqError::EmptySequence));
    }

    #[test]
    fn alphabet_invariants() {
        assert!(Alphabet::new(b"", b'N').is_err());
        assert!(Alphabet::new(b"ACA", b'N').is_err());
        assert!(Alphabet::new(b"ACN", b'N').is_err());
        assert!(Alphabet::new(b"AC-", b'N').is_err());
        assert!(Alphabet::new(b"AC", b'-').is_err());
        let a = Alphabet::dna();
        assert_eq!(a.code(b'g'), Some(2));
        assert_eq!(a.code(b'N'), Some(4));
        assert_eq!(a.code(b'-'), None);
        assert_eq!(a.encode(b"ACGTN"), vec![0, 1, 2, 3, 4]);
    }
}
