//! Minimal FASTA reading and writing.

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::seq::{validate_sequence, Alphabet, Sequence};

#[derive(Debug, Error)]
pub enum FastaError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate record id {0}")]
    DuplicateId(String),
}

impl FastaError {
    pub fn line(&self) -> Option<usize> {
        match self {
            FastaError::Parse { line, .. } => Some(*line),
            _ => None,
        }
    }
}

pub fn parse_fasta(
    path: impl AsRef<Path>,
    alphabet: &Alphabet,
) -> Result<Vec<Sequence>, FastaError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FastaError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_fasta_str(&text, alphabet)
}

/// Parses FASTA text. Ids are the first whitespace-delimited token of each
/// header; sequence lines are concatenated; blank lines are ignored.
pub fn parse_fasta_str(text: &str, alphabet: &Alphabet) -> Result<Vec<Sequence>, FastaError> {
    struct Pending {
        id: String,
        header_line: usize,
        body: String,
    }

    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut current: Option<Pending> = None;

    let mut finish = |rec: Pending, out: &mut Vec<Sequence>| -> Result<(), FastaError> {
        if !seen.insert(rec.id.clone()) {
            return Err(FastaError::DuplicateId(rec.id));
        }
        let seq =
            validate_sequence(rec.id, &rec.body, alphabet).map_err(|e| FastaError::Parse {
                line: rec.header_line,
                message: e.to_string(),
            })?;
        out.push(seq);
        Ok(())
    };

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            if let Some(rec) = current.take() {
                finish(rec, &mut out)?;
            }
            let id = header.split_whitespace().next().ok_or(FastaError::Parse {
                line: line_no,
                message: "header has no id".into(),
            })?;
            current = Some(Pending {
                id: id.to_string(),
                header_line: line_no,
                body: String::new(),
            });
        } else {
            let rec = current.as_mut().ok_or(FastaError::Parse {
                line: line_no,
                message: "sequence data before the first header".into(),
            })?;
            if let Some(bad) = line.chars().find(|c| {
                !c.is_whitespace() && !(c.is_ascii() && alphabet.code(*c as u8).is_some())
            }) {
                return Err(FastaError::Parse {
                    line: line_no,
                    message: format!("illegal symbol {bad:?}"),
                });
            }
            rec.body.push_str(line);
        }
    }
    if let Some(rec) = current.take() {
        finish(rec, &mut out)?;
    }
    Ok(out)
}

/// Writes one record per item with the body on a single line.
pub fn write_fasta<'a, W: Write>(
    mut w: W,
    records: impl IntoIterator<Item = (&'a str, &'a [u8])>,
) -> io::Result<()> {
    for (id, body) in records {
        writeln!(w, ">{id}")?;
        w.write_all(body)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_sequences(path: impl AsRef<Path>, seqs: &[Sequence]) -> Result<(), FastaError> {
    let path = path.as_ref();
    let io_err = |source| FastaError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = io::BufWriter::new(file);
    write_fasta(&mut w, seqs.iter().map(|s| (s.id(), s.residues()))).map_err(io_err)?;
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<Sequence>, FastaError> {
        parse_fasta_str(text, &Alphabet::dna())
    }

    #[test]
    fn multi_line_body() {
        let v = parse(">r1 some description\nAC\nGT\n").unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].id(), "r1");
        assert_eq!(v[0].residues(), b"ACGT");
    }

    #[test]
    fn order_preserved_and_blank_lines_skipped() {
        let v = parse(">b\nAC\n\n>a\ngg\r\n").unwrap();
        let ids: Vec<_> = v.iter().map(Sequence::id).collect();
        assert_eq!(ids, ["b", "a"]);
        assert_eq!(v[1].residues(), b"GG");
    }

    #[test]
    fn duplicate_id() {
        assert!(matches!(
            parse(">a\nAC\n>a\nGG\n"),
            Err(FastaError::DuplicateId(id)) if id == "a"
        ));
    }

    #[test]
    fn missing_header() {
        let err = parse("ACGT\n").unwrap_err();
        assert_eq!(err.line(), Some(1));
    }

    #[test]
    fn bad_symbol_reports_its_line() {
        let err = parse(">a\nACGT\nAC-T\n").unwrap_err();
        assert_eq!(err.line(), Some(3));
    }

    #[test]
    fn empty_record_and_empty_header() {
        assert_eq!(parse(">a\n>b\nAC\n").unwrap_err().line(), Some(1));
        assert_eq!(parse(">\nAC\n").unwrap_err().line(), Some(1));
    }

    #[test]
    fn empty_text_is_empty_list() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn write_then_parse() {
        let v = parse(">x\nACGT\n>y\nNNA\n").unwrap();
        let mut buf = Vec::new();
        write_fasta(&mut buf, v.iter().map(|s| (s.id(), s.residues()))).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            ">x\nACGT\n>y\nNNA\n"
        );
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap(), v);
    }
}
