//! Alignment writers: aligned FASTA and Clustal-style blocks.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use crate::fasta::write_fasta;
use crate::seq::{AlignedSequence, GAP};

pub const CLUSTAL_BLOCK: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    AlignedFasta,
    Clustal,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aligned-fasta" | "fasta" => Ok(OutputFormat::AlignedFasta),
            "clustal" => Ok(OutputFormat::Clustal),
            other => Err(format!("unknown output format {other:?}")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::AlignedFasta => "aligned-fasta",
            OutputFormat::Clustal => "clustal",
        })
    }
}

pub fn render_alignment<W: Write>(
    w: W,
    rows: &[AlignedSequence],
    format: OutputFormat,
) -> io::Result<()> {
    let width = rows.iter().map(AlignedSequence::len).max().unwrap_or(0);
    match format {
        OutputFormat::AlignedFasta => write_aligned_fasta(w, rows, width),
        OutputFormat::Clustal => write_clustal(w, rows, width),
    }
}

pub fn write_alignment(
    rows: &[AlignedSequence],
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> io::Result<()> {
    let mut w = io::BufWriter::new(fs::File::create(path)?);
    render_alignment(&mut w, rows, format)?;
    w.flush()
}

fn padded(row: &AlignedSequence, width: usize) -> Vec<u8> {
    let mut cells = row.cells.clone();
    cells.resize(width, GAP);
    cells
}

fn write_aligned_fasta<W: Write>(w: W, rows: &[AlignedSequence], width: usize) -> io::Result<()> {
    let bodies: Vec<Vec<u8>> = rows.iter().map(|r| padded(r, width)).collect();
    write_fasta(
        w,
        rows.iter()
            .zip(&bodies)
            .map(|(r, b)| (r.id.as_str(), b.as_slice())),
    )
}

fn write_clustal<W: Write>(mut w: W, rows: &[AlignedSequence], width: usize) -> io::Result<()> {
    writeln!(w, "CLUSTAL W multiple sequence alignment")?;
    writeln!(w)?;
    let name_width = rows.iter().map(|r| r.id.len()).max().unwrap_or(0) + 6;
    let bodies: Vec<Vec<u8>> = rows.iter().map(|r| padded(r, width)).collect();
    let mut start = 0;
    while start < width {
        let end = (start + CLUSTAL_BLOCK).min(width);
        writeln!(w)?;
        for (row, body) in rows.iter().zip(&bodies) {
            write!(w, "{:<name_width$}", row.id)?;
            w.write_all(&body[start..end])?;
            writeln!(w)?;
        }
        let marks: String = (start..end)
            .map(|c| {
                let first = bodies[0][c];
                let conserved = first != GAP && bodies.iter().all(|b| b[c] == first);
                if conserved {
                    '*'
                } else {
                    ' '
                }
            })
            .collect();
        writeln!(w, "{:<name_width$}{}", "", marks.trim_end())?;
        start = end;
    }
    Ok(())
}
