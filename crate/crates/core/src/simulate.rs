//! Seeded read simulator with substitution and indel errors.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::seq::{validate_sequence, Alphabet, Read, Sequence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("{name} rate {value} is outside [0, 0.5)")]
    InvalidRate { name: &'static str, value: f64 },
    #[error("read length {read_length} exceeds reference length {reference_length}")]
    ReadTooLong {
        read_length: usize,
        reference_length: usize,
    },
    #[error("read length must be at least 1")]
    ZeroLength,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub count: usize,
    pub read_length: usize,
    pub substitution_rate: f64,
    pub indel_rate: f64,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            count: 100,
            read_length: 100,
            substitution_rate: 0.0,
            indel_rate: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthRecord {
    pub read_id: String,
    pub true_start: usize,
}

#[derive(Debug, Clone)]
pub struct SimulatedReads {
    pub reads: Vec<Read>,
    pub truth: Vec<TruthRecord>,
}

fn check_rate(name: &'static str, value: f64) -> Result<(), SimulationError> {
    if (0.0..0.5).contains(&value) {
        Ok(())
    } else {
        Err(SimulationError::InvalidRate { name, value })
    }
}

/// Draws `count` reads at uniform start positions. Each template base is
/// independently hit by an indel with probability `indel_rate` (deletion or
/// insertion of a random residue, equally likely), otherwise substituted with
/// probability `substitution_rate` by a different residue.
pub fn simulate_reads(
    reference: &Sequence,
    alphabet: &Alphabet,
    config: &SimulationConfig,
) -> Result<SimulatedReads, SimulationError> {
    check_rate("substitution", config.substitution_rate)?;
    check_rate("indel", config.indel_rate)?;
    if config.read_length == 0 {
        return Err(SimulationError::ZeroLength);
    }
    if config.read_length > reference.len() {
        return Err(SimulationError::ReadTooLong {
            read_length: config.read_length,
            reference_length: reference.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let symbols = alphabet.symbols();
    let width = (config.count.max(1) - 1).to_string().len();

    let mut reads = Vec::with_capacity(config.count);
    let mut truth = Vec::with_capacity(config.count);
    for i in 0..config.count {
        let start = rng.random_range(0..=reference.len() - config.read_length);
        let template = &reference.residues()[start..start + config.read_length];
        let mut body = Vec::with_capacity(template.len() + 8);
        for &base in template {
            if config.indel_rate > 0.0 && rng.random_bool(config.indel_rate) {
                if rng.random_bool(0.5) {
                    continue;
                }
                body.push(symbols[rng.random_range(0..symbols.len())]);
                body.push(base);
            } else if config.substitution_rate > 0.0 && rng.random_bool(config.substitution_rate) {
                body.push(substitute(base, symbols, &mut rng));
            } else {
                body.push(base);
            }
        }
        if body.is_empty() {
            body.push(template[0]);
        }
        let id = format!("read{i:0width$}");
        let text = String::from_utf8(body).expect("residues are ASCII");
        let seq = validate_sequence(id.clone(), &text, alphabet)
            .expect("simulated residues come from the reference or alphabet");
        reads.push(Read::new(seq, i));
        truth.push(TruthRecord {
            read_id: id,
            true_start: start,
        });
    }
    Ok(SimulatedReads { reads, truth })
}

fn substitute(base: u8, symbols: &[u8], rng: &mut impl Rng) -> u8 {
    if symbols.len() < 2 {
        return base;
    }
    loop {
        let s = symbols[rng.random_range(0..symbols.len())];
        if s != base {
            return s;
        }
    }
}

/// Uniform random reference over the alphabet's residues.
pub fn random_reference(id: &str, length: usize, alphabet: &Alphabet, seed: u64) -> Sequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = alphabet.symbols();
    let body: String = (0..length.max(1))
        .map(|_| symbols[rng.random_range(0..symbols.len())] as char)
        .collect();
    validate_sequence(id, &body, alphabet).expect("alphabet residues validate")
}

/// `read_id<TAB>true_start`, one line per read.
pub fn write_truth<W: Write>(mut w: W, truth: &[TruthRecord]) -> io::Result<()> {
    for t in truth {
        writeln!(w, "{}\t{}", t.read_id, t.true_start)?;
    }
    Ok(())
}

pub fn write_truth_file(path: impl AsRef<Path>, truth: &[TruthRecord]) -> io::Result<()> {
    let mut w = io::BufWriter::new(fs::File::create(path)?);
    write_truth(&mut w, truth)?;
    w.flush()
}

pub fn parse_truth(text: &str) -> Result<Vec<TruthRecord>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let (id, start) = l
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected two tab-separated fields", i + 1))?;
            let true_start = start
                .trim()
                .parse()
                .map_err(|_| format!("line {}: bad start {start:?}", i + 1))?;
            Ok(TruthRecord {
                read_id: id.to_string(),
                true_start,
            })
        })
        .collect()
}
