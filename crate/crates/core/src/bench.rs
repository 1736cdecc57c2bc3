//! Timing harness: runs the pipeline over a grid of read counts and fits the
//! growth exponent of total time against N.

use std::fmt::Write as _;

use crate::pipeline::{align_reads, AlignOptions, PipelineError};
use crate::seq::Sequence;
use crate::simulate::{simulate_reads, SimulationConfig};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub grid: Vec<usize>,
    pub read_length: usize,
    pub substitution_rate: f64,
    pub indel_rate: f64,
    pub seed: u64,
    /// Runs per grid point; each stage keeps its fastest run.
    pub repeats: usize,
    pub options: AlignOptions,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            grid: vec![250, 500, 1000, 2000],
            read_length: 100,
            substitution_rate: 0.01,
            indel_rate: 0.0,
            seed: 1,
            repeats: 1,
            options: AlignOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub reads: usize,
    pub overlap: f64,
    pub ordering: f64,
    pub pairing: f64,
    pub merging: f64,
    pub total: f64,
    pub width: usize,
}

impl BenchRow {
    pub fn stages(&self) -> [(&'static str, f64); 4] {
        [
            ("overlap", self.overlap),
            ("ordering", self.ordering),
            ("pairing", self.pairing),
            ("merging", self.merging),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of ln(total) on ln(N); needs two distinct N.
    pub exponent: Option<f64>,
}

impl BenchTable {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>8} {:>10} {:>10} {:>10} {:>10} {:>10} {:>8}",
            "reads", "overlap_s", "order_s", "pairing_s", "merging_s", "total_s", "width"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>8} {:>10.4} {:>10.6} {:>10.4} {:>10.4} {:>10.4} {:>8}",
                r.reads, r.overlap, r.ordering, r.pairing, r.merging, r.total, r.width
            );
        }
        match self.exponent {
            Some(e) => {
                let _ = writeln!(s, "growth exponent (total vs reads): {e:.3}");
            }
            None => {
                let _ = writeln!(s, "growth exponent (total vs reads): n/a");
            }
        }
        s
    }
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

pub fn benchmark(reference: &Sequence, config: &BenchConfig) -> Result<BenchTable, PipelineError> {
    let alphabet = config.options.scheme.alphabet();
    let mut rows = Vec::with_capacity(config.grid.len());
    for (k, &n) in config.grid.iter().enumerate() {
        let sim = simulate_reads(
            reference,
            alphabet,
            &SimulationConfig {
                count: n,
                read_length: config.read_length,
                substitution_rate: config.substitution_rate,
                indel_rate: config.indel_rate,
                seed: config.seed.wrapping_add(k as u64),
            },
        )?;
        let mut best: Option<BenchRow> = None;
        for _ in 0..config.repeats.max(1) {
            let out = align_reads(reference, sim.reads.clone(), &config.options)?;
            let r = &out.report;
            let row = BenchRow {
                reads: n,
                overlap: r.overlap_seconds,
                ordering: r.ordering_seconds,
                pairing: r.pairing_seconds,
                merging: r.merging_seconds,
                total: r.total_seconds,
                width: r.alignment_width,
            };
            best = Some(match best {
                None => row,
                Some(b) => BenchRow {
                    overlap: b.overlap.min(row.overlap),
                    ordering: b.ordering.min(row.ordering),
                    pairing: b.pairing.min(row.pairing),
                    merging: b.merging.min(row.merging),
                    total: b.total.min(row.total),
                    ..b
                },
            });
        }
        rows.push(best.expect("at least one repeat"));
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.reads as f64, r.total)).collect();
    Ok(BenchTable {
        exponent: loglog_slope(&points),
        rows,
    })
}
