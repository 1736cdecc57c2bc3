//! Reference implementations used to check the kernels. Each one is written
//! from the definition of the quantity, not from the production recurrence.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pyralign_core::profile::profile_of_row;
use pyralign_core::{
    build_profile, validate_sequence, AlignedSequence, Alphabet, Profile, ScoringScheme, Sequence,
};

pub const DNA: &[u8] = b"ACGT";

/// Integer scores for the oracles: match, mismatch, linear gap.
#[derive(Clone, Copy, Debug)]
pub struct IntScores {
    pub matched: i64,
    pub mismatched: i64,
    pub gap: i64,
}

impl IntScores {
    pub const DEFAULT: IntScores = IntScores {
        matched: 2,
        mismatched: -3,
        gap: -5,
    };

    pub fn sub(&self, a: u8, b: u8) -> i64 {
        if a == b {
            self.matched
        } else {
            self.mismatched
        }
    }

    pub fn scheme(&self) -> ScoringScheme {
        pyralign_core::simple_dna_model(self.matched as f64, self.mismatched as f64)
            .unwrap()
            .with_linear_gap(self.gap as f64)
            .unwrap()
    }
}

pub fn seq(id: &str, s: &[u8]) -> Sequence {
    validate_sequence(id, std::str::from_utf8(s).unwrap(), &Alphabet::dna()).unwrap()
}

/// Every string over ACGT with length in `1..=max_len`.
pub fn all_strings(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s| {
                DNA.iter().map(move |&c| {
                    let mut t = s.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn random_string(rng: &mut impl Rng, min: usize, max: usize) -> Vec<u8> {
    let len = rng.random_range(min..=max);
    (0..len).map(|_| DNA[rng.random_range(0..4)]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Diag,
    Up,
    Left,
}

/// Every monotone path from (0,0) to (m,n), i.e. every global alignment.
pub fn all_paths(m: usize, n: usize) -> Vec<Vec<Step>> {
    fn rec(i: usize, j: usize, m: usize, n: usize, cur: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        if i == m && j == n {
            out.push(cur.clone());
            return;
        }
        for (step, di, dj) in [(Step::Diag, 1, 1), (Step::Up, 1, 0), (Step::Left, 0, 1)] {
            if i + di <= m && j + dj <= n {
                cur.push(step);
                rec(i + di, j + dj, m, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, 0, m, n, &mut Vec::new(), &mut out);
    out
}

type Cell = (usize, usize);

/// Per-move scores along a path, with the cell each move leaves and enters.
fn walk(x: &[u8], y: &[u8], path: &[Step], s: IntScores) -> Vec<(i64, Cell, Cell)> {
    let (mut i, mut j) = (0, 0);
    path.iter()
        .map(|st| {
            let from = (i, j);
            let v = match st {
                Step::Diag => {
                    i += 1;
                    j += 1;
                    s.sub(x[i - 1], y[j - 1])
                }
                Step::Up => {
                    i += 1;
                    s.gap
                }
                Step::Left => {
                    j += 1;
                    s.gap
                }
            };
            (v, from, (i, j))
        })
        .collect()
}

/// Best overlap score by enumerating every alignment of `x` and `y`. Gaps
/// before the first or after the last residue of either sequence are free.
pub fn overlap_by_paths(x: &[u8], y: &[u8], paths: &[Vec<Step>], s: IntScores) -> i64 {
    let (m, n) = (x.len(), y.len());
    paths
        .iter()
        .map(|p| {
            walk(x, y, p, s)
                .into_iter()
                .filter(|&(_, from, to)| !(to.0 == 0 || to.1 == 0 || from.0 == m || from.1 == n))
                .map(|(v, _, _)| v)
                .sum::<i64>()
        })
        .max()
        .unwrap()
}

/// Best local score by enumerating every alignment and taking its best
/// contiguous run of columns (possibly empty).
pub fn local_by_paths(x: &[u8], y: &[u8], paths: &[Vec<Step>], s: IntScores) -> i64 {
    paths
        .iter()
        .map(|p| {
            let (mut best, mut run) = (0i64, 0i64);
            for (v, _, _) in walk(x, y, p, s) {
                run = (run + v).max(v);
                best = best.max(run);
            }
            best
        })
        .max()
        .unwrap()
}

/// Global alignment scores of `x[i0..i]` against `y[j0..j]` for all `(i, j)`,
/// computed forward from `(i0, j0)`. Cells not reachable hold `None`.
fn forward_global(x: &[u8], y: &[u8], i0: usize, j0: usize, s: IntScores) -> Vec<Vec<Option<i64>>> {
    let (m, n) = (x.len(), y.len());
    let mut t = vec![vec![None; n + 1]; m + 1];
    t[i0][j0] = Some(0);
    for i in i0..=m {
        for j in j0..=n {
            let Some(v) = t[i][j] else { continue };
            let mut push = |a: usize, b: usize, w: i64| {
                let cand = v + w;
                if t[a][b].is_none_or(|old| cand > old) {
                    t[a][b] = Some(cand);
                }
            };
            if i < m && j < n {
                push(i + 1, j + 1, s.sub(x[i], y[j]));
            }
            if i < m {
                push(i + 1, j, s.gap);
            }
            if j < n {
                push(i, j + 1, s.gap);
            }
        }
    }
    t
}

/// Best overlap score as the best global alignment between any start on the
/// first row or column and any end on the last row or column.
pub fn overlap_by_placements(x: &[u8], y: &[u8], s: IntScores) -> i64 {
    let (m, n) = (x.len(), y.len());
    let starts = (0..=m).map(|i| (i, 0)).chain((1..=n).map(|j| (0, j)));
    let mut best = i64::MIN;
    for (i0, j0) in starts {
        let t = forward_global(x, y, i0, j0, s);
        for (i, row) in t.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                if let Some(v) = cell {
                    if i == m || j == n {
                        best = best.max(*v);
                    }
                }
            }
        }
    }
    best
}

/// Best local score as the best global alignment of any pair of substrings,
/// the empty pair included.
pub fn local_by_substrings(x: &[u8], y: &[u8], s: IntScores) -> i64 {
    let mut best = 0;
    for i0 in 0..=x.len() {
        for j0 in 0..=y.len() {
            let t = forward_global(x, y, i0, j0, s);
            for v in t.iter().flatten().flatten() {
                best = best.max(*v);
            }
        }
    }
    best
}

/// Random alignment rows without all-gap columns: `members` rows of `width`
/// cells, each row holding at least one residue.
pub fn random_rows(
    rng: &mut impl Rng,
    prefix: &str,
    members: usize,
    width: usize,
    gap_p: f64,
) -> Vec<AlignedSequence> {
    let mut rows: Vec<Vec<u8>> = (0..members)
        .map(|_| {
            (0..width)
                .map(|_| {
                    if rng.random_bool(gap_p) {
                        b'-'
                    } else {
                        DNA[rng.random_range(0..4)]
                    }
                })
                .collect()
        })
        .collect();
    for c in 0..width {
        if rows.iter().all(|r| r[c] == b'-') {
            let r = rng.random_range(0..members);
            rows[r][c] = DNA[rng.random_range(0..4)];
        }
    }
    rows.into_iter()
        .enumerate()
        .map(|(i, cells)| AlignedSequence::new(format!("{prefix}{i}"), cells))
        .collect()
}

pub fn random_profile(
    rng: &mut impl Rng,
    prefix: &str,
    max_members: usize,
    max_width: usize,
) -> Profile {
    let members = rng.random_range(1..=max_members);
    let width = rng.random_range(1..=max_width);
    let rows = random_rows(rng, prefix, members, width, 0.3);
    if members == 1 {
        profile_of_row(rows.into_iter().next().unwrap(), &Alphabet::dna()).unwrap()
    } else {
        build_profile(rows, &Alphabet::dna()).unwrap()
    }
}

/// Rows restricted to the columns where at least one of them has a residue.
pub fn drop_all_gap_columns(rows: &[AlignedSequence]) -> Vec<AlignedSequence> {
    let width = rows.iter().map(|r| r.cells.len()).max().unwrap_or(0);
    let keep: Vec<usize> = (0..width)
        .filter(|&c| {
            rows.iter()
                .any(|r| r.cells.get(c).is_some_and(|&b| b != b'-'))
        })
        .collect();
    rows.iter()
        .map(|r| AlignedSequence::new(r.id.clone(), keep.iter().map(|&c| r.cells[c]).collect()))
        .collect()
}

/// Joint and background probabilities of a random symmetric substitution
/// model over `k` residues.
pub fn random_model(rng: &mut impl Rng, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let w: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| rng.random_range(0.05..1.0) * if i == j { 4.0 } else { 1.0 })
                .collect()
        })
        .collect();
    let mut joint: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| w[i.min(j)][i.max(j)]).collect())
        .collect();
    let total: f64 = joint.iter().flatten().sum();
    for row in &mut joint {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    let background = joint.iter().map(|row| row.iter().sum()).collect();
    (background, joint)
}

/// Random frequency vector over `k` residues plus a gap share, summing to one.
pub fn random_column(rng: &mut impl Rng, k: usize) -> (Vec<f64>, f64) {
    let mut w: Vec<f64> = (0..=k)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[0] = 1.0;
    }
    let total: f64 = w.iter().sum();
    let gap = w[k] / total;
    let res: Vec<f64> = w[..k].iter().map(|v| v / total).collect();
    (res, gap)
}

/// `sum_i sum_j fx_i fy_j ln(p_ij / (p_i p_j))`, term by term.
pub fn psp_oracle(fx: &[f64], fy: &[f64], background: &[f64], joint: &[Vec<f64>]) -> (f64, f64) {
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for (i, &a) in fx.iter().enumerate() {
        for (j, &b) in fy.iter().enumerate() {
            let term = a * b * (joint[i][j] / (background[i] * background[j])).ln();
            sum += term;
            magnitude += term.abs();
        }
    }
    (sum, magnitude)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
