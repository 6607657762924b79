use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::recovery::SymbolPair;
use crate::{Error, Result};

/// Rows of a table must sum to one within this tolerance.
pub(crate) const ROW_SUM_TOL: f64 = 1e-9;

/// Fixed input distribution `P_X` over `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InputDist {
    pub p0: f64,
    pub p1: f64,
}

impl InputDist {
    pub fn uniform() -> Self {
        InputDist { p0: 0.5, p1: 0.5 }
    }

    /// Distribution with `P(x = 1) = p1`.
    pub fn new(p1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::param("px", "P(x=1) must lie in [0, 1]"));
        }
        Ok(InputDist { p0: 1.0 - p1, p1 })
    }

    pub fn prob(&self, x: usize) -> f64 {
        if x == 0 {
            self.p0
        } else {
            self.p1
        }
    }
}

impl Default for InputDist {
    fn default() -> Self {
        Self::uniform()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum TableKind {
    /// Two output bins split at `threshold` (volts); `v >= threshold` is bin 1.
    Hard { threshold: f64 },
    /// `K` equal-width bins starting at `origin`.
    Soft { bin_width: f64, origin: f64 },
}

/// Estimated channel `P(output bin | x)` for a binary input.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransitionTable {
    pub kind: TableKind,
    /// `rows[x][bin]`.
    pub rows: [Vec<f64>; 2],
    /// Raw event counts `N(bin | x)`; empty when the table was given directly
    /// as probabilities.
    pub counts: [Vec<u64>; 2],
}

impl TransitionTable {
    /// Normalizes per-input counts into a table.
    pub fn from_counts(kind: TableKind, counts: [Vec<u64>; 2]) -> Result<Self> {
        if counts[0].len() != counts[1].len() || counts[0].is_empty() {
            return Err(Error::LengthMismatch {
                expected: counts[0].len(),
                actual: counts[1].len(),
            });
        }
        let mut rows = [Vec::new(), Vec::new()];
        for x in 0..2 {
            let n: u64 = counts[x].iter().sum();
            if n == 0 {
                return Err(Error::MissingInput(x as u8));
            }
            rows[x] = counts[x].iter().map(|&c| c as f64 / n as f64).collect();
        }
        Ok(TransitionTable { kind, rows, counts })
    }

    /// Wraps explicit probabilities, checking that each row is a distribution.
    pub fn from_rows(kind: TableKind, rows: [Vec<f64>; 2]) -> Result<Self> {
        if rows[0].len() != rows[1].len() || rows[0].is_empty() {
            return Err(Error::LengthMismatch {
                expected: rows[0].len(),
                actual: rows[1].len(),
            });
        }
        for row in &rows {
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::param(
                    "rows",
                    "probabilities must be finite and >= 0",
                ));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::param("rows", "each row must sum to 1"));
            }
        }
        Ok(TransitionTable {
            kind,
            rows,
            counts: [Vec::new(), Vec::new()],
        })
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::from_rows(
            TableKind::Hard { threshold: 0.5 },
            [vec![1.0 - p, p], vec![p, 1.0 - p]],
        )
    }

    /// Number of output bins `K`.
    pub fn bins(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_hard(&self) -> bool {
        matches!(self.kind, TableKind::Hard { .. })
    }

    /// Merges bins `< split` into output 0 and the rest into output 1.
    pub fn coarsen(&self, split: usize) -> Self {
        let merge = |row: &[f64]| {
            let lo: f64 = row[..split.min(row.len())].iter().sum();
            let hi: f64 = row[split.min(row.len())..].iter().sum();
            vec![lo, hi]
        };
        let threshold = match self.kind {
            TableKind::Soft { bin_width, origin } => origin + split as f64 * bin_width,
            TableKind::Hard { threshold } => threshold,
        };
        TransitionTable {
            kind: TableKind::Hard { threshold },
            rows: [merge(&self.rows[0]), merge(&self.rows[1])],
            counts: [Vec::new(), Vec::new()],
        }
    }

    /// Equal-weight mixture `E[W]` of tables with the same bin layout.
    pub fn mixture(tables: &[&TransitionTable]) -> Result<Self> {
        let first = tables
            .first()
            .ok_or(Error::EmptyInput("no tables to mix"))?;
        let k = first.bins();
        let mut rows = [vec![0.0; k], vec![0.0; k]];
        for t in tables {
            if t.bins() != k {
                return Err(Error::LengthMismatch {
                    expected: k,
                    actual: t.bins(),
                });
            }
            for (row, src) in rows.iter_mut().zip(&t.rows) {
                for (acc, p) in row.iter_mut().zip(src) {
                    *acc += p / tables.len() as f64;
                }
            }
        }
        Ok(TransitionTable {
            kind: first.kind,
            rows,
            counts: [Vec::new(), Vec::new()],
        })
    }
}

fn class_counts(pairs: &[SymbolPair]) -> Result<[u64; 2]> {
    let n1 = pairs.iter().filter(|p| p.x).count() as u64;
    let n0 = pairs.len() as u64 - n1;
    if n0 == 0 {
        return Err(Error::MissingInput(0));
    }
    if n1 == 0 {
        return Err(Error::MissingInput(1));
    }
    Ok([n0, n1])
}

/// Hard-decision table at `y_th`. A value equal to the threshold is counted
/// in output 1 only, so each row stays normalized.
pub fn hard_transition(pairs: &[SymbolPair], y_th: f64) -> Result<TransitionTable> {
    let n = class_counts(pairs)?;
    let mut above = [0u64; 2];
    for p in pairs {
        if p.v >= y_th {
            above[p.x as usize] += 1;
        }
    }
    Ok(hard_table_from(y_th, n, above))
}

/// `P(1|x) = above/N(x)` and `P(0|x) = 1 - P(1|x)`.
pub(crate) fn hard_table_from(y_th: f64, n: [u64; 2], above: [u64; 2]) -> TransitionTable {
    let row = |x: usize| {
        let p1 = above[x] as f64 / n[x] as f64;
        vec![1.0 - p1, p1]
    };
    TransitionTable {
        kind: TableKind::Hard { threshold: y_th },
        rows: [row(0), row(1)],
        counts: [
            vec![n[0] - above[0], above[0]],
            vec![n[1] - above[1], above[1]],
        ],
    }
}

/// Soft-decision histogram table with bin width `delta`.
///
/// Bins start at the smallest voltage; `K = max(1, ceil(range / delta))` and
/// the last bin is closed, so the largest voltage always lands in bin `K-1`.
pub fn soft_transition(pairs: &[SymbolPair], delta: f64) -> Result<TransitionTable> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::param("delta", "bin width must be positive"));
    }
    class_counts(pairs)?;
    let layout = BinLayout::new(pairs, delta)?;
    let mut counts = [vec![0u64; layout.bins], vec![0u64; layout.bins]];
    for p in pairs {
        counts[p.x as usize][layout.index(p.v)] += 1;
    }
    TransitionTable::from_counts(
        TableKind::Soft {
            bin_width: delta,
            origin: layout.origin,
        },
        counts,
    )
}

/// Upper limit on dense histogram size.
const MAX_DENSE_BINS: usize = 1 << 26;

#[derive(Debug, Clone, Copy)]
pub(crate) struct BinLayout {
    pub origin: f64,
    pub delta: f64,
    pub bins: usize,
}

impl BinLayout {
    pub(crate) fn new(pairs: &[SymbolPair], delta: f64) -> Result<Self> {
        let (lo, hi) = pairs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.v), hi.max(p.v))
            });
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::param("v", "voltages must be finite"));
        }
        let ratio = ((hi - lo) / delta).ceil();
        if ratio > MAX_DENSE_BINS as f64 {
            return Err(Error::param(
                "delta",
                "bin width too small for the data range",
            ));
        }
        Ok(BinLayout {
            origin: lo,
            delta,
            bins: (ratio as usize).max(1),
        })
    }

    pub(crate) fn index(&self, v: f64) -> usize {
        let i = ((v - self.origin) / self.delta).floor();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.bins - 1)
        }
    }
}
