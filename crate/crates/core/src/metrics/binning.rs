//! Choosing the histogram bin width for soft-decision mutual information.
//!
//! Coarse bins underestimate the soft MI (towards the hard-decision value);
//! very fine bins with a finite sample inflate it because the two input
//! classes end up in disjoint bins. A sweep over bin widths shows a plateau
//! between the two regimes and the selected width is the finest one still on
//! that plateau.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::info::mi_rows;
use super::transition::{BinLayout, InputDist};
use crate::recovery::SymbolPair;
use crate::{Error, Result};

/// Relative MI tolerance that defines the plateau.
pub const PLATEAU_TOLERANCE: f64 = 0.02;

/// Minimum number of sweep points on a plateau.
const MIN_PLATEAU_POINTS: usize = 3;

const MIN_SWEEP_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinWidthChoice {
    pub delta: f64,
    pub mi: f64,
    /// `false` when no plateau was found and the median width was used.
    pub on_plateau: bool,
}

/// Soft MI for each bin width in `deltas`, in the given order.
///
/// Only occupied bins are materialized, so very fine widths are cheap; the
/// binning itself is identical to [`soft_transition`](super::soft_transition).
pub fn bin_width_sweep(
    pairs: &[SymbolPair],
    deltas: &[f64],
    px: &InputDist,
) -> Result<Vec<(f64, f64)>> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("no symbols to bin"));
    }
    let n1 = pairs.iter().filter(|p| p.x).count();
    if n1 == 0 {
        return Err(Error::MissingInput(1));
    }
    if n1 == pairs.len() {
        return Err(Error::MissingInput(0));
    }
    let n = [(pairs.len() - n1) as f64, n1 as f64];

    let mut keyed: Vec<(usize, bool)> = Vec::with_capacity(pairs.len());
    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::param("delta", "bin widths must be positive"));
        }
        let layout = sparse_layout(pairs, delta);
        keyed.clear();
        keyed.extend(pairs.iter().map(|p| (layout.index(p.v), p.x)));
        keyed.sort_unstable();

        let mut rows: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        let mut i = 0;
        while i < keyed.len() {
            let bin = keyed[i].0;
            let mut c = [0u64; 2];
            while i < keyed.len() && keyed[i].0 == bin {
                c[keyed[i].1 as usize] += 1;
                i += 1;
            }
            rows[0].push(c[0] as f64 / n[0]);
            rows[1].push(c[1] as f64 / n[1]);
        }
        out.push((delta, mi_rows([&rows[0], &rows[1]], px)));
    }
    Ok(out)
}

fn sparse_layout(pairs: &[SymbolPair], delta: f64) -> BinLayout {
    let (lo, hi) = pairs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.v), hi.max(p.v))
        });
    let ratio = ((hi - lo) / delta).ceil();
    BinLayout {
        origin: lo,
        delta,
        bins: if ratio >= usize::MAX as f64 {
            usize::MAX
        } else {
            (ratio as usize).max(1)
        },
    }
}

/// Picks the finest bin width on the first MI plateau of a sweep ordered by
/// decreasing width.
///
/// The plateau starts at the first step whose relative MI change is within
/// [`PLATEAU_TOLERANCE`] and extends as long as the MI stays within that
/// tolerance of the plateau's first value; it must span at least three
/// points. Without a plateau the median width is returned with
/// `on_plateau = false`.
pub fn select_bin_width(sweep: &[(f64, f64)]) -> Result<BinWidthChoice> {
    if sweep.len() < MIN_SWEEP_POINTS {
        return Err(Error::param(
            "sweep",
            alloc::format!(
                "need at least {MIN_SWEEP_POINTS} points, got {}",
                sweep.len()
            ),
        ));
    }
    if sweep.windows(2).any(|w| !(w[1].0 < w[0].0)) {
        return Err(Error::param(
            "sweep",
            "bin widths must be strictly decreasing",
        ));
    }

    let eps = PLATEAU_TOLERANCE;
    let within = |mi: f64, level: f64| (mi - level).abs() <= eps * level;

    let mut start = 0;
    while start + 1 < sweep.len() {
        let level = sweep[start].1;
        if level > 0.0 && within(sweep[start + 1].1, level) {
            let mut end = start + 1;
            while end + 1 < sweep.len() && within(sweep[end + 1].1, level) {
                end += 1;
            }
            if end + 1 - start >= MIN_PLATEAU_POINTS {
                return Ok(BinWidthChoice {
                    delta: sweep[end].0,
                    mi: sweep[end].1,
                    on_plateau: true,
                });
            }
        }
        start += 1;
    }

    let mid = sweep.len() / 2;
    Ok(BinWidthChoice {
        delta: sweep[mid].0,
        mi: sweep[mid].1,
        on_plateau: false,
    })
}

/// Geometric sweep grid from `widest` down by a factor `sqrt(2)` per step.
pub fn geometric_widths(widest: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| widest * (-(k as f64) / 2.0).exp2())
        .collect()
}
