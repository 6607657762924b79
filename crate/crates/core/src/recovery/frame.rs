use alloc::vec::Vec;

use super::sync::SyncResult;
use crate::fading::integer_ratio;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymbolPair {
    pub x: bool,
    pub v: f64,
    pub slot_index: usize,
}

/// Soft receiver outputs aligned with the transmitted bits and tagged with
/// their coherence slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub pairs: Vec<SymbolPair>,
    pub rep_rate_hz: f64,
    pub coherence_s: f64,
    pub dc_removed: bool,
}

impl SymbolFrame {
    /// Builds a frame from already aligned `(x, v)` pairs, assigning slots by
    /// position.
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (bool, f64)>,
        rep_rate_hz: f64,
        coherence_s: f64,
        dc_removed: bool,
    ) -> Result<Self> {
        let per_slot = integer_ratio(coherence_s * rep_rate_hz, 1.0, "coherence_s")?;
        let pairs = pairs
            .into_iter()
            .enumerate()
            .map(|(j, (x, v))| SymbolPair {
                x,
                v,
                slot_index: j / per_slot,
            })
            .collect();
        Ok(SymbolFrame {
            pairs,
            rep_rate_hz,
            coherence_s,
            dc_removed,
        })
    }

    pub fn symbols_per_slot(&self) -> usize {
        // validated at construction
        integer_ratio(self.coherence_s * self.rep_rate_hz, 1.0, "coherence_s").unwrap_or(1)
    }

    /// Number of slots holding a full coherence interval of symbols.
    pub fn complete_slots(&self) -> usize {
        self.pairs.len() / self.symbols_per_slot()
    }

    /// Pairs of slot `i`; the trailing slot may be short.
    pub fn slot(&self, i: usize) -> &[SymbolPair] {
        let n = self.symbols_per_slot();
        let start = (i * n).min(self.pairs.len());
        let end = ((i + 1) * n).min(self.pairs.len());
        &self.pairs[start..end]
    }

    /// All pairs belonging to complete slots.
    pub fn complete_pairs(&self) -> &[SymbolPair] {
        &self.pairs[..self.complete_slots() * self.symbols_per_slot()]
    }

    pub fn slot_start_s(&self, i: usize) -> f64 {
        i as f64 * self.coherence_s
    }
}

/// Pairs each soft value with the PRBS bit it carries, starting at
/// `sync.offset_symbols` and wrapping cyclically, and assigns
/// `slot_index = floor(symbol_time / coherence_s)`.
pub fn build_frame(
    soft: Vec<f64>,
    sync: &SyncResult,
    prbs: &[bool],
    coherence_s: f64,
    rep_rate_hz: f64,
) -> Result<SymbolFrame> {
    if prbs.is_empty() {
        return Err(Error::EmptyInput("PRBS reference is empty"));
    }
    if !(coherence_s * rep_rate_hz >= 1.0) {
        return Err(Error::param(
            "coherence_s",
            "coherence interval is shorter than one symbol",
        ));
    }
    let p = prbs.len();
    let offset = sync.offset_symbols % p;
    SymbolFrame::from_pairs(
        soft.into_iter()
            .enumerate()
            .map(|(j, v)| (prbs[(offset + j) % p], v)),
        rep_rate_hz,
        coherence_s,
        true,
    )
}
