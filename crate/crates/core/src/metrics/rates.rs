use alloc::vec::Vec;

use super::info::{mutual_info, optimize_threshold};
use super::transition::{soft_transition, InputDist, TransitionTable};
use crate::recovery::{SymbolFrame, SymbolPair};
use crate::{Error, Result};

/// Per-coherence-slot estimates. MI values are in bits per letter.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlotMetrics {
    pub slot_index: usize,
    /// Bob's hard-decision MI at his optimal threshold.
    pub mi_bob: f64,
    /// Eve's soft-decision MI.
    pub mi_eve: f64,
    /// Instantaneous secrecy rate `max(0, mi_bob - mi_eve)`.
    pub rs_i: f64,
    /// `rs_i` times the symbol rate, bits/s.
    pub rs_i_bps: f64,
    pub mean_voltage_bob: f64,
    pub threshold_bob: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SecrecyReport {
    pub slots: Vec<SlotMetrics>,
    /// Long-span rate of the pooled tables; may be negative.
    pub rs_long_span: f64,
    pub rs_ergodic: f64,
    /// `(R_th in bits/s, P(rs_i_bps < R_th))`.
    pub outage: Vec<(f64, f64)>,
}

/// MI gaps at or below this are rounding noise between the hard and soft
/// estimators and count as zero secrecy.
const MI_ROUNDOFF: f64 = 1e-12;

/// Metrics for one slot of Bob's and Eve's aligned symbols.
pub fn slot_metric(
    slot_index: usize,
    bob: &[SymbolPair],
    eve: &[SymbolPair],
    px: &InputDist,
    delta_eve: f64,
    rep_rate_hz: f64,
) -> Result<SlotMetrics> {
    let (threshold_bob, mi_bob) = optimize_threshold(bob, px)?;
    let mi_eve = mutual_info(&soft_transition(eve, delta_eve)?, px);
    let gap = mi_bob - mi_eve;
    let rs_i = if gap > MI_ROUNDOFF { gap } else { 0.0 };
    let mean_voltage_bob = bob.iter().map(|p| p.v).sum::<f64>() / bob.len() as f64;
    Ok(SlotMetrics {
        slot_index,
        mi_bob,
        mi_eve,
        rs_i,
        rs_i_bps: rs_i * rep_rate_hz,
        mean_voltage_bob,
        threshold_bob,
    })
}

/// Number of complete slots shared by Bob's and Eve's frames.
pub(crate) fn shared_slots(bob: &SymbolFrame, eve: &SymbolFrame) -> Result<usize> {
    if bob.rep_rate_hz != eve.rep_rate_hz || bob.coherence_s != eve.coherence_s {
        return Err(Error::param(
            "frame",
            "Bob and Eve frames use different symbol rates or slot lengths",
        ));
    }
    let n = bob.complete_slots().min(eve.complete_slots());
    if n == 0 {
        return Err(Error::EmptyInput("no complete coherence slot"));
    }
    Ok(n)
}

/// Per-slot metrics over every complete slot, in slot order.
pub fn slot_metrics(
    bob: &SymbolFrame,
    eve: &SymbolFrame,
    px: &InputDist,
    delta_eve: f64,
) -> Result<Vec<SlotMetrics>> {
    let n = shared_slots(bob, eve)?;
    (0..n)
        .map(|i| slot_metric(i, bob.slot(i), eve.slot(i), px, delta_eve, bob.rep_rate_hz))
        .collect()
}

/// Pooled tables over all complete slots: Bob's hard table with the threshold
/// re-optimized on the pooled data, Eve's soft table at `delta_eve`.
pub fn pooled_tables(
    bob: &SymbolFrame,
    eve: &SymbolFrame,
    px: &InputDist,
    delta_eve: f64,
) -> Result<(f64, TransitionTable)> {
    let n = shared_slots(bob, eve)?;
    let per = bob.symbols_per_slot();
    let (_, mi_bob) = optimize_threshold(&bob.pairs[..n * per], px)?;
    let eve_table = soft_transition(&eve.pairs[..n * per], delta_eve)?;
    Ok((mi_bob, eve_table))
}

/// Long-span secrecy rate `I(P_X, E[W_B]) - I(P_X, E[W_E])` from pooled
/// counts. Not clamped at zero.
pub fn long_span_rate(
    bob: &SymbolFrame,
    eve: &SymbolFrame,
    px: &InputDist,
    delta_eve: f64,
) -> Result<f64> {
    let (mi_bob, eve_table) = pooled_tables(bob, eve, px, delta_eve)?;
    Ok(mi_bob - mutual_info(&eve_table, px))
}

/// Mean of the instantaneous secrecy rates.
pub fn ergodic_rate(slots: &[SlotMetrics]) -> Result<f64> {
    if slots.is_empty() {
        return Err(Error::EmptyInput("no slots"));
    }
    Ok(slots.iter().map(|s| s.rs_i).sum::<f64>() / slots.len() as f64)
}

/// Secrecy outage probability `P(rs_i_bps < R_th)` for each target rate.
pub fn outage_curve(slots: &[SlotMetrics], grid_bps: &[f64]) -> Vec<(f64, f64)> {
    grid_bps
        .iter()
        .map(|&r| {
            let below = slots.iter().filter(|s| s.rs_i_bps < r).count();
            let p = if slots.is_empty() {
                0.0
            } else {
                below as f64 / slots.len() as f64
            };
            (r, p)
        })
        .collect()
}

/// Per-slot, long-span, ergodic and outage figures in one pass.
pub fn analyze_frames(
    bob: &SymbolFrame,
    eve: &SymbolFrame,
    px: &InputDist,
    delta_eve: f64,
    outage_grid_bps: &[f64],
) -> Result<SecrecyReport> {
    let slots = slot_metrics(bob, eve, px, delta_eve)?;
    let rs_long_span = long_span_rate(bob, eve, px, delta_eve)?;
    let rs_ergodic = ergodic_rate(&slots)?;
    let outage = outage_curve(&slots, outage_grid_bps);
    Ok(SecrecyReport {
        slots,
        rs_long_span,
        rs_ergodic,
        outage,
    })
}
