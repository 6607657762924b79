//! Serialized analysis outputs: `report.json`, `tables.json`, `truth.json`.

use fsosec_core::atmos::AtmosStats;
use fsosec_core::fading::{GroundTruth, SimConfig};
use fsosec_core::metrics::{InputDist, TransitionTable};
use fsosec_core::recovery::SyncResult;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub slots: Vec<SlotRow>,
    /// Bits/letter; may be negative.
    pub rs_long_span: f64,
    /// Bits/letter over valid slots; `null` when no slot is valid.
    pub rs_ergodic: Option<f64>,
    pub outage: Vec<OutagePoint>,
    pub atmos: AtmosReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    /// `simulation` or `files`.
    pub source: String,
    pub bob_input: String,
    pub eve_input: String,
    pub rep_rate_hz: f64,
    pub coherence_s: f64,
    pub symbols_per_slot: usize,
    pub n_slots: usize,
    pub n_valid_slots: usize,
    pub p_one: f64,
    pub delta_eve_v: f64,
    /// `fixed` or `sweep`.
    pub delta_eve_source: String,
    pub delta_eve_on_plateau: Option<bool>,
    pub mi_bob_pooled: f64,
    pub mi_eve_pooled: f64,
    pub sync_bob: Option<SyncInfo>,
    pub sync_eve: Option<SyncInfo>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncInfo {
    pub offset_symbols: usize,
    pub peak_correlation: f64,
    pub second_peak: f64,
    pub timing_phase: usize,
}

impl SyncInfo {
    pub fn new(s: &SyncResult, timing_phase: usize) -> Self {
        SyncInfo {
            offset_symbols: s.offset_symbols,
            peak_correlation: s.peak_correlation,
            second_peak: s.second_peak,
            timing_phase,
        }
    }
}

/// One coherence slot. Numeric fields are `null` when `valid` is false.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRow {
    pub slot_index: usize,
    pub t_start_ms: f64,
    pub valid: bool,
    pub mi_bob: Option<f64>,
    pub mi_eve: Option<f64>,
    pub rs_i: Option<f64>,
    pub rs_i_bps: Option<f64>,
    pub mean_voltage_bob: Option<f64>,
    pub threshold_bob: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutagePoint {
    pub r_th_bps: f64,
    pub probability: f64,
}

/// Turbulence estimates from the per-slot mean "on" voltage of each receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtmosReport {
    pub bob: Option<AtmosStats>,
    pub eve: Option<AtmosStats>,
}

/// Tables kept for the finite-length stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesFile {
    pub px: InputDist,
    pub rep_rate_hz: f64,
    pub delta_eve_v: f64,
    pub pooled: SlotTables,
    /// `null` for invalid slots.
    pub slots: Vec<Option<SlotTables>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotTables {
    /// Bob's hard-decision MI, bits/letter.
    pub mi_bob: f64,
    pub eve: TransitionTable,
}

/// Ground truth of a simulated campaign. Bits are stored as a `0`/`1`
/// string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub sim: SimConfig,
    pub frame_offset_symbols: usize,
    pub frame_offset_samples: u64,
    pub samples_per_symbol: u32,
    pub n_symbols: usize,
    pub slot_gains_bob: Vec<f64>,
    pub slot_gains_eve: Vec<f64>,
    pub transmitted_bits: String,
}

impl TruthFile {
    pub fn new(sim: &SimConfig, t: &GroundTruth) -> Self {
        TruthFile {
            sim: sim.clone(),
            frame_offset_symbols: t.frame_offset_symbols(),
            frame_offset_samples: t.frame_offset_samples,
            samples_per_symbol: t.samples_per_symbol,
            n_symbols: t.transmitted_bits.len(),
            slot_gains_bob: t.slot_gains_bob.clone(),
            slot_gains_eve: t.slot_gains_eve.clone(),
            transmitted_bits: t
                .transmitted_bits
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect(),
        }
    }

    pub fn bits(&self) -> Vec<bool> {
        self.transmitted_bits.bytes().map(|b| b == b'1').collect()
    }
}
