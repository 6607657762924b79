//! Offline symbol recovery: low-pass filter, timing recovery, PRBS frame
//! synchronization and slotting.

mod fft;
mod fir;
mod frame;
mod sync;
mod timing;

pub use fir::{design_lowpass, estimate_dc_offset, low_pass, LPF_TAPS};
pub use frame::{build_frame, SymbolFrame, SymbolPair};
pub use sync::{frame_sync, SyncResult, MIN_PEAK_RATIO};
pub use timing::{symbol_timing, TimingResult};

use alloc::vec::Vec;

use crate::fading::WaveformRecord;
use crate::{Error, Result};

/// Settings for [`recover`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    pub rep_rate_hz: f64,
    pub coherence_s: f64,
    /// `None` skips the low-pass stage.
    pub lpf_cutoff_hz: Option<f64>,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            rep_rate_hz: 10e6,
            coherence_s: 4e-3,
            lpf_cutoff_hz: Some(6e6),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Recovered {
    pub frame: SymbolFrame,
    pub sync: SyncResult,
    pub timing_phase: usize,
}

/// Runs the whole chain on one waveform. A sync peak below
/// [`MIN_PEAK_RATIO`] times the runner-up is reported as a sync failure.
pub fn recover(w: &WaveformRecord, prbs: &[bool], opts: &RecoveryOptions) -> Result<Recovered> {
    let filtered;
    let input = match opts.lpf_cutoff_hz {
        Some(fc) => {
            filtered = low_pass(w, fc)?;
            &filtered
        }
        None => w,
    };
    let timing = symbol_timing(input, opts.rep_rate_hz)?;
    let sync = frame_sync(&timing.symbols, prbs)?;
    if !sync.is_reliable() {
        return Err(Error::SyncFailure("correlation peak not distinct"));
    }
    let frame = build_frame(
        timing.symbols,
        &sync,
        prbs,
        opts.coherence_s,
        opts.rep_rate_hz,
    )?;
    Ok(Recovered {
        frame,
        sync,
        timing_phase: timing.phase,
    })
}

/// Hard decisions at `threshold` on the frame's soft values.
pub fn decide(frame: &SymbolFrame, threshold: f64) -> Vec<bool> {
    frame.pairs.iter().map(|p| p.v >= threshold).collect()
}
