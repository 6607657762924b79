use alloc::vec::Vec;

use super::fir::estimate_dc_offset;
use crate::fading::{integer_ratio, WaveformRecord};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimingResult {
    /// One DC-removed value per symbol.
    pub symbols: Vec<f64>,
    /// Chosen sampling phase within the symbol, `0..samples_per_symbol`.
    pub phase: usize,
}

/// Clock recovery for integer oversampling: picks the sampling phase with
/// the widest eye, measured as the mean absolute deviation of the decimated
/// values, and returns `floor(n / samples_per_symbol)` symbols. Ties go to
/// the smallest phase.
///
/// The record's DC offset is subtracted; when it is unknown it is estimated
/// with [`estimate_dc_offset`].
pub fn symbol_timing(w: &WaveformRecord, rep_rate_hz: f64) -> Result<TimingResult> {
    if w.samples.is_empty() {
        return Err(Error::EmptyInput("waveform has no samples"));
    }
    let sps = integer_ratio(w.sample_rate_hz, rep_rate_hz, "rep_rate_hz")?;
    let count = w.samples.len() / sps;
    if count == 0 {
        return Err(Error::EmptyInput("waveform shorter than one symbol"));
    }
    let dc = match w.dc_offset {
        Some(dc) => dc,
        None => estimate_dc_offset(&w.samples)?,
    };

    let decimate = |phase: usize| (0..count).map(move |k| w.samples[phase + k * sps] as f64);
    let mut best = (0usize, f64::NEG_INFINITY);
    for phase in 0..sps {
        let mean = decimate(phase).sum::<f64>() / count as f64;
        let mad = decimate(phase).map(|v| (v - mean).abs()).sum::<f64>() / count as f64;
        if mad > best.1 {
            best = (phase, mad);
        }
    }
    let phase = best.0;
    Ok(TimingResult {
        symbols: decimate(phase).map(|v| v - dc).collect(),
        phase,
    })
}
