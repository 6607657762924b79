use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::fft::circular_xcorr;
use crate::{Error, Result};

/// Minimum ratio of the main correlation peak to the runner-up for a sync
/// to be accepted.
pub const MIN_PEAK_RATIO: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyncResult {
    /// PRBS index of the first soft symbol.
    pub offset_symbols: usize,
    pub peak_correlation: f64,
    pub second_peak: f64,
}

impl SyncResult {
    pub fn is_reliable(&self) -> bool {
        self.peak_correlation > 0.0 && self.peak_correlation >= MIN_PEAK_RATIO * self.second_peak
    }
}

/// Normalized circular cross-correlation of `soft - mean` against the
/// bipolar PRBS `2 * prbs - 1` over every lag.
///
/// Soft values are folded modulo the PRBS period first, so a capture of any
/// length (at least one period) costs a single period-sized correlation.
/// The result is normalized by `sqrt(sum (soft - mean)^2 * soft.len())`,
/// which bounds it to `[-1, 1]`. Ties resolve to the smallest lag.
pub fn frame_sync(soft: &[f64], prbs: &[bool]) -> Result<SyncResult> {
    let period = prbs.len();
    if period < 2 {
        return Err(Error::EmptyInput("PRBS reference is too short"));
    }
    if soft.len() < period {
        return Err(Error::LengthMismatch {
            expected: period,
            actual: soft.len(),
        });
    }
    let mean = soft.iter().sum::<f64>() / soft.len() as f64;
    let energy: f64 = soft.iter().map(|v| (v - mean) * (v - mean)).sum();
    let power: f64 = soft.iter().map(|v| v * v).sum();
    // relative floor absorbs the rounding error of the mean
    if !(energy > 1e-20 * power) || !energy.is_finite() {
        return Err(Error::SyncFailure("soft sequence has zero variance"));
    }

    let mut folded = vec![0.0; period];
    for (j, v) in soft.iter().enumerate() {
        folded[j % period] += v - mean;
    }
    let bipolar: Vec<f64> = prbs.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
    let corr = circular_xcorr(&folded, &bipolar);
    let norm = (energy * soft.len() as f64).sqrt();

    let mut best = 0;
    for (k, &c) in corr.iter().enumerate() {
        if c > corr[best] {
            best = k;
        }
    }
    let second = corr
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != best)
        .map(|(_, &c)| c)
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(SyncResult {
        offset_symbols: best,
        peak_correlation: (corr[best] / norm).clamp(-1.0, 1.0),
        second_peak: (second / norm).clamp(-1.0, 1.0),
    })
}
