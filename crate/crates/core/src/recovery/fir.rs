use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fading::WaveformRecord;
use crate::{Error, Result};

/// Length of the recovery low-pass filter (odd, so the delay is an integer).
pub const LPF_TAPS: usize = 127;

/// Hamming-windowed sinc low-pass with unit DC gain. `cutoff` is in cycles
/// per sample and must lie in `(0, 0.5)`.
pub fn design_lowpass(cutoff: f64, taps: usize) -> Result<Vec<f64>> {
    if !(cutoff > 0.0 && cutoff < 0.5) {
        return Err(Error::param(
            "cutoff_hz",
            "must lie strictly between 0 and Nyquist",
        ));
    }
    if taps.is_multiple_of(2) {
        return Err(Error::param("taps", "filter length must be odd"));
    }
    let mid = (taps - 1) as f64 / 2.0;
    let mut h: Vec<f64> = (0..taps)
        .map(|n| {
            let x = n as f64 - mid;
            let sinc = if x == 0.0 {
                2.0 * cutoff
            } else {
                (2.0 * PI * cutoff * x).sin() / (PI * x)
            };
            let window = 0.54 - 0.46 * (2.0 * PI * n as f64 / (taps - 1) as f64).cos();
            sinc * window
        })
        .collect();
    let sum: f64 = h.iter().sum();
    h.iter_mut().for_each(|t| *t /= sum);
    Ok(h)
}

/// Zero-delay FIR low-pass. The record is mirrored at both ends so the
/// output has the input's length and timing.
pub fn low_pass(w: &WaveformRecord, cutoff_hz: f64) -> Result<WaveformRecord> {
    w.validate()?;
    let h = design_lowpass(cutoff_hz / w.sample_rate_hz, LPF_TAPS)?;
    let half = LPF_TAPS / 2;
    let n = w.samples.len();

    // whole-sample symmetric extension: x[-k] = x[k], x[n-1+k] = x[n-1-k]
    let reflect = |i: isize| -> f64 {
        let period = 2 * (n as isize - 1).max(1);
        let mut j = i.rem_euclid(period);
        if j >= n as isize {
            j = period - j;
        }
        w.samples[j.clamp(0, n as isize - 1) as usize] as f64
    };
    let padded: Vec<f64> = (-(half as isize)..(n + half) as isize)
        .map(reflect)
        .collect();

    let samples = padded
        .windows(LPF_TAPS)
        .map(|win| win.iter().zip(&h).map(|(x, c)| x * c).sum::<f64>() as f32)
        .collect();
    Ok(WaveformRecord {
        samples,
        sample_rate_hz: w.sample_rate_hz,
        dc_offset: w.dc_offset,
        label: w.label.clone(),
    })
}

/// Detector offset estimated as the mean of the lowest decile of samples,
/// i.e. the "light off" plateau of an OOK trace.
pub fn estimate_dc_offset(samples: &[f32]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no samples for DC estimate"));
    }
    let k = (samples.len() / 10).max(1);
    let mut sorted: Vec<f32> = samples.to_vec();
    sorted.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
    Ok(sorted[..k].iter().map(|&s| s as f64).sum::<f64>() / k as f64)
}
