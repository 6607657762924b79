//! Quasi-static fading wiretap channel simulator.
//!
//! Alice sends on-off keyed PRBS symbols. Bob receives `Y = H_B X + N_B` and
//! Eve receives `Z = H_E X + N_E`, where the gains are log-normal, constant
//! within a coherence slot and independent across slots. The two gain
//! processes can be correlated through a Gaussian copula on the underlying
//! normals.

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::prbs::{gen_prbs, PrbsSpec};
use crate::{Error, Result};

/// One receiver's channel: gain statistics, AWGN level and detector offset.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ChannelParams {
    /// Mean gain `E[H]` in volts per unit input.
    pub mean_gain: f64,
    /// Scintillation index `E[H^2]/E[H]^2 - 1` of the gain process.
    pub scint_index: f64,
    /// RMS of the additive Gaussian noise, volts.
    pub noise_sigma: f64,
    /// Detector DC offset, volts.
    #[cfg_attr(feature = "serde", serde(default))]
    pub dc_offset: f64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mean_gain >= 0.0 && self.mean_gain.is_finite()) {
            return Err(Error::param("mean_gain", "must be finite and >= 0"));
        }
        if !(self.scint_index >= 0.0 && self.scint_index.is_finite()) {
            return Err(Error::param("scint_index", "must be finite and >= 0"));
        }
        if !(self.noise_sigma > 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::param("noise_sigma", "must be finite and > 0"));
        }
        if !self.dc_offset.is_finite() {
            return Err(Error::param("dc_offset", "must be finite"));
        }
        Ok(())
    }

    /// Electrical SNR `(mean_gain * on_amplitude)^2 / noise_sigma^2` in dB.
    pub fn snr_db(&self, on_amplitude: f64) -> f64 {
        let s = self.mean_gain * on_amplitude / self.noise_sigma;
        20.0 * s.log10()
    }

    /// Log-normal parameters `(mu, sigma)` of `ln H`.
    fn log_normal(&self) -> (f64, f64) {
        let var = (1.0 + self.scint_index).ln();
        (self.mean_gain.ln() - 0.5 * var, var.sqrt())
    }

    /// Maps a standard normal draw to a gain.
    fn gain_from_normal(&self, z: f64) -> f64 {
        if self.mean_gain == 0.0 {
            return 0.0;
        }
        if self.scint_index == 0.0 {
            return self.mean_gain;
        }
        let (mu, sigma) = self.log_normal();
        (mu + sigma * z).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimConfig {
    pub prbs: PrbsSpec,
    pub rep_rate_hz: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    pub coherence_s: f64,
    /// Received voltage for `x = 1` at unit gain.
    pub on_amplitude: f64,
    pub bob: ChannelParams,
    pub eve: ChannelParams,
    /// Correlation of the normals driving Bob's and Eve's gains, in `[-1, 1]`.
    pub gain_correlation: f64,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            prbs: PrbsSpec::prbs15(),
            rep_rate_hz: 10e6,
            sample_rate_hz: 50e6,
            duration_s: 0.2,
            coherence_s: 4e-3,
            on_amplitude: 1.0,
            bob: ChannelParams {
                mean_gain: 1.0,
                scint_index: 0.05,
                noise_sigma: 0.1,
                dc_offset: 0.0,
            },
            eve: ChannelParams {
                mean_gain: 0.5,
                scint_index: 0.05,
                noise_sigma: 0.2,
                dc_offset: 0.0,
            },
            gain_correlation: 0.0,
            rng_seed: 0,
        }
    }
}

/// `num / den` when it is a positive integer (up to rounding error).
pub(crate) fn integer_ratio(num: f64, den: f64, field: &'static str) -> Result<usize> {
    if !(num > 0.0 && den > 0.0 && num.is_finite() && den.is_finite()) {
        return Err(Error::param(field, "rates and durations must be positive"));
    }
    let r = num / den;
    let rounded = r.round();
    if rounded < 1.0 || (r - rounded).abs() > 1e-9 * rounded {
        return Err(Error::param(
            field,
            alloc::format!("{num} is not an integer multiple of {den}"),
        ));
    }
    Ok(rounded as usize)
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.samples_per_symbol()?;
        self.symbols_per_slot()?;
        self.n_slots()?;
        self.bob.validate()?;
        self.eve.validate()?;
        if !(self.on_amplitude.is_finite() && self.on_amplitude >= 0.0) {
            return Err(Error::param("on_amplitude", "must be finite and >= 0"));
        }
        if !(-1.0..=1.0).contains(&self.gain_correlation) {
            return Err(Error::param("gain_correlation", "must lie in [-1, 1]"));
        }
        Ok(())
    }

    pub fn samples_per_symbol(&self) -> Result<usize> {
        integer_ratio(self.sample_rate_hz, self.rep_rate_hz, "sample_rate_hz")
    }

    pub fn symbols_per_slot(&self) -> Result<usize> {
        integer_ratio(self.coherence_s * self.rep_rate_hz, 1.0, "coherence_s")
    }

    pub fn n_slots(&self) -> Result<usize> {
        integer_ratio(self.duration_s, self.coherence_s, "duration_s")
    }

    pub fn n_symbols(&self) -> Result<usize> {
        Ok(self.n_slots()? * self.symbols_per_slot()?)
    }

    pub fn n_samples(&self) -> Result<usize> {
        Ok(self.n_symbols()? * self.samples_per_symbol()?)
    }
}

/// Uniformly sampled voltage trace.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformRecord {
    pub samples: Vec<f32>,
    pub sample_rate_hz: f64,
    /// Detector offset in volts, `None` when unknown.
    pub dc_offset: Option<f64>,
    pub label: String,
}

impl WaveformRecord {
    pub fn new(
        samples: Vec<f32>,
        sample_rate_hz: f64,
        dc_offset: Option<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let w = WaveformRecord {
            samples,
            sample_rate_hz,
            dc_offset,
            label: label.into(),
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::EmptyInput("waveform has no samples"));
        }
        if self.samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::param("samples", "all samples must be finite"));
        }
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return Err(Error::param("sample_rate_hz", "must be positive"));
        }
        Ok(())
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }
}

/// Simulator-side record of what was sent and how the channels behaved.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroundTruth {
    pub transmitted_bits: Vec<bool>,
    pub slot_gains_bob: Vec<f64>,
    pub slot_gains_eve: Vec<f64>,
    /// Position of the first transmitted symbol within the PRBS period,
    /// expressed in waveform samples (`prbs_offset * samples_per_symbol`).
    pub frame_offset_samples: u64,
    pub samples_per_symbol: u32,
}

impl GroundTruth {
    /// PRBS index of the first transmitted symbol.
    pub fn frame_offset_symbols(&self) -> usize {
        (self.frame_offset_samples / self.samples_per_symbol as u64) as usize
    }
}

/// Draws one gain per slot, i.i.d. log-normal with `E[H] = mean_gain` and
/// scintillation index `scint_index`.
pub fn sample_gains<R: Rng + ?Sized>(
    params: &ChannelParams,
    n_slots: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    params.validate()?;
    if n_slots == 0 {
        return Err(Error::param("n_slots", "must be >= 1"));
    }
    Ok((0..n_slots)
        .map(|_| params.gain_from_normal(rng.sample(StandardNormal)))
        .collect())
}

/// Renders the received waveform for one receiver.
///
/// Sample `k` of symbol `j` in slot `s` is
/// `gains[s] * on_amplitude * bits[j] + dc_offset + noise`.
pub fn synthesize_waveform<R: Rng + ?Sized>(
    bits: &[bool],
    gains: &[f64],
    params: &ChannelParams,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<WaveformRecord> {
    params.validate()?;
    let sps = cfg.samples_per_symbol()?;
    let per_slot = cfg.symbols_per_slot()?;
    let expected = gains.len() * per_slot;
    if bits.len() != expected || bits.is_empty() {
        return Err(Error::LengthMismatch {
            expected,
            actual: bits.len(),
        });
    }

    let mut samples = Vec::with_capacity(bits.len() * sps);
    for (slot, &gain) in gains.iter().enumerate() {
        let on = gain * cfg.on_amplitude;
        for &bit in &bits[slot * per_slot..(slot + 1) * per_slot] {
            let level = if bit { on } else { 0.0 } + params.dc_offset;
            for _ in 0..sps {
                let n: f64 = rng.sample(StandardNormal);
                samples.push((level + params.noise_sigma * n) as f32);
            }
        }
    }
    WaveformRecord::new(samples, cfg.sample_rate_hz, Some(params.dc_offset), "")
}

/// Full simulated campaign: the PRBS is repeated from a random circular start
/// to fill `duration_s`, gains are drawn per slot and both receivers see the
/// same bit stream.
pub fn wiretap_run(cfg: &SimConfig) -> Result<(WaveformRecord, WaveformRecord, GroundTruth)> {
    cfg.validate()?;
    let prbs = gen_prbs(&cfg.prbs)?;
    let n_slots = cfg.n_slots()?;
    let n_symbols = cfg.n_symbols()?;
    let sps = cfg.samples_per_symbol()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let start = rng.random_range(0..prbs.len());
    let bits: Vec<bool> = (0..n_symbols)
        .map(|j| prbs[(start + j) % prbs.len()])
        .collect();

    let rho = cfg.gain_correlation;
    let rho_c = (1.0 - rho * rho).max(0.0).sqrt();
    let mut gains_bob = Vec::with_capacity(n_slots);
    let mut gains_eve = Vec::with_capacity(n_slots);
    for _ in 0..n_slots {
        let zb: f64 = rng.sample(StandardNormal);
        let zi: f64 = rng.sample(StandardNormal);
        let ze = rho * zb + rho_c * zi;
        gains_bob.push(cfg.bob.gain_from_normal(zb));
        gains_eve.push(cfg.eve.gain_from_normal(ze));
    }

    let mut bob = synthesize_waveform(&bits, &gains_bob, &cfg.bob, cfg, &mut rng)?;
    bob.label = "bob".into();
    let mut eve = synthesize_waveform(&bits, &gains_eve, &cfg.eve, cfg, &mut rng)?;
    eve.label = "eve".into();

    let truth = GroundTruth {
        transmitted_bits: bits,
        slot_gains_bob: gains_bob,
        slot_gains_eve: gains_eve,
        frame_offset_samples: (start * sps) as u64,
        samples_per_symbol: sps as u32,
    };
    Ok((bob, eve, truth))
}
