//! Independent numerical oracles for Gaussian on-off keying channels.
#![allow(dead_code)]

use std::f64::consts::PI;

use fsosec_core::fading::{ChannelParams, SimConfig};
use fsosec_core::prbs::PrbsSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gauss_pdf(y: f64, mean: f64, sigma: f64) -> f64 {
    let z = (y - mean) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

/// Upper tail of the standard normal.
pub fn q_func(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// `I(X; Y)` in bits for `Y = level[x] + N(0, sigma^2)` with uniform binary
/// input, by composite Simpson integration.
pub fn gaussian_ook_mi(level0: f64, level1: f64, sigma: f64) -> f64 {
    let lo = level0.min(level1) - 12.0 * sigma;
    let hi = level0.max(level1) + 12.0 * sigma;
    let n = 40_000;
    let h = (hi - lo) / n as f64;
    let f = |y: f64| {
        let a = gauss_pdf(y, level0, sigma);
        let b = gauss_pdf(y, level1, sigma);
        let q = 0.5 * (a + b);
        let mut r = 0.0;
        if a > 0.0 {
            r += 0.5 * a * (a / q).log2();
        }
        if b > 0.0 {
            r += 0.5 * b * (b / q).log2();
        }
        r
    };
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + i as f64 * h);
    }
    s * h / 3.0
}

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// MI of a binary channel with `P(1|0) = a`, `P(1|1) = b` under uniform input.
fn binary_channel_mi(a: f64, b: f64) -> f64 {
    let q1 = 0.5 * (a + b);
    binary_entropy(q1) - 0.5 * (binary_entropy(a) + binary_entropy(b))
}

/// Best hard-decision MI over thresholds for the same Gaussian channel,
/// found by a dense scan followed by local refinement.
pub fn gaussian_ook_hard_mi(level0: f64, level1: f64, sigma: f64) -> f64 {
    let mi = |t: f64| binary_channel_mi(q_func((t - level0) / sigma), q_func((t - level1) / sigma));
    let (lo, hi) = (level0.min(level1), level0.max(level1));
    let steps = 20_000;
    let mut best = (lo, mi(lo));
    for k in 0..=steps {
        let t = lo + (hi - lo) * k as f64 / steps as f64;
        let v = mi(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    let mut step = (hi - lo) / steps as f64;
    let mut t = best.0;
    for _ in 0..60 {
        for cand in [t - step, t + step] {
            let v = mi(cand);
            if v > best.1 {
                best = (cand, v);
            }
        }
        t = best.0;
        step *= 0.5;
    }
    best.1
}

/// Pairs `(x, v)` of uniform bits through `v = level[x] + N(0, sigma^2)`.
pub fn gaussian_pairs(n: usize, level1: f64, sigma: f64, seed: u64) -> Vec<(bool, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x: bool = rng.random();
            let z: f64 = rng.sample(StandardNormal);
            (x, if x { level1 } else { 0.0 } + sigma * z)
        })
        .collect()
}

/// Short 10 MHz / 50 MHz campaign with `slots` coherence slots of 4 ms.
pub fn short_config(slots: usize, seed: u64, bob: ChannelParams, eve: ChannelParams) -> SimConfig {
    SimConfig {
        prbs: PrbsSpec::prbs15(),
        rep_rate_hz: 10e6,
        sample_rate_hz: 50e6,
        duration_s: 4e-3 * slots as f64,
        coherence_s: 4e-3,
        on_amplitude: 1.0,
        bob,
        eve,
        gain_correlation: 0.0,
        rng_seed: seed,
    }
}

pub fn channel(mean_gain: f64, scint_index: f64, noise_sigma: f64) -> ChannelParams {
    ChannelParams {
        mean_gain,
        scint_index,
        noise_sigma,
        dc_offset: 0.0,
    }
}

/// Noise level giving `snr_db` for a unit-gain, unit-amplitude OOK symbol.
pub fn sigma_for_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 20.0)
}
