//! Maximal-length pseudorandom binary sequences from a Fibonacci LFSR.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// LFSR description. Tap positions are 1-based register stages, so the
/// polynomial `x^15 + x^14 + 1` is written as `taps = [15, 14]`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PrbsSpec {
    pub register_bits: u8,
    pub taps: Vec<u8>,
    pub initial_state: u32,
}

impl PrbsSpec {
    /// PRBS-15 with feedback polynomial `x^15 + x^14 + 1`.
    pub fn prbs15() -> Self {
        PrbsSpec {
            register_bits: 15,
            taps: vec![15, 14],
            initial_state: 1,
        }
    }

    pub fn period(&self) -> usize {
        (1usize << self.register_bits) - 1
    }

    fn validate(&self) -> Result<u32> {
        if !(2..=31).contains(&self.register_bits) {
            return Err(Error::InvalidSpec(format!(
                "register_bits must be in 2..=31, got {}",
                self.register_bits
            )));
        }
        let mask = (1u32 << self.register_bits) - 1;
        if self.initial_state & mask == 0 {
            return Err(Error::InvalidSpec("initial_state must be nonzero".into()));
        }
        if self.initial_state & !mask != 0 {
            return Err(Error::InvalidSpec(format!(
                "initial_state {:#x} does not fit in {} bits",
                self.initial_state, self.register_bits
            )));
        }
        if self.taps.is_empty() {
            return Err(Error::InvalidSpec("no feedback taps".into()));
        }
        let mut tap_mask = 0u32;
        for &t in &self.taps {
            if t == 0 || t > self.register_bits {
                return Err(Error::InvalidSpec(format!(
                    "tap {} outside 1..={}",
                    t, self.register_bits
                )));
            }
            tap_mask |= 1 << (t - 1);
        }
        Ok(tap_mask)
    }
}

impl Default for PrbsSpec {
    fn default() -> Self {
        Self::prbs15()
    }
}

/// Returns one full period (`2^register_bits - 1` bits) of the sequence.
///
/// Fails when the state is zero or the taps do not give a maximal-length
/// register, which is detected by the state returning to its start early
/// (or not at all) within one period.
pub fn gen_prbs(spec: &PrbsSpec) -> Result<Vec<bool>> {
    let tap_mask = spec.validate()?;
    let n = spec.register_bits as u32;
    let mask = (1u32 << n) - 1;
    let period = spec.period();

    let mut state = spec.initial_state;
    let mut bits = Vec::with_capacity(period);
    for step in 1..=period {
        bits.push((state >> (n - 1)) & 1 == 1);
        let feedback = (state & tap_mask).count_ones() & 1;
        state = ((state << 1) | feedback) & mask;
        if state == spec.initial_state && step != period {
            return Err(Error::InvalidSpec(format!(
                "taps {:?} are not maximal: period {} < {}",
                spec.taps, step, period
            )));
        }
    }
    if state != spec.initial_state {
        return Err(Error::InvalidSpec(format!(
            "taps {:?} are not maximal: state does not recur after {} steps",
            spec.taps, period
        )));
    }
    Ok(bits)
}
