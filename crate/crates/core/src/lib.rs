//! Core algorithms for physical-layer security analysis of intensity-modulated
//! free-space-optical (FSO) wiretap channels.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the full offline
//! chain:
//!
//! * [`prbs`] and [`fading`]: a PRBS-driven on-off-keying source and a
//!   quasi-static log-normal fading simulator for Bob's and Eve's receivers.
//! * [`recovery`]: low-pass filtering, symbol timing, PRBS frame
//!   synchronization and slotting into coherence intervals.
//! * [`metrics`]: hard/soft-decision mutual information estimated from
//!   histograms, instantaneous, long-span and ergodic secrecy rates and the
//!   secrecy outage curve.
//! * [`finite_length`]: secrecy exponent and leaked-information bounds for
//!   finite code lengths.
//! * [`atmos`]: scintillation index and `C_n^2` from intensity samples.
//!
//! IO, file formats and the command line driver live in the `fsosec` crate.
//!
//! ```
//! use fsosec_core::fading::{wiretap_run, SimConfig};
//! use fsosec_core::metrics::{analyze_frames, InputDist};
//! use fsosec_core::prbs::{gen_prbs, PrbsSpec};
//! use fsosec_core::recovery::{recover, RecoveryOptions};
//!
//! # fn main() -> fsosec_core::Result<()> {
//! let cfg = SimConfig { duration_s: 0.02, ..SimConfig::default() };
//! let (bob_wave, eve_wave, _truth) = wiretap_run(&cfg)?;
//! let prbs = gen_prbs(&PrbsSpec::prbs15())?;
//! let opts = RecoveryOptions::default();
//! let bob = recover(&bob_wave, &prbs, &opts)?.frame;
//! let eve = recover(&eve_wave, &prbs, &opts)?.frame;
//! let report = analyze_frames(&bob, &eve, &InputDist::uniform(), 0.02, &[1e6])?;
//! assert_eq!(report.slots.len(), 5);
//! assert!(report.rs_ergodic >= 0.0);
//! # Ok(())
//! # }
//! ```

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod atmos;
mod error;
pub mod fading;
pub mod finite_length;
pub mod metrics;
pub mod prbs;
pub mod recovery;

pub use error::{Error, Result};
