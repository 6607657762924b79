//! File formats, campaign configuration and subcommands for the `fsosec`
//! command-line tool. All numerical work is done by `fsosec-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod frames;
pub mod output;
pub mod report;
pub mod waveform;

pub use config::{CampaignConfig, Overrides};
