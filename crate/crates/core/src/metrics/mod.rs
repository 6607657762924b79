//! Transition-probability estimation, mutual information and secrecy rates.

mod binning;
mod info;
mod rates;
mod transition;

pub use binning::{
    bin_width_sweep, geometric_widths, select_bin_width, BinWidthChoice, PLATEAU_TOLERANCE,
};
pub use info::{mutual_info, mutual_info_hard, mutual_info_soft, optimize_threshold};
pub use rates::{
    analyze_frames, ergodic_rate, long_span_rate, outage_curve, pooled_tables, slot_metric,
    slot_metrics, SecrecyReport, SlotMetrics,
};
pub use transition::{hard_transition, soft_transition, InputDist, TableKind, TransitionTable};
