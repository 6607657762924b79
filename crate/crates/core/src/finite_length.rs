//! Secrecy exponent and finite-length leakage bounds.
//!
//! For Eve's channel `W` and input distribution `P_X`,
//!
//! ```text
//! phi(-rho) = -ln sum_i ( sum_x P_X(x) W(i|x)^(1/(1-rho)) )^(1-rho)
//! H_sec(R_E) = max_{0 <= rho < 1} phi(-rho) + rho R_E ln 2
//! delta_n <= exp(-n H_sec(R_E))
//! ```
//!
//! `phi` and `H_sec` are in nats; `R_E` is in bits per letter.

use alloc::vec::Vec;
use core::f64::consts::LN_2;
#[allow(unused_imports)]
use num_traits::Float;

use crate::metrics::{InputDist, TransitionTable};
use crate::{Error, Result};

/// Default resolution of the `rho` grid.
pub const DEFAULT_RHO_STEPS: usize = 1000;

/// Grid values of `H_sec` at or below this are reported as exactly zero; it
/// only absorbs rounding in `phi` where the true maximum is `0` at `rho = 0`.
const ROUNDOFF: f64 = 1e-12;

const GOLDEN_ITERS: usize = 60;

/// Code dimensions: `n` letters carrying `m` message bits and `l` dummy
/// random bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CodeParams {
    pub n: u64,
    pub m: u64,
    pub l: u64,
}

impl CodeParams {
    pub fn new(n: u64, m: u64, l: u64) -> Result<Self> {
        if m + l > n {
            return Err(Error::param("n", "code length must cover m + l bits"));
        }
        Ok(CodeParams { n, m, l })
    }

    /// Message rate `R_B = m / n`.
    pub fn message_rate(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m as f64 / self.n as f64
        }
    }

    /// Randomness rate `R_E = l / n`.
    pub fn randomness_rate(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.l as f64 / self.n as f64
        }
    }
}

/// `phi(-rho | W, P_X)` in nats. Zero-probability bins are skipped.
pub fn phi(rho: f64, t: &TransitionTable, px: &InputDist) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::RhoDomain(rho));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let s = 1.0 / (1.0 - rho);
    let weights = [px.p0, px.p1];
    let mut total = 0.0;
    for i in 0..t.bins() {
        // log of sum_x P_X(x) W(i|x)^s, computed stably for s up to rho_steps
        let mut logs = [f64::NEG_INFINITY; 2];
        for x in 0..2 {
            let w = t.rows[x][i];
            if w > 0.0 && weights[x] > 0.0 {
                logs[x] = weights[x].ln() + s * w.ln();
            }
        }
        let m = logs[0].max(logs[1]);
        if m == f64::NEG_INFINITY {
            continue;
        }
        let log_inner = m + ((logs[0] - m).exp() + (logs[1] - m).exp()).ln();
        total += ((1.0 - rho) * log_inner).exp();
    }
    Ok(-total.ln())
}

fn objective(rho: f64, r_e: f64, t: &TransitionTable, px: &InputDist) -> f64 {
    // rho is always inside [0, 1) here
    phi(rho, t, px).unwrap_or(f64::NEG_INFINITY) + rho * r_e * LN_2
}

/// `H_sec(R_E)` in nats per letter.
///
/// Maximizes over the grid `rho = k / rho_steps`, `k < rho_steps`, then
/// refines inside the best grid cell by golden-section search (the objective
/// is concave in `rho`). The refinement never leaves the grid's range, so
/// when the supremum sits at `rho -> 1` the result is the last grid value.
pub fn secrecy_exponent(
    r_e: f64,
    t: &TransitionTable,
    px: &InputDist,
    rho_steps: usize,
) -> Result<f64> {
    if !(r_e >= 0.0 && r_e.is_finite()) {
        return Err(Error::param(
            "r_e",
            "randomness rate must be finite and >= 0",
        ));
    }
    if rho_steps < 100 {
        return Err(Error::param("rho_steps", "need at least 100 grid steps"));
    }
    let rho_at = |k: usize| k as f64 / rho_steps as f64;

    let mut best_k = 0;
    let mut best = 0.0;
    for k in 1..rho_steps {
        let v = objective(rho_at(k), r_e, t, px);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    if best <= ROUNDOFF {
        return Ok(0.0);
    }

    let (mut a, mut b) = (rho_at(best_k - 1), rho_at((best_k + 1).min(rho_steps - 1)));
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c, r_e, t, px), objective(d, r_e, t, px));
    for _ in 0..GOLDEN_ITERS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c, r_e, t, px);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d, r_e, t, px);
        }
    }
    Ok(best.max(fc).max(fd))
}

/// `H_sec` sampled over a set of randomness rates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentCurve {
    pub table: TransitionTable,
    pub px: InputDist,
    /// `(R_E bits/letter, H_sec nats/letter)`.
    pub points: Vec<(f64, f64)>,
    pub rho_steps: usize,
}

impl ExponentCurve {
    pub fn new(
        table: TransitionTable,
        px: InputDist,
        r_e_grid: &[f64],
        rho_steps: usize,
    ) -> Result<Self> {
        let points = r_e_grid
            .iter()
            .map(|&r| Ok((r, secrecy_exponent(r, &table, &px, rho_steps)?)))
            .collect::<Result<_>>()?;
        Ok(ExponentCurve {
            table,
            px,
            points,
            rho_steps,
        })
    }
}

/// Upper bound `exp(-n H_sec(R_E))` on the leaked-information measure.
pub fn leakage_bound(n: u64, r_e: f64, t: &TransitionTable, px: &InputDist) -> Result<f64> {
    let h = secrecy_exponent(r_e, t, px, DEFAULT_RHO_STEPS)?;
    Ok(bound_from_exponent(n, h))
}

pub fn bound_from_exponent(n: u64, h: f64) -> f64 {
    if n == 0 {
        1.0
    } else {
        (-(n as f64) * h).exp()
    }
}

/// Smallest `n` with `exp(-n h) <= delta_target`.
pub fn required_length_for_exponent(delta_target: f64, h: f64) -> Result<u64> {
    if !(delta_target > 0.0 && delta_target < 1.0) {
        return Err(Error::param("delta_target", "must lie in (0, 1)"));
    }
    if !(h > 0.0) {
        return Err(Error::InfeasibleRate(f64::NAN));
    }
    let mut n = ((1.0 / delta_target).ln() / h).ceil().max(0.0) as u64;
    while n > 0 && bound_from_exponent(n - 1, h) <= delta_target {
        n -= 1;
    }
    while bound_from_exponent(n, h) > delta_target {
        n += 1;
    }
    Ok(n)
}

/// Code length needed for `delta_n <= delta_target` at randomness rate `r_e`.
pub fn required_length(
    delta_target: f64,
    r_e: f64,
    t: &TransitionTable,
    px: &InputDist,
) -> Result<u64> {
    let h = secrecy_exponent(r_e, t, px, DEFAULT_RHO_STEPS)?;
    if h == 0.0 {
        return Err(Error::InfeasibleRate(r_e));
    }
    required_length_for_exponent(delta_target, h)
}

/// One message rate of a fixed-sum rate split.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateSplitRow {
    pub r_b: f64,
    pub r_e: f64,
    pub h_sec: f64,
    /// `(n, bound)` for each requested code length.
    pub bounds: Vec<(u64, f64)>,
}

/// Leakage bounds at `R_E = total_rate - r_b` for every `n`.
pub fn rate_split_row(
    total_rate: f64,
    r_b: f64,
    t: &TransitionTable,
    px: &InputDist,
    n_grid: &[u64],
) -> Result<RateSplitRow> {
    if !(r_b >= 0.0) || r_b > total_rate {
        return Err(Error::param(
            "r_b",
            alloc::format!("message rate {r_b} exceeds the sum rate {total_rate}"),
        ));
    }
    let r_e = (total_rate - r_b).max(0.0);
    let h_sec = secrecy_exponent(r_e, t, px, DEFAULT_RHO_STEPS)?;
    Ok(RateSplitRow {
        r_b,
        r_e,
        h_sec,
        bounds: n_grid
            .iter()
            .map(|&n| (n, bound_from_exponent(n, h_sec)))
            .collect(),
    })
}

/// Bounds over code length for several splits of a fixed sum rate
/// `R_B + R_E = total_rate`.
pub fn rate_split_curve(
    total_rate: f64,
    t: &TransitionTable,
    px: &InputDist,
    r_b_grid: &[f64],
    n_grid: &[u64],
) -> Result<Vec<RateSplitRow>> {
    if !(total_rate > 0.0) {
        return Err(Error::param("total_rate", "must be positive"));
    }
    if r_b_grid.is_empty() || n_grid.is_empty() {
        return Err(Error::EmptyInput("rate or length grid"));
    }
    r_b_grid
        .iter()
        .map(|&r_b| rate_split_row(total_rate, r_b, t, px, n_grid))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RepetitionPoint {
    pub rep_rate_hz: f64,
    pub n: u64,
    pub delta_bound: f64,
}

/// Leakage bound versus symbol repetition rate for a fixed observation time:
/// the code spans the whole window, so `n = round(R_rep * T_O)`.
pub fn repetition_curve(
    observation_s: f64,
    total_rate: f64,
    r_b: f64,
    t: &TransitionTable,
    px: &InputDist,
    rep_grid_hz: &[f64],
) -> Result<Vec<RepetitionPoint>> {
    if !(observation_s > 0.0) {
        return Err(Error::param("t_o", "observation time must be positive"));
    }
    if rep_grid_hz.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
        return Err(Error::param("rep_grid", "repetition rates must be >= 0"));
    }
    let row = rate_split_row(total_rate, r_b, t, px, &[])?;
    Ok(rep_grid_hz
        .iter()
        .map(|&rep| {
            let n = (rep * observation_s).round() as u64;
            RepetitionPoint {
                rep_rate_hz: rep,
                n,
                delta_bound: bound_from_exponent(n, row.h_sec),
            }
        })
        .collect())
}
