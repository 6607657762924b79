use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::transition::{hard_table_from, InputDist, TransitionTable};
use crate::recovery::SymbolPair;
use crate::{Error, Result};

/// Shannon mutual information `I(P_X, W)` in bits for a binary-input channel
/// given as two rows over the same output alphabet. `0 log 0 = 0`.
pub(crate) fn mi_rows(rows: [&[f64]; 2], px: &InputDist) -> f64 {
    let (w0, w1) = (rows[0], rows[1]);
    let mut info = 0.0;
    for (&a, &b) in w0.iter().zip(w1) {
        let q = px.p0 * a + px.p1 * b;
        if q <= 0.0 {
            continue;
        }
        if a > 0.0 && px.p0 > 0.0 {
            info += px.p0 * a * (a / q).log2();
        }
        if b > 0.0 && px.p1 > 0.0 {
            info += px.p1 * b * (b / q).log2();
        }
    }
    info.max(0.0)
}

/// Mutual information of any transition table.
pub fn mutual_info(t: &TransitionTable, px: &InputDist) -> f64 {
    mi_rows([&t.rows[0], &t.rows[1]], px)
}

/// Mutual information of a hard-decision (two-output) table.
pub fn mutual_info_hard(t: &TransitionTable, px: &InputDist) -> Result<f64> {
    if !t.is_hard() || t.bins() != 2 {
        return Err(Error::WrongTableKind("hard"));
    }
    Ok(mutual_info(t, px))
}

/// Mutual information of a soft-decision (K-bin histogram) table.
pub fn mutual_info_soft(t: &TransitionTable, px: &InputDist) -> Result<f64> {
    if t.is_hard() {
        return Err(Error::WrongTableKind("soft"));
    }
    Ok(mutual_info(t, px))
}

/// Bob's threshold search: tries every midpoint between consecutive distinct
/// voltages and returns `(y_th, mi)` for the best one, the smallest threshold
/// winning ties. Empirical MI is constant between data points, so this set
/// is exhaustive.
///
/// When every voltage is identical the result is `(v, 0.0)`.
pub fn optimize_threshold(pairs: &[SymbolPair], px: &InputDist) -> Result<(f64, f64)> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("slot has no symbols"));
    }
    let mut sorted: Vec<(f64, bool)> = pairs.iter().map(|p| (p.v, p.x)).collect();
    sorted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut n = [0u64; 2];
    for &(_, x) in &sorted {
        n[x as usize] += 1;
    }
    if n[0] == 0 {
        return Err(Error::MissingInput(0));
    }
    if n[1] == 0 {
        return Err(Error::MissingInput(1));
    }

    // `above` holds the counts with v >= the current candidate
    let mut above = n;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..sorted.len() - 1 {
        above[sorted[i].1 as usize] -= 1;
        let (lo, hi) = (sorted[i].0, sorted[i + 1].0);
        if lo == hi {
            continue;
        }
        let y_th = 0.5 * (lo + hi);
        let t = hard_table_from(y_th, n, above);
        let mi = mutual_info(&t, px);
        if best.is_none_or(|(_, m)| mi > m) {
            best = Some((y_th, mi));
        }
    }
    Ok(best.unwrap_or((sorted[0].0, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{hard_transition, soft_transition, TableKind};
    use alloc::vec;

    fn hb(p: f64) -> f64 {
        if p == 0.0 || p == 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    fn pairs(data: &[(bool, f64)]) -> Vec<SymbolPair> {
        data.iter()
            .map(|&(x, v)| SymbolPair {
                x,
                v,
                slot_index: 0,
            })
            .collect()
    }

    #[test]
    fn bsc_values() {
        let px = InputDist::uniform();
        let mi = |p| mutual_info_hard(&TransitionTable::bsc(p).unwrap(), &px).unwrap();
        assert_eq!(mi(0.0), 1.0);
        assert!(mi(0.5).abs() < 1e-15);
        assert!((mi(0.1) - 0.53100).abs() < 1e-5);
        assert!((mi(0.1) - (1.0 - hb(0.1))).abs() < 1e-12);
    }

    #[test]
    fn soft_disjoint_and_identical() {
        let px = InputDist::uniform();
        let soft = TableKind::Soft {
            bin_width: 1.0,
            origin: 0.0,
        };
        let t =
            TransitionTable::from_rows(soft, [vec![0.5, 0.5, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert!((mutual_info_soft(&t, &px).unwrap() - 1.0).abs() < 1e-15);
        let t =
            TransitionTable::from_rows(soft, [vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5]]).unwrap();
        assert_eq!(mutual_info_soft(&t, &px).unwrap(), 0.0);
    }

    #[test]
    fn kind_checked() {
        let px = InputDist::uniform();
        let t = TransitionTable::bsc(0.1).unwrap();
        assert!(mutual_info_soft(&t, &px).is_err());
    }

    #[test]
    fn two_bin_soft_equals_hard() {
        let px = InputDist::uniform();
        let d: Vec<(bool, f64)> = (0..300)
            .map(|i| {
                (
                    i % 2 == 0,
                    ((i * 53) % 97) as f64 / 97.0 + if i % 2 == 0 { 0.3 } else { 0.0 },
                )
            })
            .collect();
        let p = pairs(&d);
        let lo = p.iter().map(|q| q.v).fold(f64::INFINITY, f64::min);
        let hi = p.iter().map(|q| q.v).fold(f64::NEG_INFINITY, f64::max);
        let delta = (hi - lo) / 2.0 * 1.0000001;
        let soft = soft_transition(&p, delta).unwrap();
        assert_eq!(soft.bins(), 2);
        let hard = hard_transition(&p, lo + delta).unwrap();
        let a = mutual_info_soft(&soft, &px).unwrap();
        let b = mutual_info_hard(&hard, &px).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn threshold_separates_clusters() {
        let d: Vec<(bool, f64)> = (0..400)
            .map(|i| {
                let jitter = ((i * 31) % 17) as f64 / 170.0;
                (i % 2 == 1, if i % 2 == 1 { 1.0 + jitter } else { jitter })
            })
            .collect();
        let (y, mi) = optimize_threshold(&pairs(&d), &InputDist::uniform()).unwrap();
        assert!((mi - 1.0).abs() < 1e-12);
        assert!(y > 0.1 && y < 1.0);
    }

    #[test]
    fn identical_voltages() {
        let d = [(false, 0.4), (true, 0.4), (true, 0.4)];
        assert_eq!(
            optimize_threshold(&pairs(&d), &InputDist::uniform()).unwrap(),
            (0.4, 0.0)
        );
    }

    #[test]
    fn same_distribution_gives_zero() {
        let d: Vec<(bool, f64)> = (0..100)
            .flat_map(|i| [(false, i as f64), (true, i as f64)])
            .collect();
        let (_, mi) = optimize_threshold(&pairs(&d), &InputDist::uniform()).unwrap();
        assert!(mi.abs() < 1e-12);
    }

    #[test]
    fn relabeling_keeps_optimum() {
        let d: Vec<(bool, f64)> = (0..500)
            .map(|i| {
                (
                    i % 3 == 0,
                    ((i * 7919) % 1000) as f64 / 1000.0 + if i % 3 == 0 { 0.4 } else { 0.0 },
                )
            })
            .collect();
        let px = InputDist::uniform();
        let (_, a) = optimize_threshold(&pairs(&d), &px).unwrap();
        let flipped: Vec<(bool, f64)> = d.iter().map(|&(x, v)| (!x, v)).collect();
        let (_, b) = optimize_threshold(&pairs(&flipped), &px).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn search_beats_coarse_grid() {
        let d: Vec<(bool, f64)> = (0..1000)
            .map(|i| {
                let u = ((i * 7919) % 1009) as f64 / 1009.0 - 0.5;
                (i % 2 == 0, if i % 2 == 0 { 0.6 } else { 0.0 } + 0.8 * u)
            })
            .collect();
        let p = pairs(&d);
        let px = InputDist::uniform();
        let (_, best) = optimize_threshold(&p, &px).unwrap();
        for k in 0..200 {
            let th = -0.5 + k as f64 * 0.01;
            let mi = mutual_info(&hard_transition(&p, th).unwrap(), &px);
            assert!(mi <= best + 1e-12);
        }
    }
}
