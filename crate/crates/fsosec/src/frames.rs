//! Aligned symbol frames as CSV: `symbol_index,slot_index,x,v`.

use std::path::Path;

use anyhow::{bail, Context};
use fsosec_core::recovery::SymbolFrame;

use crate::output::{num, write_csv};

pub const FRAME_HEADER: [&str; 4] = ["symbol_index", "slot_index", "x", "v"];

pub fn write_frame_csv(path: &Path, frame: &SymbolFrame) -> anyhow::Result<()> {
    let rows: Vec<Vec<String>> = frame
        .pairs
        .iter()
        .enumerate()
        .map(|(j, p)| {
            vec![
                j.to_string(),
                p.slot_index.to_string(),
                u8::from(p.x).to_string(),
                num(p.v),
            ]
        })
        .collect();
    write_csv(path, &FRAME_HEADER, &rows)
}

/// Reads a frame written by [`write_frame_csv`]. Slot indices must agree
/// with the given symbol rate and coherence time.
pub fn read_frame_csv(
    path: &Path,
    rep_rate_hz: f64,
    coherence_s: f64,
) -> anyhow::Result<SymbolFrame> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != FRAME_HEADER {
        bail!(
            "{}: expected columns {}",
            path.display(),
            FRAME_HEADER.join(",")
        );
    }
    let mut raw = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), line + 1))?;
        let parse = |i: usize| -> anyhow::Result<&str> {
            rec.get(i)
                .with_context(|| format!("{}: row {} is short", path.display(), line + 1))
        };
        let j: usize = parse(0)?.parse()?;
        let slot: usize = parse(1)?.parse()?;
        let x = match parse(2)? {
            "0" => false,
            "1" => true,
            other => bail!("{}: row {}: x = {other:?}", path.display(), line + 1),
        };
        let v: f64 = parse(3)?
            .parse()
            .with_context(|| format!("{}: row {}: bad v", path.display(), line + 1))?;
        if j != line {
            bail!("{}: row {} has symbol_index {j}", path.display(), line + 1);
        }
        raw.push((x, v, slot));
    }
    if raw.is_empty() {
        bail!("{}: no symbols", path.display());
    }
    let frame = SymbolFrame::from_pairs(
        raw.iter().map(|&(x, v, _)| (x, v)),
        rep_rate_hz,
        coherence_s,
        true,
    )?;
    if let Some((j, _)) = frame
        .pairs
        .iter()
        .zip(&raw)
        .enumerate()
        .find(|(_, (p, r))| p.slot_index != r.2)
    {
        bail!(
            "{}: slot_index at symbol {j} disagrees with the configured coherence time",
            path.display()
        );
    }
    Ok(frame)
}
