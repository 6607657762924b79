//! `.fsow` binary waveform files.
//!
//! Layout, all little-endian: magic `FSOW`, version `u16`, flags `u16`,
//! sample rate `f64` (Hz), DC offset `f64` (volts, NaN when unknown),
//! sample count `u64`, label length `u16` and UTF-8 label bytes, then the
//! samples as `f32` volts.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use fsosec_core::fading::WaveformRecord;

use crate::output::write_atomic;

pub const MAGIC: [u8; 4] = *b"FSOW";
pub const VERSION: u16 = 1;

#[derive(Debug, thiserror::Error)]
pub enum WaveformError {
    #[error("not a waveform file (magic {0:?})")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("unsupported flags {0:#06x}")]
    UnsupportedFlags(u16),
    #[error("label is not valid UTF-8")]
    BadLabel,
    #[error("label of {0} bytes exceeds the 65535-byte limit")]
    LabelTooLong(usize),
    #[error("header declares {declared} samples but the payload holds {actual}")]
    LengthMismatch { declared: u64, actual: u64 },
    #[error("invalid waveform: {0}")]
    Invalid(#[from] fsosec_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn encode<W: Write>(w: &WaveformRecord, mut out: W) -> Result<(), WaveformError> {
    let label = w.label.as_bytes();
    let label_len =
        u16::try_from(label.len()).map_err(|_| WaveformError::LabelTooLong(label.len()))?;
    out.write_all(&MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&0u16.to_le_bytes())?;
    out.write_all(&w.sample_rate_hz.to_le_bytes())?;
    out.write_all(&w.dc_offset.unwrap_or(f64::NAN).to_le_bytes())?;
    out.write_all(&(w.samples.len() as u64).to_le_bytes())?;
    out.write_all(&label_len.to_le_bytes())?;
    out.write_all(label)?;
    for s in &w.samples {
        out.write_all(&s.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> io::Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn decode<R: Read>(mut r: R) -> Result<WaveformRecord, WaveformError> {
    let magic = read_array::<4, _>(&mut r)?;
    if magic != MAGIC {
        return Err(WaveformError::BadMagic(magic));
    }
    let version = u16::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(WaveformError::UnsupportedVersion(version));
    }
    let flags = u16::from_le_bytes(read_array(&mut r)?);
    if flags != 0 {
        return Err(WaveformError::UnsupportedFlags(flags));
    }
    let sample_rate_hz = f64::from_le_bytes(read_array(&mut r)?);
    let dc = f64::from_le_bytes(read_array(&mut r)?);
    let declared = u64::from_le_bytes(read_array(&mut r)?);
    let label_len = u16::from_le_bytes(read_array(&mut r)?) as usize;
    let mut label = vec![0u8; label_len];
    r.read_exact(&mut label)?;
    let label = String::from_utf8(label).map_err(|_| WaveformError::BadLabel)?;

    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    let actual = (payload.len() / 4) as u64;
    if payload.len() % 4 != 0 || actual != declared {
        return Err(WaveformError::LengthMismatch { declared, actual });
    }
    let samples = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let dc_offset = if dc.is_nan() { None } else { Some(dc) };
    Ok(WaveformRecord::new(
        samples,
        sample_rate_hz,
        dc_offset,
        label,
    )?)
}

pub fn write_waveform(path: &Path, w: &WaveformRecord) -> anyhow::Result<()> {
    write_atomic(path, |f| Ok(encode(w, BufWriter::new(f))?))
}

pub fn read_waveform(path: &Path) -> Result<WaveformRecord, WaveformError> {
    decode(BufReader::new(File::open(path)?))
}
