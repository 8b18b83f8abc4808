//! Minimal canonical WAV input/output: 16-bit PCM, mono.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::Signal;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn format_err(field: &str, message: impl Into<String>) -> Error {
    Error::WavFormat { field: field.to_string(), message: message.into() }
}

fn read_u16(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Reads a 16-bit PCM mono WAV file; integer samples map to [-1, 1) by
/// division by 32768.
pub fn read_wav(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" {
        return Err(format_err("riff", "missing RIFF header"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(format_err("wave", "RIFF form type is not WAVE"));
    }

    let mut rate = None;
    let mut data: Option<&[u8]> = None;
    let mut at = 12;
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let size = read_u32(&bytes, at + 4) as usize;
        let body = at + 8;
        if body + size > bytes.len() {
            return Err(format_err(
                "chunk_size",
                format!("chunk `{}` overruns the file", String::from_utf8_lossy(id)),
            ));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(format_err("fmt", format!("fmt chunk too short ({size} bytes)")));
                }
                let audio_format = read_u16(&bytes, body);
                if audio_format != 1 {
                    return Err(format_err(
                        "audio_format",
                        format!("expected PCM (1), got {audio_format}"),
                    ));
                }
                let channels = read_u16(&bytes, body + 2);
                if channels != 1 {
                    return Err(format_err("channels", format!("expected mono, got {channels}")));
                }
                let bits = read_u16(&bytes, body + 14);
                if bits != 16 {
                    return Err(format_err(
                        "bits_per_sample",
                        format!("expected 16, got {bits}"),
                    ));
                }
                rate = Some(read_u32(&bytes, body + 4) as f64);
            }
            b"data" => data = Some(&bytes[body..body + size]),
            _ => {}
        }
        // chunks are word-aligned
        at = body + size + (size & 1);
    }

    let rate = rate.ok_or_else(|| format_err("fmt", "missing fmt chunk"))?;
    let data = data.ok_or_else(|| format_err("data", "missing data chunk"))?;
    if data.len() % 2 != 0 {
        return Err(format_err("data", "odd data chunk length for 16-bit samples"));
    }
    let samples = data
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / 32768.0)
        .collect();
    Ok(Signal::new(samples, rate))
}

/// Writes a canonical 16-bit PCM mono WAV file; samples are clipped to
/// [-1, 1] and rounded to the nearest integer level.
pub fn write_wav(path: impl AsRef<Path>, sig: &Signal) -> Result<()> {
    let path = path.as_ref();
    if !(sig.rate > 0.0) {
        return Err(format_err("sample_rate", format!("must be positive, got {}", sig.rate)));
    }
    let rate = sig.rate.round() as u32;
    let data_len = 2 * sig.samples.len() as u32;
    let mut bytes = Vec::with_capacity(44 + data_len as usize);
    bytes.extend_from_slice(b"RIFF");
    bytes.extend_from_slice(&(36 + data_len).to_le_bytes());
    bytes.extend_from_slice(b"WAVE");
    bytes.extend_from_slice(b"fmt ");
    bytes.extend_from_slice(&16u32.to_le_bytes());
    bytes.extend_from_slice(&1u16.to_le_bytes()); // PCM
    bytes.extend_from_slice(&1u16.to_le_bytes()); // mono
    bytes.extend_from_slice(&rate.to_le_bytes());
    bytes.extend_from_slice(&(rate * 2).to_le_bytes()); // byte rate
    bytes.extend_from_slice(&2u16.to_le_bytes()); // block align
    bytes.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    bytes.extend_from_slice(b"data");
    bytes.extend_from_slice(&data_len.to_le_bytes());
    for &x in &sig.samples {
        let v = (x.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}
