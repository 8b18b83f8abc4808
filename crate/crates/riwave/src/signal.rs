//! Test-signal generation: harmonics, maxima-patched concatenation and
//! seeded white noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sampling rate (Hz) of the reference corpus; Nyquist 14080 Hz.
pub const STANDARD_RATE: f64 = 28_160.0;

/// A mono real-valued signal.
#[derive(Debug, Clone)]
pub struct Signal {
    pub samples: Vec<f64>,
    pub rate: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, rate: f64) -> Self {
        Self { samples, rate }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sampling interval in seconds.
    pub fn dt(&self) -> f64 {
        1.0 / self.rate
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.rate
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }
}

/// Pure sine `amplitude sin(2 pi freq n / rate)`.
pub fn gen_harmonic(freq: f64, duration: f64, rate: f64, amplitude: f64) -> Result<Signal> {
    if !(rate > 0.0) {
        return Err(Error::Input(format!("sample rate must be positive, got {rate}")));
    }
    if !(freq > 0.0 && freq < rate / 2.0) {
        return Err(Error::Input(format!(
            "frequency {freq} Hz outside (0, Nyquist {} Hz)",
            rate / 2.0
        )));
    }
    let n = (duration * rate).round() as usize;
    let w = 2.0 * std::f64::consts::PI * freq / rate;
    Ok(Signal::new((0..n).map(|i| amplitude * (w * i as f64).sin()).collect(), rate))
}

/// Index of the first interior sample strictly greater than both neighbours.
fn first_local_max(s: &[f64]) -> Option<usize> {
    (1..s.len().saturating_sub(1)).find(|&i| s[i - 1] < s[i] && s[i] > s[i + 1])
}

/// Index of the last interior sample strictly greater than both neighbours.
fn last_local_max(s: &[f64]) -> Option<usize> {
    (1..s.len().saturating_sub(1)).rev().find(|&i| s[i - 1] < s[i] && s[i] > s[i + 1])
}

/// Concatenates the parts, cutting each seam at sample-level local maxima so
/// the joined signal has no slope spike: every part is truncated to end at
/// its last local maximum, and every part after the first starts at its
/// first local maximum.
pub fn patch_at_maxima(parts: &[Signal]) -> Result<Signal> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Input("patch_at_maxima needs at least one part".into()))?;
    let rate = first.rate;
    let mut samples = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        if part.rate != rate {
            return Err(Error::Input(format!(
                "part {i} rate {} differs from {rate}",
                part.rate
            )));
        }
        let hi = last_local_max(&part.samples)
            .ok_or_else(|| Error::Input(format!("part {i} has no interior local maximum")))?;
        let lo = if i == 0 {
            0
        } else {
            first_local_max(&part.samples).expect("a last maximum implies a first one")
        };
        samples.extend_from_slice(&part.samples[lo..=hi]);
    }
    Ok(Signal::new(samples, rate))
}

/// Reference level against which the white-noise fraction is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseReference {
    /// Noise sigma = level times the signal peak amplitude (default; for a
    /// unit-amplitude harmonic, sigma equals the level).
    Peak,
    /// Noise sigma = level times the signal RMS.
    Rms,
}

/// Adds i.i.d. N(0, sigma^2) samples with sigma = level times the reference
/// amplitude. Deterministic under the seed; variates come from the Marsaglia
/// polar method driven by a ChaCha8 stream.
pub fn add_white_noise(sig: &Signal, level: f64, seed: u64, reference: NoiseReference) -> Signal {
    if level == 0.0 {
        return sig.clone();
    }
    let sigma = level
        * match reference {
            NoiseReference::Peak => sig.peak(),
            NoiseReference::Rms => sig.rms(),
        };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normals = NormalSource { rng: &mut rng, spare: None };
    let samples = sig.samples.iter().map(|&x| x + sigma * normals.next()).collect();
    Signal::new(samples, sig.rate)
}

/// Marsaglia polar generator of standard normal variates.
struct NormalSource<'a> {
    rng: &'a mut ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalSource<'_> {
    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u: f64 = self.rng.gen_range(-1.0..1.0);
            let v: f64 = self.rng.gen_range(-1.0..1.0);
            let q = u * u + v * v;
            if q > 0.0 && q < 1.0 {
                let f = (-2.0 * q.ln() / q).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }
}

/// The six-A calibration corpus: unit-amplitude notes A2..A7 (110 * 2^k Hz,
/// k = 0..5), each `patch_duration` seconds at `rate`, patched at maxima.
pub fn six_a_corpus(patch_duration: f64, rate: f64) -> Result<Signal> {
    let parts: Vec<Signal> = (0..6)
        .map(|k| gen_harmonic(110.0 * (1u32 << k) as f64, patch_duration, rate, 1.0))
        .collect::<Result<_>>()?;
    patch_at_maxima(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_length_and_quarter_period_sample() {
        let s = gen_harmonic(440.0, 5.0, STANDARD_RATE, 1.0).unwrap();
        assert_eq!(s.len(), 140_800);
        // quarter period of 440 Hz at this rate is exactly 16 samples
        assert!((s.samples[16] - 1.0).abs() < 1e-12);
        let z = gen_harmonic(440.0, 0.1, STANDARD_RATE, 0.0).unwrap();
        assert!(z.samples.iter().all(|&x| x == 0.0));
        assert!(gen_harmonic(14_080.0, 1.0, STANDARD_RATE, 1.0).is_err());
        assert!(gen_harmonic(20_000.0, 1.0, STANDARD_RATE, 1.0).is_err());
    }

    #[test]
    fn corpus_length_and_frequencies() {
        let c = six_a_corpus(5.0, STANDARD_RATE).unwrap();
        let expected = 844_800i64;
        assert!(
            (c.len() as i64 - expected).abs() <= 1600,
            "corpus length {}",
            c.len()
        );
    }

    #[test]
    fn seams_have_no_slope_spike() {
        let parts: Vec<Signal> = [110.0, 220.0, 440.0]
            .iter()
            .map(|&f| gen_harmonic(f, 1.0, STANDARD_RATE, 1.0).unwrap())
            .collect();
        let joined = patch_at_maxima(&parts).unwrap();
        let max_step = joined
            .samples
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        // the largest per-part slope is that of the highest-frequency sine
        let per_part_bound = 2.0 * std::f64::consts::PI * 440.0 / STANDARD_RATE;
        assert!(max_step <= per_part_bound * 1.01, "seam step {max_step}");
    }

    #[test]
    fn single_part_is_trimmed_to_its_last_maximum() {
        let part = gen_harmonic(110.0, 1.0, STANDARD_RATE, 1.0).unwrap();
        let out = patch_at_maxima(std::slice::from_ref(&part)).unwrap();
        assert!(out.len() <= part.len());
        let s = &out.samples;
        let n = s.len();
        assert!(s[n - 1] > s[n - 2] || (s[n - 1] - 1.0).abs() < 1e-9);
        assert!(patch_at_maxima(&[Signal::new(vec![0.0; 10], 1.0)]).is_err());
        assert!(patch_at_maxima(&[]).is_err());
    }

    #[test]
    fn noise_level_and_determinism() {
        let s = gen_harmonic(440.0, 5.0, STANDARD_RATE, 1.0).unwrap();
        let a = add_white_noise(&s, 0.05, 7, NoiseReference::Peak);
        let b = add_white_noise(&s, 0.05, 7, NoiseReference::Peak);
        assert_eq!(a.samples, b.samples);
        let c = add_white_noise(&s, 0.05, 8, NoiseReference::Peak);
        assert_ne!(a.samples, c.samples);

        let n = a.len() as f64;
        let diffs: Vec<f64> =
            a.samples.iter().zip(&s.samples).map(|(x, y)| x - y).collect();
        let mean = diffs.iter().sum::<f64>() / n;
        let sd =
            (diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((sd - 0.05).abs() < 0.001, "noise sd {sd}");

        let unchanged = add_white_noise(&s, 0.0, 7, NoiseReference::Peak);
        assert_eq!(unchanged.samples, s.samples);

        // RMS reference scales sigma by 1/sqrt(2) for a sine
        let r = add_white_noise(&s, 0.05, 7, NoiseReference::Rms);
        let sd_r = {
            let d: Vec<f64> = r.samples.iter().zip(&s.samples).map(|(x, y)| x - y).collect();
            let m = d.iter().sum::<f64>() / n;
            (d.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        assert!((sd_r - 0.05 / std::f64::consts::SQRT_2).abs() < 0.001);
    }
}
