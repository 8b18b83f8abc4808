//! Synthesize the mother wavelet in both kinds, report energy and
//! causality, and write the time-domain shapes as TSV for plotting.
//!
//! Usage: cargo run --release --example wavelet_shapes [scale] [out_dir]

use riwave::synthesis::{causality_score, synthesize, TimeGrid};
use riwave::{WaveletKind, WaveletParams};

fn main() -> riwave::Result<()> {
    let mut args = std::env::args().skip(1);
    let scale: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1.0);
    let out_dir = args.next().unwrap_or_else(|| ".".into());

    let params = WaveletParams::standard();
    let rate = 28_160.0;
    let half = (0.025 * scale.max(1.0) * rate).ceil() as usize;
    let grid = TimeGrid::symmetric(half, 1.0 / rate);

    for kind in [WaveletKind::RealWavelet, WaveletKind::Holomorphic] {
        let w = synthesize(scale, 0.0, grid, &params, kind)?;
        let name = match kind {
            WaveletKind::RealWavelet => "wavelet_real.tsv",
            WaveletKind::Holomorphic => "wavelet_holomorphic.tsv",
        };
        let path = format!("{out_dir}/{name}");
        let mut text = String::new();
        for (i, v) in w.values.iter().enumerate() {
            match kind {
                WaveletKind::RealWavelet => {
                    text.push_str(&format!("{:.9}\t{:.9e}\n", grid.time(i), v.re));
                }
                WaveletKind::Holomorphic => {
                    text.push_str(&format!("{:.9}\t{:.9e}\t{:.9e}\n", grid.time(i), v.re, v.im));
                }
            }
        }
        std::fs::write(&path, text).expect("writable output directory");
        println!(
            "{kind:?}: energy = {:.6}, positive-time energy fraction = {:.3e} -> {path}",
            w.energy(),
            causality_score(&w)?
        );
    }
    Ok(())
}
