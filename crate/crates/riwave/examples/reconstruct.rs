//! Round-trip a harmonic through the windowed forward/inverse transform
//! and report the reconstruction quality.
//!
//! Usage: cargo run --release --example reconstruct [freq_hz] [duration_s]

use riwave::signal::{gen_harmonic, STANDARD_RATE};
use riwave::{CwtEngine, WaveletParams, WindowSettings};

fn main() -> riwave::Result<()> {
    let mut args = std::env::args().skip(1);
    let freq: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(440.0);
    let duration: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1.0);

    let params = WaveletParams::standard();
    let settings = WindowSettings::standard(1.0 / STANDARD_RATE);
    eprintln!("building the wavelet bank ({} scales)...", settings.scale_segments + 1);
    let t0 = std::time::Instant::now();
    let engine = CwtEngine::new(params, settings)?;
    eprintln!("bank ready in {:.1} s", t0.elapsed().as_secs_f64());

    let sig = gen_harmonic(freq, duration, STANDARD_RATE, 1.0)?;
    let t1 = std::time::Instant::now();
    let (out, report) = engine.process_stream(&sig)?;
    eprintln!(
        "processed {} windows in {:.1} s",
        report.windows,
        t1.elapsed().as_secs_f64()
    );
    println!(
        "freq {freq} Hz, {duration} s: rho = {:.6}, gain = {:.4}, reconstructed [{}, {}) of {}",
        report.rho,
        report.gain,
        report.reconstructed.0,
        report.reconstructed.1,
        out.len()
    );
    Ok(())
}
