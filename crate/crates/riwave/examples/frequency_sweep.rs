//! Round-trip pure tones across the audible range and tabulate the
//! reconstruction quality at each frequency.
//!
//! Usage: cargo run --release --example frequency_sweep [duration_s]

use riwave::signal::{gen_harmonic, STANDARD_RATE};
use riwave::{CwtEngine, WaveletParams, WindowSettings};

const FREQS: [f64; 8] = [80.0, 110.0, 220.0, 440.0, 880.0, 1760.0, 3520.0, 7040.0];

fn main() -> riwave::Result<()> {
    let duration: f64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(5.0);

    let params = WaveletParams::standard();
    let settings = WindowSettings::standard(1.0 / STANDARD_RATE);
    eprintln!("building the wavelet bank ({} scales)...", settings.scale_segments + 1);
    let t0 = std::time::Instant::now();
    let engine = CwtEngine::new(params, settings)?;
    eprintln!("bank ready in {:.1} s", t0.elapsed().as_secs_f64());

    println!("{:>9} {:>10} {:>8}", "freq [Hz]", "rho", "gain");
    for freq in FREQS {
        let sig = gen_harmonic(freq, duration, STANDARD_RATE, 1.0)?;
        let (_, report) = engine.process_stream(&sig)?;
        println!("{freq:>9.0} {:>10.6} {:>8.4}", report.rho, report.gain);
    }
    Ok(())
}
