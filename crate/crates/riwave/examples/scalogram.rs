//! Forward-transform one window of a pure tone and export the coefficient
//! grid (the scalogram of a single window position), reporting the ridge.
//!
//! Usage: cargo run --release --example scalogram [freq_hz] [out.tsv]

use riwave::export::export_grid;
use riwave::signal::{gen_harmonic, STANDARD_RATE};
use riwave::{CwtEngine, WaveletParams, WindowSettings};

fn main() -> riwave::Result<()> {
    let mut args = std::env::args().skip(1);
    let freq: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(440.0);
    let out = args.next().unwrap_or_else(|| "scalogram.tsv".into());

    let params = WaveletParams::standard();
    let settings = WindowSettings::standard(1.0 / STANDARD_RATE);
    eprintln!("building the wavelet bank ({} scales)...", settings.scale_segments + 1);
    let engine = CwtEngine::new(params, settings)?;

    // a window from the middle of a half-second tone
    let sig = gen_harmonic(freq, 0.5, STANDARD_RATE, 1.0)?;
    let origin = (sig.len() / 2 / settings.stride() * settings.stride()) as i64;
    let grid = engine.forward(&sig.samples, 0, origin)?;
    export_grid(&out, &grid)?;

    let (si, ti) = grid.argmax();
    println!(
        "{freq} Hz window at sample {origin}: modulus peak at s = {:.4} \
         (tau offset {} samples), grid {}x{} -> {out}",
        grid.scales()[si],
        grid.shift_offset(ti),
        grid.n_scales(),
        grid.n_shifts()
    );
    Ok(())
}
