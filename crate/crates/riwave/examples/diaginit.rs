//! Temporary diagnostic: reconstruction quality of the rounded initial
//! parameter guess, per frequency and on the six-A corpus.

use riwave::calibrate::pearson;
use riwave::signal::{gen_harmonic, six_a_corpus, STANDARD_RATE};
use riwave::synthesis::is_causal;
use riwave::transform::{CwtEngine, WindowSettings};
use riwave::WaveletParams;

fn main() -> riwave::Result<()> {
    let p = WaveletParams::initial_guess();
    println!("initial guess causal = {}", is_causal(&p, STANDARD_RATE)?);

    let ws = WindowSettings::standard(1.0 / STANDARD_RATE);
    eprintln!("building bank at the initial guess...");
    let t0 = std::time::Instant::now();
    let engine = CwtEngine::new(p, ws)?;
    eprintln!("bank in {:.1} s", t0.elapsed().as_secs_f64());

    let rms = |xs: &[f64]| (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt();
    for freq in [110.0, 220.0, 440.0, 880.0, 1760.0, 3520.0] {
        let sig = gen_harmonic(freq, 1.0, STANDARD_RATE, 1.0)?;
        let (out, rep) = engine.process_stream(&sig)?;
        let (lo, hi) = rep.reconstructed;
        let rho = pearson(&sig.samples[lo..hi], &out.samples[lo..hi])?;
        let ratio = rms(&out.samples[lo..hi]) / rms(&sig.samples[lo..hi]);
        println!("{freq:>6} Hz: rho = {rho:.6}, rms out/in = {ratio:.4}");
    }

    let corpus = six_a_corpus(1.0, STANDARD_RATE)?;
    let (out, rep) = engine.process_stream(&corpus)?;
    let (lo, hi) = rep.reconstructed;
    let rho = pearson(&corpus.samples[lo..hi], &out.samples[lo..hi])?;
    println!("six-A corpus (1-s patches): rho = {rho:.6}");

    // the same correlation with a +-0.05 s blackout around each patch
    // boundary, to separate transition garbling from per-patch amplitude
    // mismatch
    let rate = STANDARD_RATE;
    let margin = (0.05 * rate) as usize;
    let patch = rate as usize; // 1-s patches
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in lo..hi {
        let pos = i % patch;
        let interior = pos >= margin && pos + margin < patch;
        if interior {
            a.push(corpus.samples[i]);
            b.push(out.samples[i]);
        }
    }
    println!("corpus rho away from boundaries: {:.6}", pearson(&a, &b)?);

    // per-patch rho and rms ratio
    for k in 0..6 {
        let (s, e) = ((k * patch).max(lo), ((k + 1) * patch).min(hi));
        let rho = pearson(&corpus.samples[s..e], &out.samples[s..e])?;
        let ratio = rms(&out.samples[s..e]) / rms(&corpus.samples[s..e]);
        println!("patch {k}: rho = {rho:.6}, rms out/in = {ratio:.4}");
    }
    Ok(())
}
