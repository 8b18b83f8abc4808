//! Prints the per-scale inverse truncation boosts of the production bank.

use riwave::params::WaveletParams;
use riwave::transform::{CwtEngine, WindowSettings};

fn main() {
    let p = WaveletParams::initial_guess();
    let settings = WindowSettings::standard(1.0 / 28_160.0);
    eprintln!("building bank...");
    let engine = CwtEngine::new(p.clone(), settings).unwrap();
    let bank = engine.bank();
    for (si, &s) in bank.scales().iter().enumerate() {
        let f = p.envelope_mode() * p.omega0() / s / (2.0 * std::f64::consts::PI);
        println!("{si:3}  s = {s:9.5}  centre {f:9.1} Hz  boost = {:.6}", bank.truncation_boost(si));
    }
}
