//! Cross-checks of the synthesized wavelets against their frequency-domain
//! definition: energy normalization, the real/holomorphic relation, an FFT
//! comparison of the sampled mother wavelet with the closed-form spectrum,
//! analyticity, and robustness of the quadrature to its truncation knobs.

use num_complex::Complex64;
use riwave::synthesis::{
    causality_score, cutoff_frequency, is_causal, synthesize, synthesize_with, SynthesisOptions,
    TimeGrid,
};
use riwave::{PhaseVariant, WaveletKind, WaveletParams};
use rustfft::FftPlanner;

const RATE: f64 = 28_160.0;

fn mother(kind: WaveletKind, half: usize) -> riwave::synthesis::SampledWavelet {
    let p = WaveletParams::standard();
    let grid = TimeGrid::symmetric(half, 1.0 / RATE);
    synthesize(1.0, 0.0, grid, &p, kind).unwrap()
}

#[test]
fn mother_energy_is_unit_for_both_kinds() {
    for kind in [WaveletKind::RealWavelet, WaveletKind::Holomorphic] {
        let w = mother(kind, 1024);
        let e = w.energy();
        assert!((e - 1.0).abs() < 1e-3, "{kind:?} energy {e}");
    }
}

#[test]
fn real_wavelet_is_twice_the_real_part_of_the_holomorphic() {
    // the identity requires a common absolute normalization; each kind's own
    // unit-energy constant differs by sqrt(2)
    let p = WaveletParams::standard();
    let grid = TimeGrid::symmetric(256, 1.0 / RATE);
    let opts = SynthesisOptions {
        normalization_override: Some(p.normalization(WaveletKind::RealWavelet)),
        ..SynthesisOptions::default()
    };
    let re = synthesize_with(1.0, 0.0, grid, &p, WaveletKind::RealWavelet, &opts).unwrap();
    let ho = synthesize_with(1.0, 0.0, grid, &p, WaveletKind::Holomorphic, &opts).unwrap();
    let peak = ho.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (a, b) in re.values.iter().zip(&ho.values) {
        assert!((a.re - 2.0 * b.re).abs() <= 1e-10 * peak);
        assert_eq!(a.im, 0.0);
    }
}

/// DFT of the sampled holomorphic mother wavelet, with the bin frequencies.
fn mother_dft(half: usize) -> (Vec<f64>, Vec<Complex64>) {
    let w = mother(WaveletKind::Holomorphic, half);
    let n = w.values.len();
    let mut buf = w.values.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dw = 2.0 * std::f64::consts::PI / (n as f64 * w.grid.step);
    // continuous-transform approximation: multiply by dt (the bin phases
    // also carry the grid-start offset, irrelevant for magnitudes)
    for v in &mut buf {
        *v *= w.grid.step;
    }
    let freqs = (0..n)
        .map(|k| {
            let k = k as f64;
            if k < n as f64 / 2.0 {
                k * dw
            } else {
                (k - n as f64) * dw
            }
        })
        .collect();
    (freqs, buf)
}

#[test]
fn dft_magnitude_matches_the_closed_form_spectrum() {
    // |psi_holo^(omega)| = sqrt(2 s) |spectrum(s, omega)| for omega > 0
    let p = WaveletParams::standard();
    let (freqs, dft) = mother_dft(2048);
    let spec_mag = |w: f64| {
        p.spectrum(1.0, w, PhaseVariant::KinkFree).unwrap().norm() * 2.0f64.sqrt()
    };
    let peak = freqs
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| spec_mag(w))
        .fold(0.0, f64::max);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut bins = 0;
    for (&w, v) in freqs.iter().zip(&dft) {
        let m = if w > 0.0 { spec_mag(w) } else { 0.0 };
        if m >= 0.01 * peak {
            num += (v.norm() - m).powi(2);
            den += m * m;
            bins += 1;
        }
    }
    assert!(bins > 100, "only {bins} significant bins");
    let rel_rms = (num / den).sqrt();
    assert!(rel_rms < 0.01, "relative RMS deviation {rel_rms:.3e} over {bins} bins");
}

#[test]
fn holomorphic_spectrum_has_no_negative_frequency_energy() {
    let (freqs, dft) = mother_dft(2048);
    let mut neg = 0.0;
    let mut total = 0.0;
    for (&w, v) in freqs.iter().zip(&dft) {
        let e = v.norm_sqr();
        total += e;
        if w < 0.0 {
            neg += e;
        }
    }
    assert!(neg / total < 1e-4, "negative-frequency fraction {:.3e}", neg / total);
}

#[test]
fn doubling_the_cutoff_does_not_move_the_wavelet() {
    let p = WaveletParams::standard();
    let grid = TimeGrid::symmetric(128, 1.0 / RATE);
    let wc = cutoff_frequency(1.0, &p).unwrap();
    let base = synthesize_with(
        1.0,
        0.0,
        grid,
        &p,
        WaveletKind::Holomorphic,
        &SynthesisOptions { cutoff_override: Some(wc), ..SynthesisOptions::default() },
    )
    .unwrap();
    let wide = synthesize_with(
        1.0,
        0.0,
        grid,
        &p,
        WaveletKind::Holomorphic,
        &SynthesisOptions { cutoff_override: Some(2.0 * wc), ..SynthesisOptions::default() },
    )
    .unwrap();
    let peak = base.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (a, b) in base.values.iter().zip(&wide.values) {
        assert!((a - b).norm() < 1e-6 * peak);
    }
}

#[test]
fn cutoff_fraction_choice_is_immaterial() {
    let p = WaveletParams::standard();
    let grid = TimeGrid::symmetric(128, 1.0 / RATE);
    let loose = synthesize_with(
        1.0,
        0.0,
        grid,
        &p,
        WaveletKind::Holomorphic,
        &SynthesisOptions { cutoff_fraction: 1e-4, ..SynthesisOptions::default() },
    )
    .unwrap();
    let tight = synthesize(1.0, 0.0, grid, &p, WaveletKind::Holomorphic).unwrap();
    let peak = tight.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let rms = (loose
        .values
        .iter()
        .zip(&tight.values)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / grid.len as f64)
        .sqrt();
    assert!(rms < 1e-3 * peak, "RMS shift {:.3e} of peak", rms / peak);
}

#[test]
fn romberg_integration_agrees_at_spot_times() {
    // independent slow path: Romberg on the inverse-transform integral
    // psi_holo(t) = sqrt(2 s) / (2 pi) * Int_0^wc conj(S(w)) e^{iwt} dw
    let p = WaveletParams::standard();
    let s = 1.0;
    let wc = cutoff_frequency(s, &p).unwrap();
    let dt = 1.0 / RATE;
    let romberg = |t: f64| -> Complex64 {
        let f = |w: f64| {
            if w <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let spec = p.spectrum(s, w, PhaseVariant::KinkFree).unwrap();
            spec.conj() * Complex64::from_polar(1.0, w * t)
        };
        // trapezoid ladder with Richardson extrapolation
        let levels = 17;
        let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(levels);
        let mut trap = 0.5 * (f(0.0) + f(wc)) * wc;
        rows.push(vec![trap]);
        let mut n = 1usize;
        for _ in 1..levels {
            let h = wc / n as f64;
            let mut sum = Complex64::new(0.0, 0.0);
            for i in 0..n {
                sum += f((i as f64 + 0.5) * h);
            }
            trap = 0.5 * (trap + h * sum);
            n *= 2;
            let prev = rows.last().unwrap().clone();
            let mut row = vec![trap];
            let mut pow4 = 1.0;
            for r in &prev {
                pow4 *= 4.0;
                let last = *row.last().unwrap();
                row.push(last + (last - r) / (pow4 - 1.0));
            }
            rows.push(row);
        }
        *rows.last().unwrap().last().unwrap() * ((2.0 * s).sqrt() / (2.0 * std::f64::consts::PI))
    };
    let grid = TimeGrid::symmetric(200, dt);
    let direct = synthesize(s, 0.0, grid, &p, WaveletKind::Holomorphic).unwrap();
    let peak = direct.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for idx in [200usize, 172, 144, 228] {
        let t = grid.time(idx);
        let slow = romberg(t);
        let fast = direct.values[idx];
        assert!(
            (slow - fast).norm() < 1e-6 * peak,
            "t = {t}: romberg {slow} vs quadrature {fast}"
        );
    }
}

#[test]
fn standard_mother_wavelet_is_causal() {
    let p = WaveletParams::standard();
    assert!(is_causal(&p, RATE).unwrap());
    let w = mother(WaveletKind::Holomorphic, 1024);
    let score = causality_score(&w).unwrap();
    assert!(score <= 1e-4, "positive-time energy fraction {score:.3e}");
}
