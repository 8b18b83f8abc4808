//! Discretized forward and inverse wavelet transforms on the (scale, shift)
//! grid and the overlapped sliding-window pipeline.
//!
//! Each window of `N_M` samples owns a tau axis running from the window
//! start over a span `tau_R`; the wavelets are causal (support at negative
//! time), so those shifts are the ones whose daughters overlap the window.
//! The forward coefficients correlate each daughter against every supplied
//! signal sample its support covers — not only the window — so they are
//! faithful samples of the continuous transform; the window determines
//! which central samples are reconstructed. Window positions advance by
//! `(1 - d) N_M` samples.

use num_complex::Complex64;
use std::collections::VecDeque;
use std::sync::OnceLock;

use crate::calibrate::pearson;
use crate::error::{Error, Result};
use crate::params::{TonotopicMap, WaveletKind, WaveletParams};
use crate::signal::Signal;
use crate::synthesis::WaveletBank;

/// Windowing and discretization settings of the analysis pipeline.
#[derive(Debug, Clone, Copy)]
pub struct WindowSettings {
    /// Samples per window.
    pub n_m: usize,
    /// Overlap fraction in (0, 1).
    pub overlap: f64,
    /// Number of equal tonotopic segments (scale axis has one more node).
    pub scale_segments: usize,
    /// Shift step in samples.
    pub dtau_samples: usize,
    /// Shift span in samples.
    pub tau_r_samples: usize,
    /// Sampling interval in seconds.
    pub dt: f64,
}

impl WindowSettings {
    /// The reference settings: 128-sample windows, 75% overlap,
    /// half-semitone scale grid, shift step 4 samples, span 8 windows.
    pub fn standard(dt: f64) -> Self {
        Self {
            n_m: 128,
            overlap: 0.75,
            scale_segments: 200,
            dtau_samples: 4,
            tau_r_samples: 8 * 128,
            dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_m == 0 {
            return Err(Error::Config("window length must be positive".into()));
        }
        if !(self.overlap > 0.0 && self.overlap < 1.0) {
            return Err(Error::Config(format!(
                "overlap {} outside (0, 1)",
                self.overlap
            )));
        }
        let stride = (1.0 - self.overlap) * self.n_m as f64;
        if (stride - stride.round()).abs() > 1e-9 || stride.round() < 1.0 {
            return Err(Error::Config(format!(
                "(1 - overlap) * window = {stride} is not a positive integer"
            )));
        }
        let edge = self.overlap * self.n_m as f64 / 2.0;
        if (edge - edge.round()).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "overlap * window / 2 = {edge} is not an integer"
            )));
        }
        if self.dtau_samples == 0 || self.tau_r_samples % self.dtau_samples != 0 {
            return Err(Error::Config(format!(
                "shift span {} is not a multiple of the shift step {}",
                self.tau_r_samples, self.dtau_samples
            )));
        }
        if self.scale_segments == 0 {
            return Err(Error::Config("need at least one scale segment".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!("sampling interval {} not positive", self.dt)));
        }
        Ok(())
    }

    /// Window advance in samples, `(1 - d) N_M`.
    pub fn stride(&self) -> usize {
        ((1.0 - self.overlap) * self.n_m as f64).round() as usize
    }

    /// Unreconstructed samples at each end of a stream, `d N_M / 2`.
    pub fn edge(&self) -> usize {
        (self.overlap * self.n_m as f64 / 2.0).round() as usize
    }

    /// Number of shift nodes.
    pub fn shift_count(&self) -> usize {
        self.tau_r_samples / self.dtau_samples + 1
    }

    /// Shift step in seconds.
    pub fn dtau(&self) -> f64 {
        self.dtau_samples as f64 * self.dt
    }
}

/// Dense rectangular field over the (scale, shift) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    n_scales: usize,
    n_shifts: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(n_scales: usize, n_shifts: usize, value: T) -> Self {
        Self { n_scales, n_shifts, data: vec![value; n_scales * n_shifts] }
    }
}

impl<T> Grid<T> {
    pub fn n_scales(&self) -> usize {
        self.n_scales
    }

    pub fn n_shifts(&self) -> usize {
        self.n_shifts
    }

    pub fn get(&self, si: usize, ti: usize) -> &T {
        &self.data[si * self.n_shifts + ti]
    }

    pub fn set(&mut self, si: usize, ti: usize, value: T) {
        self.data[si * self.n_shifts + ti] = value;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn same_shape<U>(&self, other: &Grid<U>) -> bool {
        self.n_scales == other.n_scales && self.n_shifts == other.n_shifts
    }
}

/// Complex wavelet coefficients of one window.
#[derive(Debug, Clone)]
pub struct TransformGrid {
    scales: Vec<f64>,
    /// Shift offsets in samples relative to the window origin.
    shift_offsets: Vec<i64>,
    /// Absolute sample index of the window start.
    pub window_origin: i64,
    pub dt: f64,
    coeffs: Grid<Complex64>,
}

impl TransformGrid {
    /// Zero-coefficient grid on explicit axes, for evaluating closed-form
    /// coefficient fields directly.
    pub fn synthetic(scales: Vec<f64>, n_shifts: usize, dtau_samples: usize, dt: f64) -> Self {
        let shift_offsets = (0..n_shifts).map(|j| (j * dtau_samples) as i64).collect();
        let coeffs = Grid::filled(scales.len(), n_shifts, Complex64::new(0.0, 0.0));
        Self { scales, shift_offsets, window_origin: 0, dt, coeffs }
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn n_scales(&self) -> usize {
        self.scales.len()
    }

    pub fn n_shifts(&self) -> usize {
        self.shift_offsets.len()
    }

    /// Shift offset of node `ti` in samples relative to the window origin.
    pub fn shift_offset(&self, ti: usize) -> i64 {
        self.shift_offsets[ti]
    }

    /// Absolute shift time of node `ti` in seconds.
    pub fn shift_time(&self, ti: usize) -> f64 {
        (self.window_origin + self.shift_offsets[ti]) as f64 * self.dt
    }

    pub fn get(&self, si: usize, ti: usize) -> Complex64 {
        *self.coeffs.get(si, ti)
    }

    pub fn set(&mut self, si: usize, ti: usize, value: Complex64) {
        self.coeffs.set(si, ti, value);
    }

    pub fn coeffs(&self) -> &Grid<Complex64> {
        &self.coeffs
    }

    /// Largest coefficient modulus on the grid.
    pub fn max_modulus(&self) -> f64 {
        self.coeffs.as_slice().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Indices of the modulus maximum.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_v = -1.0;
        for si in 0..self.n_scales() {
            for ti in 0..self.n_shifts() {
                let v = self.get(si, ti).norm();
                if v > best_v {
                    best_v = v;
                    best = (si, ti);
                }
            }
        }
        best
    }
}

/// Per-stream reconstruction report.
#[derive(Debug, Clone)]
pub struct StreamReport {
    /// Pearson correlation of input and output over the reconstructed region.
    pub rho: f64,
    /// Output gain applied after reconstruction.
    pub gain: f64,
    /// Half-open sample range that was actually reconstructed.
    pub reconstructed: (usize, usize),
    /// Number of windows processed.
    pub windows: usize,
}

/// Forward/inverse transform engine holding the scale grid and the
/// precomputed wavelet bank for one (parameters, settings) pair.
pub struct CwtEngine {
    params: WaveletParams,
    settings: WindowSettings,
    scales: Vec<f64>,
    bank: WaveletBank,
    /// Local scale spacing as a fraction of s: e^{gamma/segments} - 1.
    ds_fraction: f64,
    gain: OnceLock<f64>,
}

impl CwtEngine {
    pub fn new(params: WaveletParams, settings: WindowSettings) -> Result<Self> {
        Self::with_map(params, settings, TonotopicMap::default())
    }

    pub fn with_map(
        params: WaveletParams,
        settings: WindowSettings,
        map: TonotopicMap,
    ) -> Result<Self> {
        settings.validate()?;
        let scales = map.scale_grid(&params, settings.scale_segments);
        // The bank holds each daughter only where the inverse's shift
        // lattice can reach it for every reconstructed sample of the
        // central stride: u in [edge + stride - 1 - tau_R, edge]. Large
        // scales are thereby truncated identically in the forward and the
        // inverse, which keeps the per-scale round-trip transfer real and
        // non-negative; an asymmetric truncation would impose a phase
        // shift (hence a correlation loss) on low-frequency content.
        let u_min = (settings.edge() + settings.stride()) as i64 - 1
            - settings.tau_r_samples as i64;
        let u_max = settings.edge() as i64;
        let bank = WaveletBank::build(
            &params,
            &scales,
            u_min,
            u_max,
            settings.dt,
            WaveletKind::Holomorphic,
        )?;
        let ds_fraction = (map.gamma() / settings.scale_segments as f64).exp_m1();
        Ok(Self { params, settings, scales, bank, ds_fraction, gain: OnceLock::new() })
    }

    pub fn params(&self) -> &WaveletParams {
        &self.params
    }

    pub fn settings(&self) -> &WindowSettings {
        &self.settings
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn bank(&self) -> &WaveletBank {
        &self.bank
    }

    /// Support-clipped correlation of the daughter at scale index `si`,
    /// shifted to the absolute sample `tau_abs`, against the supplied data
    /// (whose first sample has absolute index `data_origin`).
    fn shift_dot(&self, data: &[f64], data_origin: i64, tau_abs: i64, si: usize) -> Complex64 {
        let (lo, values) = self.bank.slice(si);
        let t_lo = (lo + tau_abs).max(data_origin);
        let t_hi = (lo + values.len() as i64 + tau_abs).min(data_origin + data.len() as i64);
        if t_lo >= t_hi {
            return Complex64::new(0.0, 0.0);
        }
        let base = (t_lo - tau_abs - lo) as usize;
        let d = &data[(t_lo - data_origin) as usize..(t_hi - data_origin) as usize];
        let v = &values[base..base + d.len()];
        let mut acc = Complex64::new(0.0, 0.0);
        for (f, psi) in d.iter().zip(v) {
            acc += f * psi.conj();
        }
        acc * self.settings.dt
    }

    /// Forward transform of the window starting at the absolute sample index
    /// `window_origin`, whose `N_M` samples must lie within `data`
    /// (`data_origin` is the absolute index of `data[0]`).
    ///
    /// Every daughter is correlated against all of `data` that its support
    /// covers; passing surrounding context beyond the window makes the
    /// coefficients faithful samples of the continuous transform, while
    /// passing exactly the window samples gives the window-truncated
    /// variant.
    pub fn forward(
        &self,
        data: &[f64],
        data_origin: i64,
        window_origin: i64,
    ) -> Result<TransformGrid> {
        let ws = &self.settings;
        if window_origin < data_origin
            || window_origin + ws.n_m as i64 > data_origin + data.len() as i64
        {
            return Err(Error::Config(format!(
                "window [{window_origin}, {}) not contained in the supplied data [{data_origin}, {})",
                window_origin + ws.n_m as i64,
                data_origin + data.len() as i64
            )));
        }
        let n_shifts = ws.shift_count();
        let shift_offsets: Vec<i64> =
            (0..n_shifts).map(|j| (j * ws.dtau_samples) as i64).collect();
        let mut coeffs = Grid::filled(self.scales.len(), n_shifts, Complex64::new(0.0, 0.0));
        for si in 0..self.scales.len() {
            for (ti, &tau_off) in shift_offsets.iter().enumerate() {
                coeffs.set(si, ti, self.shift_dot(data, data_origin, window_origin + tau_off, si));
            }
        }
        Ok(TransformGrid {
            scales: self.scales.clone(),
            shift_offsets,
            window_origin,
            dt: ws.dt,
            coeffs,
        })
    }

    /// Inverse transform of one window's grid onto its `N_M` samples.
    ///
    /// `mask` selects the pixels to include (all when `None`). The output
    /// carries no gain correction; see [`CwtEngine::gain`].
    pub fn inverse(&self, grid: &TransformGrid, mask: Option<&Grid<bool>>) -> Result<Vec<f64>> {
        let ws = &self.settings;
        if grid.n_scales() != self.scales.len() || grid.n_shifts() != ws.shift_count() {
            return Err(Error::Config(format!(
                "grid shape {}x{} does not match engine {}x{}",
                grid.n_scales(),
                grid.n_shifts(),
                self.scales.len(),
                ws.shift_count()
            )));
        }
        if let Some(m) = mask {
            if !m.same_shape(grid.coeffs()) {
                return Err(Error::Shape(format!(
                    "mask shape {}x{} does not match grid",
                    m.n_scales(),
                    m.n_shifts()
                )));
            }
        }
        let c_psi_sq = self.params.admissibility();
        if !c_psi_sq.is_finite() || c_psi_sq <= 0.0 {
            return Err(Error::Admissibility(format!(
                "admissibility constant {c_psi_sq} is not finite and positive"
            )));
        }
        let mut out = vec![0.0; ws.n_m];
        for si in 0..self.scales.len() {
            let s = self.scales[si];
            // s^{-5/2} weight against the unnormalized daughter is the
            // s^{-2} weight against the stored 1/sqrt(s)-normalized one;
            // the local log-uniform spacing is s * ds_fraction. The
            // truncation boost restores the amplitude that offset-range
            // clipping takes from the large scales.
            let factor = 2.0 / c_psi_sq * ws.dtau() * self.ds_fraction / s
                * self.bank.truncation_boost(si);
            let (lo, values) = self.bank.slice(si);
            let hi = lo + values.len() as i64;
            for ti in 0..grid.n_shifts() {
                if let Some(m) = mask {
                    if !*m.get(si, ti) {
                        continue;
                    }
                }
                let wt = grid.get(si, ti);
                if wt.norm_sqr() == 0.0 {
                    continue;
                }
                let tau_off = grid.shift_offset(ti);
                let t_lo = (lo + tau_off).max(0);
                let t_hi = (hi + tau_off).min(ws.n_m as i64);
                if t_lo >= t_hi {
                    continue;
                }
                let base = (t_lo - tau_off - lo) as usize;
                let seg = &mut out[t_lo as usize..t_hi as usize];
                let v = &values[base..base + seg.len()];
                for (o, psi) in seg.iter_mut().zip(v) {
                    *o += factor * (wt * psi).re;
                }
            }
        }
        Ok(out)
    }

    /// Output gain of the discretized inverse, calibrated lazily on a
    /// reference 440 Hz harmonic so reconstructed RMS matches input RMS.
    pub fn gain(&self) -> f64 {
        *self.gain.get_or_init(|| {
            let rate = 1.0 / self.settings.dt;
            let reference = crate::signal::gen_harmonic(440.0, 0.2, rate, 1.0)
                .expect("reference harmonic parameters are valid");
            match self.stream_raw(&reference, |_| Ok(None)) {
                Ok((out, _, region)) => {
                    let rms = |xs: &[f64]| {
                        (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt()
                    };
                    let num = rms(&reference.samples[region.0..region.1]);
                    let den = rms(&out[region.0..region.1]);
                    if den > 0.0 {
                        num / den
                    } else {
                        1.0
                    }
                }
                Err(_) => 1.0,
            }
        })
    }

    /// Windowed analysis/resynthesis without gain or edge handling;
    /// returns (raw output, window count, reconstructed range).
    fn stream_raw<F>(
        &self,
        sig: &Signal,
        mut mask_fn: F,
    ) -> Result<(Vec<f64>, usize, (usize, usize))>
    where
        F: FnMut(&TransformGrid) -> Result<Option<Grid<bool>>>,
    {
        let ws = &self.settings;
        let n = sig.samples.len();
        if n < ws.n_m {
            return Err(Error::Input(format!(
                "signal length {n} shorter than one window ({})",
                ws.n_m
            )));
        }
        let stride = ws.stride();
        let edge = ws.edge();
        let lat = ws.dtau_samples;
        let n_shifts = ws.shift_count();
        let n_scales = self.scales.len();
        let mut out = vec![0.0; n];
        let mut windows = 0usize;
        let mut covered_hi = edge;
        // Successive windows share shift nodes whenever the stride is a
        // multiple of the shift step: the coefficients depend on the signal
        // and the absolute shift only, so a rolling cache of coefficient
        // columns avoids recomputing the overlap.
        let cacheable = stride % lat == 0;
        let mut cache: VecDeque<Vec<Complex64>> = VecDeque::new();
        let mut cache_lat0: i64 = 0;
        let shift_offsets: Vec<i64> = (0..n_shifts).map(|j| (j * lat) as i64).collect();
        let mut w0 = 0usize;
        while w0 + ws.n_m <= n {
            let grid = if cacheable {
                let first = (w0 / lat) as i64;
                while !cache.is_empty() && cache_lat0 < first {
                    cache.pop_front();
                    cache_lat0 += 1;
                }
                if cache.is_empty() {
                    cache_lat0 = first;
                }
                while (cache.len() as i64) < n_shifts as i64 {
                    let tau_abs = (cache_lat0 + cache.len() as i64) * lat as i64;
                    let col: Vec<Complex64> = (0..n_scales)
                        .map(|si| self.shift_dot(&sig.samples, 0, tau_abs, si))
                        .collect();
                    cache.push_back(col);
                }
                let mut coeffs =
                    Grid::filled(n_scales, n_shifts, Complex64::new(0.0, 0.0));
                for (ti, col) in cache.iter().take(n_shifts).enumerate() {
                    for (si, &c) in col.iter().enumerate() {
                        coeffs.set(si, ti, c);
                    }
                }
                TransformGrid {
                    scales: self.scales.clone(),
                    shift_offsets: shift_offsets.clone(),
                    window_origin: w0 as i64,
                    dt: ws.dt,
                    coeffs,
                }
            } else {
                self.forward(&sig.samples, 0, w0 as i64)?
            };
            let mask = mask_fn(&grid)?;
            let rec = self.inverse(&grid, mask.as_ref())?;
            let c_lo = w0 + edge;
            let c_hi = w0 + edge + stride;
            out[c_lo..c_hi].copy_from_slice(&rec[edge..edge + stride]);
            covered_hi = c_hi;
            windows += 1;
            w0 += stride;
        }
        Ok((out, windows, (edge, covered_hi)))
    }

    /// Slides the window over the signal, reconstructing the central stride
    /// of each window via `mask_fn`-selected pixels. Edge samples are
    /// copied from the input and excluded from the reported correlation.
    pub fn process_stream_with<F>(
        &self,
        sig: &Signal,
        mask_fn: F,
    ) -> Result<(Signal, StreamReport)>
    where
        F: FnMut(&TransformGrid) -> Result<Option<Grid<bool>>>,
    {
        let gain = self.gain();
        let (mut out, windows, region) = self.stream_raw(sig, mask_fn)?;
        for x in &mut out[region.0..region.1] {
            *x *= gain;
        }
        out[..region.0].copy_from_slice(&sig.samples[..region.0]);
        out[region.1..].copy_from_slice(&sig.samples[region.1..]);
        let rho = pearson(&sig.samples[region.0..region.1], &out[region.0..region.1])?;
        Ok((
            Signal::new(out, sig.rate),
            StreamReport { rho, gain, reconstructed: region, windows },
        ))
    }

    /// Plain full-mask analysis/resynthesis of a stream.
    pub fn process_stream(&self, sig: &Signal) -> Result<(Signal, StreamReport)> {
        self.process_stream_with(sig, |_| Ok(None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gen_harmonic, STANDARD_RATE};

    fn small_settings() -> WindowSettings {
        // full geometry but a coarser scale axis to keep unit tests quick
        WindowSettings { scale_segments: 50, ..WindowSettings::standard(1.0 / STANDARD_RATE) }
    }

    fn engine() -> &'static CwtEngine {
        static ENGINE: OnceLock<CwtEngine> = OnceLock::new();
        ENGINE.get_or_init(|| {
            CwtEngine::new(WaveletParams::standard(), small_settings()).unwrap()
        })
    }

    #[test]
    fn settings_validation() {
        let ws = WindowSettings::standard(1.0 / STANDARD_RATE);
        ws.validate().unwrap();
        assert_eq!(ws.stride(), 32);
        assert_eq!(ws.edge(), 48);
        assert_eq!(ws.shift_count(), 257);
        assert!(WindowSettings { overlap: 0.7, ..ws }.validate().is_err());
        assert!(WindowSettings { dtau_samples: 3, ..ws }.validate().is_err());
        assert!(WindowSettings { n_m: 0, ..ws }.validate().is_err());
    }

    #[test]
    fn zero_window_gives_zero_grid() {
        let e = engine();
        let grid = e.forward(&vec![0.0; 128], 0, 0).unwrap();
        assert_eq!(grid.max_modulus(), 0.0);
    }

    #[test]
    fn forward_is_linear() {
        let e = engine();
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let f: Vec<f64> = (0..128).map(|_| next()).collect();
        let g: Vec<f64> = (0..128).map(|_| next()).collect();
        let (a, b) = (1.7, -0.4);
        let combined: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let gf = e.forward(&f, 0, 0).unwrap();
        let gg = e.forward(&g, 0, 0).unwrap();
        let gc = e.forward(&combined, 0, 0).unwrap();
        let scale = gf.max_modulus().max(gg.max_modulus());
        for si in 0..gc.n_scales() {
            for ti in 0..gc.n_shifts() {
                let expect = a * gf.get(si, ti) + b * gg.get(si, ti);
                assert!((gc.get(si, ti) - expect).norm() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn shift_covariance_along_tau() {
        let e = engine();
        let ws = e.settings();
        let k = 3usize; // shift by k * dtau samples
        let shift = k * ws.dtau_samples;
        // a burst contained in both window positions, so no samples enter
        // or leave when the window moves and covariance is exact everywhere
        let tone = gen_harmonic(440.0, 0.05, STANDARD_RATE, 1.0).unwrap();
        let mut f = vec![0.0; 256];
        f[shift + 16..120].copy_from_slice(&tone.samples[..120 - shift - 16]);
        let g0 = e.forward(&f[shift..shift + 128], 0, 0).unwrap();
        let g1 = e.forward(&f[..128], 0, 0).unwrap();
        let scale = g0.max_modulus();
        assert!(scale > 0.0);
        for si in 0..g0.n_scales() {
            for ti in 0..g0.n_shifts() - k {
                let d = (g0.get(si, ti) - g1.get(si, ti + k)).norm();
                assert!(d < 1e-10 * scale, "covariance broken at ({si}, {ti}): {d:e}");
            }
        }
    }

    #[test]
    fn empty_mask_reconstructs_zero() {
        let e = engine();
        let sig = gen_harmonic(440.0, 0.01, STANDARD_RATE, 1.0).unwrap();
        let grid = e.forward(&sig.samples[..128], 0, 0).unwrap();
        let mask = Grid::filled(grid.n_scales(), grid.n_shifts(), false);
        let rec = e.inverse(&grid, Some(&mask)).unwrap();
        assert!(rec.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let e = engine();
        assert!(e.forward(&vec![0.0; 64], 0, 0).is_err());
        let grid = e.forward(&vec![0.0; 128], 0, 0).unwrap();
        let mask = Grid::filled(2, 2, true);
        assert!(e.inverse(&grid, Some(&mask)).is_err());
    }

    #[test]
    fn short_signal_is_rejected() {
        let e = engine();
        let sig = Signal::new(vec![0.0; 100], STANDARD_RATE);
        assert!(e.process_stream(&sig).is_err());
    }
}
