//! Time-frequency reassignment via the structure equations.
//!
//! The phase derivatives of the transform are not obtained by unwrapping;
//! for nu = c = 1 they follow algebraically from the modulus derivatives
//! through the family's structure equations. Each pixel is then moved to
//! its instantaneous (scale, shift) point and re-histogrammed with a
//! unimodular complex weight that preserves the phase information.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::WaveletParams;
use crate::transform::{Grid, TransformGrid};

/// Default modulus floor (fraction of the grid maximum) below which
/// log-derivatives are considered noise-dominated.
pub const DERIVATIVE_FLOOR: f64 = 1e-3;

/// Default importance threshold on accumulated bin weights.
pub const IMPORTANCE_THRESHOLD: f64 = 1e-12;

/// Log-modulus and phase derivatives over a transform grid.
#[derive(Debug, Clone)]
pub struct DerivativeField {
    pub d_tau_r: Grid<f64>,
    pub d_s_r: Grid<f64>,
    pub d_tau_phi: Grid<f64>,
    pub d_s_phi: Grid<f64>,
    /// Pixels where the derivatives are meaningful.
    pub valid: Grid<bool>,
}

/// Finite-difference log-modulus derivatives of the grid.
///
/// Central differences along both axes (one-sided at the edges); the scale
/// axis is log-uniform, so the s-derivative is the ln-s difference divided
/// by `s`. Pixels with modulus below `floor_fraction` of the grid maximum,
/// or adjacent to a zero pixel, are marked invalid.
pub fn log_derivatives(
    grid: &TransformGrid,
    floor_fraction: f64,
) -> Result<(Grid<f64>, Grid<f64>, Grid<bool>)> {
    let (ns, nt) = (grid.n_scales(), grid.n_shifts());
    if ns < 2 || nt < 2 {
        return Err(Error::Shape(format!("need at least a 2x2 grid, got {ns}x{nt}")));
    }
    let dtau = grid.dt * (grid.shift_offset(1) - grid.shift_offset(0)) as f64;
    let dlns = grid.scales()[1].ln() - grid.scales()[0].ln();
    let floor = floor_fraction * grid.max_modulus();

    let modulus: Vec<f64> = (0..ns)
        .flat_map(|si| (0..nt).map(move |ti| grid.get(si, ti).norm()))
        .collect();
    let m = |si: usize, ti: usize| modulus[si * nt + ti];

    let mut d_tau_r = Grid::filled(ns, nt, 0.0);
    let mut d_s_r = Grid::filled(ns, nt, 0.0);
    let mut valid = Grid::filled(ns, nt, false);
    for si in 0..ns {
        for ti in 0..nt {
            if m(si, ti) < floor {
                continue;
            }
            let (t0, t1) = (ti.saturating_sub(1), (ti + 1).min(nt - 1));
            let (s0, s1) = (si.saturating_sub(1), (si + 1).min(ns - 1));
            if m(si, t0) == 0.0 || m(si, t1) == 0.0 || m(s0, ti) == 0.0 || m(s1, ti) == 0.0 {
                continue;
            }
            let dr_t = (m(si, t1) / m(si, t0)).ln() / ((t1 - t0) as f64 * dtau);
            let dr_s = (m(s1, ti) / m(s0, ti)).ln()
                / ((s1 - s0) as f64 * dlns * grid.scales()[si]);
            d_tau_r.set(si, ti, dr_t);
            d_s_r.set(si, ti, dr_s);
            valid.set(si, ti, true);
        }
    }
    Ok((d_tau_r, d_s_r, valid))
}

/// Phase derivatives from the nu = c = 1 structure equations, pixel-wise on
/// valid pixels.
pub fn phase_derivatives(
    d_tau_r: &Grid<f64>,
    d_s_r: &Grid<f64>,
    valid: &Grid<bool>,
    scales: &[f64],
    p: &WaveletParams,
) -> Result<(Grid<f64>, Grid<f64>)> {
    if !p.is_unit_nu_c() {
        return Err(Error::UnsupportedParams(format!(
            "structure equations need nu = c = 1, got nu = {}, c = {}",
            p.nu(),
            p.c_exp()
        )));
    }
    if d_tau_r.n_scales() != scales.len() || !d_tau_r.same_shape(d_s_r) {
        return Err(Error::Shape("derivative grids and scale axis disagree".into()));
    }
    let (w0, alpha, beta, kappa) = (p.omega0(), p.alpha(), p.beta(), p.kappa());
    let (ns, nt) = (d_tau_r.n_scales(), d_tau_r.n_shifts());
    let mut d_tau_phi = Grid::filled(ns, nt, 0.0);
    let mut d_s_phi = Grid::filled(ns, nt, 0.0);
    for si in 0..ns {
        let s = scales[si];
        for ti in 0..nt {
            if !*valid.get(si, ti) {
                continue;
            }
            let dr_t = *d_tau_r.get(si, ti);
            let dr_s = *d_s_r.get(si, ti);
            let dp_t = w0 / s - (beta * dr_t + w0 * dr_s) / kappa;
            let dp_s = (alpha - (s / w0) * (beta * dp_t - kappa * dr_t)) / s;
            d_tau_phi.set(si, ti, dp_t);
            d_s_phi.set(si, ti, dp_s);
        }
    }
    Ok((d_tau_phi, d_s_phi))
}

/// Convenience wrapper chaining [`log_derivatives`] and
/// [`phase_derivatives`].
pub fn derivative_field(
    grid: &TransformGrid,
    p: &WaveletParams,
    floor_fraction: f64,
) -> Result<DerivativeField> {
    let (d_tau_r, d_s_r, valid) = log_derivatives(grid, floor_fraction)?;
    let (d_tau_phi, d_s_phi) = phase_derivatives(&d_tau_r, &d_s_r, &valid, grid.scales(), p)?;
    Ok(DerivativeField { d_tau_r, d_s_r, d_tau_phi, d_s_phi, valid })
}

/// Complex-weighted histogram over the instantaneous (scale, shift) points.
///
/// The bin lattice extends the source shift axis by [`ReassignedMap::tau_margin`]
/// nodes on each side: the instantaneous time differs from the source shift
/// by the family's group delay, which near the ends of a window's shift
/// axis points outside it. Binning those pixels on the extended lattice
/// (instead of discarding them) keeps the map faithful to the transform of
/// the whole signal, where the same targets are interior points.
#[derive(Debug, Clone)]
pub struct ReassignedMap {
    scales: Vec<f64>,
    /// Shift offsets of the bin lattice (extended axis), in samples
    /// relative to `window_origin`.
    shift_offsets: Vec<i64>,
    /// Extension of the bin lattice beyond the source axis, in nodes per
    /// side.
    pub tau_margin: usize,
    pub window_origin: i64,
    pub dt: f64,
    /// Accumulated complex weight per target bin (on the extended lattice).
    pub weights: Grid<Complex64>,
    /// Per source pixel: target bin on the extended lattice, or `None`
    /// when discarded or invalid.
    pub mapping: Grid<Option<(usize, usize)>>,
    /// Valid source pixels whose instantaneous point left the axes.
    pub discarded: usize,
    /// Valid source pixels in total.
    pub valid_pixels: usize,
}

impl ReassignedMap {
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn shift_offset(&self, ti: usize) -> i64 {
        self.shift_offsets[ti]
    }

    /// Indices of the bin with the largest accumulated |weight|.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_v = -1.0;
        for si in 0..self.weights.n_scales() {
            for ti in 0..self.weights.n_shifts() {
                let v = self.weights.get(si, ti).norm();
                if v > best_v {
                    best_v = v;
                    best = (si, ti);
                }
            }
        }
        best
    }
}

/// Moves every valid pixel to its instantaneous point and accumulates the
/// complex weights on the nearest (ln s, tau) node of the extended bin
/// lattice.
///
/// A pixel is discarded when its phase derivative along tau is not
/// positive, or when the instantaneous point leaves the scale axis or the
/// extended shift lattice; ties in nearest-node rounding go to the smaller
/// index. The lattice margin is twice the source span per side, enough for
/// the group delay of every scale in the tonotopic range.
pub fn reassign(grid: &TransformGrid, field: &DerivativeField, p: &WaveletParams) -> Result<ReassignedMap> {
    let (ns, nt) = (grid.n_scales(), grid.n_shifts());
    if !field.valid.same_shape(grid.coeffs()) {
        return Err(Error::Shape("derivative field does not match the grid".into()));
    }
    let scales = grid.scales().to_vec();
    let w0 = p.omega0();
    let ln_s0 = scales[0].ln();
    let dlns = scales[1].ln() - scales[0].ln();
    let dtau_samples = (grid.shift_offset(1) - grid.shift_offset(0)) as f64;
    let tau_margin = 2 * (nt - 1);
    let nt_bins = nt + 2 * tau_margin;
    let shift_offsets: Vec<i64> = (0..nt_bins)
        .map(|ti| grid.shift_offset(0) + (ti as i64 - tau_margin as i64) * dtau_samples as i64)
        .collect();

    let mut weights = Grid::filled(ns, nt_bins, Complex64::new(0.0, 0.0));
    let mut mapping = Grid::filled(ns, nt, None);
    let mut discarded = 0usize;
    let mut valid_pixels = 0usize;

    // nearest index with ties toward the smaller one
    let nearest = |x: f64, n: usize| -> Option<usize> {
        let i = (x + 0.5).ceil() - 1.0; // round half down
        (i >= 0.0 && i < n as f64).then_some(i as usize)
    };

    for si in 0..ns {
        let s = scales[si];
        for ti in 0..nt {
            if !*field.valid.get(si, ti) {
                continue;
            }
            valid_pixels += 1;
            let dp_t = *field.d_tau_phi.get(si, ti);
            if dp_t <= 0.0 {
                discarded += 1;
                continue;
            }
            let s_new = w0 / dp_t;
            if s_new < scales[0] || s_new > scales[ns - 1] {
                discarded += 1;
                continue;
            }
            let dtau = s * s / w0 * *field.d_s_phi.get(si, ti); // tau_new - tau
            let t_new = grid.shift_offset(ti) as f64 + dtau / grid.dt;
            let (Some(bi), Some(bj)) = (
                nearest((s_new.ln() - ln_s0) / dlns, ns),
                nearest((t_new - shift_offsets[0] as f64) / dtau_samples, nt_bins),
            ) else {
                discarded += 1;
                continue;
            };
            let phase = w0 * (1.0 / s_new + 1.0 / s) * dtau / 2.0;
            let w = grid.get(si, ti) * Complex64::from_polar(1.0, phase);
            weights.set(bi, bj, weights.get(bi, bj) + w);
            mapping.set(si, ti, Some((bi, bj)));
        }
    }
    Ok(ReassignedMap {
        scales,
        shift_offsets,
        tau_margin,
        window_origin: grid.window_origin,
        dt: grid.dt,
        weights,
        mapping,
        discarded,
        valid_pixels,
    })
}

/// Marks each bin of the reassigned lattice important iff it accumulated
/// at least `threshold` of |weight|.
pub fn bin_importance(map: &ReassignedMap, threshold: f64) -> Grid<bool> {
    let (ns, nt) = (map.weights.n_scales(), map.weights.n_shifts());
    let mut mask = Grid::filled(ns, nt, false);
    for si in 0..ns {
        for ti in 0..nt {
            if map.weights.get(si, ti).norm() >= threshold {
                mask.set(si, ti, true);
            }
        }
    }
    mask
}

/// Marks each source pixel important iff its target bin accumulated at
/// least `threshold` of |weight|; discarded pixels are unimportant.
pub fn importance_mask(map: &ReassignedMap, threshold: f64) -> Grid<bool> {
    let (ns, nt) = (map.mapping.n_scales(), map.mapping.n_shifts());
    let mut mask = Grid::filled(ns, nt, false);
    for si in 0..ns {
        for ti in 0..nt {
            if let Some((bi, bj)) = *map.mapping.get(si, ti) {
                if map.weights.get(bi, bj).norm() >= threshold {
                    mask.set(si, ti, true);
                }
            }
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{TonotopicMap, WaveletParams};

    /// Grid filled from a closed-form coefficient function.
    fn synthetic_grid(
        scales: &[f64],
        nt: usize,
        dt: f64,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> TransformGrid {
        let mut grid = TransformGrid::synthetic(scales.to_vec(), nt, 4, dt);
        for si in 0..scales.len() {
            for ti in 0..nt {
                let tau = grid.shift_offset(ti) as f64 * dt;
                grid.set(si, ti, f(scales[si], tau));
            }
        }
        grid
    }

    fn test_scales() -> Vec<f64> {
        TonotopicMap::default().scale_grid(&WaveletParams::standard(), 200)
    }

    #[test]
    fn constant_grid_has_zero_derivatives() {
        let p = WaveletParams::standard();
        let scales = test_scales();
        let g = synthetic_grid(&scales, 33, 1.0 / 28_160.0, |_, _| Complex64::new(0.7, 0.2));
        let (dr_t, dr_s, valid) = log_derivatives(&g, DERIVATIVE_FLOOR).unwrap();
        assert!(valid.as_slice().iter().all(|&v| v));
        assert!(dr_t.as_slice().iter().all(|&x| x.abs() < 1e-10));
        assert!(dr_s.as_slice().iter().all(|&x| x.abs() < 1e-10));
        // zero modulus derivatives give the degenerate phase derivative
        let (dp_t, _) = phase_derivatives(&dr_t, &dr_s, &valid, &scales, &p).unwrap();
        for si in 0..scales.len() {
            let expect = p.omega0() / scales[si];
            assert!((dp_t.get(si, 5) - expect).abs() < 1e-6 * expect);
        }
    }

    #[test]
    fn structure_equations_recover_the_harmonic_frequency() {
        // exact modulus derivatives of a harmonic at omega_s:
        // D_tau_r = 0, s D_s_r = kappa - kappa s omega_s / omega0
        let p = WaveletParams::standard();
        let scales = test_scales();
        let omega_s = 2.0 * std::f64::consts::PI * 440.0;
        let (ns, nt) = (scales.len(), 9);
        let mut dr_t = Grid::filled(ns, nt, 0.0);
        let mut dr_s = Grid::filled(ns, nt, 0.0);
        let valid = Grid::filled(ns, nt, true);
        for si in 0..ns {
            let s = scales[si];
            let v = (p.kappa() - p.kappa() * s * omega_s / p.omega0()) / s;
            for ti in 0..nt {
                dr_s.set(si, ti, v);
            }
        }
        let (dp_t, dp_s) = phase_derivatives(&dr_t, &dr_s, &valid, &scales, &p).unwrap();
        for si in 0..ns {
            let s = scales[si];
            assert!(
                (dp_t.get(si, 0) - omega_s).abs() < 1e-9 * omega_s,
                "D_tau_phi at s = {s}"
            );
            let expect = (p.alpha() - p.beta() * s * omega_s / p.omega0()) / s;
            assert!((dp_s.get(si, 0) - expect).abs() < 1e-9 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_general_nu_c() {
        let p = WaveletParams::new(1.0, 8.0, -1.0, 6.0, 1.0, 2.0, 5000.0).unwrap();
        let g = Grid::filled(3, 3, 0.0);
        let valid = Grid::filled(3, 3, true);
        assert!(matches!(
            phase_derivatives(&g, &g, &valid, &[1.0, 2.0, 3.0], &p),
            Err(Error::UnsupportedParams(_))
        ));
    }

    #[test]
    fn stationary_pixel_keeps_its_weight() {
        // a pixel whose instantaneous point coincides with itself gets the
        // unmodified coefficient as weight
        let p = WaveletParams::standard();
        let scales = test_scales();
        let dt = 1.0 / 28_160.0;
        let g = synthetic_grid(&scales, 17, dt, |_, _| Complex64::new(0.3, -0.4));
        let (ns, nt) = (g.n_scales(), g.n_shifts());
        let mut field = DerivativeField {
            d_tau_r: Grid::filled(ns, nt, 0.0),
            d_s_r: Grid::filled(ns, nt, 0.0),
            d_tau_phi: Grid::filled(ns, nt, 0.0),
            d_s_phi: Grid::filled(ns, nt, 0.0),
            valid: Grid::filled(ns, nt, false),
        };
        let (si, ti) = (100, 8);
        field.valid.set(si, ti, true);
        field.d_tau_phi.set(si, ti, p.omega0() / scales[si]);
        field.d_s_phi.set(si, ti, 0.0);
        let map = reassign(&g, &field, &p).unwrap();
        assert_eq!(map.mapping.get(si, ti).unwrap(), (si, ti + map.tau_margin));
        let w = *map.weights.get(si, ti + map.tau_margin);
        assert!((w - Complex64::new(0.3, -0.4)).norm() < 1e-12);
        assert_eq!(map.discarded, 0);
        assert_eq!(map.valid_pixels, 1);
    }

    #[test]
    fn out_of_axis_pixels_are_discarded() {
        let p = WaveletParams::standard();
        let scales = test_scales();
        let g = synthetic_grid(&scales, 9, 1.0 / 28_160.0, |_, _| Complex64::new(1.0, 0.0));
        let (ns, nt) = (g.n_scales(), g.n_shifts());
        let mut field = DerivativeField {
            d_tau_r: Grid::filled(ns, nt, 0.0),
            d_s_r: Grid::filled(ns, nt, 0.0),
            d_tau_phi: Grid::filled(ns, nt, 0.0),
            d_s_phi: Grid::filled(ns, nt, 0.0),
            valid: Grid::filled(ns, nt, true),
        };
        // negative phase derivative everywhere: every pixel is discarded
        for si in 0..ns {
            for ti in 0..nt {
                field.d_tau_phi.set(si, ti, -1.0);
            }
        }
        let map = reassign(&g, &field, &p).unwrap();
        assert_eq!(map.discarded, map.valid_pixels);
        assert!(map.weights.as_slice().iter().all(|w| w.norm() == 0.0));
        let mask = importance_mask(&map, 0.0);
        assert!(mask.as_slice().iter().all(|&m| !m));
    }

    #[test]
    fn importance_mask_monotone_in_threshold() {
        let p = WaveletParams::standard();
        let scales = test_scales();
        let g = synthetic_grid(&scales, 17, 1.0 / 28_160.0, |s, tau| {
            Complex64::new((s * 10.0).sin() * (tau * 700.0).cos(), 0.1)
        });
        let field = derivative_field(&g, &p, DERIVATIVE_FLOOR).unwrap();
        let map = reassign(&g, &field, &p).unwrap();
        let loose = importance_mask(&map, 1e-12);
        let tight = importance_mask(&map, 1e-1);
        for (a, b) in loose.as_slice().iter().zip(tight.as_slice()) {
            assert!(*a || !*b, "tight mask contains a pixel absent from the loose one");
        }
    }
}
