//! Delimited-text export of transform grids, reassigned maps and
//! connectivity maps, plus grid re-import.
//!
//! Rows are scale-major: the axis columns (`ln_s`, `tau`) come first, then
//! the payload. Floats are written with shortest round-trip precision, so
//! an export/import cycle reproduces the grid bit-exactly.

use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::reassign::ReassignedMap;
use crate::transform::{Grid, TransformGrid};

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

/// Writes a transform grid as `ln_s tau re im` rows.
pub fn export_grid(path: impl AsRef<Path>, grid: &TransformGrid) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "# window_origin = {}", grid.window_origin).unwrap();
    writeln!(out, "# dt = {}", grid.dt).unwrap();
    writeln!(out, "ln_s\ttau\tre\tim").unwrap();
    for si in 0..grid.n_scales() {
        let ln_s = grid.scales()[si].ln();
        for ti in 0..grid.n_shifts() {
            let c = grid.get(si, ti);
            writeln!(out, "{ln_s}\t{}\t{}\t{}", grid.shift_time(ti), c.re, c.im).unwrap();
        }
    }
    write_text(path.as_ref(), &out)?;
    Ok(out)
}

/// Reads a grid previously written by [`export_grid`].
pub fn import_grid(path: impl AsRef<Path>) -> Result<TransformGrid> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut window_origin = 0i64;
    let mut dt = 0.0f64;
    let mut rows: Vec<(f64, f64, Complex64)> = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                match k.trim() {
                    "window_origin" => {
                        window_origin = v.trim().parse().map_err(|_| {
                            Error::Input(format!("bad window_origin `{}`", v.trim()))
                        })?
                    }
                    "dt" => {
                        dt = v
                            .trim()
                            .parse()
                            .map_err(|_| Error::Input(format!("bad dt `{}`", v.trim())))?
                    }
                    _ => {}
                }
            }
            continue;
        }
        if line.starts_with("ln_s") || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::Input(format!("expected 4 columns, got {}", cols.len())));
        }
        let parse = |v: &str| -> Result<f64> {
            v.parse().map_err(|_| Error::Input(format!("bad number `{v}`")))
        };
        rows.push((
            parse(cols[0])?,
            parse(cols[1])?,
            Complex64::new(parse(cols[2])?, parse(cols[3])?),
        ));
    }
    if rows.is_empty() || dt <= 0.0 {
        return Err(Error::Input("grid file has no data rows or missing dt".into()));
    }
    // scale-major ordering: shifts repeat fastest
    let n_shifts = rows.iter().take_while(|r| r.0 == rows[0].0).count();
    if n_shifts == 0 || rows.len() % n_shifts != 0 {
        return Err(Error::Input("grid rows do not form a rectangle".into()));
    }
    let n_scales = rows.len() / n_shifts;
    let scales: Vec<f64> = (0..n_scales).map(|si| rows[si * n_shifts].0.exp()).collect();
    let dtau_samples = if n_shifts > 1 {
        ((rows[1].1 - rows[0].1) / dt).round() as usize
    } else {
        1
    };
    let mut grid = TransformGrid::synthetic(scales, n_shifts, dtau_samples, dt);
    grid.window_origin = window_origin;
    for si in 0..n_scales {
        for ti in 0..n_shifts {
            grid.set(si, ti, rows[si * n_shifts + ti].2);
        }
    }
    Ok(grid)
}

/// Writes a reassigned map as `ln_s tau weight_abs` rows plus a discard
/// summary in header comments.
pub fn export_map(path: impl AsRef<Path>, map: &ReassignedMap) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "# window_origin = {}", map.window_origin).unwrap();
    writeln!(out, "# valid_pixels = {}", map.valid_pixels).unwrap();
    writeln!(out, "# discarded = {}", map.discarded).unwrap();
    writeln!(out, "ln_s\ttau\tweight_abs").unwrap();
    for si in 0..map.scales().len() {
        let ln_s = map.scales()[si].ln();
        for ti in 0..map.weights.n_shifts() {
            let tau = (map.window_origin + map.shift_offset(ti)) as f64 * map.dt;
            writeln!(out, "{ln_s}\t{tau}\t{}", map.weights.get(si, ti).norm()).unwrap();
        }
    }
    write_text(path.as_ref(), &out)?;
    Ok(out)
}

/// Writes an integer grid (e.g. a connectivity map) as `scale_index
/// shift_index count` rows.
pub fn export_counts(path: impl AsRef<Path>, counts: &Grid<u8>) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "scale_index\tshift_index\tcount").unwrap();
    for si in 0..counts.n_scales() {
        for ti in 0..counts.n_shifts() {
            writeln!(out, "{si}\t{ti}\t{}", counts.get(si, ti)).unwrap();
        }
    }
    write_text(path.as_ref(), &out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_grid_rows_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.tsv");
        let mut grid = TransformGrid::synthetic(vec![0.5, 2.0], 2, 4, 1.0 / 28_160.0);
        grid.window_origin = 96;
        grid.set(0, 0, Complex64::new(0.1, -0.2));
        grid.set(0, 1, Complex64::new(1.0 / 3.0, 2.0f64.sqrt()));
        grid.set(1, 0, Complex64::new(-7.25, 0.0));
        grid.set(1, 1, Complex64::new(1e-15, 3e8));
        let text = export_grid(&path, &grid).unwrap();
        let data_rows = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("ln_s"));
        assert_eq!(data_rows.count(), 4);

        let back = import_grid(&path).unwrap();
        assert_eq!(back.window_origin, 96);
        assert_eq!(back.n_scales(), 2);
        assert_eq!(back.n_shifts(), 2);
        for si in 0..2 {
            // the scale axis passes through ln/exp, everything else is exact
            let rel = (back.scales()[si] / grid.scales()[si] - 1.0).abs();
            assert!(rel < 1e-15, "scale {si} round-trip error {rel:e}");
            for ti in 0..2 {
                assert_eq!(back.get(si, ti), grid.get(si, ti));
                assert_eq!(back.shift_offset(ti), grid.shift_offset(ti));
            }
        }
    }

    #[test]
    fn counts_export_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("counts.tsv");
        let counts = Grid::filled(3, 2, 5u8);
        let text = export_counts(&path, &counts).unwrap();
        assert_eq!(text.lines().count(), 1 + 6);
        assert!(text.lines().nth(1).unwrap().ends_with("\t5"));
    }
}
