//! Flat key-value text configuration for wavelet parameters and window
//! settings.
//!
//! The format is one `key = value` pair per line; `#` starts a comment.
//! Wavelet parameters use the pi-scaled keys `alpha_over_pi`,
//! `beta_over_pi`, `phi_m_over_pi`, plus `kappa`, `nu`, `c` and `f0_hz`.
//! Window settings use `n_m`, `overlap`, `scale_segments`, `dtau_samples`,
//! `tau_r_samples` and `rate_hz`. Missing keys fall back to defaults.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::params::WaveletParams;
use crate::signal::STANDARD_RATE;
use crate::transform::WindowSettings;

/// Parsed key-value configuration.
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::ConfigParse(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::ConfigParse(format!("key `{key}`: `{v}` is not a number"))),
        }
    }

    fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                Error::ConfigParse(format!("key `{key}`: `{v}` is not a non-negative integer"))
            }),
        }
    }

    /// Wavelet parameters from the pi-scaled keys; missing keys default to
    /// the standard vector.
    pub fn wavelet_params(&self) -> Result<WaveletParams> {
        let d = WaveletParams::standard();
        WaveletParams::new(
            self.get_f64("alpha_over_pi", d.alpha() / PI)? * PI,
            self.get_f64("beta_over_pi", d.beta() / PI)? * PI,
            self.get_f64("phi_m_over_pi", d.phi_m() / PI)? * PI,
            self.get_f64("kappa", d.kappa())?,
            self.get_f64("nu", d.nu())?,
            self.get_f64("c", d.c_exp())?,
            2.0 * PI * self.get_f64("f0_hz", d.omega0() / (2.0 * PI))?,
        )
    }

    /// Window settings; missing keys default to the standard pipeline at
    /// `rate_hz` (default 28160).
    pub fn window_settings(&self) -> Result<WindowSettings> {
        let rate = self.get_f64("rate_hz", STANDARD_RATE)?;
        if !(rate > 0.0) {
            return Err(Error::ConfigParse(format!("rate_hz must be positive, got {rate}")));
        }
        let d = WindowSettings::standard(1.0 / rate);
        let n_m = self.get_usize("n_m", d.n_m)?;
        let ws = WindowSettings {
            n_m,
            overlap: self.get_f64("overlap", d.overlap)?,
            scale_segments: self.get_usize("scale_segments", d.scale_segments)?,
            dtau_samples: self.get_usize("dtau_samples", d.dtau_samples)?,
            tau_r_samples: self.get_usize("tau_r_samples", 8 * n_m)?,
            dt: 1.0 / rate,
        };
        ws.validate()?;
        Ok(ws)
    }

    /// Stores the pi-scaled wavelet keys.
    pub fn set_wavelet_params(&mut self, p: &WaveletParams) {
        self.set("alpha_over_pi", p.alpha() / PI);
        self.set("beta_over_pi", p.beta() / PI);
        self.set("phi_m_over_pi", p.phi_m() / PI);
        self.set("kappa", p.kappa());
        self.set("nu", p.nu());
        self.set("c", p.c_exp());
        self.set("f0_hz", p.omega0() / (2.0 * PI));
    }

    /// Stores the window-settings keys.
    pub fn set_window_settings(&mut self, ws: &WindowSettings) {
        self.set("n_m", ws.n_m);
        self.set("overlap", ws.overlap);
        self.set("scale_segments", ws.scale_segments);
        self.set("dtau_samples", ws.dtau_samples);
        self.set("tau_r_samples", ws.tau_r_samples);
        self.set("rate_hz", 1.0 / ws.dt);
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            writeln!(out, "{k} = {v}").expect("string write is infallible");
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text())
            .map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_table_style_parameters() {
        let cfg = Config::parse(
            "# calibrated vector\n\
             alpha_over_pi = 1.041\n\
             beta_over_pi = 8.851\n\
             phi_m_over_pi = -1.831  # phase maximum\n\
             kappa = 6.209\n",
        )
        .unwrap();
        let p = cfg.wavelet_params().unwrap();
        let d = WaveletParams::standard();
        assert!((p.alpha() - d.alpha()).abs() < 1e-12);
        assert!((p.beta() - d.beta()).abs() < 1e-12);
        assert!((p.phi_m() - d.phi_m()).abs() < 1e-12);
        assert_eq!(p.kappa(), 6.209);
        assert_eq!(p.nu(), 1.0);
    }

    #[test]
    fn defaults_and_round_trip() {
        let empty = Config::parse("").unwrap();
        let ws = empty.window_settings().unwrap();
        assert_eq!(ws.n_m, 128);
        assert_eq!(ws.tau_r_samples, 1024);

        let mut cfg = Config::default();
        cfg.set_wavelet_params(&WaveletParams::standard());
        cfg.set_window_settings(&ws);
        let back = Config::parse(&cfg.to_text()).unwrap();
        let p = back.wavelet_params().unwrap();
        assert_eq!(p.kappa(), WaveletParams::standard().kappa());
        assert_eq!(back.window_settings().unwrap().n_m, 128);
    }

    #[test]
    fn rejects_malformed_lines_and_values() {
        assert!(matches!(Config::parse("just words"), Err(Error::ConfigParse(_))));
        let cfg = Config::parse("kappa = sideways").unwrap();
        assert!(matches!(cfg.wavelet_params(), Err(Error::ConfigParse(_))));
        let cfg = Config::parse("overlap = 0.9").unwrap();
        assert!(cfg.window_settings().is_err()); // stride not an integer
    }
}
