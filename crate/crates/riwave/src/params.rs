//! Frequency-domain definition of the Reimann wavelet family.
//!
//! The family is defined in the frequency domain by an exponential envelope
//! and a log-linear phase, together with a tonotopic (frequency-position)
//! map that fixes the scale grid. All derived constants (phase maximum
//! location, tangent point, normalization, admissibility constant) are
//! computed once at construction; a parameter vector is immutable
//! afterwards and safe to share across threads.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Reference frequency (Hz) with respect to which the scaling factor is
/// defined; the note A5.
pub const DEFAULT_F0_HZ: f64 = 880.0;

/// Which branch of the wavelet phase to use near the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseVariant {
    /// The closed-form phase; undefined at the origin (0 by convention).
    Raw,
    /// Tangent line through the origin below the tangency point, the
    /// closed form above it. Continuous everywhere, C1 at the join.
    KinkFree,
}

/// Real-valued wavelet (full-line spectrum) or holomorphic wavelet
/// (positive frequencies only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveletKind {
    RealWavelet,
    Holomorphic,
}

/// Parameter vector of the Reimann wavelet family plus cached derived
/// constants.
#[derive(Debug, Clone)]
pub struct WaveletParams {
    alpha: f64,
    beta: f64,
    phi_m: f64,
    kappa: f64,
    nu: f64,
    c_exp: f64,
    omega0: f64,
    // derived, cached at construction
    y_m: f64,
    y_t: f64,
    epsilon: f64,
    tangent_slope: f64,
    k_real: f64,
    k_holo: f64,
    admissibility: f64,
}

impl WaveletParams {
    /// Builds and validates a parameter vector.
    ///
    /// `alpha`, `beta`, `kappa`, `nu`, `c_exp` must be positive and the
    /// admissibility condition `kappa * nu > 1/2` must hold. `phi_m` is the
    /// phase maximum in radians (typically negative), `omega0` the reference
    /// angular frequency in rad/s.
    pub fn new(
        alpha: f64,
        beta: f64,
        phi_m: f64,
        kappa: f64,
        nu: f64,
        c_exp: f64,
        omega0: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("alpha", alpha),
            ("beta", beta),
            ("kappa", kappa),
            ("nu", nu),
            ("c", c_exp),
            ("omega0", omega0),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::ParamDomain(format!("{name} must be positive, got {v}")));
            }
        }
        if !phi_m.is_finite() {
            return Err(Error::ParamDomain(format!("phi_m must be finite, got {phi_m}")));
        }
        if kappa * nu <= 0.5 {
            return Err(Error::Admissibility(format!(
                "kappa * nu = {} must exceed 1/2",
                kappa * nu
            )));
        }

        let y_m = alpha / beta;
        let y_t = y_m * (-phi_m / alpha).exp();
        let epsilon = phi_m - alpha * (y_m.ln() - 1.0);
        let tangent_slope = beta * ((phi_m / alpha).exp() - 1.0);

        let kn = kappa * nu;
        // ln k = (kn/c) ln(2k/c) + (ln(c*pi) - lnGamma(2kn/c)) / 2
        let lg = ln_gamma(2.0 * kn / c_exp);
        let ln_k_real =
            (kn / c_exp) * (2.0 * kappa / c_exp).ln() + 0.5 * ((c_exp * PI).ln() - lg);
        let k_real = ln_k_real.exp();
        let k_holo = std::f64::consts::SQRT_2 * k_real;
        if !k_real.is_finite() || k_real == 0.0 {
            return Err(Error::Range(format!(
                "normalization overflowed for kappa*nu/c = {}",
                kn / c_exp
            )));
        }

        let ln_adm = (2.0 * PI / omega0).ln()
            + (2.0 * kappa / c_exp).ln() / c_exp
            + ln_gamma((2.0 * kn - 1.0) / c_exp)
            - lg;
        let admissibility = ln_adm.exp();
        if !admissibility.is_finite() || admissibility <= 0.0 {
            return Err(Error::Admissibility(format!(
                "admissibility constant is not finite and positive ({admissibility})"
            )));
        }

        Ok(Self {
            alpha,
            beta,
            phi_m,
            kappa,
            nu,
            c_exp,
            omega0,
            y_m,
            y_t,
            epsilon,
            tangent_slope,
            k_real,
            k_holo,
            admissibility,
        })
    }

    /// The calibrated standard parameter vector (nu = c = 1).
    pub fn standard() -> Self {
        Self::new(1.041 * PI, 8.851 * PI, -1.831 * PI, 6.209, 1.0, 1.0, 2.0 * PI * DEFAULT_F0_HZ)
            .expect("standard parameters are valid")
    }

    /// The starting point used by the calibrator.
    pub fn initial_guess() -> Self {
        Self::new(PI, 8.5 * PI, -2.0 * PI, 8.0, 1.0, 1.0, 2.0 * PI * DEFAULT_F0_HZ)
            .expect("initial guess parameters are valid")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn phi_m(&self) -> f64 {
        self.phi_m
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn c_exp(&self) -> f64 {
        self.c_exp
    }
    pub fn omega0(&self) -> f64 {
        self.omega0
    }
    /// Location of the phase maximum, `alpha / beta`.
    pub fn y_m(&self) -> f64 {
        self.y_m
    }
    /// Tangency point of the origin line with the phase curve.
    pub fn y_t(&self) -> f64 {
        self.y_t
    }
    /// Constant phase offset eliminated by the maximum parametrization.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    /// Slope of the origin tangent, `beta (e^{phi_m/alpha} - 1)`.
    pub fn tangent_slope(&self) -> f64 {
        self.tangent_slope
    }

    /// Returns a copy with one coordinate replaced; used by the calibrator.
    pub fn with_value(&self, coord: Coordinate, value: f64) -> Result<Self> {
        let (mut a, mut b, mut pm, mut k) = (self.alpha, self.beta, self.phi_m, self.kappa);
        match coord {
            Coordinate::Alpha => a = value,
            Coordinate::Beta => b = value,
            Coordinate::PhiM => pm = value,
            Coordinate::Kappa => k = value,
        }
        Self::new(a, b, pm, k, self.nu, self.c_exp, self.omega0)
    }

    pub fn value(&self, coord: Coordinate) -> f64 {
        match coord {
            Coordinate::Alpha => self.alpha,
            Coordinate::Beta => self.beta,
            Coordinate::PhiM => self.phi_m,
            Coordinate::Kappa => self.kappa,
        }
    }

    /// Wavelet phase as a function of `y = s omega / omega0`.
    ///
    /// Antisymmetric in `y`. The raw variant returns 0 at the origin by
    /// convention (the synthesis integrand vanishes there for
    /// `kappa nu > 1/2`); the kink-free variant follows the origin tangent
    /// up to the tangency point and the closed form above it.
    pub fn phase(&self, y: f64, variant: PhaseVariant) -> f64 {
        let a = y.abs();
        let sgn = if y < 0.0 { -1.0 } else { 1.0 };
        match variant {
            PhaseVariant::Raw => {
                if a == 0.0 {
                    0.0
                } else {
                    sgn * self.phase_pos(a)
                }
            }
            PhaseVariant::KinkFree => {
                if a <= self.y_t {
                    self.tangent_slope * y
                } else {
                    sgn * self.phase_pos(a)
                }
            }
        }
    }

    fn phase_pos(&self, y: f64) -> f64 {
        let r = y / self.y_m;
        self.phi_m + self.alpha * (r.ln() + 1.0 - r)
    }

    /// Derivative of the phase with respect to `y`, for positive `y`.
    pub(crate) fn phase_derivative_pos(&self, y: f64, variant: PhaseVariant) -> f64 {
        match variant {
            PhaseVariant::KinkFree if y <= self.y_t => self.tangent_slope,
            _ => self.alpha / y - self.beta,
        }
    }

    /// Frequency-domain wavelet `h(s omega)` at scale `s`, with the
    /// real-wavelet normalization.
    pub fn spectrum(&self, s: f64, omega: f64, variant: PhaseVariant) -> Result<Complex64> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("scale must be positive, got {s}")));
        }
        let y = s * omega / self.omega0;
        let so = (s * omega).abs();
        if so == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let kn = self.kappa * self.nu;
        let ln_mod = self.k_real.ln() - kn * self.omega0.ln()
            - (self.kappa / self.c_exp) * y.abs().powf(self.c_exp)
            + (kn - 0.5) * so.ln();
        let phi = self.phase(y, variant);
        Ok(Complex64::from_polar(ln_mod.exp(), phi))
    }

    /// Absolute normalization for the requested wavelet kind; the
    /// holomorphic value exceeds the real one by sqrt(2).
    pub fn normalization(&self, kind: WaveletKind) -> f64 {
        match kind {
            WaveletKind::RealWavelet => self.k_real,
            WaveletKind::Holomorphic => self.k_holo,
        }
    }

    /// Admissibility constant (seconds); finite and positive for
    /// `kappa nu > 1/2` and `c > 0`.
    pub fn admissibility(&self) -> f64 {
        self.admissibility
    }

    /// Mode of the spectral envelope in `y`.
    pub fn envelope_mode(&self) -> f64 {
        (self.nu - 1.0 / (2.0 * self.kappa)).powf(1.0 / self.c_exp)
    }

    /// True when the structure-equation restriction `nu = c = 1` holds.
    pub fn is_unit_nu_c(&self) -> bool {
        (self.nu - 1.0).abs() < 1e-12 && (self.c_exp - 1.0).abs() < 1e-12
    }
}

/// The four coordinates varied by the calibrator, in their search order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    Beta,
    PhiM,
    Alpha,
    Kappa,
}

impl Coordinate {
    pub const SEARCH_ORDER: [Coordinate; 4] =
        [Coordinate::Beta, Coordinate::PhiM, Coordinate::Alpha, Coordinate::Kappa];

    pub fn name(&self) -> &'static str {
        match self {
            Coordinate::Beta => "beta",
            Coordinate::PhiM => "phi_m",
            Coordinate::Alpha => "alpha",
            Coordinate::Kappa => "kappa",
        }
    }
}

/// Exponential frequency-position map of the cochlea.
#[derive(Debug, Clone, Copy)]
pub struct TonotopicMap {
    omega_max: f64,
    omega_min: f64,
    gamma: f64,
}

impl Default for TonotopicMap {
    fn default() -> Self {
        Self::new(2.0 * PI * 20_000.0, 2.0 * PI * 60.0).unwrap()
    }
}

impl TonotopicMap {
    pub fn new(omega_max: f64, omega_min: f64) -> Result<Self> {
        if !(omega_min > 0.0 && omega_max > omega_min) {
            return Err(Error::Domain(format!(
                "need 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]"
            )));
        }
        Ok(Self { omega_max, omega_min, gamma: (omega_max / omega_min).ln() })
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }
    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }
    /// Log-range of the map, about 5.81 at the defaults.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Angular frequency processed at membrane position fraction `x`.
    pub fn frequency(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("position fraction {x} outside [0, 1]")));
        }
        Ok(self.omega_max * (-self.gamma * x).exp())
    }

    /// Log-uniform scale grid with `segments` equal position segments;
    /// `segments + 1` strictly increasing scales.
    pub fn scale_grid(&self, p: &WaveletParams, segments: usize) -> Vec<f64> {
        assert!(segments >= 1, "need at least one segment");
        (0..=segments)
            .map(|j| p.omega0() / (self.omega_max * (-self.gamma * j as f64 / segments as f64).exp()))
            .collect()
    }
}
