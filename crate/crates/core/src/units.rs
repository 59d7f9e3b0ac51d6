//! Physical constants, device parameters and the couplings derived from them.

use std::f64::consts::PI;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// CODATA 2018 exact / recommended values, SI units.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s)
    pub hbar: f64,
    /// Boltzmann constant (J/K)
    pub k_b: f64,
    /// Speed of light in vacuum (m/s)
    pub c0: f64,
    /// Vacuum permittivity (F/m)
    pub eps0: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    k_b: 1.380_649e-23,
    c0: 299_792_458.0,
    eps0: 8.854_187_812_8e-12,
};

/// Device and drive parameters of the tripartite source.
///
/// `Default` gives the nominal device: mid-range couplings, 18 ng resonator,
/// cavity linewidths of 0.02 ω_m, 200 mK.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    /// OC–MR coupling coefficient (dimensionless)
    pub alpha_c: f64,
    /// Optical wavelength (m)
    pub lambda_c: f64,
    /// MR damping rate (1/s)
    pub gamma_m: f64,
    /// MR mass (kg)
    pub mass_m: f64,
    /// Microwave circuit inductance (H)
    pub inductance_l: f64,
    /// OC damping (rad/s)
    pub kappa_c: f64,
    /// MC damping (rad/s)
    pub kappa_w: f64,
    /// MR angular frequency (rad/s)
    pub omega_m: f64,
    /// C(x₀) (F)
    pub cap_x0: f64,
    /// C_d (F)
    pub cap_d: f64,
    /// C′(x₀) (F/m)
    pub cap_slope: f64,
    /// Optical drive power (W)
    pub power_pc: f64,
    /// Microwave drive voltage magnitude (V)
    pub drive_vd: f64,
    /// Microwave drive voltage phase (rad)
    pub drive_phase: f64,
    /// Operating temperature (K)
    pub temperature: f64,
    /// Detuning scale for the sweep axis (rad/s); ω_m when unset.
    pub detuning_normalizer: Option<f64>,
}

pub const NOMINAL_OMEGA_M: f64 = 2.0 * PI * 1.0e6;

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            alpha_c: 0.26,
            lambda_c: 808e-9,
            gamma_m: 120.0,
            mass_m: 18e-12,
            inductance_l: 15e-12,
            kappa_c: 0.02 * NOMINAL_OMEGA_M,
            kappa_w: 0.02 * NOMINAL_OMEGA_M,
            omega_m: NOMINAL_OMEGA_M,
            cap_x0: 590e-12,
            cap_d: 20e-12,
            cap_slope: 590e-12 / 1e-6,
            power_pc: 30e-3,
            drive_vd: 1e-5,
            drive_phase: 0.0,
            temperature: 0.2,
            detuning_normalizer: None,
        }
    }
}

impl SystemParams {
    pub fn drive_voltage(&self) -> Complex<f64> {
        Complex::from_polar(self.drive_vd, self.drive_phase)
    }

    pub fn detuning_scale(&self) -> f64 {
        self.detuning_normalizer.unwrap_or(self.omega_m)
    }
}

/// Frequencies and coupling rates that follow from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCouplings {
    /// Optical angular frequency (rad/s)
    pub omega_c: f64,
    /// Microwave LC resonance (rad/s)
    pub omega_w: f64,
    /// C_t = C_d + C(x₀) (F)
    pub cap_t: f64,
    /// C_p = C′/(C(x₀) + C_d)²
    pub cap_p: f64,
    /// OC–MR coupling rate G₁ (rad/s)
    pub g1: f64,
    /// MC–MR coupling coefficient G₂
    pub g2: f64,
    /// OC drive rate E_c (1/s)
    pub drive_ec: f64,
    /// MC drive rate E_ω (1/s), carries the drive-voltage phase
    pub drive_ew: Complex<f64>,
}

/// Mean thermal occupation `1/(exp(ħω/k_B T) − 1)`.
///
/// Exactly zero at `T = 0`. Outside `ħω/k_B T ∈ [1e-12, 700]` the
/// asymptotic forms are used so neither tail overflows.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("angular frequency must be positive, got {omega}")));
    }
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!("temperature must be non-negative, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = CONSTANTS.hbar * omega / (CONSTANTS.k_b * temperature);
    let n = if x > 700.0 {
        (-x).exp()
    } else if x < 1e-12 {
        1.0 / x - 0.5 + x / 12.0
    } else {
        1.0 / x.exp_m1()
    };
    Ok(n)
}

pub fn derive_couplings(p: &SystemParams) -> DerivedCouplings {
    let k = CONSTANTS;
    let omega_c = 2.0 * PI * k.c0 / p.lambda_c;
    let cap_t = p.cap_d + p.cap_x0;
    let omega_w = 1.0 / (p.inductance_l * cap_t).sqrt();
    let cap_p = p.cap_slope / (p.cap_x0 + p.cap_d).powi(2);
    // The laser reference frequency is taken to be the cavity frequency.
    let omega_l = omega_c;

    let g1 = (p.alpha_c * p.alpha_c * p.omega_m / (2.0 * k.eps0 * p.mass_m * omega_c)).sqrt();
    let g2 = cap_p * cap_t * (k.hbar / (p.mass_m * p.omega_m)).sqrt();
    let drive_ec = (2.0 * p.power_pc * p.kappa_c / (k.hbar * omega_l)).sqrt();
    let drive_ew = p.drive_voltage() * p.cap_d * (omega_w / (2.0 * k.hbar * cap_t)).sqrt();

    DerivedCouplings {
        omega_c,
        omega_w,
        cap_t,
        cap_p,
        g1,
        g2,
        drive_ec,
        drive_ew,
    }
}

pub const ALPHA_C_RANGE: (f64, f64) = (0.025, 0.26);
pub const MASS_RANGE: (f64, f64) = (18e-12, 22e-12);
/// Cavity linewidth range in units of ω_m.
pub const KAPPA_RANGE: (f64, f64) = (0.01, 0.03);

fn in_range(v: f64, (lo, hi): (f64, f64)) -> bool {
    let slack = 1e-12 * hi.abs();
    v >= lo - slack && v <= hi + slack
}

/// Checks parameter invariants, returning every violation found.
///
/// `strict` additionally enforces the tabulated device ranges for
/// `alpha_c`, `mass_m`, `kappa_c` and `kappa_w`.
pub fn validate_params(p: &SystemParams, strict: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    let positive = [
        ("alpha_c", p.alpha_c),
        ("lambda_c", p.lambda_c),
        ("gamma_m", p.gamma_m),
        ("mass_m", p.mass_m),
        ("inductance_l", p.inductance_l),
        ("kappa_c", p.kappa_c),
        ("kappa_w", p.kappa_w),
        ("omega_m", p.omega_m),
        ("cap_x0", p.cap_x0),
        ("cap_d", p.cap_d),
        ("cap_slope", p.cap_slope),
        ("temperature", p.temperature),
    ];
    for (name, v) in positive {
        if !(v > 0.0) || !v.is_finite() {
            out.push(Violation::new(name, format!("must be positive and finite, got {v}")));
        }
    }
    for (name, v) in [("power_pc", p.power_pc), ("drive_vd", p.drive_vd)] {
        if !(v >= 0.0) || !v.is_finite() {
            out.push(Violation::new(name, format!("must be non-negative and finite, got {v}")));
        }
    }
    if !p.drive_phase.is_finite() {
        out.push(Violation::new("drive_phase", "must be finite"));
    }
    if let Some(s) = p.detuning_normalizer {
        if !(s > 0.0) || !s.is_finite() {
            out.push(Violation::new("detuning_normalizer", format!("must be positive, got {s}")));
        }
    }

    if strict {
        if !in_range(p.alpha_c, ALPHA_C_RANGE) {
            out.push(Violation::new(
                "alpha_c",
                format!("{} outside [{}, {}]", p.alpha_c, ALPHA_C_RANGE.0, ALPHA_C_RANGE.1),
            ));
        }
        if !in_range(p.mass_m, MASS_RANGE) {
            out.push(Violation::new(
                "mass_m",
                format!("{:e} kg outside [{:e}, {:e}]", p.mass_m, MASS_RANGE.0, MASS_RANGE.1),
            ));
        }
        let lim = (KAPPA_RANGE.0 * p.omega_m, KAPPA_RANGE.1 * p.omega_m);
        for (name, v) in [("kappa_c", p.kappa_c), ("kappa_w", p.kappa_w)] {
            if !in_range(v, lim) {
                out.push(Violation::new(
                    name,
                    format!("{v:e} rad/s outside [0.01, 0.03]·omega_m = [{:e}, {:e}]", lim.0, lim.1),
                ));
            }
        }
    }
    out
}
