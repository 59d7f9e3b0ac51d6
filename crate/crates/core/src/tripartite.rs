//! Semiclassical fixed point and linearized fluctuation dynamics of the
//! optical cavity / microwave cavity / mechanical resonator system.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{thermal_occupation, DerivedCouplings, SystemParams};

pub const MAX_ITERATIONS: usize = 10_000;
pub const DEFAULT_DAMPING: f64 = 0.5;
const UPDATE_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;

/// Where the MC-driven term of the mechanical momentum equation sits in the drift matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Row 2 couples to the microwave X quadrature (column 5).
    #[default]
    Corrected,
    /// Row 2, column 4, as the matrix is usually printed.
    Verbatim,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Corrected => "corrected",
            Convention::Verbatim => "verbatim",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(Convention::Corrected),
            "verbatim" => Ok(Convention::Verbatim),
            other => Err(Error::Domain(format!(
                "unknown convention '{other}' (expected corrected or verbatim)"
            ))),
        }
    }
}

/// Stationary mean fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub a_s: Complex<f64>,
    pub c_s: Complex<f64>,
    pub x_s: f64,
    pub p_s: f64,
    pub iterations: usize,
}

impl SteadyState {
    /// Largest absolute residual of the four stationary equations.
    pub fn residual(&self, d: &DerivedCouplings, p: &SystemParams, delta_c: f64, delta_w: f64) -> f64 {
        let i = Complex::i();
        let g2 = d.g2;
        let dw1 = delta_w - g2 * delta_w * self.x_s;
        let r_a = (i * delta_c + p.kappa_c) * self.a_s - d.drive_ec + i * d.g1 * self.p_s;
        let r_c = (i * delta_w + p.kappa_w - i * dw1 * g2 * self.x_s) * self.c_s - d.drive_ew;
        let r_p = p.omega_m * self.p_s + 2.0 * d.g1 * self.a_s.re;
        let r_x = p.omega_m * self.x_s - delta_w * g2 * self.c_s.norm_sqr() + p.gamma_m * self.p_s;
        r_a.norm().max(r_c.norm()).max(r_p.abs()).max(r_x.abs())
    }
}

fn mech_momentum(d: &DerivedCouplings, p: &SystemParams, a: Complex<f64>) -> f64 {
    -2.0 * d.g1 * a.re / p.omega_m
}

fn mech_position(d: &DerivedCouplings, p: &SystemParams, c: Complex<f64>, p_s: f64, delta_w: f64) -> f64 {
    (delta_w * d.g2 * c.norm_sqr() - p.gamma_m * p_s) / p.omega_m
}

fn rel_change(new: Complex<f64>, old: Complex<f64>) -> f64 {
    let scale = new.norm().max(old.norm());
    if scale == 0.0 {
        0.0
    } else {
        (new - old).norm() / scale
    }
}

pub fn solve_steady_state(
    d: &DerivedCouplings,
    p: &SystemParams,
    delta_c: f64,
    delta_w: f64,
) -> Result<SteadyState> {
    solve_steady_state_damped(d, p, delta_c, delta_w, DEFAULT_DAMPING)
}

/// Damped fixed-point iteration; `damping` is the weight given to each new iterate.
pub fn solve_steady_state_damped(
    d: &DerivedCouplings,
    p: &SystemParams,
    delta_c: f64,
    delta_w: f64,
    damping: f64,
) -> Result<SteadyState> {
    if !(p.kappa_c > 0.0 && p.kappa_w > 0.0) {
        return Err(Error::Domain("cavity damping rates must be positive".into()));
    }
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::Domain(format!("damping must lie in (0, 1], got {damping}")));
    }
    let i = Complex::i();
    let den_c = i * delta_c + p.kappa_c;
    let ec = Complex::from(d.drive_ec);
    let ew = d.drive_ew;

    let mut a = ec / den_c;
    let mut c = ew / (i * delta_w + p.kappa_w);
    let mut change = f64::INFINITY;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let p_new = mech_momentum(d, p, a);
        let a_new = (ec - i * d.g1 * p_new) / den_c;
        let x_new = mech_position(d, p, c, p_new, delta_w);
        let dw1 = delta_w - d.g2 * delta_w * x_new;
        let c_new = ew / (i * delta_w + p.kappa_w - i * dw1 * d.g2 * x_new);

        change = rel_change(a_new, a).max(rel_change(c_new, c));
        if !change.is_finite() {
            break;
        }
        a = a + (a_new - a) * damping;
        c = c + (c_new - c) * damping;
        if change < UPDATE_TOL {
            break;
        }
    }

    let p_s = mech_momentum(d, p, a);
    let x_s = mech_position(d, p, c, p_s, delta_w);
    let ss = SteadyState {
        a_s: a,
        c_s: c,
        x_s,
        p_s,
        iterations,
    };
    let scale = d.drive_ec.abs().max(ew.norm());
    let res = ss.residual(d, p, delta_c, delta_w);
    let ok = if scale == 0.0 { res == 0.0 } else { res < RESIDUAL_TOL * scale };
    if change < UPDATE_TOL && ok {
        Ok(ss)
    } else {
        Err(Error::Divergence {
            iterations,
            residual: change,
        })
    }
}

/// Linearized drift matrix in the ordering (q_x, p_x, X_c, Y_c, X_w, Y_w).
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    pub entries: DMatrix<f64>,
    pub convention: Convention,
}

/// Diagonal noise matrix matching [`DriftMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix {
    pub entries: DMatrix<f64>,
}

pub fn build_drift_matrix(
    d: &DerivedCouplings,
    p: &SystemParams,
    ss: &SteadyState,
    delta_c: f64,
    delta_w: f64,
    convention: Convention,
) -> DriftMatrix {
    let g2 = d.g2;
    let (cs_re, cs_im) = (ss.c_s.re, ss.c_s.im);
    // q_s is the real position x_s, so Im{q_s} = 0 and kappa_w1 = kappa_w
    let q_s = Complex::new(ss.x_s, 0.0);
    let kappa_w1 = p.kappa_w + g2 * delta_w * q_s.im;
    let delta_w1 = delta_w - g2 * delta_w * q_s.re;

    let g_m = SQRT_2 * g2 * delta_w * cs_re;
    let g11 = -SQRT_2 * g2 * delta_w * cs_im;
    let g22 = SQRT_2 * g2 * delta_w * cs_re;
    let g1 = SQRT_2 * d.g1;

    let mut m = DMatrix::zeros(6, 6);
    m[(0, 1)] = p.omega_m;
    m[(0, 2)] = g1;

    m[(1, 0)] = -p.omega_m;
    m[(1, 1)] = -p.gamma_m;
    match convention {
        Convention::Corrected => m[(1, 4)] = g_m,
        Convention::Verbatim => m[(1, 3)] = g_m,
    }

    m[(2, 2)] = -p.kappa_c;
    m[(2, 3)] = delta_c;

    m[(3, 1)] = -g1;
    m[(3, 2)] = -delta_c;
    m[(3, 3)] = -p.kappa_c;

    m[(4, 0)] = g11;
    m[(4, 4)] = -kappa_w1;
    m[(4, 5)] = delta_w1;

    m[(5, 0)] = g22;
    m[(5, 4)] = -delta_w1;
    m[(5, 5)] = -kappa_w1;

    DriftMatrix {
        entries: m,
        convention,
    }
}

pub fn build_diffusion_matrix(p: &SystemParams, d: &DerivedCouplings) -> Result<DiffusionMatrix> {
    let t = p.temperature;
    let n_m = thermal_occupation(p.omega_m, t)?;
    let n_c = thermal_occupation(d.omega_c, t)?;
    let n_w = thermal_occupation(d.omega_w, t)?;
    let diag = [
        0.0,
        p.gamma_m * (2.0 * n_m + 1.0),
        p.kappa_c * (2.0 * n_c + 1.0),
        p.kappa_c * (2.0 * n_c + 1.0),
        p.kappa_w * (2.0 * n_w + 1.0),
        p.kappa_w * (2.0 * n_w + 1.0),
    ];
    Ok(DiffusionMatrix {
        entries: DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&diag)),
    })
}
