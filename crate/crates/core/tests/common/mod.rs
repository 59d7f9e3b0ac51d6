#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use qradar::channels::{ChannelKind, ChannelSpec};
use qradar::linalg::spectral_abscissa;
use qradar::CovarianceState;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Random matrix shifted so its spectral abscissa lies in [-1, -0.1].
pub fn random_hurwitz(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let m = gaussian_matrix(rng, n, n);
    let shift = spectral_abscissa(&m).unwrap() + rng.random_range(0.1..1.0);
    m - DMatrix::identity(n, n) * shift
}

pub fn random_psd(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, n, n);
    &g * g.transpose()
}

pub fn two_mode_squeezed(r: f64) -> DMatrix<f64> {
    let (ch, sh) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
    DMatrix::from_row_slice(
        4,
        4,
        &[ch, 0.0, sh, 0.0, 0.0, ch, 0.0, -sh, sh, 0.0, ch, 0.0, 0.0, -sh, 0.0, ch],
    )
}

fn rot2(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

/// Block-diagonal symplectic S_A ⊕ S_B built from rotations and squeezers.
pub fn local_symplectic(rng: &mut impl Rng, max_squeeze: f64) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(4, 4);
    for mode in 0..2 {
        let r = rng.random_range(-max_squeeze..max_squeeze);
        let (a, b) = (rot2(rng.random_range(0.0..std::f64::consts::TAU)), rot2(rng.random_range(0.0..std::f64::consts::TAU)));
        let sq = [[(-r).exp(), 0.0], [0.0, r.exp()]];
        for i in 0..2 {
            for j in 0..2 {
                let mut v = 0.0;
                for k in 0..2 {
                    v += a[i][k] * sq[k][k] * b[k][j];
                }
                s[(2 * mode + i, 2 * mode + j)] = v;
            }
        }
    }
    s
}

/// Two-mode squeezer of strength r.
pub fn two_mode_squeezer(r: f64) -> DMatrix<f64> {
    let (c, s) = (r.cosh(), r.sinh());
    DMatrix::from_row_slice(
        4,
        4,
        &[c, 0.0, s, 0.0, 0.0, c, 0.0, -s, s, 0.0, c, 0.0, 0.0, -s, 0.0, c],
    )
}

/// Beam splitter mixing the two modes with angle theta.
pub fn beam_splitter(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(
        4,
        4,
        &[c, 0.0, s, 0.0, 0.0, c, 0.0, s, -s, 0.0, c, 0.0, 0.0, -s, 0.0, c],
    )
}

pub fn random_symplectic(rng: &mut impl Rng, max_squeeze: f64) -> DMatrix<f64> {
    let a = local_symplectic(rng, max_squeeze);
    let t = two_mode_squeezer(rng.random_range(-max_squeeze..max_squeeze));
    let b = beam_splitter(rng.random_range(0.0..std::f64::consts::TAU));
    let c = local_symplectic(rng, max_squeeze);
    a * t * b * c
}

fn thermal_diag(rng: &mut impl Rng, max_occupation: f64) -> DMatrix<f64> {
    let nu1 = 0.5 + rng.random_range(0.0..max_occupation);
    let nu2 = 0.5 + rng.random_range(0.0..max_occupation);
    DMatrix::from_diagonal(&DVector::from_row_slice(&[nu1, nu1, nu2, nu2]))
}

/// S·diag(ν₁, ν₁, ν₂, ν₂)·Sᵀ with ν ≥ 1/2 and a random symplectic S.
pub fn random_physical(rng: &mut impl Rng) -> CovarianceState {
    let s = random_symplectic(rng, 0.8);
    let d = if rng.random_bool(0.3) {
        DMatrix::identity(4, 4) * 0.5
    } else {
        thermal_diag(rng, 3.0)
    };
    CovarianceState::generic(&s * d * s.transpose()).unwrap()
}

/// Product state plus classical Gaussian noise: separable by construction.
pub fn random_separable(rng: &mut impl Rng) -> CovarianceState {
    let s = local_symplectic(rng, 1.0);
    let d = thermal_diag(rng, 2.0);
    let mut m = &s * d * s.transpose();
    if rng.random_bool(0.7) {
        let g = gaussian_matrix(rng, 4, 4) * rng.random_range(0.0..0.7);
        m += &g * g.transpose();
    }
    CovarianceState::generic(m).unwrap()
}

pub const OMEGA_W: f64 = 1.045416746978633e10;

pub fn random_channel(rng: &mut impl Rng) -> ChannelSpec {
    let temperature = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..300.0) };
    let center_omega = 10f64.powf(rng.random_range(8.0..11.5));
    let k_real = rng.random_range(0.0..100.0);
    match rng.random_range(0..3) {
        0 => {
            let length: f64 = rng.random_range(0.0..2.0);
            // amplitude gain at most 1.5
            let kappa = rng.random_range(0.0..(1.5f64.ln() / length.max(1e-9)).min(10.0));
            ChannelSpec::amplifier(kappa, length, temperature, k_real, center_omega)
        }
        1 => {
            let length = 10f64.powf(rng.random_range(-1.0..5.0));
            let kappa = rng.random_range(0.0..2.0) / length;
            ChannelSpec::attenuator(kappa, length, temperature, k_real, center_omega)
        }
        _ => {
            let t = Complex::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..std::f64::consts::TAU));
            ChannelSpec::reflector(
                rng.random_range(0.0..30.0),
                rng.random_range(0.0..0.1),
                rng.random_range(0.0..0.1),
                t,
                temperature,
                k_real,
                center_omega,
            )
        }
    }
}

pub fn random_chain(rng: &mut impl Rng, max_len: usize) -> Vec<ChannelSpec> {
    let n = rng.random_range(1..=max_len);
    (0..n).map(|_| random_channel(rng)).collect()
}

pub fn kind_counts(stages: &[ChannelSpec]) -> [usize; 3] {
    let mut c = [0; 3];
    for s in stages {
        c[match s.kind {
            ChannelKind::Amplifier => 0,
            ChannelKind::Attenuator => 1,
            ChannelKind::Reflector => 2,
        }] += 1;
    }
    c
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}
