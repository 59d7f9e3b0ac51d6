//! Phase-insensitive Gaussian channels on the second mode of a two-mode state.

use std::fmt;

use nalgebra::{Complex, DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CovarianceState;
use crate::metrics::{is_physical, min_symplectic_eigenvalue, BlockDecomposition};
use crate::units::thermal_occupation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Amplifier,
    Attenuator,
    Reflector,
}

impl ChannelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Amplifier => "amplifier",
            ChannelKind::Attenuator => "attenuator",
            ChannelKind::Reflector => "reflector",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One stage of the radar chain.
///
/// `length` is z_a for an amplifier, the range R for an attenuator and z_t
/// for a reflector. `delta_z`, `t_magnitude` and `t_phase` are only read by
/// reflectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub label: Option<String>,
    /// Imaginary wave-vector part (1/m)
    pub kappa: f64,
    /// Real wave-vector part (rad/m)
    pub k_real: f64,
    pub length: f64,
    /// Medium temperature (K)
    pub temperature: f64,
    /// Frequency used for the medium's thermal occupation (rad/s)
    pub center_omega: f64,
    pub delta_z: f64,
    pub t_magnitude: f64,
    pub t_phase: f64,
}

impl ChannelSpec {
    pub fn amplifier(kappa: f64, length: f64, temperature: f64, k_real: f64, center_omega: f64) -> Self {
        ChannelSpec {
            kind: ChannelKind::Amplifier,
            label: None,
            kappa,
            k_real,
            length,
            temperature,
            center_omega,
            delta_z: 0.0,
            t_magnitude: 1.0,
            t_phase: 0.0,
        }
    }

    pub fn attenuator(kappa: f64, length: f64, temperature: f64, k_real: f64, center_omega: f64) -> Self {
        ChannelSpec {
            kind: ChannelKind::Attenuator,
            ..Self::amplifier(kappa, length, temperature, k_real, center_omega)
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn reflector(
        kappa: f64,
        z_t: f64,
        delta_z: f64,
        t_omega: Complex<f64>,
        temperature: f64,
        k_real: f64,
        center_omega: f64,
    ) -> Self {
        ChannelSpec {
            kind: ChannelKind::Reflector,
            delta_z,
            t_magnitude: t_omega.norm(),
            t_phase: t_omega.arg(),
            ..Self::amplifier(kappa, z_t, temperature, k_real, center_omega)
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn name(&self) -> &str {
        self.label.as_deref().unwrap_or(self.kind.as_str())
    }

    pub fn t_omega(&self) -> Complex<f64> {
        Complex::from_polar(self.t_magnitude, self.t_phase)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("kappa", self.kappa, self.kappa >= 0.0),
            ("length", self.length, self.length >= 0.0),
            ("temperature", self.temperature, self.temperature >= 0.0),
            ("center_omega", self.center_omega, self.center_omega > 0.0),
            ("delta_z", self.delta_z, self.delta_z >= 0.0),
            ("t_magnitude", self.t_magnitude, (0.0..=1.0).contains(&self.t_magnitude)),
        ];
        for (name, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(Error::Domain(format!("{} {name} out of range: {value}", self.kind)));
            }
        }
        if !self.k_real.is_finite() || !self.t_phase.is_finite() {
            return Err(Error::Domain(format!("{} has non-finite phase data", self.kind)));
        }
        Ok(())
    }

    fn occupation(&self) -> Result<f64> {
        thermal_occupation(self.center_omega, self.temperature)
    }
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn require_kind(spec: &ChannelSpec, kind: ChannelKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::Domain(format!("expected a {kind} stage, got {}", spec.kind)));
    }
    spec.validate()
}

fn require_physical(v: &CovarianceState) -> Result<()> {
    if v.dim() != 4 {
        return Err(Error::Domain(format!("channels act on 4x4 states, got {0}x{0}", v.dim())));
    }
    let nu = min_symplectic_eigenvalue(v)?;
    if is_physical(v) {
        Ok(())
    } else {
        Err(Error::Unphysical { min_symplectic: nu })
    }
}

/// B → s²·R B Rᵀ + noise·I, C → s·C Rᵀ; A is copied untouched.
fn local_map(v: &CovarianceState, scale: f64, theta: f64, noise: f64) -> Result<CovarianceState> {
    let blocks = BlockDecomposition::of(v)?;
    let r = rotation(theta);
    let b = r * blocks.block_b * r.transpose() * (scale * scale) + Matrix2::identity() * noise;
    let c = blocks.block_c * r.transpose() * scale;

    let mut m: DMatrix<f64> = v.matrix().clone();
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&b);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&c);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&c.transpose());
    CovarianceState::new(m, v.ordering())
}

/// Gain g = exp(κ·z_a), phase K·z_a, added noise (g² − 1)(N + 1/2).
pub fn amplifier_transform(v: &CovarianceState, spec: &ChannelSpec) -> Result<CovarianceState> {
    require_kind(spec, ChannelKind::Amplifier)?;
    require_physical(v)?;
    let g = (spec.kappa * spec.length).exp();
    let theta = spec.k_real * spec.length;
    let n = spec.occupation()?;
    local_map(v, g, theta, (g * g - 1.0) * (n + 0.5))
}

/// Transmissivity η = exp(−2κR), phase K·R, added noise (1 − η)(N + 1/2).
pub fn attenuation_transform(v: &CovarianceState, spec: &ChannelSpec) -> Result<CovarianceState> {
    require_kind(spec, ChannelKind::Attenuator)?;
    require_physical(v)?;
    let eta = (-2.0 * spec.kappa * spec.length).exp();
    let theta = spec.k_real * spec.length;
    let n = spec.occupation()?;
    local_map(v, eta.sqrt(), theta, (1.0 - eta) * (n + 0.5))
}

/// Target reflection amplitude τ and whether |τ| exceeds one.
///
/// τ = t·exp(iKΔz) + 2κ√Δz · t · ∫₀^{z_t} exp((iK − κ)(z_t − z)) dz
pub fn reflection_amplitude(spec: &ChannelSpec, t_omega: Complex<f64>, delta_z: f64) -> (Complex<f64>, bool) {
    let i = Complex::i();
    let z_t = spec.length;
    let a = i * spec.k_real - spec.kappa;
    let integral = if a.norm() * z_t < 1e-8 {
        // series of (e^{a z} − 1)/a
        Complex::from(z_t) * (Complex::from(1.0) + a * z_t / 2.0)
    } else {
        ((a * z_t).exp() - 1.0) / a
    };
    let tau = t_omega * (i * spec.k_real * delta_z).exp()
        + t_omega * integral * (2.0 * spec.kappa * delta_z.sqrt());
    (tau, tau.norm() > 1.0)
}

/// Lossy map with transmissivity |τ|² and phase arg τ. Returns the state and
/// whether τ had to be clamped to the unit circle.
pub fn reflection_transform(
    v: &CovarianceState,
    spec: &ChannelSpec,
    tau: Complex<f64>,
) -> Result<(CovarianceState, bool)> {
    require_kind(spec, ChannelKind::Reflector)?;
    require_physical(v)?;
    if !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::Numerical("reflection amplitude is not finite".into()));
    }
    let clamped = tau.norm() > 1.0;
    let mag = tau.norm().min(1.0);
    let theta = if mag == 0.0 { 0.0 } else { tau.arg() };
    let n = spec.occupation()?;
    let out = local_map(v, mag, theta, (1.0 - mag * mag) * (n + 0.5))?;
    Ok((out, clamped))
}

/// Applies one stage; the flag reports reflector saturation.
pub fn apply_channel(v: &CovarianceState, spec: &ChannelSpec) -> Result<(CovarianceState, bool)> {
    match spec.kind {
        ChannelKind::Amplifier => Ok((amplifier_transform(v, spec)?, false)),
        ChannelKind::Attenuator => Ok((attenuation_transform(v, spec)?, false)),
        ChannelKind::Reflector => {
            let (tau, saturated) = reflection_amplitude(spec, spec.t_omega(), spec.delta_z);
            let (out, _) = reflection_transform(v, spec, tau)?;
            Ok((out, saturated))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    /// "index-name", e.g. "0-source" or "2-attenuator".
    pub label: String,
    pub covariance: CovarianceState,
    pub lambda: f64,
    pub physical: bool,
    pub saturated: bool,
}

impl StageResult {
    fn new(label: String, covariance: CovarianceState, saturated: bool) -> Result<Self> {
        let lambda = crate::metrics::sph_lambda(&covariance)?;
        let physical = is_physical(&covariance);
        Ok(StageResult {
            label,
            covariance,
            lambda,
            physical,
            saturated,
        })
    }
}

pub const SOURCE_LABEL: &str = "source";

/// Stage labels in pipeline order, including the source at index 0.
pub fn stage_labels(stages: &[ChannelSpec]) -> Vec<String> {
    std::iter::once(format!("0-{SOURCE_LABEL}"))
        .chain(stages.iter().enumerate().map(|(k, s)| format!("{}-{}", k + 1, s.name())))
        .collect()
}

/// Folds `stages` over `v0`, returning the source as stage 0 followed by every stage output.
pub fn apply_pipeline(v0: &CovarianceState, stages: &[ChannelSpec]) -> Result<Vec<StageResult>> {
    match run_pipeline(v0, stages) {
        (results, None) => Ok(results),
        (_, Some(e)) => Err(e),
    }
}

/// Like [`apply_pipeline`] but keeps the stages completed before a failure.
pub fn run_pipeline(v0: &CovarianceState, stages: &[ChannelSpec]) -> (Vec<StageResult>, Option<Error>) {
    let labels = stage_labels(stages);
    let wrap = |index: usize, e: Error| Error::Stage { index, source: Box::new(e) };
    let mut out = Vec::with_capacity(stages.len() + 1);

    match StageResult::new(labels[0].clone(), v0.clone(), false) {
        Ok(first) if first.physical => out.push(first),
        Ok(_) => {
            let e = match min_symplectic_eigenvalue(v0) {
                Ok(nu) => Error::Unphysical { min_symplectic: nu },
                Err(e) => e,
            };
            return (out, Some(wrap(0, e)));
        }
        Err(e) => return (out, Some(wrap(0, e))),
    }
    for (k, spec) in stages.iter().enumerate() {
        let index = k + 1;
        let step = apply_channel(&out[k].covariance, spec)
            .and_then(|(next, saturated)| StageResult::new(labels[index].clone(), next, saturated));
        match step {
            Ok(r) => out.push(r),
            Err(e) => return (out, Some(wrap(index, e))),
        }
    }
    (out, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::metrics::sph_lambda;

    const W: f64 = 1.045e10;

    fn tms(r: f64) -> CovarianceState {
        let (ch, sh) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        CovarianceState::generic(DMatrix::from_row_slice(
            4,
            4,
            &[ch, 0.0, sh, 0.0, 0.0, ch, 0.0, -sh, sh, 0.0, ch, 0.0, 0.0, -sh, 0.0, ch],
        ))
        .unwrap()
    }

    #[test]
    fn unit_gain_amplifier_is_identity() {
        let v = tms(0.4);
        let out = amplifier_transform(&v, &ChannelSpec::amplifier(0.0, 1.0, 0.2, 0.0, W)).unwrap();
        assert_eq!(out.matrix(), v.matrix());
    }

    #[test]
    fn amplified_vacuum() {
        let v = CovarianceState::generic(DMatrix::identity(4, 4) * 0.5).unwrap();
        let spec = ChannelSpec::amplifier(0.3, 2.0, 0.0, 0.0, W);
        let g = (0.6f64).exp();
        let out = amplifier_transform(&v, &spec).unwrap();
        let b = BlockDecomposition::of(&out).unwrap().block_b;
        let want = g * g - 0.5;
        assert!((b - Matrix2::identity() * want).abs().max() < 1e-12 * want);
    }

    #[test]
    fn lossless_attenuator_is_identity() {
        let v = tms(0.7);
        let out = attenuation_transform(&v, &ChannelSpec::attenuator(0.0, 1e5, 290.0, 0.0, W)).unwrap();
        assert_eq!(out.matrix(), v.matrix());
    }

    #[test]
    fn opaque_attenuator_replaces_mode() {
        let v = tms(0.7);
        let spec = ChannelSpec::attenuator(1e3, 10.0, 290.0, 3.0, W);
        let out = attenuation_transform(&v, &spec).unwrap();
        let blocks = BlockDecomposition::of(&out).unwrap();
        let n = thermal_occupation(W, 290.0).unwrap();
        assert_eq!(blocks.block_c, Matrix2::zeros());
        assert_eq!(blocks.block_b, Matrix2::identity() * (n + 0.5));
    }

    #[test]
    fn attenuation_semigroup() {
        let v = tms(0.9);
        let (k, r1, r2) = (2e-3, 120.0, 310.0);
        let one = ChannelSpec::attenuator(k, r1, 290.0, 34.8, W);
        let two = ChannelSpec::attenuator(k, r2, 290.0, 34.8, W);
        let both = ChannelSpec::attenuator(k, r1 + r2, 290.0, 34.8, W);
        let chained = attenuation_transform(&attenuation_transform(&v, &one).unwrap(), &two).unwrap();
        let direct = attenuation_transform(&v, &both).unwrap();
        assert!(max_abs(&(chained.matrix() - direct.matrix())) < 1e-10);
    }

    #[test]
    fn optical_block_untouched() {
        let v = tms(0.3);
        for spec in [
            ChannelSpec::amplifier(0.2, 1.0, 0.2, 1.3, W),
            ChannelSpec::attenuator(0.01, 7.0, 290.0, 2.1, W),
            ChannelSpec::reflector(18.2, 0.05, 0.05, Complex::new(0.8, 0.0), 290.0, 34.87, W),
        ] {
            let (out, _) = apply_channel(&v, &spec).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    assert_eq!(out.matrix()[(r, c)].to_bits(), v.matrix()[(r, c)].to_bits());
                }
            }
        }
    }

    #[test]
    fn lossless_mirror_amplitude() {
        let spec = ChannelSpec::reflector(0.0, 0.05, 0.05, Complex::new(1.0, 0.0), 290.0, 34.87, W);
        let (tau, sat) = reflection_amplitude(&spec, Complex::new(1.0, 0.0), 0.05);
        assert!((tau - Complex::new(0.0, 34.87 * 0.05).exp()).norm() < 1e-15);
        assert!((tau.norm() - 1.0).abs() < 1e-15);
        assert!(!sat);
    }

    #[test]
    fn null_reflection() {
        let spec = ChannelSpec::reflector(18.2, 0.05, 0.0, Complex::new(0.0, 0.0), 290.0, 34.87, W);
        let (tau, _) = reflection_amplitude(&spec, Complex::new(0.0, 0.0), 0.0);
        assert_eq!(tau, Complex::new(0.0, 0.0));
    }

    #[test]
    fn target_amplitude_matches_quadrature() {
        let k = 1.045416746978633e10 / 299_792_458.0;
        let spec = ChannelSpec::reflector(18.2, 0.05, 0.05, Complex::new(0.8, 0.0), 290.0, k, W);
        let (tau, sat) = reflection_amplitude(&spec, spec.t_omega(), 0.05);
        // composite Simpson on the integral, independent of the closed form
        let n = 2000;
        let h = 0.05 / n as f64;
        let a = Complex::new(-18.2, k);
        let f = |z: f64| (a * (0.05 - z)).exp();
        let mut s = f(0.0) + f(0.05);
        for j in 1..n {
            s += f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = s * h / 3.0;
        let want = 0.8 * Complex::new(0.0, k * 0.05).exp() + 0.8 * integral * (2.0 * 18.2 * 0.05f64.sqrt());
        assert!((tau - want).norm() < 1e-12);
        assert!((tau.norm() - 0.9146291241966562).abs() < 1e-12);
        assert!(!sat);
    }

    #[test]
    fn unit_reflection_is_identity() {
        let v = tms(0.5);
        let spec = ChannelSpec::reflector(0.0, 0.05, 0.05, Complex::new(1.0, 0.0), 290.0, 0.0, W);
        let (out, clamped) = reflection_transform(&v, &spec, Complex::new(1.0, 0.0)).unwrap();
        assert!(!clamped);
        assert_eq!(out.matrix(), v.matrix());
    }

    #[test]
    fn zero_reflection_gives_target_thermal_state() {
        let v = tms(0.5);
        let spec = ChannelSpec::reflector(18.2, 0.05, 0.05, Complex::new(0.8, 0.0), 290.0, 0.0, W);
        let (out, _) = reflection_transform(&v, &spec, Complex::new(0.0, 0.0)).unwrap();
        let n = thermal_occupation(W, 290.0).unwrap();
        let blocks = BlockDecomposition::of(&out).unwrap();
        assert_eq!(blocks.block_b, Matrix2::identity() * (n + 0.5));
        assert_eq!(blocks.block_c, Matrix2::zeros());
    }

    #[test]
    fn oversized_tau_is_clamped() {
        let v = tms(0.5);
        let spec = ChannelSpec::reflector(18.2, 0.05, 0.05, Complex::new(1.0, 0.0), 290.0, 0.0, W);
        let (out, clamped) = reflection_transform(&v, &spec, Complex::new(0.0, 1.2)).unwrap();
        assert!(clamped);
        assert!(is_physical(&out));
    }

    #[test]
    fn unphysical_input_rejected() {
        let v = CovarianceState::generic(DMatrix::identity(4, 4) * 0.3).unwrap();
        let err = amplifier_transform(&v, &ChannelSpec::amplifier(0.1, 1.0, 0.2, 0.0, W)).unwrap_err();
        assert!(matches!(err, Error::Unphysical { .. }));
    }

    #[test]
    fn wrong_kind_rejected() {
        let v = tms(0.1);
        assert!(attenuation_transform(&v, &ChannelSpec::amplifier(0.1, 1.0, 0.2, 0.0, W)).is_err());
    }

    #[test]
    fn empty_pipeline_reports_source() {
        let v = tms(0.5);
        let out = apply_pipeline(&v, &[]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].label, "0-source");
        assert_eq!(out[0].lambda, sph_lambda(&v).unwrap());
    }

    #[test]
    fn identity_pipeline_keeps_lambda() {
        let v = tms(0.5);
        let stages = [
            ChannelSpec::amplifier(0.0, 1.0, 0.2, 0.0, W),
            ChannelSpec::attenuator(0.0, 1e5, 290.0, 0.0, W),
            ChannelSpec::reflector(0.0, 0.05, 0.0, Complex::new(1.0, 0.0), 290.0, 0.0, W),
            ChannelSpec::attenuator(0.0, 1e5, 290.0, 0.0, W),
            ChannelSpec::amplifier(0.0, 1.0, 0.2, 0.0, W),
        ];
        let out = apply_pipeline(&v, &stages).unwrap();
        assert_eq!(out.len(), 6);
        for s in &out {
            assert!((s.lambda - out[0].lambda).abs() < 1e-12);
        }
        assert_eq!(out[2].label, "2-attenuator");
    }

    #[test]
    fn pipeline_error_names_stage() {
        let v = tms(0.5);
        let bad = ChannelSpec::attenuator(-1.0, 1.0, 290.0, 0.0, W);
        let err = apply_pipeline(&v, &[ChannelSpec::amplifier(0.0, 1.0, 0.2, 0.0, W), bad]).unwrap_err();
        assert!(matches!(err, Error::Stage { index: 2, .. }));
    }
}
