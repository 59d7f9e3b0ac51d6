//! On-disk scenario schema and its resolution into library types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelKind, ChannelSpec};
use crate::error::{Error, Result, Violation};
use crate::metrics::ModePair;
use crate::tripartite::Convention;
use crate::units::{derive_couplings, validate_params, SystemParams, CONSTANTS};

pub const DEFAULT_AMPLIFIER_LENGTH: f64 = 1.0;
pub const DEFAULT_TARGET_DEPTH: f64 = 0.05;
pub const DEFAULT_MEDIUM_TEMPERATURE: f64 = 290.0;
pub const DEFAULT_T_MAGNITUDE: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Detuning,
    Temperature,
    Wavelength,
    MrDamping,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Detuning => "detuning",
            SweepAxis::Temperature => "temperature",
            SweepAxis::Wavelength => "wavelength",
            SweepAxis::MrDamping => "mr_damping",
        }
    }

    /// Human axis caption with units.
    pub fn caption(self) -> &'static str {
        match self {
            SweepAxis::Detuning => "detuning / normalizer",
            SweepAxis::Temperature => "temperature (K)",
            SweepAxis::Wavelength => "optical wavelength (m)",
            SweepAxis::MrDamping => "MR damping rate (1/s)",
        }
    }

    /// Sets this parameter on `p`; detuning is not a system parameter and is ignored.
    pub fn apply(self, p: &mut SystemParams, value: f64) {
        match self {
            SweepAxis::Detuning => {}
            SweepAxis::Temperature => p.temperature = value,
            SweepAxis::Wavelength => p.lambda_c = value,
            SweepAxis::MrDamping => p.gamma_m = value,
        }
    }
}

/// Evenly spaced points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Grid { min, max, count }
    }

    /// A single-point grid yields `min`.
    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.min],
            n => {
                let step = (self.max - self.min) / (n - 1) as f64;
                (0..n)
                    .map(|k| if k == n - 1 { self.max } else { self.min + step * k as f64 })
                    .collect()
            }
        }
    }

    fn check(&self, field: &str, out: &mut Vec<Violation>) {
        if self.count < 2 {
            out.push(Violation::new(format!("{field}.count"), format!("need at least 2 points, got {}", self.count)));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            out.push(Violation::new(field, "bounds must be finite"));
        } else if self.min >= self.max {
            out.push(Violation::new(field, format!("min {} must be below max {}", self.min, self.max)));
        }
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::new(-5.0, 5.0, 500)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawScenario {
    system: SystemParams,
    sweep: RawSweep,
    #[serde(default)]
    stage: Vec<RawStage>,
    #[serde(default)]
    output: RawOutput,
}

fn default_pairs() -> Vec<ModePair> {
    vec![ModePair::OcMc]
}

fn default_inner() -> Grid {
    Grid::default()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: SweepAxis,
    min: f64,
    max: f64,
    count: usize,
    #[serde(default = "default_pairs")]
    pairs: Vec<ModePair>,
    #[serde(default)]
    convention: Convention,
    #[serde(default)]
    inner_min: Option<f64>,
    #[serde(default)]
    inner_max: Option<f64>,
    #[serde(default)]
    inner_count: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStage {
    kind: ChannelKind,
    label: Option<String>,
    kappa: f64,
    length: Option<f64>,
    temperature: Option<f64>,
    k_real: Option<f64>,
    center_omega: Option<f64>,
    delta_z: Option<f64>,
    t_magnitude: Option<f64>,
    t_phase: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
}

/// Fully resolved sweep description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Grid,
    /// Detuning grid minimized over by parameter sweeps.
    pub inner: Grid,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub params: SystemParams,
    pub stages: Vec<ChannelSpec>,
    pub sweep: SweepSpec,
    pub pairs: Vec<ModePair>,
    pub convention: Convention,
    #[serde(skip)]
    pub output: OutputPaths,
}

impl Scenario {
    /// Nominal device, no stages, OC–MC detuning sweep on the default grid.
    pub fn nominal() -> Self {
        Scenario {
            params: SystemParams::default(),
            stages: Vec::new(),
            sweep: SweepSpec {
                axis: SweepAxis::Detuning,
                grid: Grid::default(),
                inner: Grid::default(),
            },
            pairs: default_pairs(),
            convention: Convention::Corrected,
            output: OutputPaths::default(),
        }
    }

    /// Every violated invariant; `strict` adds the tabulated device ranges.
    pub fn violations(&self, strict: bool) -> Vec<Violation> {
        let mut out: Vec<Violation> = validate_params(&self.params, strict)
            .into_iter()
            .map(|v| Violation::new(format!("system.{}", v.field), v.message))
            .collect();
        self.sweep.grid.check("sweep", &mut out);
        if self.sweep.axis != SweepAxis::Detuning {
            self.sweep.inner.check("sweep.inner", &mut out);
            if self.sweep.grid.min.is_finite() && self.sweep.grid.min <= 0.0 {
                out.push(Violation::new(
                    "sweep.min",
                    format!("{} sweeps need positive values", self.sweep.axis.as_str()),
                ));
            }
        }
        if self.pairs.is_empty() {
            out.push(Violation::new("sweep.pairs", "at least one mode pair is required"));
        }
        for (k, p) in self.pairs.iter().enumerate() {
            if self.pairs[..k].contains(p) {
                out.push(Violation::new("sweep.pairs", format!("duplicate pair {p}")));
            }
            if !self.stages.is_empty() && !p.second_is_microwave() {
                out.push(Violation::new(
                    "sweep.pairs",
                    format!("{p} has no microwave mode for the stages to act on"),
                ));
            }
        }
        for (k, s) in self.stages.iter().enumerate() {
            if let Err(e) = s.validate() {
                out.push(Violation::new(format!("stage[{k}]"), e.to_string()));
            }
        }
        out
    }

    pub fn validate(&self, strict: bool) -> Result<()> {
        let v = self.violations(strict);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

/// Parses and resolves scenario text. Relative output paths are taken from `base_dir`.
pub fn parse_scenario(text: &str, base_dir: &Path, strict: bool) -> Result<Scenario> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            line: Some(1),
            message: "scenario file is empty".into(),
        });
    }
    let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let scenario = resolve(raw, base_dir)?;
    scenario.validate(strict)?;
    Ok(scenario)
}

fn resolve(raw: RawScenario, base_dir: &Path) -> Result<Scenario> {
    let params = raw.system;
    let derived = derive_couplings(&params);
    let omega_w = derived.omega_w;
    let k_default = omega_w / CONSTANTS.c0;

    let mut missing = Vec::new();
    let mut stages = Vec::with_capacity(raw.stage.len());
    for (k, s) in raw.stage.into_iter().enumerate() {
        let default_temperature = match s.kind {
            ChannelKind::Amplifier => params.temperature,
            ChannelKind::Attenuator | ChannelKind::Reflector => DEFAULT_MEDIUM_TEMPERATURE,
        };
        let length = match (s.kind, s.length) {
            (_, Some(l)) => l,
            (ChannelKind::Amplifier, None) => DEFAULT_AMPLIFIER_LENGTH,
            (ChannelKind::Reflector, None) => DEFAULT_TARGET_DEPTH,
            (ChannelKind::Attenuator, None) => {
                missing.push(Violation::new(format!("stage[{k}].length"), "attenuator needs a range"));
                0.0
            }
        };
        let (delta_z, t_magnitude, t_phase) = match s.kind {
            ChannelKind::Reflector => (
                s.delta_z.unwrap_or(DEFAULT_TARGET_DEPTH),
                s.t_magnitude.unwrap_or(DEFAULT_T_MAGNITUDE),
                s.t_phase.unwrap_or(0.0),
            ),
            _ => {
                for (name, given) in [
                    ("delta_z", s.delta_z.is_some()),
                    ("t_magnitude", s.t_magnitude.is_some()),
                    ("t_phase", s.t_phase.is_some()),
                ] {
                    if given {
                        missing.push(Violation::new(
                            format!("stage[{k}].{name}"),
                            format!("only reflector stages take {name}"),
                        ));
                    }
                }
                (0.0, 1.0, 0.0)
            }
        };
        stages.push(ChannelSpec {
            kind: s.kind,
            label: s.label,
            kappa: s.kappa,
            k_real: s.k_real.unwrap_or(k_default),
            length,
            temperature: s.temperature.unwrap_or(default_temperature),
            center_omega: s.center_omega.unwrap_or(omega_w),
            delta_z,
            t_magnitude,
            t_phase,
        });
    }
    if !missing.is_empty() {
        return Err(Error::Validation(missing));
    }

    let defaults = default_inner();
    let inner = Grid::new(
        raw.sweep.inner_min.unwrap_or(defaults.min),
        raw.sweep.inner_max.unwrap_or(defaults.max),
        raw.sweep.inner_count.unwrap_or(defaults.count),
    );
    let join = |p: Option<PathBuf>| p.map(|p| if p.is_absolute() { p } else { base_dir.join(p) });

    Ok(Scenario {
        params,
        stages,
        sweep: SweepSpec {
            axis: raw.sweep.axis,
            grid: Grid::new(raw.sweep.min, raw.sweep.max, raw.sweep.count),
            inner,
        },
        pairs: raw.sweep.pairs,
        convention: raw.sweep.convention,
        output: OutputPaths {
            csv: join(raw.output.csv),
            svg: join(raw.output.svg),
        },
    })
}
