//! Detuning and parameter sweeps over the full source-plus-channels chain.

use rayon::prelude::*;

use crate::channels::{run_pipeline, stage_labels, ChannelSpec};
use crate::error::{Error, Result};
use crate::linalg::{solve_lyapunov, spectral_abscissa, Ordering};
use crate::metrics::{extract_pair_cm, ModePair};
use crate::scenario::config::{Scenario, SweepAxis};
use crate::tripartite::{build_diffusion_matrix, build_drift_matrix, solve_steady_state, Convention};
use crate::units::{derive_couplings, SystemParams};

/// One (axis value, stage) record.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: f64,
    /// "pair:index-name", e.g. "oc-mc:3-reflector"
    pub stage: String,
    pub lambda: Option<f64>,
    pub physical: bool,
    pub hurwitz: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    /// Row labels in emission order for a single axis value.
    pub stages: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub scenario_hash: String,
    pub version: String,
}

impl SweepResult {
    /// Number of rows carrying a witness value.
    pub fn stable_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.lambda.is_some()).count()
    }

    /// Rows belonging to one stage label, in axis order.
    pub fn series<'a>(&'a self, stage: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.stage == stage)
    }

    /// Smallest witness value of a stage, if any point produced one.
    pub fn min_lambda(&self, stage: &str) -> Option<f64> {
        self.series(stage).filter_map(|r| r.lambda).reduce(f64::min)
    }
}

/// Per-point outcome for one stage, before the axis value is attached.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cell {
    lambda: Option<f64>,
    physical: bool,
    hurwitz: bool,
}

const UNSTABLE: Cell = Cell {
    lambda: None,
    physical: false,
    hurwitz: false,
};

fn row_labels(pairs: &[ModePair], stages: &[ChannelSpec]) -> Vec<String> {
    let labels = stage_labels(stages);
    pairs
        .iter()
        .flat_map(|p| labels.iter().map(move |l| format!("{p}:{l}")))
        .collect()
}

/// Parameters that are fixed across a detuning sweep.
struct PointContext<'a> {
    params: SystemParams,
    stages: &'a [ChannelSpec],
    pairs: &'a [ModePair],
    convention: Convention,
}

impl PointContext<'_> {
    fn evaluate_grid(&self, xs: &[f64]) -> Result<Vec<Vec<Cell>>> {
        let d = derive_couplings(&self.params);
        let diffusion = build_diffusion_matrix(&self.params, &d)?.entries;
        let scale = self.params.detuning_scale();
        let cells_per_point = self.pairs.len() * (self.stages.len() + 1);

        let eval = |x: f64| -> Vec<Cell> {
            let delta = x * scale;
            let ss = match solve_steady_state(&d, &self.params, delta, delta) {
                Ok(ss) => ss,
                Err(_) => return vec![UNSTABLE; cells_per_point],
            };
            let drift = build_drift_matrix(&d, &self.params, &ss, delta, delta, self.convention).entries;
            match spectral_abscissa(&drift) {
                Ok(a) if a < 0.0 => {}
                _ => return vec![UNSTABLE; cells_per_point],
            }
            let broken = Cell {
                lambda: None,
                physical: false,
                hurwitz: true,
            };
            let v6 = match solve_lyapunov(&drift, &diffusion).and_then(|v| v.with_ordering(Ordering::Tripartite)) {
                Ok(v) => v,
                Err(_) => return vec![broken; cells_per_point],
            };
            let mut cells = Vec::with_capacity(cells_per_point);
            for &pair in self.pairs {
                let (results, _) = match extract_pair_cm(&v6, pair) {
                    Ok(v4) => run_pipeline(&v4, self.stages),
                    Err(e) => (Vec::new(), Some(e)),
                };
                let done = results.len();
                cells.extend(results.into_iter().map(|r| Cell {
                    lambda: Some(r.lambda),
                    physical: r.physical,
                    hurwitz: true,
                }));
                cells.extend(std::iter::repeat_n(broken, self.stages.len() + 1 - done));
            }
            cells
        };
        Ok(xs.par_iter().map(|&x| eval(x)).collect())
    }
}

fn finish(s: &Scenario, rows: Vec<SweepRow>) -> SweepResult {
    SweepResult {
        axis: s.sweep.axis,
        stages: row_labels(&s.pairs, &s.stages),
        rows,
        scenario_hash: super::scenario_hash(s),
        version: crate::VERSION.to_string(),
    }
}

/// λ after every stage at each detuning x, with Δ_c = Δ_w = x·normalizer.
///
/// Points whose steady state diverges or whose drift is not Hurwitz are kept
/// with `hurwitz = false` and no λ. Grid points run on the current rayon pool.
pub fn run_detuning_sweep(s: &Scenario) -> Result<SweepResult> {
    if s.sweep.axis != SweepAxis::Detuning {
        return Err(Error::Domain(format!(
            "detuning sweep requested for a {} scenario",
            s.sweep.axis.as_str()
        )));
    }
    let ctx = PointContext {
        params: s.params.clone(),
        stages: &s.stages,
        pairs: &s.pairs,
        convention: s.convention,
    };
    let xs = s.sweep.grid.points();
    let labels = row_labels(&s.pairs, &s.stages);
    let cells = ctx.evaluate_grid(&xs)?;
    let rows = xs
        .iter()
        .zip(cells)
        .flat_map(|(&x, point)| {
            labels.iter().zip(point).map(move |(label, c)| SweepRow {
                axis: x,
                stage: label.clone(),
                lambda: c.lambda,
                physical: c.physical,
                hurwitz: c.hurwitz,
            })
        })
        .collect();
    Ok(finish(s, rows))
}

/// For each outer parameter value, the minimum λ over the inner detuning grid, per stage.
///
/// `physical` is taken from the minimizing point; `hurwitz` is true when any
/// inner point was stable.
pub fn run_parameter_sweep(s: &Scenario) -> Result<SweepResult> {
    if s.sweep.axis == SweepAxis::Detuning {
        return Err(Error::Domain("parameter sweep requested for a detuning scenario".into()));
    }
    let labels = row_labels(&s.pairs, &s.stages);
    let xs = s.sweep.inner.points();
    let outer = s.sweep.grid.points();

    let reduced: Vec<Vec<Cell>> = outer
        .par_iter()
        .map(|&value| -> Result<Vec<Cell>> {
            let mut params = s.params.clone();
            s.sweep.axis.apply(&mut params, value);
            let ctx = PointContext {
                params,
                stages: &s.stages,
                pairs: &s.pairs,
                convention: s.convention,
            };
            let grid = ctx.evaluate_grid(&xs)?;
            Ok((0..labels.len()).map(|k| reduce(grid.iter().map(|p| p[k]))).collect())
        })
        .collect::<Result<_>>()?;

    let rows = outer
        .iter()
        .zip(reduced)
        .flat_map(|(&v, cells)| {
            labels.iter().zip(cells).map(move |(label, c)| SweepRow {
                axis: v,
                stage: label.clone(),
                lambda: c.lambda,
                physical: c.physical,
                hurwitz: c.hurwitz,
            })
        })
        .collect();
    Ok(finish(s, rows))
}

fn reduce(cells: impl Iterator<Item = Cell>) -> Cell {
    let mut best: Option<Cell> = None;
    let mut any_stable = false;
    for c in cells {
        any_stable |= c.hurwitz;
        if let Some(l) = c.lambda {
            if best.and_then(|b| b.lambda).is_none_or(|b| l < b) {
                best = Some(c);
            }
        }
    }
    match best {
        Some(c) => Cell {
            hurwitz: any_stable,
            ..c
        },
        None => Cell {
            lambda: None,
            physical: false,
            hurwitz: any_stable,
        },
    }
}

/// Stability of the linearized dynamics over every point a sweep would visit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityCensus {
    pub points: usize,
    pub stable: usize,
    /// Points where the steady-state iteration failed to converge.
    pub diverged: usize,
    /// Range of spectral abscissae over converged points (1/s).
    pub abscissa_range: Option<(f64, f64)>,
}

pub fn stability_census(s: &Scenario) -> Result<StabilityCensus> {
    let (outer, xs) = match s.sweep.axis {
        SweepAxis::Detuning => (vec![f64::NAN], s.sweep.grid.points()),
        _ => (s.sweep.grid.points(), s.sweep.inner.points()),
    };
    let jobs: Vec<(f64, f64)> = outer.iter().flat_map(|&v| xs.iter().map(move |&x| (v, x))).collect();
    let outcomes: Vec<Option<f64>> = jobs
        .par_iter()
        .map(|&(v, x)| {
            let mut params = s.params.clone();
            if !v.is_nan() {
                s.sweep.axis.apply(&mut params, v);
            }
            let d = derive_couplings(&params);
            let delta = x * params.detuning_scale();
            let ss = solve_steady_state(&d, &params, delta, delta).ok()?;
            let drift = build_drift_matrix(&d, &params, &ss, delta, delta, s.convention).entries;
            Some(spectral_abscissa(&drift).unwrap_or(f64::INFINITY))
        })
        .collect();
    let mut census = StabilityCensus {
        points: outcomes.len(),
        stable: 0,
        diverged: 0,
        abscissa_range: None,
    };
    for o in outcomes {
        match o {
            None => census.diverged += 1,
            Some(a) => {
                if a < 0.0 {
                    census.stable += 1;
                }
                census.abscissa_range = Some(match census.abscissa_range {
                    None => (a, a),
                    Some((lo, hi)) => (lo.min(a), hi.max(a)),
                });
            }
        }
    }
    Ok(census)
}

/// Runs whichever sweep the scenario's axis calls for.
pub fn run_sweep(s: &Scenario) -> Result<SweepResult> {
    match s.sweep.axis {
        SweepAxis::Detuning => run_detuning_sweep(s),
        _ => run_parameter_sweep(s),
    }
}

/// Runs `f` on a dedicated pool of `jobs` workers, or the global pool when `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::Domain("--jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Numerical(format!("could not start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
