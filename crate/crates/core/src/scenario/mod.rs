//! Scenario files, sweeps and their CSV/SVG output.

mod config;
mod render;
mod sweep;

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::Result;

pub use config::{parse_scenario, Grid, OutputPaths, Scenario, SweepAxis, SweepSpec};
pub use render::{emit_csv, emit_svg, render_svg, write_csv, CSV_HEADER};
pub use sweep::{
    run_detuning_sweep, run_parameter_sweep, run_sweep, stability_census, with_jobs, StabilityCensus, SweepResult,
    SweepRow,
};

/// Reads, resolves and validates a scenario file (non-strict).
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    load_scenario_with(path, false)
}

pub fn load_scenario_with(path: &Path, strict: bool) -> Result<Scenario> {
    let text = fs::read_to_string(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, base, strict)
}

/// Hex SHA-256 of the resolved scenario (output paths excluded).
pub fn scenario_hash(s: &Scenario) -> String {
    // every field is a plain number, string or enum, so serialization cannot fail
    let text = toml::to_string(s).unwrap_or_else(|_| format!("{s:?}"));
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
