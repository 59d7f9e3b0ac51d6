//! Entanglement bookkeeping for an optical–microwave quantum radar chain.
//!
//! A tripartite source (optical cavity, microwave cavity, mechanical
//! resonator) is linearized around its semiclassical fixed point. The
//! stationary covariance of the fluctuations comes from a Lyapunov equation,
//! a two-mode block is extracted, and the microwave mode is pushed through
//! amplifier, atmosphere and target channels. The Simon–Peres–Horodecki
//! witness is evaluated after every stage.
//!
//! All quantities are SI scalars; quadratures use the vacuum-variance-1/2
//! convention throughout.

pub mod channels;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod scenario;
pub mod tripartite;
pub mod units;

pub use nalgebra;
pub use channels::{apply_pipeline, ChannelKind, ChannelSpec, StageResult};
pub use error::{Error, Result, Violation};
pub use linalg::{solve_lyapunov, spectral_abscissa, symplectic_eigenvalues, CovarianceState};
pub use metrics::{extract_pair_cm, is_physical, sph_lambda, ModePair};
pub use scenario::{load_scenario, run_detuning_sweep, run_parameter_sweep, Scenario, SweepResult};
pub use tripartite::{
    build_diffusion_matrix, build_drift_matrix, solve_steady_state, Convention, SteadyState,
};
pub use units::{derive_couplings, thermal_occupation, validate_params, DerivedCouplings, SystemParams};

/// Crate version, recorded in sweep metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
