//! The limiting avalanche process and its samplers.
//!
//! Internally everything is in normalized units: the initial-profile
//! Brownian motion has diffusivity 1 and the sleep noise has diffusivity
//! `rho`. [`DiffusionParams`] converts from the raw lattice constants.
//!
//! * [`sample_fidi`] builds finite-dimensional marginals from coalescing
//!   reflected Brownian motions.
//! * [`sample_limit_path`] builds a whole path from coalescing blue Brownian
//!   paths killed by a black one.
//! * [`running_max_bm`] covers `rho = 0`, where the process is the running
//!   maximum of a Brownian motion.

mod brownian;
mod dual;
mod fidi;
mod io;
mod params;
mod path;
mod runmax;

use thiserror::Error;

pub use brownian::CoupledBrownian;
pub use dual::{sample_limit_path, HittingProfile, LimitPathConfig, LimitPathSample};
pub use fidi::{sample_fidi, FidiRequest, FidiSample};
pub use io::{write_hitting_csv, write_sampled_csv, write_step_csv, LimitMeta};
pub use params::DiffusionParams;
pub use path::{coalesce, reflect, Coalesced, SampledPath, StepFunction};
pub use runmax::running_max_bm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitError {
    #[error("path has no grid points")]
    EmptyPath,
    #[error("path {index} starts after path {previous}; starts must be nonincreasing")]
    UnorderedStarts { index: usize, previous: usize },
    #[error("paths are on different grids")]
    GridMismatch,
    #[error("grid step {dx} exceeds the guard {limit} for the smallest query time")]
    GridTooCoarse { dx: f64, limit: f64 },
    #[error("rho must lie in (0, 1] for the path sampler, got {0}; use the running maximum for rho = 0")]
    InvalidRho(f64),
    #[error("level refinement stopped at {levels} levels before reaching the requested resolution")]
    RefinementBudgetExceeded { levels: usize },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// Number of grid steps covering `[0, x]`, tolerating round-off in `x / dx`.
pub(crate) fn steps_for(x: f64, dx: f64) -> usize {
    let q = x / dx;
    let r = q.round();
    if (q - r).abs() < 1e-6 * r.max(1.0) {
        r as usize
    } else {
        q.ceil() as usize
    }
}
