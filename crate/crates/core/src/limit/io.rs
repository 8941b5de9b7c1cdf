use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::dual::HittingProfile;
use super::path::{SampledPath, StepFunction};

/// Sidecar metadata for limit-process outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitMeta {
    pub mode: String,
    pub rho: f64,
    pub xmax: f64,
    pub dx: f64,
    pub seed: u64,
    /// Relative gap between sampled levels around jumps; `None` for modes
    /// without a level set.
    pub level_resolution: Option<f64>,
    pub refinement_budget: Option<usize>,
    pub under_resolved: bool,
}

/// Jump list `x,value`; the first row is the value at the start.
pub fn write_step_csv<W: Write>(step: &StepFunction, mut out: W) -> io::Result<()> {
    writeln!(out, "x,value")?;
    writeln!(out, "{},{}", step.start, step.initial)?;
    for &(x, v) in &step.jumps {
        writeln!(out, "{x},{v}")?;
    }
    Ok(())
}

/// Grid values `x,value`.
pub fn write_sampled_csv<W: Write>(path: &SampledPath, mut out: W) -> io::Result<()> {
    writeln!(out, "x,value")?;
    for (i, v) in path.values.iter().enumerate() {
        writeln!(out, "{},{v}", path.x(i))?;
    }
    Ok(())
}

/// `y,T_y`, with `inf` for levels that outlive the horizon.
pub fn write_hitting_csv<W: Write>(profile: &HittingProfile, mut out: W) -> io::Result<()> {
    writeln!(out, "y,T_y")?;
    for (y, t) in profile.levels.iter().zip(&profile.times) {
        writeln!(out, "{y},{t}")?;
    }
    Ok(())
}
