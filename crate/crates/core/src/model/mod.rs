//! Discrete Activated Random Walk: site states, configurations, instruction
//! fields and stabilization by legal topplings.
//!
//! Jumps are totally asymmetric (`x -> x + 1`). Two fields and one
//! configuration determine everything: by the Abelian property, the stable
//! configuration and the odometer do not depend on the order in which legal
//! topplings are performed.

mod config;
mod error;
mod eta;
mod instructions;
mod params;
mod site;
mod stabilize;

pub use config::Configuration;
pub use error::ArwError;
pub use eta::{sample_eta, EtaDistribution, EtaKind, EtaSampler};
pub use instructions::{Instruction, InstructionField};
pub use params::{critical_density, ModelParams, CRITICALITY_TOLERANCE};
pub use site::SiteState;
pub use stabilize::{
    stabilize, topple, LeftToRight, Odometer, RightmostFirst, TopplingPolicy, UniformRandom,
    DEFAULT_TOPPLE_BUDGET,
};
