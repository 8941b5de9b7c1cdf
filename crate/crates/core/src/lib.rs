pub mod checks;
pub mod flow;
pub mod limit;
pub mod model;
pub mod rng;
pub mod stats;
