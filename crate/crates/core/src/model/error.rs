use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArwError {
    #[error("illegal toppling at site {site}: the site holds no active particle")]
    ToppleIllegal { site: i64 },
    #[error("site {site} lies outside the configuration support [{left}, {right}]")]
    SiteOutsideSupport { site: i64, left: i64, right: i64 },
    #[error("toppling budget of {cap} exceeded")]
    ToppleBudgetExceeded { cap: u64 },
    #[error("invalid distribution parameters: {0}")]
    InvalidDistributionParams(String),
    #[error("sleep probability must lie in (0, 1), got {0}")]
    InvalidZeta(f64),
    #[error("not critical: zeta = {zeta} but lambda/(1+lambda) = {expected} (tolerance {tolerance})")]
    CriticalityViolation {
        zeta: f64,
        expected: f64,
        tolerance: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty domain [{left}, {right}]")]
    EmptyDomain { left: i64, right: i64 },
}
