use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    /// Every particle carries zero weight.
    #[error("degenerate particle system: {0}")]
    DegenerateSystem(String),

    /// The ESS is already below the target at the current temperature.
    #[error("temperature ladder stalled at lambda = {lambda}: ESS {ess:.3} below target {target:.3}")]
    LadderStall { lambda: f64, ess: f64, target: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
