use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Every variant is a domain error: the inputs were well-formed values but
/// violate a precondition of the requested computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("distribution needs at least one atom")]
    EmptyDistribution,

    #[error("probability {prob} at value {value} is not strictly positive")]
    NonPositiveProbability { value: f64, prob: f64 },

    #[error("non-finite value {0} in input")]
    NonFiniteValue(f64),

    #[error("probabilities sum to {sum}, expected 1 within {tolerance:e}")]
    ProbabilitySum { sum: f64, tolerance: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("Kusuoka mixture needs at least one atom")]
    EmptyMixture,

    #[error("weight {weight} at level {alpha} is not strictly positive")]
    NonPositiveWeight { alpha: f64, weight: f64 },

    #[error("constructed spectral function integrates to {integral}, expected 1")]
    Normalization { integral: f64 },

    #[error("beta grid must be sorted ascending")]
    UnsortedLevels,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T, E = RiskError> = std::result::Result<T, E>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    range: &'static str,
    ok: bool,
) -> Result<()> {
    if ok && !value.is_nan() {
        Ok(())
    } else {
        Err(RiskError::OutOfRange { name, value, range })
    }
}
