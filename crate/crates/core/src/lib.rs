//! Higher-order risk measures, spectral mixtures, expectiles and stochastic
//! dominance checks for finite discrete distributions.

pub mod cli;
pub mod distribution;
pub mod dominance;
pub mod error;
pub mod expectile;
pub mod higher_order;
pub mod optimize;
pub mod oracle;
pub mod spectral;

pub use distribution::{DiscreteDistribution, Side, Summary};
pub use error::{Result, RiskError};
pub use spectral::{avar, spectral_risk, CollapseInfo, KusuokaMixture, Truncation};
pub use expectile::{
    expectile, expectile_dual_norm, expectile_kusuoka, higher_order_expectile, ExpectileParams,
};
pub use higher_order::{
    higher_order_risk, higher_order_spectral_closed, minimizer_curve, norm_value, risk_derivative,
    survival_representation, weighted_value, CurvePoint, Derivative, HigherOrderResult, NormSpec,
};
pub use dominance::{
    critical_levels, first_order, integer_order_integrals, order_implication_check, p_order,
    risk_profile_order, spectral_order, verify_dominance, CriticalLevels, DominanceVerdict,
    Evidence, Outcome,
};
