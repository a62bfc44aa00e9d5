//! The class Φ, coefficient schedules, mapping families, contraction rates
//! and the contraction-condition samplers.

mod condition;
mod family;
mod phi;
mod rates;
mod schedule;

pub use condition::{
    check_condition_abbas, check_condition_vetro, ConditionReport, ConditionViolation, HypothesisBounds,
};
pub use family::{power_family, MappingFamily, PointFn, SelfMap};
pub use phi::{phi_membership_check, ContinuityFit, PhiClause, PhiFunction, PhiReport, PhiViolation, ScalarFn};
pub use rates::{r_abbas, r_abbas_phi, r_vetro, rate_sequence, AbbasThreshold, Mode};
pub use schedule::{schedule_from_points, Coefficient, CoefficientSchedule, Coefficients, IndexFn};
