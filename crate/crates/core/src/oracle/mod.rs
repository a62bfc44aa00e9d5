//! Exhaustive ground truth on tiny finite instances.

mod enumerate;
mod sweep;

pub use enumerate::{
    candidate_count, enumerate_families, enumerate_instances, enumerate_schedules, enumerate_tables, EnumerationConfig,
    FiniteInstance, InstanceRecord, InstanceSchedule, ENUMERATION_CAP, MAX_CARRIER, MAX_FAMILY,
};
pub use sweep::{
    brute_force_common_fixed_points, theorem_sweep, CarrierCounts, RedFlag, RedFlagKind, SweepOptions, SweepReport,
};
