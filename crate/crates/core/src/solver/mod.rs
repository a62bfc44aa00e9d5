//! Picard-type iteration for families of self-maps, convergence
//! certificates, and the fixed point checks built on them.

mod certificate;
mod diagnostics;
mod orbit;
mod solve;

pub use certificate::{apriori_vs_observed, orbit_table, ConvergenceCertificate, SoundnessReport, TripleCheck};
pub use diagnostics::{cauchy_diagnostic, limit_diagnostic, LimitReport};
pub use orbit::{picard_orbit, picard_orbit_power, OrbitTrace, Termination, TripleSample};
pub use solve::{
    fixed_point_transfer, solve_common_fixed_point, uniqueness_probe, FixedPointResult, Hypotheses, Problem, Solution,
    SolveOptions, TransferReport, UniquenessReport, VerifyOptions,
};
