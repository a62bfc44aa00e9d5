//! G-metric spaces, λ-sequence and α-series certificates, contraction
//! conditions for countable families of self-maps, and Picard-type iteration
//! towards their common fixed point.
//!
//! Built-in spaces are complete by construction (closed intervals and boxes
//! with the usual metrics, and finite tables); completeness of user-supplied
//! spaces is assumed, not checked.

// NaN must fail every bound, so comparisons are written negated.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contractions;
pub mod error;
pub mod gmetric;
pub mod oracle;
pub mod sampling;
pub mod sequences;
pub mod solver;
pub mod tolerances;

pub use contractions::{CoefficientSchedule, MappingFamily, Mode, PhiFunction, SelfMap};
pub use error::{Error, Result};
pub use gmetric::{Carrier, GSpace, Metric, Point};
pub use sequences::{LambdaCertificate, RealSequence, Verdict};
pub use solver::{ConvergenceCertificate, FixedPointResult, Hypotheses, OrbitTrace, Problem};
