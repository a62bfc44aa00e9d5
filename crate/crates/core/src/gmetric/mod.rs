//! G-metric spaces and their axiom audits.

mod axioms;
mod io;
mod space;

pub use axioms::{check_axioms, check_symmetric, Axiom, AxiomReport, AxiomViolation, SymmetryReport};
pub use io::{load_finite_space, save_finite_space, FiniteSpaceFile};
pub use space::{max_pairing, Carrier, FiniteTable, GFn, GSpace, Metric, MetricFn, Point};
