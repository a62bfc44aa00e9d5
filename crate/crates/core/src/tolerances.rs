//! Comparison tolerances used across the crate.
//!
//! Finite tables are compared exactly. Everything evaluated through floating
//! point formulas on continuous carriers uses the relative slacks below.

/// Relative tolerance for permutation agreement of G on continuous carriers.
pub const TAU_G: f64 = 1e-9;

/// Relative tolerance for homogeneity checks of a candidate Φ function.
pub const TAU_PHI: f64 = 1e-9;

/// Relative slack for `left <= right` inequality checks.
pub const TAU_INEQ: f64 = 1e-12;

/// Residual acceptance for a common fixed point candidate.
pub const TAU_FIX: f64 = 1e-8;

/// Two candidates closer than this (in `G(u, v, v)`) are the same point.
pub const TAU_SAME: f64 = 1e-6;

/// Tolerance for `G(x,y,y) = G(x,x,y)` on continuous carriers.
pub const TAU_SYM: f64 = 1e-9;

/// Default truncation bound for countable families and schedules.
pub const DEFAULT_INDEX_CAP: usize = 64;

/// Consecutive small steps required before an orbit counts as converged.
pub const STOP_WINDOW: usize = 3;

/// `left <= right` up to `TAU_INEQ * (1 + |right|)`.
#[inline]
pub fn leq(left: f64, right: f64) -> bool {
    left <= right + TAU_INEQ * (1.0 + right.abs())
}

/// Relative closeness with scale `1 + max(|a|, |b|)`.
#[inline]
pub fn close(a: f64, b: f64, tau: f64) -> bool {
    (a - b).abs() <= tau * (1.0 + a.abs().max(b.abs()))
}
