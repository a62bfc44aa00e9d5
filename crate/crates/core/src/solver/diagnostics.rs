use serde::{Deserialize, Serialize};

use super::orbit::OrbitTrace;
use crate::error::{Error, Result};
use crate::gmetric::{GSpace, Point};

/// Smallest `N` such that `G(x_n, x_m, x_m) < eps` for every recorded
/// `n, m >= N`, or `None` when no `N` leaving at least two points works.
pub fn cauchy_diagnostic(space: &GSpace, trace: &OrbitTrace, eps: f64) -> Result<Option<usize>> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("{eps} is not positive")));
    }
    let pts = &trace.points;
    let len = pts.len();
    if len < 2 {
        return Err(Error::param("trace", "needs at least two points"));
    }
    // bad[n]: some m >= n with G(x_n, x_m, x_m) >= eps or G(x_m, x_n, x_n) >= eps
    let mut answer = None;
    for n in (0..len - 1).rev() {
        let mut ok = true;
        for m in n + 1..len {
            if space.g(&pts[n], &pts[m], &pts[m])? >= eps || space.g(&pts[m], &pts[n], &pts[n])? >= eps {
                ok = false;
                break;
            }
        }
        if !ok {
            break;
        }
        answer = Some(n);
    }
    Ok(answer)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    /// `G(x, x_n, x_n)` along the orbit.
    pub toward: Vec<f64>,
    /// `G(x_n, x, x)` along the orbit.
    pub away: Vec<f64>,
    /// First `N` after which both sequences stay below `eps`.
    pub settles_at: Option<usize>,
}

impl LimitReport {
    pub fn converges(&self) -> bool {
        self.settles_at.is_some()
    }
}

/// Numerical check that `x` is a limit of the orbit in both senses
/// `G(x, x_n, x_n) -> 0` and `G(x_n, x, x) -> 0`.
pub fn limit_diagnostic(space: &GSpace, trace: &OrbitTrace, x: &Point, eps: f64) -> Result<LimitReport> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("{eps} is not positive")));
    }
    space.ensure_contains(x)?;
    let mut toward = Vec::with_capacity(trace.len());
    let mut away = Vec::with_capacity(trace.len());
    for p in &trace.points {
        toward.push(space.g(x, p, p)?);
        away.push(space.g(p, x, x)?);
    }
    let mut settles_at = None;
    for n in (0..trace.len()).rev() {
        if toward[n] >= eps || away[n] >= eps {
            break;
        }
        settles_at = Some(n);
    }
    Ok(LimitReport {
        toward,
        away,
        settles_at,
    })
}
