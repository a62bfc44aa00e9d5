use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gmetric::{GSpace, Point};
use crate::tolerances::DEFAULT_INDEX_CAP;

pub type IndexFn = Arc<dyn Fn(usize, usize, usize) -> f64 + Send + Sync>;

/// One triple-indexed coefficient family, read as `coefficient(i, j, k)`
/// for the quantity written with `k` on the left and `i, j` on the right.
/// Indices are one-based.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    /// `G(p_i, p_j, p_k)` for a generating sequence `p`; indices past the
    /// end of `points` wrap around.
    Generated {
        space: Arc<GSpace>,
        points: Vec<Point>,
    },
    /// Explicit values with a fallback.
    Table {
        entries: BTreeMap<(usize, usize, usize), f64>,
        default: f64,
    },
    Rule(IndexFn),
}

impl Coefficient {
    pub fn value(&self, i: usize, j: usize, k: usize) -> Result<f64> {
        if i == 0 || j == 0 || k == 0 {
            return Err(Error::param("index", "coefficient indices are one-based"));
        }
        let v = match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Generated { space, points } => {
                let at = |n: usize| &points[(n - 1) % points.len()];
                space.g(at(i), at(j), at(k))?
            }
            Coefficient::Table { entries, default } => *entries.get(&(i, j, k)).unwrap_or(default),
            Coefficient::Rule(f) => f(i, j, k),
        };
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::HypothesisViolation {
                i,
                j,
                k,
                message: format!("coefficient value {v} is not a finite nonnegative real"),
            });
        }
        Ok(v)
    }

    fn describe(&self) -> String {
        match self {
            Coefficient::Constant(c) => format!("{c}"),
            Coefficient::Generated { space, points } => format!("G[{}]{points:?}", space.describe()),
            Coefficient::Table { entries, default } => format!("table{entries:?}|{default}"),
            Coefficient::Rule(f) => format!("rule@{:p}", Arc::as_ptr(f)),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Θ and Δ weights, plus Λ for the three-term (mixed-distance) conditions.
#[derive(Clone, Debug)]
pub struct CoefficientSchedule {
    pub theta: Coefficient,
    pub delta: Coefficient,
    pub lambda: Option<Coefficient>,
    pub index_cap: usize,
}

/// The scalar triple `(Δ, Θ, Λ)` at one index triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub delta: f64,
    pub theta: f64,
    pub lambda: f64,
}

impl CoefficientSchedule {
    /// Constant two-term schedule `(Θ, Δ)`.
    pub fn vetro_constant(theta: f64, delta: f64) -> Self {
        CoefficientSchedule {
            theta: Coefficient::Constant(theta),
            delta: Coefficient::Constant(delta),
            lambda: None,
            index_cap: DEFAULT_INDEX_CAP,
        }
    }

    /// Constant three-term schedule with `Δ = a`, `Θ = b`, `Λ = c`.
    pub fn abbas_constant(a: f64, b: f64, c: f64) -> Self {
        CoefficientSchedule {
            theta: Coefficient::Constant(b),
            delta: Coefficient::Constant(a),
            lambda: Some(Coefficient::Constant(c)),
            index_cap: DEFAULT_INDEX_CAP,
        }
    }

    pub fn with_index_cap(mut self, index_cap: usize) -> Self {
        self.index_cap = index_cap;
        self
    }

    pub fn has_lambda(&self) -> bool {
        self.lambda.is_some()
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> Result<Coefficients> {
        Ok(Coefficients {
            delta: self.delta.value(i, j, k)?,
            theta: self.theta.value(i, j, k)?,
            lambda: match &self.lambda {
                Some(l) => l.value(i, j, k)?,
                None => 0.0,
            },
        })
    }

    pub fn describe(&self) -> String {
        format!(
            "theta={:?};delta={:?};lambda={:?};cap={}",
            self.theta, self.delta, self.lambda, self.index_cap
        )
    }
}

/// Builds `Δ = G(a_i, a_j, a_k)`, `Θ = G(b_i, b_j, b_k)`, `Λ = G(c_i, c_j, c_k)`
/// from generating sequences, each realized up to `index_cap`.
pub fn schedule_from_points(
    space: &GSpace,
    a: impl Fn(usize) -> Point,
    b: impl Fn(usize) -> Point,
    c: impl Fn(usize) -> Point,
    index_cap: usize,
) -> Result<CoefficientSchedule> {
    if index_cap == 0 {
        return Err(Error::param("index_cap", "must be at least 1"));
    }
    let space = Arc::new(space.clone());
    let realize = |gen: &dyn Fn(usize) -> Point| -> Result<Coefficient> {
        let points: Vec<Point> = (1..=index_cap).map(gen).collect();
        for p in &points {
            space.ensure_contains(p)?;
        }
        Ok(Coefficient::Generated {
            space: Arc::clone(&space),
            points,
        })
    };
    Ok(CoefficientSchedule {
        delta: realize(&a)?,
        theta: realize(&b)?,
        lambda: Some(realize(&c)?),
        index_cap,
    })
}
