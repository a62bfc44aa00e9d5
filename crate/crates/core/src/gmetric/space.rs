use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of a carrier.
///
/// Finite carriers use `Index`; continuous carriers use `Real` (intervals)
/// or `Vector` (boxes in R^d). Equality is exact value equality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Index(usize),
    Real(f64),
    Vector(Vec<f64>),
}

impl Point {
    pub fn as_index(&self) -> Option<usize> {
        match self {
            Point::Index(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Point::Real(x) => Some(*x),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "#{i}"),
            Point::Real(x) => write!(f, "{x}"),
            Point::Vector(v) => {
                write!(f, "(")?;
                for (n, x) in v.iter().enumerate() {
                    if n > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// The underlying set X.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Carrier {
    Finite { labels: Vec<String> },
    Interval { lo: f64, hi: f64 },
    Cube { lo: f64, hi: f64, dim: usize },
}

impl Carrier {
    pub fn finite(n: usize) -> Self {
        Carrier::Finite {
            labels: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::param(
                "interval",
                format!("[{lo}, {hi}] is not a bounded interval"),
            ));
        }
        Ok(Carrier::Interval { lo, hi })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Carrier::Finite { .. })
    }

    /// Number of points for finite carriers.
    pub fn size(&self) -> Option<usize> {
        match self {
            Carrier::Finite { labels } => Some(labels.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Carrier::Finite { labels } => labels.is_empty(),
            Carrier::Interval { lo, hi } => lo > hi,
            Carrier::Cube { lo, hi, dim } => lo > hi || *dim == 0,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Carrier::Finite { labels }, Point::Index(i)) => *i < labels.len(),
            (Carrier::Interval { lo, hi }, Point::Real(x)) => *lo <= *x && *x <= *hi,
            (Carrier::Cube { lo, hi, dim }, Point::Vector(v)) => {
                v.len() == *dim && v.iter().all(|x| *lo <= *x && *x <= *hi)
            }
            _ => false,
        }
    }

    /// All points of a finite carrier in index order.
    pub fn points(&self) -> Option<Vec<Point>> {
        self.size().map(|n| (0..n).map(Point::Index).collect())
    }

    /// Draws a point uniformly from the carrier.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Carrier::Finite { labels } => Point::Index(rng.gen_range(0..labels.len())),
            Carrier::Interval { lo, hi } => Point::Real(uniform(rng, *lo, *hi)),
            Carrier::Cube { lo, hi, dim } => Point::Vector((0..*dim).map(|_| uniform(rng, *lo, *hi)).collect()),
        }
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

pub type MetricFn = Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>;
pub type GFn = Arc<dyn Fn(&Point, &Point, &Point) -> f64 + Send + Sync>;

/// A pairwise distance used to build G-metrics.
#[derive(Clone)]
pub enum Metric {
    /// `|x - y|` on reals.
    Abs,
    /// Euclidean norm on vectors.
    Euclidean,
    /// Sup norm on vectors.
    Chebyshev,
    /// `0` on equal points, `1` otherwise.
    Discrete,
    /// Dense `n x n` distance matrix over index points.
    Table {
        n: usize,
        d: Arc<[f64]>,
    },
    Custom(MetricFn),
}

impl Metric {
    pub fn table(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::Table(format!(
                "metric table needs {} entries, got {}",
                n * n,
                d.len()
            )));
        }
        Ok(Metric::Table { n, d: d.into() })
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        let mismatch = || Error::Domain(format!("metric cannot compare {x} and {y}"));
        Ok(match self {
            Metric::Abs => (x.as_real().ok_or_else(mismatch)? - y.as_real().ok_or_else(mismatch)?).abs(),
            Metric::Euclidean | Metric::Chebyshev => {
                let (Point::Vector(a), Point::Vector(b)) = (x, y) else {
                    return Err(mismatch());
                };
                if a.len() != b.len() {
                    return Err(mismatch());
                }
                let diffs = a.iter().zip(b).map(|(p, q)| (p - q).abs());
                if matches!(self, Metric::Euclidean) {
                    diffs.map(|t| t * t).sum::<f64>().sqrt()
                } else {
                    diffs.fold(0.0, f64::max)
                }
            }
            Metric::Discrete => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            Metric::Table { n, d } => {
                let (i, j) = (x.as_index().ok_or_else(mismatch)?, y.as_index().ok_or_else(mismatch)?);
                if i >= *n || j >= *n {
                    return Err(mismatch());
                }
                d[i * n + j]
            }
            Metric::Custom(f) => f(x, y),
        })
    }

    fn name(&self) -> String {
        match self {
            Metric::Abs => "abs".into(),
            Metric::Euclidean => "euclidean".into(),
            Metric::Chebyshev => "chebyshev".into(),
            Metric::Discrete => "discrete".into(),
            Metric::Table { n, d } => format!("table{n}{:?}", &d[..]),
            Metric::Custom(f) => format!("custom@{:p}", Arc::as_ptr(f)),
        }
    }
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// The "max pairing" `m(x, y) = max{x, y}` on nonnegative reals.
///
/// Not a metric (`m(x, x) = x`), so it is deliberately not a [`Metric`]
/// variant; it only feeds the λ-sequence checks on rate sequences.
pub fn max_pairing(x: f64, y: f64) -> f64 {
    x.max(y)
}

/// G values of a finite carrier, stored once per multiset `{i, j, k}`.
///
/// Storage is keyed by the sorted triple, so full argument symmetry holds by
/// construction.
#[derive(Clone, PartialEq)]
pub struct FiniteTable {
    n: usize,
    slot: Vec<u32>,
    values: Vec<f64>,
}

impl FiniteTable {
    /// Number of carrier points.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of sorted triples `i <= j <= k` over `n` points.
    pub fn slot_count(n: usize) -> usize {
        n * (n + 1) * (n + 2) / 6
    }

    fn layout(n: usize) -> Vec<u32> {
        let mut slot = vec![0u32; n * n * n];
        let mut next = 0u32;
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let s = next;
                    next += 1;
                    for (a, b, c) in permutations(i, j, k) {
                        slot[(a * n + b) * n + c] = s;
                    }
                }
            }
        }
        slot
    }

    /// Builds a table from a function evaluated on sorted triples only.
    pub fn from_sorted_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(Self::slot_count(n));
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    values.push(f(i, j, k));
                }
            }
        }
        Self::from_values(n, values)
    }

    /// Builds a table from values listed in sorted-triple order.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != Self::slot_count(n) {
            return Err(Error::Table(format!(
                "{} values for {} sorted triples",
                values.len(),
                Self::slot_count(n)
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Table(format!("value {v} is not a finite nonnegative real")));
        }
        Ok(FiniteTable {
            n,
            slot: Self::layout(n),
            values,
        })
    }

    /// Loads a dense `n^3` table, checking that all argument permutations agree.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n * n {
            return Err(Error::Table(format!(
                "dense table needs {} entries, got {}",
                n * n * n,
                dense.len()
            )));
        }
        let at = |a: usize, b: usize, c: usize| dense[(a * n + b) * n + c];
        Self::from_sorted_fn(n, at).and_then(|t| {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if at(i, j, k) != t.get(i, j, k) {
                            return Err(Error::Table(format!(
                                "G4 violated: G({i},{j},{k}) = {} but the sorted triple holds {}",
                                at(i, j, k),
                                t.get(i, j, k)
                            )));
                        }
                    }
                }
            }
            Ok(t)
        })
    }

    /// Loads `[i, j, k, value]` entries in any argument order.
    ///
    /// Every sorted triple must be covered; repeated triples (in any order)
    /// must agree.
    pub fn from_entries(n: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let slot = Self::layout(n);
        let mut values: Vec<Option<f64>> = vec![None; Self::slot_count(n)];
        for &(i, j, k, v) in entries {
            if i >= n || j >= n || k >= n {
                return Err(Error::Table(format!(
                    "entry ({i},{j},{k}) outside a carrier of {n} points"
                )));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Table(format!(
                    "entry ({i},{j},{k}) has value {v}; G is nonnegative"
                )));
            }
            let s = slot[(i * n + j) * n + k] as usize;
            match values[s] {
                Some(old) if old != v => {
                    return Err(Error::Table(format!(
                        "G4 violated: ({i},{j},{k}) given both {old} and {v}"
                    )))
                }
                _ => values[s] = Some(v),
            }
        }
        let mut out = Vec::with_capacity(values.len());
        let mut s = 0;
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    out.push(values[s].ok_or_else(|| Error::Table(format!("missing triple ({i},{j},{k})")))?);
                    s += 1;
                }
            }
        }
        Self::from_values(n, out)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.n;
        self.values[self.slot[(i * n + j) * n + k] as usize]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Sorted-triple entries `(i, j, k, value)` with `i <= j <= k`.
    pub fn entries(&self) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.values.len());
        let mut s = 0;
        for i in 0..self.n {
            for j in i..self.n {
                for k in j..self.n {
                    out.push((i, j, k, self.values[s]));
                    s += 1;
                }
            }
        }
        out
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl fmt::Debug for FiniteTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteTable{{n: {}, values: {:?}}}", self.n, self.values)
    }
}

pub(crate) fn permutations(i: usize, j: usize, k: usize) -> [(usize, usize, usize); 6] {
    [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)]
}

#[derive(Clone)]
enum GKind {
    Table(FiniteTable),
    Sum(Metric),
    Max(Metric),
    Custom(GFn),
}

/// A carrier together with a ternary distance G.
///
/// Finite carriers always hold a materialized [`FiniteTable`]. The built-in
/// continuous spaces are complete (closed bounded sets with a norm-induced
/// G), which is assumed rather than checked.
#[derive(Clone)]
pub struct GSpace {
    carrier: Carrier,
    kind: GKind,
}

impl GSpace {
    pub fn from_table(labels: Vec<String>, table: FiniteTable) -> Result<Self> {
        if labels.len() != table.len() {
            return Err(Error::Table(format!(
                "{} labels for a table over {} points",
                labels.len(),
                table.len()
            )));
        }
        Ok(GSpace {
            carrier: Carrier::Finite { labels },
            kind: GKind::Table(table),
        })
    }

    /// `G(x, y, z) = d(x, y) + d(y, z) + d(z, x)`.
    pub fn from_metric_sum(carrier: Carrier, d: Metric) -> Result<Self> {
        Self::from_metric(carrier, d, false)
    }

    /// `G(x, y, z) = max{d(x, y), d(y, z), d(z, x)}`.
    pub fn from_metric_max(carrier: Carrier, d: Metric) -> Result<Self> {
        Self::from_metric(carrier, d, true)
    }

    fn from_metric(carrier: Carrier, d: Metric, max: bool) -> Result<Self> {
        if let Carrier::Finite { labels } = &carrier {
            let n = labels.len();
            let mut err = None;
            let mut dist = |a: usize, b: usize| match d.distance(&Point::Index(a), &Point::Index(b)) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            };
            let table = FiniteTable::from_sorted_fn(n, |i, j, k| {
                let (a, b, c) = (dist(i, j), dist(j, k), dist(k, i));
                if max {
                    a.max(b).max(c)
                } else {
                    a + b + c
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            return Self::from_table(labels.clone(), table?);
        }
        let kind = if max { GKind::Max(d) } else { GKind::Sum(d) };
        Ok(GSpace { carrier, kind })
    }

    /// `G = 0` iff all three points coincide, `1` otherwise.
    pub fn discrete_g(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        let table = FiniteTable::from_sorted_fn(n, |i, _, k| if i == k { 0.0 } else { 1.0 })?;
        Self::from_table(labels, table)
    }

    /// An arbitrary G on a continuous carrier. No axioms are assumed.
    pub fn custom(carrier: Carrier, g: GFn) -> Result<Self> {
        if carrier.is_finite() {
            return Err(Error::Domain("finite carriers take a FiniteTable".into()));
        }
        Ok(GSpace {
            carrier,
            kind: GKind::Custom(g),
        })
    }

    /// Sum construction on an interval with `|x - y|`.
    pub fn sum_abs(lo: f64, hi: f64) -> Result<Self> {
        Self::from_metric_sum(Carrier::interval(lo, hi)?, Metric::Abs)
    }

    /// Max construction on an interval with `|x - y|`.
    pub fn max_abs(lo: f64, hi: f64) -> Result<Self> {
        Self::from_metric_max(Carrier::interval(lo, hi)?, Metric::Abs)
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn table(&self) -> Option<&FiniteTable> {
        match &self.kind {
            GKind::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.carrier.contains(p)
    }

    pub fn ensure_contains(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(format!("point {p} is outside the carrier")))
        }
    }

    /// Evaluates G after checking that all three points lie in the carrier.
    pub fn evaluate_g(&self, x: &Point, y: &Point, z: &Point) -> Result<f64> {
        for p in [x, y, z] {
            self.ensure_contains(p)?;
        }
        self.g(x, y, z)
    }

    /// Evaluates G; points are assumed to be in the carrier.
    pub(crate) fn g(&self, x: &Point, y: &Point, z: &Point) -> Result<f64> {
        match &self.kind {
            GKind::Table(t) => match (x, y, z) {
                (Point::Index(i), Point::Index(j), Point::Index(k)) => Ok(t.get(*i, *j, *k)),
                _ => Err(Error::Domain("finite space expects index points".into())),
            },
            GKind::Sum(d) => Ok(d.distance(x, y)? + d.distance(y, z)? + d.distance(z, x)?),
            GKind::Max(d) => Ok(d.distance(x, y)?.max(d.distance(y, z)?).max(d.distance(z, x)?)),
            GKind::Custom(f) => Ok(f(x, y, z)),
        }
    }

    /// Stable description used for fingerprints and reports.
    pub fn describe(&self) -> String {
        let carrier = match &self.carrier {
            Carrier::Finite { labels } => format!("finite{labels:?}"),
            Carrier::Interval { lo, hi } => format!("[{lo},{hi}]"),
            Carrier::Cube { lo, hi, dim } => format!("[{lo},{hi}]^{dim}"),
        };
        let kind = match &self.kind {
            GKind::Table(t) => format!("{t:?}"),
            GKind::Sum(d) => format!("sum({d:?})"),
            GKind::Max(d) => format!("max({d:?})"),
            GKind::Custom(f) => format!("custom@{:p}", Arc::as_ptr(f)),
        };
        format!("{carrier}:{kind}")
    }
}

impl fmt::Debug for GSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Point {
        Point::Real(x)
    }

    #[test]
    fn sum_construction_values() {
        let s = GSpace::sum_abs(-10.0, 10.0).unwrap();
        assert_eq!(s.evaluate_g(&r(0.0), &r(1.0), &r(2.0)).unwrap(), 4.0);
        assert_eq!(s.evaluate_g(&r(1.0), &r(1.0), &r(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn max_construction_values() {
        let s = GSpace::max_abs(-10.0, 10.0).unwrap();
        assert_eq!(s.evaluate_g(&r(0.0), &r(1.0), &r(3.0)).unwrap(), 3.0);
    }

    #[test]
    fn discrete_values() {
        let s = GSpace::discrete_g(vec!["p".into(), "q".into()]).unwrap();
        let (p, q) = (Point::Index(0), Point::Index(1));
        assert_eq!(s.evaluate_g(&p, &p, &q).unwrap(), 1.0);
        assert_eq!(s.evaluate_g(&p, &q, &q).unwrap(), 1.0);
        assert_eq!(s.evaluate_g(&q, &q, &q).unwrap(), 0.0);
    }

    #[test]
    fn outside_carrier_is_domain_error() {
        let s = GSpace::sum_abs(0.0, 1.0).unwrap();
        assert!(matches!(s.evaluate_g(&r(0.0), &r(2.0), &r(0.5)), Err(Error::Domain(_))));
        let d = GSpace::discrete_g(vec!["a".into()]).unwrap();
        assert!(matches!(
            d.evaluate_g(&Point::Index(0), &Point::Index(1), &Point::Index(0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            d.evaluate_g(&Point::Index(0), &r(0.0), &Point::Index(0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn finite_metric_is_materialized() {
        // path metric 0 - 1 - 2
        let d = Metric::table(3, vec![0., 1., 2., 1., 0., 1., 2., 1., 0.]).unwrap();
        let s = GSpace::from_metric_sum(Carrier::finite(3), d).unwrap();
        assert!(s.table().is_some());
        assert_eq!(
            s.evaluate_g(&Point::Index(2), &Point::Index(0), &Point::Index(1))
                .unwrap(),
            4.0
        );
    }

    #[test]
    fn table_loaders_enforce_g4_and_coverage() {
        let mut dense = vec![0.0; 8];
        dense[1] = 1.0; // (0,0,1)
        dense[2] = 1.0; // (0,1,0)
        dense[4] = 1.0; // (1,0,0)
        dense[3] = 1.0; // (0,1,1)
        dense[5] = 1.0; // (1,0,1)
        dense[6] = 1.0; // (1,1,0)
        assert!(FiniteTable::from_dense(2, &dense).is_ok());
        dense[6] = 2.0;
        assert!(matches!(FiniteTable::from_dense(2, &dense), Err(Error::Table(_))));

        let ok = [(0, 0, 0, 0.0), (1, 1, 1, 0.0), (1, 0, 0, 2.0), (0, 1, 1, 1.0)];
        let t = FiniteTable::from_entries(2, &ok).unwrap();
        assert_eq!(t.get(0, 1, 0), 2.0);
        assert!(FiniteTable::from_entries(2, &ok[..3]).is_err());
        let clash = [
            (0, 0, 0, 0.0),
            (1, 1, 1, 0.0),
            (0, 0, 1, 2.0),
            (0, 1, 0, 3.0),
            (0, 1, 1, 1.0),
        ];
        assert!(FiniteTable::from_entries(2, &clash).is_err());
        let neg = [(0, 0, 0, 0.0), (1, 1, 1, 0.0), (0, 0, 1, -1.0), (0, 1, 1, 1.0)];
        assert!(FiniteTable::from_entries(2, &neg).is_err());
    }

    #[test]
    fn permutation_invariance_of_table() {
        let t = FiniteTable::from_sorted_fn(4, |i, j, k| (i + 2 * j + 3 * k) as f64).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let v = t.get(i, j, k);
                    for (a, b, c) in permutations(i, j, k) {
                        assert_eq!(t.get(a, b, c), v);
                    }
                }
            }
        }
    }
}
