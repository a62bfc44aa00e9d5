use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling;
use crate::tolerances::{close, TAU_PHI};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum PhiKind {
    Identity,
    /// `t -> c t`
    Scale(f64),
    /// `t -> t^e`
    Power(f64),
    /// `t -> c F(t)`
    Scaled(Arc<PhiFunction>, f64),
    Custom(String, ScalarFn),
}

/// A candidate member of the class Φ with a declared homogeneity degree.
#[derive(Clone)]
pub struct PhiFunction {
    kind: PhiKind,
    degree: f64,
}

impl PhiFunction {
    pub fn identity() -> Self {
        PhiFunction {
            kind: PhiKind::Identity,
            degree: 1.0,
        }
    }

    pub fn scale(c: f64) -> Self {
        PhiFunction {
            kind: PhiKind::Scale(c),
            degree: 1.0,
        }
    }

    /// `t -> t^e`, degree `e`.
    pub fn power(e: f64) -> Self {
        PhiFunction {
            kind: PhiKind::Power(e),
            degree: e,
        }
    }

    /// `t -> t^(1/q)`, degree `1/q`.
    pub fn root(q: f64) -> Self {
        Self::power(1.0 / q)
    }

    /// An arbitrary function with a declared degree; nothing is assumed.
    pub fn custom(name: impl Into<String>, degree: f64, f: ScalarFn) -> Self {
        PhiFunction {
            kind: PhiKind::Custom(name.into(), f),
            degree,
        }
    }

    /// Returns `t -> c F(t)` with the same declared degree.
    pub fn scaled(&self, c: f64) -> Self {
        PhiFunction {
            kind: PhiKind::Scaled(Arc::new(self.clone()), c),
            degree: self.degree,
        }
    }

    /// Same function, different declared degree.
    pub fn with_degree(mut self, degree: f64) -> Self {
        self.degree = degree;
        self
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, PhiKind::Identity)
    }

    #[inline]
    pub fn apply(&self, t: f64) -> f64 {
        match &self.kind {
            PhiKind::Identity => t,
            PhiKind::Scale(c) => c * t,
            PhiKind::Power(e) => t.powf(*e),
            PhiKind::Scaled(f, c) => c * f.apply(t),
            PhiKind::Custom(_, f) => f(t),
        }
    }

    pub fn describe(&self) -> String {
        let body = match &self.kind {
            PhiKind::Identity => "identity".to_string(),
            PhiKind::Scale(c) => format!("scale:{c}"),
            PhiKind::Power(e) => format!("power:{e}"),
            PhiKind::Scaled(f, c) => format!("{c}*({})", f.describe()),
            PhiKind::Custom(name, f) => format!("{name}@{:p}", Arc::as_ptr(f)),
        };
        format!("{body};s={}", self.degree)
    }
}

impl fmt::Debug for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiClause {
    ZeroSet,
    NonDecreasing,
    SubAdditive,
    Homogeneous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiViolation {
    pub clause: PhiClause,
    /// `[t]`, `[a, b]` or `[c, t]` depending on the clause.
    pub inputs: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Hölder-type fit `|F(t) - F(t')| <= modulus |t - t'|^exponent` over the
/// sampled points. Reported only; continuity is never failed on samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityFit {
    pub modulus: f64,
    pub exponent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiReport {
    pub member: bool,
    pub degree: f64,
    pub violations: Vec<PhiViolation>,
    pub warnings: Vec<String>,
    pub continuity: ContinuityFit,
    pub samples: usize,
}

impl PhiReport {
    pub fn first(&self, clause: PhiClause) -> Option<&PhiViolation> {
        self.violations.iter().find(|v| v.clause == clause)
    }
}

const WITNESS_CAP: usize = 8;
const GRID: usize = 16;

/// Samples the Φ clauses on `[0, domain_cap]`.
///
/// The deterministic part of the sample puts the integers `1..=cap` first and
/// then a uniform grid, so the simplest witnesses are the ones reported.
pub fn phi_membership_check(f: &PhiFunction, sample_budget: usize, domain_cap: f64, seed: u64) -> Result<PhiReport> {
    let s = f.degree();
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::param("degree_s", format!("{s} is not positive")));
    }
    if !(domain_cap > 0.0 && domain_cap.is_finite()) {
        return Err(Error::param("domain_cap", format!("{domain_cap} is not positive")));
    }

    let mut rng = sampling::rng(seed, "phi_membership");
    let mut pts: Vec<f64> = (1..=domain_cap.floor().min(GRID as f64) as usize)
        .map(|k| k as f64)
        .collect();
    pts.extend((1..=GRID).map(|k| domain_cap * k as f64 / GRID as f64));
    pts.extend((0..sample_budget).map(|_| rng.gen_range(0.0..=domain_cap)));

    let mut violations: Vec<PhiViolation> = Vec::new();
    let mut counts = [0usize; 4];
    let mut push = |v: PhiViolation| {
        let c = &mut counts[v.clause as usize];
        if *c < WITNESS_CAP {
            *c += 1;
            violations.push(v);
        }
    };

    let f0 = f.apply(0.0);
    if f0 != 0.0 {
        push(PhiViolation {
            clause: PhiClause::ZeroSet,
            inputs: vec![0.0],
            lhs: f0,
            rhs: 0.0,
        });
    }
    for &t in &pts {
        let v = f.apply(t);
        if t > 0.0 && !(v > 0.0 && v.is_finite()) {
            push(PhiViolation {
                clause: PhiClause::ZeroSet,
                inputs: vec![t],
                lhs: v,
                rhs: 0.0,
            });
        }
    }

    let mut sorted = pts.clone();
    sorted.push(0.0);
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let values: Vec<f64> = sorted.iter().map(|t| f.apply(*t)).collect();
    for w in 0..sorted.len().saturating_sub(1) {
        let (a, b) = (values[w], values[w + 1]);
        if a > b + TAU_PHI * (1.0 + b.abs()) {
            push(PhiViolation {
                clause: PhiClause::NonDecreasing,
                inputs: vec![sorted[w], sorted[w + 1]],
                lhs: a,
                rhs: b,
            });
        }
    }

    let det = pts.len() - sample_budget;
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for i in 0..det {
        for j in i..det {
            pairs.push((pts[i], pts[j]));
        }
    }
    pairs.extend((0..sample_budget).map(|_| (rng.gen_range(0.0..=domain_cap), rng.gen_range(0.0..=domain_cap))));
    for &(a, b) in &pairs {
        let lhs = f.apply(a + b);
        let rhs = f.apply(a) + f.apply(b);
        if lhs > rhs + TAU_PHI * (1.0 + rhs.abs()) {
            push(PhiViolation {
                clause: PhiClause::SubAdditive,
                inputs: vec![a, b],
                lhs,
                rhs,
            });
        }
    }

    let mut scalings: Vec<(f64, f64)> = Vec::new();
    for &c in &[0.5, 2.0, 3.0, 0.25] {
        for &t in &pts[..det] {
            scalings.push((c, t));
        }
    }
    scalings.extend((0..sample_budget).map(|_| (rng.gen_range(0.0..=4.0), rng.gen_range(0.0..=domain_cap))));
    for &(c, t) in &scalings {
        let lhs = f.apply(c * t);
        let rhs = c.powf(s) * f.apply(t);
        if !close(lhs, rhs, TAU_PHI) {
            push(PhiViolation {
                clause: PhiClause::Homogeneous,
                inputs: vec![c, t],
                lhs,
                rhs,
            });
        }
    }

    let mut warnings = Vec::new();
    if s > 1.0 {
        warnings.push(format!(
            "degree {s} > 1: sub-additivity forces F(2t) = 2^s F(t) <= 2 F(t), so only F = 0 qualifies"
        ));
    }

    Ok(PhiReport {
        member: violations.is_empty(),
        degree: s,
        violations,
        warnings,
        continuity: continuity_fit(&sorted, &values),
        samples: pts.len() + pairs.len() + scalings.len(),
    })
}

fn continuity_fit(t: &[f64], v: &[f64]) -> ContinuityFit {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for w in 0..t.len().saturating_sub(1) {
        let dt = t[w + 1] - t[w];
        let dv = (v[w + 1] - v[w]).abs();
        if dt > 0.0 && dv > 0.0 && dv.is_finite() {
            xs.push(dt.ln());
            ys.push(dv.ln());
        }
    }
    if xs.len() < 2 {
        return ContinuityFit {
            modulus: 0.0,
            exponent: 1.0,
        };
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = if sxx > 0.0 { (sxy / sxx).clamp(1e-3, 1.0) } else { 1.0 };
    let modulus = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - exponent * x).exp())
        .fold(0.0, f64::max);
    ContinuityFit { modulus, exponent }
}
