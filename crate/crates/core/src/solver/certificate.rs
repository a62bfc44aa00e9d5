use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::orbit::OrbitTrace;
use crate::error::{Error, Result};
use crate::gmetric::{GSpace, Point};
use crate::sampling;
use crate::sequences::LambdaCertificate;
use crate::tolerances::leq;

const WITNESS_CAP: usize = 16;

/// Ties an orbit to the a priori tail bound `λ^n / (1 - λ) · base`.
///
/// With a homogeneous F of degree `s` the bound lives on the F scale; since
/// `F(t) = F(1) t^s`, both sides are compared as `G^s` and `base^s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate {
    pub lambda: f64,
    pub n_lambda: usize,
    /// Prefix length the rate certificate was checked up to.
    pub verified_up_to: usize,
    pub degree: f64,
    /// `G(x_0, x_1, x_2)`.
    pub base: f64,
    /// Indexed by `n`.
    pub predicted_bound: Vec<f64>,
    /// Indexed by `n`: largest recorded `G(x_n, x_m, x_l)^s`, `n < m < l`.
    pub observed_max: Vec<Option<f64>>,
    /// Observed never exceeds predicted for `n >= n_lambda`.
    pub sound: bool,
}

impl ConvergenceCertificate {
    pub fn build(space: &GSpace, trace: &OrbitTrace, rates: &LambdaCertificate, degree: f64) -> Result<Self> {
        if !rates.accepted() {
            return Err(Error::param("rates", "the rate certificate was not accepted"));
        }
        if !(degree.is_finite() && degree > 0.0) {
            return Err(Error::param("degree", format!("{degree} is not positive")));
        }
        let base = base_value(space, &trace.points)?;
        let lambda = rates.lambda;
        let scaled_base = base.powf(degree);
        let len = trace.len();
        let predicted_bound: Vec<f64> = (0..len)
            .map(|n| lambda.powi(n as i32) / (1.0 - lambda) * scaled_base)
            .collect();
        let mut observed_max: Vec<Option<f64>> = vec![None; len];
        for t in &trace.triple_distances {
            let v = t.g.powf(degree);
            let slot = &mut observed_max[t.n];
            *slot = Some(slot.map_or(v, |m: f64| m.max(v)));
        }
        let sound = (rates.n_lambda..len).all(|n| observed_max[n].is_none_or(|o| leq(o, predicted_bound[n])));
        Ok(ConvergenceCertificate {
            lambda,
            n_lambda: rates.n_lambda,
            verified_up_to: rates.verified_up_to,
            degree,
            base,
            predicted_bound,
            observed_max,
            sound,
        })
    }

    /// A certificate with hand-picked `(λ, n(λ))`, for audits of arbitrary orbits.
    pub fn assumed(space: &GSpace, trace: &OrbitTrace, lambda: f64, n_lambda: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::param("lambda", format!("{lambda} is not in (0, 1)")));
        }
        let cert = LambdaCertificate {
            lambda,
            n_lambda,
            verified_up_to: 0,
            verdict: crate::sequences::Verdict::Accepted,
            witness: None,
            form: crate::sequences::SeriesForm::AlphaSeries,
        };
        Self::build(space, trace, &cert, 1.0)
    }

    pub fn bound_at(&self, n: usize) -> f64 {
        self.lambda.powi(n as i32) / (1.0 - self.lambda) * self.base.powf(self.degree)
    }
}

/// `G(x_0, x_1, x_2)`, padding a short orbit with its last point.
fn base_value(space: &GSpace, points: &[Point]) -> Result<f64> {
    let at = |i: usize| &points[i.min(points.len() - 1)];
    space.g(at(0), at(1), at(2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleCheck {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub checked: usize,
    pub exhaustive: bool,
    pub bound_violations: Vec<TripleCheck>,
    /// Triples where `G(x_n, x_m, x_l)` exceeds `Σ_{i=n}^{l-2} G(x_i, x_{i+1}, x_{i+2})`.
    pub telescoping_violations: Vec<TripleCheck>,
    pub sound: bool,
}

/// Compares `G(x_n, x_m, x_l)` with the certificate's bound on triples
/// `n(λ) <= n < m < l <= len - 1`, and checks the telescoping chain on each.
pub fn apriori_vs_observed(
    space: &GSpace,
    trace: &OrbitTrace,
    cert: &ConvergenceCertificate,
    sample_budget: usize,
    seed: u64,
) -> Result<SoundnessReport> {
    if sample_budget == 0 {
        return Err(Error::param("sample_budget", "must be at least 1"));
    }
    let last = trace.len() - 1;
    let lo = cert.n_lambda;
    if last < lo + 2 {
        return Err(Error::param(
            "trace",
            format!("{} points leave no triple n(λ) = {lo} <= n < m < l", trace.len()),
        ));
    }
    let pts = &trace.points;
    // prefix sums of G(x_i, x_{i+1}, x_{i+2})
    let mut chain = vec![0.0];
    for i in 0..last - 1 {
        let v = space.g(&pts[i], &pts[i + 1], &pts[i + 2])?;
        chain.push(chain[i] + v);
    }

    let span = (last - lo + 1) as u128;
    let total = span * (span - 1) * (span - 2) / 6;
    let exhaustive = total <= sample_budget as u128;
    let mut triples = Vec::new();
    if exhaustive {
        for n in lo..=last {
            for m in n + 1..=last {
                for l in m + 1..=last {
                    triples.push((n, m, l));
                }
            }
        }
    } else {
        let mut rng = sampling::rng(seed, "apriori");
        for _ in 0..sample_budget {
            let mut v = [0usize; 3];
            loop {
                for s in v.iter_mut() {
                    *s = rng.gen_range(lo..=last);
                }
                v.sort_unstable();
                if v[0] < v[1] && v[1] < v[2] {
                    break;
                }
            }
            triples.push((v[0], v[1], v[2]));
        }
    }

    let mut bound_violations = Vec::new();
    let mut telescoping_violations = Vec::new();
    for &(n, m, l) in &triples {
        let observed = space.g(&pts[n], &pts[m], &pts[l])?;
        let bound = cert.bound_at(n);
        if !leq(observed.powf(cert.degree), bound) && bound_violations.len() < WITNESS_CAP {
            bound_violations.push(TripleCheck {
                n,
                m,
                l,
                observed,
                bound,
            });
        }
        let tele = chain[l - 1] - chain[n];
        if !leq(observed, tele) && telescoping_violations.len() < WITNESS_CAP {
            telescoping_violations.push(TripleCheck {
                n,
                m,
                l,
                observed,
                bound: tele,
            });
        }
    }
    let sound = bound_violations.is_empty() && telescoping_violations.is_empty();
    Ok(SoundnessReport {
        checked: triples.len(),
        exhaustive,
        bound_violations,
        telescoping_violations,
        sound,
    })
}

/// Flat table, one row per step: `n,x_n,beta_n,predicted,observed_max`.
///
/// `beta_n = G(x_n, x_{n+1}, x_{n+1})`; empty cells mark values that do not exist.
pub fn orbit_table(trace: &OrbitTrace, cert: Option<&ConvergenceCertificate>) -> String {
    let mut out = String::from("n,x_n,beta_n,predicted,observed_max\n");
    for (n, x) in trace.points.iter().enumerate() {
        let x = match x {
            Point::Vector(_) => format!("\"{x}\""),
            _ => x.to_string(),
        };
        let beta = trace
            .step_distances
            .get(n)
            .map(|b| format!("{b:e}"))
            .unwrap_or_default();
        let (pred, obs) = match cert {
            Some(c) => (
                c.predicted_bound.get(n).map(|v| format!("{v:e}")).unwrap_or_default(),
                c.observed_max
                    .get(n)
                    .copied()
                    .flatten()
                    .map(|v| format!("{v:e}"))
                    .unwrap_or_default(),
            ),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(out, "{n},{x},{beta},{pred},{obs}");
    }
    out
}
