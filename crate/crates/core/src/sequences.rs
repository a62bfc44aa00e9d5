//! α-series and λ-sequence certificates on finite prefixes, plus the tail
//! bound used to turn an accepted rate sequence into an a priori estimate.
//!
//! Both properties are existential over an infinite index range, so every
//! certificate here is a statement about a prefix: it records `verified_up_to`
//! and never claims more.
//!
//! Index conventions follow the definitions literally:
//!
//! * α-series at `(λ, n)`: `Σ_{i=1}^{L} a_i <= λ L` for every `L >= n`.
//! * λ-sequence at `(λ, n)`: `Σ_{i=1}^{L-1} d_i <= λ L` for every `L >= n + 1`,
//!   where `d_i` is the distance between consecutive orbit points.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmetric::{GSpace, Point};
use crate::tolerances::TAU_INEQ;

/// A finite prefix `a_1, a_2, ...` of nonnegative reals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealSequence {
    values: Vec<f64>,
}

impl RealSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::param(
                "sequence",
                format!("term {} is {v}; terms must be finite and >= 0", i + 1),
            ));
        }
        Ok(RealSequence { values })
    }

    /// Materializes `f(1), ..., f(len)`.
    pub fn from_fn(len: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((1..=len).map(f).collect())
    }

    /// One value per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| Error::param("sequence", format!("line {}: `{line}` is not a number", lineno + 1)))?;
            values.push(v);
        }
        Self::new(values)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One-based access.
    pub fn term(&self, i: usize) -> Option<f64> {
        i.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    /// `0, d_1, d_2, ...`: the α-series view of a λ-sequence's distances.
    ///
    /// With this shift, `d` is a λ-sequence at `(λ, n)` exactly when the
    /// shifted terms form an α-series at `(λ, n + 1)`.
    pub fn shifted_for_alpha(&self) -> RealSequence {
        let mut values = Vec::with_capacity(self.values.len() + 1);
        values.push(0.0);
        values.extend_from_slice(&self.values);
        RealSequence { values }
    }

    /// Distances `max{x_i, x_{i+1}}` under the max pairing.
    pub fn max_pairing_distances(&self) -> RealSequence {
        RealSequence {
            values: self
                .values
                .windows(2)
                .map(|w| crate::gmetric::max_pairing(w[0], w[1]))
                .collect(),
        }
    }

    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    Rejected,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesForm {
    AlphaSeries,
    LambdaSequence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaCertificate {
    pub lambda: f64,
    pub n_lambda: usize,
    pub verified_up_to: usize,
    pub verdict: Verdict,
    /// Smallest failing `L` when rejected.
    pub witness: Option<usize>,
    pub form: SeriesForm,
}

impl LambdaCertificate {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accepted
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::param("lambda", format!("{lambda} is not in (0, 1)")));
    }
    Ok(())
}

#[inline]
fn within(sum: f64, lambda: f64, l: usize) -> bool {
    let rhs = lambda * l as f64;
    sum <= rhs + TAU_INEQ * (1.0 + rhs)
}

/// Checks `Σ_{i=1}^{L} a_i <= λ L` for every `L` in `[n_lambda, l_max]`.
pub fn check_alpha_series(seq: &RealSequence, lambda: f64, n_lambda: usize, l_max: usize) -> Result<LambdaCertificate> {
    check_lambda(lambda)?;
    if n_lambda == 0 {
        return Err(Error::param("n_lambda", "must be at least 1"));
    }
    if l_max < n_lambda {
        return Err(Error::param("l_max", format!("{l_max} < n_lambda = {n_lambda}")));
    }
    if seq.len() < l_max {
        return Err(Error::param(
            "l_max",
            format!("needs {l_max} terms, sequence has {}", seq.len()),
        ));
    }
    let witness = first_alpha_failure(seq.values(), lambda, n_lambda, l_max);
    Ok(certificate(lambda, n_lambda, l_max, witness, SeriesForm::AlphaSeries))
}

fn first_alpha_failure(a: &[f64], lambda: f64, from: usize, to: usize) -> Option<usize> {
    let mut sum = 0.0;
    for (idx, v) in a.iter().take(to).enumerate() {
        sum += v;
        let l = idx + 1;
        if l >= from && !within(sum, lambda, l) {
            return Some(l);
        }
    }
    None
}

/// Checks `Σ_{i=1}^{L-1} d_i <= λ L` for every `L` in `[n_lambda + 1, l_max]`,
/// where `d_i` is `orbit_distances.term(i)`.
pub fn check_lambda_sequence(
    orbit_distances: &RealSequence,
    lambda: f64,
    n_lambda: usize,
    l_max: usize,
) -> Result<LambdaCertificate> {
    check_lambda(lambda)?;
    if n_lambda == 0 {
        return Err(Error::param("n_lambda", "must be at least 1"));
    }
    if l_max < n_lambda + 1 {
        return Err(Error::param(
            "l_max",
            format!("{l_max} < n_lambda + 1 = {}", n_lambda + 1),
        ));
    }
    if orbit_distances.len() < l_max - 1 {
        return Err(Error::param(
            "l_max",
            format!("needs {} distances, sequence has {}", l_max - 1, orbit_distances.len()),
        ));
    }
    let d = orbit_distances.values();
    let mut sum = 0.0;
    let mut witness = None;
    for l in 2..=l_max {
        sum += d[l - 2];
        if l > n_lambda && !within(sum, lambda, l) {
            witness = Some(l);
            break;
        }
    }
    Ok(certificate(
        lambda,
        n_lambda,
        l_max,
        witness,
        SeriesForm::LambdaSequence,
    ))
}

fn certificate(
    lambda: f64,
    n_lambda: usize,
    l_max: usize,
    witness: Option<usize>,
    form: SeriesForm,
) -> LambdaCertificate {
    LambdaCertificate {
        lambda,
        n_lambda,
        verified_up_to: l_max,
        verdict: if witness.is_some() {
            Verdict::Rejected
        } else {
            Verdict::Accepted
        },
        witness,
        form,
    }
}

/// The λ grid scanned when no λ is supplied: 0.05, 0.10, ..., 0.95.
pub fn lambda_grid() -> impl Iterator<Item = f64> {
    (1..=19).map(|k| k as f64 / 20.0)
}

/// Smallest accepted `(λ, n(λ))` on the grid, with `n(λ) <= max(l_max / 2, 1)`.
pub fn search_alpha_series(seq: &RealSequence, l_max: usize) -> Result<Option<LambdaCertificate>> {
    for lambda in lambda_grid() {
        // the window [n, l_max] passes iff n exceeds the last failing L
        let last_fail = last_failure(l_max, |l, sum| !within(sum, lambda, l), seq.values(), 1);
        let n = last_fail.map_or(1, |l| l + 1);
        if n <= (l_max / 2).max(1) {
            return check_alpha_series(seq, lambda, n, l_max).map(Some);
        }
    }
    Ok(None)
}

/// Smallest accepted `(λ, n(λ))` on the grid for the λ-sequence form.
pub fn search_lambda_sequence(distances: &RealSequence, l_max: usize) -> Result<Option<LambdaCertificate>> {
    for lambda in lambda_grid() {
        // partial sum up to L-1 compared against λL, for L >= 2
        let last_fail = last_failure(l_max, |l, sum| !within(sum, lambda, l), distances.values(), 2);
        let n = last_fail.unwrap_or(1).max(1);
        if n <= l_max / 2 {
            return check_lambda_sequence(distances, lambda, n, l_max).map(Some);
        }
    }
    Ok(None)
}

/// Last `L <= l_max` at which `fails(L, Σ_{i < L - offset + 2} a_i)` holds.
/// `offset = 1` pairs `L` with `Σ_{i=1}^{L}`, `offset = 2` with `Σ_{i=1}^{L-1}`.
fn last_failure(l_max: usize, fails: impl Fn(usize, f64) -> bool, a: &[f64], offset: usize) -> Option<usize> {
    let mut sum = 0.0;
    let mut last = None;
    for l in offset..=l_max {
        match a.get(l - offset) {
            Some(v) => sum += v,
            None => return Some(l_max),
        }
        if fails(l, sum) {
            last = Some(l);
        }
    }
    last
}

/// `β_i = G(x_i, x_{i+1}, x_{i+1})` along an orbit.
pub fn beta_from_orbit(space: &GSpace, orbit: &[Point]) -> Result<RealSequence> {
    if orbit.len() < 2 {
        return Err(Error::param("orbit", "needs at least two points"));
    }
    let mut values = Vec::with_capacity(orbit.len() - 1);
    for w in orbit.windows(2) {
        values.push(space.evaluate_g(&w[0], &w[1], &w[1])?);
    }
    RealSequence::new(values)
}

/// A priori tail estimate for `G(x_n, x_m, x_l)`, scaled by `base`.
///
/// Returns `min(Σ_{k=n}^{l-2} λ^k, λ^n / (1 - λ)) * base`; `l = None` is the
/// `l -> ∞` form. Any terms of `r_prefix` are checked against the
/// arithmetic-mean step: for each covered `k` in the summation range the
/// running mean `(1/k) Σ_{i<=k} r_i` must not exceed `λ`.
pub fn amgm_tail_bound(r_prefix: &RealSequence, lambda: f64, n: usize, l: Option<usize>, base: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(base.is_finite() && base >= 0.0) {
        return Err(Error::param("base", format!("{base} is not a finite nonnegative real")));
    }
    if let Some(l) = l {
        if l <= n {
            return Err(Error::param("l", format!("l = {l} must exceed n = {n}")));
        }
    }
    let upper = l.map_or(usize::MAX, |l| l.saturating_sub(2));
    let mut sum = 0.0;
    for (idx, r) in r_prefix.values().iter().enumerate() {
        let k = idx + 1;
        sum += r;
        if k >= n && k <= upper && !within(sum, lambda, k) {
            return Err(Error::param(
                "r_prefix",
                format!("mean of r_1..r_{k} is {} > λ = {lambda}", sum / k as f64),
            ));
        }
    }
    let tail = lambda.powi(n as i32) / (1.0 - lambda);
    let bound = match l {
        Some(l) if l >= n + 2 => {
            let finite: f64 = (n..=l - 2).map(|k| lambda.powi(k as i32)).sum();
            finite.min(tail)
        }
        Some(_) => 0.0,
        None => tail,
    };
    Ok(bound * base)
}
