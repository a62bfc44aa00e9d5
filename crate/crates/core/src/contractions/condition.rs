//! Samplers for the contraction inequalities.
//!
//! On finite carriers the check is exhaustive over every point triple and
//! every index triple up to the truncation bound whenever that product fits in
//! the sample budget. Otherwise `(index triple, point triple)` pairs are drawn
//! from a seeded stream.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::family::MappingFamily;
use super::phi::PhiFunction;
use super::rates::Mode;
use super::schedule::{CoefficientSchedule, Coefficients};
use crate::error::{Error, Result};
use crate::gmetric::{GSpace, Point};
use crate::sampling;
use crate::tolerances::leq;

const WITNESS_CAP: usize = 16;
const POOL: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub x: Point,
    pub y: Point,
    pub z: Point,
    pub lhs: f64,
    pub rhs: f64,
}

/// Scalar bounds on the coefficients over every index triple up to the cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisBounds {
    pub expression: String,
    pub worst: f64,
    pub worst_at: [usize; 3],
    pub below_half: bool,
    pub below_one: bool,
    pub index_triples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub mode: Mode,
    pub power: usize,
    pub holds: bool,
    pub exhaustive: bool,
    pub checked: usize,
    pub violations: Vec<ConditionViolation>,
    pub hypothesis: HypothesisBounds,
    /// Vetro only: cases where pulling `Θ^s`, `Δ^s` out of F changes the verdict.
    pub homogeneous_form_mismatches: usize,
}

impl ConditionReport {
    pub fn first_violation(&self) -> Option<&ConditionViolation> {
        self.violations.first()
    }
}

/// Draws `(i, j, k, x, y, z)` cases, exhaustively when affordable.
struct Cases<'a> {
    space: &'a GSpace,
    n_idx: usize,
    distinct_xy: bool,
    exhaustive: Option<Vec<Point>>,
    is_exhaustive: bool,
    budget: usize,
    rng: ChaCha8Rng,
    pool: Vec<Point>,
}

impl<'a> Cases<'a> {
    fn new(space: &'a GSpace, n_idx: usize, distinct_xy: bool, budget: usize, seed: u64, label: &str) -> Self {
        let points = space.carrier().points();
        let total = points.as_ref().and_then(|p| {
            let n = p.len();
            let triples = if distinct_xy {
                n * n.saturating_sub(1) * n
            } else {
                n * n * n
            };
            triples.checked_mul(n_idx.checked_pow(3)?)
        });
        let exhaustive = match total {
            Some(t) if t <= budget => points,
            _ => None,
        };
        let mut rng = sampling::rng(seed, label);
        let pool = (0..POOL).map(|_| space.carrier().sample(&mut rng)).collect();
        Cases {
            space,
            n_idx,
            distinct_xy,
            is_exhaustive: exhaustive.is_some(),
            exhaustive,
            budget,
            rng,
            pool,
        }
    }

    fn for_each(&mut self, mut f: impl FnMut([usize; 3], &Point, &Point, &Point) -> Result<()>) -> Result<usize> {
        let mut count = 0;
        if let Some(pts) = self.exhaustive.take() {
            for i in 1..=self.n_idx {
                for j in 1..=self.n_idx {
                    for k in 1..=self.n_idx {
                        for x in &pts {
                            for y in &pts {
                                if self.distinct_xy && x == y {
                                    continue;
                                }
                                for z in &pts {
                                    f([i, j, k], x, y, z)?;
                                    count += 1;
                                }
                            }
                        }
                    }
                }
            }
            return Ok(count);
        }
        let carrier = self.space.carrier();
        let single = carrier.size() == Some(1);
        for _ in 0..self.budget {
            let idx = [
                self.rng.gen_range(1..=self.n_idx),
                self.rng.gen_range(1..=self.n_idx),
                self.rng.gen_range(1..=self.n_idx),
            ];
            let slot = self.rng.gen_range(0..POOL);
            self.pool[slot] = carrier.sample(&mut self.rng);
            let x = self.pool[self.rng.gen_range(0..POOL)].clone();
            let mut y = self.pool[self.rng.gen_range(0..POOL)].clone();
            if self.distinct_xy {
                if single {
                    break;
                }
                while y == x {
                    y = carrier.sample(&mut self.rng);
                }
            }
            let z = self.pool[self.rng.gen_range(0..POOL)].clone();
            f(idx, &x, &y, &z)?;
            count += 1;
        }
        Ok(count)
    }

    fn exhaustive(&self) -> bool {
        self.is_exhaustive
    }
}

fn index_bound(family: &MappingFamily, sched: &CoefficientSchedule) -> usize {
    family.index_cap().min(sched.index_cap)
}

fn scan_indices(
    n: usize,
    sched: &CoefficientSchedule,
    expression: &str,
    mut score: impl FnMut([usize; 3], Coefficients) -> Result<f64>,
) -> Result<HypothesisBounds> {
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = [1, 1, 1];
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                let v = score([i, j, k], sched.at(i, j, k)?)?;
                if v > worst {
                    worst = v;
                    worst_at = [i, j, k];
                }
            }
        }
    }
    Ok(HypothesisBounds {
        expression: expression.into(),
        worst,
        worst_at,
        below_half: worst < 0.5,
        below_one: worst < 1.0,
        index_triples: n * n * n,
    })
}

fn validate(space: &GSpace, family: &MappingFamily, p: usize, triple_samples: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::param("p", "power must be at least 1"));
    }
    if triple_samples == 0 {
        return Err(Error::param("triple_samples", "must be at least 1"));
    }
    family.check_closure(space)
}

/// Checks, for `x != y`,
///
/// `F(G(T_i^p x, T_j^p y, T_k^p z)) <= F(Θ [G(x,T_i^p x,T_i^p x) + ½(G(y,T_j^p y,T_j^p y) + G(z,T_k^p z,T_k^p z))]) + F(Δ G(x,y,z))`
///
/// with `Θ, Δ` taken at `(i, j, k)`. Any coefficient outside `[0, 1)` is a
/// hypothesis error.
pub fn check_condition_vetro(
    space: &GSpace,
    family: &MappingFamily,
    sched: &CoefficientSchedule,
    phi: &PhiFunction,
    p: usize,
    triple_samples: usize,
    seed: u64,
) -> Result<ConditionReport> {
    validate(space, family, p, triple_samples)?;
    let n = index_bound(family, sched);
    let hypothesis = scan_indices(n, sched, "max(theta, delta)", |[i, j, k], c| {
        let worst = c.theta.max(c.delta);
        if worst >= 1.0 {
            return Err(Error::HypothesisViolation {
                i,
                j,
                k,
                message: format!("theta = {}, delta = {}; both must be < 1", c.theta, c.delta),
            });
        }
        Ok(worst)
    })?;

    let s = phi.degree();
    let mut violations = Vec::new();
    let mut holds = true;
    let mut mismatches = 0;
    let mut cases = Cases::new(space, n, true, triple_samples, seed, "check_condition_vetro");
    let checked = cases.for_each(|[i, j, k], x, y, z| {
        let c = sched.at(i, j, k)?;
        let (tx, ty, tz) = (
            family.apply_power(i, x, p)?,
            family.apply_power(j, y, p)?,
            family.apply_power(k, z, p)?,
        );
        for q in [&tx, &ty, &tz] {
            space.ensure_contains(q)?;
        }
        let lhs = phi.apply(space.g(&tx, &ty, &tz)?);
        let bracket = space.g(x, &tx, &tx)? + 0.5 * (space.g(y, &ty, &ty)? + space.g(z, &tz, &tz)?);
        let gxyz = space.g(x, y, z)?;
        let rhs = phi.apply(c.theta * bracket) + phi.apply(c.delta * gxyz);
        let ok = leq(lhs, rhs);
        let rhs_hom = c.theta.powf(s) * phi.apply(bracket) + c.delta.powf(s) * phi.apply(gxyz);
        if leq(lhs, rhs_hom) != ok {
            mismatches += 1;
        }
        if !ok {
            holds = false;
            if violations.len() < WITNESS_CAP {
                violations.push(ConditionViolation {
                    i,
                    j,
                    k,
                    x: x.clone(),
                    y: y.clone(),
                    z: z.clone(),
                    lhs,
                    rhs,
                });
            }
        }
        Ok(())
    })?;

    Ok(ConditionReport {
        mode: Mode::Vetro,
        power: p,
        holds,
        exhaustive: cases.exhaustive(),
        checked,
        violations,
        hypothesis,
        homogeneous_form_mismatches: mismatches,
    })
}

/// Checks the three-term condition for all `x, y, z`:
///
/// `G(T_i^p x, T_j^p y, T_k^p z) <= Δ G(x,y,z) + Θ [G(T_i^p x,x,x) + G(y,T_j^p y,y) + G(z,z,T_k^p z)]
///                               + Λ [G(T_i^p x,y,z) + G(x,T_j^p y,z) + G(x,y,T_k^p z)]`
///
/// or, with `phi`, the same inequality with F applied to both sides. The
/// report also carries the worst value of `Δ + 3Θ + 4Λ` (powers `s` when F is
/// present) over all index triples.
pub fn check_condition_abbas(
    space: &GSpace,
    family: &MappingFamily,
    sched: &CoefficientSchedule,
    phi: Option<&PhiFunction>,
    p: usize,
    triple_samples: usize,
    seed: u64,
) -> Result<ConditionReport> {
    if !sched.has_lambda() {
        return Err(Error::Mode("the three-term condition needs a Λ coefficient".into()));
    }
    validate(space, family, p, triple_samples)?;
    let n = index_bound(family, sched);
    let s = phi.map_or(1.0, PhiFunction::degree);
    let expression = if phi.is_some() {
        "delta^s + 3 theta^s + 4 lambda^s"
    } else {
        "delta + 3 theta + 4 lambda"
    };
    let hypothesis = scan_indices(n, sched, expression, |_, c| {
        Ok(c.delta.powf(s) + 3.0 * c.theta.powf(s) + 4.0 * c.lambda.powf(s))
    })?;

    let f = |t: f64| phi.map_or(t, |phi| phi.apply(t));
    let mut violations = Vec::new();
    let mut holds = true;
    let mut cases = Cases::new(space, n, false, triple_samples, seed, "check_condition_abbas");
    let checked = cases.for_each(|[i, j, k], x, y, z| {
        let c = sched.at(i, j, k)?;
        let (tx, ty, tz) = (
            family.apply_power(i, x, p)?,
            family.apply_power(j, y, p)?,
            family.apply_power(k, z, p)?,
        );
        for q in [&tx, &ty, &tz] {
            space.ensure_contains(q)?;
        }
        let lhs = f(space.g(&tx, &ty, &tz)?);
        let own = space.g(&tx, x, x)? + space.g(y, &ty, y)? + space.g(z, z, &tz)?;
        let mixed = space.g(&tx, y, z)? + space.g(x, &ty, z)? + space.g(x, y, &tz)?;
        let rhs = f(c.delta * space.g(x, y, z)? + c.theta * own + c.lambda * mixed);
        if !leq(lhs, rhs) {
            holds = false;
            if violations.len() < WITNESS_CAP {
                violations.push(ConditionViolation {
                    i,
                    j,
                    k,
                    x: x.clone(),
                    y: y.clone(),
                    z: z.clone(),
                    lhs,
                    rhs,
                });
            }
        }
        Ok(())
    })?;

    Ok(ConditionReport {
        mode: if phi.is_some() { Mode::AbbasPhi } else { Mode::Abbas },
        power: p,
        holds,
        exhaustive: cases.exhaustive(),
        checked,
        violations,
        hypothesis,
        homogeneous_form_mismatches: 0,
    })
}
