use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::contractions::MappingFamily;
use crate::error::{Error, Result};
use crate::gmetric::{GSpace, Point};
use crate::tolerances::STOP_WINDOW;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    BudgetExhausted,
    CycleDetected,
}

/// One sampled value `G(x_n, x_m, x_l)`, `n < m < l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleSample {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub g: f64,
}

/// The iterates `x_0, x_1, ...` with `x_n = T_n^p(x_{n-1})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub points: Vec<Point>,
    /// `step_distances[n] = G(x_n, x_{n+1}, x_{n+1})`.
    pub step_distances: Vec<f64>,
    pub triple_distances: Vec<TripleSample>,
    pub termination: Termination,
    /// Power `p` each step applied; 1 for plain iteration.
    pub power: usize,
    /// First step whose family index wrapped past the cap, if any.
    pub wrapped_at: Option<usize>,
}

impl OrbitTrace {
    /// Wraps an arbitrary point list (for diagnostics on hand-built orbits).
    pub fn from_points(space: &GSpace, points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::param("points", "an orbit needs at least two points"));
        }
        for p in &points {
            space.ensure_contains(p)?;
        }
        let step_distances = steps(space, &points)?;
        let triple_distances = default_triples(space, &points)?;
        Ok(OrbitTrace {
            points,
            step_distances,
            triple_distances,
            termination: Termination::BudgetExhausted,
            power: 1,
            wrapped_at: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> &Point {
        self.points.last().expect("traces are never empty")
    }

    /// Number of map applications recorded.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    /// Recomputes every step and distance; true when the trace is consistent
    /// with `family` and the space's G.
    pub fn recheck(&self, space: &GSpace, family: &MappingFamily) -> Result<bool> {
        for n in 1..self.points.len() {
            if family.apply_power(n, &self.points[n - 1], self.power)? != self.points[n] {
                return Ok(false);
            }
        }
        if steps(space, &self.points)? != self.step_distances {
            return Ok(false);
        }
        for t in &self.triple_distances {
            if space.g(&self.points[t.n], &self.points[t.m], &self.points[t.l])? != t.g {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn steps(space: &GSpace, points: &[Point]) -> Result<Vec<f64>> {
    points.windows(2).map(|w| space.g(&w[0], &w[1], &w[1])).collect()
}

/// For each `n`: `(n, n+1, n+2)`, `(n, n+1, last)` and `(n, mid, last)`.
fn default_triples(space: &GSpace, points: &[Point]) -> Result<Vec<TripleSample>> {
    let len = points.len();
    let mut out = Vec::new();
    if len < 3 {
        return Ok(out);
    }
    let last = len - 1;
    for n in 0..len - 2 {
        let mut push = |m: usize, l: usize| -> Result<()> {
            if n < m && m < l && !out.iter().any(|t: &TripleSample| t.n == n && t.m == m && t.l == l) {
                out.push(TripleSample {
                    n,
                    m,
                    l,
                    g: space.g(&points[n], &points[m], &points[l])?,
                });
            }
            Ok(())
        };
        push(n + 1, n + 2)?;
        push(n + 1, last)?;
        push((n + last) / 2, last)?;
    }
    Ok(out)
}

/// Picard-type iteration `x_n = T_n(x_{n-1})`.
///
/// Stops when `G(x_n, x_{n+1}, x_{n+1}) < tol` for three consecutive steps,
/// when a step lands exactly on a point every map of the family fixes, when a
/// (point, phase) state repeats on a finite carrier, or after `max_steps`.
pub fn picard_orbit(
    space: &GSpace,
    family: &MappingFamily,
    x0: &Point,
    max_steps: usize,
    tol: f64,
) -> Result<OrbitTrace> {
    run_orbit(space, family, x0, max_steps, tol, 1)
}

/// As [`picard_orbit`], applying each `T_n` `p` times per step.
pub fn picard_orbit_power(
    space: &GSpace,
    family: &MappingFamily,
    x0: &Point,
    max_steps: usize,
    tol: f64,
    p: usize,
) -> Result<OrbitTrace> {
    run_orbit(space, family, x0, max_steps, tol, p)
}

fn fixed_by_all(space: &GSpace, family: &MappingFamily, x: &Point, p: usize) -> Result<bool> {
    for map in family.maps() {
        let y = map.apply_times(x, p)?;
        if &y != x && space.g(&y, x, x)? != 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn run_orbit(
    space: &GSpace,
    family: &MappingFamily,
    x0: &Point,
    max_steps: usize,
    tol: f64,
    p: usize,
) -> Result<OrbitTrace> {
    space.ensure_contains(x0)?;
    if max_steps < 2 {
        return Err(Error::param("max_steps", "must be at least 2"));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("{tol} is not positive")));
    }
    if p == 0 {
        return Err(Error::param("p", "power must be at least 1"));
    }
    let period = family.period();
    let finite = space.carrier().is_finite();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    if let Point::Index(i) = x0 {
        seen.insert((*i, 0));
    }

    let mut points = vec![x0.clone()];
    let mut step_distances = Vec::new();
    let mut small = 0;
    let mut wrapped_at = None;
    let mut termination = Termination::BudgetExhausted;

    for n in 1..=max_steps {
        if wrapped_at.is_none() && family.wraps(n) {
            wrapped_at = Some(n);
        }
        let prev = points.last().expect("nonempty");
        let next = family.apply_power(n, prev, p)?;
        if !space.contains(&next) {
            return Err(Error::Domain(format!("step {n} left the carrier at {next}")));
        }
        let beta = space.g(prev, &next, &next)?;
        step_distances.push(beta);
        points.push(next);
        let x = points.last().expect("nonempty");

        if beta == 0.0 && fixed_by_all(space, family, x, p)? {
            termination = Termination::Converged;
            break;
        }
        small = if beta < tol { small + 1 } else { 0 };
        if small >= STOP_WINDOW {
            termination = Termination::Converged;
            break;
        }
        if finite {
            if let Point::Index(i) = x {
                if !seen.insert((*i, n % period)) {
                    termination = Termination::CycleDetected;
                    break;
                }
            }
        }
    }

    let triple_distances = default_triples(space, &points)?;
    Ok(OrbitTrace {
        points,
        step_distances,
        triple_distances,
        termination,
        power: p,
        wrapped_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contractions::SelfMap;

    fn halving() -> MappingFamily {
        MappingFamily::repeated(SelfMap::Affine { scale: 0.5, shift: 0.0 }, 64).unwrap()
    }

    #[test]
    fn halving_orbit_closed_form() {
        let s = GSpace::sum_abs(-2.0, 2.0).unwrap();
        let t = picard_orbit(&s, &halving(), &Point::Real(1.0), 200, 1e-6).unwrap();
        assert_eq!(t.termination, Termination::Converged);
        for (i, p) in t.points.iter().enumerate() {
            assert_eq!(p.as_real().unwrap(), 0.5f64.powi(i as i32));
        }
        for (i, b) in t.step_distances.iter().enumerate() {
            assert_eq!(*b, 2.0 * 0.5f64.powi(i as i32 + 1));
        }
        assert!(t.last().as_real().unwrap() < 1e-6);
        assert!(t.recheck(&s, &halving()).unwrap());
        // wraps past the cap of 64 only if it ran that long
        assert!(t.wrapped_at.is_none());
    }

    #[test]
    fn identity_converges_in_one_step() {
        let s = GSpace::sum_abs(-2.0, 2.0).unwrap();
        let fam = MappingFamily::repeated(SelfMap::Identity, 8).unwrap();
        let t = picard_orbit(&s, &fam, &Point::Real(0.7), 50, 1e-9).unwrap();
        assert_eq!(t.termination, Termination::Converged);
        assert_eq!(t.steps(), 1);
        assert_eq!(t.step_distances, vec![0.0]);
    }

    #[test]
    fn swap_is_a_cycle() {
        let s = GSpace::discrete_g(vec!["0".into(), "1".into()]).unwrap();
        let fam = MappingFamily::repeated(SelfMap::Table(vec![1, 0]), 2).unwrap();
        let t = picard_orbit(&s, &fam, &Point::Index(0), 50, 1e-9).unwrap();
        assert_eq!(t.termination, Termination::CycleDetected);
        assert_eq!(t.points, vec![Point::Index(0), Point::Index(1), Point::Index(0)]);
    }

    #[test]
    fn partial_fixed_point_does_not_stop_the_orbit() {
        // T_1 fixes 0 but T_2 sends 0 to 1; 1 is fixed by both
        let s = GSpace::discrete_g(vec!["0".into(), "1".into()]).unwrap();
        let fam = MappingFamily::new(vec![SelfMap::Identity, SelfMap::Table(vec![1, 1])], 2).unwrap();
        let t = picard_orbit(&s, &fam, &Point::Index(0), 50, 1e-9).unwrap();
        assert_eq!(t.termination, Termination::Converged);
        assert_eq!(t.last(), &Point::Index(1));
    }

    #[test]
    fn wrap_is_recorded_and_errors() {
        let s = GSpace::sum_abs(-2.0, 2.0).unwrap();
        let fam = MappingFamily::repeated(
            SelfMap::Affine {
                scale: 0.99,
                shift: 0.0,
            },
            4,
        )
        .unwrap();
        let t = picard_orbit(&s, &fam, &Point::Real(1.0), 10, 1e-12).unwrap();
        assert_eq!(t.wrapped_at, Some(5));
        assert_eq!(t.termination, Termination::BudgetExhausted);
        assert!(picard_orbit(&s, &fam, &Point::Real(3.0), 10, 1e-9).is_err());
        assert!(picard_orbit(&s, &fam, &Point::Real(1.0), 1, 1e-9).is_err());
        let out = MappingFamily::repeated(SelfMap::Affine { scale: 3.0, shift: 0.0 }, 4).unwrap();
        assert!(matches!(
            picard_orbit(&s, &out, &Point::Real(1.0), 10, 1e-9),
            Err(Error::Domain(_))
        ));
    }
}
