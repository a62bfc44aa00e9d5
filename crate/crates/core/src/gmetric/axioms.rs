//! Audits of the G-metric axioms G1–G5 and of the symmetry property.
//!
//! Finite carriers are checked exhaustively whenever the number of
//! quadruples fits in the sample budget; everything else is sampled from a
//! seeded stream. Continuous carriers can only ever be sampled.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::space::{permutations, GSpace, Point};
use crate::error::{Error, Result};
use crate::sampling;
use crate::tolerances::{TAU_G, TAU_SYM};

/// Per-axiom cap on stored witnesses.
const WITNESS_CAP: usize = 8;

/// Size of the rotating pool continuous samples are drawn from.
const POOL: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    G1,
    G2,
    G3,
    G4,
    G5,
    Symmetric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub points: Vec<Point>,
    /// G values involved, in the order the axiom states them.
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub g1: bool,
    pub g2: bool,
    pub g3: bool,
    pub g4: bool,
    pub g5: bool,
    /// G(x,y,y) = G(x,x,y); reported but not one of the axioms.
    pub symmetric: bool,
    pub violations: Vec<AxiomViolation>,
    /// Number of tuples examined (quadruples when sampling).
    pub samples: usize,
    pub exhaustive: bool,
}

impl AxiomReport {
    /// G1–G5 all hold on what was tested.
    pub fn is_g_metric(&self) -> bool {
        self.g1 && self.g2 && self.g3 && self.g4 && self.g5
    }

    pub fn witnesses(&self, axiom: Axiom) -> impl Iterator<Item = &AxiomViolation> {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub symmetric: bool,
    /// Pairs `(x, y)` with `G(x,y,y) != G(x,x,y)`.
    pub witnesses: Vec<(Point, Point)>,
    pub exhaustive: bool,
}

struct Audit<'a> {
    space: &'a GSpace,
    exact: bool,
    ok: [bool; 6],
    counts: [usize; 6],
    violations: Vec<AxiomViolation>,
}

impl<'a> Audit<'a> {
    fn new(space: &'a GSpace) -> Self {
        Audit {
            space,
            exact: space.carrier().is_finite(),
            ok: [true; 6],
            counts: [0; 6],
            violations: Vec::new(),
        }
    }

    fn fail(&mut self, axiom: Axiom, points: &[&Point], values: Vec<f64>) {
        let a = axiom as usize;
        self.ok[a] = false;
        if self.counts[a] < WITNESS_CAP {
            self.counts[a] += 1;
            self.violations.push(AxiomViolation {
                axiom,
                points: points.iter().map(|p| (*p).clone()).collect(),
                values,
            });
        }
    }

    fn eq(&self, a: f64, b: f64, tau: f64) -> bool {
        if self.exact {
            a == b
        } else {
            crate::tolerances::close(a, b, tau)
        }
    }

    fn le(&self, a: f64, b: f64) -> bool {
        if self.exact {
            a <= b
        } else {
            a <= b + TAU_G * (1.0 + b.abs())
        }
    }

    fn g(&self, x: &Point, y: &Point, z: &Point) -> Result<f64> {
        self.space.g(x, y, z)
    }

    fn check_g1(&mut self, x: &Point) -> Result<()> {
        let v = self.g(x, x, x)?;
        if !self.eq(v, 0.0, TAU_G) {
            self.fail(Axiom::G1, &[x, x, x], vec![v]);
        }
        Ok(())
    }

    fn check_pair(&mut self, x: &Point, y: &Point) -> Result<()> {
        let xxy = self.g(x, x, y)?;
        if x != y && xxy.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            self.fail(Axiom::G2, &[x, x, y], vec![xxy]);
        }
        let xyy = self.g(x, y, y)?;
        if !self.eq(xyy, xxy, TAU_SYM) {
            self.fail(Axiom::Symmetric, &[x, y], vec![xyy, xxy]);
        }
        Ok(())
    }

    fn check_triple(&mut self, x: &Point, y: &Point, z: &Point) -> Result<()> {
        let xyz = self.g(x, y, z)?;
        if z != y {
            let xxy = self.g(x, x, y)?;
            if !self.le(xxy, xyz) {
                self.fail(Axiom::G3, &[x, y, z], vec![xxy, xyz]);
            }
        }
        let pts = [x, y, z];
        for (a, b, c) in permutations(0, 1, 2) {
            let v = self.g(pts[a], pts[b], pts[c])?;
            if !self.eq(v, xyz, TAU_G) {
                self.fail(Axiom::G4, &[pts[a], pts[b], pts[c]], vec![v, xyz]);
                break;
            }
        }
        Ok(())
    }

    fn check_quad(&mut self, x: &Point, y: &Point, z: &Point, a: &Point) -> Result<()> {
        let lhs = self.g(x, y, z)?;
        let xaa = self.g(x, a, a)?;
        let ayz = self.g(a, y, z)?;
        if !self.le(lhs, xaa + ayz) {
            self.fail(Axiom::G5, &[x, y, z, a], vec![lhs, xaa, ayz]);
        }
        Ok(())
    }

    fn finish(mut self, samples: usize, exhaustive: bool) -> AxiomReport {
        self.violations.sort_by_key(|v| v.axiom);
        let [g1, g2, g3, g4, g5, symmetric] = self.ok;
        AxiomReport {
            g1,
            g2,
            g3,
            g4,
            g5,
            symmetric,
            violations: self.violations,
            samples,
            exhaustive,
        }
    }
}

fn validate(space: &GSpace, sample_budget: usize) -> Result<()> {
    if sample_budget == 0 {
        return Err(Error::param("sample_budget", "must be at least 1"));
    }
    if space.carrier().is_empty() {
        return Err(Error::Domain("empty carrier".into()));
    }
    Ok(())
}

/// Exhaustive when `n^4 <= sample_budget` on a finite carrier.
fn exhaustive_size(space: &GSpace, sample_budget: usize) -> Option<usize> {
    space
        .carrier()
        .size()
        .filter(|n| n.checked_pow(4).is_some_and(|q| q <= sample_budget))
}

/// Tests G1–G5 (and records symmetry) on `space`.
pub fn check_axioms(space: &GSpace, sample_budget: usize, seed: u64) -> Result<AxiomReport> {
    validate(space, sample_budget)?;
    let mut audit = Audit::new(space);
    if let Some(n) = exhaustive_size(space, sample_budget) {
        let pts: Vec<Point> = (0..n).map(Point::Index).collect();
        for x in &pts {
            audit.check_g1(x)?;
            for y in &pts {
                audit.check_pair(x, y)?;
                for z in &pts {
                    audit.check_triple(x, y, z)?;
                    for a in &pts {
                        audit.check_quad(x, y, z, a)?;
                    }
                }
            }
        }
        return Ok(audit.finish(n.pow(4), true));
    }

    let mut rng = sampling::rng(seed, "check_axioms");
    let carrier = space.carrier();
    let mut pool: Vec<Point> = (0..POOL).map(|_| carrier.sample(&mut rng)).collect();
    for _ in 0..sample_budget {
        // refresh one pool slot so the sample keeps exploring while still
        // producing coincident arguments
        let slot = rng.gen_range(0..POOL);
        pool[slot] = carrier.sample(&mut rng);
        let pick: Vec<usize> = (0..4).map(|_| rng.gen_range(0..POOL)).collect();
        let (x, y, z, a) = (&pool[pick[0]], &pool[pick[1]], &pool[pick[2]], &pool[pick[3]]);
        audit.check_g1(x)?;
        audit.check_pair(x, y)?;
        audit.check_triple(x, y, z)?;
        audit.check_quad(x, y, z, a)?;
    }
    Ok(audit.finish(sample_budget, false))
}

/// Tests `G(x,y,y) = G(x,x,y)`: exactly on finite carriers, within
/// `TAU_SYM` on continuous ones.
pub fn check_symmetric(space: &GSpace, sample_budget: usize, seed: u64) -> Result<SymmetryReport> {
    validate(space, sample_budget)?;
    let exact = space.carrier().is_finite();
    let mut witnesses = Vec::new();
    let mut test = |x: &Point, y: &Point| -> Result<()> {
        let xyy = space.g(x, y, y)?;
        let xxy = space.g(x, x, y)?;
        let same = if exact {
            xyy == xxy
        } else {
            crate::tolerances::close(xyy, xxy, TAU_SYM)
        };
        if !same {
            witnesses.push((x.clone(), y.clone()));
        }
        Ok(())
    };
    let n_pairs = space.carrier().size().and_then(|n| n.checked_mul(n));
    let exhaustive = n_pairs.is_some_and(|p| p <= sample_budget);
    if exhaustive {
        let pts = space.carrier().points().unwrap_or_default();
        for x in &pts {
            for y in &pts {
                test(x, y)?;
            }
        }
    } else {
        let mut rng = sampling::rng(seed, "check_symmetric");
        for _ in 0..sample_budget {
            let x = space.carrier().sample(&mut rng);
            let y = space.carrier().sample(&mut rng);
            test(&x, &y)?;
        }
    }
    Ok(SymmetryReport {
        symmetric: witnesses.is_empty(),
        witnesses,
        exhaustive,
    })
}
