use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::ConvergenceCertificate;
use super::orbit::{picard_orbit_power, OrbitTrace};
use crate::contractions::{
    check_condition_abbas, check_condition_vetro, phi_membership_check, power_family, rate_sequence, AbbasThreshold,
    CoefficientSchedule, ConditionReport, MappingFamily, Mode, PhiFunction, PhiReport,
};
use crate::error::{Error, Result};
use crate::gmetric::{GSpace, Point};
use crate::sequences::{
    check_alpha_series, check_lambda_sequence, search_alpha_series, search_lambda_sequence, LambdaCertificate,
    RealSequence,
};
use crate::tolerances::{TAU_FIX, TAU_SAME};

/// Everything a common fixed point theorem is applied to.
#[derive(Clone, Debug)]
pub struct Problem {
    pub space: GSpace,
    pub family: MappingFamily,
    pub schedule: CoefficientSchedule,
    pub phi: Option<PhiFunction>,
    pub mode: Mode,
    pub power: usize,
    pub threshold: AbbasThreshold,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub triple_samples: usize,
    pub seed: u64,
    /// Fixed `λ`; the grid is searched when absent.
    pub lambda: Option<f64>,
    /// Used with `lambda`; defaults to 1.
    pub n_lambda: Option<usize>,
    pub phi_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            triple_samples: 20_000,
            seed: 0,
            lambda: None,
            n_lambda: None,
            phi_samples: 512,
        }
    }
}

/// Outcome of checking a problem's hypotheses. `solve_common_fixed_point`
/// only runs against a passed check of the same problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub fingerprint: u64,
    pub mode: Mode,
    pub power: usize,
    pub condition: Option<ConditionReport>,
    pub phi: Option<PhiReport>,
    /// `r_1, ..., r_L`.
    pub rates: Vec<f64>,
    /// The series test the mode asks for: α-series of `r` (two-term modes) or
    /// λ-sequence of `max(r_i, r_{i+1})` with `r` non-increasing (three-term modes).
    pub series: Option<LambdaCertificate>,
    /// α-series certificate of `r` behind the a priori bound.
    pub certificate_series: Option<LambdaCertificate>,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl Problem {
    pub fn new(space: GSpace, family: MappingFamily, schedule: CoefficientSchedule, mode: Mode) -> Self {
        Problem {
            space,
            family,
            schedule,
            phi: None,
            mode,
            power: 1,
            threshold: AbbasThreshold::Half,
        }
    }

    pub fn with_phi(mut self, phi: PhiFunction) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn with_power(mut self, p: usize) -> Self {
        self.power = p;
        self
    }

    pub fn with_threshold(mut self, threshold: AbbasThreshold) -> Self {
        self.threshold = threshold;
        self
    }

    /// Largest index every "for all i, j, k" claim is checked up to.
    pub fn index_bound(&self) -> usize {
        self.family.index_cap().min(self.schedule.index_cap)
    }

    /// Homogeneity degree the rates and bounds are taken at.
    pub fn degree(&self) -> f64 {
        match self.mode {
            Mode::Abbas => 1.0,
            _ => self.phi.as_ref().map_or(1.0, PhiFunction::degree),
        }
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.space.describe().hash(&mut h);
        self.family.describe().hash(&mut h);
        self.schedule.describe().hash(&mut h);
        self.phi.as_ref().map(PhiFunction::describe).hash(&mut h);
        format!("{:?}{}{:?}", self.mode, self.power, self.threshold).hash(&mut h);
        h.finish()
    }

    /// Runs the condition checker, the Φ gate and the rate-series test.
    ///
    /// Hypothesis failures (condition violations, coefficients out of range,
    /// singular rates, rejected series) are recorded in the result; malformed
    /// input is an error.
    pub fn verify(&self, opts: &VerifyOptions) -> Result<Hypotheses> {
        if self.power == 0 {
            return Err(Error::param("p", "power must be at least 1"));
        }
        match (self.mode, &self.phi) {
            (Mode::Abbas, Some(_)) => {
                return Err(Error::Mode(
                    "the plain three-term mode takes no F; use abbas_phi".into(),
                ))
            }
            (Mode::AbbasPhi, None) => return Err(Error::Mode("abbas_phi needs an F".into())),
            _ => {}
        }
        let mut failures = Vec::new();

        let phi_report = match &self.phi {
            Some(f) if !f.is_identity() => {
                let rep = phi_membership_check(f, opts.phi_samples, 16.0, opts.seed)?;
                if !rep.member {
                    let w = &rep.violations[0];
                    failures.push(format!(
                        "F fails {:?} at {:?}: {} vs {}",
                        w.clause, w.inputs, w.lhs, w.rhs
                    ));
                }
                Some(rep)
            }
            _ => None,
        };

        let condition = match self.check_condition(opts) {
            Ok(rep) => {
                if let Some(v) = rep.first_violation() {
                    failures.push(format!(
                        "condition fails at (i, j, k) = ({}, {}, {}), (x, y, z) = ({}, {}, {}): {} > {}",
                        v.i, v.j, v.k, v.x, v.y, v.z, v.lhs, v.rhs
                    ));
                }
                if self.mode != Mode::Vetro && !(rep.hypothesis.worst < self.threshold.value()) {
                    let [i, j, k] = rep.hypothesis.worst_at;
                    failures.push(format!(
                        "{} = {} at ({i}, {j}, {k}) is not below {}",
                        rep.hypothesis.expression,
                        rep.hypothesis.worst,
                        self.threshold.value()
                    ));
                }
                Some(rep)
            }
            Err(e @ Error::HypothesisViolation { .. }) => {
                failures.push(e.to_string());
                None
            }
            Err(e) => return Err(e),
        };

        let len = self.index_bound().max(2);
        let rates = match rate_sequence(&self.schedule, self.mode, self.degree(), len) {
            Ok(r) => r,
            Err(e @ (Error::Singularity { .. } | Error::HypothesisViolation { .. })) => {
                failures.push(e.to_string());
                Vec::new()
            }
            Err(e) => return Err(e),
        };

        let (series, certificate_series) = if rates.is_empty() {
            (None, None)
        } else {
            let r = RealSequence::new(rates.clone())?;
            let alpha = self.alpha_certificate(&r, opts)?;
            let series = match self.mode {
                Mode::Vetro => alpha.clone(),
                Mode::Abbas | Mode::AbbasPhi => {
                    if !r.is_non_increasing() {
                        failures.push("rate sequence is not non-increasing".into());
                    }
                    let d = r.max_pairing_distances();
                    match opts.lambda {
                        Some(l) => Some(check_lambda_sequence(&d, l, opts.n_lambda.unwrap_or(1), r.len())?),
                        None => search_lambda_sequence(&d, r.len())?,
                    }
                }
            };
            match &series {
                Some(c) if c.accepted() => {}
                Some(c) => failures.push(format!(
                    "rate series rejected at λ = {}, n(λ) = {}: fails at L = {:?}",
                    c.lambda, c.n_lambda, c.witness
                )),
                None => failures.push("no (λ, n(λ)) on the grid accepts the rate series".into()),
            }
            if self.mode != Mode::Vetro && !alpha.as_ref().is_some_and(LambdaCertificate::accepted) {
                failures.push("rate sequence is not an α-series on the grid".into());
            }
            (series, alpha.filter(LambdaCertificate::accepted))
        };

        Ok(Hypotheses {
            fingerprint: self.fingerprint(),
            mode: self.mode,
            power: self.power,
            condition,
            phi: phi_report,
            rates,
            series,
            certificate_series,
            passed: failures.is_empty(),
            failures,
        })
    }

    fn check_condition(&self, opts: &VerifyOptions) -> Result<ConditionReport> {
        match self.mode {
            Mode::Vetro => {
                let id = PhiFunction::identity();
                let phi = self.phi.as_ref().unwrap_or(&id);
                check_condition_vetro(
                    &self.space,
                    &self.family,
                    &self.schedule,
                    phi,
                    self.power,
                    opts.triple_samples,
                    opts.seed,
                )
            }
            Mode::Abbas | Mode::AbbasPhi => check_condition_abbas(
                &self.space,
                &self.family,
                &self.schedule,
                self.phi.as_ref(),
                self.power,
                opts.triple_samples,
                opts.seed,
            ),
        }
    }

    fn alpha_certificate(&self, r: &RealSequence, opts: &VerifyOptions) -> Result<Option<LambdaCertificate>> {
        if let Some(l) = opts.lambda {
            let n = opts.n_lambda.unwrap_or(1);
            let c = check_alpha_series(r, l, n, r.len())?;
            if c.accepted() || self.mode == Mode::Vetro {
                return Ok(Some(c));
            }
        }
        search_alpha_series(r, r.len())
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub max_steps: usize,
    /// Step size below which the orbit counts as settled.
    pub tol: f64,
    pub tau_fix: f64,
    /// Iterate `power_family(family, p)` instead of applying `T_n` `p` times.
    pub via_power_family: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_steps: 10_000,
            tol: 1e-12,
            tau_fix: TAU_FIX,
            via_power_family: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub point: Point,
    /// `residuals[n - 1] = G(T_n u, u, u)`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub accepted: bool,
    pub unique: Option<bool>,
    pub transfer: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub result: FixedPointResult,
    pub certificate: ConvergenceCertificate,
    pub trace: OrbitTrace,
}

/// Runs the orbit for `problem` and accepts its end point when every
/// `G(T_n u, u, u)`, `n <= N_max`, is within `tau_fix`.
fn settle(problem: &Problem, x0: &Point, opts: &SolveOptions) -> Result<(OrbitTrace, FixedPointResult)> {
    let trace = if opts.via_power_family && problem.power > 1 {
        let fam = power_family(&problem.family, problem.power)?;
        picard_orbit_power(&problem.space, &fam, x0, opts.max_steps, opts.tol, 1)?
    } else {
        picard_orbit_power(
            &problem.space,
            &problem.family,
            x0,
            opts.max_steps,
            opts.tol,
            problem.power,
        )?
    };
    let u = trace.last().clone();
    let n_max = problem.family.index_cap();
    let mut residuals = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let tu = problem.family.apply(n, &u)?;
        problem.space.ensure_contains(&tu)?;
        residuals.push(problem.space.g(&tu, &u, &u)?);
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    if !(max_residual <= opts.tau_fix) {
        return Err(Error::NonConvergence {
            steps: trace.steps(),
            residual: max_residual,
            trace: Box::new(trace),
        });
    }
    Ok((
        trace,
        FixedPointResult {
            point: u,
            residuals,
            max_residual,
            accepted: true,
            unique: None,
            transfer: None,
        },
    ))
}

/// Iterates `x_n = T_n^p(x_{n-1})` from `x0` under hypotheses that passed for
/// this exact problem, and certifies the candidate it lands on.
pub fn solve_common_fixed_point(
    problem: &Problem,
    hyp: &Hypotheses,
    x0: &Point,
    opts: &SolveOptions,
) -> Result<Solution> {
    let current = problem.fingerprint();
    if hyp.fingerprint != current {
        return Err(Error::Staleness {
            verified: hyp.fingerprint,
            current,
        });
    }
    if !hyp.passed {
        return Err(Error::HypothesesNotMet(hyp.failures.join("; ")));
    }
    let series = hyp
        .certificate_series
        .as_ref()
        .ok_or_else(|| Error::HypothesesNotMet("no α-series certificate for the rates".into()))?;
    let (trace, mut result) = settle(problem, x0, opts)?;
    let transfer = fixed_point_transfer(
        &problem.space,
        &problem.family,
        &result.point,
        problem.family.index_cap(),
        opts.tau_fix,
    )?;
    result.transfer = Some(transfer.holds);
    let certificate = ConvergenceCertificate::build(&problem.space, &trace, series, problem.degree())?;
    Ok(Solution {
        result,
        certificate,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub unique: bool,
    /// Fewer than two starts: uniqueness holds trivially.
    pub degenerate: bool,
    /// Whether the solves ran against passed hypotheses.
    pub hypotheses_checked: bool,
    pub candidates: Vec<Point>,
    /// Indices into `candidates`, grouped by `G(u, v, v) <= TAU_SAME`.
    pub clusters: Vec<Vec<usize>>,
}

/// Solves from every start and groups the candidates.
///
/// With `hyp` each start goes through [`solve_common_fixed_point`]; without it
/// the orbits run ungated, which is how a probe can expose a family that
/// violates the hypotheses.
pub fn uniqueness_probe(
    problem: &Problem,
    hyp: Option<&Hypotheses>,
    starts: &[Point],
    opts: &SolveOptions,
) -> Result<UniquenessReport> {
    if starts.is_empty() {
        return Err(Error::param("starts", "needs at least one starting point"));
    }
    let outcomes: Vec<Result<Point>> = starts
        .par_iter()
        .map(|x0| match hyp {
            Some(h) => solve_common_fixed_point(problem, h, x0, opts).map(|s| s.result.point),
            None => settle(problem, x0, opts).map(|(_, r)| r.point),
        })
        .collect();
    let mut candidates = Vec::with_capacity(starts.len());
    for (x0, out) in starts.iter().zip(outcomes) {
        match out {
            Ok(u) => candidates.push(u),
            Err(e) => {
                return Err(Error::StartFailed {
                    start: x0.clone(),
                    source: Box::new(e),
                })
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, u) in candidates.iter().enumerate() {
        let mut home = None;
        for (c, members) in clusters.iter().enumerate() {
            let v = &candidates[members[0]];
            if problem.space.g(u, v, v)? <= TAU_SAME {
                home = Some(c);
                break;
            }
        }
        match home {
            Some(c) => clusters[c].push(i),
            None => clusters.push(vec![i]),
        }
    }
    Ok(UniquenessReport {
        unique: clusters.len() == 1,
        degenerate: starts.len() < 2,
        hypotheses_checked: hyp.is_some(),
        candidates,
        clusters,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub holds: bool,
    /// Indices `i <= N_max` with `G(T_i u, u, u) <= tol`.
    pub fixed_by: Vec<usize>,
    /// First index whose map moves `u`.
    pub witness: Option<usize>,
    pub residuals: Vec<f64>,
}

/// Given that some `T_i` fixes `u`, checks that every `T_j`, `j <= n_max`, does.
pub fn fixed_point_transfer(
    space: &GSpace,
    family: &MappingFamily,
    u: &Point,
    n_max: usize,
    tol: f64,
) -> Result<TransferReport> {
    space.ensure_contains(u)?;
    if n_max == 0 {
        return Err(Error::param("n_max", "must be at least 1"));
    }
    let mut residuals = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let tu = family.apply(n, u)?;
        space.ensure_contains(&tu)?;
        residuals.push(space.g(&tu, u, u)?);
    }
    let fixed_by: Vec<usize> = (1..=n_max).filter(|&n| residuals[n - 1] <= tol).collect();
    if fixed_by.is_empty() {
        return Err(Error::param("u", format!("no T_i with i <= {n_max} fixes {u}")));
    }
    let witness = (1..=n_max).find(|&n| residuals[n - 1] > tol);
    Ok(TransferReport {
        holds: witness.is_none(),
        fixed_by,
        witness,
        residuals,
    })
}
