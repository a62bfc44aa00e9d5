use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::{
    enumerate_families, enumerate_schedules, enumerate_tables, labels, walk_candidates, Dense, EnumerationConfig,
    FiniteInstance, InstanceRecord, InstanceSchedule,
};
use crate::contractions::{AbbasThreshold, Mode};
use crate::error::Result;
use crate::gmetric::{check_axioms, FiniteSpaceFile, FiniteTable, GSpace, Point};
use crate::sequences::lambda_grid;
use crate::solver::{
    fixed_point_transfer, picard_orbit, solve_common_fixed_point, Problem, SolveOptions, Termination, VerifyOptions,
};
use crate::tolerances::leq;

/// `{ u : T(u) = u for every map }`, by direct scan.
pub fn brute_force_common_fixed_points(inst: &FiniteInstance) -> Vec<usize> {
    (0..inst.size())
        .filter(|&u| inst.maps.iter().all(|m| m[u] == u))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub config: EnumerationConfig,
    pub threshold: AbbasThreshold,
    /// Replaces the oracle's rate formula by 0; exists to prove the sweep can fail.
    pub inject_rate_bug: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            config: EnumerationConfig::default(),
            threshold: AbbasThreshold::Half,
            inject_rate_bug: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedFlagKind {
    /// The exhaustive axiom checker and the oracle's filter disagree on a table.
    AxiomDisagreement,
    /// The oracle says the hypotheses hold but the library's check does not.
    CheckerDisagreement,
    /// Hypotheses hold but the common fixed point set is not a singleton.
    NotSingleton,
    /// An orbit did not reach the common fixed point.
    OrbitMissed,
    /// The solver returned a point other than the common fixed point.
    SolverMismatch,
    /// A fixed point of one map is not fixed by another.
    TransferFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RedFlag {
    pub kind: RedFlagKind,
    pub detail: String,
    /// The full instance, or just the table for axiom disagreements.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<FiniteSpaceFile>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CarrierCounts {
    pub carrier_size: usize,
    pub candidate_tables: usize,
    pub valid_tables: usize,
    pub instances: usize,
    pub hypotheses_met: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub options: SweepOptions,
    pub instances: usize,
    pub hypotheses_met: usize,
    pub by_carrier: Vec<CarrierCounts>,
    pub red_flags: Vec<RedFlag>,
}

impl SweepReport {
    pub fn clean(&self) -> bool {
        self.red_flags.is_empty()
    }
}

/// Per (table, family) precomputation: the condition's ingredients at every
/// index triple and point triple.
enum Terms {
    /// `(lhs, G(x,y,z), own, mixed)` for all `x, y, z`.
    Abbas(Vec<[f64; 4]>),
    /// `(lhs, G(x,y,z), bracket)` for `x != y`.
    Vetro(Vec<[f64; 3]>),
}

fn terms(g: &Dense, maps: &[Vec<usize>], mode: Mode) -> Terms {
    let n = g.n;
    let m = maps.len();
    let mut abbas = Vec::new();
    let mut vetro = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for x in 0..n {
                    for y in 0..n {
                        for z in 0..n {
                            let (tx, ty, tz) = (maps[i][x], maps[j][y], maps[k][z]);
                            let lhs = g.at(tx, ty, tz);
                            let gxyz = g.at(x, y, z);
                            match mode {
                                Mode::Vetro => {
                                    if x != y {
                                        let bracket = g.at(x, tx, tx) + 0.5 * (g.at(y, ty, ty) + g.at(z, tz, tz));
                                        vetro.push([lhs, gxyz, bracket]);
                                    }
                                }
                                _ => {
                                    let own = g.at(tx, x, x) + g.at(y, ty, y) + g.at(z, z, tz);
                                    let mixed = g.at(tx, y, z) + g.at(x, ty, z) + g.at(x, y, tz);
                                    abbas.push([lhs, gxyz, own, mixed]);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    match mode {
        Mode::Vetro => Terms::Vetro(vetro),
        _ => Terms::Abbas(abbas),
    }
}

fn oracle_rate(s: InstanceSchedule, bug: bool) -> Option<f64> {
    if bug {
        return Some(0.0);
    }
    let (num, den) = match s {
        InstanceSchedule::Vetro { theta, delta } => (theta + delta, 1.0 - theta),
        InstanceSchedule::Abbas { a, b, c } => (a + 2.0 * b + 3.0 * c, 1.0 - b - c),
    };
    (den > 0.0).then(|| num / den)
}

/// The oracle's own decision of the hypotheses for a constant schedule.
fn hypotheses_hold(t: &Terms, s: InstanceSchedule, threshold: AbbasThreshold, bug: bool) -> bool {
    let scalar_ok = match s {
        InstanceSchedule::Vetro { theta, delta } => theta < 1.0 && delta < 1.0,
        InstanceSchedule::Abbas { a, b, c } => a + 3.0 * b + 4.0 * c < threshold.value(),
    };
    if !scalar_ok {
        return false;
    }
    // a constant sequence is an α-series iff some grid λ is at least r
    let lambda_max = lambda_grid().fold(0.0, f64::max);
    match oracle_rate(s, bug) {
        Some(r) if leq(r, lambda_max) => {}
        _ => return false,
    }
    match (t, s) {
        (Terms::Vetro(v), InstanceSchedule::Vetro { theta, delta }) => v
            .iter()
            .all(|[lhs, gxyz, bracket]| leq(*lhs, theta * bracket + delta * gxyz)),
        (Terms::Abbas(v), InstanceSchedule::Abbas { a, b, c }) => v
            .iter()
            .all(|[lhs, gxyz, own, mixed]| leq(*lhs, a * gxyz + b * own + c * mixed)),
        _ => unreachable!("terms follow the schedule form"),
    }
}

struct Outcome {
    instances: usize,
    met: usize,
    flags: Vec<RedFlag>,
}

fn flag(kind: RedFlagKind, detail: String, inst: &FiniteInstance) -> RedFlag {
    RedFlag {
        kind,
        detail,
        instance: Some(inst.record()),
        table: None,
    }
}

/// Asserts the theorem's conclusions on an instance whose hypotheses hold.
fn conclusions(inst: &FiniteInstance, threshold: AbbasThreshold, flags: &mut Vec<RedFlag>) -> Result<()> {
    let fixed = brute_force_common_fixed_points(inst);
    if fixed.len() != 1 {
        flags.push(flag(
            RedFlagKind::NotSingleton,
            format!("common fixed points {fixed:?}"),
            inst,
        ));
        return Ok(());
    }
    let u = Point::Index(fixed[0]);
    let space = inst.space();
    let family = inst.family();
    let n = inst.size();
    let m = inst.maps.len();
    let steps = 4 * n * m + 8;

    for x0 in 0..n {
        let t = picard_orbit(&space, &family, &Point::Index(x0), steps, 1e-12)?;
        if t.last() != &u || t.termination != Termination::Converged {
            flags.push(flag(
                RedFlagKind::OrbitMissed,
                format!("orbit from {x0} ends at {} ({:?})", t.last(), t.termination),
                inst,
            ));
        }
    }

    let problem = Problem::new(space.clone(), family.clone(), inst.schedule.to_schedule(m), inst.mode())
        .with_threshold(threshold);
    let verify = VerifyOptions {
        triple_samples: (n * m).pow(3),
        ..VerifyOptions::default()
    };
    let hyp = problem.verify(&verify)?;
    if !hyp.passed {
        flags.push(flag(
            RedFlagKind::CheckerDisagreement,
            format!("library check rejects: {}", hyp.failures.join("; ")),
            inst,
        ));
    } else {
        let opts = SolveOptions {
            max_steps: steps,
            ..SolveOptions::default()
        };
        for x0 in 0..n {
            match solve_common_fixed_point(&problem, &hyp, &Point::Index(x0), &opts) {
                Ok(s) if s.result.point == u => {}
                Ok(s) => flags.push(flag(
                    RedFlagKind::SolverMismatch,
                    format!("solve from {x0} returned {}", s.result.point),
                    inst,
                )),
                Err(e) => flags.push(flag(
                    RedFlagKind::SolverMismatch,
                    format!("solve from {x0} failed: {e}"),
                    inst,
                )),
            }
        }
    }

    for (i, map) in inst.maps.iter().enumerate() {
        for v in (0..n).filter(|&v| map[v] == v) {
            let rep = fixed_point_transfer(&space, &family, &Point::Index(v), m, 0.0)?;
            if !rep.holds {
                flags.push(flag(
                    RedFlagKind::TransferFailed,
                    format!(
                        "{v} is fixed by T_{} but moved by T_{}",
                        i + 1,
                        rep.witness.unwrap_or(0)
                    ),
                    inst,
                ));
            }
        }
    }
    Ok(())
}

/// Enumerates every instance, decides the hypotheses exhaustively and, where
/// they hold, checks uniqueness, orbit convergence and fixed point transfer.
/// Failures accumulate as red flags; they never stop the sweep.
pub fn theorem_sweep(opts: &SweepOptions) -> Result<SweepReport> {
    let cfg = &opts.config;
    cfg.validate()?;
    let schedules = enumerate_schedules(cfg.mode, &cfg.coeff_grid);
    let mut by_carrier = Vec::new();
    let mut red_flags = Vec::new();

    for n in 1..=cfg.carrier_size {
        let mut counts = CarrierCounts {
            carrier_size: n,
            ..CarrierCounts::default()
        };
        walk_candidates(n, &cfg.g_value_grid, cfg.cap, |entries, valid| {
            counts.candidate_tables += 1;
            let table = FiniteTable::from_entries(n, entries)?;
            let space = GSpace::from_table(labels(n), table)?;
            let report = check_axioms(&space, n.pow(4).max(1), 0)?;
            if report.is_g_metric() != valid || !report.exhaustive {
                red_flags.push(RedFlag {
                    kind: RedFlagKind::AxiomDisagreement,
                    detail: format!(
                        "oracle filter says {valid}, exhaustive check says {}",
                        report.is_g_metric()
                    ),
                    instance: None,
                    table: Some(FiniteSpaceFile::from_space(&space)?),
                });
            }
            Ok(())
        })?;

        let tables = enumerate_tables(n, &cfg.g_value_grid, cfg.cap)?;
        counts.valid_tables = tables.len();
        let families: Vec<Vec<Vec<usize>>> = (1..=cfg.family_size)
            .flat_map(|len| enumerate_families(n, len))
            .collect();
        let work: Vec<(usize, usize)> = (0..tables.len())
            .flat_map(|t| (0..families.len()).map(move |f| (t, f)))
            .collect();

        let outcomes: Vec<Result<Outcome>> = work
            .par_iter()
            .map(|&(t, f)| {
                let table = &tables[t];
                let maps = &families[f];
                let dense = Dense::from_table(table);
                let tm = terms(&dense, maps, cfg.mode);
                let mut out = Outcome {
                    instances: 0,
                    met: 0,
                    flags: Vec::new(),
                };
                for &schedule in &schedules {
                    out.instances += 1;
                    if hypotheses_hold(&tm, schedule, opts.threshold, opts.inject_rate_bug) {
                        out.met += 1;
                        let inst = FiniteInstance {
                            table: table.clone(),
                            maps: maps.clone(),
                            schedule,
                        };
                        conclusions(&inst, opts.threshold, &mut out.flags)?;
                    }
                }
                Ok(out)
            })
            .collect();
        for o in outcomes {
            let o = o?;
            counts.instances += o.instances;
            counts.hypotheses_met += o.met;
            red_flags.extend(o.flags);
        }
        by_carrier.push(counts);
    }

    Ok(SweepReport {
        options: opts.clone(),
        instances: by_carrier.iter().map(|c| c.instances).sum(),
        hypotheses_met: by_carrier.iter().map(|c| c.hypotheses_met).sum(),
        by_carrier,
        red_flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmetric::FiniteTable;

    fn discrete(n: usize) -> FiniteTable {
        GSpace::discrete_g(labels(n)).unwrap().table().unwrap().clone()
    }

    #[test]
    fn brute_force_examples() {
        let inst = |maps: Vec<Vec<usize>>| FiniteInstance {
            table: discrete(3),
            maps,
            schedule: InstanceSchedule::Abbas {
                a: 0.4,
                b: 0.01,
                c: 0.01,
            },
        };
        assert_eq!(
            brute_force_common_fixed_points(&inst(vec![vec![2, 2, 2], vec![2, 2, 2]])),
            vec![2]
        );
        assert_eq!(
            brute_force_common_fixed_points(&inst(vec![vec![0, 1, 2]])),
            vec![0, 1, 2]
        );
        assert_eq!(brute_force_common_fixed_points(&inst(vec![vec![0, 0, 1]])), vec![0]);
    }

    #[test]
    fn constant_family_on_discrete_space() {
        let inst = FiniteInstance {
            table: discrete(2),
            maps: vec![vec![0, 0]],
            schedule: InstanceSchedule::Abbas {
                a: 0.4,
                b: 0.01,
                c: 0.01,
            },
        };
        let tm = terms(&Dense::from_table(&inst.table), &inst.maps, Mode::Abbas);
        assert!(hypotheses_hold(&tm, inst.schedule, AbbasThreshold::Half, false));
        let mut flags = Vec::new();
        conclusions(&inst, AbbasThreshold::Half, &mut flags).unwrap();
        assert!(flags.is_empty(), "{flags:?}");
        // the swap violates the condition
        let swap = terms(&Dense::from_table(&inst.table), &[vec![1, 0]], Mode::Abbas);
        assert!(!hypotheses_hold(&swap, inst.schedule, AbbasThreshold::Half, false));
    }

    #[test]
    fn small_sweeps_are_clean() {
        for mode in [Mode::Abbas, Mode::Vetro] {
            let opts = SweepOptions {
                config: EnumerationConfig {
                    carrier_size: 2,
                    mode,
                    ..EnumerationConfig::default()
                },
                ..SweepOptions::default()
            };
            let r = theorem_sweep(&opts).unwrap();
            assert!(r.clean(), "{:?}", r.red_flags);
            assert!(r.hypotheses_met > 0);
        }
    }

    #[test]
    fn rate_bug_is_caught() {
        let opts = SweepOptions {
            config: EnumerationConfig {
                carrier_size: 2,
                coeff_grid: vec![0.9],
                mode: Mode::Vetro,
                ..EnumerationConfig::default()
            },
            inject_rate_bug: true,
            ..SweepOptions::default()
        };
        let r = theorem_sweep(&opts).unwrap();
        assert!(!r.clean());
    }
}
