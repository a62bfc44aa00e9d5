use std::fs;
use std::path::Path;

use gfix_core::contractions::{check_condition_abbas, check_condition_vetro, Mode, PhiFunction};
use gfix_core::gmetric::{check_axioms, check_symmetric, Point};
use gfix_core::oracle::{theorem_sweep, EnumerationConfig, SweepOptions};
use gfix_core::sampling;
use gfix_core::sequences::{check_alpha_series, check_lambda_sequence, search_alpha_series, search_lambda_sequence};
use gfix_core::solver::{
    orbit_table, solve_common_fixed_point, uniqueness_probe, Problem, SolveOptions, VerifyOptions,
};
use gfix_core::Error;
use serde::Serialize;
use serde_json::json;

use crate::config::{self, ConfigError};
use crate::{Command, Common, Form, ProblemArgs, RunArgs};

pub enum Status {
    Pass,
    Fail,
    Config,
    Budget,
}

impl Status {
    pub fn code(&self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Config => 2,
            Status::Budget => 3,
        }
    }

    fn from_check(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

enum Failure {
    Config(String),
    Core(Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type Outcome = Result<Status, Failure>;

pub fn run(cmd: Command) -> Status {
    let result = match cmd {
        Command::CheckAxioms { common, space, budget } => check_axioms_cmd(&common, &space, budget),
        Command::CheckSeries {
            common,
            sequence,
            form,
            lambda,
            n_lambda,
        } => check_series_cmd(&common, &sequence, form, lambda, n_lambda),
        Command::CheckCondition {
            common,
            problem,
            budget,
        } => check_condition_cmd(&common, &problem, budget),
        Command::Solve { common, problem, run } => solve_cmd(&common, &problem, &run),
        Command::ProbeUniqueness {
            common,
            problem,
            run,
            starts,
        } => probe_cmd(&common, &problem, &run, starts),
        Command::Sweep {
            common,
            carrier_size,
            family_size,
            g_grid,
            coeff_grid,
            mode,
            threshold,
            budget,
            inject_rate_bug,
        } => sweep_cmd(
            &common,
            SweepOptions {
                config: EnumerationConfig {
                    carrier_size,
                    family_size,
                    g_value_grid: g_grid,
                    coeff_grid,
                    mode: mode.into(),
                    cap: budget,
                },
                threshold: threshold.into(),
                inject_rate_bug,
            },
        ),
    };
    match result {
        Ok(s) => s,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            Status::Config
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    }
}

fn classify(e: &Error) -> Status {
    match e {
        Error::Budget { .. } => Status::Budget,
        Error::StartFailed { source, .. } => classify(source),
        Error::Domain(_)
        | Error::Parameter { .. }
        | Error::Mode(_)
        | Error::Table(_)
        | Error::Io(_)
        | Error::Json(_) => Status::Config,
        _ => Status::Fail,
    }
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(value).map_err(Error::Json)?;
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn check_axioms_cmd(common: &Common, space: &str, budget: usize) -> Outcome {
    let space = config::space(space)?;
    let axioms = check_axioms(&space, budget, common.seed)?;
    let symmetry = check_symmetric(&space, budget, common.seed)?;
    write_json(
        &common.out,
        "axioms.json",
        &json!({ "axioms": axioms, "symmetry": symmetry }),
    )?;
    let ok = axioms.is_g_metric();
    println!(
        "G-metric: {ok} ({} {}, {} violations); symmetric: {}",
        axioms.samples,
        if axioms.exhaustive { "exhaustive" } else { "sampled" },
        axioms.violations.len(),
        symmetry.symmetric
    );
    for v in axioms.violations.iter().take(3) {
        println!("  {:?} at {:?}: {:?}", v.axiom, v.points, v.values);
    }
    Ok(Status::from_check(ok))
}

fn check_series_cmd(common: &Common, seq: &str, form: Form, lambda: Option<f64>, n_lambda: usize) -> Outcome {
    let seq = config::sequence(seq)?;
    let cert = match (form, lambda) {
        (Form::Alpha, Some(l)) => Some(check_alpha_series(&seq, l, n_lambda, seq.len())?),
        (Form::Alpha, None) => search_alpha_series(&seq, seq.len())?,
        (Form::Lambda, Some(l)) => Some(check_lambda_sequence(&seq, l, n_lambda, seq.len() + 1)?),
        (Form::Lambda, None) => search_lambda_sequence(&seq, seq.len() + 1)?,
    };
    write_json(&common.out, "series.json", &json!({ "certificate": cert }))?;
    let ok = cert.as_ref().is_some_and(|c| c.accepted());
    match &cert {
        Some(c) if c.accepted() => println!(
            "accepted up to L = {} at λ = {}, n(λ) = {}",
            c.verified_up_to, c.lambda, c.n_lambda
        ),
        Some(c) => println!("rejected at λ = {}: fails at L = {:?}", c.lambda, c.witness),
        None => println!("no (λ, n(λ)) on the grid accepts the sequence"),
    }
    Ok(Status::from_check(ok))
}

fn build_problem(args: &ProblemArgs) -> Result<Problem, Failure> {
    // every document parses before any computation starts
    let space = config::space(&args.space)?;
    let family = config::family(&args.family, &space)?;
    let schedule = config::schedule(&args.schedule, family.index_cap())?;
    let phi = args.phi.as_deref().map(config::phi).transpose()?;
    let mut problem = Problem::new(space, family, schedule, args.mode.into())
        .with_power(args.p)
        .with_threshold(args.threshold.into());
    if let Some(f) = phi {
        problem = problem.with_phi(f);
    }
    Ok(problem)
}

fn check_condition_cmd(common: &Common, args: &ProblemArgs, budget: usize) -> Outcome {
    let problem = build_problem(args)?;
    let report = match problem.mode {
        Mode::Vetro => check_condition_vetro(
            &problem.space,
            &problem.family,
            &problem.schedule,
            problem.phi.as_ref().unwrap_or(&PhiFunction::identity()),
            problem.power,
            budget,
            common.seed,
        ),
        Mode::Abbas | Mode::AbbasPhi => check_condition_abbas(
            &problem.space,
            &problem.family,
            &problem.schedule,
            problem.phi.as_ref(),
            problem.power,
            budget,
            common.seed,
        ),
    };
    let report = match report {
        Ok(r) => r,
        Err(e @ Error::HypothesisViolation { .. }) => {
            write_json(&common.out, "condition.json", &json!({ "error": e.to_string() }))?;
            println!("{e}");
            return Ok(Status::Fail);
        }
        Err(e) => return Err(e.into()),
    };
    write_json(&common.out, "condition.json", &report)?;
    println!(
        "condition holds: {} ({} cases, {}); {} = {}",
        report.holds,
        report.checked,
        if report.exhaustive { "exhaustive" } else { "sampled" },
        report.hypothesis.expression,
        report.hypothesis.worst
    );
    if let Some(v) = report.first_violation() {
        println!(
            "  first violation at (i, j, k) = ({}, {}, {}), (x, y, z) = ({}, {}, {}): {} > {}",
            v.i, v.j, v.k, v.x, v.y, v.z, v.lhs, v.rhs
        );
    }
    Ok(Status::from_check(report.holds))
}

fn verify_options(common: &Common, run: &RunArgs) -> VerifyOptions {
    VerifyOptions {
        triple_samples: run.budget,
        seed: common.seed,
        lambda: run.lambda,
        n_lambda: run.n_lambda,
        ..VerifyOptions::default()
    }
}

fn solve_options(run: &RunArgs) -> SolveOptions {
    SolveOptions {
        max_steps: run.max_steps,
        tol: run.tol,
        tau_fix: run.tau_fix,
        via_power_family: run.via_power_family,
    }
}

fn solve_cmd(common: &Common, args: &ProblemArgs, run: &RunArgs) -> Outcome {
    let problem = build_problem(args)?;
    let x0 = match run.x0 {
        Some(v) => config::point_in(&problem.space, v)?,
        None => config::default_start(&problem.space),
    };
    let hyp = problem.verify(&verify_options(common, run))?;
    write_json(&common.out, "hypotheses.json", &hyp)?;
    if !hyp.passed {
        println!("hypotheses not met:");
        for f in &hyp.failures {
            println!("  {f}");
        }
        return Ok(Status::Fail);
    }
    match solve_common_fixed_point(&problem, &hyp, &x0, &solve_options(run)) {
        Ok(sol) => {
            write_json(&common.out, "result.json", &sol.result)?;
            write_json(&common.out, "certificate.json", &sol.certificate)?;
            fs::write(
                common.out.join("orbit.csv"),
                orbit_table(&sol.trace, Some(&sol.certificate)),
            )?;
            let ok = sol.result.accepted && sol.certificate.sound;
            println!(
                "u = {} after {} steps; max residual {:e}; certificate λ = {}, n(λ) = {}, sound: {}",
                sol.result.point,
                sol.trace.steps(),
                sol.result.max_residual,
                sol.certificate.lambda,
                sol.certificate.n_lambda,
                sol.certificate.sound
            );
            Ok(Status::from_check(ok))
        }
        Err(Error::NonConvergence { steps, residual, trace }) => {
            fs::write(common.out.join("orbit.csv"), orbit_table(&trace, None))?;
            let msg = format!("no convergence after {steps} steps (last residual {residual:e})");
            write_json(&common.out, "result.json", &json!({ "error": msg }))?;
            println!("{msg}");
            Ok(Status::Fail)
        }
        Err(e) => Err(e.into()),
    }
}

fn probe_cmd(common: &Common, args: &ProblemArgs, run: &RunArgs, count: usize) -> Outcome {
    let problem = build_problem(args)?;
    let starts: Vec<Point> = match problem.space.carrier().points() {
        Some(all) => all,
        None => {
            let mut rng = sampling::rng(common.seed, "probe_starts");
            (0..count.max(1))
                .map(|_| problem.space.carrier().sample(&mut rng))
                .collect()
        }
    };
    let hyp = problem.verify(&verify_options(common, run))?;
    let gate = hyp.passed.then_some(&hyp);
    let report = uniqueness_probe(&problem, gate, &starts, &solve_options(run))?;
    write_json(
        &common.out,
        "uniqueness.json",
        &json!({ "hypotheses": hyp, "starts": starts, "report": report }),
    )?;
    println!(
        "{} starts, {} clusters; unique: {}; hypotheses {}",
        starts.len(),
        report.clusters.len(),
        report.unique,
        if hyp.passed {
            "met"
        } else {
            "not met (orbits ran ungated)"
        }
    );
    Ok(Status::from_check(report.unique))
}

fn sweep_cmd(common: &Common, opts: SweepOptions) -> Outcome {
    let report = theorem_sweep(&opts)?;
    write_json(&common.out, "sweep.json", &report)?;
    let flags = common.out.join("red_flags");
    if flags.exists() {
        fs::remove_dir_all(&flags)?;
    }
    for (i, f) in report.red_flags.iter().enumerate() {
        let name = format!("flag_{i:04}.json");
        match (&f.instance, &f.table) {
            (Some(inst), _) => write_json(&flags, &name, inst)?,
            (None, Some(table)) => write_json(&flags, &name, table)?,
            (None, None) => write_json(&flags, &name, f)?,
        }
    }
    println!(
        "{} instances, {} meet the hypotheses, {} red flags",
        report.instances,
        report.hypotheses_met,
        report.red_flags.len()
    );
    for f in report.red_flags.iter().take(3) {
        println!("  {:?}: {}", f.kind, f.detail);
    }
    Ok(Status::from_check(report.clean()))
}
