//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gfix_core::contractions::{
    check_condition_vetro, phi_membership_check, r_abbas, CoefficientSchedule, MappingFamily, Mode, PhiClause,
    PhiFunction, SelfMap,
};
use gfix_core::gmetric::{check_axioms, Carrier, FiniteTable, GSpace, Metric, Point};
use gfix_core::oracle::{theorem_sweep, EnumerationConfig, SweepOptions};
use gfix_core::sampling;
use gfix_core::sequences::{
    beta_from_orbit, check_alpha_series, check_lambda_sequence, search_alpha_series, search_lambda_sequence,
    RealSequence,
};
use gfix_core::solver::{
    apriori_vs_observed, picard_orbit, solve_common_fixed_point, ConvergenceCertificate, Problem, SolveOptions,
    VerifyOptions,
};
use gfix_core::tolerances::{TAU_INEQ, TAU_SAME};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    match budget {
        Some(b) if took > b => {
            o.pass = false;
            o.detail = format!("{}; {:.2?} over the {:?} budget", o.detail, took, b);
        }
        Some(b) => o.detail = format!("{}; {:.2?} of {:?}", o.detail, took, b),
        None => o.detail = format!("{}; {:.2?}", o.detail, took),
    }
    o
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Every metric on `n` points with off-diagonal distances in {1, 2, 3}.
fn small_metrics(n: usize) -> Vec<Vec<f64>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let total = 3usize.pow(pairs.len() as u32);
    for code in 0..total {
        let mut d = vec![0.0; n * n];
        let mut c = code;
        for &(i, j) in &pairs {
            let v = (c % 3 + 1) as f64;
            c /= 3;
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
        let triangle = (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| d[x * n + z] <= d[x * n + y] + d[y * n + z])));
        if triangle {
            out.push(d);
        }
    }
    out
}

/// Straight transcription of G1-G5 on a dense table, kept apart from the library.
fn independent_g_metric(n: usize, t: &FiniteTable) -> bool {
    let g = |x: usize, y: usize, z: usize| t.get(x, y, z);
    for x in 0..n {
        if g(x, x, x) != 0.0 {
            return false;
        }
        for y in 0..n {
            if x != y && !(g(x, x, y) > 0.0) {
                return false;
            }
            for z in 0..n {
                if z != y && g(x, x, y) > g(x, y, z) {
                    return false;
                }
                let v = g(x, y, z);
                if [g(x, z, y), g(y, x, z), g(y, z, x), g(z, x, y), g(z, y, x)]
                    .iter()
                    .any(|w| *w != v)
                {
                    return false;
                }
                for a in 0..n {
                    if v > g(x, a, a) + g(a, y, z) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn axiom_suite() -> Outcome {
    let mut spaces = 0usize;
    let mut failures = Vec::new();
    let mut valid: Vec<(usize, FiniteTable)> = Vec::new();
    for n in 1..=5usize {
        let budget = n.pow(4);
        let mut check = |name: String, s: GSpace| {
            let r = check_axioms(&s, budget, 0).unwrap();
            spaces += 1;
            if !(r.exhaustive && r.is_g_metric()) {
                failures.push(name);
            } else {
                valid.push((n, s.table().unwrap().clone()));
            }
        };
        check(format!("discrete_g({n})"), GSpace::discrete_g(labels(n)).unwrap());
        for (idx, d) in small_metrics(n).into_iter().enumerate() {
            let m = Metric::table(n, d).unwrap();
            check(
                format!("sum n={n} #{idx}"),
                GSpace::from_metric_sum(Carrier::finite(n), m.clone()).unwrap(),
            );
            check(
                format!("max n={n} #{idx}"),
                GSpace::from_metric_max(Carrier::finite(n), m).unwrap(),
            );
        }
    }

    // mutants: every slot of every valid table on <= 4 points, and of a
    // seeded sample of the five-point tables
    let mut rng = sampling::rng(1, "acceptance-mutants");
    let mut mutants = 0usize;
    let mut detected = 0usize;
    let mut invalid = 0usize;
    let mut missed_invalid = 0usize;
    for (n, t) in &valid {
        if *n == 5 && rng.gen_range(0..40) != 0 {
            continue;
        }
        for slot in 0..t.len() {
            let mut values = t.values().to_vec();
            values[slot] += 1.0;
            let mt = FiniteTable::from_values(*n, values).unwrap();
            let s = GSpace::from_table(labels(*n), mt.clone()).unwrap();
            let r = check_axioms(&s, n.pow(4), 0).unwrap();
            mutants += 1;
            let still_valid = independent_g_metric(*n, &mt);
            if !still_valid {
                invalid += 1;
            }
            if !r.is_g_metric() {
                detected += 1;
            } else if !still_valid {
                missed_invalid += 1;
            }
        }
    }
    let rate = detected as f64 / invalid.max(1) as f64;
    let pass = failures.is_empty() && missed_invalid == 0 && rate >= 0.95;
    outcome(
        pass,
        format!(
            "{spaces} spaces, {} rejected; {mutants} mutants, {invalid} break an axiom, {detected} flagged \
             ({:.1}% of breaking mutants), {} undetected all re-verified valid, {missed_invalid} missed",
            failures.len(),
            100.0 * rate,
            mutants - detected,
        ),
    )
}

fn amgm_and_alpha() -> Outcome {
    let mut rng = sampling::rng(2, "acceptance-amgm");
    let mut amgm_bad = 0usize;
    let mut accepted = 0usize;
    let mut alpha_bad = 0usize;
    for _ in 0..10_000 {
        let len = rng.gen_range(1..=50);
        let top: f64 = rng.gen_range(0.05..1.5);
        let r: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..top)).collect();
        let mut prod = 1.0;
        let mut sum = 0.0;
        for (i, v) in r.iter().enumerate() {
            prod *= v;
            sum += v;
            let k = (i + 1) as f64;
            let am = (sum / k).powi(i as i32 + 1);
            if prod > am * (1.0 + 1e-12) {
                amgm_bad += 1;
            }
        }
        let seq = RealSequence::new(r.clone()).unwrap();
        if let Some(cert) = search_alpha_series(&seq, len).unwrap() {
            accepted += 1;
            let lam = cert.lambda;
            let mut prod = 1.0;
            for (i, v) in r.iter().enumerate() {
                prod *= v;
                let k = i + 1;
                if k < cert.n_lambda {
                    continue;
                }
                // the acceptance test itself carries TAU_INEQ slack
                let lam_k = lam + TAU_INEQ * (1.0 + lam * k as f64) / k as f64;
                if prod > lam_k.powi(k as i32) * (1.0 + 1e-12) {
                    alpha_bad += 1;
                }
            }
        }
    }
    outcome(
        amgm_bad == 0 && alpha_bad == 0 && accepted > 0,
        format!("10000 prefixes, {amgm_bad} AM-GM failures; {accepted} α-accepted, {alpha_bad} product failures"),
    )
}

fn random_orbit(rng: &mut impl Rng) -> (GSpace, Vec<Point>) {
    let space = if rng.gen_bool(0.5) {
        GSpace::sum_abs(-2.0, 2.0).unwrap()
    } else {
        GSpace::max_abs(-2.0, 2.0).unwrap()
    };
    let len = rng.gen_range(8..=60);
    let c: f64 = rng.gen_range(0.0..0.95);
    let u: f64 = rng.gen_range(-0.5..0.5);
    let noise: f64 = rng.gen_range(0.0..0.2);
    let mut x: f64 = rng.gen_range(-1.0..1.0);
    let mut pts = Vec::with_capacity(len);
    for _ in 0..len {
        pts.push(Point::Real(x));
        x = (c * (x - u) + u + rng.gen_range(-noise..=noise)).clamp(-2.0, 2.0);
    }
    (space, pts)
}

fn series_equivalences() -> Outcome {
    let mut rng = sampling::rng(3, "acceptance-series");
    let (mut orbits, mut orbit_fail, mut tries) = (0usize, 0usize, 0usize);
    while orbits < 1000 && tries < 100_000 {
        tries += 1;
        let (space, pts) = random_orbit(&mut rng);
        let beta = beta_from_orbit(&space, &pts).unwrap();
        let l_max = beta.len() + 1;
        let Some(cert) = search_lambda_sequence(&beta, l_max).unwrap() else {
            continue;
        };
        orbits += 1;
        let a = check_alpha_series(&beta.shifted_for_alpha(), cert.lambda, cert.n_lambda + 1, l_max).unwrap();
        if !a.accepted() {
            orbit_fail += 1;
        }
    }

    let (mut mono, mut mono_fail, mut tries2) = (0usize, 0usize, 0usize);
    while mono < 1000 && tries2 < 100_000 {
        tries2 += 1;
        let len = rng.gen_range(4..=60);
        let top: f64 = rng.gen_range(0.1..3.0);
        let mut v: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..top)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        let seq = RealSequence::new(v).unwrap();
        let d = seq.max_pairing_distances();
        let l_max = d.len() + 1;
        let Some(cert) = search_lambda_sequence(&d, l_max).unwrap() else {
            continue;
        };
        mono += 1;
        let direct = check_lambda_sequence(&d, cert.lambda, cert.n_lambda, l_max).unwrap();
        let a = check_alpha_series(&d.shifted_for_alpha(), cert.lambda, cert.n_lambda + 1, l_max).unwrap();
        if !(direct.accepted() && a.accepted()) {
            mono_fail += 1;
        }
    }
    outcome(
        orbits == 1000 && mono == 1000 && orbit_fail == 0 && mono_fail == 0,
        format!(
            "{orbits} λ-sequence orbits ({orbit_fail} failures), {mono} non-increasing sequences ({mono_fail} failures)"
        ),
    )
}

fn rate_chain() -> Outcome {
    let mut rng = sampling::rng(4, "acceptance-rates");
    let mut samples: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, 0.0), (0.25, 0.0, 0.0), (0.49, 0.0, 0.0)];
    while samples.len() < 10_000 {
        let (a, b, c): (f64, f64, f64) = (
            rng.gen_range(0.0..0.5),
            rng.gen_range(0.0..0.17),
            rng.gen_range(0.0..0.125),
        );
        if a + 3.0 * b + 4.0 * c < 0.5 {
            samples.push((a, b, c));
        }
    }
    let mut rate_bad = 0usize;
    let mut chain = Vec::new();
    for &(a, b, c) in &samples {
        let r = r_abbas(a, b, c).unwrap();
        if !(r < 0.5) {
            rate_bad += 1;
        }
        let left = (a + 2.0 * b + 3.0 * c) / (1.0 - b - c);
        if !(left < a + 3.0 * b + 4.0 * c) {
            chain.push((a, b, c, left));
        }
    }
    for (a, b, c, left) in chain.iter().take(3) {
        println!(
            "    chain counterexample: a={a} b={b} c={c}: (a+2b+3c)/(1-b-c) = {left} is not < a+3b+4c = {}",
            a + 3.0 * b + 4.0 * c
        );
    }
    outcome(
        rate_bad == 0,
        format!(
            "{} samples, {rate_bad} with r >= 1/2; strict chain fails on {} (reported only)",
            samples.len(),
            chain.len()
        ),
    )
}

fn halving_certificate() -> Outcome {
    let s = GSpace::sum_abs(-2.0, 2.0).unwrap();
    let fam = MappingFamily::repeated(SelfMap::Affine { scale: 0.5, shift: 0.0 }, 64).unwrap();
    let t = picard_orbit(&s, &fam, &Point::Real(1.0), 40, 1e-300).unwrap();
    let cert = ConvergenceCertificate::assumed(&s, &t, 0.6, 1).unwrap();
    let rep = apriori_vs_observed(&s, &t, &cert, 20_000, 5).unwrap();
    outcome(
        rep.sound && rep.exhaustive && rep.checked == 9880,
        format!(
            "{} triples, exhaustive {}, {} bound violations",
            rep.checked,
            rep.exhaustive,
            rep.bound_violations.len()
        ),
    )
}

fn oracle_sweep() -> Outcome {
    let r = theorem_sweep(&SweepOptions {
        config: EnumerationConfig {
            carrier_size: 3,
            family_size: 2,
            mode: Mode::Abbas,
            ..EnumerationConfig::default()
        },
        ..SweepOptions::default()
    })
    .unwrap();
    outcome(
        r.clean(),
        format!(
            "{} instances, {} meet the hypotheses, {} red flags",
            r.instances,
            r.hypotheses_met,
            r.red_flags.len()
        ),
    )
}

/// Affine maps `x -> c (x - u) + u` sharing the point `u`.
fn affine_family(rng: &mut impl Rng, max_scale: f64) -> (MappingFamily, f64) {
    let u: f64 = rng.gen_range(-0.5..0.5);
    let maps = (0..rng.gen_range(1..=4))
        .map(|_| {
            let c: f64 = rng.gen_range(0.0..max_scale);
            SelfMap::Affine {
                scale: c,
                shift: u * (1.0 - c),
            }
        })
        .collect();
    (MappingFamily::new(maps, 64).unwrap(), u)
}

fn power_paths() -> Outcome {
    let mut rng = sampling::rng(7, "acceptance-power");
    let space = GSpace::sum_abs(-1.0, 1.0).unwrap();
    let mut runs = 0usize;
    let mut bad = Vec::new();
    let verify = VerifyOptions {
        triple_samples: 2000,
        ..VerifyOptions::default()
    };
    for inst in 0..100 {
        let (fam, _) = affine_family(&mut rng, 0.1);
        let x0 = Point::Real(rng.gen_range(-1.0..1.0));
        for p in 1..=3 {
            runs += 1;
            let problem = Problem::new(
                space.clone(),
                fam.clone(),
                CoefficientSchedule::vetro_constant(0.25, 0.1),
                Mode::Vetro,
            )
            .with_power(p);
            let hyp = problem.verify(&verify).unwrap();
            let direct = solve_common_fixed_point(&problem, &hyp, &x0, &SolveOptions::default());
            let via = solve_common_fixed_point(
                &problem,
                &hyp,
                &x0,
                &SolveOptions {
                    via_power_family: true,
                    ..SolveOptions::default()
                },
            );
            match (direct, via) {
                (Ok(a), Ok(b)) => {
                    let gap = space
                        .evaluate_g(&a.result.point, &b.result.point, &b.result.point)
                        .unwrap();
                    let fixed = a.result.residuals.len() == 64 && a.result.accepted && b.result.accepted;
                    if !(gap <= TAU_SAME && fixed) {
                        bad.push(format!("instance {inst} p={p}: gap {gap}"));
                    }
                }
                (a, b) => bad.push(format!("instance {inst} p={p}: {:?} / {:?}", a.err(), b.err())),
            }
        }
    }
    for b in bad.iter().take(3) {
        println!("    {b}");
    }
    outcome(
        bad.is_empty(),
        format!("{runs} solves per path, {} mismatches", bad.len()),
    )
}

fn phi_gates() -> Outcome {
    let id = phi_membership_check(&PhiFunction::identity(), 512, 10.0, 8).unwrap();
    let root = phi_membership_check(&PhiFunction::root(2.0), 512, 10.0, 8).unwrap();
    let square = phi_membership_check(&PhiFunction::power(2.0), 512, 10.0, 8).unwrap();
    let witness = square.first(PhiClause::SubAdditive).cloned();
    if let Some(w) = &witness {
        println!(
            "    t^2 sub-additivity witness: inputs {:?}, F(a+b) = {} > F(a)+F(b) = {}",
            w.inputs, w.lhs, w.rhs
        );
    }

    let mut rng = sampling::rng(8, "acceptance-scaling");
    let space = GSpace::sum_abs(-1.0, 1.0).unwrap();
    let mut agree = 0usize;
    let mut holds = 0usize;
    for inst in 0..100u64 {
        let (fam, _) = affine_family(&mut rng, 0.6);
        let sched = CoefficientSchedule::vetro_constant(rng.gen_range(0.0..0.9), rng.gen_range(0.0..0.9));
        let f = if rng.gen_bool(0.5) {
            PhiFunction::identity()
        } else {
            PhiFunction::root(2.0)
        };
        let c: f64 = rng.gen_range(0.1..10.0);
        let a = check_condition_vetro(&space, &fam, &sched, &f, 1, 500, inst).unwrap();
        let b = check_condition_vetro(&space, &fam, &sched, &f.scaled(c), 1, 500, inst).unwrap();
        if a.holds == b.holds {
            agree += 1;
        }
        if a.holds {
            holds += 1;
        }
    }
    outcome(
        id.member && root.member && !square.member && witness.is_some() && agree == 100,
        format!(
            "identity {}, sqrt {}, t^2 {}; scaling verdicts agree on {agree}/100 ({holds} hold)",
            id.member, root.member, square.member
        ),
    )
}

/// Exit code, stdout and every output file, sorted by name.
type Run = (i32, Vec<u8>, Vec<(String, Vec<u8>)>);

fn run_cli(bin: &Path, args: &[&str], out: &Path) -> Option<Run> {
    let o = Command::new(bin).args(args).arg("--out").arg(out).output().ok()?;
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
        .ok()?
        .filter_map(|e| e.ok())
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap_or_default(),
            )
        })
        .collect();
    files.sort();
    Some((o.status.code().unwrap_or(-1), o.stdout, files))
}

fn determinism() -> Outcome {
    let bin = Path::new(env!("CARGO_BIN_EXE_gfix"));
    let dir = tempfile::tempdir().unwrap();
    let halving = r#"{"kind":"affine_real","maps":[{"scale":0.5,"shift":0.0}],"index_cap":64}"#;
    let sched = r#"{"form":"vetro","theta":0.0,"delta":0.6}"#;
    let space = r#"{"builtin":"sum_abs","lo":-2.0,"hi":2.0}"#;
    let commands: Vec<Vec<&str>> = vec![
        vec!["check-axioms", "--space", space, "--budget", "2000"],
        vec!["check-series", "--sequence", "0.5,0.25,0.125,0.0625,0.03125,0.015625"],
        vec![
            "check-condition",
            "--space",
            space,
            "--family",
            halving,
            "--schedule",
            sched,
            "--mode",
            "vetro",
            "--budget",
            "3000",
        ],
        vec![
            "solve",
            "--space",
            space,
            "--family",
            halving,
            "--schedule",
            sched,
            "--mode",
            "vetro",
            "--p",
            "2",
        ],
        vec![
            "probe-uniqueness",
            "--space",
            space,
            "--family",
            halving,
            "--schedule",
            sched,
            "--mode",
            "vetro",
        ],
        vec!["sweep", "--carrier-size", "2"],
    ];
    let mut same = 0usize;
    let mut notes = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let mut seeded: Vec<&str> = args.clone();
        seeded.extend(["--seed", "11"]);
        let a = run_cli(bin, &seeded, &dir.path().join(format!("{i}a")));
        let b = run_cli(bin, &seeded, &dir.path().join(format!("{i}b")));
        match (a, b) {
            (Some(a), Some(b)) if a == b && a.0 == 0 && !a.2.is_empty() => same += 1,
            (Some(a), Some(b)) => notes.push(format!("{} exit {} / {}", args[0], a.0, b.0)),
            _ => notes.push(format!("{} did not run", args[0])),
        }
    }
    for n in &notes {
        println!("    {n}");
    }
    outcome(
        same == commands.len(),
        format!("{same}/{} subcommands byte-identical across two runs", commands.len()),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);
    let criteria: Vec<Criterion> = vec![
        (
            "axiom suite and mutation detection",
            Some(Duration::from_secs(30)),
            axiom_suite,
        ),
        (
            "AM-GM and α-series products",
            Some(Duration::from_secs(10)),
            amgm_and_alpha,
        ),
        ("λ-sequence / α-series equivalences", None, series_equivalences),
        ("three-term rate below 1/2", Some(Duration::from_secs(5)), rate_chain),
        (
            "halving certificate soundness",
            Some(Duration::from_secs(1)),
            halving_certificate,
        ),
        (
            "oracle sweep, carrier <= 3",
            Some(Duration::from_secs(60)),
            oracle_sweep,
        ),
        ("power-path equality", None, power_paths),
        ("Φ gates and scaling invariance", None, phi_gates),
        ("CLI determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.into_iter().enumerate() {
        let o = timed(budget, f);
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
