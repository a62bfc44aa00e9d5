//! JSON documents accepted by `--space`, `--family`, `--schedule` and `--sequence`,
//! given either inline or as a file path.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use gfix_core::contractions::{Coefficient, CoefficientSchedule, MappingFamily, PhiFunction, SelfMap};
use gfix_core::gmetric::{Carrier, FiniteSpaceFile, GSpace, Point};
use gfix_core::oracle::InstanceSchedule;
use gfix_core::sequences::RealSequence;
use gfix_core::tolerances::DEFAULT_INDEX_CAP;
use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

fn err(what: &str, e: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{what}: {e}"))
}

/// Inline JSON when the argument opens with `{` or `[`, a file path otherwise.
fn read_arg(what: &str, arg: &str) -> ConfigResult<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    let path = Path::new(arg);
    std::fs::read_to_string(path).map_err(|e| err(what, format!("{}: {e}", path.display())))
}

fn parse_json<T: DeserializeOwned>(what: &str, arg: &str) -> ConfigResult<T> {
    serde_json::from_str(&read_arg(what, arg)?).map_err(|e| err(what, e))
}

#[derive(Debug, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case", deny_unknown_fields)]
enum Builtin {
    SumAbs { lo: f64, hi: f64 },
    MaxAbs { lo: f64, hi: f64 },
    Discrete { n: usize },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SpaceSpec {
    Builtin(Builtin),
    Finite(FiniteSpaceFile),
}

impl SpaceSpec {
    fn build(self) -> gfix_core::Result<GSpace> {
        match self {
            SpaceSpec::Builtin(Builtin::SumAbs { lo, hi }) => GSpace::sum_abs(lo, hi),
            SpaceSpec::Builtin(Builtin::MaxAbs { lo, hi }) => GSpace::max_abs(lo, hi),
            SpaceSpec::Builtin(Builtin::Discrete { n }) => GSpace::discrete_g((0..n).map(|i| i.to_string()).collect()),
            SpaceSpec::Finite(f) => f.into_space(),
        }
    }
}

pub fn space(arg: &str) -> ConfigResult<GSpace> {
    parse_json::<SpaceSpec>("space", arg)?
        .build()
        .map_err(|e| err("space", e))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineSpec {
    scale: f64,
    #[serde(default)]
    shift: f64,
}

fn default_cap() -> usize {
    DEFAULT_INDEX_CAP
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FamilySpec {
    AffineReal {
        maps: Vec<AffineSpec>,
        #[serde(default = "default_cap")]
        index_cap: usize,
    },
    Table {
        maps: Vec<Vec<usize>>,
        #[serde(default = "default_cap")]
        index_cap: usize,
    },
    /// Constant maps; values are reals on intervals and indices on finite carriers.
    Constant {
        values: Vec<f64>,
        #[serde(default = "default_cap")]
        index_cap: usize,
    },
}

/// A number read as a point of `space`.
pub fn point_in(space: &GSpace, v: f64) -> ConfigResult<Point> {
    let p = if space.carrier().is_finite() {
        if v < 0.0 || v.fract() != 0.0 {
            return Err(ConfigError(format!("{v} is not an index of the finite carrier")));
        }
        Point::Index(v as usize)
    } else {
        Point::Real(v)
    };
    space.ensure_contains(&p).map_err(|e| err("point", e))?;
    Ok(p)
}

pub fn family(arg: &str, space: &GSpace) -> ConfigResult<MappingFamily> {
    let spec: FamilySpec = parse_json("family", arg)?;
    let (maps, cap) = match spec {
        FamilySpec::AffineReal { maps, index_cap } => (
            maps.into_iter()
                .map(|m| SelfMap::Affine {
                    scale: m.scale,
                    shift: m.shift,
                })
                .collect(),
            index_cap,
        ),
        FamilySpec::Table { maps, index_cap } => (maps.into_iter().map(SelfMap::Table).collect(), index_cap),
        FamilySpec::Constant { values, index_cap } => (
            values
                .into_iter()
                .map(|v| point_in(space, v).map(SelfMap::Constant))
                .collect::<ConfigResult<_>>()?,
            index_cap,
        ),
    };
    let fam = MappingFamily::new(maps, cap).map_err(|e| err("family", e))?;
    fam.check_closure(space).map_err(|e| err("family", e))?;
    // an affine map sends an interval into itself iff it does so at both ends
    if let Carrier::Interval { lo, hi } = space.carrier() {
        for (m, map) in fam.maps().iter().enumerate() {
            if let SelfMap::Affine { scale, shift } = map {
                for end in [*lo, *hi] {
                    let y = scale * end + shift;
                    if !(*lo <= y && y <= *hi) {
                        return Err(ConfigError(format!(
                            "family: map {} sends {end} to {y}, outside [{lo}, {hi}]",
                            m + 1
                        )));
                    }
                }
            }
        }
    }
    Ok(fam)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CoefficientSpec {
    Constant(f64),
    Table {
        #[serde(default)]
        default: f64,
        entries: Vec<(usize, usize, usize, f64)>,
    },
    /// `G(p_i, p_j, p_k)` over a generating sequence in `space`.
    Generated {
        space: serde_json::Value,
        points: Vec<f64>,
    },
}

impl CoefficientSpec {
    fn build(self) -> ConfigResult<Coefficient> {
        Ok(match self {
            CoefficientSpec::Constant(c) => Coefficient::Constant(c),
            CoefficientSpec::Table { default, entries } => Coefficient::Table {
                entries: entries
                    .into_iter()
                    .map(|(i, j, k, v)| ((i, j, k), v))
                    .collect::<BTreeMap<_, _>>(),
                default,
            },
            CoefficientSpec::Generated { space: s, points } => {
                let space = space(&s.to_string())?;
                if points.is_empty() {
                    return Err(ConfigError("schedule: a generating sequence needs points".into()));
                }
                let points = points
                    .into_iter()
                    .map(|v| point_in(&space, v))
                    .collect::<ConfigResult<_>>()?;
                Coefficient::Generated {
                    space: Arc::new(space),
                    points,
                }
            }
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitSchedule {
    theta: CoefficientSpec,
    delta: CoefficientSpec,
    #[serde(default)]
    lambda: Option<CoefficientSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScheduleSpec {
    Constant(InstanceSchedule),
    Explicit(ExplicitSchedule),
}

pub fn schedule(arg: &str, index_cap: usize) -> ConfigResult<CoefficientSchedule> {
    let spec: ScheduleSpec = parse_json("schedule", arg)?;
    Ok(match spec {
        ScheduleSpec::Constant(s) => s.to_schedule(index_cap),
        ScheduleSpec::Explicit(e) => CoefficientSchedule {
            theta: e.theta.build()?,
            delta: e.delta.build()?,
            lambda: e.lambda.map(CoefficientSpec::build).transpose()?,
            index_cap,
        },
    })
}

/// `identity`, `scale:c`, `root:q` or `power:e`, with an optional `;s=degree`.
pub fn phi(arg: &str) -> ConfigResult<PhiFunction> {
    let (body, degree) = match arg.split_once(";s=") {
        Some((b, s)) => (b, Some(s.parse::<f64>().map_err(|e| err("phi degree", e))?)),
        None => (arg, None),
    };
    let num = |v: &str| v.parse::<f64>().map_err(|e| err("phi", e));
    let f = match body.split_once(':') {
        None if body == "identity" => PhiFunction::identity(),
        Some(("scale", c)) => PhiFunction::scale(num(c)?),
        Some(("root", q)) => PhiFunction::root(num(q)?),
        Some(("power", e)) => PhiFunction::power(num(e)?),
        _ => return Err(ConfigError(format!("phi: unknown function `{arg}`"))),
    };
    Ok(match degree {
        Some(s) => f.with_degree(s),
        None => f,
    })
}

/// Inline comma- or whitespace-separated values, or a one-value-per-line file.
pub fn sequence(arg: &str) -> ConfigResult<RealSequence> {
    let path = Path::new(arg);
    if path.exists() {
        return RealSequence::load(path).map_err(|e| err("sequence", e));
    }
    let values = arg
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| err("sequence", format!("`{t}`: {e}"))))
        .collect::<ConfigResult<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(ConfigError(format!(
            "sequence: `{arg}` is neither a file nor a list of numbers"
        )));
    }
    RealSequence::new(values).map_err(|e| err("sequence", e))
}

/// Default starting point: the upper end of an interval, index 0 otherwise.
pub fn default_start(space: &GSpace) -> Point {
    match space.carrier() {
        Carrier::Interval { hi, .. } => Point::Real(*hi),
        Carrier::Cube { hi, dim, .. } => Point::Vector(vec![*hi; *dim]),
        Carrier::Finite { .. } => Point::Index(0),
    }
}
