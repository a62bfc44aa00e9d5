use serde::{Deserialize, Serialize};

use crate::contractions::{CoefficientSchedule, MappingFamily, Mode, SelfMap};
use crate::error::{Error, Result};
use crate::gmetric::{FiniteSpaceFile, FiniteTable, GSpace};

/// Default cap on candidate tables before axiom filtering.
pub const ENUMERATION_CAP: u128 = 10_000_000;

pub const MAX_CARRIER: usize = 4;
pub const MAX_FAMILY: usize = 2;

/// Constant coefficients of a finite instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum InstanceSchedule {
    Vetro {
        theta: f64,
        delta: f64,
    },
    /// `Δ = a`, `Θ = b`, `Λ = c`.
    Abbas {
        a: f64,
        b: f64,
        c: f64,
    },
}

impl InstanceSchedule {
    pub fn to_schedule(self, index_cap: usize) -> CoefficientSchedule {
        match self {
            InstanceSchedule::Vetro { theta, delta } => CoefficientSchedule::vetro_constant(theta, delta),
            InstanceSchedule::Abbas { a, b, c } => CoefficientSchedule::abbas_constant(a, b, c),
        }
        .with_index_cap(index_cap)
    }
}

/// A finite G-metric, a cycled list of lookup-table maps, and constant coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteInstance {
    pub table: FiniteTable,
    pub maps: Vec<Vec<usize>>,
    pub schedule: InstanceSchedule,
}

impl FiniteInstance {
    pub fn size(&self) -> usize {
        self.table.n()
    }

    pub fn space(&self) -> GSpace {
        GSpace::from_table(labels(self.size()), self.table.clone()).expect("enumerated tables are valid")
    }

    /// The family `T_n = maps[(n - 1) % len]` with index cap `len`.
    pub fn family(&self) -> MappingFamily {
        MappingFamily::new(self.maps.iter().cloned().map(SelfMap::Table).collect(), self.maps.len())
            .expect("families are nonempty")
    }

    pub fn mode(&self) -> Mode {
        match self.schedule {
            InstanceSchedule::Vetro { .. } => Mode::Vetro,
            InstanceSchedule::Abbas { .. } => Mode::Abbas,
        }
    }

    pub fn record(&self) -> InstanceRecord {
        InstanceRecord {
            space: FiniteSpaceFile::from_space(&self.space()).expect("finite space"),
            maps: self.maps.clone(),
            schedule: self.schedule,
        }
    }
}

/// Serialized form of an instance; `space` uses the finite-space file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub space: FiniteSpaceFile,
    pub maps: Vec<Vec<usize>>,
    pub schedule: InstanceSchedule,
}

impl InstanceRecord {
    pub fn into_instance(self) -> Result<FiniteInstance> {
        let space = self.space.into_space()?;
        let table = space
            .table()
            .cloned()
            .ok_or_else(|| Error::Table("instance space is not finite".into()))?;
        let n = table.n();
        if self.maps.is_empty() || self.maps.iter().any(|m| m.len() != n || m.iter().any(|&v| v >= n)) {
            return Err(Error::Table(format!("maps must be total self-maps of {n} points")));
        }
        Ok(FiniteInstance {
            table,
            maps: self.maps,
            schedule: self.schedule,
        })
    }
}

pub(crate) fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Sorted triples `i <= j <= k` off the diagonal.
fn free_triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                if !(i == j && j == k) {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}

/// Number of candidate tables on `n` points over a grid of `grid_len` values.
pub fn candidate_count(n: usize, grid_len: usize) -> u128 {
    let free = free_triples(n).len() as u32;
    (grid_len as u128).checked_pow(free).unwrap_or(u128::MAX)
}

/// A dense `n^3` array, filled from the sorted-triple values.
pub(crate) struct Dense {
    pub n: usize,
    pub g: Vec<f64>,
}

impl Dense {
    #[inline]
    pub fn at(&self, x: usize, y: usize, z: usize) -> f64 {
        self.g[(x * self.n + y) * self.n + z]
    }

    fn from_sorted(n: usize, triples: &[(usize, usize, usize)], vals: &[f64]) -> Self {
        let mut g = vec![0.0; n * n * n];
        for (&(i, j, k), &v) in triples.iter().zip(vals) {
            for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                g[(a * n + b) * n + c] = v;
            }
        }
        Dense { n, g }
    }

    pub fn from_table(t: &FiniteTable) -> Self {
        let n = t.n();
        let mut g = vec![0.0; n * n * n];
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    g[(x * n + y) * n + z] = t.get(x, y, z);
                }
            }
        }
        Dense { n, g }
    }

    /// G1 holds by construction; checks G2, G3 and G5 exactly.
    fn is_g_metric(&self) -> bool {
        let n = self.n;
        for x in 0..n {
            for y in 0..n {
                let xxy = self.at(x, x, y);
                if x != y && !(xxy > 0.0) {
                    return false;
                }
                for z in 0..n {
                    let xyz = self.at(x, y, z);
                    if z != y && !(xxy <= xyz) {
                        return false;
                    }
                    for a in 0..n {
                        if !(xyz <= self.at(x, a, a) + self.at(a, y, z)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Every valid G table on `n` points with off-diagonal values from `grid`,
/// in odometer order over the sorted triples.
pub fn enumerate_tables(n: usize, grid: &[f64], cap: u128) -> Result<Vec<FiniteTable>> {
    let mut out = Vec::new();
    walk_candidates(n, grid, cap, |entries, valid| {
        if valid {
            out.push(FiniteTable::from_entries(n, entries)?);
        }
        Ok(())
    })?;
    Ok(out)
}

/// Visits every candidate table (all sorted entries, diagonal included) with
/// the verdict of the dense axiom filter.
pub(crate) fn walk_candidates(
    n: usize,
    grid: &[f64],
    cap: u128,
    mut visit: impl FnMut(&[(usize, usize, usize, f64)], bool) -> Result<()>,
) -> Result<()> {
    if n == 0 || n > MAX_CARRIER {
        return Err(Error::param("carrier_size", format!("{n} is not in 1..={MAX_CARRIER}")));
    }
    check_grid("g_value_grid", grid)?;
    let count = candidate_count(n, grid.len());
    if count > cap {
        return Err(Error::Budget { count, cap });
    }
    let triples = free_triples(n);
    let mut digits = vec![0usize; triples.len()];
    let mut entries: Vec<(usize, usize, usize, f64)> = (0..n).map(|i| (i, i, i, 0.0)).collect();
    entries.extend(triples.iter().map(|&(i, j, k)| (i, j, k, 0.0)));
    loop {
        let vals: Vec<f64> = digits.iter().map(|&d| grid[d]).collect();
        for (e, v) in entries[n..].iter_mut().zip(&vals) {
            e.3 = *v;
        }
        visit(&entries, Dense::from_sorted(n, &triples, &vals).is_g_metric())?;
        // odometer, last triple fastest
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < grid.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param(name, "grid is empty"));
    }
    if grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::param(name, "grid values must be finite and nonnegative"));
    }
    Ok(())
}

/// All families of `len` total self-maps of `n` points, lexicographic.
pub fn enumerate_families(n: usize, len: usize) -> Vec<Vec<Vec<usize>>> {
    let maps = all_maps(n);
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                maps.iter().map(move |m| {
                    let mut f = prefix.clone();
                    f.push(m.clone());
                    f
                })
            })
            .collect();
    }
    out
}

fn all_maps(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |v| {
                    let mut m = prefix.clone();
                    m.push(v);
                    m
                })
            })
            .collect();
    }
    out
}

/// Every constant schedule of the given form over `grid`.
pub fn enumerate_schedules(mode: Mode, grid: &[f64]) -> Vec<InstanceSchedule> {
    let mut out = Vec::new();
    match mode {
        Mode::Vetro => {
            for &theta in grid {
                for &delta in grid {
                    out.push(InstanceSchedule::Vetro { theta, delta });
                }
            }
        }
        Mode::Abbas | Mode::AbbasPhi => {
            for &a in grid {
                for &b in grid {
                    for &c in grid {
                        out.push(InstanceSchedule::Abbas { a, b, c });
                    }
                }
            }
        }
    }
    out
}

/// What to enumerate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationConfig {
    pub carrier_size: usize,
    pub family_size: usize,
    pub g_value_grid: Vec<f64>,
    pub coeff_grid: Vec<f64>,
    pub mode: Mode,
    pub cap: u128,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            carrier_size: 3,
            family_size: 2,
            g_value_grid: vec![0.0, 0.5, 1.0, 2.0],
            coeff_grid: vec![0.0, 0.05, 0.1, 0.3],
            mode: Mode::Abbas,
            cap: ENUMERATION_CAP,
        }
    }
}

impl EnumerationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.carrier_size == 0 || self.carrier_size > MAX_CARRIER {
            return Err(Error::param("carrier_size", format!("must be in 1..={MAX_CARRIER}")));
        }
        if self.family_size == 0 || self.family_size > MAX_FAMILY {
            return Err(Error::param("family_size", format!("must be in 1..={MAX_FAMILY}")));
        }
        if self.mode == Mode::AbbasPhi {
            return Err(Error::Mode(
                "the oracle enumerates two-term and plain three-term instances".into(),
            ));
        }
        check_grid("g_value_grid", &self.g_value_grid)?;
        check_grid("coeff_grid", &self.coeff_grid)?;
        let count: u128 = (1..=self.carrier_size)
            .map(|n| candidate_count(n, self.g_value_grid.len()))
            .fold(0u128, u128::saturating_add);
        if count > self.cap {
            return Err(Error::Budget { count, cap: self.cap });
        }
        Ok(())
    }
}

/// Every instance with carrier size `<= carrier_size` and family length
/// `<= family_size`, in deterministic order: carrier size, table, family
/// length, family, schedule.
pub fn enumerate_instances(cfg: &EnumerationConfig) -> Result<impl Iterator<Item = FiniteInstance>> {
    cfg.validate()?;
    let mut tables = Vec::new();
    for n in 1..=cfg.carrier_size {
        tables.extend(enumerate_tables(n, &cfg.g_value_grid, cfg.cap)?);
    }
    let schedules = enumerate_schedules(cfg.mode, &cfg.coeff_grid);
    let family_size = cfg.family_size;
    Ok(tables.into_iter().flat_map(move |table| {
        let schedules = schedules.clone();
        let n = table.n();
        (1..=family_size)
            .flat_map(move |len| enumerate_families(n, len))
            .flat_map(move |maps| {
                let table = table.clone();
                schedules.clone().into_iter().map(move |schedule| FiniteInstance {
                    table: table.clone(),
                    maps: maps.clone(),
                    schedule,
                })
            })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let t = enumerate_tables(2, &[0.0, 1.0], ENUMERATION_CAP).unwrap();
        assert_eq!(t.len(), 1);
        let discrete = GSpace::discrete_g(labels(2)).unwrap();
        assert_eq!(Some(&t[0]), discrete.table());
        assert!(enumerate_tables(2, &[0.0], ENUMERATION_CAP).unwrap().is_empty());
    }

    #[test]
    fn counts_match_independent_enumeration() {
        assert_eq!(
            enumerate_tables(1, &[0.0, 0.5, 1.0, 2.0], ENUMERATION_CAP)
                .unwrap()
                .len(),
            1
        );
        assert_eq!(
            enumerate_tables(2, &[0.0, 0.5, 1.0, 2.0], ENUMERATION_CAP)
                .unwrap()
                .len(),
            7
        );
        assert_eq!(
            enumerate_tables(3, &[0.0, 1.0, 2.0], ENUMERATION_CAP).unwrap().len(),
            65
        );
        assert_eq!(
            enumerate_tables(3, &[0.0, 0.5, 1.0, 2.0], ENUMERATION_CAP)
                .unwrap()
                .len(),
            153
        );
    }

    #[test]
    fn budget_is_enforced() {
        let e = enumerate_tables(4, &[0.0, 0.5, 1.0, 2.0], ENUMERATION_CAP);
        assert!(matches!(e, Err(Error::Budget { count, .. }) if count == 4u128.pow(16)));
        let cfg = EnumerationConfig {
            carrier_size: 4,
            ..EnumerationConfig::default()
        };
        assert!(matches!(
            enumerate_instances(&cfg).map(|_| ()),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn families_and_instances() {
        assert_eq!(enumerate_families(3, 1).len(), 27);
        assert_eq!(enumerate_families(2, 2).len(), 16);
        let cfg = EnumerationConfig {
            carrier_size: 2,
            family_size: 1,
            g_value_grid: vec![0.0, 1.0],
            coeff_grid: vec![0.1],
            mode: Mode::Vetro,
            cap: 100,
        };
        // one 1-point table (1 map) and the discrete 2-point table (4 maps)
        assert_eq!(enumerate_instances(&cfg).unwrap().count(), 5);
    }

    #[test]
    fn record_round_trip() {
        let inst = enumerate_instances(&EnumerationConfig {
            carrier_size: 2,
            family_size: 2,
            ..EnumerationConfig::default()
        })
        .unwrap()
        .last()
        .unwrap();
        let json = serde_json::to_string(&inst.record()).unwrap();
        let back: InstanceRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_instance().unwrap(), inst);
    }
}
