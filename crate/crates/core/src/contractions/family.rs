use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gmetric::{GSpace, Point};

pub type PointFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// A single self-map.
#[derive(Clone)]
pub enum SelfMap {
    Identity,
    /// `x -> scale * x + shift`, componentwise on vectors.
    Affine {
        scale: f64,
        shift: f64,
    },
    /// Lookup table on index points.
    Table(Vec<usize>),
    Constant(Point),
    /// `map` composed with itself `times` times.
    Iterate {
        map: Box<SelfMap>,
        times: usize,
    },
    Custom {
        name: String,
        f: PointFn,
    },
}

impl SelfMap {
    pub fn apply(&self, x: &Point) -> Result<Point> {
        match self {
            SelfMap::Identity => Ok(x.clone()),
            SelfMap::Affine { scale, shift } => match x {
                Point::Real(v) => Ok(Point::Real(scale * v + shift)),
                Point::Vector(v) => Ok(Point::Vector(v.iter().map(|t| scale * t + shift).collect())),
                Point::Index(_) => Err(Error::Domain(format!("affine map applied to index point {x}"))),
            },
            SelfMap::Table(t) => match x {
                Point::Index(i) if *i < t.len() => Ok(Point::Index(t[*i])),
                _ => Err(Error::Domain(format!("table map of size {} applied to {x}", t.len()))),
            },
            SelfMap::Constant(p) => Ok(p.clone()),
            SelfMap::Iterate { map, times } => map.apply_times(x, *times),
            SelfMap::Custom { f, .. } => Ok(f(x)),
        }
    }

    /// Applies the map `p` times in sequence.
    pub fn apply_times(&self, x: &Point, p: usize) -> Result<Point> {
        let mut y = x.clone();
        for _ in 0..p {
            y = self.apply(&y)?;
        }
        Ok(y)
    }

    /// A concrete representation of the `p`-fold composite.
    pub fn compose_power(&self, p: usize) -> SelfMap {
        match self {
            SelfMap::Identity => SelfMap::Identity,
            SelfMap::Constant(q) => SelfMap::Constant(q.clone()),
            SelfMap::Affine { scale, shift } => {
                // c^p x + d (1 + c + ... + c^{p-1})
                let geometric: f64 = (0..p).map(|k| scale.powi(k as i32)).sum();
                SelfMap::Affine {
                    scale: scale.powi(p as i32),
                    shift: shift * geometric,
                }
            }
            SelfMap::Table(t) => SelfMap::Table(
                (0..t.len())
                    .map(|mut i| {
                        for _ in 0..p {
                            // out-of-range entries are left for check_closure to report
                            match t.get(i) {
                                Some(&j) => i = j,
                                None => break,
                            }
                        }
                        i
                    })
                    .collect(),
            ),
            SelfMap::Iterate { map, times } => SelfMap::Iterate {
                map: map.clone(),
                times: times * p,
            },
            SelfMap::Custom { .. } => SelfMap::Iterate {
                map: Box::new(self.clone()),
                times: p,
            },
        }
    }

    fn describe(&self) -> String {
        match self {
            SelfMap::Identity => "id".into(),
            SelfMap::Affine { scale, shift } => format!("{scale}x+{shift}"),
            SelfMap::Table(t) => format!("table{t:?}"),
            SelfMap::Constant(p) => format!("const({p})"),
            SelfMap::Iterate { map, times } => format!("({})^{times}", map.describe()),
            SelfMap::Custom { name, f } => format!("{name}@{:p}", Arc::as_ptr(f)),
        }
    }
}

impl fmt::Debug for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// An indexed family `n -> T_n`, `n >= 1`.
///
/// `maps` is cycled: `T_n = maps[(n - 1) % maps.len()]` for `n <= index_cap`.
/// Past the cap the index wraps, so `T_{cap + 1} = T_1`.
#[derive(Clone)]
pub struct MappingFamily {
    maps: Vec<SelfMap>,
    index_cap: usize,
}

impl MappingFamily {
    pub fn new(maps: Vec<SelfMap>, index_cap: usize) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::param("maps", "a family needs at least one map"));
        }
        if index_cap == 0 {
            return Err(Error::param("index_cap", "must be at least 1"));
        }
        Ok(MappingFamily { maps, index_cap })
    }

    /// A single map repeated for every index.
    pub fn repeated(map: SelfMap, index_cap: usize) -> Result<Self> {
        Self::new(vec![map], index_cap)
    }

    pub fn maps(&self) -> &[SelfMap] {
        &self.maps
    }

    pub fn index_cap(&self) -> usize {
        self.index_cap
    }

    /// Index actually used for step `n` once wrap-around is applied.
    pub fn effective_index(&self, n: usize) -> usize {
        debug_assert!(n >= 1);
        (n - 1) % self.index_cap + 1
    }

    /// Whether step `n` wrapped past the cap.
    pub fn wraps(&self, n: usize) -> bool {
        n > self.index_cap
    }

    pub fn map(&self, n: usize) -> &SelfMap {
        let e = self.effective_index(n);
        &self.maps[(e - 1) % self.maps.len()]
    }

    /// Period of the sequence `n -> T_n`.
    pub fn period(&self) -> usize {
        if self.index_cap.is_multiple_of(self.maps.len()) {
            self.maps.len()
        } else {
            self.index_cap
        }
    }

    pub fn apply(&self, n: usize, x: &Point) -> Result<Point> {
        self.map(n).apply(x)
    }

    /// `T_n^p x` by repeated application.
    pub fn apply_power(&self, n: usize, x: &Point, p: usize) -> Result<Point> {
        self.map(n).apply_times(x, p)
    }

    /// For finite carriers, checks that every map sends the carrier into itself.
    pub fn check_closure(&self, space: &GSpace) -> Result<()> {
        let Some(points) = space.carrier().points() else {
            return Ok(());
        };
        for (m, map) in self.maps.iter().enumerate() {
            for x in &points {
                let y = map.apply(x)?;
                if !space.contains(&y) {
                    return Err(Error::Domain(format!(
                        "map {} sends {x} to {y}, outside the carrier",
                        m + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!("{:?};cap={}", self.maps, self.index_cap)
    }
}

impl fmt::Debug for MappingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// The family `n -> T_n^p`, built from concrete composites.
pub fn power_family(family: &MappingFamily, p: usize) -> Result<MappingFamily> {
    if p == 0 {
        return Err(Error::param("p", "power must be at least 1"));
    }
    MappingFamily::new(
        family.maps.iter().map(|m| m.compose_power(p)).collect(),
        family.index_cap,
    )
}
