//! Finite space documents: `{"carrier": [labels...], "g": [[i, j, k, value], ...]}`
//! with one entry per sorted index triple `i <= j <= k`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::space::{FiniteTable, GSpace};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSpaceFile {
    pub carrier: Vec<String>,
    pub g: Vec<(usize, usize, usize, f64)>,
}

impl FiniteSpaceFile {
    pub fn from_space(space: &GSpace) -> Result<Self> {
        let table = space
            .table()
            .ok_or_else(|| Error::Domain("only finite spaces serialize to a table".into()))?;
        let crate::gmetric::Carrier::Finite { labels } = space.carrier() else {
            unreachable!("tables only back finite carriers");
        };
        Ok(FiniteSpaceFile {
            carrier: labels.clone(),
            g: table.entries(),
        })
    }

    pub fn into_space(self) -> Result<GSpace> {
        let n = self.carrier.len();
        for &(i, j, k, _) in &self.g {
            if !(i <= j && j <= k) {
                return Err(Error::Table(format!("entry ({i},{j},{k}) is not a sorted triple")));
            }
        }
        let expected = FiniteTable::slot_count(n);
        if self.g.len() > expected {
            return Err(Error::Table(format!(
                "{} entries for {expected} sorted triples",
                self.g.len()
            )));
        }
        let table = FiniteTable::from_entries(n, &self.g)?;
        GSpace::from_table(self.carrier, table)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

pub fn load_finite_space(path: impl AsRef<Path>) -> Result<GSpace> {
    let text = std::fs::read_to_string(path)?;
    FiniteSpaceFile::parse(&text)?.into_space()
}

pub fn save_finite_space(space: &GSpace, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, FiniteSpaceFile::from_space(space)?.to_json())?;
    Ok(())
}
