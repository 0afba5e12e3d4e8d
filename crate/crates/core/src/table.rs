//! Knot tables: records with PD codes, signatures and reference data.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::jones::parse_jones_t;
use crate::homology::{BigradedGroup, LaurentPoly, Poly2};
use crate::linkdiag::PdCode;

/// Environment variable naming a table file to use instead of the bundled one.
pub const TABLE_ENV: &str = "ODDKH_TABLE";

const BUNDLED: &str = include_str!("../data/knots.json");

/// Homology published alongside a table entry, in knot-table notation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reference {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub odd_reduced_z: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub even_reduced_q: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub even_unreduced_z: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotRecord {
    pub name: String,
    pub pd: Vec<[u32; 4]>,
    /// Positive knots have positive signature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<i32>,
    /// Jones polynomial in `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jones: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternating: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
}

impl KnotRecord {
    pub fn crossings(&self) -> usize {
        self.pd.len()
    }

    /// An empty crossing list is the unknot.
    pub fn pd_code(&self) -> Result<PdCode> {
        if self.pd.is_empty() {
            return Ok(PdCode::unknot());
        }
        PdCode::new(self.pd.clone(), 0).map_err(|e| Error::Table(format!("{}: {e}", self.name)))
    }

    /// Normalized Jones polynomial in `q`, `t = q²`.
    pub fn jones_q(&self) -> Result<Option<LaurentPoly>> {
        self.jones.as_deref().map(parse_jones_t).transpose()
    }

    pub fn odd_reduced(&self) -> Result<Option<BigradedGroup>> {
        self.reference_field(|r| r.odd_reduced_z.as_deref())
    }

    pub fn even_unreduced(&self) -> Result<Option<BigradedGroup>> {
        self.reference_field(|r| r.even_unreduced_z.as_deref())
    }

    pub fn even_reduced_q(&self) -> Result<Option<Poly2>> {
        Ok(self.reference_field(|r| r.even_reduced_q.as_deref())?.map(|g| g.poincare()))
    }

    fn reference_field(&self, f: impl Fn(&Reference) -> Option<&str>) -> Result<Option<BigradedGroup>> {
        match self.reference.as_ref().and_then(f) {
            Some(text) => BigradedGroup::parse_table(text).map(Some),
            None => Ok(None),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KnotTable {
    records: Vec<KnotRecord>,
    index: HashMap<String, usize>,
}

impl KnotTable {
    pub fn from_records(records: Vec<KnotRecord>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            if index.insert(r.name.clone(), i).is_some() {
                return Err(Error::Table(format!("duplicate knot name {:?}", r.name)));
            }
        }
        Ok(KnotTable { records, index })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_records(serde_json::from_str(text)?)
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED).expect("bundled table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Table(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The table at `path`, else the one named by `ODDKH_TABLE`, else the
    /// bundled one.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => match std::env::var_os(TABLE_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::bundled()),
            },
        }
    }

    pub fn get(&self, name: &str) -> Option<&KnotRecord> {
        self.index.get(name).map(|&i| &self.records[i])
    }

    pub fn records(&self) -> &[KnotRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records with at most `max` crossings, in table order.
    pub fn up_to(&self, max: usize) -> impl Iterator<Item = &KnotRecord> + '_ {
        self.records.iter().filter(move |r| r.crossings() <= max)
    }
}
