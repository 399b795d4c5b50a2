//! Embedded catalog of published contextual hypergraphs: the classic
//! Kochen-Specker sets, the pentagon family, the Peres-Mermin square sets,
//! the exclusivity-graph family, and the small critical sets of the 3- to
//! 8-dimensional master classes, each with its source attribution and,
//! where known, a coordinatization and expected index values.

use crate::coord::{Coordinatization, CVector, Scalar};
use crate::error::{Error, Result};
use crate::lang::{parse_mmp, Hypergraph};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::sync::OnceLock;

const CATALOG_JSON: &str = include_str!("../fixtures/catalog.json");

/// Expected metric values recorded next to a fixture. Every field is
/// optional; absent means not recorded for that fixture.
#[derive(Clone, Debug, Deserialize, Default)]
pub struct ExpectedMetrics {
    #[serde(rename = "HI_cM")]
    pub hi_c_max: Option<usize>,
    #[serde(rename = "HI_cm")]
    pub hi_c_min: Option<usize>,
    #[serde(rename = "HI_mcM")]
    pub hi_mc_max: Option<usize>,
    #[serde(rename = "l_cM")]
    pub l_c_max: Option<usize>,
    #[serde(rename = "l_cm")]
    pub l_c_min: Option<usize>,
    pub binary: Option<bool>,
    pub critical: Option<bool>,
    pub parity: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub dim: usize,
    pub mmp: String,
    /// Vertex label -> component tokens, e.g. `["0", "-1", "2w"]`.
    #[serde(default)]
    pub vectors: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub metrics: ExpectedMetrics,
    /// Literature attribution.
    pub source: String,
    /// Component pool the coordinatization draws from, when known.
    #[serde(default)]
    pub components: Option<String>,
}

impl Fixture {
    pub fn hypergraph(&self) -> Result<Hypergraph> {
        Ok(parse_mmp(&self.mmp)?.with_n(self.dim))
    }

    pub fn coordinatization(&self) -> Result<Option<Coordinatization>> {
        let Some(vectors) = &self.vectors else {
            return Ok(None);
        };
        let h = self.hypergraph()?;
        let mut vecs = Vec::with_capacity(h.k());
        for label in &h.vertices {
            let tokens = vectors.get(label.as_str()).ok_or_else(|| {
                Error::Coord(format!(
                    "fixture {}: no vector for vertex `{label}`",
                    self.name
                ))
            })?;
            if tokens.len() != self.dim {
                return Err(Error::Coord(format!(
                    "fixture {}: vector for `{label}` has {} entries, expected {}",
                    self.name,
                    tokens.len(),
                    self.dim
                )));
            }
            let entries: Result<Vec<Scalar>> = tokens.iter().map(|t| parse_entry(t)).collect();
            vecs.push(CVector::new(entries?));
        }
        Ok(Some(Coordinatization::new(vecs)))
    }
}

fn parse_entry(token: &str) -> Result<Scalar> {
    crate::coord::ComponentSet::parse(token).map(|cs| cs.atoms[0])
}

fn catalog() -> &'static Vec<Fixture> {
    static CACHE: OnceLock<Vec<Fixture>> = OnceLock::new();
    CACHE.get_or_init(|| {
        serde_json::from_str(CATALOG_JSON).expect("embedded catalog must deserialize")
    })
}

/// All fixtures, in catalog order.
pub fn all() -> &'static [Fixture] {
    catalog()
}

/// Look up one fixture by its `k-l` name (e.g. `"18-9"`) or full name.
pub fn get(name: &str) -> Result<&'static Fixture> {
    catalog()
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}
