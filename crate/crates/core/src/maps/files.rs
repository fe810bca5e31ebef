//! TOML/JSON map-definition files. Matrices are arrays of "num/den" string
//! rows; manifolds are referenced by name and resolved against a supplied
//! dictionary, so loading is transactional at the caller.

use super::{IncidenceFact, MapData, MapModel};
use crate::cohomology::{CohomologyClass, CohomologyModel, VarietyClass};
use crate::error::{CoreError, Result};
use crate::monomial::{lift_to_text, parse_lift_text};
use crate::scalar::{format_rat, parse_rat};
use crate::RatMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VarietyFile {
    pub name: String,
    pub codim: usize,
    /// "source" or "target"
    #[serde(default = "default_side")]
    pub manifold: String,
    pub coeffs: Vec<String>,
    #[serde(default)]
    pub effective: bool,
}

fn default_side() -> String {
    "target".into()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct IncidenceFactFile {
    pub variety: String,
    #[serde(default)]
    pub image: Vec<ImageEntry>,
    pub preimage_codim: usize,
    pub preimage_components: Vec<String>,
    #[serde(default)]
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ImageEntry {
    pub name: String,
    #[serde(default)]
    pub total: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MapFile {
    pub name: String,
    pub source: String,
    pub target: String,
    /// degree (string key) -> matrix rows of "num/den"
    pub pullback: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub inverse_pullback: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub varieties: Vec<VarietyFile>,
    #[serde(default)]
    pub incidence: Vec<IncidenceFactFile>,
    /// Monomial lift in the text format (rows of exponents).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomial: Option<String>,
    #[serde(default)]
    pub declared_stable: Vec<usize>,
    #[serde(default)]
    pub involution: bool,
}

fn matrix_to_rows(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(format_rat).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<String>]) -> Result<RatMatrix> {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let parsed: Result<Vec<_>> = row.iter().map(|s| parse_rat(s)).collect();
        out.push(parsed?);
    }
    RatMatrix::from_rows(out)
}

impl MapFile {
    pub fn from_map(map: &MapModel) -> Self {
        let mut pullback = BTreeMap::new();
        for p in map.pullback_degrees() {
            pullback.insert(
                p.to_string(),
                matrix_to_rows(map.pullback_matrix(p).expect("declared degree")),
            );
        }
        let mut inverse_pullback = BTreeMap::new();
        for p in 0..=map.dim() {
            if let Some(n) = map.inverse_pullback_matrix(p) {
                inverse_pullback.insert(p.to_string(), matrix_to_rows(n));
            }
        }
        let varieties = map
            .varieties()
            .values()
            .map(|v| VarietyFile {
                name: v.name.clone(),
                codim: v.codim,
                manifold: if v.cls.model().name() == map.source().name() {
                    "source".into()
                } else {
                    "target".into()
                },
                coeffs: v.cls.coeffs().iter().map(format_rat).collect(),
                effective: v.effective,
            })
            .collect();
        let incidence = map
            .incidence()
            .iter()
            .map(|f| IncidenceFactFile {
                variety: f.variety.clone(),
                image: f
                    .image
                    .iter()
                    .map(|(n, t)| ImageEntry {
                        name: n.clone(),
                        total: *t,
                    })
                    .collect(),
                preimage_codim: f.preimage_codim,
                preimage_components: f.preimage_components.clone(),
                provenance: f.provenance.clone(),
            })
            .collect();
        MapFile {
            name: map.name().to_string(),
            source: map.source().name().to_string(),
            target: map.target().name().to_string(),
            pullback,
            inverse_pullback,
            varieties,
            incidence,
            monomial: map.monomial().map(lift_to_text),
            declared_stable: map.declared_stable().iter().copied().collect(),
            involution: map.is_involution(),
        }
    }

    /// Resolve manifold references against `models` and validate.
    pub fn into_map(self, models: &BTreeMap<String, Arc<CohomologyModel>>) -> Result<MapModel> {
        let source = models
            .get(&self.source)
            .ok_or_else(|| CoreError::Lookup(format!("unknown manifold {:?}", self.source)))?
            .clone();
        let target = models
            .get(&self.target)
            .ok_or_else(|| CoreError::Lookup(format!("unknown manifold {:?}", self.target)))?
            .clone();
        let mut pullback = BTreeMap::new();
        for (key, rows) in &self.pullback {
            let p: usize = key
                .parse()
                .map_err(|_| CoreError::Parse(format!("bad pullback degree {key:?}")))?;
            pullback.insert(p, rows_to_matrix(rows)?);
        }
        let mut inverse_pullback = BTreeMap::new();
        for (key, rows) in &self.inverse_pullback {
            let p: usize = key
                .parse()
                .map_err(|_| CoreError::Parse(format!("bad inverse degree {key:?}")))?;
            inverse_pullback.insert(p, rows_to_matrix(rows)?);
        }
        let mut varieties = BTreeMap::new();
        for v in &self.varieties {
            let model = match v.manifold.as_str() {
                "source" => &source,
                "target" => &target,
                other => {
                    return Err(CoreError::Parse(format!(
                        "variety {}: manifold must be \"source\" or \"target\", got {other:?}",
                        v.name
                    )))
                }
            };
            let coeffs: Result<Vec<_>> = v.coeffs.iter().map(|s| parse_rat(s)).collect();
            let cls = CohomologyClass::new(model.clone(), v.codim, coeffs?)?;
            varieties.insert(
                v.name.clone(),
                VarietyClass::new(v.name.clone(), v.codim, cls, v.effective)?,
            );
        }
        let incidence = self
            .incidence
            .iter()
            .map(|f| IncidenceFact {
                variety: f.variety.clone(),
                image: f.image.iter().map(|e| (e.name.clone(), e.total)).collect(),
                preimage_codim: f.preimage_codim,
                preimage_components: f.preimage_components.clone(),
                provenance: f.provenance.clone(),
            })
            .collect();
        let monomial = match &self.monomial {
            Some(text) => Some(parse_lift_text(text)?),
            None => None,
        };
        MapData {
            name: self.name,
            source,
            target,
            pullback,
            inverse_pullback,
            incidence,
            varieties,
            monomial,
            declared_stable: self.declared_stable.into_iter().collect(),
            involution: self.involution,
            composed: false,
        }
        .build()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CoreError::Parse(format!("toml encode: {e}")))
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| CoreError::Parse(format!("toml decode: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| CoreError::Parse(format!("json encode: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| CoreError::Parse(format!("json decode: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::super::builtin;
    use super::*;

    fn models_for(map: &MapModel) -> BTreeMap<String, Arc<CohomologyModel>> {
        let mut m = BTreeMap::new();
        m.insert(map.source().name().to_string(), map.source().clone());
        m.insert(map.target().name().to_string(), map.target().clone());
        m
    }

    #[test]
    fn jx_round_trips_exactly() {
        let jx = builtin("J_X").unwrap();
        let file = MapFile::from_map(&jx);
        let text = file.to_toml().unwrap();
        let back = MapFile::from_toml(&text).unwrap();
        assert_eq!(file, back);
        let rebuilt = back.into_map(&models_for(&jx)).unwrap();
        assert_eq!(
            rebuilt.pullback_matrix(1).unwrap(),
            jx.pullback_matrix(1).unwrap()
        );
        assert_eq!(rebuilt.incidence(), jx.incidence());
        // canonical bytes
        assert_eq!(MapFile::from_map(&rebuilt).to_toml().unwrap(), text);
    }

    #[test]
    fn monomial_lift_survives_json() {
        let j = builtin("J_P3").unwrap();
        let file = MapFile::from_map(&j);
        let back = MapFile::from_json(&file.to_json().unwrap()).unwrap();
        let rebuilt = back.into_map(&models_for(&j)).unwrap();
        assert_eq!(rebuilt.monomial(), j.monomial());
    }

    #[test]
    fn bad_matrix_rejects_file() {
        let jx = builtin("J_X").unwrap();
        let mut file = MapFile::from_map(&jx);
        file.pullback.get_mut("1").unwrap()[0][0] = "x".into();
        assert!(file.into_map(&models_for(&jx)).is_err());
    }

    #[test]
    fn unresolved_manifold_is_lookup_error() {
        let jx = builtin("J_X").unwrap();
        let file = MapFile::from_map(&jx);
        let empty = BTreeMap::new();
        assert!(matches!(file.into_map(&empty), Err(CoreError::Lookup(_))));
    }
}
