//! Canonical TOML/JSON serialization of cohomology models. Rationals are
//! `"num/den"` strings in lowest terms, so round-trips are exact.

use super::CohomologyModel;
use crate::error::{CoreError, Result};
use crate::scalar::{format_rat, parse_rat};
use crate::{Rat, RatMatrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelFile {
    pub name: String,
    pub dim: usize,
    /// Generator names per degree, 0..=dim.
    pub bases: Vec<Vec<String>>,
    /// Pairing matrices per degree, rows of "num/den" strings.
    pub pairings: Vec<Vec<Vec<String>>>,
    pub kahler_class: Vec<String>,
    /// Degree (as a string key, for TOML) -> power coefficients.
    #[serde(default)]
    pub kahler_powers: BTreeMap<String, Vec<String>>,
}

fn rats_to_strings(rs: &[Rat]) -> Vec<String> {
    rs.iter().map(format_rat).collect()
}

fn strings_to_rats(ss: &[String]) -> Result<Vec<Rat>> {
    ss.iter().map(|s| parse_rat(s)).collect()
}

impl ModelFile {
    pub fn from_model(model: &CohomologyModel) -> Self {
        let k = model.dim();
        let pairings = (0..=k)
            .map(|p| {
                let m = model.pairing(p).expect("degree in range");
                (0..m.rows()).map(|i| rats_to_strings(m.row(i))).collect()
            })
            .collect();
        let mut kahler_powers = BTreeMap::new();
        for p in 0..=k {
            if let Some(coeffs) = model.kahler_power_coeffs(p) {
                kahler_powers.insert(p.to_string(), rats_to_strings(coeffs));
            }
        }
        ModelFile {
            name: model.name().to_string(),
            dim: k,
            bases: (0..=k)
                .map(|p| model.basis(p).expect("degree in range").to_vec())
                .collect(),
            pairings,
            kahler_class: rats_to_strings(model.kahler_coeffs()),
            kahler_powers,
        }
    }

    pub fn into_model(self) -> Result<Arc<CohomologyModel>> {
        let mut pairings = Vec::with_capacity(self.pairings.len());
        for rows in &self.pairings {
            let mut mat_rows = Vec::with_capacity(rows.len());
            for row in rows {
                mat_rows.push(strings_to_rats(row)?);
            }
            pairings.push(RatMatrix::from_rows(mat_rows)?);
        }
        let mut kahler_powers = BTreeMap::new();
        for (key, coeffs) in &self.kahler_powers {
            let p: usize = key
                .parse()
                .map_err(|_| CoreError::Parse(format!("bad kahler power degree {key:?}")))?;
            kahler_powers.insert(p, strings_to_rats(coeffs)?);
        }
        CohomologyModel::new(
            self.name,
            self.dim,
            self.bases,
            pairings,
            strings_to_rats(&self.kahler_class)?,
            kahler_powers,
        )
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
