//! Siu-decomposition bookkeeping: a residual class plus a finite weighted
//! list of named variety classes, with pullback through declared incidence
//! data.
//!
//! Pulling an atom back solves the exact linear system expressing the
//! pulled-back variety class over the declared preimage components. A
//! negative solved weight is a finding, not an error: the atom is retained
//! and flagged LOST-POSITIVITY.

use crate::cohomology::{CohomologyClass, CohomologyModel, VarietyClass};
use crate::error::{CoreError, Result};
use crate::maps::MapModel;
use crate::matrix::LinearSolution;
use crate::scalar::{format_rat, parse_rat};
use crate::{Rat, RatMatrix};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct SiuAtom {
    pub weight: Rat,
    pub variety: VarietyClass,
    pub lost_positivity: bool,
}

/// The finite ledger T = R + sum lambda_j [V_j]. All atoms share the
/// residual's bidegree; the total class is cached and revalidated on every
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SiuLedger {
    residual: CohomologyClass,
    atoms: Vec<SiuAtom>,
    total: CohomologyClass,
    /// Declared bound on the mass of the truncated tail; reporting only.
    tail_bound: Option<Rat>,
}

impl SiuLedger {
    pub fn new(
        residual: CohomologyClass,
        atoms: Vec<SiuAtom>,
        tail_bound: Option<Rat>,
    ) -> Result<Self> {
        let p = residual.degree();
        let mut total = residual.clone();
        for atom in &atoms {
            if atom.variety.codim != p {
                return Err(CoreError::Degree(format!(
                    "atom {} has codim {}, ledger is at degree {p}",
                    atom.variety.name, atom.variety.codim
                )));
            }
            if atom.weight.is_negative() && !atom.lost_positivity {
                return Err(CoreError::Model(format!(
                    "atom {} has negative weight but is not flagged LOST-POSITIVITY",
                    atom.variety.name
                )));
            }
            total = total.checked_add(&atom.variety.cls.scale(&atom.weight))?;
        }
        Ok(SiuLedger {
            residual,
            atoms,
            total,
            tail_bound,
        })
    }

    /// Ledger with zero residual, built from (weight, variety) pairs.
    pub fn from_atoms(
        model: &Arc<CohomologyModel>,
        p: usize,
        atoms: Vec<(Rat, VarietyClass)>,
    ) -> Result<Self> {
        let residual = CohomologyClass::zero(model, p)?;
        let atoms = atoms
            .into_iter()
            .map(|(weight, variety)| {
                let lost_positivity = weight.is_negative();
                SiuAtom {
                    weight,
                    variety,
                    lost_positivity,
                }
            })
            .collect();
        Self::new(residual, atoms, None)
    }

    pub fn degree(&self) -> usize {
        self.residual.degree()
    }

    pub fn residual(&self) -> &CohomologyClass {
        &self.residual
    }

    pub fn atoms(&self) -> &[SiuAtom] {
        &self.atoms
    }

    pub fn total(&self) -> &CohomologyClass {
        &self.total
    }

    pub fn tail_bound(&self) -> Option<&Rat> {
        self.tail_bound.as_ref()
    }

    pub fn checked_add(&self, other: &SiuLedger) -> Result<SiuLedger> {
        let residual = self.residual.checked_add(&other.residual)?;
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        SiuLedger::new(residual, atoms, None)
    }
}

/// Pull the whole ledger back through f. Every atom needs an incidence
/// fact with preimage_codim >= the atom's codimension; the atom's class is
/// pulled back by M_p and expressed exactly over the declared preimage
/// components. Output atoms keep the input atom order (components in
/// declared order within each).
pub fn siu_pullback(f: &MapModel, ledger: &SiuLedger) -> Result<SiuLedger> {
    let p = ledger.degree();
    let residual = f.pullback_class(ledger.residual())?;
    let mut out_atoms = Vec::new();
    for atom in ledger.atoms() {
        let fact = f.incidence_for(&atom.variety.name).ok_or_else(|| {
            CoreError::Capability(format!(
                "map {} has no incidence fact for variety {}; declare its preimage components",
                f.name(),
                atom.variety.name
            ))
        })?;
        if fact.preimage_codim < p {
            return Err(CoreError::Incidence(format!(
                "variety {}: preimage codimension {} is below the atom codimension {p}",
                atom.variety.name, fact.preimage_codim
            )));
        }
        let mut components = Vec::new();
        for name in &fact.preimage_components {
            let v = f.variety(name).ok_or_else(|| {
                CoreError::Incidence(format!(
                    "preimage component {name} of {} is not declared on map {}",
                    atom.variety.name,
                    f.name()
                ))
            })?;
            components.push(v.clone());
        }
        if components.is_empty() {
            return Err(CoreError::Incidence(format!(
                "variety {} declares no preimage components",
                atom.variety.name
            )));
        }
        let pulled = f.pullback_class(&atom.variety.cls)?;
        let n = pulled.coeffs().len();
        let mut a = RatMatrix::zero(n, components.len());
        for (j, comp) in components.iter().enumerate() {
            for i in 0..n {
                a[(i, j)] = comp.cls.coeffs()[i].clone();
            }
        }
        let b = RatMatrix::column_vector(pulled.coeffs().to_vec());
        let mu = match a.solve(&b)? {
            LinearSolution::Unique(sol) => sol.column(0),
            LinearSolution::Inconsistent => {
                return Err(CoreError::Incidence(format!(
                    "variety {}: pulled-back class is not a combination of the declared preimage components",
                    atom.variety.name
                )))
            }
            LinearSolution::Underdetermined { free_vars, .. } => {
                return Err(CoreError::Incidence(format!(
                    "variety {}: preimage components are linearly dependent ({free_vars} free variables)",
                    atom.variety.name
                )))
            }
        };
        for (mu_i, comp) in mu.into_iter().zip(components) {
            let weight = &atom.weight * &mu_i;
            let lost_positivity = weight.is_negative();
            out_atoms.push(SiuAtom {
                weight,
                variety: comp,
                lost_positivity,
            });
        }
    }
    let out = SiuLedger::new(residual, out_atoms, None)?;
    debug_assert_eq!(*out.total(), f.pullback_class(ledger.total())?);
    Ok(out)
}

// --- JSON ledger files -----------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LedgerAtomFile {
    pub weight: String,
    pub variety: String,
    #[serde(default)]
    pub lost_positivity: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LedgerFile {
    pub manifold: String,
    pub p: usize,
    pub residual: Vec<String>,
    pub atoms: Vec<LedgerAtomFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<String>,
}

impl LedgerFile {
    pub fn from_ledger(ledger: &SiuLedger) -> Self {
        LedgerFile {
            manifold: ledger.residual().model().name().to_string(),
            p: ledger.degree(),
            residual: ledger.residual().coeffs().iter().map(format_rat).collect(),
            atoms: ledger
                .atoms()
                .iter()
                .map(|a| LedgerAtomFile {
                    weight: format_rat(&a.weight),
                    variety: a.variety.name.clone(),
                    lost_positivity: a.lost_positivity,
                })
                .collect(),
            tail_bound: ledger.tail_bound().map(format_rat),
        }
    }

    /// Resolve against a model and a variety registry (typically the map's).
    pub fn into_ledger(
        self,
        model: &Arc<CohomologyModel>,
        varieties: &BTreeMap<String, VarietyClass>,
    ) -> Result<SiuLedger> {
        if model.name() != self.manifold {
            return Err(CoreError::Lookup(format!(
                "ledger references manifold {:?}, resolver has {:?}",
                self.manifold,
                model.name()
            )));
        }
        let coeffs: Result<Vec<Rat>> = self.residual.iter().map(|s| parse_rat(s)).collect();
        let residual = CohomologyClass::new(model.clone(), self.p, coeffs?)?;
        let mut atoms = Vec::new();
        for atom in &self.atoms {
            let variety = varieties.get(&atom.variety).ok_or_else(|| {
                CoreError::Lookup(format!("unknown variety {:?} in ledger", atom.variety))
            })?;
            atoms.push(SiuAtom {
                weight: parse_rat(&atom.weight)?,
                variety: variety.clone(),
                lost_positivity: atom.lost_positivity,
            });
        }
        let tail_bound = match &self.tail_bound {
            Some(s) => Some(parse_rat(s)?),
            None => None,
        };
        SiuLedger::new(residual, atoms, tail_bound)
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
    use super::*;
    use crate::cohomology::Positivity;
    use crate::maps::builtin;
    use crate::Int;

    fn rat(n: i64) -> Rat {
        Rat::from(Int::from(n))
    }

    fn sigma_ledger(weight: i64) -> (crate::maps::MapModel, SiuLedger) {
        let jx = builtin("J_X").unwrap();
        let v = jx.variety("Sigma_01").unwrap().clone();
        let ledger = SiuLedger::from_atoms(jx.source(), 2, vec![(rat(weight), v)]).unwrap();
        (jx, ledger)
    }

    #[test]
    fn signature_flip_with_flag() {
        let (jx, ledger) = sigma_ledger(1);
        let out = siu_pullback(&jx, &ledger).unwrap();
        assert_eq!(out.atoms().len(), 1);
        let atom = &out.atoms()[0];
        assert_eq!(atom.variety.name, "Sigma_23");
        assert_eq!(atom.weight, rat(-1));
        assert!(atom.lost_positivity);
        // the flagged class is genuinely obstructed
        let scaled = atom.variety.cls.scale(&atom.weight);
        assert_eq!(
            crate::cohomology::positivity_obstruction(&scaled).unwrap(),
            Positivity::Obstructed
        );
    }

    #[test]
    fn involution_round_trip() {
        let (jx, ledger) = sigma_ledger(1);
        let once = siu_pullback(&jx, &ledger).unwrap();
        let twice = siu_pullback(&jx, &once).unwrap();
        assert_eq!(twice.atoms().len(), 1);
        let atom = &twice.atoms()[0];
        assert_eq!(atom.variety.name, "Sigma_01");
        assert_eq!(atom.weight, rat(1));
        assert!(!atom.lost_positivity);
        assert_eq!(twice.total(), ledger.total());
    }

    #[test]
    fn identity_map_preserves_ledger() {
        let id = builtin("power_map(2,1)").unwrap();
        let h = id.variety("H").unwrap().clone();
        let ledger = SiuLedger::from_atoms(id.source(), 1, vec![(rat(5), h)]).unwrap();
        let out = siu_pullback(&id, &ledger).unwrap();
        assert_eq!(out.atoms()[0].weight, rat(5));
        assert_eq!(out.total(), ledger.total());
    }

    #[test]
    fn power_map_doubles_line_weight() {
        let f = builtin("power_map(2,2)").unwrap();
        let h = f.variety("H").unwrap().clone();
        let ledger = SiuLedger::from_atoms(f.source(), 1, vec![(rat(1), h)]).unwrap();
        let out = siu_pullback(&f, &ledger).unwrap();
        assert_eq!(out.atoms().len(), 1);
        assert_eq!(out.atoms()[0].weight, rat(2));
        assert!(!out.atoms()[0].lost_positivity);
    }

    #[test]
    fn missing_incidence_is_capability_error() {
        let jx = builtin("J_X").unwrap();
        // a variety the map knows nothing about
        let rogue = VarietyClass::new(
            "Rogue".into(),
            2,
            CohomologyClass::generator(jx.source(), "H2").unwrap(),
            true,
        )
        .unwrap();
        let ledger = SiuLedger::from_atoms(jx.source(), 2, vec![(rat(1), rogue)]).unwrap();
        assert!(matches!(
            siu_pullback(&jx, &ledger),
            Err(CoreError::Capability(_))
        ));
    }

    #[test]
    fn ledger_total_commutes_with_pullback() {
        let jx = builtin("J_X").unwrap();
        let v1 = jx.variety("Sigma_01").unwrap().clone();
        let v2 = jx.variety("Sigma_13").unwrap().clone();
        let ledger = SiuLedger::from_atoms(
            jx.source(),
            2,
            vec![(rat(2), v1), (Rat::new(Int::from(1), Int::from(3)), v2)],
        )
        .unwrap();
        let out = siu_pullback(&jx, &ledger).unwrap();
        assert_eq!(*out.total(), jx.pullback_class(ledger.total()).unwrap());
    }

    #[test]
    fn ledger_addition_is_atomwise() {
        let jx = builtin("J_X").unwrap();
        let v1 = jx.variety("Sigma_01").unwrap().clone();
        let v2 = jx.variety("Sigma_02").unwrap().clone();
        let l1 = SiuLedger::from_atoms(jx.source(), 2, vec![(rat(1), v1)]).unwrap();
        let l2 = SiuLedger::from_atoms(jx.source(), 2, vec![(rat(3), v2)]).unwrap();
        let sum = l1.checked_add(&l2).unwrap();
        let lhs = siu_pullback(&jx, &sum).unwrap();
        let rhs = siu_pullback(&jx, &l1)
            .unwrap()
            .checked_add(&siu_pullback(&jx, &l2).unwrap())
            .unwrap();
        assert_eq!(lhs.atoms(), rhs.atoms());
        assert_eq!(lhs.total(), rhs.total());
    }

    #[test]
    fn unflagged_negative_weight_rejected() {
        let jx = builtin("J_X").unwrap();
        let v = jx.variety("Sigma_01").unwrap().clone();
        let atom = SiuAtom {
            weight: rat(-1),
            variety: v,
            lost_positivity: false,
        };
        let residual = CohomologyClass::zero(jx.source(), 2).unwrap();
        assert!(SiuLedger::new(residual, vec![atom], None).is_err());
    }

    #[test]
    fn ledger_json_round_trip() {
        let (jx, ledger) = sigma_ledger(1);
        let out = siu_pullback(&jx, &ledger).unwrap();
        let file = LedgerFile::from_ledger(&out);
        let text = file.to_json().unwrap();
        let back = LedgerFile::from_json(&text).unwrap();
        let resolved = back.into_ledger(jx.source(), jx.varieties()).unwrap();
        assert_eq!(resolved, out);
    }
}
