//! Dominant meromorphic maps as declared data: pullback matrices per
//! bidegree, variety-incidence assertions, and an optional monomial lift.
//!
//! Pullback matrices are never computed from geometry here; they come from
//! the built-in registry, from monomial calculus, or from the user. The
//! matrix at degree p has columns indexed by the target basis, so
//! composition in pullback order is plain matrix multiplication:
//! M(g ∘ f) = M(f) * M(g).

mod builtins;
mod files;

pub use builtins::builtin;
pub use files::{IncidenceFactFile, MapFile, VarietyFile};

use crate::cohomology::{CohomologyClass, CohomologyModel, VarietyClass};
use crate::error::{CoreError, Result};
use crate::monomial::MonomialLift;
use crate::RatMatrix;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// A declared geometric fact about how a named variety moves under the map.
/// Only internal consistency (codimension arithmetic) is validated, never
/// geometric truth; `provenance` records where the assertion comes from.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceFact {
    pub variety: String,
    /// (image variety name, asserted total-image flag)
    pub image: Vec<(String, bool)>,
    pub preimage_codim: usize,
    pub preimage_components: Vec<String>,
    pub provenance: String,
}

/// Construction data for a [`MapModel`]; `build` validates and freezes it.
#[derive(Debug, Clone)]
pub struct MapData {
    pub name: String,
    pub source: Arc<CohomologyModel>,
    pub target: Arc<CohomologyModel>,
    pub pullback: BTreeMap<usize, RatMatrix>,
    pub inverse_pullback: BTreeMap<usize, RatMatrix>,
    pub incidence: Vec<IncidenceFact>,
    pub varieties: BTreeMap<String, VarietyClass>,
    pub monomial: Option<MonomialLift>,
    pub declared_stable: BTreeSet<usize>,
    pub involution: bool,
    pub composed: bool,
}

impl MapData {
    pub fn self_map(name: &str, model: &Arc<CohomologyModel>) -> Self {
        MapData {
            name: name.to_string(),
            source: model.clone(),
            target: model.clone(),
            pullback: BTreeMap::new(),
            inverse_pullback: BTreeMap::new(),
            incidence: Vec::new(),
            varieties: BTreeMap::new(),
            monomial: None,
            declared_stable: BTreeSet::new(),
            involution: false,
            composed: false,
        }
    }

    pub fn build(mut self) -> Result<MapModel> {
        if self.source.dim() != self.target.dim() {
            return Err(CoreError::Unsupported(format!(
                "map {}: source and target must have equal dimension",
                self.name
            )));
        }
        let k = self.source.dim();
        // M_0 is always the identity on the unit class.
        self.pullback
            .entry(0)
            .or_insert_with(|| RatMatrix::identity(1));
        if *self.pullback.get(&0).unwrap() != RatMatrix::identity(1) {
            return Err(CoreError::Model(format!(
                "map {}: the degree-0 pullback must be (1)",
                self.name
            )));
        }
        for (&p, m) in &self.pullback {
            if p > k {
                return Err(CoreError::Degree(format!(
                    "map {}: pullback declared at degree {p} > dimension {k}",
                    self.name
                )));
            }
            if m.rows() != self.source.basis_len(p) || m.cols() != self.target.basis_len(p) {
                return Err(CoreError::Dimension(format!(
                    "map {}: pullback at degree {p} has shape {}x{}, expected {}x{}",
                    self.name,
                    m.rows(),
                    m.cols(),
                    self.source.basis_len(p),
                    self.target.basis_len(p)
                )));
            }
        }
        // Top-degree entry must agree with the topological degree of a
        // declared monomial lift.
        if let Some(lift) = &self.monomial {
            if lift.dim() != k {
                return Err(CoreError::Dimension(format!(
                    "map {}: monomial lift lives on P^{}, manifold has dimension {k}",
                    self.name,
                    lift.dim()
                )));
            }
            let top = crate::Rat::from(lift.topological_degree());
            let expected = RatMatrix::from_rows(vec![vec![top]])?;
            match self.pullback.get(&k) {
                None => {
                    self.pullback.insert(k, expected);
                }
                Some(m) if *m == expected => {}
                Some(m) => return Err(CoreError::Model(format!(
                    "map {}: top-degree pullback {:?} disagrees with the lift's topological degree",
                    self.name,
                    m.entries()
                ))),
            }
        }
        for (&p, n) in &self.inverse_pullback {
            let Some(m) = self.pullback.get(&p) else {
                return Err(CoreError::Model(format!(
                    "map {}: inverse pullback at degree {p} without a forward matrix",
                    self.name
                )));
            };
            // Declaring an inverse at p asserts the class-level identity.
            if !m.checked_mul(n)?.is_identity() {
                return Err(CoreError::Model(format!(
                    "map {}: declared inverse at degree {p} does not invert the pullback",
                    self.name
                )));
            }
        }
        if self.involution {
            if self.source.name() != self.target.name() {
                return Err(CoreError::Model(format!(
                    "map {}: involutions must be self-maps",
                    self.name
                )));
            }
            // The class-level square is the identity exactly at the
            // degrees declared stable.
            for &p in &self.declared_stable {
                if let Some(m) = self.pullback.get(&p) {
                    if !m.checked_mul(m)?.is_identity() {
                        return Err(CoreError::Model(format!(
                            "map {}: declared involution but M_{p}^2 != I at a stable degree",
                            self.name
                        )));
                    }
                }
            }
        }
        for v in self.varieties.values() {
            let on_source = v.cls.model().name() == self.source.name();
            let on_target = v.cls.model().name() == self.target.name();
            if !on_source && !on_target {
                return Err(CoreError::Model(format!(
                    "map {}: variety {} lives on {}, not on source or target",
                    self.name,
                    v.name,
                    v.cls.model().name()
                )));
            }
        }
        for fact in &self.incidence {
            if fact.preimage_codim == 0 {
                return Err(CoreError::Incidence(format!(
                    "map {}: incidence fact for {} has preimage codimension 0",
                    self.name, fact.variety
                )));
            }
            let Some(v) = self.varieties.get(&fact.variety) else {
                return Err(CoreError::Incidence(format!(
                    "map {}: incidence fact references unknown variety {}",
                    self.name, fact.variety
                )));
            };
            if fact.preimage_codim >= v.codim {
                for comp in &fact.preimage_components {
                    let Some(w) = self.varieties.get(comp) else {
                        return Err(CoreError::Incidence(format!(
                            "map {}: preimage component {comp} of {} is not declared",
                            self.name, fact.variety
                        )));
                    };
                    if w.codim != v.codim {
                        return Err(CoreError::Incidence(format!(
                            "map {}: component {comp} has codim {}, variety {} has codim {}",
                            self.name, w.codim, fact.variety, v.codim
                        )));
                    }
                }
            }
        }
        Ok(MapModel { data: self })
    }
}

/// An immutable, validated map model.
#[derive(Debug, Clone)]
pub struct MapModel {
    data: MapData,
}

impl MapModel {
    pub fn name(&self) -> &str {
        &self.data.name
    }

    pub fn source(&self) -> &Arc<CohomologyModel> {
        &self.data.source
    }

    pub fn target(&self) -> &Arc<CohomologyModel> {
        &self.data.target
    }

    pub fn dim(&self) -> usize {
        self.data.source.dim()
    }

    pub fn is_involution(&self) -> bool {
        self.data.involution
    }

    pub fn is_composed(&self) -> bool {
        self.data.composed
    }

    pub fn declared_stable(&self) -> &BTreeSet<usize> {
        &self.data.declared_stable
    }

    pub fn monomial(&self) -> Option<&MonomialLift> {
        self.data.monomial.as_ref()
    }

    pub fn incidence(&self) -> &[IncidenceFact] {
        &self.data.incidence
    }

    pub fn incidence_for(&self, variety: &str) -> Option<&IncidenceFact> {
        self.data.incidence.iter().find(|f| f.variety == variety)
    }

    pub fn variety(&self, name: &str) -> Option<&VarietyClass> {
        self.data.varieties.get(name)
    }

    pub fn varieties(&self) -> &BTreeMap<String, VarietyClass> {
        &self.data.varieties
    }

    pub fn pullback_degrees(&self) -> Vec<usize> {
        self.data.pullback.keys().copied().collect()
    }

    pub fn pullback_matrix(&self, p: usize) -> Result<&RatMatrix> {
        self.data.pullback.get(&p).ok_or_else(|| {
            CoreError::Capability(format!(
                "map {} has no pullback matrix at bidegree {p}; supply it in the map file",
                self.data.name
            ))
        })
    }

    pub fn inverse_pullback_matrix(&self, p: usize) -> Option<&RatMatrix> {
        self.data.inverse_pullback.get(&p)
    }

    /// f^* on a class of the target manifold.
    pub fn pullback_class(&self, c: &CohomologyClass) -> Result<CohomologyClass> {
        if c.model().name() != self.data.target.name() {
            return Err(CoreError::Model(format!(
                "class lives on {}, map {} pulls back from {}",
                c.model().name(),
                self.data.name,
                self.data.target.name()
            )));
        }
        let p = c.degree();
        let m = self.pullback_matrix(p)?;
        CohomologyClass::new(self.data.source.clone(), p, m.apply(c.coeffs())?)
    }

    /// Derive the degree-p action from the complementary-degree matrix via
    /// the intersection pairing: the returned M_p satisfies
    /// pair(M_p y, x) = pair(y, A x) for all x, y, where A is M_{k-p} for a
    /// declared involution and the declared inverse pullback N_{k-p}
    /// otherwise. The exact identity M_p^T P = P A is enforced.
    pub fn derive_dual_action(&self, p: usize) -> Result<RatMatrix> {
        if self.data.source.name() != self.data.target.name() {
            return Err(CoreError::Unsupported(
                "dual action derivation requires a self-map".into(),
            ));
        }
        let k = self.dim();
        if p > k {
            return Err(CoreError::Degree(format!(
                "degree {p} exceeds dimension {k}"
            )));
        }
        let q = k - p;
        let a = if self.data.involution {
            self.pullback_matrix(q)?.clone()
        } else if let Some(n) = self.inverse_pullback_matrix(q) {
            n.clone()
        } else {
            return Err(CoreError::Capability(format!(
                "map {} is neither a declared involution nor carries an inverse pullback at degree {q}",
                self.data.name
            )));
        };
        let pairing_q = self.data.source.pairing(q)?;
        let inv = pairing_q.inverse().map_err(|_| {
            CoreError::Model(format!(
                "pairing at degree {q} on {} is not invertible",
                self.data.source.name()
            ))
        })?;
        let m = inv.checked_mul(&a.transpose())?.checked_mul(pairing_q)?;
        // exact identity M_p^T P_p = P_p A
        let lhs = m.transpose().checked_mul(self.data.source.pairing(p)?)?;
        let rhs = self.data.source.pairing(p)?.checked_mul(&a)?;
        if lhs != rhs {
            return Err(CoreError::Model(
                "derived dual action fails the pairing identity".into(),
            ));
        }
        Ok(m)
    }

    /// f_* as the pairing-adjoint of f^*: the unique class with
    /// pair(f_* c, x) = pair(c, f^* x) against every basis class x.
    pub fn pushforward_class(&self, c: &CohomologyClass) -> Result<CohomologyClass> {
        if c.model().name() != self.data.source.name() {
            return Err(CoreError::Model(format!(
                "class lives on {}, map {} pushes forward from {}",
                c.model().name(),
                self.data.name,
                self.data.source.name()
            )));
        }
        let k = self.dim();
        let p = c.degree();
        let q = k - p;
        let m = self.pullback_matrix(q)?;
        let p_src = self.data.source.pairing(q)?;
        let p_tgt = self.data.target.pairing(q)?;
        let inv = p_tgt.inverse().map_err(|_| {
            CoreError::Model(format!(
                "pairing at degree {q} on {} is not invertible",
                self.data.target.name()
            ))
        })?;
        let push = inv.checked_mul(&m.transpose())?.checked_mul(p_src)?;
        CohomologyClass::new(self.data.target.clone(), p, push.apply(c.coeffs())?)
    }

    /// g ∘ self, in pullback order M(g∘f) = M(f) * M(g). The composite is
    /// tagged: its matrices are valid at p only where both factors declare
    /// p-stability.
    pub fn then(&self, g: &MapModel) -> Result<MapModel> {
        if self.data.target.name() != g.data.source.name() {
            return Err(CoreError::Model(format!(
                "cannot compose: {} maps into {}, {} maps from {}",
                self.data.name,
                self.data.target.name(),
                g.data.name,
                g.data.source.name()
            )));
        }
        let mut pullback = BTreeMap::new();
        for (&p, mf) in &self.data.pullback {
            if let Some(mg) = g.data.pullback.get(&p) {
                pullback.insert(p, mf.checked_mul(mg)?);
            }
        }
        let mut inverse_pullback = BTreeMap::new();
        for (&p, nf) in &self.data.inverse_pullback {
            if let Some(ng) = g.data.inverse_pullback.get(&p) {
                // (g∘f)^{-1} = f^{-1} ∘ g^{-1}
                inverse_pullback.insert(p, ng.checked_mul(nf)?);
            }
        }
        let monomial = match (&self.data.monomial, &g.data.monomial) {
            (Some(f), Some(gg)) => Some(gg.compose_reduce(f)?.0),
            _ => None,
        };
        let declared_stable: BTreeSet<usize> = self
            .data
            .declared_stable
            .intersection(&g.data.declared_stable)
            .copied()
            .collect();
        MapData {
            name: format!("{}.{}", g.data.name, self.data.name),
            source: self.data.source.clone(),
            target: g.data.target.clone(),
            pullback,
            inverse_pullback,
            incidence: Vec::new(),
            varieties: BTreeMap::new(),
            monomial,
            declared_stable,
            involution: false,
            composed: true,
        }
        .build()
    }
}

/// Künneth block action of f x g on the product model: the (p1, p2) block
/// of M_p is M_{p1}(f) ⊗ M_{p2}(g). A degree is populated only when every
/// contributing factor degree is available.
pub fn product_map(f: &MapModel, g: &MapModel) -> Result<MapModel> {
    if f.source().name() != f.target().name() || g.source().name() != g.target().name() {
        return Err(CoreError::Unsupported(
            "product maps are built from self-maps".into(),
        ));
    }
    let a = f.source();
    let b = g.source();
    let prod = crate::cohomology::product_model(a, b)?;
    let ka = a.dim();
    let kb = b.dim();
    let k = ka + kb;
    let blocks = |p: usize| -> Vec<(usize, usize)> {
        let lo = p.saturating_sub(kb);
        let hi = p.min(ka);
        (lo..=hi).rev().map(|p1| (p1, p - p1)).collect()
    };
    let mut pullback = BTreeMap::new();
    'degree: for p in 0..=k {
        let bl = blocks(p);
        for (p1, p2) in &bl {
            if !f.data.pullback.contains_key(p1) || !g.data.pullback.contains_key(p2) {
                continue 'degree;
            }
        }
        let rows = prod.basis_len(p);
        let mut m = RatMatrix::zero(rows, rows);
        let mut off = 0;
        for (p1, p2) in &bl {
            let block = f.data.pullback[p1].kronecker(&g.data.pullback[p2]);
            for i in 0..block.rows() {
                for j in 0..block.cols() {
                    m[(off + i, off + j)] = block[(i, j)].clone();
                }
            }
            off += block.rows();
        }
        pullback.insert(p, m);
    }
    let declared_stable: BTreeSet<usize> = (0..=k)
        .filter(|&p| {
            blocks(p).iter().all(|(p1, p2)| {
                f.data.declared_stable.contains(p1) && g.data.declared_stable.contains(p2)
            })
        })
        .collect();
    MapData {
        name: format!("{}x{}", f.name(), g.name()),
        source: prod.clone(),
        target: prod,
        pullback,
        inverse_pullback: BTreeMap::new(),
        incidence: Vec::new(),
        varieties: BTreeMap::new(),
        monomial: None,
        declared_stable,
        involution: f.data.involution && g.data.involution,
        composed: false,
    }
    .build()
}
