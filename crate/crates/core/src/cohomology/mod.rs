//! Cohomology models: a compact Kähler manifold presented as named graded
//! bases of H^{p,p} with exact intersection pairings between complementary
//! degrees.
//!
//! Only (p,p) classes are modeled; the built-in constructions (projective
//! space, point blowups, products) have no off-diagonal Hodge classes, so
//! nothing is lost there. Models are immutable and shared behind `Arc`;
//! classes are value types tied to their model.

mod build;
pub mod expr;
mod files;

pub use build::{blowup_points, blowup_points_named, product_model, projective_space};
pub use files::ModelFile;

use crate::error::{CoreError, Result};
use crate::scalar::format_rat;
use crate::{Rat, RatMatrix};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct CohomologyModel {
    name: String,
    dim: usize,
    /// bases[p] lists the generators of H^{p,p}, p = 0..=dim.
    bases: Vec<Vec<String>>,
    /// pairings[p] has shape |bases[p]| x |bases[dim-p]|.
    pairings: Vec<RatMatrix>,
    /// Coefficients of the distinguished nef/Kähler class in bases[1].
    kahler_class: Vec<Rat>,
    /// Precomputed powers of the distinguished class, degree -> coefficients.
    kahler_powers: BTreeMap<usize, Vec<Rat>>,
}

impl CohomologyModel {
    pub fn new(
        name: String,
        dim: usize,
        bases: Vec<Vec<String>>,
        pairings: Vec<RatMatrix>,
        kahler_class: Vec<Rat>,
        kahler_powers: BTreeMap<usize, Vec<Rat>>,
    ) -> Result<Arc<Self>> {
        if dim == 0 {
            return Err(CoreError::Unsupported("zero-dimensional manifold".into()));
        }
        if bases.len() != dim + 1 || pairings.len() != dim + 1 {
            return Err(CoreError::Model(format!(
                "model {name}: need {} graded pieces, got {} bases / {} pairings",
                dim + 1,
                bases.len(),
                pairings.len()
            )));
        }
        if bases[0].len() != 1 || bases[dim].len() != 1 {
            return Err(CoreError::Model(format!(
                "model {name}: H^(0,0) and top degree must have a single generator"
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for gens in &bases {
            for g in gens {
                if !seen.insert(g.clone()) {
                    return Err(CoreError::Naming(format!(
                        "model {name}: duplicate generator name {g:?}"
                    )));
                }
            }
        }
        for p in 0..=dim {
            let m = &pairings[p];
            if m.rows() != bases[p].len() || m.cols() != bases[dim - p].len() {
                return Err(CoreError::Model(format!(
                    "model {name}: pairing at degree {p} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    bases[p].len(),
                    bases[dim - p].len()
                )));
            }
            if pairings[dim - p] != m.transpose() {
                return Err(CoreError::Model(format!(
                    "model {name}: pairing at degree {} is not the transpose of degree {p}",
                    dim - p
                )));
            }
        }
        if kahler_class.len() != bases[1].len() {
            return Err(CoreError::Model(format!(
                "model {name}: kahler class has {} coefficients, basis has {}",
                kahler_class.len(),
                bases[1].len()
            )));
        }
        for (&p, coeffs) in &kahler_powers {
            if p > dim || coeffs.len() != bases[p].len() {
                return Err(CoreError::Model(format!(
                    "model {name}: kahler power at degree {p} has wrong length"
                )));
            }
        }
        let model = Arc::new(CohomologyModel {
            name,
            dim,
            bases,
            pairings,
            kahler_class,
            kahler_powers,
        });
        // Positivity of the pairing of complementary Kähler powers, where
        // both sides are available.
        for &p in model.kahler_powers.keys() {
            if let Some(dual) = model.kahler_powers.get(&(model.dim - p)) {
                let y = CohomologyClass::new(model.clone(), p, model.kahler_powers[&p].clone())?;
                let x = CohomologyClass::new(model.clone(), model.dim - p, dual.clone())?;
                if !y.pair(&x)?.is_positive() {
                    return Err(CoreError::Model(format!(
                        "model {}: kahler power pairing at degree {p} is not positive",
                        model.name
                    )));
                }
            }
        }
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self, p: usize) -> Result<&[String]> {
        self.bases
            .get(p)
            .map(|v| v.as_slice())
            .ok_or_else(|| CoreError::Degree(format!("no degree {p} on {}", self.name)))
    }

    pub fn basis_len(&self, p: usize) -> usize {
        self.bases.get(p).map_or(0, |v| v.len())
    }

    pub fn pairing(&self, p: usize) -> Result<&RatMatrix> {
        self.pairings
            .get(p)
            .ok_or_else(|| CoreError::Degree(format!("no degree {p} on {}", self.name)))
    }

    /// Locate a generator name: (degree, index within that degree's basis).
    pub fn find_generator(&self, name: &str) -> Option<(usize, usize)> {
        for (p, gens) in self.bases.iter().enumerate() {
            if let Some(i) = gens.iter().position(|g| g == name) {
                return Some((p, i));
            }
        }
        None
    }

    pub fn kahler_coeffs(&self) -> &[Rat] {
        &self.kahler_class
    }

    pub fn kahler_power_coeffs(&self, p: usize) -> Option<&[Rat]> {
        self.kahler_powers.get(&p).map(|v| v.as_slice())
    }
}

/// A (p,p) cohomology class: an exact coefficient vector over the declared
/// basis of H^{p,p}. Arithmetic is only defined between classes on the same
/// model and degree; the operators panic on mismatch, the checked methods
/// return errors.
#[derive(Debug, Clone)]
pub struct CohomologyClass {
    model: Arc<CohomologyModel>,
    p: usize,
    coeffs: Vec<Rat>,
}

impl PartialEq for CohomologyClass {
    fn eq(&self, other: &Self) -> bool {
        self.model.name == other.model.name && self.p == other.p && self.coeffs == other.coeffs
    }
}

impl Eq for CohomologyClass {}

impl CohomologyClass {
    pub fn new(model: Arc<CohomologyModel>, p: usize, coeffs: Vec<Rat>) -> Result<Self> {
        if p > model.dim {
            return Err(CoreError::Degree(format!(
                "degree {p} exceeds dimension {} of {}",
                model.dim, model.name
            )));
        }
        if coeffs.len() != model.basis_len(p) {
            return Err(CoreError::Dimension(format!(
                "class at degree {p} on {} needs {} coefficients, got {}",
                model.name,
                model.basis_len(p),
                coeffs.len()
            )));
        }
        Ok(CohomologyClass { model, p, coeffs })
    }

    pub fn zero(model: &Arc<CohomologyModel>, p: usize) -> Result<Self> {
        let n = model.basis_len(p);
        Self::new(model.clone(), p, vec![Rat::zero(); n])
    }

    pub fn generator(model: &Arc<CohomologyModel>, name: &str) -> Result<Self> {
        let (p, i) = model
            .find_generator(name)
            .ok_or_else(|| CoreError::Lookup(format!("no generator {name:?} on {}", model.name)))?;
        let mut coeffs = vec![Rat::zero(); model.basis_len(p)];
        coeffs[i] = Rat::from(crate::Int::from(1));
        Self::new(model.clone(), p, coeffs)
    }

    pub fn kahler(model: &Arc<CohomologyModel>) -> Result<Self> {
        Self::new(model.clone(), 1, model.kahler_class.clone())
    }

    pub fn model(&self) -> &Arc<CohomologyModel> {
        &self.model
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn ensure_compatible(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.model, &other.model) && self.model.name != other.model.name {
            return Err(CoreError::Model(format!(
                "classes on different manifolds {} and {}",
                self.model.name, other.model.name
            )));
        }
        if self.p != other.p {
            return Err(CoreError::Degree(format!(
                "classes of different bidegrees {} and {}",
                self.p, other.p
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CohomologyClass {
            model: self.model.clone(),
            p: self.p,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(&-Rat::from(crate::Int::from(1))))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        CohomologyClass {
            model: self.model.clone(),
            p: self.p,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Exact intersection number of complementary classes.
    pub fn pair(&self, other: &Self) -> Result<Rat> {
        if !Arc::ptr_eq(&self.model, &other.model) && self.model.name != other.model.name {
            return Err(CoreError::Model(format!(
                "pairing classes on different manifolds {} and {}",
                self.model.name, other.model.name
            )));
        }
        if self.p + other.p != self.model.dim {
            return Err(CoreError::Degree(format!(
                "pairing degrees {} and {} on a {}-fold",
                self.p, other.p, self.model.dim
            )));
        }
        let pairing = self.model.pairing(self.p)?;
        let px = pairing.apply(&other.coeffs)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&px)
            .fold(Rat::zero(), |acc, (a, b)| acc + a * b))
    }

    /// L^1 norm of the coefficient vector (residual bookkeeping).
    pub fn l1_norm(&self) -> Rat {
        self.coeffs.iter().fold(Rat::zero(), |acc, c| acc + c.abs())
    }

    /// Render in the class-expression grammar, e.g. `-H2+L0+L1`.
    pub fn display(&self) -> String {
        let names = &self.model.bases[self.p];
        let mut out = String::new();
        for (c, name) in self.coeffs.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if c.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if mag != Rat::from(crate::Int::from(1)) {
                out.push_str(&format_rat(&mag));
                // integer coefficients juxtapose; fractions keep the star
                if !mag.is_integer() {
                    out.push('*');
                }
            }
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl std::ops::Add for &CohomologyClass {
    type Output = CohomologyClass;
    fn add(self, rhs: Self) -> CohomologyClass {
        self.checked_add(rhs).expect("class addition mismatch")
    }
}

impl std::ops::Sub for &CohomologyClass {
    type Output = CohomologyClass;
    fn sub(self, rhs: Self) -> CohomologyClass {
        self.checked_sub(rhs).expect("class subtraction mismatch")
    }
}

impl std::ops::Neg for &CohomologyClass {
    type Output = CohomologyClass;
    fn neg(self) -> CohomologyClass {
        self.scale(&-Rat::from(crate::Int::from(1)))
    }
}

/// A named subvariety class: codimension plus its cohomology class. The
/// `effective` flag is declared data, not computed.
#[derive(Debug, Clone, PartialEq)]
pub struct VarietyClass {
    pub name: String,
    pub codim: usize,
    pub cls: CohomologyClass,
    pub effective: bool,
}

impl VarietyClass {
    pub fn new(name: String, codim: usize, cls: CohomologyClass, effective: bool) -> Result<Self> {
        if cls.degree() != codim {
            return Err(CoreError::Degree(format!(
                "variety {name}: declared codim {codim} but class has degree {}",
                cls.degree()
            )));
        }
        Ok(VarietyClass {
            name,
            codim,
            cls,
            effective,
        })
    }
}

/// Verdict of the mass-pairing positivity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    /// The class pairs negatively with the nef power: it cannot be the
    /// class of a positive closed current.
    Obstructed,
    /// No obstruction found (no claim of effectivity).
    Unobstructed,
}

/// Pair `c` against the (dim - p)-th power of the model's distinguished nef
/// class. A negative value certifies that no positive closed current can
/// represent `c`.
pub fn positivity_obstruction(c: &CohomologyClass) -> Result<Positivity> {
    let model = c.model();
    let q = model.dim() - c.degree();
    let Some(power) = model.kahler_power_coeffs(q) else {
        return Err(CoreError::Capability(format!(
            "model {} has no precomputed degree-{q} power of its nef class; supply it in the model file",
            model.name()
        )));
    };
    let power_class = CohomologyClass::new(model.clone(), q, power.to_vec())?;
    let mass = c.pair(&power_class)?;
    if mass.is_negative() {
        Ok(Positivity::Obstructed)
    } else {
        Ok(Positivity::Unobstructed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Int;

    fn rat(n: i64) -> Rat {
        Rat::from(Int::from(n))
    }

    #[test]
    fn blowup_p3_four_points_matches_intersection_table() {
        let x = blowup_points("X", 3, 4).unwrap();
        let h = CohomologyClass::generator(&x, "H").unwrap();
        let h2 = CohomologyClass::generator(&x, "H2").unwrap();
        assert_eq!(h2.pair(&h).unwrap(), rat(1));
        for i in 0..4 {
            let e = CohomologyClass::generator(&x, &format!("E{i}")).unwrap();
            let l = CohomologyClass::generator(&x, &format!("L{i}")).unwrap();
            assert_eq!(l.pair(&e).unwrap(), rat(-1));
            assert_eq!(l.pair(&h).unwrap(), rat(0));
            assert_eq!(h2.pair(&e).unwrap(), rat(0));
            for j in 0..4 {
                if i != j {
                    let ej = CohomologyClass::generator(&x, &format!("E{j}")).unwrap();
                    assert_eq!(l.pair(&ej).unwrap(), rat(0));
                }
            }
        }
    }

    #[test]
    fn pair_rejects_degree_mismatch() {
        let x = blowup_points("X", 3, 4).unwrap();
        let h = CohomologyClass::generator(&x, "H").unwrap();
        assert!(h.pair(&h).is_err());
    }

    #[test]
    fn pair_rejects_model_mismatch() {
        let x = blowup_points("X", 3, 4).unwrap();
        let y = blowup_points("Y", 3, 4).unwrap();
        let h2 = CohomologyClass::generator(&x, "H2").unwrap();
        let h = CohomologyClass::generator(&y, "H").unwrap();
        assert!(h2.pair(&h).is_err());
    }

    #[test]
    fn projective_plane_trivial() {
        let p2 = blowup_points("P2", 2, 0).unwrap();
        assert_eq!(p2.basis(1).unwrap(), ["H"]);
        let h = CohomologyClass::generator(&p2, "H").unwrap();
        assert_eq!(h.pair(&h).unwrap(), rat(1));
    }

    #[test]
    fn one_point_blowup_pairing() {
        let x = blowup_points("B1", 3, 1).unwrap();
        let p1 = x.pairing(1).unwrap();
        assert_eq!(p1.rows(), 2);
        assert_eq!(p1[(0, 0)], rat(1));
        assert_eq!(p1[(1, 1)], rat(-1));
        assert_eq!(p1[(0, 1)], rat(0));
    }

    #[test]
    fn obstruction_of_negative_line_class() {
        let x = blowup_points("X", 3, 4).unwrap();
        // -H2 + L0 + L1 pairs to -1 against H
        let mut coeffs = vec![rat(-1), rat(1), rat(1), rat(0), rat(0)];
        let c = CohomologyClass::new(x.clone(), 2, std::mem::take(&mut coeffs)).unwrap();
        assert_eq!(positivity_obstruction(&c).unwrap(), Positivity::Obstructed);
        let h2 = CohomologyClass::generator(&x, "H2").unwrap();
        assert_eq!(
            positivity_obstruction(&h2).unwrap(),
            Positivity::Unobstructed
        );
        let z = CohomologyClass::zero(&x, 2).unwrap();
        assert_eq!(
            positivity_obstruction(&z).unwrap(),
            Positivity::Unobstructed
        );
    }

    #[test]
    fn obstruction_is_monotone_under_null_directions() {
        let x = blowup_points("X", 3, 4).unwrap();
        let c = CohomologyClass::new(x.clone(), 2, vec![rat(-1), rat(1), rat(1), rat(0), rat(0)])
            .unwrap();
        // L0 - L1 pairs to zero against H
        let null =
            CohomologyClass::new(x.clone(), 2, vec![rat(0), rat(1), rat(-1), rat(0), rat(0)])
                .unwrap();
        let shifted = &c + &null;
        assert_eq!(
            positivity_obstruction(&shifted).unwrap(),
            Positivity::Obstructed
        );
    }

    #[test]
    fn display_round_trip_style() {
        let x = blowup_points("X", 3, 4).unwrap();
        let c = CohomologyClass::new(x.clone(), 2, vec![rat(-1), rat(1), rat(1), rat(0), rat(0)])
            .unwrap();
        assert_eq!(c.display(), "-H2+L0+L1");
        assert_eq!(CohomologyClass::zero(&x, 1).unwrap().display(), "0");
    }
}
