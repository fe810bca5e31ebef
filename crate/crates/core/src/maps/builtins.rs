//! Built-in map registry: the coordinate-reciprocal Cremona map on P^3 and
//! its lift to the blowup at the four coordinate points, the planar Cremona
//! involution, and coordinate power maps.

use super::{IncidenceFact, MapData, MapModel};
use crate::cohomology::{blowup_points, projective_space, CohomologyClass, VarietyClass};
use crate::error::{CoreError, Result};
use crate::monomial::MonomialLift;
use crate::{Int, Rat, RatMatrix};
use std::collections::BTreeMap;

fn rmat(rows: &[&[i64]]) -> RatMatrix {
    RatMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| Rat::from(Int::from(x))).collect())
            .collect(),
    )
    .expect("static matrix data")
}

fn scalar(x: i64) -> RatMatrix {
    rmat(&[&[x]])
}

/// Look up a built-in map: `J_P3`, `J_X`, `sigma_P2`, or `power_map(k,d)`.
pub fn builtin(name: &str) -> Result<MapModel> {
    match name {
        "J_P3" => j_p3(),
        "J_X" => j_x(),
        "sigma_P2" => sigma_p2(),
        _ => {
            if let Some(args) = name
                .strip_prefix("power_map(")
                .and_then(|s| s.strip_suffix(')'))
            {
                let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                if parts.len() == 2 {
                    let k: usize = parts[0]
                        .parse()
                        .map_err(|_| CoreError::Parse(format!("bad dimension in {name:?}")))?;
                    let d: u32 = parts[1]
                        .parse()
                        .map_err(|_| CoreError::Parse(format!("bad degree in {name:?}")))?;
                    return power_map(k, d);
                }
            }
            Err(CoreError::Lookup(format!(
                "unknown builtin map {name:?}; known: J_P3, J_X, sigma_P2, power_map(k,d)"
            )))
        }
    }
}

/// The Cremona involution [1/x0:1/x1:1/x2:1/x3] on P^3. Degree 3, degree
/// sequence 3,1,3,1,...: not 1-algebraically stable.
fn j_p3() -> Result<MapModel> {
    let p3 = projective_space("P3", 3)?;
    let mut data = MapData::self_map("J_P3", &p3);
    data.pullback = BTreeMap::from([
        (0, scalar(1)),
        (1, scalar(3)),
        (2, scalar(3)),
        (3, scalar(1)),
    ]);
    data.monomial = Some(MonomialLift::reciprocal(3));
    data.declared_stable = [0usize, 3].into();
    data.involution = true;
    data.build()
}

/// The lift of J to the blowup X of P^3 at the four coordinate points.
/// 1- and 2-algebraically stable; its pullback swaps the coordinate-line
/// classes in signed pairs.
fn j_x() -> Result<MapModel> {
    let x = blowup_points("X", 3, 4)?;
    let m1 = rmat(&[
        &[3, 1, 1, 1, 1],
        &[-2, 0, -1, -1, -1],
        &[-2, -1, 0, -1, -1],
        &[-2, -1, -1, 0, -1],
        &[-2, -1, -1, -1, 0],
    ]);
    let m2 = rmat(&[
        &[3, 2, 2, 2, 2],
        &[-1, 0, -1, -1, -1],
        &[-1, -1, 0, -1, -1],
        &[-1, -1, -1, 0, -1],
        &[-1, -1, -1, -1, 0],
    ]);
    let mut data = MapData::self_map("J_X", &x);
    data.pullback = BTreeMap::from([
        (0, scalar(1)),
        (1, m1.clone()),
        (2, m2.clone()),
        (3, scalar(1)),
    ]);
    data.inverse_pullback = BTreeMap::from([(1, m1), (2, m2)]);
    data.declared_stable = [0usize, 1, 2, 3].into();
    data.involution = true;

    // Strict transforms of the six coordinate lines {x_i = x_j = 0}: the
    // line meets the two blown-up points away from {i, j}, so its class is
    // H2 minus those two exceptional line classes.
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for &(i, j) in &pairs {
        let name = format!("Sigma_{i}{j}");
        let mut coeffs = vec![Rat::from(Int::from(1)); 1];
        coeffs.extend((0..4).map(|a| {
            if a == i || a == j {
                Rat::from(Int::from(0))
            } else {
                Rat::from(Int::from(-1))
            }
        }));
        let cls = CohomologyClass::new(x.clone(), 2, coeffs)?;
        data.varieties
            .insert(name.clone(), VarietyClass::new(name, 2, cls, true)?);
    }
    for &(i, j) in &pairs {
        // Near {x_i = x_j = 0} the reciprocals 1/x_i, 1/x_j dominate, so
        // the line blows up onto the locus where the other two coordinates
        // vanish: the image (and preimage, J being an involution) is the
        // line of the complementary index pair. The degree-2 pullback
        // matrix confirms this on classes: J^*{Sigma_S} = -{Sigma_S'}.
        let comp: Vec<usize> = (0..4).filter(|&a| a != i && a != j).collect();
        let (a, b) = (comp[0], comp[1]);
        data.incidence.push(IncidenceFact {
            variety: format!("Sigma_{i}{j}"),
            image: vec![(format!("Sigma_{a}{b}"), true)],
            preimage_codim: 2,
            preimage_components: vec![format!("Sigma_{a}{b}")],
            provenance: "J_X blows each coordinate-line strict transform up onto the complementary coordinate line".into(),
        });
    }
    data.build()
}

/// The standard planar Cremona involution [x1 x2 : x0 x2 : x0 x1] on P^2.
fn sigma_p2() -> Result<MapModel> {
    let p2 = projective_space("P2", 2)?;
    let mut data = MapData::self_map("sigma_P2", &p2);
    data.pullback = BTreeMap::from([(0, scalar(1)), (1, scalar(2)), (2, scalar(1))]);
    data.monomial = Some(MonomialLift::reciprocal(2));
    data.declared_stable = [0usize, 2].into();
    data.involution = true;
    data.build()
}

/// [x0^d : ... : xk^d]: holomorphic for d >= 1, stable at every degree,
/// with pullback d^p at degree p.
fn power_map(k: usize, d: u32) -> Result<MapModel> {
    if k == 0 {
        return Err(CoreError::Unsupported("power map needs k >= 1".into()));
    }
    let pk = projective_space(&format!("P{k}"), k)?;
    let mut data = MapData::self_map(&format!("power_map({k},{d})"), &pk);
    let dd = Int::from(d);
    for p in 0..=k {
        let entry = Rat::from(dd.pow(p as u32));
        data.pullback
            .insert(p, RatMatrix::from_rows(vec![vec![entry]])?);
    }
    data.monomial = Some(MonomialLift::power(k, d)?);
    data.declared_stable = (0..=k).collect();
    data.involution = d == 1;
    // Generic linear subvarieties and their incidence: the preimage of a
    // codimension-p linear subspace is a codimension-p cycle of class
    // d^p * H^p.
    for p in 1..k {
        let gen_name = pk.basis(p)?[0].clone();
        let cls = CohomologyClass::generator(&pk, &gen_name)?;
        data.varieties.insert(
            gen_name.clone(),
            VarietyClass::new(gen_name.clone(), p, cls, true)?,
        );
        data.incidence.push(IncidenceFact {
            variety: gen_name.clone(),
            image: vec![(gen_name.clone(), false)],
            preimage_codim: p,
            preimage_components: vec![gen_name],
            provenance: "preimage of a generic linear subspace under a finite holomorphic map"
                .into(),
        });
    }
    data.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jx_matrices_are_involutive_and_consistent() {
        let jx = builtin("J_X").unwrap();
        assert!(jx.is_involution());
        assert_eq!(jx.pullback_degrees(), vec![0, 1, 2, 3]);
        // H coefficient of J^*(H) is the degree of J on P^3
        let j = builtin("J_P3").unwrap();
        assert_eq!(
            jx.pullback_matrix(1).unwrap()[(0, 0)],
            j.pullback_matrix(1).unwrap()[(0, 0)]
        );
        assert_eq!(
            Rat::from(j.monomial().unwrap().degree().clone()),
            jx.pullback_matrix(1).unwrap()[(0, 0)]
        );
    }

    #[test]
    fn jx_incidence_covers_all_six_lines() {
        let jx = builtin("J_X").unwrap();
        assert_eq!(jx.incidence().len(), 6);
        assert_eq!(jx.varieties().len(), 6);
        let fact = jx.incidence_for("Sigma_01").unwrap();
        assert_eq!(fact.preimage_components, ["Sigma_23"]);
        let fact = jx.incidence_for("Sigma_02").unwrap();
        assert_eq!(fact.preimage_components, ["Sigma_13"]);
        // the two diagonal lines swap with each other
        let fact = jx.incidence_for("Sigma_12").unwrap();
        assert_eq!(fact.preimage_components, ["Sigma_03"]);
        let fact = jx.incidence_for("Sigma_03").unwrap();
        assert_eq!(fact.preimage_components, ["Sigma_12"]);
    }

    #[test]
    fn jp3_lift_row_sums() {
        let j = builtin("J_P3").unwrap();
        let lift = j.monomial().unwrap();
        assert_eq!(*lift.degree(), Int::from(3));
        for row in lift.exponents() {
            let s: Int = row.iter().sum();
            assert_eq!(s, Int::from(3));
        }
    }

    #[test]
    fn power_map_parsing() {
        assert!(builtin("power_map(2,2)").is_ok());
        assert!(builtin("power_map(2, 2)").is_ok());
        assert!(builtin("power_map(0,2)").is_err());
        assert!(builtin("power_map(2)").is_err());
    }

    #[test]
    fn sigma_p2_is_quadratic_birational() {
        let s = builtin("sigma_P2").unwrap();
        assert_eq!(
            s.pullback_matrix(1).unwrap()[(0, 0)],
            Rat::from(Int::from(2))
        );
        assert_eq!(s.monomial().unwrap().topological_degree(), Int::from(1));
    }
}
