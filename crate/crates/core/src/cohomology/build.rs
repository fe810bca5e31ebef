//! Built-in model constructions: projective space, blowups of P^k at
//! points, and Künneth products.

use super::CohomologyModel;
use crate::error::{CoreError, Result};
use crate::scalar::binomial;
use crate::{Rat, RatMatrix};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

fn unit_vec(len: usize, idx: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); len];
    v[idx] = Rat::one();
    v
}

/// P^k with basis one, H, H2, ..., pt and all pairings 1. Supports k >= 1.
pub fn projective_space(name: &str, k: usize) -> Result<Arc<CohomologyModel>> {
    if k < 1 {
        return Err(CoreError::Unsupported(
            "projective space needs k >= 1".into(),
        ));
    }
    build_blowup(name, k, &[])
}

/// Blowup of P^k at m distinct generic points, exceptional divisors named
/// E0..E{m-1}. Requires k >= 2.
pub fn blowup_points(name: &str, k: usize, m: usize) -> Result<Arc<CohomologyModel>> {
    let names: Vec<String> = (0..m).map(|i| i.to_string()).collect();
    blowup_points_named(name, k, &names)
}

/// Blowup with per-point name suffixes: exceptional classes are E{suffix}
/// at degree 1 and L{suffix} at degree k-1.
pub fn blowup_points_named(
    name: &str,
    k: usize,
    points: &[String],
) -> Result<Arc<CohomologyModel>> {
    if k < 2 {
        return Err(CoreError::Unsupported(format!(
            "blowup of P^{k}: only dimension >= 2 is supported"
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for s in points {
        if !seen.insert(s) {
            return Err(CoreError::Naming(format!("duplicate point name {s:?}")));
        }
    }
    build_blowup(name, k, points)
}

fn build_blowup(name: &str, k: usize, points: &[String]) -> Result<Arc<CohomologyModel>> {
    let m = points.len();
    let mut bases: Vec<Vec<String>> = Vec::with_capacity(k + 1);
    let mut pairings: Vec<RatMatrix> = Vec::with_capacity(k + 1);
    for p in 0..=k {
        if p == 0 {
            bases.push(vec!["one".into()]);
            pairings.push(RatMatrix::identity(1));
            continue;
        }
        if p == k {
            // on P^1 the top class is the hyperplane itself
            let top = if k == 1 { "H" } else { "pt" };
            bases.push(vec![top.into()]);
            pairings.push(RatMatrix::identity(1));
            continue;
        }
        let h_name = if p == 1 {
            "H".to_string()
        } else {
            format!("H{p}")
        };
        let e_prefix = if p == 1 {
            "E".to_string()
        } else if p == k - 1 {
            "L".to_string()
        } else {
            // intermediate degrees get a degree suffix to keep names
            // globally unique
            format!("E{p}_")
        };
        let mut gens = vec![h_name];
        for s in points {
            gens.push(format!("{e_prefix}{s}"));
        }
        bases.push(gens);
        // The exceptional generators are the classes of linear subspaces of
        // the exceptional P^(k-1); complementary ones always pair to -1,
        // which is what makes the degree-p and degree-(k-p) tables exact
        // transposes of each other.
        let mut pm = RatMatrix::zero(m + 1, m + 1);
        pm[(0, 0)] = Rat::one();
        for i in 0..m {
            pm[(i + 1, i + 1)] = -Rat::one();
        }
        pairings.push(pm);
    }
    // H is nef on the blowup (not Kähler); the mass pairing against its
    // powers is still a valid positivity obstruction. A genuinely Kähler
    // class can be supplied through a model file for strict tests.
    let kahler = unit_vec(bases[1].len(), 0);
    let mut kahler_powers = BTreeMap::new();
    for p in 0..=k {
        kahler_powers.insert(p, unit_vec(bases[p].len(), 0));
    }
    CohomologyModel::new(name.to_string(), k, bases, pairings, kahler, kahler_powers)
}

/// Künneth product of two models. Basis of H^{p,p} is the disjoint union of
/// tensor generators over p1 + p2 = p (p1 descending); the pairing is the
/// product of factor pairings on matching tensor blocks and zero otherwise.
pub fn product_model(
    a: &Arc<CohomologyModel>,
    b: &Arc<CohomologyModel>,
) -> Result<Arc<CohomologyModel>> {
    let ka = a.dim();
    let kb = b.dim();
    let k = ka + kb;
    let name = format!("{}x{}", a.name(), b.name());

    // block layout at degree p: (p1, p2 = p - p1), p1 descending
    let blocks = |p: usize| -> Vec<(usize, usize)> {
        let lo = p.saturating_sub(kb);
        let hi = p.min(ka);
        (lo..=hi).rev().map(|p1| (p1, p - p1)).collect()
    };

    let mut bases: Vec<Vec<String>> = Vec::with_capacity(k + 1);
    for p in 0..=k {
        let mut gens = Vec::new();
        for (p1, p2) in blocks(p) {
            for ga in a.basis(p1)? {
                for gb in b.basis(p2)? {
                    gens.push(format!("{ga}_{gb}"));
                }
            }
        }
        bases.push(gens);
    }

    let mut pairings: Vec<RatMatrix> = Vec::with_capacity(k + 1);
    for p in 0..=k {
        let rows = bases[p].len();
        let cols = bases[k - p].len();
        let mut pm = RatMatrix::zero(rows, cols);
        let mut row_off = 0;
        for (p1, p2) in blocks(p) {
            let block_rows = a.basis_len(p1) * b.basis_len(p2);
            // the matching column block is (ka - p1, kb - p2)
            let mut col_off = 0;
            for (q1, q2) in blocks(k - p) {
                let block_cols = a.basis_len(q1) * b.basis_len(q2);
                if q1 == ka - p1 && q2 == kb - p2 {
                    let block = a.pairing(p1)?.kronecker(b.pairing(p2)?);
                    for i in 0..block.rows() {
                        for j in 0..block.cols() {
                            pm[(row_off + i, col_off + j)] = block[(i, j)].clone();
                        }
                    }
                }
                col_off += block_cols;
            }
            row_off += block_rows;
        }
        pairings.push(pm);
    }

    // kahler = omega_a (x) 1 + 1 (x) omega_b, written in the degree-1 layout
    let mut kahler = Vec::new();
    for (p1, p2) in blocks(1) {
        match (p1, p2) {
            (1, 0) => kahler.extend(a.kahler_coeffs().iter().cloned()),
            (0, 1) => kahler.extend(b.kahler_coeffs().iter().cloned()),
            _ => unreachable!(),
        }
    }

    // (omega_a + omega_b)^q = sum binom(q, i) omega_a^i (x) omega_b^(q-i)
    let mut kahler_powers = BTreeMap::new();
    'degree: for q in 0..=k {
        let mut coeffs = Vec::new();
        for (p1, p2) in blocks(q) {
            let (Some(pa), Some(pb)) = (a.kahler_power_coeffs(p1), b.kahler_power_coeffs(p2))
            else {
                continue 'degree;
            };
            let c = Rat::from(binomial(q, p1));
            for xa in pa {
                for xb in pb {
                    coeffs.push(xa * xb * &c);
                }
            }
        }
        kahler_powers.insert(q, coeffs);
    }

    CohomologyModel::new(name, k, bases, pairings, kahler, kahler_powers)
}

#[cfg(test)]
mod tests {
    use super::super::CohomologyClass;
    use super::*;
    use crate::Int;

    fn rat(n: i64) -> Rat {
        Rat::from(Int::from(n))
    }

    #[test]
    fn p1_x_p1_kunneth() {
        let p1 = projective_space("A", 1).unwrap();
        let q1 = projective_space("B", 1).unwrap();
        let prod = product_model(&p1, &q1).unwrap();
        assert_eq!(prod.dim(), 2);
        assert_eq!(prod.basis(1).unwrap(), ["H_one", "one_H"]);
        let ha = CohomologyClass::generator(&prod, "H_one").unwrap();
        let hb = CohomologyClass::generator(&prod, "one_H").unwrap();
        assert_eq!(ha.pair(&hb).unwrap(), rat(1));
        assert_eq!(ha.pair(&ha).unwrap(), rat(0));
        assert_eq!(hb.pair(&hb).unwrap(), rat(0));
        // top class H (x) H pairs 1 with one (x) one
        let top = CohomologyClass::generator(&prod, "H_H").unwrap();
        let unit = CohomologyClass::generator(&prod, "one_one").unwrap();
        assert_eq!(top.pair(&unit).unwrap(), rat(1));
    }

    #[test]
    fn kunneth_expansion_oracle() {
        // (H_a + H_b)^2 on P^1 x P^1 must integrate to 2:
        // the cross terms each contribute 1.
        let prod = product_model(
            &projective_space("A", 1).unwrap(),
            &projective_space("B", 1).unwrap(),
        )
        .unwrap();
        let omega = CohomologyClass::kahler(&prod).unwrap();
        assert_eq!(omega.pair(&omega).unwrap(), rat(2));
        // and the precomputed square has the same pairing against the unit
        let sq = prod.kahler_power_coeffs(2).unwrap();
        let sq_class = CohomologyClass::new(prod.clone(), 2, sq.to_vec()).unwrap();
        let unit = CohomologyClass::generator(&prod, "one_one").unwrap();
        assert_eq!(sq_class.pair(&unit).unwrap(), rat(2));
    }

    #[test]
    fn product_with_blowup_dimension_count() {
        let x = blowup_points("X", 3, 4).unwrap();
        let p1 = projective_space("C", 1).unwrap();
        let prod = product_model(&x, &p1).unwrap();
        assert_eq!(prod.dim(), 4);
        // H^{2,2}(X x P^1) = H^{2,2}(X) (x) 1 + H^{1,1}(X) (x) H:
        // 5 + 5 generators
        assert_eq!(prod.basis_len(2), 10);
        // nondegeneracy of every pairing
        for p in 0..=prod.dim() {
            let pm = prod.pairing(p).unwrap();
            let det = crate::bareiss_det(&pm.map(|r| r.numer().clone())).unwrap();
            assert!(!det.is_zero(), "degenerate pairing at degree {p}");
        }
    }

    #[test]
    fn duplicate_point_names_rejected() {
        let names = vec!["a".to_string(), "a".to_string()];
        assert!(blowup_points_named("X", 3, &names).is_err());
    }

    #[test]
    fn low_dimension_unsupported() {
        assert!(blowup_points("X", 1, 2).is_err());
        assert!(projective_space("P0", 0).is_err());
    }
}
