//! Randomized invariants: canonical rational arithmetic, characteristic
//! polynomials, certified radii of involutions, root isolation ledgers,
//! monomial reduction laws, serialization round-trips, and the float-side
//! functional equation.

use cohodyn_core::cohomology::{expr::parse_class, ModelFile};
use cohodyn_core::green::{green_potential, lelong_estimate, GreenParams, Lift64};
use cohodyn_core::monomial::{lift_to_text, parse_lift_text, MonomialLift};
use cohodyn_core::{
    blowup_points, char_poly, isolate_real_roots, spectral_radius, CohomologyClass, Int, Poly, Rat,
    RatInterval, RatMatrix, C64,
};
use num_traits::{One, Signed};
use proptest::prelude::*;

fn rat(n: i64) -> Rat {
    Rat::from(Int::from(n))
}

proptest! {
    #[test]
    fn rational_arithmetic_is_canonical(
        an in -50i64..50, ad in 1i64..20,
        bn in -50i64..50, bd in 1i64..20,
    ) {
        let a = Rat::new(Int::from(an), Int::from(ad));
        let b = Rat::new(Int::from(bn), Int::from(bd));
        prop_assert_eq!((a.clone() + b.clone()) - b.clone(), a.clone());
        let c = a * b;
        // lowest terms with positive denominator
        prop_assert!(c.denom().is_positive());
        prop_assert!(num_integer::Integer::gcd(c.numer(), c.denom()).is_one());
    }

    #[test]
    fn charpoly_vanishes_on_diagonal_spectrum(diag in prop::collection::vec(-9i64..9, 1..6)) {
        let n = diag.len();
        let mut m = RatMatrix::zero(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = rat(*d);
        }
        let cp = char_poly(&m).unwrap();
        prop_assert_eq!(cp.degree(), Some(n));
        for d in &diag {
            prop_assert!(cp.is_root(&rat(*d)), "char poly misses eigenvalue {d}");
        }
    }

    #[test]
    fn signed_involutions_have_unit_radius(seed in any::<u64>(), n in 2usize..6) {
        // build a random signed involution: an involutive permutation with
        // matching signs on the 2-cycles, so M^2 = I exactly
        let mut state = seed | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut perm: Vec<usize> = (0..n).collect();
        for i in 0..n {
            if perm[i] == i {
                let j = i + (next() as usize) % (n - i);
                if perm[j] == j {
                    perm.swap(i, j);
                }
            }
        }
        let mut m = RatMatrix::zero(n, n);
        let mut signs = vec![Rat::one(); n];
        for i in 0..n {
            if next() % 2 == 0 {
                signs[i] = -Rat::one();
            }
        }
        for i in 0..n {
            let j = perm[i];
            let s = if i <= j { signs[i].clone() } else { signs[j].clone() };
            m[(j, i)] = s;
        }
        prop_assert!(m.pow(2).unwrap().is_identity());
        let tol = Rat::new(Int::one(), Int::from(1_000_000));
        let iv = spectral_radius(&m, &tol).unwrap();
        prop_assert!(iv.contains(&Rat::one()), "{iv:?}");
        prop_assert!(iv.lo >= Rat::one() - tol.clone());
        prop_assert!(iv.hi <= Rat::one() + tol);
    }

    #[test]
    fn root_isolation_ledger(
        root_data in prop::collection::vec((-6i64..6, 1usize..3), 1..4),
        width_den in 8i64..512,
    ) {
        use std::collections::BTreeMap;
        let mut mults: BTreeMap<i64, usize> = BTreeMap::new();
        for (r, m) in &root_data {
            *mults.entry(*r).or_insert(0) += m;
        }
        let mut p = Poly::new(vec![Int::one()]);
        for (&r, &m) in &mults {
            for _ in 0..m {
                p = p * Poly::new(vec![Int::from(-r), Int::one()]);
            }
        }
        let width = Rat::new(Int::one(), Int::from(width_den));
        let intervals = isolate_real_roots(&p, &width).unwrap();
        // one interval per distinct root, with the right multiplicity
        prop_assert_eq!(intervals.len(), mults.len());
        for w in intervals.windows(2) {
            prop_assert!(w[0].hi < w[1].lo || w[0].is_exact() || w[1].is_exact());
        }
        for iv in &intervals {
            prop_assert!(iv.width() <= width || iv.is_exact());
            let hit: Vec<_> = mults
                .iter()
                .filter(|(r, _)| iv.contains(&rat(**r)))
                .collect();
            prop_assert_eq!(hit.len(), 1, "interval {:?} covers {:?}", iv, hit);
            prop_assert_eq!(iv.multiplicity, *hit[0].1);
        }
    }

    #[test]
    fn monomial_reduction_idempotent(
        k in 1usize..4,
        d in 1i64..4,
        seed in any::<u64>(),
    ) {
        let mut state = seed | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let rows: Vec<Vec<Int>> = (0..=k)
            .map(|_| {
                let mut row = vec![0i64; k + 1];
                for _ in 0..d {
                    row[(next() as usize) % (k + 1)] += 1;
                }
                row.into_iter().map(Int::from).collect()
            })
            .collect();
        let Ok(lift) = MonomialLift::lift(&rows) else {
            return Ok(()); // not dominant: nothing to check
        };
        // relifting the reduced exponents is the identity
        prop_assert_eq!(MonomialLift::lift(lift.exponents()).unwrap(), lift.clone());
        // text round-trip
        prop_assert_eq!(parse_lift_text(&lift_to_text(&lift)).unwrap(), lift.clone());
        // |det| multiplicativity under self-composition
        let (sq, _) = lift.compose_reduce(&lift).unwrap();
        let t = lift.topological_degree();
        prop_assert_eq!(sq.topological_degree(), &t * &t);
    }

    #[test]
    fn model_files_round_trip(k in 2usize..4, m in 0usize..5) {
        let x = blowup_points("M", k, m).unwrap();
        let file = ModelFile::from_model(&x);
        let via_toml = ModelFile::from_toml(&file.to_toml().unwrap()).unwrap().into_model().unwrap();
        prop_assert_eq!(&*via_toml, &*x);
        let via_json = ModelFile::from_json(&file.to_json().unwrap()).unwrap().into_model().unwrap();
        prop_assert_eq!(&*via_json, &*x);
    }

    #[test]
    fn class_display_parses_back(coeffs in prop::collection::vec((-20i64..20, 1i64..6), 5)) {
        let x = blowup_points("X", 3, 4).unwrap();
        let c = CohomologyClass::new(
            x.clone(),
            2,
            coeffs.iter().map(|(n, d)| Rat::new(Int::from(*n), Int::from(*d))).collect(),
        )
        .unwrap();
        let back = parse_class(&x, &c.display(), Some(2)).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn power_map_functional_equation(
        re in prop::collection::vec(-2.0f64..2.0, 3),
        im in prop::collection::vec(-2.0f64..2.0, 3),
        d in 2u32..4,
    ) {
        let z: Vec<C64> = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect();
        prop_assume!(z.iter().any(|c| c.norm() > 1e-3));
        let lift = Lift64::power(2, d).unwrap();
        let params = GreenParams::default();
        let fz = lift.eval(&z);
        let g = green_potential(&lift, &z, 40, &params).unwrap().value();
        let gf = green_potential(&lift, &fz, 40, &params).unwrap().value();
        prop_assert!((gf - f64::from(d) * g).abs() < 1e-10, "G(F(z)) = {gf}, dG(z) = {}", f64::from(d) * g);
    }
}

#[test]
fn involution_radius_within_tolerance_band() {
    // explicit-matrix form of the involution law: M^2 = I implies the
    // certified interval contains 1 inside [1 - tol, 1 + tol]
    let m = RatMatrix::from_rows(vec![
        vec![rat(0), rat(1), rat(0)],
        vec![rat(1), rat(0), rat(0)],
        vec![rat(0), rat(0), rat(-1)],
    ])
    .unwrap();
    assert!(m.pow(2).unwrap().is_identity());
    let tol = Rat::new(Int::one(), Int::from(1_000_000_000));
    let iv = spectral_radius(&m, &tol).unwrap();
    assert_eq!(iv, RatInterval::point(Rat::one()));
}

#[test]
fn lelong_estimate_stable_under_sample_doubling() {
    // all three example families: log singularity, doubled weight, and the
    // smooth power-map potential
    let a = C64::new(0.2, 0.1);
    let log_sing = |z: &[C64]| Some((z[0] - a).norm().ln());
    let doubled = |z: &[C64]| Some(2.0 * z[0].norm().ln() + (1.0 + z[1].norm_sqr()).ln());
    let lift = Lift64::power(2, 2).unwrap();
    let params = GreenParams::default();
    let smooth = |z: &[C64]| {
        green_potential(&lift, z, 40, &params)
            .ok()
            .map(|e| e.value())
    };

    let e1a = lelong_estimate(log_sing, &[a], 0.01, 0.001, 512).unwrap();
    let e1b = lelong_estimate(log_sing, &[a], 0.01, 0.001, 1024).unwrap();
    assert!((e1a.value - e1b.value).abs() < 0.02);

    let c2 = [C64::new(0.0, 0.0), C64::new(0.5, 0.0)];
    let e2a = lelong_estimate(doubled, &c2, 0.01, 0.001, 512).unwrap();
    let e2b = lelong_estimate(doubled, &c2, 0.01, 0.001, 1024).unwrap();
    assert!((e2a.value - e2b.value).abs() < 0.05);

    let c3 = [C64::new(1.0, 0.0), C64::new(0.9, 0.0), C64::new(1.2, 0.0)];
    let e3a = lelong_estimate(smooth, &c3, 0.01, 0.001, 512).unwrap();
    let e3b = lelong_estimate(smooth, &c3, 0.01, 0.001, 1024).unwrap();
    assert!((e3a.value - e3b.value).abs() < 0.02);
}
