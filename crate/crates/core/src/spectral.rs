//! Characteristic polynomials and certified spectral-radius intervals.
//!
//! The characteristic polynomial is computed fraction-free: denominators are
//! cleared to an integer matrix, the Bareiss determinant runs on polynomial
//! entries, and the result is the minimal integer-coefficient multiple of
//! det(xI - m) with positive leading coefficient.
//!
//! The spectral radius comes back as a rational interval with outward
//! rounding only. When every eigenvalue is real, Sturm isolation of the
//! characteristic polynomial is enough. Otherwise the max squared modulus
//! is the largest real root of the root-product polynomial
//! res_y(p(y), y^d p(x/y)), whose roots are all pairwise products of
//! eigenvalues; conjugate pairs contribute |lambda|^2, so its largest real
//! root is exactly rho^2.

use crate::error::{CoreError, Result};
use crate::matrix::{bareiss_det, Matrix};
use crate::poly::{count_real_roots, isolate_real_roots, IntPoly, Poly, RootInterval};
use crate::scalar::denom_lcm;
use crate::{Int, Rat};
use num_traits::{One, Signed, Zero};

/// Closed rational interval `[lo, hi]`, the certified-result currency of
/// every spectral and dynamical-degree computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RatInterval {
    pub fn point(v: Rat) -> Self {
        RatInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn width(&self) -> Rat {
        self.hi.clone() - self.lo.clone()
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.lo <= *v && *v <= self.hi
    }
}

impl std::fmt::Display for RatInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}, {}]",
            crate::scalar::format_rat(&self.lo),
            crate::scalar::format_rat(&self.hi)
        )
    }
}

/// Minimal positive-leading integer multiple of det(xI - m).
pub fn char_poly(m: &Matrix<Rat>) -> Result<IntPoly> {
    if !m.is_square() {
        return Err(CoreError::Dimension(format!(
            "characteristic polynomial of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(IntPoly::one());
    }
    let d = denom_lcm(m.entries());
    // Entries of D*x*I - D*m, as integer polynomials in x.
    let mut pm: Matrix<IntPoly> = Matrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let scaled = m[(i, j)].clone() * Rat::from(d.clone());
            debug_assert!(scaled.denom().is_one());
            let b = scaled.numer().clone();
            pm[(i, j)] = if i == j {
                Poly::new(vec![-b, d.clone()])
            } else {
                Poly::constant(-b)
            };
        }
    }
    // det(xI - m) = det(DxI - Dm) / D^n; primitivization removes the
    // constant and normalizes the leading sign in one step.
    Ok(bareiss_det(&pm)?.primitive_positive())
}

/// Certified interval of width <= tol containing the spectral radius.
pub fn spectral_radius(m: &Matrix<Rat>, tol: &Rat) -> Result<RatInterval> {
    if !m.is_square() {
        return Err(CoreError::Dimension(
            "spectral radius of non-square matrix".into(),
        ));
    }
    if !tol.is_positive() {
        return Err(CoreError::DegenerateInput("tolerance must be > 0".into()));
    }
    if m.rows() == 0 {
        return Ok(RatInterval::point(Rat::zero()));
    }
    let p = char_poly(m)?;
    let (reduced, _zero_mult) = p.shift_down();
    let deg = reduced.degree().unwrap_or(0);
    if deg == 0 {
        // nilpotent: every eigenvalue is 0
        return Ok(RatInterval::point(Rat::zero()));
    }
    if count_real_roots(&reduced) == deg {
        return radius_from_real_spectrum(&reduced, tol);
    }
    radius_via_root_products(&reduced, tol)
}

fn abs_interval(r: &RootInterval) -> RatInterval {
    if !r.lo.is_negative() {
        RatInterval::new(r.lo.clone(), r.hi.clone())
    } else if !r.hi.is_positive() {
        RatInterval::new(-r.hi.clone(), -r.lo.clone())
    } else {
        let hi = if r.hi > -r.lo.clone() {
            r.hi.clone()
        } else {
            -r.lo.clone()
        };
        RatInterval::new(Rat::zero(), hi)
    }
}

fn radius_from_real_spectrum(p: &IntPoly, tol: &Rat) -> Result<RatInterval> {
    let two = Rat::from(Int::from(2));
    let roots = isolate_real_roots(p, &(tol.clone() / two))?;
    let mut lo = Rat::zero();
    let mut hi = Rat::zero();
    for r in &roots {
        let a = abs_interval(r);
        if a.lo > lo {
            lo = a.lo;
        }
        if a.hi > hi {
            hi = a.hi;
        }
    }
    Ok(RatInterval::new(lo, hi))
}

/// res_y(p(y), y^d p(x/y)): an integer polynomial in x whose roots are all
/// products of pairs of roots of p (ordered pairs, diagonal included).
fn root_product_poly(p: &IntPoly) -> Result<IntPoly> {
    let d = p.degree().expect("nonzero polynomial");
    debug_assert!(!p.coeff(0).is_zero(), "zero roots must be stripped first");
    let n = 2 * d;
    let mut s: Matrix<IntPoly> = Matrix::zero(n, n);
    // First d rows: coefficients of p in y, descending.
    for r in 0..d {
        for t in 0..=d {
            s[(r, r + t)] = Poly::constant(p.coeff(d - t));
        }
    }
    // Next d rows: q(y) = sum_i a_i x^i y^(d-i); coeff of y^(d-t) is a_t x^t.
    for r in 0..d {
        for t in 0..=d {
            s[(d + r, r + t)] = Poly::monomial(p.coeff(t), t);
        }
    }
    let res = bareiss_det(&s)?;
    if res.is_zero() {
        return Err(CoreError::Numerical(
            "degenerate resultant in spectral radius certification".into(),
        ));
    }
    Ok(res.primitive_positive())
}

/// Largest real root of p as an interval, refined until `done` says stop.
fn max_real_root_refined(
    p: &IntPoly,
    mut done: impl FnMut(&RootInterval) -> bool,
) -> Result<RootInterval> {
    let quarter = Rat::new(Int::one(), Int::from(4));
    let roots = isolate_real_roots(p, &quarter)?;
    let mut best = roots
        .last()
        .cloned()
        .ok_or_else(|| CoreError::Numerical("expected a real root".into()))?;
    let chain = refinement_chain(p, &best)?;
    let two = Rat::from(Int::from(2));
    let mut guard = 0;
    while !done(&best) {
        if best.is_exact() {
            break;
        }
        let mid = (best.lo.clone() + best.hi.clone()) / two.clone();
        if chain[0].is_root(&mid) {
            best = RootInterval {
                lo: mid.clone(),
                hi: mid,
                multiplicity: best.multiplicity,
            };
            continue;
        }
        let vl = variations(&chain, &best.lo);
        let vm = variations(&chain, &mid);
        if vl > vm {
            best.hi = mid;
        } else {
            best.lo = mid;
        }
        guard += 1;
        if guard > 100_000 {
            return Err(CoreError::Numerical("root refinement stalled".into()));
        }
    }
    Ok(best)
}

/// Sturm chain of the square-free factor whose root the interval isolates.
fn refinement_chain(p: &IntPoly, iv: &RootInterval) -> Result<Vec<IntPoly>> {
    for (q, _) in p.squarefree_decomposition() {
        if q.is_root(&iv.lo) || q.is_root(&iv.hi) {
            return Ok(q.sturm_chain());
        }
        let chain = q.sturm_chain();
        if variations(&chain, &iv.lo) > variations(&chain, &iv.hi) {
            return Ok(chain);
        }
    }
    Err(CoreError::Numerical(
        "interval does not isolate a root".into(),
    ))
}

fn variations(chain: &[IntPoly], x: &Rat) -> usize {
    let mut count = 0;
    let mut last: i8 = 0;
    for p in chain {
        let s = p.sign_at(x);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Rational upper bound on q^(1/n) within 2^(1-res), for q > 0.
pub(crate) fn nth_root_upper_rat(q: &Rat, n: u32, res: u32) -> Rat {
    debug_assert!(q.is_positive());
    let scale = Int::one() << res;
    let scaled = q * Rat::from(scale.pow(n));
    let floor = scaled.floor().to_integer();
    let m = floor.nth_root(n);
    if Rat::from(m.pow(n)) == scaled {
        return Rat::new(m, scale);
    }
    Rat::new(m + Int::one(), scale)
}

/// Lower bound on sqrt(q) within 2^-res, q >= 0.
fn sqrt_lower(q: &Rat, res: u32) -> Rat {
    let scale = Int::one() << res;
    let scaled = q * Rat::from(&scale * &scale);
    let floor = scaled.floor().to_integer();
    debug_assert!(!floor.is_negative());
    Rat::new(floor.sqrt(), scale)
}

/// Upper bound on sqrt(q) within 2^(1-res), q >= 0.
fn sqrt_upper(q: &Rat, res: u32) -> Rat {
    let scale = Int::one() << res;
    let scaled = q * Rat::from(&scale * &scale);
    let ceil = scaled.ceil().to_integer();
    Rat::new(ceil.sqrt() + Int::one(), scale)
}

fn radius_via_root_products(p: &IntPoly, tol: &Rat) -> Result<RatInterval> {
    let t = root_product_poly(p)?;
    // Resolution fine enough that the sqrt rounding error is < tol/4.
    let mut res: u32 = 4;
    let mut step = Rat::new(Int::one(), Int::one() << res);
    let eighth_tol = tol.clone() / Rat::from(Int::from(8));
    while step > eighth_tol {
        res += 1;
        step = Rat::new(Int::one(), Int::one() << res);
    }
    let interval = max_real_root_refined(&t, |iv| {
        if !iv.lo.is_positive() && !iv.is_exact() {
            return false;
        }
        let lo = if iv.lo.is_negative() {
            Rat::zero()
        } else {
            iv.lo.clone()
        };
        sqrt_upper(&iv.hi, res) - sqrt_lower(&lo, res) <= *tol
    })?;
    let lo = if interval.lo.is_negative() {
        Rat::zero()
    } else {
        interval.lo.clone()
    };
    Ok(RatInterval::new(
        sqrt_lower(&lo, res),
        sqrt_upper(&interval.hi, res),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rmat(rows: Vec<Vec<i64>>) -> Matrix<Rat> {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| Rat::from(Int::from(x))).collect())
                .collect(),
        )
        .unwrap()
    }

    fn ip(coeffs: &[i64]) -> IntPoly {
        Poly::new(coeffs.iter().map(|&c| Int::from(c)).collect())
    }

    fn tol(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    #[test]
    fn char_poly_scalar() {
        let m = rmat(vec![vec![3]]);
        assert_eq!(char_poly(&m).unwrap(), ip(&[-3, 1]));
    }

    #[test]
    fn char_poly_identity() {
        let m: Matrix<Rat> = Matrix::identity(2);
        assert_eq!(char_poly(&m).unwrap(), ip(&[1, -2, 1]));
    }

    #[test]
    fn char_poly_rational_entries() {
        // [[1/2, 0], [0, 1/3]]: det(xI-m) = (x-1/2)(x-1/3) = x^2 - 5/6 x + 1/6
        // minimal integer multiple: 6x^2 - 5x + 1
        let m = Matrix::from_rows(vec![
            vec![Rat::new(Int::one(), Int::from(2)), Rat::zero()],
            vec![Rat::zero(), Rat::new(Int::one(), Int::from(3))],
        ])
        .unwrap();
        assert_eq!(char_poly(&m).unwrap(), ip(&[1, -5, 6]));
    }

    #[test]
    fn char_poly_non_square_errors() {
        let m: Matrix<Rat> = Matrix::zero(2, 3);
        assert!(char_poly(&m).is_err());
    }

    #[test]
    fn radius_identity() {
        let m: Matrix<Rat> = Matrix::identity(5);
        let iv = spectral_radius(&m, &tol(1, 1_000_000_000)).unwrap();
        assert_eq!(iv, RatInterval::point(Rat::one()));
    }

    #[test]
    fn radius_diagonal() {
        let m = rmat(vec![vec![3, 0], vec![0, 1]]);
        let iv = spectral_radius(&m, &tol(1, 1_000_000_000)).unwrap();
        assert_eq!(iv, RatInterval::point(Rat::from(Int::from(3))));
    }

    #[test]
    fn radius_nilpotent() {
        let m = rmat(vec![vec![0, 1], vec![0, 0]]);
        let iv = spectral_radius(&m, &tol(1, 1000)).unwrap();
        assert_eq!(iv, RatInterval::point(Rat::zero()));
    }

    #[test]
    fn radius_rotation_complex_pair() {
        // [[0,-1],[1,0]] has eigenvalues +-i, rho = 1
        let m = rmat(vec![vec![0, -1], vec![1, 0]]);
        let iv = spectral_radius(&m, &tol(1, 1000)).unwrap();
        assert!(iv.contains(&Rat::one()), "{iv}");
        assert!(iv.width() <= tol(1, 1000));
    }

    #[test]
    fn radius_scaled_rotation() {
        // [[0,-4],[1,0]] has eigenvalues +-2i, rho = 2
        let m = rmat(vec![vec![0, -4], vec![1, 0]]);
        let iv = spectral_radius(&m, &tol(1, 100_000)).unwrap();
        assert!(iv.contains(&Rat::from(Int::from(2))), "{iv}");
        assert!(iv.width() <= tol(1, 100_000));
    }

    #[test]
    fn radius_mixed_real_and_complex() {
        // block diag(3, rotation): rho = 3 attained by a real eigenvalue,
        // certified through the root-product path.
        let m = rmat(vec![vec![3, 0, 0], vec![0, 0, -1], vec![0, 1, 0]]);
        let iv = spectral_radius(&m, &tol(1, 10_000)).unwrap();
        assert!(iv.contains(&Rat::from(Int::from(3))), "{iv}");
        assert!(iv.width() <= tol(1, 10_000));
    }

    #[test]
    fn involution_radius_is_one() {
        // permutation involution: eigenvalues +-1
        let m = rmat(vec![vec![0, 1], vec![1, 0]]);
        assert!(m.pow(2).unwrap().is_identity());
        let iv = spectral_radius(&m, &tol(1, 1_000_000)).unwrap();
        assert_eq!(iv, RatInterval::point(Rat::one()));
    }
}
