//! Dense univariate polynomials over a generic scalar.
//!
//! Coefficients are stored lowest degree first; the vector is empty for the
//! zero polynomial and the last element is nonzero otherwise. Integer
//! polynomials carry the real-root machinery: primitive-PRS gcd, Yun
//! square-free decomposition, Sturm chains, and bisection isolation with
//! certified rational interval endpoints.

use crate::error::{CoreError, Result};
use crate::scalar::{int_gcd, ExactDiv, Ring};
use crate::{Int, Rat};
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Ring> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    pub fn x() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    /// `c * x^k`
    pub fn monomial(c: T, k: usize) -> Self {
        let mut v = vec![T::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![]);
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            // i * c without requiring From<usize>: repeated addition is fine
            // at these degrees, but fold a doubling ladder for safety.
            out.push(mul_by_usize(c, i));
        }
        Poly::new(out)
    }

    /// p(c*x); used to undo the denominator clearing in char_poly.
    pub fn scale_arg(&self, c: &T) -> Self {
        let mut pow = T::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let out = a.clone() * pow.clone();
                pow = pow.clone() * c.clone();
                out
            })
            .collect();
        Poly::new(coeffs)
    }

    /// Drop the factor x^v where v is the multiplicity of the root 0.
    pub fn shift_down(&self) -> (Self, usize) {
        let v = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len());
        (Poly::new(self.coeffs[v..].to_vec()), v)
    }

    fn mul_term(&self, c: &T, k: usize) -> Self {
        let mut v = vec![T::zero(); self.coeffs.len() + k];
        for (i, a) in self.coeffs.iter().enumerate() {
            v[i + k] = a.clone() * c.clone();
        }
        Poly::new(v)
    }
}

fn mul_by_usize<T: Ring>(c: &T, n: usize) -> T {
    let mut acc = T::zero();
    let mut base = c.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc + base.clone();
        }
        base = base.clone() + base.clone();
        n >>= 1;
    }
    acc
}

impl<T: Ring> Add for Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            let b = rhs.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            v.push(a + b);
        }
        Poly::new(v)
    }
}

impl<T: Ring> Sub for Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: Poly<T>) -> Poly<T> {
        self + (-rhs)
    }
}

impl<T: Ring> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<T: Ring> Mul for Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: Poly<T>) -> Poly<T> {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::new(vec![]);
        }
        let mut v = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(v)
    }
}

impl<T: Ring> Zero for Poly<T> {
    fn zero() -> Self {
        Poly { coeffs: vec![] }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Ring> One for Poly<T> {
    fn one() -> Self {
        Poly::constant(T::one())
    }
}

impl<T: Ring + ExactDiv> ExactDiv for Poly<T> {
    /// Long division that must terminate with zero remainder; each step
    /// divides leading coefficients exactly. Panics on contract violation
    /// (only reachable through a bug in the caller's divisibility claim).
    fn exact_div(&self, d: &Self) -> Self {
        assert!(!d.is_zero(), "exact_div by zero polynomial");
        let dd = d.degree().unwrap();
        let lc = d.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some(dr) = rem.degree() {
            assert!(dr >= dd, "non-exact polynomial division (degree)");
            let c = rem.leading().unwrap().exact_div(&lc);
            let k = dr - dd;
            q = q + Poly::monomial(c.clone(), k);
            rem = rem - d.mul_term(&c, k);
            if rem.degree() == Some(dr) {
                panic!("non-exact polynomial division (no progress)");
            }
        }
        q
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Integer-coefficient machinery
// ---------------------------------------------------------------------------

pub type IntPoly = Poly<Int>;

impl IntPoly {
    /// gcd of coefficients, non-negative; 0 for the zero polynomial.
    pub fn content(&self) -> Int {
        self.coeffs
            .iter()
            .fold(Int::zero(), |acc, c| int_gcd(&acc, c))
    }

    /// Divide by the content, keeping the sign of the leading coefficient.
    pub fn primitive(&self) -> IntPoly {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        Poly::new(self.coeffs.iter().map(|x| x.exact_div(&c)).collect())
    }

    /// Primitive with positive leading coefficient (gcd normal form).
    pub fn primitive_positive(&self) -> IntPoly {
        let p = self.primitive();
        match p.leading() {
            Some(l) if l.is_negative() => -p,
            _ => p,
        }
    }

    /// Sign of p(a/b) via the homogenized integer evaluation
    /// b^deg * p(a/b); the canonical denominator b is > 0 so the sign is
    /// the sign of p at the rational point.
    pub fn sign_at(&self, q: &Rat) -> i8 {
        let Some(d) = self.degree() else { return 0 };
        let a = q.numer();
        let b = q.denom();
        let mut acc = self.coeffs[d].clone();
        let mut bpow = Int::one();
        for i in (0..d).rev() {
            bpow = &bpow * b;
            acc = acc * a + &self.coeffs[i] * &bpow;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn is_root(&self, q: &Rat) -> bool {
        self.sign_at(q) == 0
    }

    /// Pseudo-remainder scaled by a positive constant, so the sign pattern
    /// matches the exact rational remainder (what Sturm chains need).
    pub fn signed_pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        assert!(!d.is_zero());
        let dd = d.degree().unwrap();
        let lc = d.leading().unwrap().clone();
        let mut r = self.clone();
        let mut scale_count: usize = 0;
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let lead_r = r.leading().unwrap().clone();
            r = r.mul_term(&lc, 0) - d.mul_term(&lead_r, dr - dd);
            scale_count += 1;
            if r.degree() == Some(dr) {
                panic!("pseudo-division made no progress");
            }
        }
        // r = lc^scale_count * (exact remainder); flip if the factor is negative
        if lc.is_negative() && scale_count % 2 == 1 {
            r = -r;
        }
        r
    }

    /// Primitive-PRS polynomial gcd, primitive with positive leading.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive_positive();
        let mut b = other.primitive_positive();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.signed_pseudo_rem(&b);
            if r.is_zero() {
                return b.primitive_positive();
            }
            a = b;
            b = r.primitive();
        }
    }

    /// Yun square-free decomposition: returns `(factor, multiplicity)`
    /// pairs with pairwise-coprime square-free factors of degree >= 1.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, usize)> {
        let f = self.primitive_positive();
        let Some(df) = f.degree() else { return vec![] };
        if df == 0 {
            return vec![];
        }
        let fp = f.derivative();
        let g = f.gcd(&fp);
        if g.degree() == Some(0) {
            return vec![(f, 1)];
        }
        let mut out = Vec::new();
        let mut c = f.exact_div(&g);
        let mut d = fp.exact_div(&g) - c.derivative();
        let mut i = 1usize;
        while c.degree().is_some_and(|dc| dc > 0) {
            let a = c.gcd(&d);
            if a.degree().is_some_and(|da| da > 0) {
                out.push((a.clone(), i));
            }
            c = c.exact_div(&a);
            d = d.exact_div(&a) - c.derivative();
            i += 1;
            if i > df + 2 {
                panic!("square-free decomposition failed to terminate");
            }
        }
        out
    }

    /// Canonical Sturm chain of a square-free polynomial, each member a
    /// positive-constant multiple of the exact rational chain member.
    pub fn sturm_chain(&self) -> Vec<IntPoly> {
        let mut chain = vec![self.clone(), self.derivative().primitive_sign_preserving()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() || chain[n - 1].degree() == Some(0) {
                if chain[n - 1].is_zero() {
                    chain.pop();
                }
                return chain;
            }
            let r = chain[n - 2].signed_pseudo_rem(&chain[n - 1]);
            if r.is_zero() {
                return chain;
            }
            chain.push((-r).primitive_sign_preserving());
        }
    }

    /// Divide by |content| only — leaves the sign alone, which is essential
    /// inside Sturm chains.
    fn primitive_sign_preserving(&self) -> IntPoly {
        self.primitive()
    }

    /// Cauchy root bound as an exact power of two: every complex root has
    /// modulus strictly below the returned value. Power-of-two endpoints
    /// keep all bisection midpoints dyadic, so dyadic rational roots are
    /// eventually hit exactly.
    pub fn root_bound_pow2(&self) -> Rat {
        let d = self.degree().expect("root bound of zero polynomial");
        let lc = self.coeffs[d].clone();
        let mut max_ratio = Rat::zero();
        for c in &self.coeffs[..d] {
            let r = Rat::new(c.abs(), lc.abs());
            if r > max_ratio {
                max_ratio = r;
            }
        }
        let bound = Rat::one() + max_ratio; // |root| <= bound
        let mut b = Rat::one();
        let two = Rat::from(Int::from(2));
        while b <= bound {
            b *= two.clone();
        }
        b
    }
}

fn sign_variations(signs: &[i8]) -> usize {
    let mut count = 0;
    let mut last: i8 = 0;
    for &s in signs {
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

fn variations_at(chain: &[IntPoly], x: &Rat) -> usize {
    let signs: Vec<i8> = chain.iter().map(|p| p.sign_at(x)).collect();
    sign_variations(&signs)
}

/// Isolating interval for real roots: the enclosed polynomial has exactly
/// `multiplicity` roots (counted with multiplicity) in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rat,
    pub hi: Rat,
    pub multiplicity: usize,
}

impl RootInterval {
    pub fn width(&self) -> Rat {
        self.hi.clone() - self.lo.clone()
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    fn overlaps(&self, other: &RootInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// One square-free factor together with its Sturm chain and the roots found
/// so far; used during isolation and cross-factor disjointness refinement.
struct FactorRoots {
    chain: Vec<IntPoly>,
    intervals: Vec<RootInterval>,
}

/// Isolate all real roots of `p` in disjoint intervals of width at most
/// `width`, with multiplicities from the square-free decomposition.
pub fn isolate_real_roots(p: &IntPoly, width: &Rat) -> Result<Vec<RootInterval>> {
    if p.is_zero() {
        return Err(CoreError::DegenerateInput(
            "cannot isolate roots of the zero polynomial".into(),
        ));
    }
    if !width.is_positive() {
        return Err(CoreError::DegenerateInput(
            "interval width must be > 0".into(),
        ));
    }
    let mut factors = Vec::new();
    for (q, mult) in p.squarefree_decomposition() {
        factors.push(isolate_squarefree(&q, width, mult));
    }
    // Intervals within a factor are disjoint by construction; different
    // factors are coprime so refinement always separates them.
    let mut guard = 0usize;
    loop {
        let mut all: Vec<(usize, usize)> = Vec::new();
        for (fi, f) in factors.iter().enumerate() {
            for ii in 0..f.intervals.len() {
                all.push((fi, ii));
            }
        }
        all.sort_by(|a, b| {
            let ia = &factors[a.0].intervals[a.1];
            let ib = &factors[b.0].intervals[b.1];
            ia.lo.cmp(&ib.lo).then(ia.hi.cmp(&ib.hi))
        });
        let mut clash: Option<((usize, usize), (usize, usize))> = None;
        for w in all.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.0 != b.0 && factors[a.0].intervals[a.1].overlaps(&factors[b.0].intervals[b.1]) {
                clash = Some((a, b));
                break;
            }
        }
        let Some((a, b)) = clash else { break };
        refine_once(&mut factors[a.0], a.1);
        refine_once(&mut factors[b.0], b.1);
        guard += 1;
        if guard > 100_000 {
            return Err(CoreError::Numerical(
                "root isolation failed to separate factors".into(),
            ));
        }
    }
    let mut out: Vec<RootInterval> = factors.into_iter().flat_map(|f| f.intervals).collect();
    out.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
    Ok(out)
}

fn refine_once(f: &mut FactorRoots, idx: usize) {
    let iv = f.intervals[idx].clone();
    if iv.is_exact() {
        return;
    }
    let q = &f.chain[0];
    let two = Rat::from(Int::from(2));
    let mid = (iv.lo.clone() + iv.hi.clone()) / two;
    if q.is_root(&mid) {
        f.intervals[idx] = RootInterval {
            lo: mid.clone(),
            hi: mid,
            multiplicity: iv.multiplicity,
        };
        return;
    }
    let left = variations_at(&f.chain, &iv.lo) - variations_at(&f.chain, &mid);
    f.intervals[idx] = if left == 1 {
        RootInterval {
            lo: iv.lo,
            hi: mid,
            multiplicity: iv.multiplicity,
        }
    } else {
        RootInterval {
            lo: mid,
            hi: iv.hi,
            multiplicity: iv.multiplicity,
        }
    };
}

fn isolate_squarefree(q: &IntPoly, width: &Rat, multiplicity: usize) -> FactorRoots {
    let deg = q.degree().expect("square-free factor cannot be zero");
    // Linear factor: the root is exact.
    if deg == 1 {
        let root = Rat::new(-q.coeff(0), q.coeff(1));
        return FactorRoots {
            chain: vec![q.clone()],
            intervals: vec![RootInterval {
                lo: root.clone(),
                hi: root,
                multiplicity,
            }],
        };
    }
    let chain = q.sturm_chain();
    let bound = q.root_bound_pow2();
    let lo = -bound.clone();
    let hi = bound;
    let v_lo = variations_at(&chain, &lo);
    let v_hi = variations_at(&chain, &hi);
    let mut intervals = Vec::new();
    // Work stack of (lo, hi, v_lo, v_hi); endpoints are never roots.
    let mut stack = vec![(lo, hi, v_lo, v_hi)];
    let two = Rat::from(Int::from(2));
    while let Some((lo, hi, v_lo, v_hi)) = stack.pop() {
        let count = v_lo - v_hi;
        if count == 0 {
            continue;
        }
        if count == 1 && hi.clone() - lo.clone() <= *width {
            intervals.push(RootInterval {
                lo,
                hi,
                multiplicity,
            });
            continue;
        }
        let mid = (lo.clone() + hi.clone()) / two.clone();
        if q.is_root(&mid) {
            intervals.push(RootInterval {
                lo: mid.clone(),
                hi: mid.clone(),
                multiplicity,
            });
            // Find punctured neighborhood endpoints that are non-roots and
            // exclude every other root.
            let mut delta = (hi.clone() - lo.clone()) / (two.clone() * two.clone());
            loop {
                let l = mid.clone() - delta.clone();
                let r = mid.clone() + delta.clone();
                if !q.is_root(&l) && !q.is_root(&r) {
                    let vl = variations_at(&chain, &l);
                    let vr = variations_at(&chain, &r);
                    if vl - vr == 1 {
                        stack.push((lo, l, v_lo, vl));
                        stack.push((r, hi, vr, v_hi));
                        break;
                    }
                }
                delta /= two.clone();
            }
        } else {
            let v_mid = variations_at(&chain, &mid);
            if v_lo > v_mid {
                stack.push((lo, mid.clone(), v_lo, v_mid));
            }
            if v_mid > v_hi {
                stack.push((mid, hi, v_mid, v_hi));
            }
        }
    }
    FactorRoots { chain, intervals }
}

/// Total number of real roots (with multiplicity), via Sturm counts at the
/// outer bound of each square-free factor. Used as an independent
/// cross-check of isolation output.
pub fn count_real_roots(p: &IntPoly) -> usize {
    let mut total = 0;
    for (q, mult) in p.squarefree_decomposition() {
        if q.degree() == Some(1) {
            total += mult;
            continue;
        }
        let chain = q.sturm_chain();
        let b = q.root_bound_pow2();
        total += (variations_at(&chain, &-b.clone()) - variations_at(&chain, &b)) * mult;
    }
    total
}
