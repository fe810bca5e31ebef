//! Scalar abstractions and the concrete exact types.
//!
//! The containers in this crate ([`Matrix`](crate::matrix::Matrix),
//! [`Poly`](crate::poly::Poly)) are generic over a scalar so the same code
//! runs over integers, rationals, and polynomial entries. The crate root
//! exports the concrete aliases (`Int`, `Rat`, ...) used everywhere else.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{CoreError, Result};

/// Commutative-ring operations shared by every scalar the containers hold.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Neg<Output = Self>
        + Add<Output = Self>
        + Sub<Output = Self>
        + Mul<Output = Self>
{
}

/// Ordered field: what exact Gaussian elimination, Sturm evaluation and the
/// simplex pivots need. `BigRational` is the canonical instance.
pub trait Field: Ring + Div<Output = Self> + PartialOrd + Signed {}

impl<T> Field for T where T: Ring + Div<Output = Self> + PartialOrd + Signed {}

/// Exact division in an integral domain. Fraction-free elimination divides
/// by previous pivots; those divisions are exact by construction, and this
/// trait makes that contract explicit (implementations may check it).
pub trait ExactDiv: Sized {
    /// `self / d`, where `d` is known to divide `self` exactly.
    fn exact_div(&self, d: &Self) -> Self;
}

impl ExactDiv for BigInt {
    fn exact_div(&self, d: &Self) -> Self {
        debug_assert!(!d.is_zero(), "exact_div by zero");
        debug_assert!((self % d).is_zero(), "non-exact integer division");
        self / d
    }
}

impl ExactDiv for BigRational {
    fn exact_div(&self, d: &Self) -> Self {
        self / d
    }
}

/// Parse a canonical rational literal: `"a"` or `"a/b"`, optional sign.
pub fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(CoreError::Parse("empty rational literal".into()));
    }
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_s
        .parse()
        .map_err(|_| CoreError::Parse(format!("bad rational numerator {num_s:?}")))?;
    let den: BigInt = den_s
        .parse()
        .map_err(|_| CoreError::Parse(format!("bad rational denominator {den_s:?}")))?;
    if den.is_zero() {
        return Err(CoreError::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Canonical rational printing: lowest terms, `den > 0`, the `/den` part
/// omitted for integers. This is the one formatter used for files, CLI
/// output and reports, so output is byte-reproducible.
pub fn format_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// gcd with the convention gcd(0,0) = 0, result non-negative.
pub fn int_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::gcd(a, b)
}

/// lcm of denominators of a rational slice (1 for empty input).
pub fn denom_lcm(rs: &[BigRational]) -> BigInt {
    let mut l = BigInt::one();
    for r in rs {
        l = num_integer::Integer::lcm(&l, r.denom());
    }
    l
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
        acc = acc.exact_div(&BigInt::from(i + 1));
    }
    acc
}
