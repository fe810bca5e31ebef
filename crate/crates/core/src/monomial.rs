//! Exact calculus of monomial self-maps of P^k.
//!
//! A map [x^r_0 : ... : x^r_k] is stored as its reduced homogeneous lift:
//! a (k+1)x(k+1) matrix of nonnegative integer exponents with equal row
//! sums and zero column minima. Composition is exponent-matrix
//! multiplication followed by extraction of the common monomial factor;
//! the extracted factors are exactly the degree-drop bookkeeping that
//! detects failure of 1-algebraic stability.

use crate::error::{CoreError, Result};
use crate::matrix::bareiss_det;
use crate::spectral::RatInterval;
use crate::{Int, IntMatrix, Rat};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialLift {
    k: usize,
    /// Row i holds the exponents of coordinate i; entries nonnegative,
    /// all row sums equal `degree`, every column has minimum 0.
    exponents: Vec<Vec<Int>>,
    degree: Int,
}

impl MonomialLift {
    /// Canonical lift of a Laurent-monomial map: shifts every row by the
    /// minimal common vector making all entries nonnegative with reduced
    /// columns, then checks dominance.
    pub fn lift(rows: &[Vec<Int>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(CoreError::DegenerateInput(
                "a monomial map on P^k needs at least 2 coordinates".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(CoreError::DegenerateInput(format!(
                "expected {n} exponent entries per row"
            )));
        }
        let k = n - 1;
        let sums: Vec<Int> = rows.iter().map(|r| r.iter().sum()).collect();
        if sums.iter().any(|s| *s != sums[0]) {
            return Err(CoreError::DegenerateInput(
                "rows must have equal exponent sums to define a projective map".into(),
            ));
        }
        // shift column j by -min_i rows[i][j]
        let mut exponents = rows.to_vec();
        for j in 0..n {
            let min = (0..n).map(|i| rows[i][j].clone()).min().unwrap();
            if !min.is_zero() {
                for row in exponents.iter_mut() {
                    row[j] -= &min;
                }
            }
        }
        let degree: Int = exponents[0].iter().sum();
        let lifted = MonomialLift {
            k,
            exponents,
            degree,
        };
        if lifted.topological_degree_checked()?.is_zero() {
            return Err(CoreError::Dominance(
                "torus matrix is singular: the map is not dominant".into(),
            ));
        }
        Ok(lifted)
    }

    /// The coordinate-reciprocal Cremona involution [1/x_0 : ... : 1/x_k].
    pub fn reciprocal(k: usize) -> Self {
        let rows: Vec<Vec<Int>> = (0..=k)
            .map(|i| {
                (0..=k)
                    .map(|j| if i == j { -Int::one() } else { Int::zero() })
                    .collect()
            })
            .collect();
        Self::lift(&rows).expect("reciprocal map is dominant")
    }

    /// [x_0^d : ... : x_k^d]
    pub fn power(k: usize, d: u32) -> Result<Self> {
        if d == 0 {
            return Err(CoreError::Dominance(
                "degree-0 power map is constant".into(),
            ));
        }
        let rows: Vec<Vec<Int>> = (0..=k)
            .map(|i| {
                (0..=k)
                    .map(|j| if i == j { Int::from(d) } else { Int::zero() })
                    .collect()
            })
            .collect();
        Self::lift(&rows)
    }

    pub fn identity(k: usize) -> Self {
        Self::power(k, 1).expect("identity is dominant")
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> &Int {
        &self.degree
    }

    pub fn exponents(&self) -> &[Vec<Int>] {
        &self.exponents
    }

    /// Affine-chart exponent action: row i = exponents of x_1..x_k in the
    /// dehomogenized i-th coordinate.
    pub fn torus_matrix(&self) -> IntMatrix {
        let k = self.k;
        let mut a = IntMatrix::zero(k, k);
        for i in 1..=k {
            for j in 1..=k {
                a[(i - 1, j - 1)] = &self.exponents[i][j] - &self.exponents[0][j];
            }
        }
        a
    }

    fn topological_degree_checked(&self) -> Result<Int> {
        Ok(bareiss_det(&self.torus_matrix())?.abs())
    }

    /// |det| of the torus matrix: the number of preimages of a generic
    /// point.
    pub fn topological_degree(&self) -> Int {
        self.topological_degree_checked()
            .expect("square by construction")
    }

    /// Is every coordinate a pure power of a single variable? Such maps
    /// never extract a factor under composition, so their degree sequence
    /// is exactly multiplicative.
    pub fn is_scaled_permutation(&self) -> bool {
        self.exponents.iter().all(|row| {
            row.iter().filter(|e| !e.is_zero()).count() == 1
                && row.iter().all(|e| e.is_zero() || *e == self.degree)
        })
    }

    /// self ∘ other with common-factor reduction; returns the reduced lift
    /// and the extracted per-column factor vector.
    pub fn compose_reduce(&self, other: &Self) -> Result<(Self, Vec<Int>)> {
        if self.k != other.k {
            return Err(CoreError::Dimension(format!(
                "composing maps on P^{} and P^{}",
                self.k, other.k
            )));
        }
        let n = self.k + 1;
        let mut product = vec![vec![Int::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Int::zero();
                for l in 0..n {
                    acc += &self.exponents[i][l] * &other.exponents[l][j];
                }
                product[i][j] = acc;
            }
        }
        let mut factor = Vec::with_capacity(n);
        for j in 0..n {
            let min = (0..n).map(|i| product[i][j].clone()).min().unwrap();
            for row in product.iter_mut() {
                row[j] -= &min;
            }
            factor.push(min);
        }
        let degree: Int = product[0].iter().sum();
        Ok((
            MonomialLift {
                k: self.k,
                exponents: product,
                degree,
            },
            factor,
        ))
    }
}

/// Exact degrees of f, f^2, ..., f^N together with the per-step extracted
/// factor ledger and the reduced lifts of the iterates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    /// degrees[n-1] = deg(f^n)
    pub degrees: Vec<Int>,
    /// factors[n-1] = column minima removed while forming f^n from
    /// f ∘ f^(n-1); the n = 1 entry is the zero vector.
    pub factors: Vec<Vec<Int>>,
    /// lifts[n-1] = reduced lift of f^n
    pub lifts: Vec<MonomialLift>,
}

impl DegreeSequence {
    pub fn steps(&self) -> usize {
        self.degrees.len()
    }

    /// CSV rows `n,degree,factor` with the factor vector
    /// semicolon-separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,degree,factor\n");
        for (i, (d, c)) in self.degrees.iter().zip(&self.factors).enumerate() {
            let fac: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{},{},{}\n", i + 1, d, fac.join(";")));
        }
        out
    }

    /// First period of the lift trajectory: (start, period) with
    /// lifts[start-1 + period] == lifts[start-1], searched within the given
    /// period window.
    pub fn detect_lift_period(&self, window: usize) -> Option<(usize, usize)> {
        let n = self.lifts.len();
        for start in 0..n {
            for t in 1..=window.min(n - start - 1) {
                if self.lifts[start + t] == self.lifts[start] {
                    return Some((start + 1, t));
                }
            }
        }
        None
    }
}

/// Iterated composition with the base lift (f^(n+1) = f ∘ f^n); factor
/// extraction is incompatible with repeated squaring, so no shortcuts.
pub fn degree_sequence(f: &MonomialLift, n_steps: usize) -> Result<DegreeSequence> {
    if n_steps < 1 {
        return Err(CoreError::DegenerateInput("need at least one step".into()));
    }
    let mut degrees = vec![f.degree.clone()];
    let mut factors = vec![vec![Int::zero(); f.k + 1]];
    let mut lifts = vec![f.clone()];
    for _ in 1..n_steps {
        let (next, factor) = f.compose_reduce(lifts.last().unwrap())?;
        degrees.push(next.degree.clone());
        factors.push(factor);
        lifts.push(next);
    }
    Ok(DegreeSequence {
        degrees,
        factors,
        lifts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonomialStability {
    /// deg(f^n) = deg(f)^n for all checked n.
    Stable,
    /// First step where a common factor was extracted, with the factor.
    UnstableAt { step: usize, factor: Vec<Int> },
}

/// 1-algebraic stability check: stable iff no factor extraction occurs
/// through N steps.
pub fn is_1_stable(f: &MonomialLift, n_steps: usize) -> Result<MonomialStability> {
    if n_steps < 2 {
        return Err(CoreError::DegenerateInput(
            "stability needs at least two steps".into(),
        ));
    }
    let seq = degree_sequence(f, n_steps)?;
    for (i, factor) in seq.factors.iter().enumerate() {
        if factor.iter().any(|c| !c.is_zero()) {
            return Ok(MonomialStability::UnstableAt {
                step: i + 1,
                factor: factor.clone(),
            });
        }
    }
    Ok(MonomialStability::Stable)
}

/// Certified estimate of the first dynamical degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeEstimate {
    pub interval: RatInterval,
    /// true when the sequence structure (multiplicative map or periodic
    /// lift trajectory) pins the limit exactly
    pub exact: bool,
    pub method: DegreeMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMethod {
    /// Pure-power/permutation map: degrees are exactly multiplicative.
    Multiplicative,
    /// Lift trajectory is eventually periodic, so degrees are bounded and
    /// the limit is 1.
    PeriodicLifts,
    /// Fekete sandwich [1, min_n deg(f^n)^(1/n)] from the computed steps.
    FeketeBounds,
}

/// Period-detection window for degree sequences (kept small on purpose: a
/// longer window only helps maps nobody has exhibited).
pub const PERIOD_WINDOW: usize = 8;

/// lim deg(f^n)^(1/n) as a certified interval. The limit exists by Fekete's
/// lemma (degrees are submultiplicative); any computed deg(f^n)^(1/n) is an
/// upper bound and 1 is always a lower bound. Exact values are reported
/// only when the structure forces them.
pub fn first_dynamical_degree(f: &MonomialLift, n_steps: usize) -> Result<DegreeEstimate> {
    if n_steps < 4 {
        return Err(CoreError::DegenerateInput(
            "dynamical degree estimation needs at least 4 steps".into(),
        ));
    }
    if f.is_scaled_permutation() {
        let d = Rat::from(f.degree.clone());
        return Ok(DegreeEstimate {
            interval: RatInterval::point(d),
            exact: true,
            method: DegreeMethod::Multiplicative,
        });
    }
    let seq = degree_sequence(f, n_steps)?;
    if seq.detect_lift_period(PERIOD_WINDOW).is_some() {
        // periodic lifts mean bounded degrees, so the nth-root limit is 1
        return Ok(DegreeEstimate {
            interval: RatInterval::point(Rat::one()),
            exact: true,
            method: DegreeMethod::PeriodicLifts,
        });
    }
    let mut upper: Option<Rat> = None;
    for (i, d) in seq.degrees.iter().enumerate() {
        let bound = crate::spectral::nth_root_upper_rat(&Rat::from(d.clone()), (i + 1) as u32, 24);
        if upper.as_ref().is_none_or(|u| bound < *u) {
            upper = Some(bound);
        }
    }
    let hi = upper.expect("at least one step");
    let lo = Rat::one();
    let hi = if hi < lo { lo.clone() } else { hi };
    Ok(DegreeEstimate {
        interval: RatInterval::new(lo, hi),
        exact: false,
        method: DegreeMethod::FeketeBounds,
    })
}

/// Parse the text format: k+1 lines of k+1 signed integers (Laurent
/// exponents), comments starting with '#' allowed.
pub fn parse_lift_text(text: &str) -> Result<MonomialLift> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<Int>> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<Int>()
                    .map_err(|_| CoreError::Parse(format!("bad exponent {tok:?}")))
            })
            .collect();
        rows.push(row?);
    }
    MonomialLift::lift(&rows)
}

pub fn lift_to_text(f: &MonomialLift) -> String {
    let mut out = String::new();
    for row in f.exponents() {
        let toks: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Int {
        Int::from(n)
    }

    #[test]
    fn reciprocal_lift_shape() {
        let j = MonomialLift::reciprocal(3);
        assert_eq!(*j.degree(), int(3));
        for (i, row) in j.exponents().iter().enumerate() {
            for (jj, e) in row.iter().enumerate() {
                let expect = if i == jj { 0 } else { 1 };
                assert_eq!(*e, int(expect));
            }
        }
    }

    #[test]
    fn identity_and_power_lifts() {
        let id = MonomialLift::identity(2);
        assert_eq!(*id.degree(), int(1));
        let p = MonomialLift::power(2, 3).unwrap();
        assert_eq!(*p.degree(), int(3));
        assert!(p.is_scaled_permutation());
    }

    #[test]
    fn non_dominant_rejected() {
        // both coordinates proportional: torus matrix singular
        let rows = vec![
            vec![int(1), int(0), int(0)],
            vec![int(1), int(0), int(0)],
            vec![int(0), int(0), int(1)],
        ];
        assert!(matches!(
            MonomialLift::lift(&rows),
            Err(CoreError::Dominance(_))
        ));
    }

    #[test]
    fn unequal_row_sums_rejected() {
        let rows = vec![vec![int(1), int(0)], vec![int(2), int(1)]];
        assert!(MonomialLift::lift(&rows).is_err());
    }

    #[test]
    fn compose_reciprocal_with_itself() {
        let j = MonomialLift::reciprocal(3);
        let (jj, factor) = j.compose_reduce(&j).unwrap();
        assert_eq!(jj, MonomialLift::identity(3));
        assert_eq!(factor, vec![int(2); 4]);
    }

    #[test]
    fn compose_power_maps() {
        let a = MonomialLift::power(2, 2).unwrap();
        let b = MonomialLift::power(2, 3).unwrap();
        let (c, factor) = a.compose_reduce(&b).unwrap();
        assert_eq!(c, MonomialLift::power(2, 6).unwrap());
        assert!(factor.iter().all(|x| x.is_zero()));
        // composing with the identity is the identity operation
        let (same, factor) = a.compose_reduce(&MonomialLift::identity(2)).unwrap();
        assert_eq!(same, a);
        assert!(factor.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn reciprocal_degree_sequence_alternates() {
        let j = MonomialLift::reciprocal(3);
        let seq = degree_sequence(&j, 4).unwrap();
        assert_eq!(seq.degrees, vec![int(3), int(1), int(3), int(1)]);
        assert_eq!(seq.factors[1], vec![int(2); 4]);
        assert!(seq.factors[2].iter().all(|x| x.is_zero()));
        // conservation: d_{n+1} = d_n * d_1 - sum(factors[n+1])
        for n in 0..seq.steps() - 1 {
            let extracted: Int = seq.factors[n + 1].iter().sum();
            assert_eq!(
                seq.degrees[n + 1],
                &seq.degrees[n] * &seq.degrees[0] - extracted
            );
        }
    }

    #[test]
    fn power_map_sequence_multiplicative() {
        let p = MonomialLift::power(2, 2).unwrap();
        let seq = degree_sequence(&p, 3).unwrap();
        assert_eq!(seq.degrees, vec![int(2), int(4), int(8)]);
    }

    #[test]
    fn stability_verdicts() {
        assert_eq!(
            is_1_stable(&MonomialLift::power(2, 2).unwrap(), 6).unwrap(),
            MonomialStability::Stable
        );
        assert_eq!(
            is_1_stable(&MonomialLift::reciprocal(3), 6).unwrap(),
            MonomialStability::UnstableAt {
                step: 2,
                factor: vec![int(2); 4]
            }
        );
        // sigma on P^2 drops from raw degree 4 to 1 at the second step
        assert_eq!(
            is_1_stable(&MonomialLift::reciprocal(2), 4).unwrap(),
            MonomialStability::UnstableAt {
                step: 2,
                factor: vec![int(1); 3]
            }
        );
    }

    #[test]
    fn topological_degrees() {
        assert_eq!(MonomialLift::reciprocal(3).topological_degree(), int(1));
        assert_eq!(
            MonomialLift::power(3, 2).unwrap().topological_degree(),
            int(8)
        );
        assert_eq!(
            MonomialLift::power(1, 2).unwrap().topological_degree(),
            int(2)
        );
        assert_eq!(
            MonomialLift::power(1, 3).unwrap().topological_degree(),
            int(3)
        );
        assert_eq!(MonomialLift::identity(3).topological_degree(), int(1));
        // multiplicativity under composition
        let j = MonomialLift::reciprocal(3);
        let (jj, _) = j.compose_reduce(&j).unwrap();
        assert_eq!(
            jj.topological_degree(),
            &j.topological_degree() * &j.topological_degree()
        );
    }

    #[test]
    fn dynamical_degree_cases() {
        let p = first_dynamical_degree(&MonomialLift::power(2, 2).unwrap(), 6).unwrap();
        assert!(p.exact);
        assert_eq!(p.interval, RatInterval::point(Rat::from(int(2))));

        let j = first_dynamical_degree(&MonomialLift::reciprocal(3), 8).unwrap();
        assert!(j.exact);
        assert_eq!(j.interval, RatInterval::point(Rat::one()));
        assert_eq!(j.method, DegreeMethod::PeriodicLifts);
    }

    #[test]
    fn submultiplicative_degrees() {
        let j = MonomialLift::reciprocal(3);
        let seq = degree_sequence(&j, 8).unwrap();
        for n in 1..=8usize {
            for m in 1..=8usize {
                if n + m <= 8 {
                    assert!(seq.degrees[n + m - 1] <= &seq.degrees[n - 1] * &seq.degrees[m - 1]);
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let j = MonomialLift::reciprocal(3);
        let text = lift_to_text(&j);
        let back = parse_lift_text(&text).unwrap();
        assert_eq!(back, j);
        // Laurent input with comments
        let laurent = "# reciprocal map\n-1 0 0\n0 -1 0\n0 0 -1\n";
        assert_eq!(
            parse_lift_text(laurent).unwrap(),
            MonomialLift::reciprocal(2)
        );
    }

    #[test]
    fn reduction_idempotent() {
        let j = MonomialLift::reciprocal(3);
        let relift = MonomialLift::lift(j.exponents()).unwrap();
        assert_eq!(relift, j);
    }
}
