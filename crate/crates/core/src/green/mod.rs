//! Desk-scale numerical Green potentials and exact extracted currents.
//!
//! The potential G(z) = lim d^{-n} log||F^n(z)|| is evaluated by the
//! renormalized orbit recursion in the max-modulus norm, which makes the
//! power-map potential exact after one step. Everything exact (hypersurface
//! weights, invariance factors) is routed through the rational factor
//! ledger of the monomial calculus, never through floats.

pub mod lelong;

pub use lelong::{halton_sphere, lelong_estimate, LelongEstimate};

use crate::error::{CoreError, Result};
use crate::monomial::{degree_sequence, MonomialLift};
use crate::Rat;
use num_complex::Complex;
use num_traits::{Float, FromPrimitive, One, Zero};
use serde::{Deserialize, Serialize};

/// One monomial term of a homogeneous polynomial coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<F: Float> {
    pub coeff: Complex<F>,
    pub exponents: Vec<u32>,
}

/// A homogeneous polynomial lift F = (F_0, ..., F_k) of a rational
/// self-map of P^k, common degree d.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousLift<F: Float> {
    k: usize,
    degree: u32,
    coordinates: Vec<Vec<Term<F>>>,
    /// Built-ins are constructed coprime; user lifts carry this flag
    /// unverified (multivariate gcd extraction is out of scope).
    pub coprime_verified: bool,
}

/// Concrete double-precision lift.
pub type Lift64 = HomogeneousLift<f64>;

impl<F: Float + FromPrimitive> HomogeneousLift<F> {
    pub fn new(k: usize, degree: u32, coordinates: Vec<Vec<Term<F>>>) -> Result<Self> {
        if coordinates.len() != k + 1 {
            return Err(CoreError::Dimension(format!(
                "a lift on P^{k} needs {} coordinates, got {}",
                k + 1,
                coordinates.len()
            )));
        }
        if degree == 0 {
            return Err(CoreError::DegenerateInput("degree must be >= 1".into()));
        }
        for (i, coord) in coordinates.iter().enumerate() {
            if coord.is_empty() {
                return Err(CoreError::DegenerateInput(format!(
                    "coordinate {i} has no terms"
                )));
            }
            for term in coord {
                if term.exponents.len() != k + 1 {
                    return Err(CoreError::Dimension(format!(
                        "coordinate {i}: exponent vector length {} != {}",
                        term.exponents.len(),
                        k + 1
                    )));
                }
                let total: u32 = term.exponents.iter().sum();
                if total != degree {
                    return Err(CoreError::DegenerateInput(format!(
                        "coordinate {i}: term of degree {total}, lift degree {degree}"
                    )));
                }
            }
        }
        Ok(HomogeneousLift {
            k,
            degree,
            coordinates,
            coprime_verified: false,
        })
    }

    /// The power map [x_0^d : ... : x_k^d].
    pub fn power(k: usize, d: u32) -> Result<Self> {
        let coords = (0..=k)
            .map(|i| {
                let mut exps = vec![0u32; k + 1];
                exps[i] = d;
                vec![Term {
                    coeff: Complex::one(),
                    exponents: exps,
                }]
            })
            .collect();
        let mut lift = Self::new(k, d, coords)?;
        lift.coprime_verified = true;
        Ok(lift)
    }

    /// Float lift of an exact monomial map (exponents must fit in u32).
    pub fn from_monomial(m: &MonomialLift) -> Result<Self> {
        use num_traits::ToPrimitive;
        let k = m.dim();
        let degree = m
            .degree()
            .to_u32()
            .ok_or_else(|| CoreError::ResourceLimit("monomial degree exceeds u32".into()))?;
        let coords = m
            .exponents()
            .iter()
            .map(|row| {
                let exps: Option<Vec<u32>> = row.iter().map(|e| e.to_u32()).collect();
                exps.map(|exponents| {
                    vec![Term {
                        coeff: Complex::one(),
                        exponents,
                    }]
                })
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| CoreError::ResourceLimit("monomial exponent exceeds u32".into()))?;
        let mut lift = Self::new(k, degree, coords)?;
        lift.coprime_verified = true;
        Ok(lift)
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eval(&self, z: &[Complex<F>]) -> Vec<Complex<F>> {
        self.coordinates
            .iter()
            .map(|coord| {
                let mut acc = Complex::zero();
                for term in coord {
                    let mut prod = term.coeff;
                    for (zi, &e) in z.iter().zip(&term.exponents) {
                        if e > 0 {
                            prod = prod * zi.powu(e);
                        }
                    }
                    acc = acc + prod;
                }
                acc
            })
            .collect()
    }

    /// Sum of coefficient moduli per coordinate: bounds ||F(z)||_inf on the
    /// unit polydisc, which feeds the tail estimate.
    fn coeff_bound(&self) -> F {
        let mut best = F::zero();
        for coord in &self.coordinates {
            let mut s = F::zero();
            for term in coord {
                s = s + term.coeff.norm();
            }
            if s > best {
                best = s;
            }
        }
        best
    }
}

fn max_norm<F: Float>(z: &[Complex<F>]) -> F {
    z.iter()
        .map(|c| c.norm())
        .fold(F::zero(), |a, b| if b > a { b } else { a })
}

/// Tunable thresholds of the orbit iteration (defaults per module contract:
/// convergence 1e-12, indeterminacy guard 1e-300, clamped to the scalar's
/// representable range).
#[derive(Debug, Clone, Copy)]
pub struct GreenParams<F: Float> {
    pub convergence: F,
    pub guard: F,
}

impl<F: Float + FromPrimitive> Default for GreenParams<F> {
    fn default() -> Self {
        GreenParams {
            convergence: F::from_f64(1e-12).unwrap_or_else(F::epsilon),
            guard: F::from_f64(1e-300).unwrap_or_else(F::min_positive_value),
        }
    }
}

/// Record of a single potential evaluation.
#[derive(Debug, Clone)]
pub struct GreenEvaluation<F: Float> {
    pub point: Vec<Complex<F>>,
    pub iterations: usize,
    /// partial_sums[n] = log||z|| + sum_{j<=n} d^-(j+1) log||F(z_j)||,
    /// with z_j the renormalized orbit; partial_sums[0] is the seed.
    pub partial_sums: Vec<F>,
    pub converged: bool,
    pub tail_bound: F,
}

impl<F: Float> GreenEvaluation<F> {
    pub fn value(&self) -> F {
        *self.partial_sums.last().expect("seeded")
    }
}

/// Evaluate the Green potential by the renormalized recursion
/// z_{j+1} = F(z_j)/||F(z_j)|| in the max-modulus norm, accumulating
/// d^-(j+1) log||F(z_j)||. Stops early once increments fall below the
/// convergence threshold; hitting the indeterminacy guard is an error that
/// names the offending step.
pub fn green_potential<F: Float + FromPrimitive>(
    lift: &HomogeneousLift<F>,
    z: &[Complex<F>],
    n_iters: usize,
    params: &GreenParams<F>,
) -> Result<GreenEvaluation<F>> {
    if z.len() != lift.k + 1 {
        return Err(CoreError::Dimension(format!(
            "point has {} components, lift needs {}",
            z.len(),
            lift.k + 1
        )));
    }
    if n_iters == 0 {
        return Err(CoreError::DegenerateInput(
            "need at least one iteration".into(),
        ));
    }
    let norm0 = max_norm(z);
    if !(norm0 > F::zero()) || !norm0.is_finite() {
        return Err(CoreError::DegenerateInput(
            "potential evaluation needs a nonzero finite point".into(),
        ));
    }
    let d = F::from_u32(lift.degree).expect("small degree");
    let mut zhat: Vec<Complex<F>> = z.iter().map(|c| *c / norm0).collect();
    let mut sums = vec![norm0.ln()];
    let mut scale = F::one() / d; // d^-(j+1)
    let mut converged = false;
    let mut min_norm = F::infinity();
    let mut steps = 0usize;
    for j in 0..n_iters {
        let w = lift.eval(&zhat);
        let nw = max_norm(&w);
        if !(nw > params.guard) || !nw.is_finite() {
            return Err(CoreError::Numerical(format!(
                "orbit reached ||F(z)|| = {:e} at step {}: too close to the indeterminacy locus",
                nw.to_f64().unwrap_or(0.0),
                j + 1
            )));
        }
        if nw < min_norm {
            min_norm = nw;
        }
        let prev = *sums.last().unwrap();
        let next = prev + scale * nw.ln();
        sums.push(next);
        steps = j + 1;
        zhat = w.iter().map(|c| *c / nw).collect();
        scale = scale / d;
        if (next - prev).abs() < params.convergence {
            converged = true;
            break;
        }
    }
    // Geometric tail, assuming later orbit points stay no closer to the
    // indeterminacy locus than the closest approach seen so far.
    let log_hi = lift.coeff_bound().ln().abs();
    let log_lo = min_norm.ln().abs();
    let level = if log_hi > log_lo { log_hi } else { log_lo };
    let dn = d.powi(steps as i32);
    let tail_bound = level / (dn * (d - F::one()).max(F::one()));
    Ok(GreenEvaluation {
        point: z.to_vec(),
        iterations: steps,
        partial_sums: sums,
        converged,
        tail_bound,
    })
}

/// Invariant current concentrated on the coordinate hyperplanes of P^k:
/// `weights[i]` is the exact mass on {x_i = 0}.
///
/// This is the atomic part only. Whether the full invariant current of the
/// map carries an additional non-atomic residual is not decided by this
/// computation, and reports should say so.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypersurfaceCurrent {
    pub k: usize,
    pub weights: Vec<Rat>,
    /// true when the factor ledger is eventually periodic and the weights
    /// are closed-form geometric sums
    pub exact: bool,
    /// rigorous bound on the truncated tail when not exact
    pub tail_bound: Option<Rat>,
}

impl HypersurfaceCurrent {
    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.is_zero())
    }

    pub fn mass(&self) -> Rat {
        self.weights.iter().fold(Rat::zero(), |a, b| a + b)
    }
}

/// The hypersurface part of the Green current of a non-stable monomial
/// map: weight of {x_i = 0} is sum_n d^-n c_{n,i} over the extracted
/// factor ledger. Eventually-periodic ledgers (detected on the lift
/// trajectory) get the exact geometric closed form; otherwise the partial
/// sum is returned with the rigorous tail bound d^-N deg(f^N).
pub fn extracted_invariant_current(
    f: &MonomialLift,
    n_steps: usize,
) -> Result<HypersurfaceCurrent> {
    if n_steps < 2 {
        return Err(CoreError::DegenerateInput(
            "extraction needs at least two steps".into(),
        ));
    }
    let k = f.dim();
    if f.is_scaled_permutation() {
        // no factor is ever extracted
        return Ok(HypersurfaceCurrent {
            k,
            weights: vec![Rat::zero(); k + 1],
            exact: true,
            tail_bound: None,
        });
    }
    let d = Rat::from(f.degree().clone());
    let inv_d = Rat::one() / d.clone();
    let seq = degree_sequence(f, n_steps)?;
    let mut weights = vec![Rat::zero(); k + 1];
    let mut pow = Rat::one();
    for factor in &seq.factors {
        pow *= inv_d.clone();
        for (w, c) in weights.iter_mut().zip(factor) {
            *w += pow.clone() * Rat::from(c.clone());
        }
    }
    if let Some((start, period)) = seq.detect_lift_period(crate::monomial::PERIOD_WINDOW) {
        // lifts repeat from step `start` on, so the factor at step
        // start + t equals the factor at step start + t + period: the
        // weights are the finite head plus one period's geometric series
        let mut exact_weights = vec![Rat::zero(); k + 1];
        let mut pow = Rat::one();
        for factor in seq.factors.iter().take(start) {
            pow *= inv_d.clone();
            for (w, c) in exact_weights.iter_mut().zip(factor) {
                *w += pow.clone() * Rat::from(c.clone());
            }
        }
        let mut period_sum = vec![Rat::zero(); k + 1];
        let mut ppow = pow.clone();
        for t in 1..=period {
            ppow *= inv_d.clone();
            // step start + t carries ledger entry factors[start + t - 1]
            let factor = &seq.factors[start + t - 1];
            for (w, c) in period_sum.iter_mut().zip(factor) {
                *w += ppow.clone() * Rat::from(c.clone());
            }
        }
        let ratio = {
            let mut r = Rat::one();
            for _ in 0..period {
                r *= inv_d.clone();
            }
            Rat::one() - r
        };
        for (w, s) in exact_weights.iter_mut().zip(&period_sum) {
            *w += s / ratio.clone();
        }
        return Ok(HypersurfaceCurrent {
            k,
            weights: exact_weights,
            exact: true,
            tail_bound: None,
        });
    }
    // rigorous tail: sum_{n>N} d^-n (total factor at n) <= d^-N deg(f^N)
    let mut dn = Rat::one();
    for _ in 0..seq.steps() {
        dn *= inv_d.clone();
    }
    let tail = dn * Rat::from(seq.degrees.last().unwrap().clone());
    Ok(HypersurfaceCurrent {
        k,
        weights,
        exact: false,
        tail_bound: Some(tail),
    })
}

/// Atomwise pullback check f^* T = d T for a hypersurface current under a
/// monomial map: the pullback of {x_j = 0} is the divisor of the j-th
/// coordinate, so invariance is the exact eigen-equation E^T w = d w on
/// the weight vector.
pub fn verify_atomwise_invariance(f: &MonomialLift, t: &HypersurfaceCurrent) -> Result<()> {
    if t.k != f.dim() {
        return Err(CoreError::Dimension(format!(
            "current lives on P^{}, map on P^{}",
            t.k,
            f.dim()
        )));
    }
    let n = f.dim() + 1;
    let d = Rat::from(f.degree().clone());
    for j in 0..n {
        let mut acc = Rat::zero();
        for i in 0..n {
            acc += Rat::from(f.exponents()[i][j].clone()) * t.weights[i].clone();
        }
        let expect = d.clone() * t.weights[j].clone();
        if acc != expect {
            return Err(CoreError::DegenerateInput(format!(
                "current is not invariant: hyperplane {j} maps to weight {} instead of {}",
                crate::scalar::format_rat(&acc),
                crate::scalar::format_rat(&expect)
            )));
        }
    }
    Ok(())
}

/// Product of two factor-invariant currents on P^{k1} x P^{k2}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCurrent {
    pub k1: usize,
    pub k2: usize,
    /// weights[i][j]: mass on {x_i = 0} x {y_j = 0}, a codimension-2
    /// product of coordinate hyperplanes
    pub weights: Vec<Vec<Rat>>,
    /// the scale factor of the verified eigen-equation (d1 * d2)
    pub scale: Rat,
    pub pass: bool,
}

impl ProductCurrent {
    pub fn atom_count(&self) -> usize {
        self.weights
            .iter()
            .flatten()
            .filter(|w| !w.is_zero())
            .count()
    }
}

/// Build T1 x T2 and verify atomwise that (f1 x f2)^* scales it by
/// d1 * d2. Factor invariance is a precondition and is re-checked; the
/// product-side verification recomputes the pulled-back product weights
/// from the per-factor hyperplane incidence and compares exactly.
pub fn product_invariant_current(
    f1: &MonomialLift,
    t1: &HypersurfaceCurrent,
    f2: &MonomialLift,
    t2: &HypersurfaceCurrent,
) -> Result<ProductCurrent> {
    verify_atomwise_invariance(f1, t1)?;
    verify_atomwise_invariance(f2, t2)?;
    let n1 = f1.dim() + 1;
    let n2 = f2.dim() + 1;
    let weights: Vec<Vec<Rat>> = (0..n1)
        .map(|i| {
            (0..n2)
                .map(|j| t1.weights[i].clone() * t2.weights[j].clone())
                .collect()
        })
        .collect();
    let d1d2 = Rat::from(f1.degree().clone()) * Rat::from(f2.degree().clone());
    // pulled-back product weights: (E1^T w1)_a * (E2^T w2)_b
    let pull_factor = |f: &MonomialLift, w: &[Rat]| -> Vec<Rat> {
        let n = f.dim() + 1;
        (0..n)
            .map(|j| {
                let mut acc = Rat::zero();
                for i in 0..n {
                    acc += Rat::from(f.exponents()[i][j].clone()) * w[i].clone();
                }
                acc
            })
            .collect()
    };
    let p1 = pull_factor(f1, &t1.weights);
    let p2 = pull_factor(f2, &t2.weights);
    let mut pass = true;
    for i in 0..n1 {
        for j in 0..n2 {
            let pulled = p1[i].clone() * p2[j].clone();
            if pulled != d1d2.clone() * weights[i][j].clone() {
                pass = false;
            }
        }
    }
    Ok(ProductCurrent {
        k1: f1.dim(),
        k2: f2.dim(),
        weights,
        scale: d1d2,
        pass,
    })
}

// --- JSON lift files --------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TermFile {
    pub coeff_re: f64,
    pub coeff_im: f64,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LiftFile {
    pub degree: u32,
    pub coordinates: Vec<Vec<TermFile>>,
}

impl LiftFile {
    pub fn from_lift(lift: &Lift64) -> Self {
        LiftFile {
            degree: lift.degree,
            coordinates: lift
                .coordinates
                .iter()
                .map(|coord| {
                    coord
                        .iter()
                        .map(|t| TermFile {
                            coeff_re: t.coeff.re,
                            coeff_im: t.coeff.im,
                            exponents: t.exponents.clone(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn into_lift(self) -> Result<Lift64> {
        let k = self
            .coordinates
            .len()
            .checked_sub(1)
            .ok_or_else(|| CoreError::DegenerateInput("lift needs coordinates".into()))?;
        let coords = self
            .coordinates
            .into_iter()
            .map(|coord| {
                coord
                    .into_iter()
                    .map(|t| Term {
                        coeff: Complex::new(t.coeff_re, t.coeff_im),
                        exponents: t.exponents,
                    })
                    .collect()
            })
            .collect();
        HomogeneousLift::new(k, self.degree, coords)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| CoreError::Parse(format!("json encode: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| CoreError::Parse(format!("json decode: {e}")))
    }
}

/// CSV sample rows for external plotting: point components (re/im pairs),
/// G, converged, tail bound. Floats print as %.15e for reproducibility.
pub fn grid_csv<F: Float + FromPrimitive + std::fmt::LowerExp>(
    lift: &HomogeneousLift<F>,
    points: &[Vec<Complex<F>>],
    n_iters: usize,
    params: &GreenParams<F>,
) -> Result<String> {
    let mut out = String::new();
    out.push_str(&{
        let mut header = Vec::new();
        for i in 0..=lift.dim() {
            header.push(format!("re{i}"));
            header.push(format!("im{i}"));
        }
        header.push("G".into());
        header.push("converged".into());
        header.push("tail_bound".into());
        header.join(",") + "\n"
    });
    for z in points {
        let eval = green_potential(lift, z, n_iters, params)?;
        let mut row = Vec::new();
        for c in z {
            row.push(format!("{:.15e}", c.re));
            row.push(format!("{:.15e}", c.im));
        }
        row.push(format!("{:.15e}", eval.value()));
        row.push(eval.converged.to_string());
        row.push(format!("{:.15e}", eval.tail_bound));
        out.push_str(&(row.join(",") + "\n"));
    }
    Ok(out)
}
