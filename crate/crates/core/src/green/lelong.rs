//! Lelong-number estimation: the logarithmic slope of sphere maxima of a
//! plurisubharmonic potential, sampled on a deterministic low-discrepancy
//! sphere point set.

use crate::error::{CoreError, Result};
use num_complex::Complex;
use num_traits::{Float, FromPrimitive};

/// Van der Corput radical inverse of `index` in the given prime base.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut result = 0.0;
    let mut frac = inv;
    while index > 0 {
        result += (index % base) as f64 * frac;
        index /= base;
        frac *= inv;
    }
    result
}

const PRIMES: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Deterministic quasi-uniform points on the unit sphere of R^dim: Halton
/// uniforms pushed through Box–Muller and normalized. The same (dim, count)
/// always yields the same points.
pub fn halton_sphere(dim: usize, count: usize) -> Vec<Vec<f64>> {
    assert!(dim >= 1, "sphere dimension must be positive");
    assert!(
        2 * dim.div_ceil(2) <= PRIMES.len(),
        "sphere dimension too large for the prime table"
    );
    let pairs = dim.div_ceil(2);
    let mut out = Vec::with_capacity(count);
    let mut index: u64 = 1;
    while out.len() < count {
        let mut v = Vec::with_capacity(dim + 1);
        for p in 0..pairs {
            let u1 = radical_inverse(index, PRIMES[2 * p]).max(1e-16);
            let u2 = radical_inverse(index, PRIMES[2 * p + 1]);
            let r = (-2.0 * u1.ln()).sqrt();
            let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
            v.push(r * c);
            v.push(r * s);
        }
        v.truncate(dim);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        index += 1;
        if norm < 1e-12 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        out.push(v);
    }
    out
}

#[derive(Debug, Clone)]
pub struct LelongEstimate<F: Float> {
    /// slope estimate (max_{r1} - max_{r2}) / (log r1 - log r2)
    pub value: F,
    pub samples: usize,
    pub failures: usize,
    pub max_outer: F,
    pub max_inner: F,
}

/// Estimate the Lelong number of the potential `u` at `center` from sphere
/// maxima at radii r1 > r2 > 0, over `samples` quasi-uniform directions.
/// Evaluation failures (None) are tolerated up to 10% of all evaluations.
pub fn lelong_estimate<F, U>(
    u: U,
    center: &[Complex<F>],
    r1: F,
    r2: F,
    samples: usize,
) -> Result<LelongEstimate<F>>
where
    F: Float + FromPrimitive,
    U: Fn(&[Complex<F>]) -> Option<F>,
{
    if !(r2 > F::zero()) || !(r1 > r2) {
        return Err(CoreError::DegenerateInput(
            "radii must satisfy 0 < r2 < r1".into(),
        ));
    }
    if samples < 64 {
        return Err(CoreError::DegenerateInput(
            "need at least 64 sphere samples".into(),
        ));
    }
    let n = center.len();
    if n == 0 {
        return Err(CoreError::DegenerateInput("empty center point".into()));
    }
    let dirs = halton_sphere(2 * n, samples);
    let mut failures = 0usize;
    let mut max_outer = F::neg_infinity();
    let mut max_inner = F::neg_infinity();
    for w in &dirs {
        for (radius, max_slot) in [(r1, &mut max_outer), (r2, &mut max_inner)] {
            let point: Vec<Complex<F>> = center
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let re = F::from_f64(w[2 * i]).unwrap();
                    let im = F::from_f64(w[2 * i + 1]).unwrap();
                    *c + Complex::new(re * radius, im * radius)
                })
                .collect();
            match u(&point) {
                Some(val) if val.is_finite() => {
                    if val > *max_slot {
                        *max_slot = val;
                    }
                }
                _ => failures += 1,
            }
        }
    }
    let total = 2 * samples;
    if failures * 10 > total {
        return Err(CoreError::Numerical(format!(
            "unreliable estimate: {failures} of {total} potential evaluations failed"
        )));
    }
    if !max_outer.is_finite() || !max_inner.is_finite() {
        return Err(CoreError::Numerical("sphere maxima are not finite".into()));
    }
    let value = (max_outer - max_inner) / (r1.ln() - r2.ln());
    Ok(LelongEstimate {
        value,
        samples,
        failures,
        max_outer,
        max_inner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn sphere_points_are_unit_and_deterministic() {
        let a = halton_sphere(4, 128);
        let b = halton_sphere(4, 128);
        assert_eq!(a, b);
        for v in &a {
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        // crude equidistribution: mean near zero in every coordinate
        for i in 0..4 {
            let mean: f64 = a.iter().map(|v| v[i]).sum::<f64>() / a.len() as f64;
            assert!(mean.abs() < 0.2, "coordinate {i} mean {mean}");
        }
    }

    #[test]
    fn log_singularity_has_unit_slope() {
        // u(z) = log|z - a| at center a: nu = 1 exactly
        let a = C64::new(0.25, -0.5);
        let u = |z: &[C64]| Some((z[0] - a).norm().ln());
        let est = lelong_estimate(u, &[a], 0.1, 0.01, 256).unwrap();
        assert!((est.value - 1.0).abs() < 0.02, "slope {}", est.value);
    }

    #[test]
    fn doubled_weight_slope() {
        // u = 2 log|z1| + smooth at a center on {z1 = 0}
        let u = |z: &[C64]| Some(2.0 * z[0].norm().ln() + (1.0 + z[1].norm_sqr()).ln());
        let center = [C64::new(0.0, 0.0), C64::new(0.7, 0.1)];
        let est = lelong_estimate(u, &center, 0.05, 0.005, 512).unwrap();
        assert!((est.value - 2.0).abs() < 0.05, "slope {}", est.value);
    }

    #[test]
    fn smooth_potential_has_zero_slope() {
        // a smooth potential contributes ~ |grad u| (r1-r2)/log(r1/r2) to
        // the slope statistic, so small radii are needed to resolve nu = 0
        let u = |z: &[C64]| Some((1.0 + z.iter().map(|c| c.norm_sqr()).sum::<f64>()).ln());
        let center = [C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        let est = lelong_estimate(u, &center, 0.01, 0.001, 256).unwrap();
        assert!(est.value.abs() < 0.02, "slope {}", est.value);
    }

    #[test]
    fn failure_budget_enforced() {
        let u = |_: &[C64]| -> Option<f64> { None };
        let err = lelong_estimate(u, &[C64::new(0.0, 0.0)], 0.1, 0.01, 64);
        assert!(matches!(err, Err(CoreError::Numerical(_))));
    }

    #[test]
    fn radius_validation() {
        let u = |z: &[C64]| Some(z[0].norm().ln());
        assert!(lelong_estimate(u, &[C64::new(0.0, 0.0)], 0.01, 0.1, 64).is_err());
        assert!(lelong_estimate(u, &[C64::new(0.0, 0.0)], 0.1, 0.01, 10).is_err());
    }
}
