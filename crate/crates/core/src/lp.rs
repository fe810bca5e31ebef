//! Exact cone-membership test by Phase-I simplex.
//!
//! Decides whether v = sum c_i g_i with every c_i >= 0, over an ordered
//! field. Pivots use Bland's rule: with exact arithmetic, cycling is the
//! only termination risk, and Bland removes it.

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeMembership<T> {
    /// v is a nonnegative combination; the witness coefficients satisfy
    /// v = sum coefficients[i] * generators[i] exactly.
    Member {
        coefficients: Vec<T>,
    },
    NotMember,
}

impl<T> ConeMembership<T> {
    pub fn is_member(&self) -> bool {
        matches!(self, ConeMembership::Member { .. })
    }
}

pub fn cone_membership<T: Field>(v: &[T], generators: &[Vec<T>]) -> Result<ConeMembership<T>> {
    let dim = v.len();
    for (i, g) in generators.iter().enumerate() {
        if g.len() != dim {
            return Err(CoreError::Dimension(format!(
                "generator {i} has length {}, expected {dim}",
                g.len()
            )));
        }
    }
    let n = generators.len();
    // Constraint block [G | I | rhs], rows sign-normalized so rhs >= 0.
    let mut t: Matrix<T> = Matrix::zero(dim, n + dim + 1);
    for i in 0..dim {
        let flip = v[i] < T::zero();
        for (j, g) in generators.iter().enumerate() {
            t[(i, j)] = if flip { -g[i].clone() } else { g[i].clone() };
        }
        t[(i, n + i)] = T::one();
        t[(i, n + dim)] = if flip { -v[i].clone() } else { v[i].clone() };
    }
    let rhs = n + dim;
    let mut basis: Vec<usize> = (n..n + dim).collect();

    // Phase-I cost: 1 on artificials, 0 on generator variables.
    let cost = |j: usize| j >= n;

    loop {
        // reduced cost r_j = c_j - sum_i c_basis(i) * t[i][j]
        let mut entering = None;
        for j in 0..n + dim {
            if basis.contains(&j) {
                continue;
            }
            let mut r = if cost(j) { T::one() } else { T::zero() };
            for i in 0..dim {
                if cost(basis[i]) {
                    r = r - t[(i, j)].clone();
                }
            }
            if r < T::zero() {
                entering = Some(j);
                break; // Bland: first improving index
            }
        }
        let Some(e) = entering else { break };
        // ratio test, ties broken by smallest leaving basis index
        let mut leave: Option<usize> = None;
        let mut best: Option<T> = None;
        for i in 0..dim {
            if t[(i, e)] > T::zero() {
                let ratio = t[(i, rhs)].clone() / t[(i, e)].clone();
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(l) = leave else {
            // Phase-I objective is bounded below by zero, so an unbounded
            // ray cannot occur with consistent data.
            return Err(CoreError::Numerical("phase-I simplex unbounded".into()));
        };
        // pivot on (l, e)
        let piv = t[(l, e)].clone();
        for j in 0..=rhs {
            t[(l, j)] = t[(l, j)].clone() / piv.clone();
        }
        for i in 0..dim {
            if i != l && !t[(i, e)].is_zero() {
                let f = t[(i, e)].clone();
                for j in 0..=rhs {
                    let delta = f.clone() * t[(l, j)].clone();
                    t[(i, j)] = t[(i, j)].clone() - delta;
                }
            }
        }
        basis[l] = e;
    }

    let mut objective = T::zero();
    for i in 0..dim {
        if cost(basis[i]) {
            objective = objective + t[(i, rhs)].clone();
        }
    }
    if objective.is_zero() {
        let mut coefficients = vec![T::zero(); n];
        for i in 0..dim {
            if basis[i] < n {
                coefficients[basis[i]] = t[(i, rhs)].clone();
            }
        }
        Ok(ConeMembership::Member { coefficients })
    } else {
        Ok(ConeMembership::NotMember)
    }
}
