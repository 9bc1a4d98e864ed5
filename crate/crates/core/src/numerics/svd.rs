//! Thin singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! Mortality surfaces are at most a few hundred cells on a side, so the
//! quadratic sweep cost is irrelevant and Jacobi's high relative accuracy on
//! small singular values is welcome.

use super::matrix::{dot, norm, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

/// `A = U · diag(s) · Vᵀ` with `min(rows, cols)` singular triples.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult<T> {
    /// Nonnegative, descending.
    pub singular_values: Vec<T>,
    /// `rows × r`, orthonormal columns.
    pub left_vectors: Matrix<T>,
    /// `cols × r`, orthonormal columns.
    pub right_vectors: Matrix<T>,
}

impl<T: Scalar> SvdResult<T> {
    pub fn rank_one(&self, k: usize) -> (&[T], T, &[T]) {
        (self.left_vectors.col(k), self.singular_values[k], self.right_vectors.col(k))
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        let (m, n) = (self.left_vectors.rows(), self.right_vectors.rows());
        Matrix::from_fn(m, n, |i, j| {
            self.singular_values
                .iter()
                .enumerate()
                .map(|(k, &s)| self.left_vectors[(i, k)] * s * self.right_vectors[(j, k)])
                .sum()
        })
    }
}

pub fn svd_thin<T: Scalar>(a: &Matrix<T>) -> Result<SvdResult<T>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::InvalidArgument("SVD of an empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("SVD input"));
    }
    if a.rows() >= a.cols() {
        Ok(jacobi_tall(a))
    } else {
        let t = jacobi_tall(&a.transpose());
        Ok(SvdResult {
            singular_values: t.singular_values,
            left_vectors: t.right_vectors,
            right_vectors: t.left_vectors,
        })
    }
}

fn jacobi_tall<T: Scalar>(a: &Matrix<T>) -> SvdResult<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<T>> = (0..n).map(|j| a.col(j).to_vec()).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = w.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));

    let mut u_cols: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut v_cols = Vec::with_capacity(n);
    let mut singular_values = Vec::with_capacity(n);
    for &j in &order {
        let s = norms[j];
        let mut u: Vec<T> = if s > T::zero() {
            w[j].iter().map(|&x| x / s).collect()
        } else {
            vec![T::zero(); m]
        };
        orthogonalize(&mut u, &u_cols);
        let un = norm(&u);
        if un < T::of(0.5) {
            u = complete_basis(&u_cols, m);
        } else {
            u.iter_mut().for_each(|x| *x /= un);
        }
        u_cols.push(u);
        v_cols.push(v[j].clone());
        singular_values.push(s);
    }

    SvdResult {
        singular_values,
        left_vectors: Matrix::from_columns(&u_cols),
        right_vectors: Matrix::from_columns(&v_cols),
    }
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Two passes of modified Gram-Schmidt against `basis`.
fn orthogonalize<T: Scalar>(u: &mut [T], basis: &[Vec<T>]) {
    for _ in 0..2 {
        for b in basis {
            let proj = dot(u, b);
            u.iter_mut().zip(b).for_each(|(x, &y)| *x -= proj * y);
        }
    }
}

/// Unit vector orthogonal to `basis`, picked from the canonical axes.
fn complete_basis<T: Scalar>(basis: &[Vec<T>], m: usize) -> Vec<T> {
    let mut best: Option<(T, Vec<T>)> = None;
    for i in 0..m {
        let mut e = vec![T::zero(); m];
        e[i] = T::one();
        orthogonalize(&mut e, basis);
        let en = norm(&e);
        if best.as_ref().is_none_or(|(bn, _)| en > *bn) {
            best = Some((en, e));
        }
    }
    let (en, mut e) = best.expect("m >= 1");
    e.iter_mut().for_each(|x| *x /= en);
    e
}
