//! Penalized least squares `min (y − Bθ)ᵀW(y − Bθ) + λ‖D_d θ‖²`, solved by
//! Householder QR of the stacked system `[√W·B; √λ·D_d]`. Going through the
//! normal equations would square the condition number, which matters once
//! λ is large.

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Order-`d` difference operator, `(n − d) × n`.
pub fn difference_matrix<T: Scalar>(n: usize, d: usize) -> Matrix<T> {
    let mut m = Matrix::identity(n);
    for _ in 0..d {
        let rows = m.rows();
        m = Matrix::from_fn(rows - 1, n, |i, j| m[(i + 1, j)] - m[(i, j)]);
    }
    m
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn factor(a: &Matrix<T>) -> Option<Self> {
        let n = a.rows();
        let mut l = Matrix::zeros(n, n);
        let scale = (0..n).map(|i| a[(i, i)].abs()).fold(T::zero(), T::max);
        let tiny = scale * T::epsilon() * T::of_usize(n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > tiny) {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(Self { l })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }
}

/// The weighted data reduced once by QR, `√W·B = Q₀R₀`, so that each
/// penalty weight only factors the small stack `[R₀; √λ·D_d]`.
#[derive(Debug, Clone)]
pub struct PenalizedSystem<T> {
    /// `R₀`, p × p upper triangular.
    r0: Matrix<T>,
    /// Leading `p` entries of `Q₀ᵀ√W·y`.
    qty: Vec<T>,
    /// `D_d`
    diff: Matrix<T>,
}

impl<T: Scalar> PenalizedSystem<T> {
    pub fn new(design: &Matrix<T>, y: &[T], weights: &[T], order: usize) -> Result<Self> {
        let (n, p) = (design.rows(), design.cols());
        if y.len() != n || weights.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "design has {n} rows, y has {}, weights have {}",
                y.len(),
                weights.len()
            )));
        }
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidArgument(format!("difference order {order} not in 1..=3")));
        }
        if order >= p {
            return Err(Error::InvalidArgument(format!(
                "difference order {order} needs more than {p} coefficients"
            )));
        }
        if weights.iter().any(|&w| !(w >= T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observations"));
        }
        let root: Vec<T> = weights.iter().map(|w| w.sqrt()).collect();
        let rows: Vec<(Vec<T>, T)> =
            (0..n).map(|i| (design.row(i).into_iter().map(|v| root[i] * v).collect(), root[i] * y[i])).collect();
        let (r0, qty) = householder(rows, p);
        Ok(Self { r0, qty, diff: difference_matrix(p, order) })
    }

    fn factor(&self, lambda: T) -> Result<(Matrix<T>, Vec<T>)> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("penalty weight {lambda} must be finite and ≥ 0")));
        }
        let p = self.r0.cols();
        let root = lambda.sqrt();
        let rows: Vec<(Vec<T>, T)> = (0..p)
            .map(|i| (self.r0.row(i), self.qty[i]))
            .chain((0..self.diff.rows()).map(|i| (self.diff.row(i).into_iter().map(|v| root * v).collect(), T::zero())))
            .collect();
        let scale = rows.iter().flat_map(|r| r.0.iter()).fold(T::zero(), |m, v| m.max(v.abs()));
        let (r, qty) = householder(rows, p);
        let tiny = scale * T::epsilon() * T::of_usize(4 * p);
        if (0..p).any(|i| !(r[(i, i)].abs() > tiny)) {
            return Err(Error::Singular("penalized least squares"));
        }
        Ok((r, qty))
    }

    pub fn solve(&self, lambda: T) -> Result<Vec<T>> {
        let (r, qty) = self.factor(lambda)?;
        Ok(back_substitute(&r, &qty))
    }

    /// Coefficients together with the effective dimension `tr(H_λ)`.
    pub fn solve_with_trace(&self, lambda: T) -> Result<(Vec<T>, T)> {
        let (r, qty) = self.factor(lambda)?;
        // tr H = ‖√W·B·R⁻¹‖²_F = ‖R₀R⁻¹‖²_F; one forward solve xR = row of R₀
        let p = r.cols();
        let mut trace = T::zero();
        let mut x = vec![T::zero(); p];
        for i in 0..p {
            for j in 0..p {
                let mut s = self.r0[(i, j)];
                for k in 0..j {
                    s -= x[k] * r[(k, j)];
                }
                x[j] = s / r[(j, j)];
            }
            trace += x.iter().map(|v| *v * *v).sum::<T>();
        }
        Ok((back_substitute(&r, &qty), trace))
    }
}

/// Householder QR of the rows `(aᵢ, cᵢ)`, returning the p × p triangle `R`
/// (zero-padded when there are fewer than p rows) and the leading p entries
/// of `Qᵀc`. Rows are sorted by decreasing size first: without pivoting,
/// Householder QR is stable for widely varying row scales in that order.
fn householder<T: Scalar>(mut rows: Vec<(Vec<T>, T)>, p: usize) -> (Matrix<T>, Vec<T>) {
    let size = |r: &[T]| r.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    rows.sort_by(|a, b| size(&b.0).partial_cmp(&size(&a.0)).unwrap_or(std::cmp::Ordering::Equal));
    let m = rows.len();
    let mut a = Matrix::from_fn(m, p, |i, j| rows[i].0[j]);
    let mut c: Vec<T> = rows.iter().map(|r| r.1).collect();
    let two = T::one() + T::one();
    for k in 0..p.min(m) {
        let alpha = super::matrix::norm(&a.col(k)[k..]);
        if alpha == T::zero() {
            continue;
        }
        let x0 = a[(k, k)];
        let beta = if x0 >= T::zero() { -alpha } else { alpha };
        // reflector I − 2vvᵀ/vᵀv with v = x − βe₁
        let mut v: Vec<T> = a.col(k)[k..].to_vec();
        v[0] = x0 - beta;
        let vv: T = v.iter().map(|x| *x * *x).sum();
        if vv == T::zero() {
            continue;
        }
        for j in k..p {
            let col = &mut a.col_mut(j)[k..];
            let f = two * col.iter().zip(&v).map(|(x, y)| *x * *y).sum::<T>() / vv;
            col.iter_mut().zip(&v).for_each(|(x, y)| *x -= f * *y);
        }
        let f = two * c[k..].iter().zip(&v).map(|(x, y)| *x * *y).sum::<T>() / vv;
        c[k..].iter_mut().zip(&v).for_each(|(x, y)| *x -= f * *y);
    }
    let r = Matrix::from_fn(p, p, |i, j| if i < m && j >= i { a[(i, j)] } else { T::zero() });
    let mut qty = c;
    qty.resize(p.max(m), T::zero());
    qty.truncate(p);
    (r, qty)
}

fn back_substitute<T: Scalar>(r: &Matrix<T>, b: &[T]) -> Vec<T> {
    let p = r.cols();
    let mut x = b.to_vec();
    for i in (0..p).rev() {
        let mut s = x[i];
        for k in (i + 1)..p {
            s -= r[(i, k)] * x[k];
        }
        x[i] = s / r[(i, i)];
    }
    x
}

pub fn solve_penalized_ls<T: Scalar>(
    design: &Matrix<T>,
    y: &[T],
    weights: &[T],
    lambda: T,
    order: usize,
) -> Result<Vec<T>> {
    PenalizedSystem::new(design, y, weights, order)?.solve(lambda)
}
