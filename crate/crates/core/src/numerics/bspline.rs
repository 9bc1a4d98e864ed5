use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// B-spline basis given by a nondecreasing knot vector and a degree.
#[derive(Debug, Clone, PartialEq)]
pub struct BsplineBasis<T> {
    knots: Vec<T>,
    degree: usize,
}

impl<T: Scalar> BsplineBasis<T> {
    pub fn new(knots: Vec<T>, degree: usize) -> Result<Self> {
        if knots.len() < degree + 2 {
            return Err(Error::InvalidArgument(format!(
                "{} knots cannot carry a degree-{degree} basis",
                knots.len()
            )));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) || knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidArgument("knots must be finite and nondecreasing".into()));
        }
        Ok(Self { knots, degree })
    }

    /// Equally spaced knots for `num_basis` functions covering `[lo, hi]`,
    /// extended by `degree` knots on each side so that the basis is a
    /// partition of unity over the whole interval.
    pub fn uniform(lo: T, hi: T, num_basis: usize, degree: usize) -> Result<Self> {
        if num_basis <= degree {
            return Err(Error::InvalidArgument(format!(
                "num_basis {num_basis} must exceed the degree {degree}"
            )));
        }
        if !(hi > lo) {
            return Err(Error::InvalidArgument("uniform basis needs hi > lo".into()));
        }
        let segments = num_basis - degree;
        let dx = (hi - lo) / T::of_usize(segments);
        let knots = (0..num_basis + degree + 1)
            .map(|i| lo + (T::of_usize(i) - T::of_usize(degree)) * dx)
            .collect();
        Self::new(knots, degree)
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// All basis values at `x` by the Cox-de Boor recursion.
    pub fn evaluate(&self, x: T) -> Result<Vec<T>> {
        let t = &self.knots;
        let (lo, hi) = (t[0], t[t.len() - 1]);
        if !(x >= lo && x <= hi) {
            return Err(Error::OutsideKnotSpan { x: x.as_f64(), lo: lo.as_f64(), hi: hi.as_f64() });
        }
        let intervals = t.len() - 1;
        let mut n: Vec<T> = (0..intervals)
            .map(|j| if t[j] <= x && x < t[j + 1] { T::one() } else { T::zero() })
            .collect();
        if x == hi {
            // closed right end: x belongs to the last nonempty interval
            if let Some(j) = (0..intervals).rev().find(|&j| t[j] < t[j + 1]) {
                n[j] = T::one();
            }
        }
        for p in 1..=self.degree {
            for j in 0..intervals - p {
                let left = ratio(x - t[j], t[j + p] - t[j]) * n[j];
                let right = ratio(t[j + p + 1] - x, t[j + p + 1] - t[j + 1]) * n[j + 1];
                n[j] = left + right;
            }
        }
        n.truncate(self.num_basis());
        Ok(n)
    }
}

fn ratio<T: Scalar>(num: T, den: T) -> T {
    if den == T::zero() {
        T::zero()
    } else {
        num / den
    }
}

/// Design matrix with one row per `x` and one column per basis function.
pub fn bspline_design<T: Scalar>(basis: &BsplineBasis<T>, xs: &[T]) -> Result<Matrix<T>> {
    let mut out = Matrix::zeros(xs.len(), basis.num_basis());
    for (i, &x) in xs.iter().enumerate() {
        for (j, v) in basis.evaluate(x)?.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook recursive definition, evaluated one function at a time.
    fn cox_de_boor(t: &[f64], j: usize, p: usize, x: f64) -> f64 {
        if p == 0 {
            return if t[j] <= x && x < t[j + 1] { 1.0 } else { 0.0 };
        }
        let mut v = 0.0;
        if t[j + p] > t[j] {
            v += (x - t[j]) / (t[j + p] - t[j]) * cox_de_boor(t, j, p - 1, x);
        }
        if t[j + p + 1] > t[j + 1] {
            v += (t[j + p + 1] - x) / (t[j + p + 1] - t[j + 1]) * cox_de_boor(t, j + 1, p - 1, x);
        }
        v
    }

    #[test]
    fn degree_zero_is_an_indicator() {
        let b = BsplineBasis::new(vec![0.0, 1.0, 2.0], 0).unwrap();
        let d = bspline_design(&b, &[0.5]).unwrap();
        assert_eq!(d.row(0), vec![1.0, 0.0]);
    }

    #[test]
    fn cubic_partition_of_unity() {
        let b = BsplineBasis::uniform(0.0, 100.0, 35, 3).unwrap();
        for k in 0..=1000 {
            let x = k as f64 * 0.1;
            let s: f64 = b.evaluate(x).unwrap().iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "x={x}, sum={s}");
            assert!(b.evaluate(x).unwrap().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn matches_recursive_definition_at_interior_point() {
        let knots: Vec<f64> = (0..=10).map(f64::from).collect();
        let b = BsplineBasis::new(knots.clone(), 3).unwrap();
        let row = b.evaluate(5.5).unwrap();
        for (j, v) in row.iter().enumerate() {
            let expect = cox_de_boor(&knots, j, 3, 5.5);
            assert!((v - expect).abs() < 1e-14, "j={j}: {v} vs {expect}");
        }
        // exact values of the uniform cubic at the midpoint of a segment
        assert!((row[2] - 1.0 / 48.0).abs() < 1e-15);
        assert!((row[3] - 23.0 / 48.0).abs() < 1e-15);
        assert!((row[4] - 23.0 / 48.0).abs() < 1e-15);
        assert!((row[5] - 1.0 / 48.0).abs() < 1e-15);
    }

    #[test]
    fn outside_span_is_an_error() {
        let b = BsplineBasis::new(vec![0.0, 1.0, 2.0], 0).unwrap();
        assert!(matches!(b.evaluate(2.5), Err(Error::OutsideKnotSpan { .. })));
        assert_eq!(b.evaluate(2.0).unwrap(), vec![0.0, 1.0]);
    }
}
