//! Penalized regression-spline smoothing of yearly log-mortality curves with
//! an optional nondecreasing constraint at older ages.
//!
//! Each year is smoothed on its own: a cubic B-spline basis with equally
//! spaced knots, a difference penalty on adjacent coefficients, and a
//! pool-adjacent-violators projection of the fitted tail when
//! `monotone_from` is set.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::MortalitySurface;
use crate::numerics::{bspline_design, BsplineBasis, Matrix, PenalizedSystem};
use crate::scalar::{mean, sample_variance, Scalar};

const CUBIC: usize = 3;
const MAX_DEFAULT_BASIS: usize = 35;

/// How the penalty weight is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Lambda<T> {
    Fixed(T),
    /// Generalized cross-validation over 25 log-spaced values in `[1e-4, 1e6]`.
    Auto,
    /// Generalized cross-validation over the given values.
    Grid(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothConfig<T> {
    /// Number of cubic basis functions; `None` picks `min(⌊n_ages / 2.5⌋, 35)`.
    pub num_basis: Option<usize>,
    pub lambda: Lambda<T>,
    pub difference_order: usize,
    /// Age from which fitted curves are forced to be nondecreasing.
    pub monotone_from: Option<i32>,
    /// Per-age observation weights; unit weights when absent.
    pub weights: Option<Vec<T>>,
}

impl<T: Scalar> Default for SmoothConfig<T> {
    fn default() -> Self {
        Self { num_basis: None, lambda: Lambda::Auto, difference_order: 2, monotone_from: Some(65), weights: None }
    }
}

impl<T: Scalar> SmoothConfig<T> {
    pub fn num_basis_for(&self, n_ages: usize) -> usize {
        self.num_basis.unwrap_or_else(|| ((n_ages * 2) / 5).min(MAX_DEFAULT_BASIS))
    }

    fn validate(&self, ages: &[i32], ys: &[T]) -> Result<usize> {
        if ages.len() != ys.len() {
            return Err(Error::DimensionMismatch(format!("{} ages but {} values", ages.len(), ys.len())));
        }
        let k = self.num_basis_for(ys.len());
        if k < CUBIC + 1 || k < self.difference_order + 1 {
            return Err(Error::InvalidArgument(format!(
                "{k} basis functions are too few for a cubic basis with difference order {}",
                self.difference_order
            )));
        }
        if ys.len() < k {
            return Err(Error::InsufficientData { needed: k, got: ys.len() });
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::NonFinite("curve to smooth"));
        }
        if let Some(c) = self.monotone_from {
            if c < ages[0] || c > ages[ages.len() - 1] {
                return Err(Error::InvalidArgument(format!(
                    "monotone_from age {c} outside {}:{}",
                    ages[0],
                    ages[ages.len() - 1]
                )));
            }
        }
        if let Some(w) = &self.weights {
            if w.len() != ys.len() {
                return Err(Error::DimensionMismatch(format!("{} weights for {} ages", w.len(), ys.len())));
            }
        }
        Ok(k)
    }

    fn grid(&self) -> Vec<T> {
        match &self.lambda {
            Lambda::Fixed(l) => vec![*l],
            Lambda::Grid(g) => g.clone(),
            Lambda::Auto => default_lambda_grid(),
        }
    }
}

/// 25 logarithmically spaced values from 1e-4 to 1e6.
pub fn default_lambda_grid<T: Scalar>() -> Vec<T> {
    (0..25).map(|i| T::of(10f64.powf(-4.0 + 10.0 * i as f64 / 24.0))).collect()
}

struct CurveProblem<T> {
    design: Matrix<T>,
    system: PenalizedSystem<T>,
    weights: Vec<T>,
}

impl<T: Scalar> CurveProblem<T> {
    fn new(ages: &[i32], ys: &[T], config: &SmoothConfig<T>) -> Result<Self> {
        let k = config.validate(ages, ys)?;
        let xs: Vec<T> = ages.iter().map(|&a| T::of(f64::from(a))).collect();
        let basis = BsplineBasis::uniform(xs[0], xs[xs.len() - 1], k, CUBIC)?;
        let design = bspline_design(&basis, &xs)?;
        let weights = config.weights.clone().unwrap_or_else(|| vec![T::one(); ys.len()]);
        let system = PenalizedSystem::new(&design, ys, &weights, config.difference_order)?;
        Ok(Self { design, system, weights })
    }

    fn fitted(&self, theta: &[T]) -> Vec<T> {
        (0..self.design.rows())
            .map(|i| theta.iter().enumerate().map(|(j, &t)| self.design[(i, j)] * t).sum())
            .collect()
    }

    fn gcv(&self, ys: &[T], lambda: T) -> Option<T> {
        let (theta, trace) = self.system.solve_with_trace(lambda).ok()?;
        let fit = self.fitted(&theta);
        let rss: T = ys.iter().zip(&fit).zip(&self.weights).map(|((&y, &f), &w)| w * (y - f) * (y - f)).sum();
        let n = T::of_usize(ys.len());
        let dof = n - trace;
        (dof > T::zero()).then(|| n * rss / (dof * dof))
    }

    fn choose(&self, ys: &[T], grid: &[T]) -> T {
        let mut best: Option<(T, T)> = None;
        for &lambda in grid {
            if let Some(score) = self.gcv(ys, lambda).filter(|s| s.is_finite()) {
                if best.is_none_or(|(_, b)| score < b) {
                    best = Some((lambda, score));
                }
            }
        }
        best.map(|(l, _)| l)
            .or_else(|| grid.iter().copied().fold(None, |m: Option<T>, l| Some(m.map_or(l, |m| m.max(l)))))
            .unwrap_or_else(T::one)
    }
}

/// Penalty weight minimizing `n·RSS / (n − tr H_λ)²` over the configured grid.
pub fn choose_lambda<T: Scalar>(ages: &[i32], ys: &[T], config: &SmoothConfig<T>) -> Result<T> {
    let problem = CurveProblem::new(ages, ys, config)?;
    Ok(problem.choose(ys, &config.grid()))
}

/// Smoothed values of one curve together with the penalty weight used.
pub fn smooth_curve_with_lambda<T: Scalar>(ages: &[i32], ys: &[T], config: &SmoothConfig<T>) -> Result<(Vec<T>, T)> {
    let problem = CurveProblem::new(ages, ys, config)?;
    let lambda = match &config.lambda {
        Lambda::Fixed(l) => *l,
        _ => problem.choose(ys, &config.grid()),
    };
    let theta = problem.system.solve(lambda)?;
    let mut fit = problem.fitted(&theta);
    if let Some(c) = config.monotone_from {
        fit = enforce_monotone(ages, &fit, c);
    }
    Ok((fit, lambda))
}

pub fn smooth_curve<T: Scalar>(ages: &[i32], ys: &[T], config: &SmoothConfig<T>) -> Result<Vec<T>> {
    smooth_curve_with_lambda(ages, ys, config).map(|(fit, _)| fit)
}

/// Least-squares projection of the values at ages `≥ from_age` onto
/// nondecreasing sequences (pool adjacent violators, unit weights).
pub fn enforce_monotone<T: Scalar>(ages: &[i32], values: &[T], from_age: i32) -> Vec<T> {
    let start = ages.iter().position(|&a| a >= from_age).unwrap_or(values.len());
    let mut out = values.to_vec();
    pava(&mut out[start..]);
    out
}

/// In-place nondecreasing isotonic regression.
pub fn pava<T: Scalar>(values: &mut [T]) {
    // (sum, count) per pooled block
    let mut blocks: Vec<(T, usize)> = Vec::with_capacity(values.len());
    for &v in values.iter() {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (s1, n1) = blocks[blocks.len() - 1];
            let (s0, n0) = blocks[blocks.len() - 2];
            if s0 / T::of_usize(n0) > s1 / T::of_usize(n1) {
                blocks.pop();
                *blocks.last_mut().expect("two blocks") = (s0 + s1, n0 + n1);
            } else {
                break;
            }
        }
    }
    let mut i = 0;
    for (s, n) in blocks {
        let m = s / T::of_usize(n);
        values[i..i + n].iter_mut().for_each(|v| *v = m);
        i += n;
    }
}

/// Smoothed log-rate surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothSurface<T> {
    pub ages: Vec<i32>,
    pub years: Vec<i32>,
    /// Smoothed log rates `f_t(x)`, ages × years.
    pub values: Matrix<T>,
    /// Across-year variance of `ln m_t(x) − f_t(x)` per age.
    pub sigma2: Vec<T>,
    /// Penalty weight used for each year.
    pub lambdas: Vec<T>,
}

/// Smooths `ln m` year by year. Years are processed in parallel; the result
/// does not depend on scheduling.
pub fn smooth_surface<T: Scalar>(surface: &MortalitySurface<T>, config: &SmoothConfig<T>) -> Result<SmoothSurface<T>> {
    let ages = surface.ages();
    let logs = surface.log_rates();
    let fits: Vec<(Vec<T>, T)> = (0..surface.years().len())
        .into_par_iter()
        .map(|c| smooth_curve_with_lambda(ages, logs.col(c), config))
        .collect::<Result<_>>()?;
    let (cols, lambdas): (Vec<Vec<T>>, Vec<T>) = fits.into_iter().unzip();
    let values = Matrix::from_columns(&cols);

    let sigma2 = (0..ages.len())
        .map(|r| {
            let resid: Vec<T> = (0..values.cols()).map(|c| logs[(r, c)] - values[(r, c)]).collect();
            sample_variance(&resid)
        })
        .collect();
    Ok(SmoothSurface { ages: ages.to_vec(), years: surface.years().to_vec(), values, sigma2, lambdas })
}

impl<T: Scalar> SmoothSurface<T> {
    /// Back to a rate surface, `m = exp(f)`.
    pub fn to_rates(&self, gender: crate::ingest::Gender) -> Result<MortalitySurface<T>> {
        MortalitySurface::from_log_rates(self.ages.clone(), self.years.clone(), &self.values, gender)
    }

    pub fn mean_residual_variance(&self) -> T {
        mean(&self.sigma2)
    }
}
