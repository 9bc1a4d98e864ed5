//! Functional demographic model.
//!
//! Yearly log-rate curves are smoothed, centred on their across-year mean
//! and decomposed into `K` orthonormal age functions with coefficient time
//! series. Coefficients are forecast one by one; the forecast variance adds
//! the mean-estimation, coefficient, model-error and observational terms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forecast::{ForecastSurface, IntervalKind};
use crate::ingest::MortalitySurface;
use crate::numerics::{svd_thin, Matrix};
use crate::scalar::Scalar;
use crate::smoothing::{smooth_surface, SmoothConfig, SmoothSurface};
use crate::tsforecast::{self, TsFit, TsSpec};

pub const DEFAULT_COMPONENTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FdmModel<T> {
    pub ages: Vec<i32>,
    pub years: Vec<i32>,
    /// Across-year mean of the smoothed curves.
    pub mu: Vec<T>,
    /// Basis functions, ages × K, orthonormal columns.
    pub phi: Matrix<T>,
    /// Coefficient series, years × K; each column sums to zero.
    pub beta_series: Matrix<T>,
    /// Model-error variance, the across-year mean of `ê_t(x)²`.
    pub v: Vec<T>,
    /// Observational variance carried over from smoothing.
    pub sigma2: Vec<T>,
    /// `s_k² / Σ sᵢ²` for the retained components.
    pub explained_shares: Vec<T>,
    /// Smoothed log rates `f_t(x)`.
    pub smoothed: Matrix<T>,
    /// `ê = f − μ − Σ βφ`, ages × years.
    pub model_errors: Matrix<T>,
}

impl<T: Scalar> FdmModel<T> {
    pub fn k(&self) -> usize {
        self.phi.cols()
    }

    /// `μ(x) + Σ_k β_{t,k} φ_k(x)`.
    pub fn fitted_log_rates(&self) -> Matrix<T> {
        Matrix::from_fn(self.ages.len(), self.years.len(), |r, c| {
            self.mu[r] + (0..self.k()).map(|k| self.beta_series[(c, k)] * self.phi[(r, k)]).sum::<T>()
        })
    }

    /// Variance of the estimated mean curve, taken as `v(x) / n`.
    pub fn mean_variance(&self) -> Vec<T> {
        let n = T::of_usize(self.years.len());
        self.v.iter().map(|&v| v / n).collect()
    }
}

pub fn fit_fdm<T: Scalar>(surface: &MortalitySurface<T>, config: &SmoothConfig<T>, k: usize) -> Result<FdmModel<T>> {
    let smooth = smooth_surface(surface, config)?;
    fit_fdm_smoothed(&smooth, k)
}

/// Decomposition of an already smoothed surface.
pub fn fit_fdm_smoothed<T: Scalar>(smooth: &SmoothSurface<T>, k: usize) -> Result<FdmModel<T>> {
    let f = &smooth.values;
    let (na, ny) = (f.rows(), f.cols());
    let max_k = na.min(ny).saturating_sub(1);
    if k == 0 || k > max_k {
        return Err(Error::InvalidArgument(format!("K = {k} must lie in 1..={max_k} for a {na}×{ny} surface")));
    }
    let mu = f.row_means();
    let centred = Matrix::from_fn(na, ny, |r, c| f[(r, c)] - mu[r]);
    let svd = svd_thin(&centred)?;
    let total: T = svd.singular_values.iter().map(|&s| s * s).sum();

    let mut phi = Matrix::zeros(na, k);
    let mut beta_series = Matrix::zeros(ny, k);
    let mut explained_shares = Vec::with_capacity(k);
    for j in 0..k {
        let (u, s, v) = svd.rank_one(j);
        let sign = orientation(u);
        for r in 0..na {
            phi[(r, j)] = sign * u[r];
        }
        for c in 0..ny {
            beta_series[(c, j)] = sign * s * v[c];
        }
        explained_shares.push(if total > T::zero() { s * s / total } else { T::zero() });
    }

    let model_errors = Matrix::from_fn(na, ny, |r, c| {
        centred[(r, c)] - (0..k).map(|j| beta_series[(c, j)] * phi[(r, j)]).sum::<T>()
    });
    let v = (0..na)
        .map(|r| (0..ny).map(|c| model_errors[(r, c)] * model_errors[(r, c)]).sum::<T>() / T::of_usize(ny))
        .collect();

    Ok(FdmModel {
        ages: smooth.ages.clone(),
        years: smooth.years.clone(),
        mu,
        phi,
        beta_series,
        v,
        sigma2: smooth.sigma2.clone(),
        explained_shares,
        smoothed: f.clone(),
        model_errors,
    })
}

/// Sign making the basis function sum positive (largest entry positive if the
/// sum vanishes).
fn orientation<T: Scalar>(u: &[T]) -> T {
    let sum: T = u.iter().copied().sum();
    let tol = T::of(1e-8) * u.iter().map(|x| x.abs()).sum::<T>();
    let pivot = if sum.abs() > tol {
        sum
    } else {
        u.iter().copied().fold(T::zero(), |m, x| if x.abs() > m.abs() { x } else { m })
    };
    if pivot < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

fn coefficient_fits<T: Scalar>(model: &FdmModel<T>, spec: &TsSpec) -> Result<Vec<TsFit<T>>> {
    (0..model.k()).map(|k| tsforecast::fit(model.beta_series.col(k), spec)).collect()
}

/// Analytic forecast with normal prediction intervals.
pub fn forecast_fdm<T: Scalar>(model: &FdmModel<T>, spec: &TsSpec, h: usize, level: T) -> Result<ForecastSurface<T>> {
    let fits = coefficient_fits(model, spec)?;
    let forecasts = fits.iter().map(|f| tsforecast::forecast(f, h)).collect::<Result<Vec<_>>>()?;
    let na = model.ages.len();
    let mean_var = model.mean_variance();
    let point = Matrix::from_fn(na, h, |r, c| {
        model.mu[r] + forecasts.iter().enumerate().map(|(k, f)| f.point[c] * model.phi[(r, k)]).sum::<T>()
    });
    let variance = Matrix::from_fn(na, h, |r, c| {
        let coef: T = forecasts
            .iter()
            .enumerate()
            .map(|(k, f)| f.variance[c] * model.phi[(r, k)] * model.phi[(r, k)])
            .sum();
        mean_var[r] + coef + model.v[r] + model.sigma2[r]
    });
    ForecastSurface::normal(model.ages.clone(), horizon_years(&model.years, h), point, variance, level)
}

fn horizon_years(years: &[i32], h: usize) -> Vec<i32> {
    let last = *years.last().expect("nonempty years");
    (1..=h as i32).map(|k| last + k).collect()
}

/// Residual-resampling bootstrap of the forecast distribution.
///
/// Each replicate redraws the drift of every coefficient model from its
/// resampled innovations, simulates the coefficient paths forward with
/// resampled innovations, and adds a resampled model-error curve plus
/// Gaussian noise for the mean-estimation and observational variances.
/// Replicate `b` draws from stream `b` of a ChaCha generator keyed by
/// `seed`, so results do not depend on thread scheduling.
pub fn bootstrap_intervals<T: Scalar>(
    model: &FdmModel<T>,
    spec: &TsSpec,
    h: usize,
    level: T,
    replicates: usize,
    seed: u64,
) -> Result<ForecastSurface<T>> {
    if replicates < 100 {
        return Err(Error::InvalidArgument(format!("{replicates} bootstrap replicates; need at least 100")));
    }
    let analytic = forecast_fdm(model, spec, h, level)?;
    let fits = coefficient_fits(model, spec)?;
    let sims: Vec<CoefficientSimulator> = fits.iter().map(CoefficientSimulator::new).collect();

    let na = model.ages.len();
    let ny = model.years.len();
    let mu: Vec<f64> = model.mu.iter().map(|x| x.as_f64()).collect();
    let phi: Vec<Vec<f64>> = (0..model.k()).map(|k| model.phi.col(k).iter().map(|x| x.as_f64()).collect()).collect();
    let errors: Vec<f64> = model.model_errors.as_slice().iter().map(|x| x.as_f64()).collect();
    let noise_sd: Vec<(f64, f64)> = model
        .mean_variance()
        .iter()
        .zip(&model.sigma2)
        .map(|(m, s)| (m.as_f64().max(0.0).sqrt(), s.as_f64().max(0.0).sqrt()))
        .collect();

    // replicate-major: draws[b][c * na + r]
    let draws: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let paths: Vec<Vec<f64>> = sims.iter().map(|s| s.simulate(h, &mut rng)).collect();
            let mut out = Vec::with_capacity(na * h);
            for c in 0..h {
                let t = rng.random_range(0..ny);
                let e_curve = &errors[t * na..(t + 1) * na];
                for r in 0..na {
                    let z1: f64 = rng.sample(StandardNormal);
                    let z2: f64 = rng.sample(StandardNormal);
                    let coef: f64 = paths.iter().zip(&phi).map(|(p, f)| p[c] * f[r]).sum();
                    out.push(mu[r] + noise_sd[r].0 * z1 + coef + e_curve[r] + noise_sd[r].1 * z2);
                }
            }
            out
        })
        .collect();

    let alpha = 1.0 - level.as_f64() / 100.0;
    let mut lower = Matrix::zeros(na, h);
    let mut upper = Matrix::zeros(na, h);
    let mut cell = vec![0.0; replicates];
    for c in 0..h {
        for r in 0..na {
            for (slot, d) in cell.iter_mut().zip(&draws) {
                *slot = d[c * na + r];
            }
            cell.sort_by(f64::total_cmp);
            let p = analytic.point[(r, c)];
            lower[(r, c)] = T::of(quantile_sorted(&cell, alpha / 2.0)).min(p);
            upper[(r, c)] = T::of(quantile_sorted(&cell, 1.0 - alpha / 2.0)).max(p);
        }
    }

    Ok(ForecastSurface {
        lower,
        upper,
        interval: IntervalKind::Bootstrap { replicates, seed },
        ..analytic
    })
}

/// Linear interpolation between order statistics (R type 7).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Simulates future values of one coefficient series from its fitted model.
struct CoefficientSimulator {
    drift: f64,
    resample_drift: bool,
    ar: Vec<f64>,
    integrated: bool,
    last: f64,
    /// Centred working series the AR recursion starts from.
    history: Vec<f64>,
    /// Centred innovations rescaled to the fitted innovation variance.
    innovations: Vec<f64>,
    /// Number of observations behind the drift estimate.
    drift_sample: usize,
}

impl CoefficientSimulator {
    fn new<T: Scalar>(fit: &TsFit<T>) -> Self {
        let res: Vec<f64> = fit.residuals.iter().map(|x| x.as_f64()).collect();
        let m = res.iter().sum::<f64>() / res.len().max(1) as f64;
        let centred: Vec<f64> = res.iter().map(|r| r - m).collect();
        let ms = centred.iter().map(|r| r * r).sum::<f64>() / centred.len().max(1) as f64;
        let s2 = fit.innovation_variance.as_f64();
        let scale = if ms > 0.0 { (s2 / ms).sqrt() } else { 0.0 };
        let drift = fit.drift.as_f64();
        let integrated = fit.spec.d == 1;
        let hist = fit.history();
        let working: Vec<f64> = if integrated {
            hist.windows(2).map(|w| (w[1] - w[0]).as_f64() - drift).collect()
        } else {
            hist.iter().map(|x| x.as_f64() - drift).collect()
        };
        Self {
            drift,
            resample_drift: fit.spec.include_drift && fit.spec.drift_uncertainty,
            ar: fit.ar_coeffs.iter().map(|x| x.as_f64()).collect(),
            integrated,
            last: hist.last().map_or(0.0, |x| x.as_f64()),
            history: working,
            innovations: centred.iter().map(|r| r * scale).collect(),
            drift_sample: fit.residuals.len() + fit.ar_coeffs.len(),
        }
    }

    fn draw(&self, rng: &mut impl Rng) -> f64 {
        if self.innovations.is_empty() {
            0.0
        } else {
            self.innovations[rng.random_range(0..self.innovations.len())]
        }
    }

    fn simulate(&self, h: usize, rng: &mut impl Rng) -> Vec<f64> {
        let drift = if self.resample_drift && self.drift_sample > 0 {
            let s: f64 = (0..self.drift_sample).map(|_| self.draw(rng)).sum();
            self.drift + s / self.drift_sample as f64
        } else {
            self.drift
        };
        let mut z = self.history.clone();
        let mut level = self.last;
        let mut out = Vec::with_capacity(h);
        for _ in 0..h {
            let ar: f64 = self.ar.iter().enumerate().map(|(i, a)| a * z[z.len() - 1 - i]).sum();
            let zn = ar + self.draw(rng);
            z.push(zn);
            if self.integrated {
                level += drift + zn;
                out.push(level);
            } else {
                out.push(drift + zn);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert!((quantile_sorted(&v, 0.5) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn orientation_prefers_positive_sum() {
        assert_eq!(orientation(&[-0.5, -0.5, 0.1]), -1.0);
        assert_eq!(orientation(&[0.6, -0.6, 0.0]), 1.0);
        assert_eq!(orientation(&[-0.7, 0.7, 0.0]), -1.0);
    }
}
