//! Lee–Carter fit `ln m_{x,t} = α_x + β_x κ_t + ε_{x,t}` by singular value
//! decomposition of the age-centred log-rate matrix, with Σβ = 1 and Σκ = 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forecast::ForecastSurface;
use crate::ingest::MortalitySurface;
use crate::numerics::{svd_thin, Matrix};
use crate::scalar::Scalar;
use crate::smoothing::{smooth_surface, SmoothConfig};
use crate::tsforecast::{self, TsSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LcVariant {
    Lc,
    /// Lee–Carter applied to a smoothed surface.
    Lcs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcModel<T> {
    pub ages: Vec<i32>,
    pub years: Vec<i32>,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub kappa: Vec<T>,
    /// `ln m − α − βκᵀ`, ages × years.
    pub residuals: Matrix<T>,
    /// `s₁² / Σ sᵢ²`.
    pub explained_variance: T,
    /// `1 − ‖ε‖² / ‖ln m − α‖²`, reported alongside for comparison.
    pub rss_explained_variance: T,
    pub variant: LcVariant,
}

impl<T: Scalar> LcModel<T> {
    /// `α_x + β_x κ_t`.
    pub fn fitted_log_rates(&self) -> Matrix<T> {
        Matrix::from_fn(self.ages.len(), self.years.len(), |r, c| self.alpha[r] + self.beta[r] * self.kappa[c])
    }

    /// Residuals divided by their overall standard deviation.
    pub fn standardized_residuals(&self) -> Vec<T> {
        standardize(self.residuals.as_slice())
    }
}

pub(crate) fn standardize<T: Scalar>(xs: &[T]) -> Vec<T> {
    let sd = crate::scalar::sample_variance(xs).sqrt();
    if sd > T::zero() {
        xs.iter().map(|&x| x / sd).collect()
    } else {
        xs.to_vec()
    }
}

pub fn fit_lc<T: Scalar>(surface: &MortalitySurface<T>) -> Result<LcModel<T>> {
    fit_log_surface(surface.ages(), surface.years(), &surface.log_rates(), LcVariant::Lc)
}

/// Lee–Carter on `exp` of the per-year smoothed log rates.
pub fn fit_lcs<T: Scalar>(surface: &MortalitySurface<T>, config: &SmoothConfig<T>) -> Result<LcModel<T>> {
    let smooth = smooth_surface(surface, config)?;
    let smoothed = smooth.to_rates(surface.gender())?;
    fit_log_surface(surface.ages(), surface.years(), &smoothed.log_rates(), LcVariant::Lcs)
}

fn fit_log_surface<T: Scalar>(ages: &[i32], years: &[i32], log_m: &Matrix<T>, variant: LcVariant) -> Result<LcModel<T>> {
    let (na, ny) = (ages.len(), years.len());
    if na < 3 || ny < 3 {
        return Err(Error::InsufficientData { needed: 3, got: na.min(ny) });
    }
    let alpha = log_m.row_means();
    let centred = Matrix::from_fn(na, ny, |r, c| log_m[(r, c)] - alpha[r]);
    let total_ss = centred.as_slice().iter().map(|&v| v * v).sum::<T>();

    let degenerate_scale = T::of(64.0) * T::epsilon() * log_m.frobenius_norm();
    let svd = svd_thin(&centred)?;
    let s1 = svd.singular_values[0];
    if s1 <= degenerate_scale {
        // no temporal signal: a perfect fit with κ ≡ 0
        return Ok(LcModel {
            ages: ages.to_vec(),
            years: years.to_vec(),
            alpha,
            beta: vec![T::one() / T::of_usize(na); na],
            kappa: vec![T::zero(); ny],
            residuals: centred,
            explained_variance: T::one(),
            rss_explained_variance: T::one(),
            variant,
        });
    }

    let (u, s, v) = svd.rank_one(0);
    let mut u_sum: T = u.iter().copied().sum();
    let sign = if u_sum < T::zero() { -T::one() } else { T::one() };
    u_sum = u_sum * sign;
    if u_sum <= T::epsilon() * T::of_usize(na) {
        return Err(Error::Degenerate("first left singular vector sums to zero; β cannot be normalized"));
    }
    let beta: Vec<T> = u.iter().map(|&x| sign * x / u_sum).collect();
    let kappa: Vec<T> = v.iter().map(|&x| sign * s * u_sum * x).collect();
    let residuals = Matrix::from_fn(na, ny, |r, c| centred[(r, c)] - beta[r] * kappa[c]);

    let ss: T = svd.singular_values.iter().map(|&x| x * x).sum();
    let explained_variance = s * s / ss;
    let rss = residuals.as_slice().iter().map(|&e| e * e).sum::<T>();
    let rss_explained_variance = if total_ss > T::zero() { T::one() - rss / total_ss } else { T::one() };

    Ok(LcModel {
        ages: ages.to_vec(),
        years: years.to_vec(),
        alpha,
        beta,
        kappa,
        residuals,
        explained_variance,
        rss_explained_variance,
        variant,
    })
}

/// Forecasts only through κ: point `α + βκ̂_{n+h}`, variance `β²·Var(κ̂_{n+h})`.
pub fn forecast_lc<T: Scalar>(model: &LcModel<T>, spec: &TsSpec, h: usize, level: T) -> Result<ForecastSurface<T>> {
    let fit = tsforecast::fit(&model.kappa, spec)?;
    let fc = tsforecast::forecast(&fit, h)?;
    let na = model.ages.len();
    let point = Matrix::from_fn(na, h, |r, c| model.alpha[r] + model.beta[r] * fc.point[c]);
    let variance = Matrix::from_fn(na, h, |r, c| model.beta[r] * model.beta[r] * fc.variance[c]);
    let last = *model.years.last().expect("fit has ≥ 3 years");
    let years = (1..=h as i32).map(|k| last + k).collect();
    ForecastSurface::normal(model.ages.clone(), years, point, variance, level)
}
