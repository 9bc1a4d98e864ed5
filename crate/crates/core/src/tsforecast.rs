//! Univariate models for the period index and the basis coefficients:
//! random walk with drift, and AR(p) on optionally differenced series fitted
//! by conditional least squares.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Cholesky, Matrix};
use crate::scalar::{mean, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TsFamily {
    Rwd,
    Arima,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TsSpec {
    pub family: TsFamily,
    /// AR order (ARIMA only).
    pub p: usize,
    /// Differencing order, 0 or 1 (ARIMA only).
    pub d: usize,
    pub include_drift: bool,
    /// Adds the estimation variance of the drift to forecast variances.
    pub drift_uncertainty: bool,
}

impl Default for TsSpec {
    fn default() -> Self {
        Self::rwd()
    }
}

impl TsSpec {
    pub fn rwd() -> Self {
        Self { family: TsFamily::Rwd, p: 0, d: 1, include_drift: true, drift_uncertainty: true }
    }

    pub fn ar(p: usize, d: usize, include_drift: bool) -> Self {
        Self { family: TsFamily::Arima, p, d, include_drift, drift_uncertainty: true }
    }

    fn validate(&self) -> Result<()> {
        if self.family == TsFamily::Arima && self.d > 1 {
            return Err(Error::InvalidArgument(format!("differencing order {} not in {{0, 1}}", self.d)));
        }
        Ok(())
    }
}

impl fmt::Display for TsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            TsFamily::Rwd => f.write_str("rwd"),
            TsFamily::Arima => {
                write!(f, "ar:{},{}", self.p, self.d)?;
                if self.include_drift {
                    f.write_str(",drift")?;
                }
                Ok(())
            }
        }
    }
}

/// Accepts `rwd` or `ar:p,d[,drift]`.
impl FromStr for TsSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("rwd") {
            return Ok(Self::rwd());
        }
        let bad = || Error::InvalidArgument(format!("time-series spec {s:?}; expected `rwd` or `ar:p,d[,drift]`"));
        let rest = s.strip_prefix("ar:").ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(bad());
        }
        let p = parts[0].parse().map_err(|_| bad())?;
        let d = parts[1].parse().map_err(|_| bad())?;
        let drift = match parts.get(2) {
            None => false,
            Some(&"drift") => true,
            Some(_) => return Err(bad()),
        };
        let spec = Self::ar(p, d, drift);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsFit<T> {
    pub spec: TsSpec,
    /// Mean of the (differenced) series; zero without drift.
    pub drift: T,
    pub ar_coeffs: Vec<T>,
    pub innovation_variance: T,
    /// Length of the original series.
    pub n: usize,
    pub residuals: Vec<T>,
    /// Fitted AR polynomial has a root on or inside the unit circle.
    pub explosive: bool,
    history: Vec<T>,
}

impl<T: Scalar> TsFit<T> {
    pub fn history(&self) -> &[T] {
        &self.history
    }

    /// The series the AR recursion runs on: differenced when `d = 1`, then
    /// centred by the drift.
    fn centred_working_series(&self) -> Vec<T> {
        working_series(&self.history, self.spec.d).into_iter().map(|w| w - self.drift).collect()
    }
}

/// Point forecasts and their variances for horizons `1..=h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TsForecast<T> {
    pub point: Vec<T>,
    pub variance: Vec<T>,
}

pub fn fit<T: Scalar>(series: &[T], spec: &TsSpec) -> Result<TsFit<T>> {
    match spec.family {
        TsFamily::Rwd => {
            let mut f = fit_rwd(series)?;
            f.spec.drift_uncertainty = spec.drift_uncertainty;
            Ok(f)
        }
        TsFamily::Arima => fit_ar(series, spec),
    }
}

pub fn forecast<T: Scalar>(fit: &TsFit<T>, h: usize) -> Result<TsForecast<T>> {
    match fit.spec.family {
        TsFamily::Rwd => forecast_rwd(fit, h),
        TsFamily::Arima => forecast_ar(fit, h),
    }
}

pub fn fit_rwd<T: Scalar>(series: &[T]) -> Result<TsFit<T>> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("time series"));
    }
    let diffs = working_series(series, 1);
    let drift = mean(&diffs);
    let residuals: Vec<T> = diffs.iter().map(|&x| x - drift).collect();
    let innovation_variance = residuals.iter().map(|&r| r * r).sum::<T>() / T::of_usize(n - 2);
    Ok(TsFit {
        spec: TsSpec::rwd(),
        drift,
        ar_coeffs: Vec::new(),
        innovation_variance,
        n,
        residuals,
        explosive: false,
        history: series.to_vec(),
    })
}

/// `last + h·drift`, variance `h·σ² + h²·σ²/(n − 1)`.
pub fn forecast_rwd<T: Scalar>(fit: &TsFit<T>, h: usize) -> Result<TsForecast<T>> {
    check_horizon(h)?;
    let last = *fit.history.last().ok_or(Error::EmptyInput)?;
    let s2 = fit.innovation_variance;
    let var_drift = s2 / T::of_usize(fit.n - 1);
    let mut point = Vec::with_capacity(h);
    let mut variance = Vec::with_capacity(h);
    for step in 1..=h {
        let hf = T::of_usize(step);
        point.push(last + hf * fit.drift);
        let mut v = s2 * hf;
        if fit.spec.drift_uncertainty {
            v += hf * hf * var_drift;
        }
        variance.push(v);
    }
    Ok(TsForecast { point, variance })
}

pub fn fit_ar<T: Scalar>(series: &[T], spec: &TsSpec) -> Result<TsFit<T>> {
    spec.validate()?;
    let (p, d) = (spec.p, spec.d);
    let n = series.len();
    if n < d + p + 2 {
        return Err(Error::InsufficientData { needed: d + p + 2, got: n });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("time series"));
    }
    let w = working_series(series, d);
    let m = w.len();
    let drift = if spec.include_drift { mean(&w) } else { T::zero() };
    let z: Vec<T> = w.iter().map(|&x| x - drift).collect();

    let ar_coeffs = if p == 0 {
        Vec::new()
    } else {
        let mut gram = Matrix::zeros(p, p);
        let mut rhs = vec![T::zero(); p];
        for t in p..m {
            for i in 0..p {
                rhs[i] += z[t - 1 - i] * z[t];
                for j in 0..p {
                    gram[(i, j)] += z[t - 1 - i] * z[t - 1 - j];
                }
            }
        }
        Cholesky::factor(&gram).ok_or(Error::Singular("lag regression"))?.solve(&rhs)
    };

    let residuals: Vec<T> = (p..m)
        .map(|t| z[t] - ar_coeffs.iter().enumerate().map(|(i, &phi)| phi * z[t - 1 - i]).sum::<T>())
        .collect();
    let params = p + usize::from(spec.include_drift);
    let denom = (residuals.len().saturating_sub(params)).max(1);
    let innovation_variance = residuals.iter().map(|&r| r * r).sum::<T>() / T::of_usize(denom);
    let explosive = !is_stationary(&ar_coeffs);
    Ok(TsFit { spec: *spec, drift, ar_coeffs, innovation_variance, n, residuals, explosive, history: series.to_vec() })
}

pub fn forecast_ar<T: Scalar>(fit: &TsFit<T>, h: usize) -> Result<TsForecast<T>> {
    check_horizon(h)?;
    let p = fit.ar_coeffs.len();
    let phi = &fit.ar_coeffs;
    let integrated = fit.spec.d == 1;
    let last = *fit.history.last().ok_or(Error::EmptyInput)?;

    // centred recursion, seeded with the observed tail
    let mut z = fit.centred_working_series();
    let mut psi = vec![T::one()];
    for j in 1..h {
        let v = (1..=p.min(j)).map(|i| phi[i - 1] * psi[j - i]).sum();
        psi.push(v);
    }
    let weights: Vec<T> = if integrated {
        psi.iter().scan(T::zero(), |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
    } else {
        psi
    };

    // drift (or mean) estimation error, treated as in the random walk:
    // h²·Var(d̂) after integration, Var(μ̂) otherwise
    let s2 = fit.innovation_variance;
    let var_mean = s2 / T::of_usize(fit.residuals.len() + p);
    let mut point = Vec::with_capacity(h);
    let mut variance = Vec::with_capacity(h);
    let (mut z_sum, mut psi_sq) = (T::zero(), T::zero());
    for step in 1..=h {
        let zn = (1..=p).map(|i| phi[i - 1] * z[z.len() - i]).sum::<T>();
        z.push(zn);
        let hf = T::of_usize(step);
        let (pt, g) = if integrated {
            z_sum += zn;
            (last + hf * fit.drift + z_sum, hf)
        } else {
            (fit.drift + zn, T::one())
        };
        point.push(pt);
        psi_sq += weights[step - 1] * weights[step - 1];
        let mut v = s2 * psi_sq;
        if fit.spec.include_drift && fit.spec.drift_uncertainty {
            v += g * g * var_mean;
        }
        variance.push(v);
    }
    Ok(TsForecast { point, variance })
}

fn check_horizon(h: usize) -> Result<()> {
    if h == 0 {
        return Err(Error::InvalidArgument("forecast horizon must be at least 1".into()));
    }
    Ok(())
}

fn working_series<T: Scalar>(series: &[T], d: usize) -> Vec<T> {
    if d == 0 {
        series.to_vec()
    } else {
        series.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Step-down (Levinson) recursion: stationary iff every partial
/// autocorrelation lies strictly inside (−1, 1).
pub fn is_stationary<T: Scalar>(phi: &[T]) -> bool {
    let mut a = phi.to_vec();
    while let Some(&r) = a.last() {
        if !(r.abs() < T::one()) {
            return false;
        }
        let k = a.len();
        let denom = T::one() - r * r;
        let prev: Vec<T> = (0..k - 1).map(|i| (a[i] + r * a[k - 2 - i]) / denom).collect();
        a = prev;
    }
    true
}
