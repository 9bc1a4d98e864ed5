//! Out-of-sample evaluation: fit on a training window, forecast through a
//! later test window and score against what was observed.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forecast::ForecastSurface;
use crate::ingest::MortalitySurface;
use crate::lifetable::{e0_path, rates_to_lifetable};
use crate::model::{FittedModel, ModelKind, ModelSettings};
use crate::numerics::Matrix;
use crate::scalar::{mean, sample_variance, Scalar};
use crate::tsforecast::TsSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestConfig<T> {
    /// Inclusive training years.
    pub train: (i32, i32),
    /// Inclusive test years; must start after the training window.
    pub test: (i32, i32),
    pub models: Vec<ModelKind>,
    pub ts_spec: TsSpec,
    /// Interval coverage in percent.
    pub level: T,
    pub settings: ModelSettings<T>,
    /// `(replicates, seed)` for bootstrap FDM intervals; Lee–Carter
    /// intervals stay analytic.
    pub bootstrap: Option<(usize, u64)>,
}

impl<T: Scalar> BacktestConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let ((a, b), (c, d)) = (self.train, self.test);
        if a > b || c > d {
            return Err(Error::InvalidArgument("windows must satisfy start ≤ end".into()));
        }
        if c <= b {
            return Err(Error::InvalidArgument(format!("test window {c}:{d} overlaps or precedes training window {a}:{b}")));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidArgument("no models selected".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelBacktest<T> {
    pub model: ModelKind,
    pub forecast: ForecastSurface<T>,
    /// `ln m_observed − forecast`, ages × test years.
    pub errors: Matrix<T>,
    pub mean_error_by_age: Vec<T>,
    pub sd_error_by_age: Vec<T>,
    pub e0_observed: Vec<T>,
    pub e0_forecast: Vec<T>,
    pub e0_lower: Vec<T>,
    pub e0_upper: Vec<T>,
    /// `e0_forecast − e0_observed`: negative when longevity is underestimated.
    pub e0_errors: Vec<T>,
    pub e0_error_mean: T,
    /// Sample variance (denominator n − 1) of the e0 errors.
    pub e0_error_variance: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport<T> {
    pub train: (i32, i32),
    pub test: (i32, i32),
    pub ages: Vec<i32>,
    pub test_years: Vec<i32>,
    pub level: T,
    pub models: Vec<ModelBacktest<T>>,
}

impl<T: Scalar> BacktestReport<T> {
    pub fn get(&self, kind: ModelKind) -> Option<&ModelBacktest<T>> {
        self.models.iter().find(|m| m.model == kind)
    }
}

/// Models only ever see `surface.slice_window(train)`.
pub fn run_backtest<T: Scalar>(surface: &MortalitySurface<T>, config: &BacktestConfig<T>) -> Result<BacktestReport<T>> {
    config.validate()?;
    if surface.ages().first() != Some(&0) {
        return Err(Error::InvalidArgument("backtest needs ages starting at 0 for life expectancy".into()));
    }
    let train = surface.slice_window(config.train.0, config.train.1)?;
    let test = surface.slice_window(config.test.0, config.test.1)?;
    let horizon = (config.test.1 - config.train.1) as usize;
    let offset = (config.test.0 - config.train.1 - 1) as usize;

    let observed_log = test.log_rates();
    let e0_observed: Vec<T> = (0..test.years().len())
        .map(|c| rates_to_lifetable(test.year_curve(c)).map(|t| t.e0))
        .collect::<Result<_>>()?;

    let models = config
        .models
        .par_iter()
        .map(|&kind| {
            let fitted = FittedModel::fit(kind, &train, &config.settings)?;
            let full = fitted.forecast_with(&config.ts_spec, horizon, config.level, config.bootstrap)?;
            let forecast = restrict(&full, offset);
            score(kind, forecast, &observed_log, &e0_observed)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BacktestReport {
        train: config.train,
        test: config.test,
        ages: surface.ages().to_vec(),
        test_years: test.years().to_vec(),
        level: config.level,
        models,
    })
}

fn restrict<T: Scalar>(f: &ForecastSurface<T>, offset: usize) -> ForecastSurface<T> {
    let to = f.years.len();
    ForecastSurface {
        ages: f.ages.clone(),
        years: f.years[offset..].to_vec(),
        point: f.point.columns_range(offset, to),
        variance: f.variance.columns_range(offset, to),
        lower: f.lower.columns_range(offset, to),
        upper: f.upper.columns_range(offset, to),
        level: f.level,
        interval: f.interval,
    }
}

fn score<T: Scalar>(
    model: ModelKind,
    forecast: ForecastSurface<T>,
    observed_log: &Matrix<T>,
    e0_observed: &[T],
) -> Result<ModelBacktest<T>> {
    let errors = observed_log.zip_map(&forecast.point, |o, f| o - f);
    let (mean_error_by_age, sd_error_by_age) = (0..errors.rows())
        .map(|r| {
            let row = errors.row(r);
            (mean(&row), sample_variance(&row).sqrt())
        })
        .unzip();
    let path = e0_path(&forecast)?;
    let e0_forecast: Vec<T> = path.iter().map(|p| p.point).collect();
    let e0_errors: Vec<T> = e0_forecast.iter().zip(e0_observed).map(|(&f, &o)| f - o).collect();
    Ok(ModelBacktest {
        model,
        errors,
        mean_error_by_age,
        sd_error_by_age,
        e0_lower: path.iter().map(|p| p.lower).collect(),
        e0_upper: path.iter().map(|p| p.upper).collect(),
        e0_error_mean: mean(&e0_errors),
        e0_error_variance: sample_variance(&e0_errors),
        e0_observed: e0_observed.to_vec(),
        e0_forecast,
        e0_errors,
        forecast,
    })
}
