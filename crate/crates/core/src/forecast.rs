use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{normal_quantile, Matrix};
use crate::scalar::Scalar;

/// Log-rate forecasts per (age, horizon) with variance and interval bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSurface<T> {
    pub ages: Vec<i32>,
    /// Calendar year of each horizon `1..=h`.
    pub years: Vec<i32>,
    pub point: Matrix<T>,
    pub variance: Matrix<T>,
    pub lower: Matrix<T>,
    pub upper: Matrix<T>,
    /// Coverage in percent, e.g. 95.
    pub level: T,
    pub interval: IntervalKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    /// `point ± z·√variance`
    Normal,
    /// Empirical quantiles of bootstrap replicates.
    Bootstrap { replicates: usize, seed: u64 },
}

/// `z` such that `point ± z·sd` covers `level` percent under normality.
pub fn interval_multiplier<T: Scalar>(level: T) -> Result<T> {
    let l = level.as_f64();
    if !(l > 0.0 && l < 100.0) {
        return Err(Error::InvalidArgument(format!("interval level {l} not in (0, 100)")));
    }
    normal_quantile(T::of(0.5 + l / 200.0))
}

impl<T: Scalar> ForecastSurface<T> {
    pub fn normal(ages: Vec<i32>, years: Vec<i32>, point: Matrix<T>, variance: Matrix<T>, level: T) -> Result<Self> {
        let z = interval_multiplier(level)?;
        let half = variance.map(|v| z * v.max(T::zero()).sqrt());
        let lower = point.zip_map(&half, |p, w| p - w);
        let upper = point.zip_map(&half, |p, w| p + w);
        Ok(Self { ages, years, point, variance, lower, upper, level, interval: IntervalKind::Normal })
    }

    pub fn horizon(&self) -> usize {
        self.years.len()
    }

    /// Long-format CSV: `age,year,horizon,point,variance,lower,upper`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("age,year,horizon,point,variance,lower,upper\n");
        for (c, &year) in self.years.iter().enumerate() {
            for (r, &age) in self.ages.iter().enumerate() {
                out.push_str(&format!(
                    "{age},{year},{},{},{},{},{}\n",
                    c + 1,
                    self.point[(r, c)],
                    self.variance[(r, c)],
                    self.lower[(r, c)],
                    self.upper[(r, c)]
                ));
            }
        }
        out
    }
}
