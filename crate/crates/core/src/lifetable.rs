//! Period life tables from single-year central death rates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forecast::ForecastSurface;
use crate::scalar::Scalar;

/// Conversion from central rate `m` to death probability `q`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QxRule {
    /// `q = 1 − e^{−m}`, exact under a constant hazard within the year.
    #[default]
    ConstantHazard,
    /// `q = m / (1 + m/2)`, capped at 1.
    Actuarial,
}

impl QxRule {
    fn apply<T: Scalar>(self, m: T) -> T {
        match self {
            QxRule::ConstantHazard => T::one() - (-m).exp(),
            QxRule::Actuarial => (m / (T::one() + T::of(0.5) * m)).min(T::one()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifeTable<T> {
    pub ages: Vec<i32>,
    pub mx: Vec<T>,
    pub qx: Vec<T>,
    pub lx: Vec<T>,
    pub dx: Vec<T>,
    /// Person-years lived in each interval (`L_x`).
    pub person_years: Vec<T>,
    /// Life expectancy at birth in years.
    pub e0: T,
}

impl<T: Scalar> LifeTable<T> {
    /// `age,qx,lx,Lx` rows followed by a summary `e0,<value>` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("age,qx,lx,Lx\n");
        for i in 0..self.ages.len() {
            out.push_str(&format!("{},{},{},{}\n", self.ages[i], self.qx[i], self.lx[i], self.person_years[i]));
        }
        out.push_str(&format!("e0,{}\n", self.e0));
        out
    }
}

/// Life table for ages `0..=A` with an open-ended last age group.
pub fn rates_to_lifetable<T: Scalar>(mx: &[T]) -> Result<LifeTable<T>> {
    rates_to_lifetable_with(mx, QxRule::default())
}

pub fn rates_to_lifetable_with<T: Scalar>(mx: &[T], rule: QxRule) -> Result<LifeTable<T>> {
    if mx.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = mx.iter().position(|&m| !(m > T::zero()) || !m.is_finite()) {
        return Err(Error::InvalidArgument(format!("death rate at age {i} must be finite and positive")));
    }
    let n = mx.len();
    let half = T::of(0.5);
    let mut qx = Vec::with_capacity(n);
    let mut lx = Vec::with_capacity(n);
    let mut dx = Vec::with_capacity(n);
    let mut big_l = Vec::with_capacity(n);
    let mut l = T::one();
    for (x, &m) in mx.iter().enumerate() {
        lx.push(l);
        if x + 1 < n {
            let q = rule.apply(m);
            let d = l * q;
            qx.push(q);
            dx.push(d);
            big_l.push(l - half * d);
            l -= d;
        } else {
            qx.push(T::one());
            dx.push(l);
            big_l.push(l / m);
        }
    }
    let e0 = big_l.iter().copied().sum();
    Ok(LifeTable { ages: (0..n as i32).collect(), mx: mx.to_vec(), qx, lx, dx, person_years: big_l, e0 })
}

/// Life expectancy at birth per forecast horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct E0Point<T> {
    pub year: i32,
    pub point: T,
    pub lower: T,
    pub upper: T,
}

/// Pointwise envelope: the upper mortality bound gives the lower e0 bound
/// and vice versa. Not a joint interval.
pub fn e0_path<T: Scalar>(forecast: &ForecastSurface<T>) -> Result<Vec<E0Point<T>>> {
    let ages = &forecast.ages;
    if ages.first() != Some(&0) || ages.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::InvalidArgument("forecast must cover ages 0..A contiguously".into()));
    }
    let e0 = |col: &[T]| -> Result<T> {
        let mx: Vec<T> = col.iter().map(|&v| v.exp()).collect();
        Ok(rates_to_lifetable(&mx)?.e0)
    };
    forecast
        .years
        .iter()
        .enumerate()
        .map(|(c, &year)| {
            Ok(E0Point {
                year,
                point: e0(forecast.point.col(c))?,
                lower: e0(forecast.upper.col(c))?,
                upper: e0(forecast.lower.col(c))?,
            })
        })
        .collect()
}
