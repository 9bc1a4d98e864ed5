use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::MortalitySurface;
use crate::numerics::Matrix;
use crate::scalar::Scalar;

/// Mean error, mean squared error, mean percentage error and mean absolute
/// percentage error, all on the log-rate scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Metrics<T> {
    pub me: T,
    pub mse: T,
    pub mpe: T,
    pub mape: T,
}

impl<T: Scalar> Metrics<T> {
    fn mean_of(items: &[Metrics<T>]) -> Self {
        let n = T::of_usize(items.len().max(1));
        let sum = |f: fn(&Metrics<T>) -> T| items.iter().map(f).sum::<T>() / n;
        Self { me: sum(|m| m.me), mse: sum(|m| m.mse), mpe: sum(|m| m.mpe), mape: sum(|m| m.mape) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport<T> {
    pub ages: Vec<i32>,
    pub years: Vec<i32>,
    pub by_age: Vec<Metrics<T>>,
    pub by_year: Vec<Metrics<T>>,
    /// Mean of the per-age metrics.
    pub avg_across_ages: Metrics<T>,
    /// Mean of the per-year metrics.
    pub avg_across_years: Metrics<T>,
    /// Cells with `ln m = 0`, left out of MPE and MAPE.
    pub excluded_cells: usize,
    pub scale: &'static str,
}

/// Errors `e = ln m − fitted` summarized per age (over years) and per year
/// (over ages).
pub fn error_metrics<T: Scalar>(observed: &MortalitySurface<T>, fitted: &Matrix<T>) -> Result<ErrorReport<T>> {
    let log_m = observed.log_rates();
    if (log_m.rows(), log_m.cols()) != (fitted.rows(), fitted.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "observed is {}×{}, fitted is {}×{}",
            log_m.rows(),
            log_m.cols(),
            fitted.rows(),
            fitted.cols()
        )));
    }
    let (na, ny) = (log_m.rows(), log_m.cols());
    let cell = |r: usize, c: usize| {
        let y = log_m[(r, c)];
        let e = y - fitted[(r, c)];
        let rel = (y != T::zero()).then(|| e / y);
        (e, rel)
    };
    let summarize = |cells: &mut dyn Iterator<Item = (T, Option<T>)>| {
        let (mut n, mut k) = (0usize, 0usize);
        let mut m = Metrics::<T>::default();
        for (e, rel) in cells {
            n += 1;
            m.me += e;
            m.mse += e * e;
            if let Some(p) = rel {
                k += 1;
                m.mpe += p;
                m.mape += p.abs();
            }
        }
        let nf = T::of_usize(n.max(1));
        let kf = T::of_usize(k.max(1));
        Metrics { me: m.me / nf, mse: m.mse / nf, mpe: m.mpe / kf, mape: m.mape / kf }
    };

    let by_age: Vec<Metrics<T>> = (0..na).map(|r| summarize(&mut (0..ny).map(|c| cell(r, c)))).collect();
    let by_year: Vec<Metrics<T>> = (0..ny).map(|c| summarize(&mut (0..na).map(|r| cell(r, c)))).collect();
    let excluded_cells = log_m.as_slice().iter().filter(|&&y| y == T::zero()).count();
    Ok(ErrorReport {
        ages: observed.ages().to_vec(),
        years: observed.years().to_vec(),
        avg_across_ages: Metrics::mean_of(&by_age),
        avg_across_years: Metrics::mean_of(&by_year),
        by_age,
        by_year,
        excluded_cells,
        scale: "log_rate",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Gender;

    #[test]
    fn hand_computed_two_by_two() {
        // ln m ≡ 1, errors e = [[0.1, −0.1], [0.2, 0]] (rows are ages)
        let obs = MortalitySurface::from_log_rates(vec![0, 1], vec![2000, 2001], &Matrix::from_fn(2, 2, |_, _| 1.0), Gender::Male)
            .unwrap();
        let e = [[0.1, -0.1], [0.2, 0.0]];
        let fitted = Matrix::from_fn(2, 2, |r, c| 1.0 - e[r][c]);
        let rep = error_metrics(&obs, &fitted).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(rep.by_age[0].me, 0.0) && close(rep.by_age[1].me, 0.1));
        assert!(close(rep.by_age[0].mse, 0.01) && close(rep.by_age[1].mse, 0.02));
        assert!(close(rep.by_age[0].mape, 0.1) && close(rep.by_age[1].mape, 0.1));
        assert!(close(rep.avg_across_ages.me, rep.avg_across_years.me));
    }

    #[test]
    fn zero_log_rate_cells_are_excluded_from_percentages() {
        let obs =
            MortalitySurface::from_log_rates(vec![0, 1], vec![2000], &Matrix::from_columns(&[vec![0.0_f64, -2.0]]), Gender::Male)
                .unwrap();
        let fitted = Matrix::from_columns(&[vec![0.5, -1.0]]);
        let rep = error_metrics(&obs, &fitted).unwrap();
        assert_eq!(rep.excluded_cells, 1);
        assert!((rep.by_year[0].mpe - 0.5).abs() < 1e-12);
        assert!(error_metrics(&obs, &Matrix::zeros(3, 1)).is_err());
    }
}
