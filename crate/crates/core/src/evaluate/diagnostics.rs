//! Residual tests: one-sample t test for zero mean and the Shapiro–Wilk
//! normality test (Royston's approximation).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, normal_quantile, student_t_two_sided};
use crate::scalar::Scalar;

/// Largest sample the normality test accepts.
pub const SHAPIRO_MAX_N: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sided one-sample t test of a zero mean.
pub fn t_test_zero_mean<T: Scalar>(residuals: &[T]) -> Result<TestResult> {
    let n = residuals.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let xs: Vec<f64> = residuals.iter().map(|x| x.as_f64()).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Ok(if mean == 0.0 {
            TestResult { statistic: 0.0, p_value: 1.0 }
        } else {
            TestResult { statistic: mean.signum() * f64::INFINITY, p_value: 0.0 }
        });
    }
    let t = mean / (var / n as f64).sqrt();
    Ok(TestResult { statistic: t, p_value: student_t_two_sided(t, (n - 1) as f64) })
}

/// Shapiro–Wilk W with Royston's p-value approximation, `3 ≤ n ≤ 5000`.
pub fn normality_test<T: Scalar>(residuals: &[T]) -> Result<TestResult> {
    let n = residuals.len();
    if !(3..=SHAPIRO_MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!("Shapiro–Wilk needs 3 ≤ n ≤ {SHAPIRO_MAX_N}, got {n}")));
    }
    let mut x: Vec<f64> = residuals.iter().map(|v| v.as_f64()).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("normality test sample"));
    }
    x.sort_by(f64::total_cmp);
    if x[n - 1] - x[0] < 1e-19 * x[n - 1].abs().max(1.0) {
        return Err(Error::Degenerate("all observations identical"));
    }

    let a = swilk_coefficients(n);
    let mean = x.iter().sum::<f64>() / n as f64;
    let ssq: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let num: f64 = a.iter().enumerate().map(|(i, ai)| ai * (x[n - 1 - i] - x[i])).sum();
    let w = (num * num / ssq).min(1.0);
    Ok(TestResult { statistic: w, p_value: swilk_p_value(w, n) })
}

/// Every `k`-th value with `k` the smallest stride leaving at most
/// [`SHAPIRO_MAX_N`] values.
pub fn thin_for_normality<T: Copy>(xs: &[T]) -> Vec<T> {
    let stride = xs.len().div_ceil(SHAPIRO_MAX_N).max(1);
    xs.iter().step_by(stride).copied().collect()
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Antisymmetric weights `a_1..a_{n/2}` for the largest-minus-smallest pairs.
fn swilk_coefficients(n: usize) -> Vec<f64> {
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
    let half = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let an25 = n as f64 + 0.25;
    let m: Vec<f64> = (1..=half)
        .map(|i| normal_quantile((i as f64 - 0.375) / an25).expect("probability inside (0, 1)"))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; half];
    a[0] = a1;
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0].powi(2) - 2.0 * m[1].powi(2)) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
        (2, fac)
    } else {
        (1, ((summ2 - 2.0 * m[0].powi(2)) / (1.0 - 2.0 * a1 * a1)).sqrt())
    };
    for i in first..half {
        a[i] = -m[i] / fac;
    }
    a
}

fn swilk_p_value(w: f64, n: usize) -> f64 {
    const G: [f64; 2] = [-2.273, 0.459];
    const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];

    let an = n as f64;
    if n == 3 {
        let pi6 = 6.0 / std::f64::consts::PI;
        let stqr = std::f64::consts::FRAC_PI_3;
        return (pi6 * (w.sqrt().asin() - stqr)).clamp(0.0, 1.0);
    }
    let mut y = (1.0 - w).ln();
    let (mean, sd) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let xx = an.ln();
        (poly(&C5, xx), poly(&C6, xx).exp())
    };
    1.0 - normal_cdf((y - mean) / sd)
}

/// Zero-mean and normality tests on residuals standardized by their
/// overall standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualDiagnostics {
    pub t_test: TestResult,
    pub normality: TestResult,
    /// Observations fed to the normality test after thinning.
    pub normality_sample_size: usize,
}

pub fn residual_diagnostics<T: Scalar>(residuals: &[T]) -> Result<ResidualDiagnostics> {
    let standardized = crate::leecarter::standardize(residuals);
    let t_test = t_test_zero_mean(&standardized)?;
    let sample = thin_for_normality(&standardized);
    let normality = normality_test(&sample)?;
    Ok(ResidualDiagnostics { t_test, normality, normality_sample_size: sample.len() })
}
