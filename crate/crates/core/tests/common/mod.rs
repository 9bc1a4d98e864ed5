#![allow(dead_code)]

use mortality::ingest::{Gender, MortalitySurface};
use mortality::numerics::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Gompertz-like age schedule with an infant bump, in log-rate units.
pub fn age_level(x: i32) -> f64 {
    let x = f64::from(x);
    -9.5 + 0.085 * x + 3.5 * (-x / 2.0).exp()
}

/// Age sensitivity summing to 1 over `ages`.
pub fn age_sensitivity(ages: &[i32]) -> Vec<f64> {
    let raw: Vec<f64> = ages.iter().map(|&x| 1.5 + (-(f64::from(x) - 20.0).powi(2) / 900.0).exp()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|b| b / s).collect()
}

/// Exact rank-one log surface `a + b kᵀ` with Σb = 1 and Σk = 0.
pub fn rank_one(ages: &[i32], years: &[i32], drift: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>, Matrix<f64>) {
    let a: Vec<f64> = ages.iter().map(|&x| age_level(x)).collect();
    let b = age_sensitivity(ages);
    let n = years.len() as f64;
    let k: Vec<f64> = (0..years.len()).map(|t| drift * (t as f64 - (n - 1.0) / 2.0) + 0.3 * (t as f64 * 1.7).sin()).collect();
    let km = k.iter().sum::<f64>() / n;
    let k: Vec<f64> = k.iter().map(|v| v - km).collect();
    let m = Matrix::from_fn(ages.len(), years.len(), |r, c| a[r] + b[r] * k[c]);
    (a, b, k, m)
}

/// Mortality-like surface: rank-one trend, a second smooth component and
/// Gaussian noise with age-dependent spread.
pub fn noisy_surface(ages: &[i32], years: &[i32], noise: f64, seed: u64) -> MortalitySurface<f64> {
    let (_, _, _, base) = rank_one(ages, years, -1.2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = years.len() as f64;
    let m = Matrix::from_fn(ages.len(), years.len(), |r, c| {
        let x = f64::from(ages[r]);
        let t = c as f64 / n;
        let second = 0.15 * (x / 15.0).sin() * (t * 3.0).cos();
        let spread = noise * (1.0 + (x / 40.0).powi(2));
        let z: f64 = rng.sample(StandardNormal);
        base[(r, c)] + second + spread * z
    });
    MortalitySurface::from_log_rates(ages.to_vec(), years.to_vec(), &m, Gender::Male).unwrap()
}

pub fn range(a: i32, b: i32) -> Vec<i32> {
    (a..=b).collect()
}

/// HMD-style text block for the given ages and years.
pub fn hmd_text(ages: &[i32], years: &[i32], rate: impl Fn(i32, i32) -> (f64, f64)) -> String {
    let mut s = String::from("Italy, Death rates (period 1x1)\tLast modified: 01 Jan 2020;  Methods Protocol: v6 (2017)\n\n");
    s.push_str("  Year          Age             Female            Male           Total\n");
    for &y in years {
        for &a in ages {
            let (f, m) = rate(a, y);
            let age = if a == 110 { "110+".to_string() } else { a.to_string() };
            s.push_str(&format!("  {y}          {age:<6}        {f:.6}        {m:.6}        {:.6}\n", 0.5 * (f + m)));
        }
    }
    s
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
