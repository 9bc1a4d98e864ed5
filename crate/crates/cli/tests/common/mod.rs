#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Log death rate with an infant bump, an accident hump and a Gompertz
/// slope, improving over time faster at young ages.
fn log_rate(age: i32, year: i32, female: bool) -> f64 {
    let x = f64::from(age);
    let t = f64::from(year - 1950);
    let shift = if female { -0.45 } else { 0.0 };
    let hump = if female { 0.15 } else { 0.6 } * (-((x - 22.0) / 6.0).powi(2)).exp();
    let level = (-9.6 + 0.088 * x + 3.8 * (-x / 1.5).exp() + hump).min(-0.3) + shift;
    let improvement = 0.035 * (-x / 30.0).exp() + 0.009;
    level - improvement * t + 0.03 * (t / 4.0).sin() * (-x / 50.0).exp()
}

/// Italy-shaped HMD `Mx_1x1` text for ages 0..=110 and `years`.
pub fn synthetic_hmd(years: std::ops::RangeInclusive<i32>, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("Italy, Death rates (period 1x1)\tLast modified: 01 Jan 2020\n\n");
    s.push_str("  Year          Age             Female            Male           Total\n");
    for y in years {
        for a in 0..=110 {
            let noise = 0.04 * (1.0 + (f64::from(a) / 60.0).powi(2));
            let f = (log_rate(a, y, true) + noise * rng.random_range(-1.0..1.0)).exp().min(1.5);
            let m = (log_rate(a, y, false) + noise * rng.random_range(-1.0..1.0)).exp().min(1.5);
            let age = if a == 110 { "110+".to_string() } else { a.to_string() };
            s.push_str(&format!("  {y}          {age:<6}        {f:.6}        {m:.6}        {:.6}\n", 0.5 * (f + m)));
        }
    }
    s
}

/// Writes the 1950–2006 fixture as `Mx_1x1.txt` in `dir`.
pub fn write_fixture(dir: &Path) -> PathBuf {
    let path = dir.join("Mx_1x1.txt");
    std::fs::write(&path, synthetic_hmd(1950..=2006, 11)).unwrap();
    path
}

pub fn mortality(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mortality"))
        .args(args)
        .env_remove("MORTALITY_DATA_DIR")
        .output()
        .expect("binary runs")
}

/// Every file under `dir` with its bytes, sorted by name.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}
