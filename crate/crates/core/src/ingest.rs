//! Human Mortality Database 1×1 death-rate files and the validated
//! age × year surfaces built from them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
    Total,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::Male => "male",
            Gender::Female => "female",
            Gender::Total => "total",
        })
    }
}

impl FromStr for Gender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "male" | "m" => Ok(Gender::Male),
            "female" | "f" => Ok(Gender::Female),
            "total" | "t" => Ok(Gender::Total),
            other => Err(Error::InvalidArgument(format!("unknown gender {other:?}"))),
        }
    }
}

/// One row of an HMD `Mx_1x1` file. `None` marks a missing (`.`) value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmdRecord {
    pub year: i32,
    pub age: i32,
    pub female: Option<f64>,
    pub male: Option<f64>,
    pub total: Option<f64>,
}

impl HmdRecord {
    pub fn rate(&self, gender: Gender) -> Option<f64> {
        match gender {
            Gender::Male => self.male,
            Gender::Female => self.female,
            Gender::Total => self.total,
        }
    }
}

/// Parses the `Year Age Female Male Total` layout. Leading lines up to and
/// including the column header are skipped; without a header, leading lines
/// that do not start with a year are treated as the header block.
pub fn parse_hmd_rates(text: &str) -> Result<Vec<HmdRecord>> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.iter().all(|l| l.trim().is_empty()) {
        return Err(Error::EmptyInput);
    }
    let start = match lines
        .iter()
        .position(|l| l.split_whitespace().next().is_some_and(|t| t.eq_ignore_ascii_case("year")))
    {
        Some(header) => header + 1,
        None => lines
            .iter()
            .position(|l| l.split_whitespace().next().is_some_and(|t| t.parse::<i32>().is_ok()))
            .ok_or(Error::EmptyInput)?,
    };

    let mut records = Vec::with_capacity(lines.len() - start);
    for (idx, line) in lines.iter().enumerate().skip(start) {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 5 columns (Year Age Female Male Total), found {}", fields.len()),
            });
        }
        let year = fields[0].parse::<i32>().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("unparsable year {:?}", fields[0]),
        })?;
        let age = fields[1].trim_end_matches('+').parse::<i32>().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("unparsable age {:?}", fields[1]),
        })?;
        let rate = |s: &str| -> Result<Option<f64>> {
            if s == "." {
                return Ok(None);
            }
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
                _ => Err(Error::Parse { line: lineno, message: format!("unparsable rate {s:?}") }),
            }
        };
        records.push(HmdRecord {
            year,
            age,
            female: rate(fields[2])?,
            male: rate(fields[3])?,
            total: rate(fields[4])?,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(records)
}

/// Central death rates on a contiguous age × year grid, stored with each
/// year's age curve contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct MortalitySurface<T> {
    ages: Vec<i32>,
    years: Vec<i32>,
    rates: Matrix<T>,
    gender: Gender,
}

impl<T: Scalar> MortalitySurface<T> {
    /// Validates contiguity and strict positivity of every rate.
    pub fn new(ages: Vec<i32>, years: Vec<i32>, rates: Matrix<T>, gender: Gender) -> Result<Self> {
        check_contiguous(&ages, "ages")?;
        check_contiguous(&years, "years")?;
        if rates.rows() != ages.len() || rates.cols() != years.len() {
            return Err(Error::DimensionMismatch(format!(
                "rates are {}×{}, expected {}×{}",
                rates.rows(),
                rates.cols(),
                ages.len(),
                years.len()
            )));
        }
        if let Some(pos) = rates.as_slice().iter().position(|&m| !(m > T::zero()) || !m.is_finite()) {
            let (r, c) = (pos % ages.len(), pos / ages.len());
            return Err(Error::InvalidArgument(format!(
                "rate at age {}, year {} must be finite and positive",
                ages[r], years[c]
            )));
        }
        Ok(Self { ages, years, rates, gender })
    }

    /// Surface with `ln m = log_rates`.
    pub fn from_log_rates(ages: Vec<i32>, years: Vec<i32>, log_rates: &Matrix<T>, gender: Gender) -> Result<Self> {
        Self::new(ages, years, log_rates.map(T::exp), gender)
    }

    pub fn ages(&self) -> &[i32] {
        &self.ages
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn rates(&self) -> &Matrix<T> {
        &self.rates
    }

    pub fn gender(&self) -> Gender {
        self.gender
    }

    pub fn log_rates(&self) -> Matrix<T> {
        self.rates.map(T::ln)
    }

    /// Age curve of one year, by column index.
    pub fn year_curve(&self, col: usize) -> &[T] {
        self.rates.col(col)
    }

    pub fn rate(&self, age: i32, year: i32) -> Option<T> {
        let r = usize::try_from(age - *self.ages.first()?).ok()?;
        let c = usize::try_from(year - *self.years.first()?).ok()?;
        (r < self.ages.len() && c < self.years.len()).then(|| self.rates[(r, c)])
    }

    pub fn slice_window(&self, year_min: i32, year_max: i32) -> Result<Self> {
        let (first, last) = (self.years[0], self.years[self.years.len() - 1]);
        if year_min > year_max || year_min < first || year_max > last {
            return Err(Error::WindowOutOfRange { from: year_min, to: year_max, min: first, max: last });
        }
        let from = (year_min - first) as usize;
        let to = (year_max - first) as usize + 1;
        Ok(Self {
            ages: self.ages.clone(),
            years: self.years[from..to].to_vec(),
            rates: self.rates.columns_range(from, to),
            gender: self.gender,
        })
    }

    /// CSV with header `age,year,rate`, one row per cell, year-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("age,year,rate\n");
        for (c, &year) in self.years.iter().enumerate() {
            for (r, &age) in self.ages.iter().enumerate() {
                out.push_str(&format!("{age},{year},{}\n", format_rate(self.rates[(r, c)].as_f64())));
            }
        }
        out
    }

    pub fn from_csv(text: &str, gender: Gender) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "age,year,rate" => {}
            Some((i, h)) => {
                return Err(Error::Parse { line: i + 1, message: format!("expected header age,year,rate, got {h:?}") })
            }
            None => return Err(Error::EmptyInput),
        }
        let mut cells = HashMap::new();
        for (i, line) in lines {
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |what: &str| Error::Parse { line: i + 1, message: format!("unparsable {what} in {line:?}") };
            if parts.len() != 3 {
                return Err(Error::Parse { line: i + 1, message: format!("expected 3 fields, found {}", parts.len()) });
            }
            let age: i32 = parts[0].parse().map_err(|_| bad("age"))?;
            let year: i32 = parts[1].parse().map_err(|_| bad("year"))?;
            let rate: f64 = parts[2].parse().map_err(|_| bad("rate"))?;
            cells.insert((age, year), rate);
        }
        if cells.is_empty() {
            return Err(Error::EmptyInput);
        }
        let ages = span(cells.keys().map(|k| k.0));
        let years = span(cells.keys().map(|k| k.1));
        let mut missing = Vec::new();
        let rates = Matrix::from_fn(ages.len(), years.len(), |r, c| match cells.get(&(ages[r], years[c])) {
            Some(&v) => T::of(v),
            None => {
                missing.push((ages[r], years[c]));
                T::zero()
            }
        });
        if !missing.is_empty() {
            return Err(Error::MissingCells(missing));
        }
        Self::new(ages, years, rates, gender)
    }
}

fn span(values: impl Iterator<Item = i32> + Clone) -> Vec<i32> {
    let lo = values.clone().min().unwrap_or(0);
    let hi = values.max().unwrap_or(-1);
    (lo..=hi).collect()
}

fn check_contiguous(xs: &[i32], what: &str) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} must not be empty")));
    }
    if xs.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::InvalidArgument(format!("{what} must increase by exactly 1")));
    }
    Ok(())
}

/// Shortest round-tripping representation, padded to at least six
/// significant digits.
pub fn format_rate(v: f64) -> String {
    let shortest = format!("{v:e}");
    let mantissa = shortest.split('e').next().unwrap_or("");
    let digits = mantissa.chars().filter(char::is_ascii_digit).count();
    if digits >= 6 {
        shortest
    } else {
        format!("{v:.5e}")
    }
}

/// Restricts records to one gender on `[age_min, age_max] × [year_min, year_max]`.
///
/// Zero or missing rates are replaced by half the smallest positive rate
/// recorded at the same age over every year present in `records`.
pub fn build_surface<T: Scalar>(
    records: &[HmdRecord],
    gender: Gender,
    age_min: i32,
    age_max: i32,
    year_min: i32,
    year_max: i32,
) -> Result<MortalitySurface<T>> {
    if age_min > age_max || year_min > year_max {
        return Err(Error::InvalidArgument(format!(
            "empty window ages {age_min}:{age_max}, years {year_min}:{year_max}"
        )));
    }
    let mut cells: HashMap<(i32, i32), Option<f64>> = HashMap::with_capacity(records.len());
    let mut min_positive: HashMap<i32, f64> = HashMap::new();
    for rec in records {
        let rate = rec.rate(gender);
        cells.insert((rec.age, rec.year), rate);
        if let Some(v) = rate.filter(|&v| v > 0.0) {
            min_positive.entry(rec.age).and_modify(|m| *m = m.min(v)).or_insert(v);
        }
    }

    let ages: Vec<i32> = (age_min..=age_max).collect();
    let years: Vec<i32> = (year_min..=year_max).collect();
    let missing: Vec<(i32, i32)> = years
        .iter()
        .flat_map(|&y| ages.iter().map(move |&a| (a, y)))
        .filter(|k| !cells.contains_key(k))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingCells(missing));
    }

    let mut data = Vec::with_capacity(ages.len() * years.len());
    for &year in &years {
        for &age in &ages {
            let v = match cells[&(age, year)] {
                Some(v) if v > 0.0 => v,
                _ => 0.5 * *min_positive.get(&age).ok_or(Error::NoPositiveRate(age))?,
            };
            data.push(T::of(v));
        }
    }
    let rates = Matrix::from_col_major(ages.len(), years.len(), data);
    MortalitySurface::new(ages, years, rates, gender)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "Italy, Death rates (period 1x1)    Last modified: 01 Jan 2010
   
  Year          Age             Female            Male           Total
  1950            0           0.064277        0.081958        0.073345
  1950            1           0.010000        0.012000        0.011000
  1951            0           0.060000        0.075000        0.068000
  1951            1           0.000000        0.011000        0.005500
  2005          110+          0.5             .               0.5
";

    #[test]
    fn parses_header_and_rows() {
        let recs = parse_hmd_rates(SAMPLE).unwrap();
        assert_eq!(recs.len(), 5);
        assert_eq!(
            recs[0],
            HmdRecord { year: 1950, age: 0, female: Some(0.064277), male: Some(0.081958), total: Some(0.073345) }
        );
        let last = recs[4];
        assert_eq!((last.year, last.age, last.male, last.female), (2005, 110, None, Some(0.5)));
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let bad = "Year Age Female Male Total\n1950 0 0.1 0.2\n";
        assert_eq!(parse_hmd_rates(bad).unwrap_err(), Error::Parse {
            line: 2,
            message: "expected 5 columns (Year Age Female Male Total), found 4".into()
        });
        let bad = "Year Age Female Male Total\n1950 0 0.1 0.2 0.3\n1950 1 0.1 abc 0.3\n";
        assert!(matches!(parse_hmd_rates(bad), Err(Error::Parse { line: 3, .. })));
        assert_eq!(parse_hmd_rates("  \n\n"), Err(Error::EmptyInput));
        assert_eq!(parse_hmd_rates(""), Err(Error::EmptyInput));
    }

    #[test]
    fn zero_rate_is_repaired_from_same_age() {
        let recs = parse_hmd_rates(SAMPLE).unwrap();
        let s: MortalitySurface<f64> = build_surface(&recs, Gender::Female, 0, 1, 1950, 1951).unwrap();
        assert_eq!(s.rate(1, 1951), Some(0.5 * 0.01));
        assert_eq!(s.rate(0, 1950), Some(0.064277));
    }

    #[test]
    fn absent_year_is_listed() {
        let recs = parse_hmd_rates(SAMPLE).unwrap();
        let err = build_surface::<f64>(&recs, Gender::Male, 0, 1, 1950, 1952).unwrap_err();
        assert_eq!(err, Error::MissingCells(vec![(0, 1952), (1, 1952)]));
        assert!(err.to_string().contains("year 1952"));
    }

    #[test]
    fn slicing() {
        let recs = parse_hmd_rates(SAMPLE).unwrap();
        let s: MortalitySurface<f64> = build_surface(&recs, Gender::Male, 0, 1, 1950, 1951).unwrap();
        assert_eq!(s.slice_window(1950, 1951).unwrap(), s);
        let one = s.slice_window(1951, 1951).unwrap();
        assert_eq!((one.ages().len(), one.years()), (2, &[1951][..]));
        assert!(matches!(s.slice_window(1949, 1951), Err(Error::WindowOutOfRange { .. })));
        assert!(s.slice_window(1951, 1950).is_err());
    }

    #[test]
    fn rate_formatting_keeps_six_digits_and_round_trips() {
        assert_eq!(format_rate(0.5), "5.00000e-1");
        for v in [0.064277, 1.0 / 3.0, 1e-7, 0.5, 123.456789012] {
            let s = format_rate(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mant = s.split('e').next().unwrap();
            assert!(mant.chars().filter(char::is_ascii_digit).count() >= 6, "{s}");
        }
    }

    #[test]
    fn gender_parsing() {
        assert_eq!("Female".parse::<Gender>().unwrap(), Gender::Female);
        assert!("x".parse::<Gender>().is_err());
    }
}
