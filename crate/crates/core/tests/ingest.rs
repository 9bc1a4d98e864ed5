mod common;

use common::{hmd_text, range};
use mortality::ingest::{build_surface, parse_hmd_rates, Gender, MortalitySurface};
use mortality::Error;
use proptest::prelude::*;

fn rate(a: i32, y: i32) -> (f64, f64) {
    let base = (-9.0 + 0.08 * f64::from(a) - 0.01 * f64::from(y - 1950)).exp();
    (base * 0.8, base)
}

#[test]
fn full_hmd_file_yields_one_record_per_line() {
    let years = range(1950, 2006);
    let ages = range(0, 110);
    let text = hmd_text(&ages, &years, rate);
    // independent count: data lines are those whose first token is a year
    let lines = text.lines().filter(|l| l.split_whitespace().next().is_some_and(|t| t.parse::<i32>().is_ok())).count();
    let records = parse_hmd_rates(&text).unwrap();
    assert_eq!(lines, 6327);
    assert_eq!(records.len(), 6327);
    assert!(records.iter().any(|r| r.age == 110 && r.year == 2006));
}

#[test]
fn ages_above_window_are_dropped_when_building() {
    let years = range(1950, 2006);
    let text = hmd_text(&range(0, 110), &years, rate);
    let records = parse_hmd_rates(&text).unwrap();
    let s: MortalitySurface<f64> = build_surface(&records, Gender::Male, 0, 100, 1950, 2006).unwrap();
    assert_eq!((s.ages().len(), s.years().len()), (101, 57));
    let sliced = s.slice_window(1950, 1975).unwrap();
    assert_eq!((sliced.ages().len(), sliced.years().len()), (101, 26));
    assert_eq!(s.slice_window(1950, 2006).unwrap(), s);
    assert_eq!(s.slice_window(1990, 1990).unwrap().years(), &[1990]);
    assert!(matches!(s.slice_window(1949, 1960), Err(Error::WindowOutOfRange { .. })));
}

#[test]
fn absent_year_is_listed() {
    let years: Vec<i32> = range(1950, 1960).into_iter().filter(|&y| y != 1955).collect();
    let records = parse_hmd_rates(&hmd_text(&range(0, 5), &years, rate)).unwrap();
    let err = build_surface::<f64>(&records, Gender::Female, 0, 5, 1950, 1960).unwrap_err();
    match &err {
        Error::MissingCells(cells) => {
            assert_eq!(cells.len(), 6);
            assert!(cells.iter().all(|&(_, y)| y == 1955));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("1955"));
}

#[test]
fn zero_rate_is_replaced_by_half_the_age_minimum() {
    let text = hmd_text(&range(0, 10), &range(1995, 2002), |a, y| {
        let (f, m) = rate(a, y);
        if (a, y) == (8, 1999) {
            (f, 0.0)
        } else {
            (f, m)
        }
    });
    let records = parse_hmd_rates(&text).unwrap();
    let s: MortalitySurface<f64> = build_surface(&records, Gender::Male, 0, 10, 1995, 2002).unwrap();
    // brute-force scan for the smallest positive male rate at age 8
    let min = records.iter().filter(|r| r.age == 8).filter_map(|r| r.male).filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min);
    assert_eq!(s.rate(8, 1999).unwrap(), 0.5 * min);
}

#[test]
fn missing_marker_and_open_age_parse() {
    let recs = parse_hmd_rates("Year Age Female Male Total\n2005  110+  0.5  .  0.5\n1950  0  0.064277  0.081958  0.073345\n").unwrap();
    assert_eq!((recs[0].year, recs[0].age, recs[0].male), (2005, 110, None));
    assert_eq!(recs[1].rate(Gender::Total), Some(0.073345));
    let err = parse_hmd_rates("Year Age Female Male Total\n1950 0 0.1 0.2\n").unwrap_err();
    assert!(err.to_string().contains("line 2"));
    assert!(matches!(parse_hmd_rates("  \n"), Err(Error::EmptyInput)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn serialise_and_reparse_is_exact(seed in any::<u64>(), na in 1usize..12, ny in 1usize..8) {
        let s = common::noisy_surface(&range(0, na as i32 - 1), &range(1980, 1980 + ny as i32 - 1), 0.1, seed);
        let back = MortalitySurface::<f64>::from_csv(&s.to_csv(), Gender::Male).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn building_a_window_equals_slicing_the_whole(lo in 1950i32..1970, len in 0i32..10, zero_age in 0i32..6) {
        let text = hmd_text(&range(0, 5), &range(1950, 1980), |a, y| {
            let (f, m) = rate(a, y);
            if a == zero_age && y % 7 == 0 { (0.0, 0.0) } else { (f, m) }
        });
        let records = parse_hmd_rates(&text).unwrap();
        let all: MortalitySurface<f64> = build_surface(&records, Gender::Female, 0, 5, 1950, 1980).unwrap();
        let part: MortalitySurface<f64> = build_surface(&records, Gender::Female, 0, 5, lo, lo + len).unwrap();
        prop_assert_eq!(part, all.slice_window(lo, lo + len).unwrap());
    }
}
