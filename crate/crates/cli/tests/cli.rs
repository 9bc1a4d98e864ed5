mod common;

use common::{mortality, snapshot, write_fixture};
use mortality_cli::chart::to_svg;
use mortality_cli::{LineChart, Series};

fn stderr(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_data_file_exits_2_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere").join("Mx_1x1.txt");
    let out = dir.path().join("out");
    let o = mortality(&["fit", "--data", missing.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(missing.to_str().unwrap()), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unparsable_file_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("Mx_1x1.txt");
    std::fs::write(&path, "  Year  Age  Female  Male  Total\n  1950  0  0.05  0.06  0.055\n  1950  1  abc  0.01  0.01\n").unwrap();
    let o = mortality(&["fit", "--data", path.to_str().unwrap(), "--ages", "0:1", "--output", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Mx_1x1.txt") && stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn directory_data_path_resolves_and_env_var_is_the_default() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let out = dir.path().join("out");
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_mortality"))
        .args(["lifetable", "--years", "2000:2001", "--output", out.to_str().unwrap()])
        .env("MORTALITY_DATA_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let e0 = std::fs::read_to_string(out.join("e0.csv")).unwrap();
    assert_eq!(e0.lines().count(), 3);
    assert!(e0.starts_with("year,e0\n2000,"));
}

#[test]
fn overlapping_windows_are_rejected_before_reading_data() {
    let dir = tempfile::tempdir().unwrap();
    // the data path does not exist: a window error must win
    let o = mortality(&[
        "backtest",
        "--data",
        dir.path().join("absent").to_str().unwrap(),
        "--train",
        "1950:1980",
        "--test",
        "1975:2000",
        "--output",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("overlaps"), "{}", stderr(&o));
}

#[test]
fn bad_flag_values_exit_2() {
    for args in [
        vec!["fit", "--data", "x", "--model", "xyz"],
        vec!["forecast", "--data", "x", "--level", "99.95"],
        vec!["backtest", "--data", "x", "--train", "1975:1950"],
        vec!["fit", "--data", "x", "--ts", "ar:1"],
    ] {
        let o = mortality(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn fit_writes_parameters_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fixture(dir.path());
    let out = dir.path().join("lc");
    let o = mortality(&["fit", "--data", data.to_str().unwrap(), "--model", "lc", "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let alpha = std::fs::read_to_string(out.join("alpha.csv")).unwrap();
    assert!(alpha.starts_with("age,value\n0,"));
    assert_eq!(alpha.lines().count(), 102);
    let kappa = std::fs::read_to_string(out.join("kappa.csv")).unwrap();
    assert_eq!(kappa.lines().count(), 58);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["data"]["years"], "1950:2006");
    let ev = summary["fit"]["explained"][0].as_f64().unwrap();
    assert!(ev > 0.5 && ev <= 1.0);
    assert!(summary["fit"]["residual_diagnostics"]["t_test"]["p_value"].as_f64().unwrap() > 0.99);
    let table1 = std::fs::read_to_string(out.join("table1.csv")).unwrap();
    assert!(table1.starts_with("model,aggregation,me,mse,mpe,mape\nlc,across_ages,"));
    for f in ["alpha.svg", "beta.svg", "kappa.svg", "diagnostics.csv", "explained.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }

    let out = dir.path().join("fdm");
    let o = mortality(&["fit", "--data", data.to_str().unwrap(), "--model", "fdm", "-K", "3", "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let phi = std::fs::read_to_string(out.join("phi.csv")).unwrap();
    assert!(phi.starts_with("age,phi1,phi2,phi3\n"));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["fit"]["explained"].as_array().unwrap().len(), 3);
}

#[test]
fn format_flag_limits_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fixture(dir.path());
    let out = dir.path().join("o");
    let o = mortality(&["fit", "--data", data.to_str().unwrap(), "--format", "json", "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let names: Vec<String> = snapshot(&out).into_iter().map(|f| f.0).collect();
    assert_eq!(names, vec!["summary.json".to_string()]);
}

#[test]
fn monotone_age_outside_window_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fixture(dir.path());
    let o = mortality(&[
        "fit",
        "--data",
        data.to_str().unwrap(),
        "--model",
        "lcs",
        "--ages",
        "0:50",
        "--output",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--monotone-from"));
}

#[test]
fn forecast_and_compare_produce_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fixture(dir.path());
    let out = dir.path().join("fc");
    let o = mortality(&["forecast", "--data", data.to_str().unwrap(), "--model", "lc", "--horizon", "5", "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fc = std::fs::read_to_string(out.join("forecast.csv")).unwrap();
    assert_eq!(fc.lines().count(), 1 + 101 * 5);
    let e0 = std::fs::read_to_string(out.join("e0.csv")).unwrap();
    assert!(e0.starts_with("year,point,lower,upper\n2007,"));

    let o = mortality(&["forecast", "--data", data.to_str().unwrap(), "--model", "lc", "--bootstrap", "200", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let out = dir.path().join("cmp");
    let o = mortality(&["compare", "--data", data.to_str().unwrap(), "--years", "1950:1990", "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = std::fs::read_to_string(out.join("table1.csv")).unwrap();
    assert_eq!(t.lines().count(), 7);
    let mse = |model: &str| -> f64 {
        let line = t.lines().find(|l| l.starts_with(&format!("{model},across_ages,"))).unwrap();
        line.split(',').nth(3).unwrap().parse().unwrap()
    };
    // the raw fit is closer to the data it was fitted to than the smoothed fits
    assert!(mse("lc") < mse("lcs"));
}

#[test]
fn backtest_artifacts_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fixture(dir.path());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = mortality(&[
            "backtest",
            "--data",
            data.to_str().unwrap(),
            "--models",
            "lc,fdm",
            "--train",
            "1950:1975",
            "--test",
            "1976:1990",
            "--bootstrap",
            "200",
            "--seed",
            "7",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        snapshot(&out)
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(a, b);
    let names: Vec<&str> = a.iter().map(|f| f.0.as_str()).collect();
    for f in ["summary.json", "table3.csv", "fig12_mean_error_by_age.csv", "fig12.svg", "fig13.svg", "fig14_e0.svg"] {
        assert!(names.contains(&f), "{f} missing from {names:?}");
    }
    let summary: serde_json::Value = serde_json::from_slice(&a.iter().find(|f| f.0 == "summary.json").unwrap().1).unwrap();
    assert_eq!(summary["e0_errors"][1]["interval"]["bootstrap"]["seed"], 7);
    assert!(summary["note"].as_str().unwrap().contains("forecast - observed"));
}

fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
    svg.lines()
        .filter(|l| l.starts_with("<polyline"))
        .map(|l| {
            let pts = l.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
            pts.split(' ')
                .map(|p| {
                    let (x, y) = p.split_once(',').unwrap();
                    (x.parse().unwrap(), y.parse().unwrap())
                })
                .collect()
        })
        .collect()
}

fn attr<'a>(line: &'a str, name: &str) -> Option<&'a str> {
    line.split(&format!("{name}=\"")).nth(1)?.split('"').next()
}

#[test]
fn flat_series_is_a_horizontal_polyline() {
    let svg = to_svg(&LineChart::new("flat", "x", "y").with(Series::new("c", vec![0.0, 1.0, 2.0, 3.0], vec![2.5; 4]))).unwrap();
    let lines = polylines(&svg);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0].len(), 4);
    assert!(lines[0].iter().all(|p| p.1 == lines[0][0].1));
    assert!(lines[0].windows(2).all(|w| w[1].0 > w[0].0));
}

#[test]
fn two_series_get_distinct_colours_and_legend_entries() {
    let chart = LineChart::new("two", "x", "y")
        .with(Series::new("first", vec![0.0, 1.0], vec![0.0, 1.0]))
        .with(Series::new("second", vec![0.0, 1.0], vec![1.0, 0.0]));
    let svg = to_svg(&chart).unwrap();
    let colours: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).filter_map(|l| attr(l, "stroke")).collect();
    assert_eq!(colours.len(), 2);
    assert_ne!(colours[0], colours[1]);
    let legend: Vec<&str> = svg.lines().filter(|l| l.contains("class=\"legend\"")).collect();
    assert_eq!(legend.len(), 2);
    assert!(legend[0].contains(">first<") && legend[1].contains(">second<"));
}

#[test]
fn year_axis_ticks_span_the_series() {
    let years: Vec<f64> = (1950..=2050).map(f64::from).collect();
    let kappa: Vec<f64> = years.iter().map(|y| -0.8 * (y - 2000.0)).collect();
    let svg = to_svg(&LineChart::new("kappa", "year", "kappa").with(Series::new("kappa", years, kappa))).unwrap();
    let ticks: Vec<i32> = svg
        .lines()
        .filter(|l| l.contains("class=\"xtick\""))
        .map(|l| l.split('>').nth(1).unwrap().split('<').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ticks.first(), Some(&1950));
    assert_eq!(ticks.last(), Some(&2050));
    assert!(ticks.len() >= 3);
    // the x coordinates of the polyline start and end on the extreme ticks
    let line = &polylines(&svg)[0];
    let tick_x: Vec<f64> = svg
        .lines()
        .filter(|l| l.contains("class=\"xtick\""))
        .map(|l| attr(l, "x").unwrap().parse().unwrap())
        .collect();
    assert_eq!(line[0].0, tick_x[0]);
    assert_eq!(line[line.len() - 1].0, *tick_x.last().unwrap());
}

#[test]
fn identical_charts_render_identically_and_unwritable_paths_fail() {
    let chart = LineChart::new("t", "x", "y").with(Series::new("s", vec![1.0, 2.0, 3.0], vec![0.1, -0.4, 0.3]));
    assert_eq!(to_svg(&chart).unwrap(), to_svg(&chart.clone()).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("c.svg");
    assert!(mortality_cli::render_line_chart(&chart, &bad).is_err());
    let good = dir.path().join("c.svg");
    mortality_cli::render_line_chart(&chart, &good).unwrap();
    assert_eq!(std::fs::read_to_string(good).unwrap(), to_svg(&chart).unwrap());
}
