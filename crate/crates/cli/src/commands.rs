use serde::Serialize;

use mortality::evaluate::{error_metrics, residual_diagnostics, run_backtest, Metrics, ResidualDiagnostics};
use mortality::forecast::IntervalKind;
use mortality::lifetable::{e0_path, rates_to_lifetable};
use mortality::{BacktestConfig, FittedModel, ModelKind, ModelSettings, MortalitySurface};

use crate::args::{BacktestArgs, CompareArgs, FitArgs, ForecastArgs, LifetableArgs, ModelArgs, Window};
use crate::chart::{LineChart, Series};
use crate::data::load_surface;
use crate::error::CliError;
use crate::output::{num, Sink, Table};
use crate::SCHEMA_VERSION;

const METRICS_NOTE: &str = "Errors are ln(observed rate) - ln(fitted rate). avg_across_ages is the mean over ages of metrics \
computed across years; avg_across_years is the mean over years of metrics computed across ages. Published across-years \
rows use an undocumented aggregation and are not expected to match the across-years figures here.";

const E0_NOTE: &str = "e0 errors are forecast - observed, so underestimated longevity gives a negative error. e0 bounds \
are a pointwise envelope: the upper mortality bound gives the lower e0 bound. They are not a joint interval.";

#[derive(Serialize)]
struct DataInfo {
    file: String,
    gender: String,
    ages: String,
    years: String,
}

impl DataInfo {
    fn new(file: &std::path::Path, surface: &MortalitySurface) -> Self {
        let span = |v: &[i32]| format!("{}:{}", v[0], v[v.len() - 1]);
        Self {
            file: file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            gender: surface.gender().to_string(),
            ages: span(surface.ages()),
            years: span(surface.years()),
        }
    }
}

#[derive(Serialize)]
struct SmoothingInfo {
    num_basis: Option<usize>,
    lambda: String,
    difference_order: usize,
    monotone_from: Option<i32>,
    components: usize,
}

impl SmoothingInfo {
    fn new(a: &ModelArgs) -> Self {
        Self {
            num_basis: a.num_basis,
            lambda: match a.lambda {
                crate::args::LambdaArg::Gcv => "gcv".into(),
                crate::args::LambdaArg::Fixed(l) => l.to_string(),
            },
            difference_order: a.diff_order,
            monotone_from: a.monotone_from.0,
            components: a.components,
        }
    }
}

#[derive(Serialize)]
struct FitMetrics {
    avg_across_ages: Metrics<f64>,
    avg_across_years: Metrics<f64>,
    scale: &'static str,
    excluded_cells: usize,
}

/// In-sample summary of one fitted model.
#[derive(Serialize)]
struct InSample {
    model: ModelKind,
    /// Explained-variance share per component (one for LC and LCS).
    explained: Vec<f64>,
    /// `1 − RSS/‖Z‖²` for LC and LCS.
    rss_explained_variance: Option<f64>,
    metrics: FitMetrics,
    residual_diagnostics: ResidualDiagnostics,
}

fn in_sample(kind: ModelKind, surface: &MortalitySurface, fitted: &FittedModel<f64>) -> Result<InSample, CliError> {
    let fitted_log = fitted.fitted_log_rates();
    let report = error_metrics(surface, &fitted_log)?;
    let residuals = surface.log_rates().zip_map(&fitted_log, |o, f| o - f);
    Ok(InSample {
        model: kind,
        explained: fitted.explained(),
        rss_explained_variance: match fitted {
            FittedModel::LeeCarter(m) => Some(m.rss_explained_variance),
            FittedModel::Functional(_) => None,
        },
        metrics: FitMetrics {
            avg_across_ages: report.avg_across_ages,
            avg_across_years: report.avg_across_years,
            scale: report.scale,
            excluded_cells: report.excluded_cells,
        },
        residual_diagnostics: residual_diagnostics(residuals.as_slice())?,
    })
}

fn table1(fits: &[InSample]) -> Table {
    let mut t = Table::new(["model", "aggregation", "me", "mse", "mpe", "mape"]);
    for f in fits {
        for (name, m) in [("across_ages", &f.metrics.avg_across_ages), ("across_years", &f.metrics.avg_across_years)] {
            t.row([f.model.to_string(), name.into(), num(m.me), num(m.mse), num(m.mpe), num(m.mape)]);
        }
    }
    t
}

fn explained_table(fits: &[InSample]) -> Table {
    let mut t = Table::new(["model", "component", "share"]);
    for f in fits {
        for (k, s) in f.explained.iter().enumerate() {
            t.row([f.model.to_string(), (k + 1).to_string(), num(s)]);
        }
    }
    t
}

fn diagnostics_table(fits: &[InSample]) -> Table {
    let mut t = Table::new(["model", "t_statistic", "t_p_value", "shapiro_w", "shapiro_p_value", "shapiro_n"]);
    for f in fits {
        let d = &f.residual_diagnostics;
        t.row([
            f.model.to_string(),
            num(d.t_test.statistic),
            num(d.t_test.p_value),
            num(d.normality.statistic),
            num(d.normality.p_value),
            d.normality_sample_size.to_string(),
        ]);
    }
    t
}

fn floats(v: &[i32]) -> Vec<f64> {
    v.iter().map(|&x| f64::from(x)).collect()
}

/// Rejects smoothing settings the age window cannot support, before any
/// data is read.
fn check_model_args(a: &ModelArgs, ages: Window, models: &[ModelKind]) -> Result<(), CliError> {
    let smoothed = models.iter().any(|m| *m != ModelKind::Lc);
    if let (true, Some(c)) = (smoothed, a.monotone_from.0) {
        if c < ages.start || c > ages.end {
            return Err(CliError::Usage(format!("--monotone-from {c} lies outside --ages {ages}; pass `none` to disable")));
        }
    }
    if models.contains(&ModelKind::Fdm) && a.components == 0 {
        return Err(CliError::Usage("-K must be at least 1".into()));
    }
    Ok(())
}

fn model_artifacts(sink: &mut Sink, fitted: &FittedModel<f64>, kind: ModelKind) -> Result<(), CliError> {
    match fitted {
        FittedModel::LeeCarter(m) => {
            let ages = floats(&m.ages);
            let years = floats(&m.years);
            for (name, x, y, label) in [
                ("alpha", &m.ages, &m.alpha, "age"),
                ("beta", &m.ages, &m.beta, "age"),
                ("kappa", &m.years, &m.kappa, "year"),
            ] {
                let mut t = Table::new([label, "value"]);
                for (a, v) in x.iter().zip(y) {
                    t.row([a.to_string(), num(v)]);
                }
                sink.csv(&format!("{name}.csv"), &t)?;
            }
            let model = kind.to_string().to_uppercase();
            sink.svg("alpha.svg", &LineChart::new(format!("{model}: alpha"), "age", "alpha").with(Series::new("alpha", ages.clone(), m.alpha.clone())))?;
            sink.svg("beta.svg", &LineChart::new(format!("{model}: beta"), "age", "beta").with(Series::new("beta", ages, m.beta.clone())))?;
            sink.svg("kappa.svg", &LineChart::new(format!("{model}: kappa"), "year", "kappa").with(Series::new("kappa", years, m.kappa.clone())))?;
        }
        FittedModel::Functional(m) => {
            let k = m.k();
            let ages = floats(&m.ages);
            let years = floats(&m.years);
            let mut mu = Table::new(["age", "value"]);
            for (a, v) in m.ages.iter().zip(&m.mu) {
                mu.row([a.to_string(), num(v)]);
            }
            sink.csv("mu.csv", &mu)?;
            let mut phi = Table::new(std::iter::once("age".to_string()).chain((1..=k).map(|i| format!("phi{i}"))));
            for (r, a) in m.ages.iter().enumerate() {
                phi.row(std::iter::once(a.to_string()).chain((0..k).map(|c| num(m.phi[(r, c)]))));
            }
            sink.csv("phi.csv", &phi)?;
            let mut beta = Table::new(std::iter::once("year".to_string()).chain((1..=k).map(|i| format!("beta{i}"))));
            for (r, y) in m.years.iter().enumerate() {
                beta.row(std::iter::once(y.to_string()).chain((0..k).map(|c| num(m.beta_series[(r, c)]))));
            }
            sink.csv("coefficients.csv", &beta)?;
            let mut var = Table::new(["age", "model_error_variance", "observational_variance"]);
            for (r, a) in m.ages.iter().enumerate() {
                var.row([a.to_string(), num(m.v[r]), num(m.sigma2[r])]);
            }
            sink.csv("variances.csv", &var)?;

            sink.svg("mu.svg", &LineChart::new("FDM: mean curve", "age", "mu").with(Series::new("mu", ages.clone(), m.mu.clone())))?;
            let mut phi_chart = LineChart::new("FDM: basis functions", "age", "phi");
            let mut beta_chart = LineChart::new("FDM: coefficients", "year", "beta");
            for c in 0..k {
                phi_chart = phi_chart.with(Series::new(format!("phi{}", c + 1), ages.clone(), m.phi.col(c).to_vec()));
                let series: Vec<f64> = (0..m.years.len()).map(|r| m.beta_series[(r, c)]).collect();
                beta_chart = beta_chart.with(Series::new(format!("beta{}", c + 1), years.clone(), series));
            }
            sink.svg("phi.svg", &phi_chart)?;
            sink.svg("coefficients.svg", &beta_chart)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FitSummary {
    schema_version: u32,
    command: &'static str,
    data: DataInfo,
    smoothing: SmoothingInfo,
    fit: InSample,
    note: &'static str,
}

pub fn fit(a: &FitArgs) -> Result<(), CliError> {
    check_model_args(&a.model_args, a.data.ages, &[a.model])?;
    let (file, surface) = load_surface(&a.data.data, a.data.gender, a.data.ages, a.years)?;
    let fitted = FittedModel::fit(a.model, &surface, &a.model_args.settings())?;
    let summary = in_sample(a.model, &surface, &fitted)?;

    let mut sink = Sink::new(&a.output)?;
    model_artifacts(&mut sink, &fitted, a.model)?;
    let fits = [summary];
    sink.csv("table1.csv", &table1(&fits))?;
    sink.csv("explained.csv", &explained_table(&fits))?;
    sink.csv("diagnostics.csv", &diagnostics_table(&fits))?;
    let [fit] = fits;
    eprintln!(
        "{} explained variance: {}",
        a.model,
        fit.explained.iter().map(|s| format!("{:.1}%", 100.0 * s)).collect::<Vec<_>>().join(", ")
    );
    sink.json(
        "summary.json",
        &FitSummary {
            schema_version: SCHEMA_VERSION,
            command: "fit",
            data: DataInfo::new(&file, &surface),
            smoothing: SmoothingInfo::new(&a.model_args),
            fit,
            note: METRICS_NOTE,
        },
    )?;
    sink.finish();
    Ok(())
}

#[derive(Serialize)]
struct E0Row {
    year: i32,
    point: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct ForecastSummary {
    schema_version: u32,
    command: &'static str,
    data: DataInfo,
    smoothing: SmoothingInfo,
    model: ModelKind,
    ts: String,
    level: f64,
    horizon: usize,
    interval: IntervalKind,
    e0: Vec<E0Row>,
    note: &'static str,
}

pub fn forecast(a: &ForecastArgs) -> Result<(), CliError> {
    check_model_args(&a.model_args, a.data.ages, &[a.model])?;
    if a.horizon == 0 {
        return Err(CliError::Usage("--horizon must be at least 1".into()));
    }
    if a.forecast.bootstrap.is_some() && a.model != ModelKind::Fdm {
        return Err(CliError::Usage("--bootstrap applies to --model fdm only".into()));
    }
    let (file, surface) = load_surface(&a.data.data, a.data.gender, a.data.ages, a.years)?;
    let fitted = FittedModel::fit(a.model, &surface, &a.model_args.settings())?;
    let fc = fitted.forecast_with(&a.forecast.ts, a.horizon, a.forecast.level, a.forecast.bootstrap())?;

    let mut sink = Sink::new(&a.output)?;
    let mut table = Table::new(["age", "year", "horizon", "point", "variance", "lower", "upper"]);
    for line in fc.to_csv().lines().skip(1) {
        table.row(line.split(','));
    }
    sink.csv("forecast.csv", &table)?;

    let ages = floats(&fc.ages);
    let last = fc.horizon() - 1;
    let mut rates = LineChart::new(format!("{}: forecast log death rates", a.model.to_string().to_uppercase()), "age", "ln m");
    for (i, c) in [0, last].into_iter().enumerate() {
        if i == 1 && last == 0 {
            break;
        }
        let year = fc.years[c];
        rates = rates
            .with(Series::new(format!("{year}"), ages.clone(), fc.point.col(c).to_vec()).color(i))
            .with(Series::new(format!("{year} lower"), ages.clone(), fc.lower.col(c).to_vec()).color(i).dashed())
            .with(Series::new(format!("{year} upper"), ages.clone(), fc.upper.col(c).to_vec()).color(i).dashed());
    }
    sink.svg("forecast_rates.svg", &rates)?;

    let e0 = if surface.ages()[0] == 0 {
        let path = e0_path(&fc)?;
        let mut t = Table::new(["year", "point", "lower", "upper"]);
        for p in &path {
            t.row([p.year.to_string(), num(p.point), num(p.lower), num(p.upper)]);
        }
        sink.csv("e0.csv", &t)?;
        let observed: Vec<f64> = (0..surface.years().len())
            .map(|c| rates_to_lifetable(surface.year_curve(c)).map(|t| t.e0))
            .collect::<Result<_, _>>()?;
        let years = floats(&fc.years);
        let chart = LineChart::new("Life expectancy at birth", "year", "e0")
            .with(Series::new("observed", floats(surface.years()), observed).color(7))
            .with(Series::new("forecast", years.clone(), path.iter().map(|p| p.point).collect()).color(0))
            .with(Series::new("lower", years.clone(), path.iter().map(|p| p.lower).collect()).color(0).dashed())
            .with(Series::new("upper", years, path.iter().map(|p| p.upper).collect()).color(0).dashed());
        sink.svg("e0.svg", &chart)?;
        path.iter().map(|p| E0Row { year: p.year, point: p.point, lower: p.lower, upper: p.upper }).collect()
    } else {
        eprintln!("ages do not start at 0; skipping life expectancy");
        Vec::new()
    };

    sink.json(
        "summary.json",
        &ForecastSummary {
            schema_version: SCHEMA_VERSION,
            command: "forecast",
            data: DataInfo::new(&file, &surface),
            smoothing: SmoothingInfo::new(&a.model_args),
            model: a.model,
            ts: a.forecast.ts.to_string(),
            level: a.forecast.level,
            horizon: a.horizon,
            interval: fc.interval,
            e0,
            note: E0_NOTE,
        },
    )?;
    sink.finish();
    Ok(())
}

#[derive(Serialize)]
struct BacktestModelSummary {
    model: ModelKind,
    e0_error_mean: f64,
    e0_error_variance: f64,
    interval: IntervalKind,
    /// Out-of-sample log-rate errors over the test window.
    forecast_metrics: FitMetrics,
}

#[derive(Serialize)]
struct BacktestSummary {
    schema_version: u32,
    command: &'static str,
    data: DataInfo,
    smoothing: SmoothingInfo,
    train: String,
    test: String,
    ts: String,
    level: f64,
    /// Mean and variance over test years of the e0 errors, per model.
    e0_errors: Vec<BacktestModelSummary>,
    note: &'static str,
}

pub fn backtest(a: &BacktestArgs) -> Result<(), CliError> {
    let test = a.test_window();
    let config = BacktestConfig {
        train: (a.train.start, a.train.end),
        test: (test.start, test.end),
        models: dedup(&a.models),
        ts_spec: a.forecast.ts,
        level: a.forecast.level,
        settings: a.model_args.settings(),
        bootstrap: a.forecast.bootstrap(),
    };
    config.validate().map_err(|e| CliError::Usage(format!("--train {} / --test {test}: {e}", a.train)))?;
    if a.data.ages.start != 0 {
        return Err(CliError::Usage(format!("backtesting needs --ages starting at 0, got {}", a.data.ages)));
    }
    check_model_args(&a.model_args, a.data.ages, &config.models)?;
    let whole = Window { start: a.train.start, end: test.end };
    let (file, surface) = load_surface(&a.data.data, a.data.gender, a.data.ages, Some(whole))?;
    let report = run_backtest(&surface, &config)?;
    let observed = surface.slice_window(test.start, test.end)?;

    let mut sink = Sink::new(&a.output)?;
    let ages = floats(&report.ages);
    let years = floats(&report.test_years);

    let mut table3 = Table::new(["model", "e0_error_mean", "e0_error_variance"]);
    let mut e0 = Table::new(["model", "year", "observed", "forecast", "lower", "upper", "error"]);
    let mut errors = Table::new(["model", "age", "year", "error"]);
    let mut metrics = Table::new(["model", "aggregation", "me", "mse", "mpe", "mape"]);
    let mut by_age_header = vec!["age".to_string()];
    let mut fig12 = LineChart::new("Mean forecast error by age", "age", "mean error (log rate)");
    let mut fig13 = LineChart::new("Standard deviation of forecast error by age", "age", "sd of error (log rate)");
    let mut fig14 = LineChart::new("Life expectancy at birth: forecast and observed", "year", "e0");
    fig14 = fig14.with(Series::new("observed", years.clone(), report.models[0].e0_observed.clone()).color(7));
    let mut summaries = Vec::new();

    for (i, m) in report.models.iter().enumerate() {
        let name = m.model.to_string();
        table3.row([name.clone(), num(m.e0_error_mean), num(m.e0_error_variance)]);
        for (c, year) in report.test_years.iter().enumerate() {
            e0.row([
                name.clone(),
                year.to_string(),
                num(m.e0_observed[c]),
                num(m.e0_forecast[c]),
                num(m.e0_lower[c]),
                num(m.e0_upper[c]),
                num(m.e0_errors[c]),
            ]);
            for (r, age) in report.ages.iter().enumerate() {
                errors.row([name.clone(), age.to_string(), year.to_string(), num(m.errors[(r, c)])]);
            }
        }
        let fm = error_metrics(&observed, &m.forecast.point)?;
        for (agg, v) in [("across_ages", &fm.avg_across_ages), ("across_years", &fm.avg_across_years)] {
            metrics.row([name.clone(), agg.into(), num(v.me), num(v.mse), num(v.mpe), num(v.mape)]);
        }
        by_age_header.push(name.clone());
        let label = name.to_uppercase();
        fig12 = fig12.with(Series::new(label.clone(), ages.clone(), m.mean_error_by_age.clone()).color(i));
        fig13 = fig13.with(Series::new(label.clone(), ages.clone(), m.sd_error_by_age.clone()).color(i));
        fig14 = fig14
            .with(Series::new(label.clone(), years.clone(), m.e0_forecast.clone()).color(i))
            .with(Series::new(format!("{label} lower"), years.clone(), m.e0_lower.clone()).color(i).dashed())
            .with(Series::new(format!("{label} upper"), years.clone(), m.e0_upper.clone()).color(i).dashed());

        // one error curve per fifth test year, plus the last
        let mut curves = LineChart::new(format!("{label}: forecast errors by age"), "age", "ln m observed - forecast");
        let picks: Vec<usize> = (0..report.test_years.len())
            .filter(|c| c % 5 == 0 || *c + 1 == report.test_years.len())
            .collect();
        for c in picks {
            curves = curves.with(Series::new(report.test_years[c].to_string(), ages.clone(), m.errors.col(c).to_vec()));
        }
        sink.svg(&format!("errors_{name}.svg"), &curves)?;

        summaries.push(BacktestModelSummary {
            model: m.model,
            e0_error_mean: m.e0_error_mean,
            e0_error_variance: m.e0_error_variance,
            interval: m.forecast.interval,
            forecast_metrics: FitMetrics {
                avg_across_ages: fm.avg_across_ages,
                avg_across_years: fm.avg_across_years,
                scale: fm.scale,
                excluded_cells: fm.excluded_cells,
            },
        });
    }

    let mut fig12_csv = Table::new(by_age_header.clone());
    let mut fig13_csv = Table::new(by_age_header);
    for (r, age) in report.ages.iter().enumerate() {
        fig12_csv.row(std::iter::once(age.to_string()).chain(report.models.iter().map(|m| num(m.mean_error_by_age[r]))));
        fig13_csv.row(std::iter::once(age.to_string()).chain(report.models.iter().map(|m| num(m.sd_error_by_age[r]))));
    }

    sink.csv("table3.csv", &table3)?;
    sink.csv("e0_by_year.csv", &e0)?;
    sink.csv("forecast_errors.csv", &errors)?;
    sink.csv("forecast_metrics.csv", &metrics)?;
    sink.csv("fig12_mean_error_by_age.csv", &fig12_csv)?;
    sink.csv("fig13_sd_error_by_age.csv", &fig13_csv)?;
    sink.svg("fig12.svg", &fig12)?;
    sink.svg("fig13.svg", &fig13)?;
    sink.svg("fig14_e0.svg", &fig14)?;
    for s in &summaries {
        eprintln!("{}: e0 error mean {:.3}, variance {:.3}", s.model, s.e0_error_mean, s.e0_error_variance);
    }
    sink.json(
        "summary.json",
        &BacktestSummary {
            schema_version: SCHEMA_VERSION,
            command: "backtest",
            data: DataInfo::new(&file, &surface),
            smoothing: SmoothingInfo::new(&a.model_args),
            train: a.train.to_string(),
            test: test.to_string(),
            ts: a.forecast.ts.to_string(),
            level: a.forecast.level,
            e0_errors: summaries,
            note: E0_NOTE,
        },
    )?;
    sink.finish();
    Ok(())
}

fn dedup(models: &[ModelKind]) -> Vec<ModelKind> {
    let mut out: Vec<ModelKind> = Vec::new();
    for m in models {
        if !out.contains(m) {
            out.push(*m);
        }
    }
    out
}

#[derive(Serialize)]
struct LifetableSummary {
    schema_version: u32,
    command: &'static str,
    data: DataInfo,
    e0: Vec<(i32, f64)>,
}

pub fn lifetable(a: &LifetableArgs) -> Result<(), CliError> {
    if a.data.ages.start != 0 {
        return Err(CliError::Usage(format!("life tables need --ages starting at 0, got {}", a.data.ages)));
    }
    let (file, surface) = load_surface(&a.data.data, a.data.gender, a.data.ages, a.years)?;
    let mut sink = Sink::new(&a.output)?;
    let mut long = Table::new(["year", "age", "mx", "qx", "lx", "dx", "Lx"]);
    let mut e0 = Vec::new();
    for (c, &year) in surface.years().iter().enumerate() {
        let t = rates_to_lifetable(surface.year_curve(c))?;
        for i in 0..t.ages.len() {
            long.row([
                year.to_string(),
                surface.ages()[i].to_string(),
                num(t.mx[i]),
                num(t.qx[i]),
                num(t.lx[i]),
                num(t.dx[i]),
                num(t.person_years[i]),
            ]);
        }
        e0.push((year, t.e0));
    }
    let mut e0_table = Table::new(["year", "e0"]);
    for (y, v) in &e0 {
        e0_table.row([y.to_string(), num(v)]);
    }
    sink.csv("lifetables.csv", &long)?;
    sink.csv("e0.csv", &e0_table)?;
    sink.svg(
        "e0.svg",
        &LineChart::new("Period life expectancy at birth", "year", "e0")
            .with(Series::new(surface.gender().to_string(), e0.iter().map(|p| f64::from(p.0)).collect(), e0.iter().map(|p| p.1).collect())),
    )?;
    sink.json(
        "summary.json",
        &LifetableSummary { schema_version: SCHEMA_VERSION, command: "lifetable", data: DataInfo::new(&file, &surface), e0 },
    )?;
    sink.finish();
    Ok(())
}

#[derive(Serialize)]
struct CompareSummary {
    schema_version: u32,
    command: &'static str,
    data: DataInfo,
    smoothing: SmoothingInfo,
    fits: Vec<InSample>,
    note: &'static str,
}

pub fn compare(a: &CompareArgs) -> Result<(), CliError> {
    let models = dedup(&a.models);
    if models.is_empty() {
        return Err(CliError::Usage("--models is empty".into()));
    }
    check_model_args(&a.model_args, a.data.ages, &models)?;
    let (file, surface) = load_surface(&a.data.data, a.data.gender, a.data.ages, a.years)?;
    let settings: ModelSettings<f64> = a.model_args.settings();
    let ages = floats(surface.ages());
    let observed = surface.log_rates();
    let mut fits = Vec::new();
    let mut chart = LineChart::new("Mean in-sample residual by age", "age", "ln m observed - fitted");
    for (i, &kind) in models.iter().enumerate() {
        let fitted = FittedModel::fit(kind, &surface, &settings)?;
        let fitted_log = fitted.fitted_log_rates();
        let by_age: Vec<f64> = (0..ages.len())
            .map(|r| {
                let n = observed.cols() as f64;
                (0..observed.cols()).map(|c| observed[(r, c)] - fitted_log[(r, c)]).sum::<f64>() / n
            })
            .collect();
        chart = chart.with(Series::new(kind.to_string().to_uppercase(), ages.clone(), by_age).color(i));
        fits.push(in_sample(kind, &surface, &fitted)?);
    }
    let mut sink = Sink::new(&a.output)?;
    sink.csv("table1.csv", &table1(&fits))?;
    sink.csv("explained.csv", &explained_table(&fits))?;
    sink.csv("diagnostics.csv", &diagnostics_table(&fits))?;
    sink.svg("residuals_by_age.svg", &chart)?;
    sink.json(
        "summary.json",
        &CompareSummary {
            schema_version: SCHEMA_VERSION,
            command: "compare",
            data: DataInfo::new(&file, &surface),
            smoothing: SmoothingInfo::new(&a.model_args),
            fits,
            note: METRICS_NOTE,
        },
    )?;
    sink.finish();
    Ok(())
}
