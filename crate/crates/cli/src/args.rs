use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mortality::smoothing::Lambda;
use mortality::{Gender, ModelKind, ModelSettings, SmoothConfig, TsSpec};

/// Environment variable consulted when `--data` is absent.
pub const DATA_ENV: &str = "MORTALITY_DATA_DIR";

#[derive(Debug, Parser)]
#[command(name = "mortality", version, about = "Fit, forecast and backtest Lee-Carter and functional demographic mortality models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one model: parameters, fit errors and residual tests.
    Fit(FitArgs),
    /// Fit one model and forecast rates and life expectancy.
    Forecast(ForecastArgs),
    /// Fit on a training window and score forecasts on a later test window.
    Backtest(BacktestArgs),
    /// Period life tables from observed rates.
    Lifetable(LifetableArgs),
    /// In-sample fit errors and residual tests for several models side by side.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// HMD `Mx_1x1` death-rate file, or a directory containing one.
    #[arg(long, env = DATA_ENV, value_name = "PATH")]
    pub data: PathBuf,
    #[arg(long, default_value = "male", value_parser = Gender::from_str)]
    pub gender: Gender,
    /// Inclusive age window.
    #[arg(long, default_value = "0:100", value_name = "A:B")]
    pub ages: Window,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory receiving every artifact.
    #[arg(short, long, default_value = "out", value_name = "DIR")]
    pub output: PathBuf,
    /// Artifact kinds to write.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv,json,svg")]
    pub format: Vec<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Number of FDM basis functions.
    #[arg(short = 'K', long = "components", default_value_t = 4)]
    pub components: usize,
    /// Number of cubic B-spline basis functions [default: min(2n/5, 35)].
    #[arg(long)]
    pub num_basis: Option<usize>,
    /// Smoothing parameter, or `gcv` to choose it per year.
    #[arg(long, default_value = "gcv")]
    pub lambda: LambdaArg,
    /// Order of the coefficient difference penalty.
    #[arg(long, default_value_t = 2)]
    pub diff_order: usize,
    /// Age from which smoothed log rates are nondecreasing, or `none`.
    #[arg(long, default_value = "65")]
    pub monotone_from: MonotoneArg,
}

impl ModelArgs {
    pub fn settings(&self) -> ModelSettings<f64> {
        ModelSettings {
            smooth: SmoothConfig {
                num_basis: self.num_basis,
                lambda: match self.lambda {
                    LambdaArg::Gcv => Lambda::Auto,
                    LambdaArg::Fixed(l) => Lambda::Fixed(l),
                },
                difference_order: self.diff_order,
                monotone_from: self.monotone_from.0,
                weights: None,
            },
            components: self.components,
        }
    }
}

#[derive(Debug, Args)]
pub struct ForecastOpts {
    /// Model for κ and the basis coefficients: `rwd` or `ar:p,d[,drift]`.
    #[arg(long, default_value = "rwd", value_parser = TsSpec::from_str)]
    pub ts: TsSpec,
    /// Prediction interval coverage in percent.
    #[arg(long, default_value_t = 95.0, value_parser = parse_level)]
    pub level: f64,
    /// Bootstrap replicates for FDM intervals (at least 100).
    #[arg(long, value_name = "B", value_parser = parse_replicates)]
    pub bootstrap: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl ForecastOpts {
    pub fn bootstrap(&self) -> Option<(usize, u64)> {
        self.bootstrap.map(|b| (b, self.seed))
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "lc", value_parser = ModelKind::from_str)]
    pub model: ModelKind,
    /// Inclusive fitting window [default: every year in the file].
    #[arg(long, value_name = "A:B")]
    pub years: Option<Window>,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "lc", value_parser = ModelKind::from_str)]
    pub model: ModelKind,
    /// Inclusive fitting window [default: every year in the file].
    #[arg(long, value_name = "A:B")]
    pub years: Option<Window>,
    /// Years to forecast past the end of the fitting window.
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[command(flatten)]
    pub forecast: ForecastOpts,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_delimiter = ',', default_value = "lc,lcs,fdm", value_parser = ModelKind::from_str)]
    pub models: Vec<ModelKind>,
    #[arg(long, default_value = "1950:1975", value_name = "A:B")]
    pub train: Window,
    #[arg(long, default_value = "1976:2005", value_name = "A:B", conflicts_with = "horizon")]
    pub test: Window,
    /// Test window of this many years right after training, instead of `--test`.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[command(flatten)]
    pub forecast: ForecastOpts,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl BacktestArgs {
    pub fn test_window(&self) -> Window {
        match self.horizon {
            Some(h) => Window { start: self.train.end + 1, end: self.train.end + h as i32 },
            None => self.test,
        }
    }
}

#[derive(Debug, Args)]
pub struct LifetableArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Inclusive window [default: every year in the file].
    #[arg(long, value_name = "A:B")]
    pub years: Option<Window>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_delimiter = ',', default_value = "lc,lcs,fdm", value_parser = ModelKind::from_str)]
    pub models: Vec<ModelKind>,
    /// Inclusive fitting window [default: every year in the file].
    #[arg(long, value_name = "A:B")]
    pub years: Option<Window>,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Inclusive `A:B` range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: i32,
    pub end: i32,
}

impl Window {
    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("{s:?} is not of the form A:B"))?;
        let parse = |t: &str| t.trim().parse::<i32>().map_err(|_| format!("{t:?} in {s:?} is not an integer"));
        let (start, end) = (parse(a)?, parse(b)?);
        if start > end {
            return Err(format!("{s:?}: start after end"));
        }
        Ok(Window { start, end })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaArg {
    Gcv,
    Fixed(f64),
}

impl FromStr for LambdaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("gcv") {
            return Ok(LambdaArg::Gcv);
        }
        match s.parse::<f64>() {
            Ok(l) if l.is_finite() && l >= 0.0 => Ok(LambdaArg::Fixed(l)),
            _ => Err(format!("{s:?} is neither `gcv` nor a nonnegative number")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneArg(pub Option<i32>);

impl FromStr for MonotoneArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(MonotoneArg(None));
        }
        s.parse().map(|a| MonotoneArg(Some(a))).map_err(|_| format!("{s:?} is neither an age nor `none`"))
    }
}

fn parse_replicates(s: &str) -> Result<usize, String> {
    let b: usize = s.parse().map_err(|e| format!("{e}"))?;
    if b >= 100 {
        Ok(b)
    } else {
        Err(format!("{b} replicates; need at least 100"))
    }
}

fn parse_level(s: &str) -> Result<f64, String> {
    let l: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if l > 50.0 && l < 99.9 {
        Ok(l)
    } else {
        Err(format!("level {l} must lie strictly between 50 and 99.9"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn windows_parse() {
        assert_eq!("1950:1975".parse::<Window>().unwrap(), Window { start: 1950, end: 1975 });
        assert_eq!("1950:1975".parse::<Window>().unwrap().len(), 26);
        assert!("1975:1950".parse::<Window>().is_err());
        assert!("1950".parse::<Window>().is_err());
    }

    #[test]
    fn level_bounds() {
        assert!(parse_level("95").is_ok());
        assert!(parse_level("50").is_err());
        assert!(parse_level("99.9").is_err());
    }

    #[test]
    fn too_few_replicates_is_a_usage_error() {
        let r = Cli::try_parse_from(["mortality", "forecast", "--data", "x", "--model", "fdm", "--bootstrap", "99"]);
        assert!(r.is_err());
        let ok = Cli::try_parse_from(["mortality", "forecast", "--data", "x", "--model", "fdm", "--bootstrap", "100"]);
        assert!(ok.is_ok());
    }

    #[test]
    fn horizon_replaces_test_window() {
        let cli = Cli::try_parse_from(["mortality", "backtest", "--data", "x", "--train", "1950:1975", "--horizon", "10"]).unwrap();
        let Command::Backtest(b) = cli.command else { panic!() };
        assert_eq!(b.test_window(), Window { start: 1976, end: 1985 });
    }
}
