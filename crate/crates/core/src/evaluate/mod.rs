//! Goodness of fit, residual diagnostics and backtesting.

mod backtest;
mod diagnostics;
mod metrics;

pub use backtest::{run_backtest, BacktestConfig, BacktestReport, ModelBacktest};
pub use diagnostics::{
    normality_test, residual_diagnostics, t_test_zero_mean, thin_for_normality, ResidualDiagnostics, TestResult,
    SHAPIRO_MAX_N,
};
pub use metrics::{error_metrics, ErrorReport, Metrics};
