//! Stochastic mortality models on age × year death-rate surfaces.
//!
//! Three model families share one pipeline:
//!
//! * **LC**: Lee–Carter, `ln m_{x,t} = α_x + β_x κ_t + ε`, fitted by SVD;
//! * **LCS**: Lee–Carter fitted to per-year P-spline smoothed rates;
//! * **FDM**: the functional demographic model, which decomposes smoothed curves into
//!   a mean and `K` orthonormal basis functions with forecastable
//!   coefficient series.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! command-line tool uses.

pub mod error;
pub mod evaluate;
pub mod fdm;
pub mod forecast;
pub mod ingest;
pub mod leecarter;
pub mod lifetable;
pub mod model;
pub mod numerics;
pub mod scalar;
pub mod smoothing;
pub mod tsforecast;

pub use error::{Error, Result};
pub use ingest::{build_surface, parse_hmd_rates, Gender, HmdRecord};
pub use model::{FittedModel, ModelKind, ModelSettings};
pub use scalar::Scalar;
pub use tsforecast::{TsFamily, TsSpec};

pub type MortalitySurface = ingest::MortalitySurface<f64>;
pub type Matrix = numerics::Matrix<f64>;
pub type LcModel = leecarter::LcModel<f64>;
pub type FdmModel = fdm::FdmModel<f64>;
pub type ForecastSurface = forecast::ForecastSurface<f64>;
pub type SmoothConfig = smoothing::SmoothConfig<f64>;
pub type SmoothSurface = smoothing::SmoothSurface<f64>;
pub type TsFit = tsforecast::TsFit<f64>;
pub type LifeTable = lifetable::LifeTable<f64>;
pub type ErrorReport = evaluate::ErrorReport<f64>;
pub type BacktestConfig = evaluate::BacktestConfig<f64>;
pub type BacktestReport = evaluate::BacktestReport<f64>;
