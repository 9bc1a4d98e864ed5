//! Uniform handling of the three model families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdm::{bootstrap_intervals, fit_fdm, forecast_fdm, FdmModel};
use crate::forecast::ForecastSurface;
use crate::ingest::MortalitySurface;
use crate::leecarter::{fit_lc, fit_lcs, forecast_lc, LcModel};
use crate::numerics::Matrix;
use crate::scalar::Scalar;
use crate::smoothing::SmoothConfig;
use crate::tsforecast::TsSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lc,
    Lcs,
    Fdm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Lc, ModelKind::Lcs, ModelKind::Fdm];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lc => "lc",
            ModelKind::Lcs => "lcs",
            ModelKind::Fdm => "fdm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lc" => Ok(ModelKind::Lc),
            "lcs" => Ok(ModelKind::Lcs),
            "fdm" => Ok(ModelKind::Fdm),
            other => Err(Error::InvalidArgument(format!("unknown model {other:?}; expected lc, lcs or fdm"))),
        }
    }
}

/// Settings shared by every model family.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSettings<T> {
    pub smooth: SmoothConfig<T>,
    /// Number of FDM basis functions.
    pub components: usize,
}

impl<T: Scalar> Default for ModelSettings<T> {
    fn default() -> Self {
        Self { smooth: SmoothConfig::default(), components: crate::fdm::DEFAULT_COMPONENTS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel<T> {
    LeeCarter(LcModel<T>),
    Functional(FdmModel<T>),
}

impl<T: Scalar> FittedModel<T> {
    pub fn fit(kind: ModelKind, surface: &MortalitySurface<T>, settings: &ModelSettings<T>) -> Result<Self> {
        Ok(match kind {
            ModelKind::Lc => FittedModel::LeeCarter(fit_lc(surface)?),
            ModelKind::Lcs => FittedModel::LeeCarter(fit_lcs(surface, &settings.smooth)?),
            ModelKind::Fdm => FittedModel::Functional(fit_fdm(surface, &settings.smooth, settings.components)?),
        })
    }

    pub fn fitted_log_rates(&self) -> Matrix<T> {
        match self {
            FittedModel::LeeCarter(m) => m.fitted_log_rates(),
            FittedModel::Functional(m) => m.fitted_log_rates(),
        }
    }

    /// Explained-variance shares: one value for Lee–Carter, one per basis
    /// function for the FDM.
    pub fn explained(&self) -> Vec<T> {
        match self {
            FittedModel::LeeCarter(m) => vec![m.explained_variance],
            FittedModel::Functional(m) => m.explained_shares.clone(),
        }
    }

    pub fn forecast(&self, spec: &TsSpec, h: usize, level: T) -> Result<ForecastSurface<T>> {
        match self {
            FittedModel::LeeCarter(m) => forecast_lc(m, spec, h, level),
            FittedModel::Functional(m) => forecast_fdm(m, spec, h, level),
        }
    }

    /// As [`forecast`](Self::forecast), but FDM intervals come from
    /// `bootstrap = (replicates, seed)` when given.
    pub fn forecast_with(&self, spec: &TsSpec, h: usize, level: T, bootstrap: Option<(usize, u64)>) -> Result<ForecastSurface<T>> {
        match (self, bootstrap) {
            (FittedModel::Functional(m), Some((b, seed))) => bootstrap_intervals(m, spec, h, level, b, seed),
            _ => self.forecast(spec, h, level),
        }
    }
}
