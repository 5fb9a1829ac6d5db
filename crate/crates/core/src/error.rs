// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {value:e}, residual {residual:e} (tolerance {tolerance:e})")]
    Accuracy {
        value: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(usize),

    #[error("invalid state: {0}")]
    State(String),

    #[error("Kraus decomposition unavailable: weight {which} = {value:e} is negative")]
    DecompositionUnavailable { which: &'static str, value: f64 },

    #[error("integration failed at t = {time:e}: {reason}")]
    Integration { time: f64, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
