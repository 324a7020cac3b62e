use serde::{Deserialize, Serialize};

/// A computed scalar with an error estimate and the configuration that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub value: f64,
    /// Standard error for Monte Carlo estimates, Richardson difference for quadratures.
    pub error: f64,
    pub method: String,
    pub n: usize,
    #[serde(default)]
    pub config: serde_json::Value,
}

impl FunctionalReport {
    pub fn new(value: f64, error: f64, method: impl Into<String>, n: usize) -> Self {
        Self {
            value,
            error,
            method: method.into(),
            n,
            config: serde_json::Value::Null,
        }
    }

    pub fn with_config(mut self, config: serde_json::Value) -> Self {
        self.config = config;
        self
    }

    /// Whether `self` and `other` agree within `k` combined (quadrature-added) errors.
    pub fn agrees_with(&self, other: &Self, k: f64) -> bool {
        (self.value - other.value).abs() <= k * self.error.hypot(other.error)
    }
}
