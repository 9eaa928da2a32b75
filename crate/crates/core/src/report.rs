//! Machine-readable verification outcomes.

use alloc::string::String;

use serde::Serialize;

use crate::sparse::Deviation;

/// One checked identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub identity: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    /// Number of basis indices on which the identity was compared.
    pub window: usize,
    pub max_abs_deviation: f64,
    pub exact: bool,
    pub pass: bool,
    /// Informational checks record an observation without gating success.
    pub asserted: bool,
}

impl Check {
    pub fn from_deviation(identity: impl Into<String>, n: usize, size: usize, dev: &Deviation) -> Self {
        Check {
            identity: identity.into(),
            n,
            size,
            window: dev.window_len,
            max_abs_deviation: dev.max_abs,
            exact: dev.exact,
            pass: dev.pass(),
            asserted: true,
        }
    }

    /// A check with a scalar deviation compared against `tolerance`.
    pub fn scalar(
        identity: impl Into<String>,
        n: usize,
        size: usize,
        window: usize,
        deviation: f64,
        tolerance: f64,
        exact: bool,
    ) -> Self {
        Check {
            identity: identity.into(),
            n,
            size,
            window,
            max_abs_deviation: deviation,
            exact,
            pass: deviation <= tolerance,
            asserted: true,
        }
    }

    pub fn informational(mut self) -> Self {
        self.asserted = false;
        self
    }

    pub fn renamed(mut self, identity: impl Into<String>) -> Self {
        self.identity = identity.into();
        self
    }
}

/// `true` when every asserted check passed.
pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().filter(|c| c.asserted).all(|c| c.pass)
}
