//! Brute-force ground truth for the closed forms.
//!
//! [`grid`] evaluates the game by enumeration using nothing but the Lotto
//! payoff function; it never calls into [`crate::adversary`] or
//! [`crate::transfer`] beyond the [`GameParams`] type. [`scan`] runs the grid
//! over transfers and diffs it against the closed forms, and [`verify`]
//! drives that comparison over randomly sampled games.

use serde::{Deserialize, Serialize};

use crate::adversary::GameParams;
use crate::error::{Error, Result};

pub mod grid;
pub mod scan;
pub mod verify;

pub use grid::{adversary_grid_best_response, adversary_refined_best_response};
pub use scan::{transfer_grid_scan, OracleReport};
pub use verify::{run_verification, VerifyConfig, VerifyReport};

/// Grid resolutions for the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub tau_step: f64,
    pub split_step: f64,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            tau_step: 1e-4,
            split_step: 1e-3,
            tolerance: 1e-9,
        }
    }
}

impl OracleConfig {
    /// Checks the steps against a normalized game.
    pub fn validate_for(&self, g: &GameParams) -> Result<()> {
        for (name, v) in [
            ("tau_step", self.tau_step),
            ("split_step", self.split_step),
            ("tolerance", self.tolerance),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(name, v, "must be a finite value > 0"));
            }
        }
        if self.split_step > 1.0 {
            return Err(Error::domain("split_step", self.split_step, "must be <= 1"));
        }
        if self.tau_step >= g.x1.min(g.x2) {
            return Err(Error::domain(
                "tau_step",
                self.tau_step,
                "must be smaller than both budgets",
            ));
        }
        Ok(())
    }
}

/// A quantity on which the closed form and the grid disagree beyond slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub quantity: String,
    pub closed_form_value: f64,
    pub grid_value: f64,
}
