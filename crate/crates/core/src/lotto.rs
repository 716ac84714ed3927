//! Closed-form equilibrium payoffs of a two-agent General Lotto game.

use crate::error::{Error, Result};

/// A single General Lotto game between a player and the adversary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LottoInstance {
    pub player_budget: f64,
    pub adversary_budget: f64,
    /// Cumulative value of all contests in the game.
    pub total_value: f64,
}

impl LottoInstance {
    pub fn new(player_budget: f64, adversary_budget: f64, total_value: f64) -> Result<Self> {
        if !(player_budget >= 0.0) || !player_budget.is_finite() {
            return Err(Error::domain("player_budget", player_budget, "must be >= 0"));
        }
        if !(adversary_budget >= 0.0) || !adversary_budget.is_finite() {
            return Err(Error::domain(
                "adversary_budget",
                adversary_budget,
                "must be >= 0",
            ));
        }
        if !(total_value > 0.0) || !total_value.is_finite() {
            return Err(Error::domain("total_value", total_value, "must be > 0"));
        }
        Ok(LottoInstance {
            player_budget,
            adversary_budget,
            total_value,
        })
    }

    /// `(player_payoff, adversary_payoff)` at equilibrium.
    pub fn equilibrium_payoff(&self) -> (f64, f64) {
        let u = player_payoff(self.player_budget, self.adversary_budget, self.total_value);
        (u, self.total_value - u)
    }
}

/// Validating form of [`player_payoff`].
pub fn equilibrium_payoff(inst: &LottoInstance) -> Result<(f64, f64)> {
    let checked = LottoInstance::new(inst.player_budget, inst.adversary_budget, inst.total_value)?;
    Ok(checked.equilibrium_payoff())
}

/// Equilibrium payoff of the player with budget `x` facing budget `xa` over
/// contests worth `phi` in total.
///
/// The player wins ties, so two empty budgets give the player everything.
/// Inputs are assumed nonnegative; callers on hot paths use this directly.
#[inline]
pub fn player_payoff(x: f64, xa: f64, phi: f64) -> f64 {
    if xa <= 0.0 {
        return phi;
    }
    if x <= xa {
        phi * x / (2.0 * xa)
    } else {
        phi * (1.0 - xa / (2.0 * x))
    }
}

/// Derivative of [`player_payoff`] with respect to the adversary's budget.
///
/// Nonpositive. At `xa = 0` this is the right derivative.
#[inline]
pub fn payoff_slope_wrt_adversary(x: f64, xa: f64, phi: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x <= xa {
        -phi * x / (2.0 * xa * xa)
    } else {
        -phi / (2.0 * x)
    }
}
