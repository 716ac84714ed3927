//! The adversary's optimal division of its budget between the two fronts.
//!
//! All formulas here assume the adversary budget has been normalized to one
//! and the players are ordered so that `phi2 / phi1 <= x2 / x1`. [`normalize`]
//! establishes both; [`respond`] handles games in either player order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lotto::player_payoff;
use crate::transfer::PayoffProfile;

/// Relative tolerance under which `phi2 * x1 == phi1 * x2` is treated as an
/// exact proportional-strength (Case 4) game.
pub const CASE4_REL_TOL: f64 = 1e-9;

/// A coalitional game: valuations and budgets of the two players plus the
/// adversary's budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub phi1: f64,
    pub phi2: f64,
    pub x1: f64,
    pub x2: f64,
    pub adversary_budget: f64,
}

impl GameParams {
    /// A game against an adversary with unit budget.
    pub fn new(phi1: f64, phi2: f64, x1: f64, x2: f64) -> Result<Self> {
        Self::with_adversary_budget(phi1, phi2, x1, x2, 1.0)
    }

    pub fn with_adversary_budget(
        phi1: f64,
        phi2: f64,
        x1: f64,
        x2: f64,
        adversary_budget: f64,
    ) -> Result<Self> {
        let g = GameParams {
            phi1,
            phi2,
            x1,
            x2,
            adversary_budget,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("phi1", self.phi1),
            ("phi2", self.phi2),
            ("x1", self.x1),
            ("x2", self.x2),
            ("adversary_budget", self.adversary_budget),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(name, v, "must be a finite value > 0"));
            }
        }
        Ok(())
    }

    /// The same game with the two players exchanged.
    pub fn swapped(&self) -> Self {
        GameParams {
            phi1: self.phi2,
            phi2: self.phi1,
            x1: self.x2,
            x2: self.x1,
            adversary_budget: self.adversary_budget,
        }
    }

    /// `phi2 / phi1 <= x2 / x1`, the frame in which the case analysis is stated.
    pub fn is_oriented(&self) -> bool {
        self.phi2 * self.x1 <= self.phi1 * self.x2
    }

    /// `phi2 / phi1 == x2 / x1` up to [`CASE4_REL_TOL`].
    pub fn has_proportional_strength(&self) -> bool {
        proportional(self.phi1, self.phi2, self.x1, self.x2)
    }

    pub fn total_value(&self) -> f64 {
        self.phi1 + self.phi2
    }
}

/// Whether the players were exchanged to reach the oriented frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Orientation {
    pub swapped: bool,
}

impl Orientation {
    /// Maps a transfer expressed in the oriented frame back to the caller's.
    pub fn tau_to_caller(&self, tau: f64) -> f64 {
        if self.swapped {
            -tau
        } else {
            tau
        }
    }

    /// Maps a per-player pair from the oriented frame back to the caller's.
    pub fn pair_to_caller<T>(&self, a: T, b: T) -> (T, T) {
        if self.swapped {
            (b, a)
        } else {
            (a, b)
        }
    }
}

/// The four regimes of the adversary's optimal division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    /// Everything goes against Player 1.
    Case1,
    /// Player 2 is stronger than its share of the adversary.
    Case2,
    /// Both players face at least their own budget.
    Case3,
    /// Proportional strength; the adversary is indifferent.
    Case4,
}

impl CaseLabel {
    pub fn number(&self) -> u8 {
        match self {
            CaseLabel::Case1 => 1,
            CaseLabel::Case2 => 2,
            CaseLabel::Case3 => 3,
            CaseLabel::Case4 => 4,
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Case label plus the adversary's split, in Player 1 / Player 2 order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversaryResponse {
    pub case_label: CaseLabel,
    pub x_a1: f64,
    pub x_a2: f64,
}

/// Divides budgets by the adversary's budget and exchanges the players when
/// needed so that `phi2 / phi1 <= x2 / x1`.
pub fn normalize(raw: &GameParams) -> Result<(GameParams, Orientation)> {
    raw.validate()?;
    let xa = raw.adversary_budget;
    let scaled = GameParams {
        x1: raw.x1 / xa,
        x2: raw.x2 / xa,
        adversary_budget: 1.0,
        ..*raw
    };
    if scaled.is_oriented() {
        Ok((scaled, Orientation { swapped: false }))
    } else {
        Ok((scaled.swapped(), Orientation { swapped: true }))
    }
}

fn proportional(phi1: f64, phi2: f64, x1: f64, x2: f64) -> bool {
    let a = phi2 * x1;
    let b = phi1 * x2;
    (a - b).abs() <= CASE4_REL_TOL * a.max(b)
}

/// `sqrt(phi1 x1 x2 / phi2)`: the Case 2 allocation against Player 1.
fn interior_share(phi1: f64, phi2: f64, x1: f64, x2: f64) -> f64 {
    (phi1 * x1 * x2 / phi2).sqrt()
}

pub(crate) fn classify_budgets(phi1: f64, phi2: f64, x1: f64, x2: f64) -> CaseLabel {
    let prop = proportional(phi1, phi2, x1, x2);
    if prop && x1 + x2 >= 1.0 {
        return CaseLabel::Case4;
    }
    if !prop && phi2 <= phi1 * x1 * x2 {
        return CaseLabel::Case1;
    }
    if 1.0 - interior_share(phi1, phi2, x1, x2) <= x2 {
        CaseLabel::Case2
    } else {
        CaseLabel::Case3
    }
}

pub(crate) fn split_budgets(case: CaseLabel, phi1: f64, phi2: f64, x1: f64, x2: f64) -> f64 {
    let a = match case {
        CaseLabel::Case1 => 1.0,
        CaseLabel::Case2 => interior_share(phi1, phi2, x1, x2),
        CaseLabel::Case3 => {
            let s1 = (phi1 * x1).sqrt();
            let s2 = (phi2 * x2).sqrt();
            s1 / (s1 + s2)
        }
        CaseLabel::Case4 => x1 / (x1 + x2),
    };
    a.clamp(0.0, 1.0)
}

/// Table of adversary regimes for a normalized, oriented game.
///
/// Case 4 is tested first, then Cases 1, 2 and 3 in order.
pub fn classify(g: &GameParams) -> CaseLabel {
    debug_assert!(g.is_oriented(), "classify expects an oriented game");
    classify_budgets(g.phi1, g.phi2, g.x1, g.x2)
}

/// The adversary's optimal split for a normalized, oriented game.
///
/// In Case 4 every split with `x_a_i <= x_i` is optimal; the proportional
/// split `x_i / (x1 + x2)` is returned by convention.
pub fn optimal_split(g: &GameParams) -> AdversaryResponse {
    let case_label = classify(g);
    let x_a1 = split_budgets(case_label, g.phi1, g.phi2, g.x1, g.x2);
    AdversaryResponse {
        case_label,
        x_a1,
        x_a2: 1.0 - x_a1,
    }
}

/// Best response for a normalized game in either player order.
///
/// The case label refers to the oriented frame recorded in the returned
/// [`Orientation`]; the split is in the caller's player order.
pub fn respond(g: &GameParams) -> (AdversaryResponse, Orientation) {
    if g.is_oriented() {
        (optimal_split(g), Orientation { swapped: false })
    } else {
        let r = optimal_split(&g.swapped());
        (
            AdversaryResponse {
                case_label: r.case_label,
                x_a1: r.x_a2,
                x_a2: r.x_a1,
            },
            Orientation { swapped: true },
        )
    }
}

/// Equilibrium payoffs once the adversary has best-responded.
///
/// Expects a normalized game; player order is arbitrary.
pub fn stage_payoffs(g: &GameParams) -> PayoffProfile {
    let (r, _) = respond(g);
    payoffs_for_split(g, r.x_a1)
}

pub(crate) fn payoffs_for_split(g: &GameParams, x_a1: f64) -> PayoffProfile {
    let u1 = player_payoff(g.x1, x_a1, g.phi1);
    let u2 = player_payoff(g.x2, 1.0 - x_a1, g.phi2);
    let p = PayoffProfile {
        u1,
        u2,
        u_adversary: g.phi1 + g.phi2 - u1 - u2,
    };
    debug_assert!(p.is_consistent(g.phi1, g.phi2), "{p:?} for {g:?}");
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(phi1: f64, phi2: f64, x1: f64, x2: f64) -> GameParams {
        GameParams::new(phi1, phi2, x1, x2).unwrap()
    }

    #[test]
    fn normalize_keeps_oriented_game() {
        let (n, o) = normalize(&g(1.0, 1.2, 0.5, 1.5)).unwrap();
        assert_eq!(n, g(1.0, 1.2, 0.5, 1.5));
        assert!(!o.swapped);
    }

    #[test]
    fn normalize_swaps_mirror() {
        let (n, o) = normalize(&g(1.2, 1.0, 1.5, 0.5)).unwrap();
        assert_eq!(n, g(1.0, 1.2, 0.5, 1.5));
        assert!(o.swapped);
    }

    #[test]
    fn normalize_scales_budgets() {
        let raw = GameParams::with_adversary_budget(2.0, 2.4, 1.0, 3.0, 2.0).unwrap();
        let (n, o) = normalize(&raw).unwrap();
        assert_eq!(n, g(2.0, 2.4, 0.5, 1.5));
        assert!(!o.swapped);
    }

    #[test]
    fn normalize_rejects_nonpositive() {
        let raw = GameParams {
            phi1: 1.0,
            phi2: 0.0,
            x1: 1.0,
            x2: 1.0,
            adversary_budget: 1.0,
        };
        assert!(matches!(normalize(&raw), Err(Error::Domain { name: "phi2", .. })));
        assert!(GameParams::with_adversary_budget(1.0, 1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&g(1.0, 1.2, 0.5, 1.5)), CaseLabel::Case2);
        assert_eq!(classify(&g(1.0, 1.2, 2.0, 3.0)), CaseLabel::Case1);
        assert_eq!(classify(&g(2.0, 0.5, 0.05, 0.5)), CaseLabel::Case3);
        assert_eq!(classify(&g(1.0, 2.0, 0.5, 1.0)), CaseLabel::Case4);
    }

    #[test]
    fn proportional_but_small_budgets_is_case3_with_proportional_split() {
        let game = g(1.0, 2.0, 0.2, 0.4);
        let r = optimal_split(&game);
        assert_eq!(r.case_label, CaseLabel::Case3);
        assert!((r.x_a1 - 0.2 / 0.6).abs() < 1e-12);
    }

    #[test]
    fn split_examples() {
        let r = optimal_split(&g(1.0, 1.2, 0.5, 1.5));
        assert_eq!(r.case_label, CaseLabel::Case2);
        assert!((r.x_a1 - 0.625f64.sqrt()).abs() < 1e-15);
        assert!((r.x_a1 + r.x_a2 - 1.0).abs() < 1e-15);

        let r = optimal_split(&g(1.0, 1.2, 2.0, 3.0));
        assert_eq!((r.case_label, r.x_a1, r.x_a2), (CaseLabel::Case1, 1.0, 0.0));

        let r = optimal_split(&g(1.0, 2.0, 0.5, 1.0));
        assert_eq!(r.case_label, CaseLabel::Case4);
        assert!((r.x_a1 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn stage_payoff_examples() {
        let p = stage_payoffs(&g(1.0, 1.2, 2.0, 3.0));
        assert_eq!(p.u2, 1.2);

        let p = stage_payoffs(&g(1.0, 1.2, 0.5, 1.5));
        let expected_u1 = 0.5 * (1.2f64 * 0.5 / 1.5).sqrt();
        assert!((p.u1 - expected_u1).abs() < 1e-12);
        assert!((p.u1 - 0.316_227_766).abs() < 1e-9);

        let p = stage_payoffs(&g(1.0, 2.0, 0.5, 1.0));
        assert!((p.u1 + p.u2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn respond_mirrors_split() {
        let (a, oa) = respond(&g(1.0, 1.2, 0.5, 1.5));
        let (b, ob) = respond(&g(1.2, 1.0, 1.5, 0.5));
        assert!(!oa.swapped && ob.swapped);
        assert_eq!(a.case_label, b.case_label);
        assert_eq!(a.x_a1, b.x_a2);
        assert_eq!(a.x_a2, b.x_a1);
    }
}
