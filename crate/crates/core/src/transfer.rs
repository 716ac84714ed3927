//! Payoffs as a function of a lossy budget transfer between the players,
//! existence of mutually beneficial transfers, and the alliance-optimal
//! transfer.
//!
//! Every public entry point accepts a raw game (any player order, any
//! adversary budget) and reports transfers in the caller's units and player
//! order. Internally the game is normalized and oriented so that
//! `phi2 / phi1 <= x2 / x1`; in that frame every beneficial transfer flows
//! from Player 2 to Player 1, i.e. `tau < 0`.

use serde::{Deserialize, Serialize};

use crate::adversary::{
    classify, classify_budgets, normalize, stage_payoffs, CaseLabel, GameParams, Orientation,
};
use crate::error::{Error, Result};

/// Distance kept from the ends of the open transfer domain during evaluation.
pub const TAU_EDGE: f64 = 1e-12;
/// Absolute tolerance in `tau` for every bisection.
pub const BISECTION_TOL: f64 = 1e-9;
pub const BISECTION_MAX_ITER: usize = 200;
/// Number of probes used to bracket the end of the mutual-benefit interval.
const INTERVAL_PROBES: usize = 4096;

/// Net budget sent from Player 1 to Player 2 (negative: the other way),
/// of which the recipient receives the fraction `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transfer {
    pub tau: f64,
    pub beta: f64,
}

impl Transfer {
    pub fn new(tau: f64, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if !tau.is_finite() {
            return Err(Error::domain("tau", tau, "must be finite"));
        }
        Ok(Transfer { tau, beta })
    }

    fn check_for(&self, g: &GameParams) -> Result<()> {
        check_beta(self.beta)?;
        if !(self.tau > -g.x2 && self.tau < g.x1) {
            return Err(Error::domain("tau", self.tau, "must lie in (-x2, x1)"));
        }
        Ok(())
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain("beta", beta, "must lie in (0, 1]"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostTransferBudgets {
    pub x1_bar: f64,
    pub x2_bar: f64,
}

/// Equilibrium payoffs of both players and the adversary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffProfile {
    pub u1: f64,
    pub u2: f64,
    pub u_adversary: f64,
}

impl PayoffProfile {
    /// Combined payoff of the two players.
    pub fn alliance(&self) -> f64 {
        self.u1 + self.u2
    }

    /// Conservation to 1e-12 and per-player bounds `[0, phi_i]`.
    pub fn is_consistent(&self, phi1: f64, phi2: f64) -> bool {
        let total = phi1 + phi2;
        let eps = 1e-12 * total.max(1.0);
        (self.u1 + self.u2 + self.u_adversary - total).abs() <= eps
            && self.u1 >= -eps
            && self.u1 <= phi1 + eps
            && self.u2 >= -eps
            && self.u2 <= phi2 + eps
    }

    fn swapped(&self) -> Self {
        PayoffProfile {
            u1: self.u2,
            u2: self.u1,
            u_adversary: self.u_adversary,
        }
    }
}

/// Budgets after a transfer, in the units of `g`.
pub fn apply_transfer(g: &GameParams, t: &Transfer) -> Result<PostTransferBudgets> {
    g.validate()?;
    t.check_for(g)?;
    let (x1_bar, x2_bar) = induced_budgets(g, t.tau, t.beta);
    Ok(PostTransferBudgets { x1_bar, x2_bar })
}

#[inline]
fn induced_budgets(g: &GameParams, tau: f64, beta: f64) -> (f64, f64) {
    if tau > 0.0 {
        (g.x1 - tau, g.x2 + beta * tau)
    } else {
        (g.x1 - beta * tau, g.x2 + tau)
    }
}

/// The game induced by a transfer; `tau` is clamped into the open domain.
fn induced_game(g: &GameParams, tau: f64, beta: f64) -> GameParams {
    let edge = TAU_EDGE * g.adversary_budget;
    let tau = tau.clamp(-g.x2 + edge, g.x1 - edge);
    let (x1, x2) = induced_budgets(g, tau, beta);
    GameParams {
        x1: x1 / g.adversary_budget,
        x2: x2 / g.adversary_budget,
        adversary_budget: 1.0,
        ..*g
    }
}

/// Stage payoffs for an already normalized game; works in either frame.
#[inline]
fn payoffs_norm(g: &GameParams, tau: f64, beta: f64) -> PayoffProfile {
    stage_payoffs(&induced_game(g, tau, beta))
}

/// Equilibrium payoffs after the transfer `t`.
pub fn payoffs_at(g: &GameParams, t: &Transfer) -> Result<PayoffProfile> {
    g.validate()?;
    t.check_for(g)?;
    Ok(stage_payoffs(&induced_game(g, t.tau, t.beta)))
}

/// `(u1(tau) - u1(0), u2(tau) - u2(0))`.
pub fn delta_payoffs(g: &GameParams, t: &Transfer) -> Result<(f64, f64)> {
    let after = payoffs_at(g, t)?;
    let before = stage_payoffs(&induced_game(g, 0.0, t.beta));
    Ok((after.u1 - before.u1, after.u2 - before.u2))
}

/// `u1 + u2` after the transfer `t`.
pub fn alliance_payoff(g: &GameParams, t: &Transfer) -> Result<f64> {
    Ok(payoffs_at(g, t)?.alliance())
}

// Thresholds, in the oriented frame.

fn threshold_case2(g: &GameParams) -> f64 {
    (4.0 * g.phi2 * g.x1 / (g.phi1 * g.x2.powi(3))).sqrt() - g.x1 / g.x2
}

fn threshold_case3(g: &GameParams) -> f64 {
    (4.0 * g.phi2 * g.x1 / (g.phi1 * g.x2)).sqrt() + g.x1 / g.x2
}

pub(crate) fn mb_beta_threshold_oriented(g: &GameParams) -> f64 {
    threshold_case2(g).min(threshold_case3(g))
}

/// The efficiency above which Player 2 gains from a small donation, for the
/// regime the game is in. `None` when no efficiency suffices (Cases 1 and 4).
pub(crate) fn mb_case_threshold_oriented(g: &GameParams) -> Option<f64> {
    match classify(g) {
        CaseLabel::Case2 => Some(threshold_case2(g)),
        CaseLabel::Case3 => Some(threshold_case3(g)),
        CaseLabel::Case1 | CaseLabel::Case4 => None,
    }
}

pub(crate) fn mb_exists_oriented(g: &GameParams, beta: f64) -> bool {
    mb_case_threshold_oriented(g).is_some_and(|t| beta > t)
}

/// The efficiency at or below which the alliance-optimal transfer is zero.
/// `None` for Case 1 (never zero) and Case 4 (always zero).
pub(crate) fn alliance_case_threshold_oriented(g: &GameParams) -> Option<f64> {
    match classify(g) {
        CaseLabel::Case2 => {
            let r = (g.phi2 * g.x1 / (g.phi1 * g.x2)).sqrt();
            Some((r - g.x1) / g.x2)
        }
        CaseLabel::Case3 => {
            let r = (g.phi1 * g.phi2 / (g.x1 * g.x2)).sqrt();
            Some((g.phi2 + r * g.x1) / (g.phi1 + r * g.x2))
        }
        CaseLabel::Case1 | CaseLabel::Case4 => None,
    }
}

/// Whether moving `tau` further below its current value still raises the
/// alliance payoff, i.e. the left derivative of `u1 + u2` is negative.
///
/// Only meaningful for `tau <= 0` in the oriented frame.
fn alliance_rises_leftward(g: &GameParams, tau: f64, beta: f64) -> bool {
    let ind = induced_game(g, tau, beta);
    let (phi1, phi2, x1, x2) = (ind.phi1, ind.phi2, ind.x1, ind.x2);
    if !ind.is_oriented() && !ind.has_proportional_strength() {
        // Past proportional strength, further donations only help the
        // player the adversary already neglects.
        return false;
    }
    match classify_budgets(phi1, phi2, x1, x2) {
        CaseLabel::Case1 => true,
        CaseLabel::Case2 => x1 + beta * x2 > (phi2 * x1 / (phi1 * x2)).sqrt(),
        CaseLabel::Case3 => {
            beta * phi1 - phi2 > (phi1 * phi2 / (x1 * x2)).sqrt() * (x1 - beta * x2)
        }
        CaseLabel::Case4 => false,
    }
}

pub(crate) fn in_g_dagger_oriented(g: &GameParams, beta: f64) -> bool {
    match classify(g) {
        CaseLabel::Case1 => false,
        CaseLabel::Case2 => g.x1 + beta * g.x2 <= (g.phi2 * g.x1 / (g.phi1 * g.x2)).sqrt(),
        CaseLabel::Case3 => {
            beta * g.phi1 - g.phi2
                <= (g.phi1 * g.phi2 / (g.x1 * g.x2)).sqrt() * (g.x1 - beta * g.x2)
        }
        CaseLabel::Case4 => true,
    }
}

/// Bisection for the boundary of a predicate that is false on `[lo, b)` and
/// true on `(b, hi]`.
fn bisect_boundary(
    mut lo: f64,
    mut hi: f64,
    mut above: impl FnMut(f64) -> bool,
) -> (f64, f64, usize) {
    let mut iters = 0;
    while hi - lo > BISECTION_TOL && iters < BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
    }
    (lo, hi, iters)
}

/// Alliance-optimal transfer and its gain, in the oriented frame.
pub(crate) fn alliance_optimal_oriented(g: &GameParams, beta: f64) -> Result<(f64, f64)> {
    if in_g_dagger_oriented(g, beta) {
        return Ok((0.0, 0.0));
    }
    let lo = -g.x2 + TAU_EDGE;
    if !alliance_rises_leftward(g, 0.0, beta) {
        return Err(Error::Inconsistency(format!(
            "alliance payoff does not rise below tau = 0 although the game is outside G-dagger: \
             {g:?}, beta = {beta}"
        )));
    }
    if alliance_rises_leftward(g, lo, beta) {
        return Err(Error::Inconsistency(format!(
            "alliance payoff still rising at the edge of the transfer domain (tau = {lo}): \
             {g:?}, beta = {beta}"
        )));
    }
    let (a, b, _) = bisect_boundary(lo, 0.0, |t| alliance_rises_leftward(g, t, beta));
    let tau = 0.5 * (a + b);
    let gain = payoffs_norm(g, tau, beta).alliance() - payoffs_norm(g, 0.0, beta).alliance();
    Ok((tau, gain.max(0.0)))
}

/// The open interval of mutually beneficial transfers adjacent to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutualInterval {
    pub tau_low: f64,
    pub tau_high: f64,
    /// A second, disconnected stretch of mutual benefit was seen below
    /// `tau_low`.
    pub disconnected: bool,
}

pub(crate) fn mb_interval_oriented(g: &GameParams, beta: f64) -> Option<MutualInterval> {
    if !mb_exists_oriented(g, beta) {
        return None;
    }
    let base = payoffs_norm(g, 0.0, beta);
    let mutual = |tau: f64| {
        let p = payoffs_norm(g, tau, beta);
        p.u1 > base.u1 && p.u2 > base.u2
    };
    let lo = -g.x2 + TAU_EDGE;
    let step = g.x2 / INTERVAL_PROBES as f64;

    // Find a mutual point close to zero. Near the threshold the interval can
    // be shorter than one probe step.
    let mut inside = -step;
    let mut halvings = 0;
    while !mutual(inside) {
        halvings += 1;
        if halvings > 60 {
            return None;
        }
        inside *= 0.5;
    }

    // Walk away from zero until the first probe without mutual benefit.
    let mut outside = if halvings > 0 { Some(2.0 * inside) } else { None };
    let mut k = 1;
    while outside.is_none() && k < INTERVAL_PROBES {
        k += 1;
        let next = (-(k as f64) * step).max(lo);
        if mutual(next) {
            inside = next;
        } else {
            outside = Some(next);
        }
    }
    let Some(out) = outside else {
        return Some(MutualInterval {
            tau_low: -g.x2,
            tau_high: 0.0,
            disconnected: false,
        });
    };
    let (_, tau_low, _) = bisect_boundary(out, inside, mutual);
    let mut disconnected = false;
    let mut tau = out - step;
    while tau > lo {
        if mutual(tau) {
            disconnected = true;
            break;
        }
        tau -= step;
    }
    Some(MutualInterval {
        tau_low,
        tau_high: 0.0,
        disconnected,
    })
}

// Raw-frame entry points.

fn oriented(g: &GameParams, beta: Option<f64>) -> Result<(GameParams, Orientation)> {
    if let Some(b) = beta {
        check_beta(b)?;
    }
    normalize(g)
}

/// Efficiency threshold for mutual benefit, `min` over the two regimes.
pub fn mb_beta_threshold(g: &GameParams) -> Result<f64> {
    let (n, _) = oriented(g, None)?;
    Ok(mb_beta_threshold_oriented(&n))
}

/// Whether some transfer strictly raises both players' payoffs.
pub fn mb_exists(g: &GameParams, beta: f64) -> Result<bool> {
    let (n, _) = oriented(g, Some(beta))?;
    Ok(mb_exists_oriented(&n, beta))
}

/// The interval of mutually beneficial transfers adjacent to `tau = 0`, in
/// the caller's units and player order.
pub fn mb_interval(g: &GameParams, beta: f64) -> Result<Option<MutualInterval>> {
    let (n, o) = oriented(g, Some(beta))?;
    Ok(mb_interval_oriented(&n, beta).map(|iv| to_caller_interval(iv, o, g.adversary_budget)))
}

fn to_caller_interval(iv: MutualInterval, o: Orientation, scale: f64) -> MutualInterval {
    let (low, high) = if o.swapped {
        (-iv.tau_high, -iv.tau_low)
    } else {
        (iv.tau_low, iv.tau_high)
    };
    MutualInterval {
        tau_low: low * scale,
        tau_high: high * scale,
        disconnected: iv.disconnected,
    }
}

/// Whether the game lies in the set where the alliance-optimal transfer is
/// zero.
pub fn in_g_dagger(g: &GameParams, beta: f64) -> Result<bool> {
    let (n, _) = oriented(g, Some(beta))?;
    Ok(in_g_dagger_oriented(&n, beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllianceOptimum {
    pub tau: f64,
    pub gain: f64,
}

/// The transfer maximizing `u1 + u2` and the resulting gain over no transfer.
pub fn alliance_optimal(g: &GameParams, beta: f64) -> Result<AllianceOptimum> {
    let (n, o) = oriented(g, Some(beta))?;
    let (tau, gain) = alliance_optimal_oriented(&n, beta)?;
    Ok(AllianceOptimum {
        tau: o.tau_to_caller(tau) * g.adversary_budget,
        gain,
    })
}

/// Everything known about transfers in one game at one efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferAnalysis {
    pub beta: f64,
    pub orientation: Orientation,
    pub case_at_zero: CaseLabel,
    /// Payoffs with no transfer, in the caller's player order.
    pub nominal: PayoffProfile,
    pub mb_exists: bool,
    pub mb_interval: Option<(f64, f64)>,
    /// The interval could not be located, or more than one stretch of mutual
    /// benefit was seen.
    pub mb_interval_anomaly: bool,
    pub mb_beta_threshold: f64,
    pub mb_case_threshold: Option<f64>,
    pub alliance_tau: f64,
    pub alliance_payoff_gain: f64,
    pub alliance_beta_threshold: Option<f64>,
    pub in_g_dagger: bool,
    pub payoffs_at_alliance_tau: PayoffProfile,
}

/// Full transfer analysis of a raw game.
pub fn analyze(g: &GameParams, beta: f64) -> Result<TransferAnalysis> {
    let (n, o) = oriented(g, Some(beta))?;
    let scale = g.adversary_budget;
    let case_at_zero = classify(&n);
    let nominal_oriented = payoffs_norm(&n, 0.0, beta);
    let mb = mb_exists_oriented(&n, beta);
    let interval = mb_interval_oriented(&n, beta);
    let (tau_dagger, gain) = alliance_optimal_oriented(&n, beta)?;
    let at_dagger = payoffs_norm(&n, tau_dagger, beta);
    let to_caller = |p: PayoffProfile| if o.swapped { p.swapped() } else { p };
    Ok(TransferAnalysis {
        beta,
        orientation: o,
        case_at_zero,
        nominal: to_caller(nominal_oriented),
        mb_exists: mb,
        mb_interval: interval
            .map(|iv| to_caller_interval(iv, o, scale))
            .map(|iv| (iv.tau_low, iv.tau_high)),
        mb_interval_anomaly: interval.is_some_and(|iv| iv.disconnected)
            || (mb && interval.is_none()),
        mb_beta_threshold: mb_beta_threshold_oriented(&n),
        mb_case_threshold: mb_case_threshold_oriented(&n),
        alliance_tau: o.tau_to_caller(tau_dagger) * scale,
        alliance_payoff_gain: gain,
        alliance_beta_threshold: alliance_case_threshold_oriented(&n),
        in_g_dagger: in_g_dagger_oriented(&n, beta),
        payoffs_at_alliance_tau: to_caller(at_dagger),
    })
}

/// Payoffs of a normalized, oriented game after a transfer, without
/// validation. Used by the sweeps.
pub(crate) fn payoffs_oriented(g: &GameParams, tau: f64, beta: f64) -> PayoffProfile {
    payoffs_norm(g, tau, beta)
}
