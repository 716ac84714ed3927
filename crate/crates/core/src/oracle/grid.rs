//! Enumeration-only evaluation of the coalitional game.
//!
//! Nothing here may depend on the adversary's closed-form regimes or on the
//! transfer analysis; the only game knowledge used is the Lotto payoff
//! function and its slope.

use serde::{Deserialize, Serialize};

use super::OracleConfig;
use crate::adversary::GameParams;
use crate::lotto::{payoff_slope_wrt_adversary, player_payoff};

/// Budgets after a transfer, computed independently of the transfer engine.
pub fn post_transfer(g: &GameParams, tau: f64, beta: f64) -> (f64, f64) {
    if tau > 0.0 {
        (g.x1 - tau, g.x2 + beta * tau)
    } else {
        (g.x1 + beta * tau.abs(), g.x2 - tau.abs())
    }
}

fn unit_budgets(g: &GameParams) -> (f64, f64) {
    (g.x1 / g.adversary_budget, g.x2 / g.adversary_budget)
}

/// Adversary payoff when it sends `a` of its unit budget against Player 1.
#[inline]
pub fn adversary_value(g: &GameParams, x1: f64, x2: f64, a: f64) -> f64 {
    g.phi1 + g.phi2 - player_payoff(x1, a, g.phi1) - player_payoff(x2, 1.0 - a, g.phi2)
}

#[inline]
fn adversary_value_slope(g: &GameParams, x1: f64, x2: f64, a: f64) -> f64 {
    -payoff_slope_wrt_adversary(x1, a, g.phi1) + payoff_slope_wrt_adversary(x2, 1.0 - a, g.phi2)
}

fn grid_points(split_step: f64) -> usize {
    ((1.0 / split_step).round() as usize).max(1)
}

/// Enumerates `x_a1` over `{0, step, ..., 1}` and returns the best split and
/// the adversary's payoff there. Ties go to the smallest `x_a1`.
pub fn adversary_grid_best_response(induced: &GameParams, split_step: f64) -> (f64, f64) {
    let (x1, x2) = unit_budgets(induced);
    let n = grid_points(split_step);
    let mut best = (0.0, adversary_value(induced, x1, x2, 0.0));
    for k in 1..=n {
        let a = k as f64 / n as f64;
        let v = adversary_value(induced, x1, x2, a);
        if v > best.1 {
            best = (a, v);
        }
    }
    best
}

/// Grid best response refined inside its grid cell.
///
/// The adversary's payoff is concave in its split, so the grid argmax is
/// found by a discrete ternary search and then polished by bisection on the
/// sign of the payoff's slope within the neighboring cells.
pub fn adversary_refined_best_response(induced: &GameParams, split_step: f64) -> (f64, f64) {
    let (x1, x2) = unit_budgets(induced);
    refined_unit(induced, x1, x2, split_step)
}

fn refined_unit(g: &GameParams, x1: f64, x2: f64, split_step: f64) -> (f64, f64) {
    let n = grid_points(split_step);
    let value = |k: usize| adversary_value(g, x1, x2, k as f64 / n as f64);

    let (mut lo, mut hi) = (0usize, n);
    while hi - lo > 2 {
        let m1 = lo + (hi - lo) / 3;
        let m2 = hi - (hi - lo) / 3;
        let (v1, v2) = (value(m1), value(m2));
        if v1 < v2 {
            lo = m1 + 1;
        } else if v1 > v2 {
            hi = m2 - 1;
        } else {
            lo = m1;
            hi = m2;
        }
    }
    let mut k_best = lo;
    let mut v_best = value(lo);
    for k in lo + 1..=hi {
        let v = value(k);
        if v > v_best {
            k_best = k;
            v_best = v;
        }
    }
    while k_best > 0 && value(k_best - 1) >= v_best {
        k_best -= 1;
    }

    let mut a_lo = k_best.saturating_sub(1) as f64 / n as f64;
    let mut a_hi = (k_best + 1).min(n) as f64 / n as f64;
    let slope = |a: f64| adversary_value_slope(g, x1, x2, a);
    let polished = if slope(a_lo) <= 0.0 {
        a_lo
    } else if slope(a_hi) > 0.0 {
        a_hi
    } else {
        for _ in 0..64 {
            let mid = 0.5 * (a_lo + a_hi);
            if slope(mid) > 0.0 {
                a_lo = mid;
            } else {
                a_hi = mid;
            }
        }
        a_hi
    };
    let v_polished = adversary_value(g, x1, x2, polished);
    if v_polished >= v_best {
        (polished, v_polished)
    } else {
        (k_best as f64 / n as f64, v_best)
    }
}

/// Largest finite-difference slope of the adversary's payoff over the split
/// grid; multiplied by the step it bounds the grid's discretization error.
pub fn split_lipschitz(induced: &GameParams, split_step: f64) -> f64 {
    let (x1, x2) = unit_budgets(induced);
    let n = grid_points(split_step);
    let h = 1.0 / n as f64;
    let mut prev = adversary_value(induced, x1, x2, 0.0);
    let mut lip: f64 = 0.0;
    for k in 1..=n {
        let v = adversary_value(induced, x1, x2, k as f64 / n as f64);
        lip = lip.max((v - prev).abs() / h);
        prev = v;
    }
    lip
}

/// Payoffs at one transfer, with the adversary's split found by the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub tau: f64,
    pub x_a1: f64,
    pub u1: f64,
    pub u2: f64,
    pub u_adversary: f64,
}

impl GridSample {
    pub fn alliance(&self) -> f64 {
        self.u1 + self.u2
    }
}

/// Evaluates the game after the transfer `tau` with a grid adversary.
pub fn grid_payoffs(g: &GameParams, tau: f64, beta: f64, split_step: f64) -> GridSample {
    let (x1, x2) = post_transfer(g, tau, beta);
    let (x1, x2) = (x1 / g.adversary_budget, x2 / g.adversary_budget);
    let (a, v) = refined_unit(g, x1, x2, split_step);
    let u1 = player_payoff(x1, a, g.phi1);
    let u2 = player_payoff(x2, 1.0 - a, g.phi2);
    GridSample {
        tau,
        x_a1: a,
        u1,
        u2,
        u_adversary: v,
    }
}

/// Transfers `k * tau_step` strictly inside `(-x2, x1)`, ascending.
pub fn tau_grid(g: &GameParams, tau_step: f64) -> Vec<f64> {
    let k_min = (-g.x2 / tau_step).floor() as i64 + 1;
    let k_max = (g.x1 / tau_step).ceil() as i64 - 1;
    (k_min..=k_max)
        .map(|k| k as f64 * tau_step)
        .filter(|&t| t > -g.x2 && t < g.x1)
        .collect()
}

/// Outcome of evaluating every transfer on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScan {
    pub samples: Vec<GridSample>,
    /// Index of `tau = 0` in `samples`.
    pub zero_index: usize,
    /// Transfer maximizing `min(du1, du2)` among mutually improving ones.
    pub best_mutual_tau: Option<f64>,
    /// First `tau > 0` that improves both players.
    pub positive_mutual_tau: Option<f64>,
    pub alliance_argmax_tau: f64,
    pub alliance_max: f64,
    /// Largest `|d(u1 + u2)| / tau_step` between neighboring samples.
    pub alliance_lipschitz: f64,
}

/// Scans all transfers on the grid. Samples are computed in parallel and
/// reduced in ascending `tau` order, so the result does not depend on
/// scheduling.
pub fn grid_scan(g: &GameParams, beta: f64, cfg: &OracleConfig) -> GridScan {
    use rayon::prelude::*;

    let taus = tau_grid(g, cfg.tau_step);
    let samples: Vec<GridSample> = taus
        .par_iter()
        .map(|&t| grid_payoffs(g, t, beta, cfg.split_step))
        .collect();
    let zero_index = taus
        .iter()
        .position(|&t| t == 0.0)
        .expect("tau grid always contains zero");
    let base = samples[zero_index];

    let mut best_mutual: Option<(f64, f64)> = None;
    let mut positive_mutual_tau = None;
    let mut argmax = (samples[0].tau, samples[0].alliance());
    let mut lip: f64 = 0.0;
    for (i, s) in samples.iter().enumerate() {
        let d1 = s.u1 - base.u1;
        let d2 = s.u2 - base.u2;
        if d1 > cfg.tolerance && d2 > cfg.tolerance {
            let score = d1.min(d2);
            if best_mutual.is_none_or(|(_, b)| score > b) {
                best_mutual = Some((s.tau, score));
            }
            if s.tau > 0.0 && positive_mutual_tau.is_none() {
                positive_mutual_tau = Some(s.tau);
            }
        }
        if s.alliance() > argmax.1 {
            argmax = (s.tau, s.alliance());
        }
        if i > 0 {
            let prev = &samples[i - 1];
            lip = lip.max((s.alliance() - prev.alliance()).abs() / (s.tau - prev.tau));
        }
    }
    GridScan {
        samples,
        zero_index,
        best_mutual_tau: best_mutual.map(|(t, _)| t),
        positive_mutual_tau,
        alliance_argmax_tau: argmax.0,
        alliance_max: argmax.1,
        alliance_lipschitz: lip,
    }
}
