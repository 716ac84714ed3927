//! Grid scan over transfers, diffed against the closed forms.

use serde::{Deserialize, Serialize};

use super::grid::{adversary_grid_best_response, grid_scan, GridScan};
use super::{Disagreement, OracleConfig};
use crate::adversary::{normalize, respond, CaseLabel, GameParams, Orientation};
use crate::error::Result;
use crate::transfer::{self, check_beta, TransferAnalysis};

/// Half-width of the efficiency band around each closed-form threshold in
/// which existence verdicts are not compared.
pub const THRESHOLD_BAND: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub orientation: Orientation,
    pub mb_exists_grid: bool,
    /// In the caller's units and player order.
    pub best_mutual_tau: Option<f64>,
    /// A transfer from Player 1 to Player 2 of the oriented frame that
    /// improves both players (normalized units).
    pub oriented_positive_mutual_tau: Option<f64>,
    pub alliance_argmax_tau: f64,
    pub alliance_max: f64,
    pub alliance_at_zero: f64,
    /// `|tau_dagger - alliance_argmax_tau|`, caller's units.
    pub alliance_tau_deviation: f64,
    /// Largest `|x_a1|` gap between the closed-form and refined grid split
    /// over all transfers outside Case 4.
    pub max_split_deviation: f64,
    pub mb_compared: bool,
    pub alliance_compared: bool,
    /// Closed-form payoff evaluations checked for conservation and bounds.
    pub payoff_checks: usize,
    pub payoff_violations: usize,
    pub disagreements: Vec<Disagreement>,
}

fn in_band(threshold: Option<f64>, beta: f64, band: f64) -> bool {
    threshold.is_some_and(|t| (beta - t).abs() < band)
}

/// Evaluates every transfer on the `tau_step` grid with a brute-force
/// adversary and compares against [`transfer::analyze`].
pub fn transfer_grid_scan(g: &GameParams, beta: f64, cfg: &OracleConfig) -> Result<OracleReport> {
    check_beta(beta)?;
    let (n, o) = normalize(g)?;
    cfg.validate_for(&n)?;
    let scan = grid_scan(&n, beta, cfg);
    let closed = transfer::analyze(g, beta)?;
    Ok(compare(g, &n, o, beta, cfg, &scan, &closed, THRESHOLD_BAND))
}

#[allow(clippy::too_many_arguments)]
fn compare(
    raw: &GameParams,
    n: &GameParams,
    o: Orientation,
    beta: f64,
    cfg: &OracleConfig,
    scan: &GridScan,
    closed: &TransferAnalysis,
    band: f64,
) -> OracleReport {
    let scale = raw.adversary_budget;
    let to_caller = |t: f64| o.tau_to_caller(t) * scale;
    let mut out = Vec::new();
    let mut checks = 0;
    let mut violations = 0;

    let mb_compared = !in_band(closed.mb_case_threshold, beta, band);
    let grid_mb = scan.best_mutual_tau.is_some();
    if mb_compared && grid_mb != closed.mb_exists {
        out.push(Disagreement {
            quantity: "mb_exists".into(),
            closed_form_value: f64::from(u8::from(closed.mb_exists)),
            grid_value: f64::from(u8::from(grid_mb)),
        });
    }
    if let Some(t) = scan.positive_mutual_tau {
        out.push(Disagreement {
            quantity: "mutual_tau_sign".into(),
            closed_form_value: -1.0,
            grid_value: t,
        });
    }

    // The alliance payoff at the closed-form optimum must not be beaten by
    // any grid point, and must itself be reachable within the grid's
    // resolution.
    let alliance_compared = !in_band(closed.alliance_beta_threshold, beta, band);
    let tau_dagger_norm = o.tau_to_caller(closed.alliance_tau / scale);
    let closed_best = transfer::payoffs_oriented(n, tau_dagger_norm, beta);
    checks += 1;
    if !closed_best.is_consistent(n.phi1, n.phi2) {
        violations += 1;
    }
    let closed_value = closed_best.alliance();
    let slack = cfg.tolerance + scan.alliance_lipschitz * cfg.tau_step;
    if alliance_compared
        && (scan.alliance_max > closed_value + cfg.tolerance
            || closed_value > scan.alliance_max + slack)
    {
        out.push(Disagreement {
            quantity: "alliance_max".into(),
            closed_form_value: closed_value,
            grid_value: scan.alliance_max,
        });
    }

    // Adversary splits: the plain grid at tau = 0, and the refined grid
    // at every transfer.
    let base = &scan.samples[scan.zero_index];
    let (r0, _) = respond(&closed_input(n, 0.0, beta));
    if r0.case_label != CaseLabel::Case4 {
        let (a_grid, v_grid) = adversary_grid_best_response(n, cfg.split_step);
        let v_closed = super::grid::adversary_value(n, n.x1, n.x2, r0.x_a1);
        let lip = super::grid::split_lipschitz(n, cfg.split_step);
        if (a_grid - r0.x_a1).abs() > cfg.split_step + 1e-12
            || v_grid > v_closed + lip * cfg.split_step
        {
            out.push(Disagreement {
                quantity: "adversary_split_at_zero".into(),
                closed_form_value: r0.x_a1,
                grid_value: a_grid,
            });
        }
    }
    let mut max_split_dev: f64 = 0.0;
    let mut worst_value_gap = (0.0, 0.0, 0.0);
    for s in &scan.samples {
        let p = transfer::payoffs_oriented(n, s.tau, beta);
        checks += 1;
        if !p.is_consistent(n.phi1, n.phi2) {
            violations += 1;
        }
        let gap = s.u_adversary - p.u_adversary;
        if gap > worst_value_gap.0 {
            worst_value_gap = (gap, p.u_adversary, s.u_adversary);
        }
        let (r, _) = respond(&closed_input(n, s.tau, beta));
        if r.case_label != CaseLabel::Case4 {
            max_split_dev = max_split_dev.max((r.x_a1 - s.x_a1).abs());
        }
    }
    if worst_value_gap.0 > cfg.tolerance {
        out.push(Disagreement {
            quantity: "adversary_payoff".into(),
            closed_form_value: worst_value_gap.1,
            grid_value: worst_value_gap.2,
        });
    }

    OracleReport {
        orientation: o,
        mb_exists_grid: grid_mb,
        best_mutual_tau: scan.best_mutual_tau.map(to_caller),
        oriented_positive_mutual_tau: scan.positive_mutual_tau,
        alliance_argmax_tau: to_caller(scan.alliance_argmax_tau),
        alliance_max: scan.alliance_max,
        alliance_at_zero: base.alliance(),
        alliance_tau_deviation: (closed.alliance_tau - to_caller(scan.alliance_argmax_tau)).abs(),
        max_split_deviation: max_split_dev,
        mb_compared,
        alliance_compared,
        payoff_checks: checks,
        payoff_violations: violations,
        disagreements: out,
    }
}

/// The normalized induced game, as seen by the closed-form adversary.
fn closed_input(n: &GameParams, tau: f64, beta: f64) -> GameParams {
    let (x1, x2) = super::grid::post_transfer(n, tau, beta);
    GameParams { x1, x2, ..*n }
}
