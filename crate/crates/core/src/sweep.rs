//! Parameter rasters, payoff curves over the transfer, and efficiency sweeps.
//!
//! Outputs are ordered deterministically regardless of how cells are
//! scheduled: rasters run `beta` outermost, then the second axis, then the
//! first axis innermost.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{classify, normalize, CaseLabel, GameParams};
use crate::error::{Error, Result};
use crate::transfer::{
    self, alliance_optimal_oriented, check_beta, in_g_dagger_oriented,
    mb_beta_threshold_oriented, mb_exists_oriented, mb_interval_oriented, payoffs_oriented,
    Transfer, TAU_EDGE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Phi1,
    Phi2,
    X1,
    X2,
}

impl Param {
    const ALL: [Param; 4] = [Param::Phi1, Param::Phi2, Param::X1, Param::X2];

    fn set(self, g: &mut GameParams, v: f64) {
        match self {
            Param::Phi1 => g.phi1 = v,
            Param::Phi2 => g.phi2 = v,
            Param::X1 => g.x1 = v,
            Param::X2 => g.x2 = v,
        }
    }
}

/// An evenly spaced axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub lower: f64,
    pub upper: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(param: Param, lower: f64, upper: f64, steps: usize) -> Self {
        Axis {
            param,
            lower,
            upper,
            steps,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        self.lower + (self.upper - self.lower) * i as f64 / (self.steps - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Config(format!(
                "axis {:?} needs at least 2 steps",
                self.param
            )));
        }
        if !(self.lower < self.upper) || !self.lower.is_finite() || !self.upper.is_finite() {
            return Err(Error::Config(format!(
                "axis {:?} needs lower < upper, got [{}, {}]",
                self.param, self.lower, self.upper
            )));
        }
        if self.lower <= 0.0 {
            return Err(Error::Config(format!(
                "axis {:?} must stay positive, got lower = {}",
                self.param, self.lower
            )));
        }
        Ok(())
    }
}

/// A one- or two-parameter raster with the remaining parameters fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    /// Innermost axis.
    pub x_axis: Axis,
    pub y_axis: Option<Axis>,
    pub fixed: Vec<(Param, f64)>,
    pub betas: Vec<f64>,
}

impl SweepGrid {
    /// The usual region map: budgets on both axes, valuations fixed.
    pub fn budgets(phi1: f64, phi2: f64, x1: Axis, x2: Axis, betas: Vec<f64>) -> Self {
        SweepGrid {
            x_axis: x1,
            y_axis: Some(x2),
            fixed: vec![(Param::Phi1, phi1), (Param::Phi2, phi2)],
            betas,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x_axis.validate()?;
        if let Some(y) = &self.y_axis {
            y.validate()?;
        }
        if self.betas.is_empty() {
            return Err(Error::Config("beta list is empty".into()));
        }
        for &b in &self.betas {
            check_beta(b).map_err(|e| Error::Config(e.to_string()))?;
        }
        for p in Param::ALL {
            let swept = usize::from(self.x_axis.param == p)
                + usize::from(self.y_axis.is_some_and(|a| a.param == p));
            let fixed = self.fixed.iter().filter(|(q, _)| *q == p).count();
            if swept + fixed != 1 {
                return Err(Error::Config(format!(
                    "parameter {p:?} must be either swept or fixed exactly once"
                )));
            }
        }
        for &(p, v) in &self.fixed {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("fixed {p:?} = {v} must be > 0")));
            }
        }
        Ok(())
    }

    fn game_at(&self, ix: usize, iy: usize) -> GameParams {
        let mut g = GameParams {
            phi1: 0.0,
            phi2: 0.0,
            x1: 0.0,
            x2: 0.0,
            adversary_budget: 1.0,
        };
        for &(p, v) in &self.fixed {
            p.set(&mut g, v);
        }
        self.x_axis.param.set(&mut g, self.x_axis.value(ix));
        if let Some(y) = &self.y_axis {
            y.param.set(&mut g, y.value(iy));
        }
        g
    }

    pub fn len(&self) -> usize {
        self.betas.len() * self.x_axis.steps * self.y_axis.map_or(1, |a| a.steps)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellAnalysis {
    pub case_label: CaseLabel,
    pub mb_exists: bool,
    pub tau_dagger: f64,
    pub mb_beta_threshold: f64,
    pub alliance_gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub beta: f64,
    pub game: GameParams,
    /// `phi2 / phi1 <= x2 / x1`; mirrored games are not analyzed.
    pub in_frame: bool,
    pub analysis: Option<CellAnalysis>,
}

fn analyze_cell(g: &GameParams, beta: f64) -> Result<Option<CellAnalysis>> {
    if !g.is_oriented() {
        return Ok(None);
    }
    let (n, _) = normalize(g)?;
    let (tau, gain) = alliance_optimal_oriented(&n, beta)?;
    Ok(Some(CellAnalysis {
        case_label: classify(&n),
        mb_exists: mb_exists_oriented(&n, beta),
        tau_dagger: tau * g.adversary_budget,
        mb_beta_threshold: mb_beta_threshold_oriented(&n),
        alliance_gain: gain,
    }))
}

/// One cell per (beta, y, x) triple.
pub fn region_raster(grid: &SweepGrid) -> Result<Vec<SweepCell>> {
    grid.validate()?;
    let nx = grid.x_axis.steps;
    let ny = grid.y_axis.map_or(1, |a| a.steps);
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let beta = grid.betas[idx / (nx * ny)];
            let iy = (idx / nx) % ny;
            let ix = idx % nx;
            let game = grid.game_at(ix, iy);
            let analysis = analyze_cell(&game, beta)?;
            Ok(SweepCell {
                beta,
                game,
                in_frame: analysis.is_some(),
                analysis,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub tau: f64,
    pub du1: f64,
    pub du2: f64,
    pub u12: f64,
}

/// Payoff changes and alliance payoff at `steps` evenly spaced transfers in
/// `[tau_min, tau_max]`, which must lie inside `(-x2, x1)`.
pub fn payoff_curves(
    g: &GameParams,
    beta: f64,
    tau_min: f64,
    tau_max: f64,
    steps: usize,
) -> Result<Vec<CurveRow>> {
    g.validate()?;
    check_beta(beta)?;
    if !(tau_min > -g.x2) {
        return Err(Error::domain("tau_min", tau_min, "must be > -x2"));
    }
    if !(tau_max < g.x1) {
        return Err(Error::domain("tau_max", tau_max, "must be < x1"));
    }
    if !(tau_min <= tau_max) {
        return Err(Error::Config(format!(
            "tau_min = {tau_min} exceeds tau_max = {tau_max}"
        )));
    }
    if steps < 2 {
        return Err(Error::Config("a curve needs at least 2 steps".into()));
    }
    let base = transfer::payoffs_at(g, &Transfer::new(0.0, beta)?)?;
    (0..steps)
        .map(|i| {
            let tau = tau_min + (tau_max - tau_min) * i as f64 / (steps - 1) as f64;
            let p = transfer::payoffs_at(g, &Transfer::new(tau, beta)?)?;
            Ok(CurveRow {
                tau,
                du1: p.u1 - base.u1,
                du2: p.u2 - base.u2,
                u12: p.alliance(),
            })
        })
        .collect()
}

/// Best payoffs reachable by a transfer at one efficiency.
///
/// `max_u1` is taken over transfers that leave Player 2 no worse off than
/// with no transfer, and symmetrically for `max_u2`; the `_unconstrained`
/// columns drop that requirement. `u1_at_tau_dagger` and `u2_at_tau_dagger`
/// are the individual payoffs at the alliance-optimal transfer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaRow {
    pub beta: f64,
    pub max_u1: f64,
    pub max_u2: f64,
    pub max_u12: f64,
    pub max_u1_unconstrained: f64,
    pub max_u2_unconstrained: f64,
    pub u1_at_tau_dagger: f64,
    pub u2_at_tau_dagger: f64,
    pub nominal_u1: f64,
    pub nominal_u2: f64,
    pub nominal_u12: f64,
    pub mb_exists: bool,
    pub alliance_nonzero: bool,
}

const SWEEP_TAU_SAMPLES: usize = 2000;
const FEASIBILITY_TOL: f64 = 1e-12;

/// Maximizes `objective` over `[lo, hi]` among points where `feasible`
/// holds. Starts from the best of a uniform sample (plus `tau = 0`, which
/// must be feasible) and polishes within the neighboring sample cells.
fn constrained_max(
    lo: f64,
    hi: f64,
    objective: impl Fn(f64) -> f64,
    feasible: impl Fn(f64) -> bool,
) -> f64 {
    let mut taus: Vec<f64> = (0..SWEEP_TAU_SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / (SWEEP_TAU_SAMPLES - 1) as f64)
        .collect();
    taus.push(0.0);
    taus.sort_by(f64::total_cmp);

    let mut best_k = None;
    let mut best_v = f64::NEG_INFINITY;
    for (k, &t) in taus.iter().enumerate() {
        if feasible(t) {
            let v = objective(t);
            if v > best_v {
                best_v = v;
                best_k = Some(k);
            }
        }
    }
    let Some(k) = best_k else {
        return best_v;
    };
    let center = taus[k];
    let mut best = best_v;
    for nb in [k.checked_sub(1), Some(k + 1)].into_iter().flatten() {
        let Some(&edge) = taus.get(nb) else { continue };
        let far = if feasible(edge) {
            edge
        } else {
            let (mut a, mut b) = (center, edge);
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                if feasible(mid) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            a
        };
        best = best.max(objective(far));
        let t = golden_max(center, far, &objective);
        if feasible(t) {
            best = best.max(objective(t));
        }
    }
    best
}

fn golden_max(a: f64, b: f64, f: &impl Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Per-efficiency maxima of each player's payoff and of the alliance payoff.
pub fn beta_sweep(g: &GameParams, beta_min: f64, beta_max: f64, steps: usize) -> Result<Vec<BetaRow>> {
    check_beta(beta_min)?;
    check_beta(beta_max)?;
    if !(beta_min < beta_max) || steps < 2 {
        return Err(Error::Config(format!(
            "beta sweep needs beta_min < beta_max and at least 2 steps, got [{beta_min}, {beta_max}] with {steps}"
        )));
    }
    let (n, o) = normalize(g)?;
    let lo = -n.x2 + TAU_EDGE;
    let hi = n.x1 - TAU_EDGE;
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let beta = beta_min + (beta_max - beta_min) * i as f64 / (steps - 1) as f64;
            let pay = |t: f64| payoffs_oriented(&n, t, beta);
            let nominal = pay(0.0);
            let max_u1 = constrained_max(lo, hi, |t| pay(t).u1, |t| {
                pay(t).u2 >= nominal.u2 - FEASIBILITY_TOL
            });
            let max_u2 = constrained_max(lo, hi, |t| pay(t).u2, |t| {
                pay(t).u1 >= nominal.u1 - FEASIBILITY_TOL
            });
            let mut max_u1 = max_u1.max(nominal.u1);
            let max_u2 = max_u2.max(nominal.u2);
            // The mutual-benefit interval is feasible for both constraints.
            if let Some(iv) = mb_interval_oriented(&n, beta) {
                let p = pay(iv.tau_low + TAU_EDGE);
                max_u1 = max_u1.max(p.u1);
            }
            let free_u1 = constrained_max(lo, hi, |t| pay(t).u1, |_| true);
            let free_u2 = constrained_max(lo, hi, |t| pay(t).u2, |_| true);
            let (tau_dagger, _) = alliance_optimal_oriented(&n, beta)?;
            let at_dagger = pay(tau_dagger);
            let (max_u1, max_u2) = o.pair_to_caller(max_u1, max_u2);
            let (free_u1, free_u2) = o.pair_to_caller(free_u1, free_u2);
            let (d1, d2) = o.pair_to_caller(at_dagger.u1, at_dagger.u2);
            let (n1, n2) = o.pair_to_caller(nominal.u1, nominal.u2);
            Ok(BetaRow {
                beta,
                max_u1,
                max_u2,
                max_u12: at_dagger.alliance().max(nominal.alliance()),
                max_u1_unconstrained: free_u1,
                max_u2_unconstrained: free_u2,
                u1_at_tau_dagger: d1,
                u2_at_tau_dagger: d2,
                nominal_u1: n1,
                nominal_u2: n2,
                nominal_u12: nominal.alliance(),
                mb_exists: mb_exists_oriented(&n, beta),
                alliance_nonzero: !in_g_dagger_oriented(&n, beta),
            })
        })
        .collect()
}

/// Consecutive sweep efficiencies between which a flag turns on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlagSwitches {
    pub mb: Option<(f64, f64)>,
    pub alliance: Option<(f64, f64)>,
}

pub fn flag_switches(rows: &[BetaRow]) -> FlagSwitches {
    let find = |flag: fn(&BetaRow) -> bool| {
        rows.windows(2)
            .find(|w| !flag(&w[0]) && flag(&w[1]))
            .map(|w| (w[0].beta, w[1].beta))
    };
    FlagSwitches {
        mb: find(|r| r.mb_exists),
        alliance: find(|r| r.alliance_nonzero),
    }
}
