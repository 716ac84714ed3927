//! Randomized agreement check between the closed forms and the grid oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scan::{transfer_grid_scan, THRESHOLD_BAND};
use super::OracleConfig;
use crate::adversary::{normalize, GameParams};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_BETAS: [f64; 5] = [0.1, 0.3, 0.5, 0.8, 1.0];
/// Sampled parameters are log-uniform on this range.
pub const SAMPLE_RANGE: (f64, f64) = (0.05, 5.0);
/// Games closer than this (relative) to a regime boundary are re-drawn.
pub const BOUNDARY_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub betas: Vec<f64>,
    pub oracle: OracleConfig,
    /// Verify exactly these games instead of sampling.
    pub games: Option<Vec<GameParams>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 200,
            seed: 7,
            betas: DEFAULT_BETAS.to_vec(),
            oracle: OracleConfig::default(),
            games: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDisagreement {
    pub game: GameParams,
    pub beta: f64,
    pub quantity: String,
    pub closed_form_value: f64,
    pub grid_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub trials: usize,
    pub betas: Vec<f64>,
    pub tau_step: f64,
    pub split_step: f64,
    pub tolerance: f64,
    pub threshold_band: f64,
    pub runs: usize,
    pub mb_compared: usize,
    pub mb_exists_agreements: usize,
    pub mb_exists_true: usize,
    pub alliance_compared: usize,
    pub oriented_positive_mutual_found: usize,
    pub max_split_deviation: f64,
    pub payoff_checks: usize,
    pub payoff_violations: usize,
    pub disagreements: Vec<VerifyDisagreement>,
    pub passed: bool,
}

fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    let (lo, hi) = SAMPLE_RANGE;
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Relative distance of a game to the nearest boundary between adversary
/// regimes, measured in the oriented frame.
pub fn boundary_distance(g: &GameParams) -> f64 {
    let Ok((n, _)) = normalize(g) else {
        return 0.0;
    };
    let ratio = rel_gap(n.phi2 * n.x1, n.phi1 * n.x2);
    let all_in = rel_gap(n.phi2, n.phi1 * n.x1 * n.x2);
    let s = (n.phi1 * n.x1 * n.x2 / n.phi2).sqrt();
    let interior = (1.0 - s - n.x2).abs();
    ratio.min(all_in).min(interior)
}

/// Draws `count` games log-uniformly, skipping near-boundary ones.
pub fn sample_games(count: usize, seed: u64) -> Vec<GameParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = GameParams {
            phi1: log_uniform(&mut rng),
            phi2: log_uniform(&mut rng),
            x1: log_uniform(&mut rng),
            x2: log_uniform(&mut rng),
            adversary_budget: 1.0,
        };
        if boundary_distance(&g) >= BOUNDARY_MARGIN {
            out.push(g);
        }
    }
    out
}

/// Runs the oracle on every (game, beta) pair. Runs execute in parallel; the
/// report lists them in sampling order.
pub fn run_verification(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.betas.is_empty() {
        return Err(Error::Config("at least one beta is required".into()));
    }
    let games = match &cfg.games {
        Some(gs) => gs.clone(),
        None => sample_games(cfg.trials, cfg.seed),
    };
    let jobs: Vec<(GameParams, f64)> = games
        .iter()
        .flat_map(|g| cfg.betas.iter().map(move |&b| (*g, b)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|(g, b)| transfer_grid_scan(g, *b, &cfg.oracle))
        .collect::<Result<Vec<_>>>()?;

    let mut report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        tool_version: crate::VERSION.to_string(),
        seed: cfg.seed,
        trials: games.len(),
        betas: cfg.betas.clone(),
        tau_step: cfg.oracle.tau_step,
        split_step: cfg.oracle.split_step,
        tolerance: cfg.oracle.tolerance,
        threshold_band: THRESHOLD_BAND,
        runs: jobs.len(),
        mb_compared: 0,
        mb_exists_agreements: 0,
        mb_exists_true: 0,
        alliance_compared: 0,
        oriented_positive_mutual_found: 0,
        max_split_deviation: 0.0,
        payoff_checks: 0,
        payoff_violations: 0,
        disagreements: Vec::new(),
        passed: false,
    };
    for ((g, beta), r) in jobs.iter().zip(&reports) {
        if r.mb_compared {
            report.mb_compared += 1;
            if !r.disagreements.iter().any(|d| d.quantity == "mb_exists") {
                report.mb_exists_agreements += 1;
            }
        }
        if r.mb_exists_grid {
            report.mb_exists_true += 1;
        }
        if r.alliance_compared {
            report.alliance_compared += 1;
        }
        if r.oriented_positive_mutual_tau.is_some() {
            report.oriented_positive_mutual_found += 1;
        }
        report.max_split_deviation = report.max_split_deviation.max(r.max_split_deviation);
        report.payoff_checks += r.payoff_checks;
        report.payoff_violations += r.payoff_violations;
        for d in &r.disagreements {
            report.disagreements.push(VerifyDisagreement {
                game: *g,
                beta: *beta,
                quantity: d.quantity.clone(),
                closed_form_value: d.closed_form_value,
                grid_value: d.grid_value,
            });
        }
    }
    report.passed = report.disagreements.is_empty() && report.payoff_violations == 0;
    Ok(report)
}
