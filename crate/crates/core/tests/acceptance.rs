//! Acceptance criteria. Run with
//! `cargo test -p lotto-alliance --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::sync::OnceLock;
use std::time::Instant;

use lotto_alliance::adversary::{classify, optimal_split, stage_payoffs, CaseLabel};
use lotto_alliance::lotto::player_payoff;
use lotto_alliance::oracle::grid::split_lipschitz;
use lotto_alliance::oracle::verify::{boundary_distance, BOUNDARY_MARGIN, DEFAULT_BETAS};
use lotto_alliance::oracle::{
    adversary_grid_best_response, run_verification, OracleConfig, VerifyConfig, VerifyReport,
};
use lotto_alliance::sweep::{self, Axis, Param, SweepGrid};
use lotto_alliance::transfer::{self, alliance_optimal, in_g_dagger, mb_beta_threshold};
use lotto_alliance::{GameParams, Transfer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} [{verdict}] {name}: {detail}");
    assert!(ok, "criterion {id} failed: {detail}");
}

fn g1() -> GameParams {
    GameParams::new(1.0, 1.2, 0.5, 1.5).unwrap()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

fn random_oriented(rng: &mut ChaCha8Rng) -> GameParams {
    let g = GameParams::new(
        log_uniform(rng, 0.05, 5.0),
        log_uniform(rng, 0.05, 5.0),
        log_uniform(rng, 0.05, 5.0),
        log_uniform(rng, 0.05, 5.0),
    )
    .unwrap();
    if g.is_oriented() {
        g
    } else {
        g.swapped()
    }
}

fn proportional_game(rng: &mut ChaCha8Rng) -> GameParams {
    loop {
        let phi1 = log_uniform(rng, 0.05, 5.0);
        let x1 = log_uniform(rng, 0.05, 5.0);
        let x2 = log_uniform(rng, 0.05, 5.0);
        if x1 + x2 < 1.0 {
            continue;
        }
        let g = GameParams::new(phi1, phi1 * x2 / x1, x1, x2).unwrap();
        let g = if g.is_oriented() { g } else { g.swapped() };
        if classify(&g) == CaseLabel::Case4 {
            return g;
        }
    }
}

fn verification() -> &'static (VerifyReport, f64) {
    static RUN: OnceLock<(VerifyReport, f64)> = OnceLock::new();
    RUN.get_or_init(|| {
        let cfg = VerifyConfig {
            trials: 200,
            betas: DEFAULT_BETAS.to_vec(),
            oracle: OracleConfig {
                tau_step: 1e-4,
                split_step: 1e-3,
                tolerance: 1e-9,
            },
            ..VerifyConfig::default()
        };
        let start = Instant::now();
        let r = run_verification(&cfg).unwrap();
        (r, start.elapsed().as_secs_f64())
    })
}

#[test]
fn c01_mutual_benefit_threshold() {
    let t = mb_beta_threshold(&g1()).unwrap();
    let below = transfer::mb_exists(&g1(), t - 1e-3).unwrap();
    let above = transfer::mb_exists(&g1(), t + 1e-3).unwrap();
    let ok = (t - 0.5099).abs() <= 1e-3 && !below && above;
    report(
        1,
        "mutual-benefit efficiency threshold",
        ok,
        format!("threshold {t:.6}, expected 0.5099 +- 1e-3; flag {below} -> {above} across it"),
    );
}

#[test]
fn c02_alliance_threshold() {
    let g = g1();
    let a = transfer::analyze(&g, 0.5).unwrap();
    let t = a.alliance_beta_threshold.unwrap_or(f64::NAN);
    let closed = (0.4f64.sqrt() - 0.5) / 1.5;
    let below = in_g_dagger(&g, t - 1e-3).unwrap();
    let above = in_g_dagger(&g, t + 1e-3).unwrap();
    let tau_below = alliance_optimal(&g, t - 1e-3).unwrap().tau;
    let tau_above = alliance_optimal(&g, t + 1e-3).unwrap().tau;
    let ok = (t - 0.0883).abs() <= 1e-3
        && (t - closed).abs() < 1e-12
        && below
        && !above
        && tau_below == 0.0
        && tau_above < 0.0;
    report(
        2,
        "alliance efficiency threshold",
        ok,
        format!(
            "threshold {t:.6}, expected 0.0883 +- 1e-3; tau* {tau_below} below, {tau_above:.3e} above"
        ),
    );
}

#[test]
fn c03_curve_speed() {
    let g = g1();
    let start = Instant::now();
    let rows_full = sweep::payoff_curves(&g, 1.0, -1.4999, 0.4999, 10_000).unwrap();
    let rows_half = sweep::payoff_curves(&g, 0.5, -1.4999, 0.4999, 10_000).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mutual = |rows: &[sweep::CurveRow]| {
        rows.iter()
            .any(|r| r.du1 > 1e-9 && r.du2 > 1e-9)
    };
    let ok = rows_full.len() == 10_000
        && rows_half.len() == 10_000
        && secs < 5.0
        && mutual(&rows_full)
        && !mutual(&rows_half);
    report(
        3,
        "payoff curves over the full transfer range",
        ok,
        format!("2 x 10000 points in {secs:.3} s (limit 5 s)"),
    );
}

#[test]
fn c04_oracle_agreement() {
    let (r, secs) = verification();
    let ok = r.passed && r.disagreements.is_empty() && r.runs == 200 * DEFAULT_BETAS.len();
    report(
        4,
        "closed forms agree with brute-force oracle",
        ok,
        format!(
            "{} runs, {} mb comparisons ({} agree), {} alliance comparisons, {} disagreements, max split deviation {:.2e}, {secs:.1} s",
            r.runs,
            r.mb_compared,
            r.mb_exists_agreements,
            r.alliance_compared,
            r.disagreements.len(),
            r.max_split_deviation
        ),
    );
}

#[test]
fn c05_adversary_optimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut buckets: [Vec<GameParams>; 4] = Default::default();
    while buckets[..3].iter().any(|b| b.len() < 100) {
        let g = random_oriented(&mut rng);
        if boundary_distance(&g) < BOUNDARY_MARGIN {
            continue;
        }
        let i = classify(&g).number() as usize - 1;
        if i < 3 && buckets[i].len() < 100 {
            buckets[i].push(g);
        }
    }
    while buckets[3].len() < 100 {
        buckets[3].push(proportional_game(&mut rng));
    }
    let step = 1e-3;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_shortfall = 0.0f64;
    let mut failures = 0;
    for g in buckets.iter().flatten() {
        let closed = stage_payoffs(g).u_adversary;
        let (_, grid) = adversary_grid_best_response(g, step);
        let slack = split_lipschitz(g, step) * step;
        worst_excess = worst_excess.max(grid - closed);
        worst_shortfall = worst_shortfall.max(closed - grid);
        if grid > closed + slack + 1e-12 || closed > grid + slack + 1e-12 {
            failures += 1;
        }
    }
    report(
        5,
        "adversary split is optimal in every regime",
        failures == 0,
        format!(
            "4 x 100 games, {failures} violations, grid-minus-closed max {worst_excess:.2e}, closed-minus-grid max {worst_shortfall:.2e}"
        ),
    );
}

#[test]
fn c06_no_mutual_benefit_from_the_stronger_side() {
    let (r, _) = verification();
    report(
        6,
        "no mutually beneficial transfer in the wrong direction",
        r.oriented_positive_mutual_found == 0,
        format!(
            "{} of {} runs found one",
            r.oriented_positive_mutual_found, r.runs
        ),
    );
}

#[test]
fn c07_proportional_strength() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut nonzero_tau = 0;
    for _ in 0..50 {
        let g = proportional_game(&mut rng);
        let lo = (1.0 - g.x2).max(0.0);
        let hi = g.x1.min(1.0);
        let split = optimal_split(&g).x_a1;
        let reference = player_payoff(g.x1, split, g.phi1) + player_payoff(g.x2, 1.0 - split, g.phi2);
        for k in 0..100 {
            let a = lo + (hi - lo) * k as f64 / 99.0;
            let u = player_payoff(g.x1, a, g.phi1) + player_payoff(g.x2, 1.0 - a, g.phi2);
            worst = worst.max((u - reference).abs());
        }
        let beta = rng.gen_range(0.01..1.0);
        if alliance_optimal(&g, beta).unwrap().tau != 0.0 || !in_g_dagger(&g, beta).unwrap() {
            nonzero_tau += 1;
        }
    }
    report(
        7,
        "proportional strength: indifferent adversary, no alliance transfer",
        worst <= 1e-9 && nonzero_tau == 0,
        format!("50 games, max alliance payoff spread {worst:.2e}, {nonzero_tau} nonzero alliance transfers"),
    );
}

#[test]
fn c08_lossless_transfers_always_help_the_alliance() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    let mut in_set = 0;
    while checked < 500 {
        let g = random_oriented(&mut rng);
        let ratio = (g.phi2 * g.x1) / (g.phi1 * g.x2);
        if (ratio - 1.0).abs() < 1e-3 {
            continue;
        }
        checked += 1;
        if in_g_dagger(&g, 1.0).unwrap() {
            in_set += 1;
        }
    }
    report(
        8,
        "at full efficiency the alliance always transfers",
        in_set == 0,
        format!("{checked} games, {in_set} with zero alliance-optimal transfer"),
    );
}

#[test]
fn c09_region_nesting_and_layering() {
    let betas = vec![0.25, 0.5, 1.0];
    let n = 200;
    let grid = SweepGrid::budgets(
        1.2,
        1.0,
        Axis::new(Param::X1, 0.01, 2.0, n),
        Axis::new(Param::X2, 0.01, 2.0, n),
        betas.clone(),
    );
    let start = Instant::now();
    let cells = sweep::region_raster(&grid).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let per_beta = n * n;
    let mut nesting = 0;
    let mut layering = 0;
    let mut in_frame = 0;
    for (i, c) in cells.iter().enumerate() {
        let Some(a) = c.analysis else { continue };
        in_frame += 1;
        if a.mb_exists && a.tau_dagger == 0.0 {
            nesting += 1;
        }
        if i + per_beta < cells.len() {
            let next = cells[i + per_beta].analysis.unwrap();
            if (a.mb_exists && !next.mb_exists) || (a.tau_dagger != 0.0 && next.tau_dagger == 0.0) {
                layering += 1;
            }
        }
    }
    report(
        9,
        "existence regions nest and grow with efficiency",
        cells.len() == 3 * per_beta && nesting == 0 && layering == 0,
        format!(
            "{} cells ({in_frame} in frame), {nesting} nesting and {layering} layering violations, {secs:.2} s",
            cells.len()
        ),
    );
}

#[test]
fn c10_conservation() {
    let (r, _) = verification();
    let mut checks = r.payoff_checks;
    let mut violations = r.payoff_violations;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..2000 {
        let g = random_oriented(&mut rng);
        let g = if rng.gen_bool(0.5) { g.swapped() } else { g };
        let beta = rng.gen_range(0.01..=1.0);
        let s: f64 = rng.gen_range(-0.999..0.999);
        let tau = if s < 0.0 { s * g.x2 } else { s * g.x1 };
        for p in [
            stage_payoffs(&g),
            transfer::payoffs_at(&g, &Transfer::new(tau, beta).unwrap()).unwrap(),
        ] {
            checks += 1;
            if !p.is_consistent(g.phi1, g.phi2) {
                violations += 1;
            }
        }
    }
    report(
        10,
        "payoffs conserve total value and stay in bounds",
        checks > 0 && violations == 0,
        format!("{checks} payoff profiles checked, {violations} violations"),
    );
}
