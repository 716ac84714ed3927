//! Cross-check the closed forms against brute-force enumeration.

use lotto_alliance::oracle::{run_verification, transfer_grid_scan, OracleConfig, VerifyConfig};
use lotto_alliance::GameParams;

fn main() -> lotto_alliance::Result<()> {
    let g = GameParams::new(1.0, 1.2, 0.5, 1.5)?;
    let cfg = OracleConfig::default();
    for beta in [0.08, 0.5, 1.0] {
        let r = transfer_grid_scan(&g, beta, &cfg)?;
        println!(
            "beta={beta}: grid mutual={} grid alliance argmax={:.4} disagreements={}",
            r.mb_exists_grid,
            r.alliance_argmax_tau,
            r.disagreements.len()
        );
    }
    let report = run_verification(&VerifyConfig {
        trials: 20,
        ..VerifyConfig::default()
    })?;
    println!(
        "{} sampled runs: passed={} max split deviation {:.2e}",
        report.runs, report.passed, report.max_split_deviation
    );
    Ok(())
}
