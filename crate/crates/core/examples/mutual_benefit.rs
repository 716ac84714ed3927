//! When does a lossy donation help both players?

use lotto_alliance::{analyze, GameParams};

fn main() -> lotto_alliance::Result<()> {
    let g = GameParams::new(1.0, 1.2, 0.5, 1.5)?;
    for beta in [0.05, 0.2, 0.5, 0.51, 0.8, 1.0] {
        let a = analyze(&g, beta)?;
        let interval = a
            .mb_interval
            .map_or("-".to_string(), |(lo, hi)| format!("({lo:.4}, {hi:.4})"));
        println!(
            "beta={beta:<5} mutual={:<5} interval={interval:<20} alliance tau={:.4} gain={:.4}",
            a.mb_exists, a.alliance_tau, a.alliance_payoff_gain
        );
    }
    let a = analyze(&g, 1.0)?;
    println!("mutual-benefit threshold: {:.5}", a.mb_beta_threshold);
    if let Some(t) = a.alliance_beta_threshold {
        println!("alliance threshold:       {t:.5}");
    }
    Ok(())
}
