//! Payoff changes across the whole transfer range, as CSV on stdout.
//!
//! `cargo run --example payoff_curves > curves.csv`

use lotto_alliance::sweep::payoff_curves;
use lotto_alliance::GameParams;

fn main() -> lotto_alliance::Result<()> {
    let g = GameParams::new(1.0, 1.2, 0.5, 1.5)?;
    println!("beta,tau,du1,du2,u12");
    for beta in [0.5, 1.0] {
        for r in payoff_curves(&g, beta, -1.4999, 0.4999, 2000)? {
            println!("{beta},{},{},{},{}", r.tau, r.du1, r.du2, r.u12);
        }
    }
    Ok(())
}
