//! Best payoffs each side can reach as transfer efficiency improves.

use lotto_alliance::sweep::{beta_sweep, flag_switches};
use lotto_alliance::GameParams;

fn main() -> lotto_alliance::Result<()> {
    let g = GameParams::new(1.0, 1.2, 0.5, 1.5)?;
    let rows = beta_sweep(&g, 0.01, 1.0, 12)?;
    println!("{:>6} {:>8} {:>8} {:>8} {:>6} {:>6}", "beta", "max_u1", "max_u2", "max_u12", "mb", "tau*");
    for r in &rows {
        println!(
            "{:>6.3} {:>8.4} {:>8.4} {:>8.4} {:>6} {:>6}",
            r.beta, r.max_u1, r.max_u2, r.max_u12, r.mb_exists, r.alliance_nonzero
        );
    }
    let s = flag_switches(&beta_sweep(&g, 0.01, 1.0, 1000)?);
    if let Some((lo, hi)) = s.mb {
        println!("mutual benefit switches on in ({lo:.4}, {hi:.4}]");
    }
    if let Some((lo, hi)) = s.alliance {
        println!("alliance transfer switches on in ({lo:.4}, {hi:.4}]");
    }
    Ok(())
}
