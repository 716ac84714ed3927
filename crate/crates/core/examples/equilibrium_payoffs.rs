//! Equilibrium payoffs of a single Lotto contest as the budgets vary.

use lotto_alliance::LottoInstance;

fn main() -> lotto_alliance::Result<()> {
    println!("{:>8} {:>8} {:>10} {:>10}", "x", "x_a", "player", "adversary");
    for &(x, xa) in &[(0.0, 0.0), (0.5, 1.0), (1.0, 1.0), (2.0, 1.0), (1.0, 0.0)] {
        let (u, ua) = LottoInstance::new(x, xa, 1.0)?.equilibrium_payoff();
        println!("{x:>8.2} {xa:>8.2} {u:>10.4} {ua:>10.4}");
    }
    Ok(())
}
