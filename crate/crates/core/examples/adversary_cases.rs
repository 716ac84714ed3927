//! How the adversary splits its budget in each regime.

use lotto_alliance::adversary::{respond, stage_payoffs};
use lotto_alliance::GameParams;

fn main() -> lotto_alliance::Result<()> {
    let games = [
        ("both weak", GameParams::new(1.0, 0.2, 0.5, 1.5)?),
        ("interior", GameParams::new(1.0, 1.2, 0.5, 1.5)?),
        ("both contested", GameParams::new(1.0, 1.0, 0.3, 0.4)?),
        ("proportional", GameParams::new(1.0, 2.0, 0.8, 1.6)?),
        ("reversed order", GameParams::new(1.2, 1.0, 1.5, 0.5)?),
    ];
    for (name, g) in games {
        let (r, o) = respond(&g);
        let p = stage_payoffs(&g);
        println!(
            "{name:<15} case {}  split ({:.4}, {:.4})  payoffs u1={:.4} u2={:.4} adversary={:.4}{}",
            r.case_label,
            r.x_a1,
            r.x_a2,
            p.u1,
            p.u2,
            p.u_adversary,
            if o.swapped { "  [players swapped internally]" } else { "" }
        );
    }
    Ok(())
}
