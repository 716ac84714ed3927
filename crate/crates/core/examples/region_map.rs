//! ASCII map of where transfers pay off over a budget raster.
//!
//! `#` both players gain, `+` only the alliance gains, `.` no transfer helps,
//! blank: outside the oriented frame.

use lotto_alliance::sweep::{region_raster, Axis, Param, SweepGrid};

fn main() -> lotto_alliance::Result<()> {
    let n = 40;
    for beta in [0.25, 0.5, 1.0] {
        let grid = SweepGrid::budgets(
            1.2,
            1.0,
            Axis::new(Param::X1, 0.01, 2.0, n),
            Axis::new(Param::X2, 0.01, 2.0, n),
            vec![beta],
        );
        let cells = region_raster(&grid)?;
        println!("beta = {beta}   (x1 across, x2 up, 0.01..2)");
        for row in cells.chunks(n).rev() {
            let line: String = row
                .iter()
                .map(|c| match c.analysis {
                    None => ' ',
                    Some(a) if a.mb_exists => '#',
                    Some(a) if a.tau_dagger != 0.0 => '+',
                    Some(_) => '.',
                })
                .collect();
            println!("|{line}|");
        }
        println!();
    }
    Ok(())
}
