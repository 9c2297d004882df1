//! Cross-check the derivation constants for N = 2..12 and print the table.

use motiondual::constants::{cross_check, predict, render_table};
use motiondual::verify::default_bound;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut reports = vec![predict(2)?];
    for n in 3..=12 {
        reports.push(cross_check(n, default_bound(n))?);
    }
    print!("{}", render_table(&reports));
    Ok(())
}
