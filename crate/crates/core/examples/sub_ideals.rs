//! Germ ideals, their hulls and the `*` graph that gives D(A).

use motiondual::primal::{big_d, hull, min_primal, strict_germ_containments, StarGraph, SubIdeal};
use motiondual::signatures::Signature;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ideal = SubIdeal::GermIdeal(Signature::parse("1,0", 4)?);
    let h = hull(&ideal, 2)?;
    let names: Vec<String> = h.iter().map(ToString::to_string).collect();
    println!("hull of {ideal}: {}", names.join(" "));

    for n in 3..=8 {
        let strict = strict_germ_containments(n, 2)?.len();
        let minimal = min_primal(n, 2)?.len();
        println!(
            "N = {n}: D(A) = {}, strict containments {strict}, minimal primal {minimal}",
            big_d(n, 2)?
        );
    }

    let g = StarGraph::build(5, 1)?;
    print!("{}", g.to_dot());
    Ok(())
}
