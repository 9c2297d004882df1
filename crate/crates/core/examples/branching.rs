//! Restrict a few SO(N) signatures to SO(N-1) and find common
//! constituents and extensions.

use motiondual::signatures::{branch, common_extension, inseparable, walk, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pi = Signature::parse("2,1,0", 7)?;
    let kids = branch(&pi)?;
    println!("{pi} restricts to {} SO(6) signatures:", kids.len());
    for s in &kids {
        println!("  {s}");
    }

    let (a, b) = (Signature::parse("1,-1", 4)?, Signature::parse("1,1", 4)?);
    println!("{a} ~ {b}: {}", inseparable(&a, &b)?);

    let sigmas = [Signature::parse("2,-1", 4)?, Signature::parse("1,1", 4)?];
    match common_extension(&sigmas)? {
        Some(pi) => println!("{} and {} both sit inside {pi}", sigmas[0], sigmas[1]),
        None => println!("no common extension"),
    }

    let w = walk(
        &Signature::parse("0,0,0,0", 9)?,
        &Signature::parse("1,1,1,1", 9)?,
    )?;
    println!("walk of length {}:", w.len());
    for (step, via) in w.steps.windows(2).zip(&w.witnesses) {
        println!("  {} ~ {} via {via}", step[0], step[1]);
    }
    Ok(())
}
