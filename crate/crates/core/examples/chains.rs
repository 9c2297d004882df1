//! Certify the lower bound d((0,0,0,0), (1,1,1,1)) >= 4 in SO(8) with an
//! admissible chain, then write the certificate as JSON.

use std::collections::BTreeSet;

use motiondual::chains::{find_admissible_chain, ChainCertificate};
use motiondual::dualspace::DualModel;
use motiondual::signatures::{GroupContext, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, bound) = (8, 1);
    let model = DualModel::build(n, bound)?;
    let ctx = GroupContext::new(n)?;
    let x = model.class_point(&Signature::zero(ctx))?;
    let y = model.class_point(&Signature::constant(ctx, 1)?)?;

    let chain = find_admissible_chain(&model, &BTreeSet::from([x]), &BTreeSet::from([y]), 4, true)?;
    for (i, set) in chain.sets.iter().enumerate() {
        let labels: Vec<&str> = set.iter().map(|p| model.space().label(*p)).collect();
        println!("X_{} = {{{}}}", i + 1, labels.join(", "));
    }

    let cert = ChainCertificate {
        n,
        bound,
        restrict_to_class: true,
        x,
        y,
        chain,
    };
    println!("certified lower bound: {}", cert.check()?);
    println!("{}", serde_json::to_string(&cert)?);
    Ok(())
}
