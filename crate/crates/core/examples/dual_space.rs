//! Build the truncated dual of R^N x| SO(N), then report its components,
//! connecting order and one distance.

use motiondual::dualspace::DualModel;
use motiondual::signatures::{GroupContext, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 6;
    let model = DualModel::build(n, 2)?;
    println!(
        "SO({n}), bound 2: {} class points, {} germs",
        model.class_points().len(),
        model.germ_points().len()
    );
    let summary = model.components_and_orc();
    println!(
        "{} component(s), Orc = {}",
        summary.components.len(),
        summary.orc
    );

    let ctx = GroupContext::new(n)?;
    let (zero, ones) = (Signature::zero(ctx), Signature::constant(ctx, 1)?);
    println!(
        "d({zero}, {ones}) = {:?}",
        model.class_distance(&zero, &ones)?
    );

    let glimm = model.glimm_partition();
    println!(
        "{} Glimm classes, class points form one class: {}",
        glimm.classes.len(),
        glimm.class_points_form_one_class
    );
    Ok(())
}
