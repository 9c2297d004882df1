//! Merge certificates: walks from containers of three germ ideals to a
//! common target, and the K bound they imply.

use motiondual::primal::{half_ceil_half, merge_certificate, validate_certificate};
use motiondual::signatures::Signature;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let triples = [
        (7u32, ["2,1,0", "0,0,0", "1,1,1"]),
        (9, ["2,1,0,0", "1,1,1,-1", "3,0,0,0"]),
    ];
    for (n, texts) in triples {
        let [a, b, c] = texts.map(|t| Signature::parse(t, n - 1));
        let (a, b, c) = (&a?, &b?, &c?);
        let cert = merge_certificate(n, a, b, c)?;
        let report = validate_certificate(&cert);
        println!(
            "N = {n} (case {}): walks of length {}",
            cert.case, cert.claimed_n
        );
        for (w, s) in cert.walks.iter().zip(&cert.inputs) {
            let steps: Vec<String> = w.steps.iter().map(ToString::to_string).collect();
            println!("  {s}: {}", steps.join(" -> "));
        }
        if let Some(p) = &cert.primal_witness {
            println!("  targets share the SO({}) constituent {p}", n - 1);
        }
        println!(
            "  valid: {}, implied K <= {}, expected {}",
            report.is_valid(),
            report.implied_k_bound.map_or("-".into(), |k| k.to_string()),
            half_ceil_half(n)
        );
    }
    Ok(())
}
