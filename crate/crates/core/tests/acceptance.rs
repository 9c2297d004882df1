//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use common::{all_sigs, oracle_common_extension, oracle_inseparable, restricts, sig, OracleGraph};
use motiondual::chains::{
    chain_lower_bound, find_admissible_chain, set_distance, validate_chain, Chain, ChainCertificate,
};
use motiondual::constants::cross_check;
use motiondual::dualspace::{DualModel, PointId, PointKind, PointSet};
use motiondual::primal::{
    big_d, case_table, half_ceil_half, merge_certificate, strict_germ_containments,
    validate_certificate, zero_tail_star_step,
};
use motiondual::signatures::{
    common_extension, dual_zero_tail_step, enumerate, inseparable, walk, GroupContext, Signature,
};
use motiondual::verify::{default_bound, run_sweep, VerifyConfig};
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ends(n: u32) -> (Signature, Signature) {
    let ctx = GroupContext::new(n).unwrap();
    (Signature::zero(ctx), Signature::constant(ctx, 1).unwrap())
}

fn fail_if(errors: &[String], ok: String) -> Outcome {
    if errors.is_empty() {
        Ok(ok)
    } else {
        Err(errors.join("; "))
    }
}

fn orc() -> Outcome {
    let start = Instant::now();
    let mut errors = Vec::new();
    for n in 3..=12 {
        let b = default_bound(n);
        let model = DualModel::build(n, b).map_err(|e| e.to_string())?;
        let got = model.components_and_orc().orc;
        let expected = (n / 2) as usize;
        if got != expected {
            errors.push(format!("N = {n}: Orc = {got}, expected {expected}"));
        }
        let (_, diam) = OracleGraph::build(n, b as i64).components_and_diameter();
        if diam.max(1) != got {
            errors.push(format!(
                "N = {n}: oracle diameter {diam} disagrees with {got}"
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        errors.push(format!("took {secs:.2}s"));
    }
    fail_if(
        &errors,
        format!("Orc = floor(N/2) for N = 3..12 in {secs:.2}s"),
    )
}

fn extremal_distance() -> Outcome {
    let mut errors = Vec::new();
    for n in 3..=12 {
        let k = (n / 2) as usize;
        let b = default_bound(n);
        let model = DualModel::build(n, b).map_err(|e| e.to_string())?;
        let (zero, ones) = ends(n);
        let d = model
            .class_distance(&zero, &ones)
            .map_err(|e| e.to_string())?;
        if d != Some(k) {
            errors.push(format!("N = {n}: d = {d:?}, expected {k}"));
        }
        let oracle = OracleGraph::build(n, b as i64);
        let od = oracle.bfs(oracle.index(zero.entries()))[oracle.index(ones.entries())];
        if od != Some(k) {
            errors.push(format!("N = {n}: oracle d = {od:?}"));
        }

        let w = walk(&zero, &ones).map_err(|e| e.to_string())?;
        let steps_ok = w
            .steps
            .windows(2)
            .all(|s| oracle_inseparable(s[0].entries(), s[1].entries(), n, 1));
        if w.len() != k || !steps_ok || w.validate().is_err() {
            errors.push(format!(
                "N = {n}: walk of length {} (steps ok: {steps_ok})",
                w.len()
            ));
        }

        let (x, y) = (
            model.class_point(&zero).map_err(|e| e.to_string())?,
            model.class_point(&ones).map_err(|e| e.to_string())?,
        );
        let chain = if k == 1 {
            Chain::new(vec![model.space().all_points()])
        } else {
            find_admissible_chain(&model, &PointSet::from([x]), &PointSet::from([y]), k, true)
                .map_err(|e| format!("N = {n}: {e}"))?
        };
        let cert = ChainCertificate {
            n,
            bound: b,
            restrict_to_class: true,
            x,
            y,
            chain,
        };
        match cert.check() {
            Ok(len) if len == k => {}
            other => errors.push(format!("N = {n}: chain certificate gave {other:?}")),
        }
    }
    fail_if(
        &errors,
        "d((0..0),(1..1)) = walk length = chain length = floor(N/2) for N = 3..12".into(),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut pairs = 0usize;
    let mut mismatches = Vec::new();
    for n in 3..=9 {
        let parents = all_sigs(n, 3);
        for a in &parents {
            for c in &parents {
                pairs += 1;
                let lib = inseparable(&sig(a, n), &sig(c, n)).map_err(|e| e.to_string())?;
                if lib != oracle_inseparable(a, c, n, 3) {
                    mismatches.push(format!("inseparable {a:?} {c:?} in SO({n})"));
                }
            }
        }
    }
    // children of SO(3) .. SO(10): every SO(2) .. SO(9) pair
    for p in 3..=10 {
        let children = all_sigs(p - 1, 3);
        for a in &children {
            for c in &children {
                pairs += 1;
                let lib =
                    common_extension(&[sig(a, p - 1), sig(c, p - 1)]).map_err(|e| e.to_string())?;
                let brute = oracle_common_extension(&[a.clone(), c.clone()], p, 4);
                let witness_ok = lib
                    .as_ref()
                    .is_none_or(|w| restricts(w.entries(), a, p) && restricts(w.entries(), c, p));
                if lib.is_some() != brute.is_some() || !witness_ok {
                    mismatches.push(format!("common_extension {a:?} {c:?} below SO({p})"));
                }
            }
        }
    }
    if pairs < 10_000 {
        mismatches.push(format!("only {pairs} pairs"));
    }
    fail_if(&mismatches, format!("{pairs} pairs, 0 mismatches"))
}

fn expected_d(n: u32) -> usize {
    match n {
        2 => 0,
        _ if n % 2 == 1 => ((n - 1) / 2) as usize,
        _ => (n / 2 - 1) as usize,
    }
}

fn d_of_sub() -> Outcome {
    let mut errors = Vec::new();
    for n in 2..=12 {
        for b in [1, 2] {
            let got = big_d(n, b).map_err(|e| e.to_string())?;
            if got != expected_d(n) {
                errors.push(format!(
                    "N = {n}, bound {b}: D = {got}, expected {}",
                    expected_d(n)
                ));
            }
        }
        if (3..=7).contains(&n) {
            let brute = common::oracle_big_d(n, 2);
            if brute != expected_d(n) {
                errors.push(format!("N = {n}: oracle D = {brute}"));
            }
        }
    }
    fail_if(
        &errors,
        "D(A) matches for N = 2..12 at bounds 1 and 2".into(),
    )
}

fn minimality_parity() -> Outcome {
    let mut errors = Vec::new();
    for n in 3..=12 {
        let strict = !strict_germ_containments(n, 2)
            .map_err(|e| e.to_string())?
            .is_empty();
        if strict != (n % 2 == 1) {
            errors.push(format!("N = {n}: strict containment {strict}"));
        }
        if n <= 9 {
            let hulls: Vec<BTreeSet<Vec<i64>>> = all_sigs(n - 1, 2)
                .iter()
                .map(|s| {
                    all_sigs(n, 2)
                        .into_iter()
                        .filter(|m| restricts(m, s, n))
                        .collect()
                })
                .collect();
            let brute = hulls
                .iter()
                .any(|a| hulls.iter().any(|c| c.len() < a.len() && c.is_subset(a)));
            if brute != strict {
                errors.push(format!("N = {n}: oracle says {brute}"));
            }
        }
    }
    fail_if(
        &errors,
        "strict germ-ideal containment iff N odd, N = 3..12".into(),
    )
}

fn constants_table() -> Outcome {
    let mut errors = Vec::new();
    for n in 3..=12 {
        let r = match cross_check(n, default_bound(n)) {
            Ok(r) => r,
            Err(e) => {
                errors.push(format!("N = {n}: {e}"));
                continue;
            }
        };
        let k = Rational64::new(n.div_ceil(2) as i64, 2);
        let (orc, d, orc_m) = (r.orc_a as i64, r.d_a as i64, r.orc_ma_predicted as i64);
        let holds = r.k_ma == k
            && r.ks_ma == r.k_ma
            && orc_m == d + 1
            && orc <= orc_m
            && orc_m <= orc + 2
            && (orc - d).abs() <= 1
            && Rational64::from_integer(orc_m) / 2 == r.ks_ma;
        if !holds {
            errors.push(format!("N = {n}: {}", r.to_json()));
        }
    }
    fail_if(
        &errors,
        "cross_check passes and all relations hold for N = 3..12".into(),
    )
}

fn certificates() -> Outcome {
    let mut errors = Vec::new();
    let mut total = 0;
    for n in 3..=12 {
        let (len, _) = case_table(n).map_err(|e| e.to_string())?;
        let expected_len = match n % 4 {
            0 => n / 4 - 1,
            2 => (n - 2) / 4 - 1,
            3 => (n - 3) / 4,
            _ => (n - 1) / 4 - 1,
        } as usize;
        if len != expected_len {
            errors.push(format!("N = {n}: case table length {len}"));
        }
        let pool = enumerate(n - 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ u64::from(n));
        for _ in 0..100 {
            total += 1;
            let t: Vec<&Signature> = (0..3).map(|_| pool.choose(&mut rng).unwrap()).collect();
            let cert = merge_certificate(n, t[0], t[1], t[2]).map_err(|e| e.to_string())?;
            let report = validate_certificate(&cert);
            let walks_ok = cert.walks.iter().zip(&cert.inputs).all(|(w, s)| {
                w.len() == expected_len
                    && restricts(w.start().unwrap().entries(), s.entries(), n)
                    && w.steps
                        .windows(2)
                        .all(|p| oracle_inseparable(p[0].entries(), p[1].entries(), n, 4))
            });
            let witness_ok = cert.primal_witness.as_ref().is_none_or(|p| {
                cert.targets
                    .iter()
                    .all(|t| restricts(t.entries(), p.entries(), n))
            });
            if !report.is_valid()
                || !walks_ok
                || !witness_ok
                || report.implied_k_bound != Some(half_ceil_half(n))
            {
                errors.push(format!(
                    "N = {n}: {:?} {:?}",
                    cert.inputs, report.violations
                ));
            }
        }
    }
    fail_if(
        &errors,
        format!("{total} certificates valid, implied K = ½⌈N/2⌉"),
    )
}

/// Class-to-class distances from the oracle graph; germs never count.
fn chain_violations(model: &DualModel, oracle: &OracleGraph, chain: &Chain, k: usize) -> usize {
    let class = |p: &PointId| model.kind(*p) == PointKind::Class;
    let mut bad = 0;
    for x in chain.start_part().iter().filter(|p| class(p)) {
        let dist = oracle.bfs(oracle.index(model.signature(*x).entries()));
        for y in chain.end_part().iter().filter(|p| class(p)) {
            if let Some(d) = dist[oracle.index(model.signature(*y).entries())] {
                if d < k || chain_lower_bound(model, chain, *x, *y, true).is_err() {
                    bad += 1;
                }
            }
        }
    }
    bad
}

fn chain_lemma() -> Outcome {
    let mut chains = 0;
    let mut violations = 0;
    let mut errors = Vec::new();
    for n in 3..=9 {
        let b = default_bound(n);
        let model = DualModel::build(n, b).map_err(|e| e.to_string())?;
        let oracle = OracleGraph::build(n, b as i64);
        let (zero, ones) = ends(n);
        let (x, y) = (
            PointSet::from([model.class_point(&zero).unwrap()]),
            PointSet::from([model.class_point(&ones).unwrap()]),
        );
        for k in 2..=(n / 2) as usize {
            let c = find_admissible_chain(&model, &x, &y, k, true).map_err(|e| e.to_string())?;
            chains += 1;
            violations += chain_violations(&model, &oracle, &c, k);
        }

        let classes: Vec<PointId> = model.class_points().iter().copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ u64::from(n) << 8);
        let mut pairs = 0;
        while pairs < 50 {
            let pick = |rng: &mut ChaCha8Rng| -> PointSet {
                let size = 1 + (rand::Rng::gen_range(rng, 0..3));
                classes.choose_multiple(rng, size).copied().collect()
            };
            let (sx, sy) = (pick(&mut rng), pick(&mut rng));
            let Some(d) = set_distance(&model, &sx, &sy, true).map_err(|e| e.to_string())? else {
                continue;
            };
            pairs += 1;
            for k in 2..=d {
                let c = find_admissible_chain(&model, &sx, &sy, k, true)
                    .map_err(|e| format!("N = {n}: {e}"))?;
                if !validate_chain(&model, &c).is_valid() {
                    errors.push(format!("N = {n}: invalid chain"));
                }
                chains += 1;
                violations += chain_violations(&model, &oracle, &c, k);
            }
        }
    }
    if violations > 0 {
        errors.push(format!("{violations} violations"));
    }
    fail_if(&errors, format!("{chains} chains, 0 violations"))
}

fn vanishes_from(e: &[i64], i: usize) -> bool {
    e[i..].iter().all(|&x| x == 0)
}

fn zero_tails() -> Outcome {
    let mut checked = 0;
    let mut errors = Vec::new();
    for n in 4..=11u32 {
        let sigs = all_sigs(n, 1);
        let k = sigs[0].len();
        for a in &sigs {
            for c in &sigs {
                if !oracle_inseparable(a, c, n, 1) {
                    continue;
                }
                checked += 1;
                let brute = (0..k - 1).all(|i| !vanishes_from(a, i) || vanishes_from(c, i + 1));
                let lib = dual_zero_tail_step(&sig(a, n), &sig(c, n)).map_err(|e| e.to_string())?;
                if !brute || !lib {
                    errors.push(format!("dual: {a:?} ~ {c:?} in SO({n})"));
                }
            }
        }
        if n % 2 == 1 {
            let germs = all_sigs(n - 1, 1);
            let kc = germs[0].len();
            for a in &germs {
                for c in &germs {
                    if oracle_common_extension(&[a.clone(), c.clone()], n, 2).is_none() {
                        continue;
                    }
                    checked += 1;
                    let brute =
                        (0..kc - 1).all(|i| !vanishes_from(a, i) || vanishes_from(c, i + 1));
                    let lib = zero_tail_star_step(&sig(a, n - 1), &sig(c, n - 1))
                        .map_err(|e| e.to_string())?;
                    if !brute || !lib {
                        errors.push(format!("star: {a:?} * {c:?} below SO({n})"));
                    }
                }
            }
        }
    }
    fail_if(
        &errors,
        format!("{checked} related pairs, 0 counterexamples"),
    )
}

fn truncation_stability() -> Outcome {
    let mut errors = Vec::new();
    let mut pairs = 0;
    for n in 3..=8 {
        let (m3, m4) = (
            DualModel::build(n, 3).map_err(|e| e.to_string())?,
            DualModel::build(n, 4).map_err(|e| e.to_string())?,
        );
        let small = enumerate(n, 2);
        for a in &small {
            for c in &small {
                pairs += 1;
                let d3 = m3.class_distance(a, c).map_err(|e| e.to_string())?;
                let d4 = m4.class_distance(a, c).map_err(|e| e.to_string())?;
                if d3 != d4 {
                    errors.push(format!("N = {n}: d({a}, {c}) {d3:?} -> {d4:?}"));
                }
            }
        }
    }
    let sweep = run_sweep(&VerifyConfig::default())?;
    if !sweep.passed() {
        errors.push(format!("sweep failed:\n{}", sweep.render()));
    }
    if sweep.seconds >= 60.0 {
        errors.push(format!("sweep took {:.2}s", sweep.seconds));
    }
    fail_if(
        &errors,
        format!(
            "{pairs} pairs stable at bound 3 -> 4; sweep passed in {:.2}s",
            sweep.seconds
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("orc", orc),
        ("extremal distance", extremal_distance),
        ("oracle equivalence", oracle_equivalence),
        ("D(A)", d_of_sub),
        ("minimality parity", minimality_parity),
        ("constants table", constants_table),
        ("merge certificates", certificates),
        ("chain lemma", chain_lemma),
        ("zero tails", zero_tails),
        ("truncation stability", truncation_stability),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
