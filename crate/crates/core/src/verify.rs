//! The full verification sweep behind `motiondual verify`.
//!
//! Every `N` in the range is checked independently, so the sweep fans out
//! over a thread pool. Random samples come from a ChaCha stream seeded by
//! `(seed, N)`, which makes results independent of scheduling.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::{self, find_admissible_chain, set_distance};
use crate::constants;
use crate::dualspace::{DualModel, PointId, PointSet, ProximitySpace};
use crate::primal::{self, StarGraph, SubIdeal};
use crate::signatures::{self, branch, enumerate, GroupContext, Signature};

/// Bound used when none is given: lattices grow quickly with `N`.
pub fn default_bound(n: u32) -> u32 {
    if n <= 9 {
        3
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub n_min: u32,
    pub n_max: u32,
    pub bound: Option<u32>,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_min: 3,
            n_max: 12,
            bound: None,
            seed: 0,
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: u32,
    pub bound: u32,
    pub outcomes: Vec<Outcome>,
}

impl NSummary {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: Vec<NSummary>,
    pub seconds: f64,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(NSummary::passed)
    }

    /// Pass/fail matrix: one row per `N`, one column per check.
    pub fn render(&self) -> String {
        let names: Vec<String> = self
            .rows
            .iter()
            .flat_map(|r| r.outcomes.iter().map(|o| o.name.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut out = String::new();
        for (i, name) in names.iter().enumerate() {
            out.push_str(&format!("  [{i:>2}] {name}\n"));
        }
        out.push_str("  N  bound ");
        for i in 0..names.len() {
            out.push_str(&format!("{i:>3}"));
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{:>3}  {:>5} ", r.n, r.bound));
            for name in &names {
                let cell = match r.outcomes.iter().find(|o| &o.name == name) {
                    Some(o) if o.passed => "ok",
                    Some(_) => "XX",
                    None => "--",
                };
                out.push_str(&format!("{cell:>3}"));
            }
            out.push('\n');
        }
        for r in &self.rows {
            for o in r.outcomes.iter().filter(|o| !o.passed) {
                out.push_str(&format!("N = {}: {} failed: {}\n", r.n, o.name, o.detail));
            }
        }
        out.push_str(&format!(
            "{} in {:.2}s\n",
            if self.passed() {
                "all checks passed"
            } else {
                "FAILURES"
            },
            self.seconds
        ));
        out
    }
}

/// Brute-force `~`: enumerate both branch sets and intersect.
pub fn brute_inseparable(a: &Signature, b: &Signature) -> bool {
    let left: BTreeSet<Signature> = branch(a).unwrap().into_iter().collect();
    branch(b).unwrap().iter().any(|s| left.contains(s))
}

/// Brute-force parent search among `SO(N)` signatures with entries at
/// most `search_bound`.
pub fn brute_common_extension(sigmas: &[Signature], search_bound: u32) -> Option<Signature> {
    let n = sigmas[0].n() + 1;
    enumerate(n, search_bound).into_iter().find(|pi| {
        let b = branch(pi).unwrap();
        sigmas.iter().all(|s| b.contains(s))
    })
}

fn check_oracles(n: u32, bound: u32) -> Outcome {
    let b = bound.min(3);
    let pis = enumerate(n, b);
    let mut pairs = 0usize;
    let mut bad = 0usize;
    for x in &pis {
        for y in &pis {
            pairs += 1;
            if signatures::inseparable(x, y).unwrap() != brute_inseparable(x, y) {
                bad += 1;
            }
        }
    }
    let sigmas = enumerate(n - 1, b);
    for x in &sigmas {
        for y in &sigmas {
            pairs += 1;
            let pair = [x.clone(), y.clone()];
            let fast = signatures::common_extension(&pair).unwrap();
            let slow = brute_common_extension(&pair, b);
            if fast.is_some() != slow.is_some() {
                bad += 1;
            }
        }
    }
    outcome(
        "oracle_equivalence",
        bad == 0,
        format!("{bad} mismatches in {pairs} pairs"),
    )
}

fn extremal(n: u32) -> (Signature, Signature) {
    let ctx = GroupContext::new(n).unwrap();
    (Signature::zero(ctx), Signature::constant(ctx, 1).unwrap())
}

fn check_extremal(model: &DualModel) -> Outcome {
    let n = model.n();
    let k = (n / 2) as usize;
    let (z, o) = extremal(n);
    let d = model.class_distance(&z, &o).ok().flatten();
    let w = signatures::walk(&z, &o);
    let walk_ok = matches!(&w, Ok(w) if w.validate().is_ok() && w.len() == k);
    let chain_ok = if k < 2 {
        true
    } else {
        let x = model.class_point(&z).unwrap();
        let y = model.class_point(&o).unwrap();
        find_admissible_chain(model, &PointSet::from([x]), &PointSet::from([y]), k, true)
            .and_then(|c| chains::chain_lower_bound(model, &c, x, y, true))
            == Ok(k)
    };
    outcome(
        "extremal_distance",
        d == Some(k) && walk_ok && chain_ok,
        format!("bfs {d:?}, walk ok {walk_ok}, chain ok {chain_ok}, expected {k}"),
    )
}

fn check_orc(model: &DualModel) -> Outcome {
    let orc = model.components_and_orc().orc;
    let k = (model.n() / 2) as usize;
    outcome("orc", orc == k, format!("Orc = {orc}, expected {k}"))
}

fn check_big_d(n: u32) -> Outcome {
    let expected = if n % 2 == 1 { (n - 1) / 2 } else { n / 2 - 1 } as usize;
    let d1 = primal::big_d(n, 1).ok();
    let d2 = primal::big_d(n, 2).ok();
    outcome(
        "big_d",
        d1 == Some(expected) && d2 == Some(expected),
        format!("bound 1: {d1:?}, bound 2: {d2:?}, expected {expected}"),
    )
}

fn check_parity(n: u32, bound: u32) -> Outcome {
    let strict = primal::strict_germ_containments(n, bound.min(3))
        .map(|v| !v.is_empty())
        .unwrap_or(false);
    let stable = primal::min_primal_is_stable(n, bound.min(2)).unwrap_or(false);
    outcome(
        "minimality_parity",
        strict == (n % 2 == 1) && stable,
        format!("strict containment {strict}, minimality stable {stable}"),
    )
}

fn check_constants(n: u32, bound: u32) -> Outcome {
    match constants::cross_check(n, bound) {
        Ok(r) => outcome("constants", true, format!("K(M) = {}", r.k_ma)),
        Err(e) => outcome("constants", false, e.to_string()),
    }
}

fn check_certificates(n: u32, rng: &mut ChaCha8Rng) -> Outcome {
    let pool = enumerate(n - 1, 3);
    let (len, _) = primal::case_table(n).unwrap();
    let mut failures = 0;
    for _ in 0..100 {
        let t: Vec<&Signature> = (0..3).map(|_| pool.choose(rng).unwrap()).collect();
        let ok = primal::merge_certificate(n, t[0], t[1], t[2]).is_ok_and(|c| {
            c.claimed_n == len
                && c.walks.iter().all(|w| w.len() == len)
                && primal::validate_certificate(&c).is_valid()
        });
        if !ok {
            failures += 1;
        }
    }
    outcome(
        "merge_certificates",
        failures == 0,
        format!("{failures} failures in 100 triples"),
    )
}

fn random_subset(pool: &[PointId], rng: &mut ChaCha8Rng) -> PointSet {
    let size = rng.gen_range(1..=3.min(pool.len()));
    pool.choose_multiple(rng, size).copied().collect()
}

/// Number of generated chains and of chain-lemma violations.
pub fn random_chain_trials(
    model: &DualModel,
    pairs: usize,
    rng: &mut ChaCha8Rng,
) -> (usize, usize) {
    let classes: Vec<PointId> = model.class_points().iter().copied().collect();
    let mut built = 0;
    let mut violations = 0;
    for _ in 0..pairs {
        for _attempt in 0..20 {
            let x = random_subset(&classes, rng);
            let far: Vec<PointId> = classes
                .iter()
                .copied()
                .filter(|p| {
                    matches!(set_distance(model, &x, &PointSet::from([*p]), true), Ok(Some(d)) if d >= 2)
                })
                .collect();
            if far.is_empty() {
                continue;
            }
            let y = random_subset(&far, rng);
            let d = set_distance(model, &x, &y, true).unwrap().unwrap();
            let k = rng.gen_range(2..=d);
            match find_admissible_chain(model, &x, &y, k, true) {
                Ok(chain) => {
                    built += 1;
                    let (sx, sy) = (chain.start_part(), chain.end_part());
                    for restrict in [true, false] {
                        if matches!(set_distance(model, &sx, &sy, restrict), Ok(Some(d)) if d < k) {
                            violations += 1;
                        }
                    }
                    let (a, b) = (x.iter().next().unwrap(), y.iter().next().unwrap());
                    if chains::chain_lower_bound(model, &chain, *a, *b, true) != Ok(k) {
                        violations += 1;
                    }
                }
                Err(_) => violations += 1,
            }
            break;
        }
    }
    (built, violations)
}

fn check_chains(model: &DualModel, rng: &mut ChaCha8Rng) -> Outcome {
    let (built, violations) = random_chain_trials(model, 50, rng);
    outcome(
        "chain_lemma",
        violations == 0,
        format!("{built} chains, {violations} violations"),
    )
}

fn check_zero_tails(n: u32) -> Outcome {
    let pis = enumerate(n, 1);
    let mut bad = 0;
    let mut checked = 0;
    for a in &pis {
        for b in &pis {
            checked += 1;
            if !signatures::dual_zero_tail_step(a, b).unwrap() {
                bad += 1;
            }
        }
    }
    if n % 2 == 1 {
        let sigmas = enumerate(n - 1, 1);
        for a in &sigmas {
            for b in &sigmas {
                let adj = primal::star_adjacent(
                    &SubIdeal::GermIdeal(a.clone()),
                    &SubIdeal::GermIdeal(b.clone()),
                )
                .unwrap();
                if adj {
                    checked += 1;
                    if !primal::zero_tail_star_step(a, b).unwrap() {
                        bad += 1;
                    }
                }
            }
        }
    }
    outcome(
        "zero_tails",
        bad == 0,
        format!("{bad} counterexamples in {checked} pairs"),
    )
}

/// Distances between class points with entries at most 2 agree at bounds
/// 3 and 4.
pub fn truncation_drift(n: u32) -> (usize, usize) {
    let small = DualModel::build(n, 3).unwrap();
    let large = DualModel::build(n, 4).unwrap();
    let pts = enumerate(n, 2);
    let mut pairs = 0;
    let mut changed = 0;
    for a in &pts {
        let (xs, xl) = (small.class_point(a).unwrap(), large.class_point(a).unwrap());
        let ds = small.proximity(true).bfs_from([xs.0]);
        let dl = large.proximity(true).bfs_from([xl.0]);
        for b in &pts {
            pairs += 1;
            let (ys, yl) = (small.class_point(b).unwrap(), large.class_point(b).unwrap());
            if ds[ys.0] != dl[yl.0] {
                changed += 1;
            }
        }
    }
    (pairs, changed)
}

fn check_truncation(n: u32) -> Outcome {
    let (pairs, changed) = truncation_drift(n);
    outcome(
        "truncation_stability",
        changed == 0,
        format!("{changed} of {pairs} distances changed from bound 3 to 4"),
    )
}

fn check_star_sanity(n: u32) -> Outcome {
    let g = StarGraph::build(n, 1).unwrap();
    let lines_isolated = g
        .ideals
        .iter()
        .enumerate()
        .filter(|(_, i)| matches!(i, SubIdeal::LineKernel(_)))
        .all(|(v, _)| g.graph.neighbors(v).is_empty());
    let model = DualModel::build(n, 1).unwrap();
    let orc = model.components_and_orc().orc;
    let d = g.big_d();
    outcome(
        "star_graph",
        lines_isolated && d <= orc + 1 && orc <= d + 1,
        format!("line kernels isolated {lines_isolated}, D = {d}, Orc = {orc}"),
    )
}

fn check_property1(model: &DualModel) -> Outcome {
    match chains::verify_property1(model) {
        Ok(r) => outcome("property1", r.passes(), format!("{r:?}")),
        Err(e) => outcome("property1", false, e.to_string()),
    }
}

/// Every check for one `N`.
pub fn verify_n(n: u32, bound: u32, seed: u64) -> NSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(n) << 32));
    let mut outcomes = Vec::new();
    match DualModel::build(n, bound.max(1)) {
        Ok(model) => {
            outcomes.push(check_orc(&model));
            outcomes.push(check_extremal(&model));
            outcomes.push(check_property1(&model));
            if n <= 9 {
                outcomes.push(check_chains(&model, &mut rng));
            }
        }
        Err(e) => outcomes.push(outcome("model", false, e.to_string())),
    }
    if n <= 9 {
        outcomes.push(check_oracles(n, bound));
    }
    outcomes.push(check_big_d(n));
    outcomes.push(check_parity(n, bound));
    outcomes.push(check_constants(n, bound.max(1)));
    outcomes.push(check_certificates(n, &mut rng));
    outcomes.push(check_zero_tails(n));
    outcomes.push(check_star_sanity(n));
    if n <= 8 {
        outcomes.push(check_truncation(n));
    }
    NSummary { n, bound, outcomes }
}

/// Runs [`verify_n`] for every `N` in the range, in parallel.
pub fn run_sweep(cfg: &VerifyConfig) -> Result<SweepSummary, String> {
    if cfg.n_min < 3 || cfg.n_min > cfg.n_max {
        return Err(format!("bad range {}..={}", cfg.n_min, cfg.n_max));
    }
    let start = Instant::now();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool.build().map_err(|e| e.to_string())?;
    let mut rows: Vec<NSummary> = pool.install(|| {
        (cfg.n_min..=cfg.n_max)
            .into_par_iter()
            .map(|n| verify_n(n, cfg.bound.unwrap_or_else(|| default_bound(n)), cfg.seed))
            .collect()
    });
    rows.sort_by_key(|r| r.n);
    Ok(SweepSummary {
        rows,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_passes_and_is_deterministic() {
        let cfg = VerifyConfig {
            n_min: 3,
            n_max: 5,
            bound: Some(1),
            seed: 7,
            jobs: Some(2),
        };
        let a = run_sweep(&cfg).unwrap();
        assert!(a.passed(), "{}", a.render());
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.rows, b.rows);
        assert!(run_sweep(&VerifyConfig { n_min: 2, ..cfg }).is_err());
    }
}
