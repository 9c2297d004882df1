//! Germ ideals, line kernels and the `*` graph.
//!
//! For `A = C*(G_N)` the set `Sub(A)` consists of the germ ideals
//! `I_{0,sigma}`, one per `SO(N-1)` signature, whose hull is the set of
//! `SO(N)` classes containing `sigma`, and the kernels of the separated
//! half-line points. Two ideals are `*`-related when their sum is proper;
//! for germ ideals that means their hulls meet.
//!
//! The module also builds the merge certificates: given three germ ideals
//! over the same Glimm ideal, containers `S^(i)` above them and short
//! `~`-walks from the containers to a common target (or to three targets
//! sharing a primal witness).

use std::collections::BTreeSet;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::signatures::{
    self, common_extension, common_restriction, enumerate, restricts_to, GroupContext, Parity,
    Signature, SignatureError, Walk, WalkError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimalError {
    #[error("N = {0} is not supported here (need N >= 3)")]
    UnsupportedN(u32),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

/// An element of the `Sub(A)` model. `sigma` is an `SO(N-1)` signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "sigma", rename_all = "snake_case")]
pub enum SubIdeal {
    GermIdeal(Signature),
    /// Stands for every `ker pi_{t,sigma}`, `t > 0`.
    LineKernel(Signature),
}

impl SubIdeal {
    pub fn sigma(&self) -> &Signature {
        match self {
            SubIdeal::GermIdeal(s) | SubIdeal::LineKernel(s) => s,
        }
    }

    /// `N`, the group of the hull.
    pub fn n(&self) -> u32 {
        self.sigma().n() + 1
    }
}

impl std::fmt::Display for SubIdeal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubIdeal::GermIdeal(s) => write!(f, "I0({s})"),
            SubIdeal::LineKernel(s) => write!(f, "ker({s})"),
        }
    }
}

fn check_n(n: u32) -> Result<(), PrimalError> {
    if n < 3 {
        Err(PrimalError::UnsupportedN(n))
    } else {
        Ok(())
    }
}

/// Germ ideals first, then line kernels, both in `enumerate` order.
pub fn sub_ideals(n: u32, bound: u32) -> Result<Vec<SubIdeal>, PrimalError> {
    check_n(n)?;
    let sigmas = enumerate(n - 1, bound);
    Ok(sigmas
        .iter()
        .cloned()
        .map(SubIdeal::GermIdeal)
        .chain(sigmas.iter().cloned().map(SubIdeal::LineKernel))
        .collect())
}

/// Class points of the hull with `m_1 <= bound`. Line kernels have no
/// class points in their hull.
pub fn hull(ideal: &SubIdeal, bound: u32) -> Result<BTreeSet<Signature>, PrimalError> {
    match ideal {
        SubIdeal::LineKernel(_) => Ok(BTreeSet::new()),
        SubIdeal::GermIdeal(sigma) => {
            let n = ideal.n();
            check_n(n)?;
            let mut out = BTreeSet::new();
            for pi in enumerate(n, bound) {
                if restricts_to(&pi, sigma)? {
                    out.insert(pi);
                }
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Containment {
    pub contains: bool,
    /// The answer is the same at `bound + 1`.
    pub stable: bool,
}

fn germ_sigma(i: &SubIdeal) -> Result<&Signature, PrimalError> {
    match i {
        SubIdeal::GermIdeal(s) => Ok(s),
        SubIdeal::LineKernel(s) => Err(PrimalError::PreconditionViolated(format!(
            "containment is only modelled between germ ideals, got ker({s})"
        ))),
    }
}

/// `I ⊆ J`, decided as `hull(J) ⊆ hull(I)` on the truncation.
pub fn contains_ideal(i: &SubIdeal, j: &SubIdeal, bound: u32) -> Result<Containment, PrimalError> {
    let (si, sj) = (germ_sigma(i)?, germ_sigma(j)?);
    if si.ctx() != sj.ctx() {
        return Err(SignatureError::ContextMismatch(si.ctx(), sj.ctx()).into());
    }
    let at = |b| -> Result<bool, PrimalError> { Ok(hull(j, b)?.is_subset(&hull(i, b)?)) };
    let contains = at(bound)?;
    Ok(Containment {
        contains,
        stable: at(bound + 1)? == contains,
    })
}

/// `I + J != A`. Reflexive; line kernels are only related to themselves.
pub fn star_adjacent(i: &SubIdeal, j: &SubIdeal) -> Result<bool, PrimalError> {
    match (i, j) {
        (SubIdeal::GermIdeal(a), SubIdeal::GermIdeal(b)) => {
            Ok(common_extension(&[a.clone(), b.clone()])?.is_some())
        }
        _ => Ok(i == j),
    }
}

/// The `*` graph on `sub_ideals(n, bound)`.
#[derive(Debug, Clone)]
pub struct StarGraph {
    pub n: u32,
    pub bound: u32,
    pub ideals: Vec<SubIdeal>,
    pub graph: Graph,
}

impl StarGraph {
    pub fn build(n: u32, bound: u32) -> Result<Self, PrimalError> {
        let ideals = sub_ideals(n, bound)?;
        let germs = ideals
            .iter()
            .filter(|i| matches!(i, SubIdeal::GermIdeal(_)))
            .count();
        let mut graph = Graph::new(ideals.len());
        for a in 0..germs {
            for b in a + 1..germs {
                if star_adjacent(&ideals[a], &ideals[b])? {
                    graph.add_edge(a, b);
                }
            }
        }
        Ok(Self {
            n,
            bound,
            ideals,
            graph,
        })
    }

    pub fn index_of(&self, ideal: &SubIdeal) -> Result<usize, PrimalError> {
        self.ideals.iter().position(|x| x == ideal).ok_or_else(|| {
            PrimalError::PreconditionViolated(format!("{ideal} is outside the truncation"))
        })
    }

    pub fn distance(&self, i: &SubIdeal, j: &SubIdeal) -> Result<Option<usize>, PrimalError> {
        Ok(self.graph.distance(self.index_of(i)?, self.index_of(j)?))
    }

    /// Largest component diameter, singletons counting 0.
    pub fn big_d(&self) -> usize {
        self.graph
            .components()
            .iter()
            .map(|c| self.graph.diameter_of(c))
            .max()
            .unwrap_or(0)
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph star_so{}_b{} {{\n", self.n, self.bound);
        for (v, ideal) in self.ideals.iter().enumerate() {
            let shape = match ideal {
                SubIdeal::GermIdeal(_) => "ellipse",
                SubIdeal::LineKernel(_) => "box",
            };
            out.push_str(&format!("  i{v} [label=\"{ideal}\", shape={shape}];\n"));
        }
        for a in 0..self.graph.len() {
            for &b in self.graph.neighbors(a) {
                if a < b {
                    out.push_str(&format!("  i{a} -- i{b};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn export(&self) -> StarExport {
        StarExport {
            n: self.n,
            bound: self.bound,
            ideals: self.ideals.clone(),
            edges: (0..self.graph.len())
                .flat_map(|a| {
                    self.graph
                        .neighbors(a)
                        .iter()
                        .filter(move |&&b| a < b)
                        .map(move |&b| (a, b))
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarExport {
    pub n: u32,
    pub bound: u32,
    pub ideals: Vec<SubIdeal>,
    pub edges: Vec<(usize, usize)>,
}

/// `d*(I, J)` in the `*` graph of the truncation; `None` is infinite.
pub fn d_star(i: &SubIdeal, j: &SubIdeal, bound: u32) -> Result<Option<usize>, PrimalError> {
    StarGraph::build(i.n(), bound)?.distance(i, j)
}

/// `D(A)` on the truncation. For `N = 2` the algebra is quasi-standard and
/// the value is 0 without building anything.
pub fn big_d(n: u32, bound: u32) -> Result<usize, PrimalError> {
    match n {
        2 => Ok(0),
        _ => Ok(StarGraph::build(n, bound)?.big_d()),
    }
}

fn germ_hulls(n: u32, bound: u32) -> Result<Vec<(Signature, BTreeSet<Signature>)>, PrimalError> {
    check_n(n)?;
    enumerate(n - 1, bound)
        .into_iter()
        .map(|s| {
            let h = hull(&SubIdeal::GermIdeal(s.clone()), bound)?;
            Ok((s, h))
        })
        .collect()
}

/// Minimal elements of `Sub(A)`: all line kernels, and the germ ideals
/// whose hull is not strictly inside another germ hull.
pub fn min_primal(n: u32, bound: u32) -> Result<Vec<SubIdeal>, PrimalError> {
    let hulls = germ_hulls(n, bound)?;
    let mut out: Vec<SubIdeal> = hulls
        .iter()
        .filter(|(_, h)| {
            !hulls
                .iter()
                .any(|(_, other)| h.len() < other.len() && h.is_subset(other))
        })
        .map(|(s, _)| SubIdeal::GermIdeal(s.clone()))
        .collect();
    out.extend(hulls.into_iter().map(|(s, _)| SubIdeal::LineKernel(s)));
    Ok(out)
}

/// Whether [`min_primal`] picks the same germ ideals at `bound + 1`.
pub fn min_primal_is_stable(n: u32, bound: u32) -> Result<bool, PrimalError> {
    let here = min_primal(n, bound)?;
    let there: BTreeSet<SubIdeal> = min_primal(n, bound + 1)?.into_iter().collect();
    Ok(here.iter().all(|i| there.contains(i))
        && there
            .iter()
            .filter(|i| i.sigma().max_abs() <= bound as i64)
            .all(|i| here.contains(i)))
}

/// Pairs `(sigma, tau)` with `I_{0,sigma}` strictly inside `I_{0,tau}`.
pub fn strict_germ_containments(
    n: u32,
    bound: u32,
) -> Result<Vec<(Signature, Signature)>, PrimalError> {
    let hulls = germ_hulls(n, bound)?;
    let mut out = Vec::new();
    for (s, hs) in &hulls {
        for (t, ht) in &hulls {
            if ht.len() < hs.len() && ht.is_subset(hs) {
                out.push((s.clone(), t.clone()));
            }
        }
    }
    Ok(out)
}

/// `ker pi_1 ∩ ... ∩ ker pi_r` is primal when some `SO(N-1)` signature
/// lies below all `pi_i`; the net `pi_{t,sigma}` with `t -> 0` then
/// converges to each of them. Returns that signature.
pub fn is_primal_family(pis: &[Signature]) -> Result<Option<Signature>, PrimalError> {
    Ok(common_restriction(pis)?)
}

/// The tail step behind `D(A) >= (N-1)/2` for odd `N`: if `sigma`
/// vanishes from position `i+1` on (`i <= k-2`) and `sigma * sigma'`, then
/// `sigma'` vanishes from position `i+2` on.
pub fn zero_tail_star_step(sigma: &Signature, sigma2: &Signature) -> Result<bool, PrimalError> {
    if sigma.ctx().parent().parity() != Parity::Odd {
        return Err(PrimalError::PreconditionViolated(format!(
            "{} is not an odd orthogonal group",
            sigma.ctx().parent()
        )));
    }
    let (a, b) = (
        SubIdeal::GermIdeal(sigma.clone()),
        SubIdeal::GermIdeal(sigma2.clone()),
    );
    if !star_adjacent(&a, &b)? {
        return Err(PrimalError::PreconditionViolated(format!(
            "{a} and {b} are not *-adjacent"
        )));
    }
    let (x, y) = (sigma.entries(), sigma2.entries());
    let k = x.len();
    Ok((0..k.saturating_sub(1))
        .filter(|&i| x[i..].iter().all(|&e| e == 0))
        .all(|i| y[i + 1..].iter().all(|&e| e == 0)))
}

/// Walk length and number of targets prescribed for `n`.
pub fn case_table(n: u32) -> Result<(usize, usize), PrimalError> {
    check_n(n)?;
    let n = n as usize;
    Ok(match n % 4 {
        0 => (n / 4 - 1, 1),
        2 => ((n - 2) / 4 - 1, 3),
        3 => ((n - 3) / 4, 1),
        _ => ((n - 1) / 4 - 1, 3),
    })
}

/// `K(M(A)) <= claimed_n + 1` with one target, `claimed_n + 3/2` with a
/// primal triple.
pub fn implied_k_bound(claimed_n: usize, targets: usize) -> Rational64 {
    let base = Rational64::from_integer(claimed_n as i64);
    if targets == 1 {
        base + 1
    } else {
        base + Rational64::new(3, 2)
    }
}

/// `½⌈N/2⌉`.
pub fn half_ceil_half(n: u32) -> Rational64 {
    Rational64::new(n.div_ceil(2) as i64, 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeCertificate {
    pub n: u32,
    /// `n mod 4`.
    pub case: u32,
    pub inputs: Vec<Signature>,
    pub containers: Vec<Signature>,
    pub walks: Vec<Walk>,
    pub targets: Vec<Signature>,
    pub primal_witness: Option<Signature>,
    pub claimed_n: usize,
}

/// Step `i >= 1` of the walk from a container: the first `i` merged
/// maxima, then `c_i, c_{i+1}, ...` of the input, then zeros.
fn merge_state(
    ctx: GroupContext,
    merged: &[i64],
    c: &[i64],
    i: usize,
) -> Result<Signature, PrimalError> {
    let k = ctx.k();
    let end = match ctx.parity() {
        Parity::Even => k - 1 - i,
        Parity::Odd => k - i,
    };
    let mut e: Vec<i64> = merged[..i].to_vec();
    if end + 1 > i {
        e.extend_from_slice(&c[i - 1..end]);
    }
    e.resize(k, 0);
    Ok(signatures::validate(&e, ctx.n())?)
}

/// Containers above each input, walks of the prescribed length from them
/// and the target signature(s).
pub fn merge_certificate(
    n: u32,
    s1: &Signature,
    s2: &Signature,
    s3: &Signature,
) -> Result<MergeCertificate, PrimalError> {
    check_n(n)?;
    let inputs = vec![s1.clone(), s2.clone(), s3.clone()];
    let ctx = GroupContext::new(n)?;
    for s in &inputs {
        if s.n() != n - 1 {
            return Err(SignatureError::ContextMismatch(s.ctx(), ctx.child().unwrap()).into());
        }
    }
    let merged = signatures::merge_max(&inputs)?;
    let (len, target_count) = case_table(n)?;

    let mut containers = Vec::with_capacity(3);
    let mut walks = Vec::with_capacity(3);
    for s in &inputs {
        let steps = (1..=len + 1)
            .map(|i| merge_state(ctx, &merged, s.entries(), i))
            .collect::<Result<Vec<_>, _>>()?;
        containers.push(steps[0].clone());
        walks.push(Walk::through(steps)?);
    }
    let ends: Vec<Signature> = walks.iter().map(|w| w.end().unwrap().clone()).collect();
    let (targets, primal_witness) = if target_count == 1 {
        (vec![ends[0].clone()], None)
    } else {
        let m = len + 1;
        let mut w = merged[..m].to_vec();
        w.resize(ctx.child().unwrap().k(), 0);
        (ends, Some(signatures::validate(&w, n - 1)?))
    };
    Ok(MergeCertificate {
        n,
        case: n % 4,
        inputs,
        containers,
        walks,
        targets,
        primal_witness,
        claimed_n: len,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum CertificateViolation {
    UnsupportedN {
        n: u32,
    },
    WrongCase {
        expected: u32,
        found: u32,
    },
    WrongArity {
        what: String,
        expected: usize,
        found: usize,
    },
    WrongGroup {
        what: String,
        index: usize,
    },
    NotAContainer {
        index: usize,
    },
    BadWalk {
        walk: usize,
        error: String,
    },
    WalkStart {
        walk: usize,
    },
    WalkEnd {
        walk: usize,
    },
    WalkTooLong {
        walk: usize,
        length: usize,
        claimed: usize,
    },
    ClaimedLength {
        expected: usize,
        found: usize,
    },
    MissingWitness,
    WitnessNotCommon {
        target: usize,
    },
    NotPrimal,
    KBound {
        implied: String,
        expected: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub n: u32,
    #[serde(with = "crate::constants::rational_text::option")]
    pub implied_k_bound: Option<Rational64>,
    #[serde(with = "crate::constants::rational_text")]
    pub expected_k: Rational64,
    pub violations: Vec<CertificateViolation>,
}

impl CertificateReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-derives every claim of a certificate from scratch.
pub fn validate_certificate(cert: &MergeCertificate) -> CertificateReport {
    use CertificateViolation as V;
    let n = cert.n;
    let mut v = Vec::new();
    let Ok((len, target_count)) = case_table(n) else {
        return CertificateReport {
            n,
            implied_k_bound: None,
            expected_k: Rational64::from_integer(0),
            violations: vec![V::UnsupportedN { n }],
        };
    };
    let expected_k = half_ceil_half(n);
    if cert.case != n % 4 {
        v.push(V::WrongCase {
            expected: n % 4,
            found: cert.case,
        });
    }
    for (what, found, expected) in [
        ("inputs", cert.inputs.len(), 3),
        ("containers", cert.containers.len(), 3),
        ("walks", cert.walks.len(), 3),
        ("targets", cert.targets.len(), target_count),
    ] {
        if found != expected {
            v.push(V::WrongArity {
                what: what.into(),
                expected,
                found,
            });
        }
    }
    if !v.is_empty() {
        return CertificateReport {
            n,
            implied_k_bound: None,
            expected_k,
            violations: v,
        };
    }
    for (what, sigs, group) in [
        ("input", &cert.inputs, n - 1),
        ("container", &cert.containers, n),
        ("target", &cert.targets, n),
    ] {
        for (index, s) in sigs.iter().enumerate() {
            if s.n() != group {
                v.push(V::WrongGroup {
                    what: what.into(),
                    index,
                });
            }
        }
    }
    if !v.is_empty() {
        return CertificateReport {
            n,
            implied_k_bound: None,
            expected_k,
            violations: v,
        };
    }
    if cert.claimed_n != len {
        v.push(V::ClaimedLength {
            expected: len,
            found: cert.claimed_n,
        });
    }
    for i in 0..3 {
        if !restricts_to(&cert.containers[i], &cert.inputs[i]).unwrap_or(false) {
            v.push(V::NotAContainer { index: i });
        }
        let w = &cert.walks[i];
        if let Err(e) = w.validate() {
            v.push(V::BadWalk {
                walk: i,
                error: e.to_string(),
            });
            continue;
        }
        if w.start() != Some(&cert.containers[i]) {
            v.push(V::WalkStart { walk: i });
        }
        let target = &cert.targets[if target_count == 1 { 0 } else { i }];
        if w.end() != Some(target) {
            v.push(V::WalkEnd { walk: i });
        }
        if w.len() > cert.claimed_n {
            v.push(V::WalkTooLong {
                walk: i,
                length: w.len(),
                claimed: cert.claimed_n,
            });
        }
    }
    if target_count == 3 {
        match &cert.primal_witness {
            None => v.push(V::MissingWitness),
            Some(w) => {
                for (t, target) in cert.targets.iter().enumerate() {
                    if w.n() + 1 != n || !restricts_to(target, w).unwrap_or(false) {
                        v.push(V::WitnessNotCommon { target: t });
                    }
                }
            }
        }
        if !matches!(is_primal_family(&cert.targets), Ok(Some(_))) {
            v.push(V::NotPrimal);
        }
    }
    let implied = implied_k_bound(cert.claimed_n, target_count);
    if implied != expected_k {
        v.push(V::KBound {
            implied: implied.to_string(),
            expected: expected_k.to_string(),
        });
    }
    CertificateReport {
        n,
        implied_k_bound: Some(implied),
        expected_k,
        violations: v,
    }
}
