//! Signature arithmetic for `SO(N)` and the restriction `SO(N) -> SO(N-1)`.
//!
//! An irreducible representation of `SO(N)` is labelled by a signature of
//! `k = floor(N/2)` integers. For `N = 2k` the entries satisfy
//! `m_1 >= ... >= m_{k-1} >= |m_k|`, for `N = 2k+1` they satisfy
//! `m_1 >= ... >= m_k >= 0`. The restriction to `SO(N-1)` is
//! multiplicity free and its summands are exactly the child signatures
//! lying in a product of integer intervals (the [`BranchBox`]).
//!
//! [`branch`] enumerates that set explicitly and is the reference every
//! closed-form routine in this module is tested against.

use std::cmp::{max, min};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building or combining signatures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("SO({0}) is not supported (N must be at least 1)")]
    InvalidGroup(u32),
    #[error("wrong number of entries: expected {expected}, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("monotonicity violated at position {0}")]
    MonotonicityViolated(usize),
    #[error("negative entry at position {0}")]
    NegativeEntry(usize),
    #[error("group context mismatch: {0} vs {1}")]
    ContextMismatch(GroupContext, GroupContext),
    #[error("SO({0}) has no subgroup in this model")]
    NoSubgroup(u32),
    #[error("empty signature list")]
    EmptyList,
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// Parity of `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// The group `SO(N)` a signature belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GroupContext {
    n: u32,
}

impl GroupContext {
    pub fn new(n: u32) -> Result<Self, SignatureError> {
        if n == 0 {
            return Err(SignatureError::InvalidGroup(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of entries of a signature, `floor(N/2)`.
    pub fn k(&self) -> usize {
        (self.n / 2) as usize
    }

    pub fn parity(&self) -> Parity {
        if self.n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `SO(N-1)`, if it exists.
    pub fn child(&self) -> Option<GroupContext> {
        (self.n >= 2).then(|| GroupContext { n: self.n - 1 })
    }

    /// `SO(N+1)`.
    pub fn parent(&self) -> GroupContext {
        GroupContext { n: self.n + 1 }
    }
}

impl fmt::Display for GroupContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "so{}", self.n)
    }
}

impl From<GroupContext> for String {
    fn from(c: GroupContext) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for GroupContext {
    type Error = SignatureError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl FromStr for GroupContext {
    type Err = SignatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        let digits = t.strip_prefix("so").unwrap_or(&t);
        let n: u32 = digits
            .trim_start_matches('(')
            .trim_end_matches(')')
            .parse()
            .map_err(|_| SignatureError::Parse(s.to_string()))?;
        GroupContext::new(n)
    }
}

/// A validated signature of `SO(N)`.
///
/// The derived order compares the group first and then the entries
/// lexicographically, which is the order [`enumerate`] produces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSignature", into = "RawSignature")]
pub struct Signature {
    ctx: GroupContext,
    entries: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct RawSignature {
    n: u32,
    entries: Vec<i64>,
}

impl TryFrom<RawSignature> for Signature {
    type Error = SignatureError;

    fn try_from(raw: RawSignature) -> Result<Self, Self::Error> {
        validate(&raw.entries, raw.n)
    }
}

impl From<Signature> for RawSignature {
    fn from(s: Signature) -> Self {
        RawSignature {
            n: s.ctx.n,
            entries: s.entries,
        }
    }
}

impl Signature {
    /// Same as [`validate`].
    pub fn new(entries: Vec<i64>, n: u32) -> Result<Self, SignatureError> {
        validate(&entries, n)
    }

    /// Parses the comma-separated form, e.g. `"2,1,0"`.
    pub fn parse(text: &str, n: u32) -> Result<Self, SignatureError> {
        let t = text.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = if t.trim().is_empty() {
            Vec::new()
        } else {
            t.split(',')
                .map(|p| {
                    p.trim()
                        .parse::<i64>()
                        .map_err(|_| SignatureError::Parse(text.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        validate(&entries, n)
    }

    /// The trivial representation `(0, ..., 0)`.
    pub fn zero(ctx: GroupContext) -> Self {
        Self {
            ctx,
            entries: vec![0; ctx.k()],
        }
    }

    /// `(c, ..., c)` for `c >= 0`.
    pub fn constant(ctx: GroupContext, c: i64) -> Result<Self, SignatureError> {
        validate(&vec![c; ctx.k()], ctx.n)
    }

    pub fn ctx(&self) -> GroupContext {
        self.ctx
    }

    pub fn n(&self) -> u32 {
        self.ctx.n
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// 1-based access, matching the usual `m_i` indexing.
    pub fn entry(&self, i: usize) -> i64 {
        self.entries[i - 1]
    }

    /// Largest absolute value among the entries.
    pub fn max_abs(&self) -> i64 {
        self.entries.iter().map(|e| e.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Checks the parity-specific monotonicity rule. Positions in errors are
/// 1-based.
pub fn validate(entries: &[i64], n: u32) -> Result<Signature, SignatureError> {
    let ctx = GroupContext::new(n)?;
    let k = ctx.k();
    if entries.len() != k {
        return Err(SignatureError::WrongLength {
            expected: k,
            found: entries.len(),
        });
    }
    if n > 2 {
        match ctx.parity() {
            Parity::Even => {
                for i in 1..k - 1 {
                    if entries[i - 1] < entries[i] {
                        return Err(SignatureError::MonotonicityViolated(i));
                    }
                }
                if entries[k - 2] < entries[k - 1].abs() {
                    return Err(SignatureError::MonotonicityViolated(k - 1));
                }
            }
            Parity::Odd => {
                for i in 1..k {
                    if entries[i - 1] < entries[i] {
                        return Err(SignatureError::MonotonicityViolated(i));
                    }
                }
                if entries[k - 1] < 0 {
                    return Err(SignatureError::NegativeEntry(k));
                }
            }
        }
    }
    Ok(Signature {
        ctx,
        entries: entries.to_vec(),
    })
}

/// All signatures of `SO(n)` with `m_1 <= bound` (and `m_k >= -bound` for
/// even `n`), in ascending lexicographic order.
pub fn enumerate(n: u32, bound: u32) -> Vec<Signature> {
    let Ok(ctx) = GroupContext::new(n) else {
        return Vec::new();
    };
    let bound = bound as i64;
    let k = ctx.k();
    let mut out = Vec::new();
    if n == 1 {
        out.push(Signature::zero(ctx));
        return out;
    }
    if n == 2 {
        for m in -bound..=bound {
            out.push(Signature {
                ctx,
                entries: vec![m],
            });
        }
        return out;
    }
    let mut prefix = Vec::with_capacity(k);
    enumerate_rec(ctx, bound, &mut prefix, &mut out);
    out
}

fn enumerate_rec(ctx: GroupContext, upper: i64, prefix: &mut Vec<i64>, out: &mut Vec<Signature>) {
    let k = ctx.k();
    let pos = prefix.len();
    if pos == k {
        out.push(Signature {
            ctx,
            entries: prefix.clone(),
        });
        return;
    }
    let lower = if pos == k - 1 && ctx.parity() == Parity::Even {
        -upper
    } else {
        0
    };
    for v in lower..=upper {
        prefix.push(v);
        enumerate_rec(ctx, v.abs(), prefix, out);
        prefix.pop();
    }
}

/// Closed integer interval `[lo, hi]`; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Self {
        Self { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(max(self.lo, other.lo), min(self.hi, other.hi))
    }

    pub fn len(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo + 1) as u64
        }
    }
}

/// Coordinate intervals of the restriction of a signature to `SO(N-1)`.
///
/// The branch set is the set of child-valid signatures inside the box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchBox {
    pub ctx: GroupContext,
    pub intervals: Vec<Interval>,
}

impl BranchBox {
    pub fn contains(&self, sigma: &Signature) -> bool {
        sigma.ctx == self.ctx
            && self
                .intervals
                .iter()
                .zip(&sigma.entries)
                .all(|(iv, &x)| iv.contains(x))
    }

    pub fn intersect(&self, other: &BranchBox) -> BranchBox {
        BranchBox {
            ctx: self.ctx,
            intervals: self
                .intervals
                .iter()
                .zip(&other.intervals)
                .map(|(a, b)| a.intersect(b))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.iter().any(Interval::is_empty)
    }

    /// Number of integer points in the box, ignoring child validity.
    pub fn volume(&self) -> u64 {
        self.intervals.iter().map(Interval::len).product()
    }

    /// The corner built from every interval's lower end.
    ///
    /// For a nonempty box that is an intersection of branch boxes this is
    /// always a valid child signature: the lower ends are `|m_{i+1}|`
    /// (decreasing, nonnegative) for even `N`, and `m_{i+1}` followed by
    /// `-m_k` for odd `N`.
    fn lower_corner(&self) -> Option<Signature> {
        if self.is_empty() {
            return None;
        }
        let entries: Vec<i64> = self.intervals.iter().map(|iv| iv.lo).collect();
        validate(&entries, self.ctx.n).ok()
    }
}

fn child_ctx(ctx: GroupContext) -> Result<GroupContext, SignatureError> {
    ctx.child().ok_or(SignatureError::NoSubgroup(ctx.n))
}

fn same_ctx(a: &Signature, b: &Signature) -> Result<(), SignatureError> {
    if a.ctx != b.ctx {
        return Err(SignatureError::ContextMismatch(a.ctx, b.ctx));
    }
    Ok(())
}

fn shared_ctx(sigs: &[Signature]) -> Result<GroupContext, SignatureError> {
    let first = sigs.first().ok_or(SignatureError::EmptyList)?;
    for s in &sigs[1..] {
        same_ctx(first, s)?;
    }
    Ok(first.ctx)
}

/// The interval box of the restriction of `pi` to `SO(N-1)`.
pub fn branch_box(pi: &Signature) -> Result<BranchBox, SignatureError> {
    let child = child_ctx(pi.ctx)?;
    let m = &pi.entries;
    let k = pi.ctx.k();
    let mut intervals = Vec::with_capacity(child.k());
    match pi.ctx.parity() {
        Parity::Even => {
            // N = 2k: m_i >= q_i >= |m_{i+1}|, i = 1..k-1
            for i in 0..k.saturating_sub(1) {
                intervals.push(Interval::new(m[i + 1].abs(), m[i]));
            }
        }
        Parity::Odd => {
            // N = 2k+1: m_i >= p_i >= m_{i+1}, and m_k >= p_k >= -m_k
            for i in 0..k - 1 {
                intervals.push(Interval::new(m[i + 1], m[i]));
            }
            intervals.push(Interval::new(-m[k - 1], m[k - 1]));
        }
    }
    Ok(BranchBox {
        ctx: child,
        intervals,
    })
}

/// Explicit enumeration of the restriction of `pi` to `SO(N-1)`: every
/// child-valid signature in [`branch_box`], ascending.
pub fn branch(pi: &Signature) -> Result<Vec<Signature>, SignatureError> {
    let bx = branch_box(pi)?;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(bx.intervals.len());
    product_rec(&bx.intervals, &mut cur, &mut |entries| {
        if let Ok(s) = validate(entries, bx.ctx.n) {
            out.push(s);
        }
    });
    Ok(out)
}

fn product_rec(intervals: &[Interval], cur: &mut Vec<i64>, visit: &mut impl FnMut(&[i64])) {
    if cur.len() == intervals.len() {
        visit(cur);
        return;
    }
    let iv = intervals[cur.len()];
    for v in iv.lo..=iv.hi {
        cur.push(v);
        product_rec(intervals, cur, visit);
        cur.pop();
    }
}

/// Whether `sigma` occurs in the restriction of `pi`.
pub fn restricts_to(pi: &Signature, sigma: &Signature) -> Result<bool, SignatureError> {
    let child = child_ctx(pi.ctx)?;
    if sigma.ctx != child {
        return Err(SignatureError::ContextMismatch(child, sigma.ctx));
    }
    Ok(branch_box(pi)?.contains(sigma))
}

/// `pi1 ~ pi2` in the dual of the motion group: the restrictions share an
/// irreducible summand.
///
/// Computed as a coordinate-wise interval overlap of the two branch boxes;
/// a nonempty overlap always contains a child-valid point (its lower
/// corner), so no enumeration is needed.
pub fn inseparable(pi1: &Signature, pi2: &Signature) -> Result<bool, SignatureError> {
    same_ctx(pi1, pi2)?;
    let a = branch_box(pi1)?;
    let b = branch_box(pi2)?;
    Ok(a.intervals
        .iter()
        .zip(&b.intervals)
        .all(|(x, y)| max(x.lo, y.lo) <= min(x.hi, y.hi)))
}

/// A child signature contained in the restriction of every `pi`, namely
/// the lower corner of the intersected branch boxes.
pub fn common_restriction(pis: &[Signature]) -> Result<Option<Signature>, SignatureError> {
    shared_ctx(pis)?;
    let mut bx = branch_box(&pis[0])?;
    for p in &pis[1..] {
        bx = bx.intersect(&branch_box(p)?);
    }
    Ok(bx.lower_corner())
}

/// A parent signature of `SO(N)` whose restriction contains every `sigma`
/// (all of `SO(N-1)`), or `None`.
///
/// Feasibility is the interleaving test: with `lo_i = min sigma_i` and
/// `hi_i = max sigma_i` taken over the list,
///
/// * `N = 2k`: `lo_i >= hi_{i+1}` for `i <= k-2`;
/// * `N = 2k+1`: `lo_i >= hi_{i+1}` for `i <= k-2` and
///   `lo_{k-1} >= max |sigma_k|`.
///
/// The witness is the least parent in each coordinate.
pub fn common_extension(sigmas: &[Signature]) -> Result<Option<Signature>, SignatureError> {
    let child = shared_ctx(sigmas)?;
    if child.n < 2 {
        return Err(SignatureError::NoSubgroup(child.n));
    }
    let parent = child.parent();
    let kc = child.k();
    let col_min = |i: usize| sigmas.iter().map(|s| s.entries[i]).min().unwrap();
    let col_max = |i: usize| sigmas.iter().map(|s| s.entries[i]).max().unwrap();
    let col_max_abs = |i: usize| sigmas.iter().map(|s| s.entries[i].abs()).max().unwrap();

    let entries = match parent.parity() {
        Parity::Even => {
            // child is odd with k-1 entries
            for i in 0..kc.saturating_sub(1) {
                if col_min(i) < col_max(i + 1) {
                    return Ok(None);
                }
            }
            let mut m: Vec<i64> = (0..kc).map(col_max).collect();
            m.push(0);
            m
        }
        Parity::Odd => {
            // child is even with k entries
            if kc == 1 {
                vec![col_max_abs(0)]
            } else {
                for i in 0..kc - 2 {
                    if col_min(i) < col_max(i + 1) {
                        return Ok(None);
                    }
                }
                if col_min(kc - 2) < col_max_abs(kc - 1) {
                    return Ok(None);
                }
                let mut m: Vec<i64> = (0..kc - 1).map(col_max).collect();
                m.push(col_max_abs(kc - 1));
                m
            }
        }
    };
    Ok(validate(&entries, parent.n).ok())
}

/// Coordinate-wise maximum; the last coordinate of an even-`N` signature
/// contributes its absolute value.
pub fn merge_max(sigs: &[Signature]) -> Result<Vec<i64>, SignatureError> {
    let ctx = shared_ctx(sigs)?;
    let k = ctx.k();
    let abs_last = ctx.parity() == Parity::Even;
    Ok((0..k)
        .map(|i| {
            sigs.iter()
                .map(|s| {
                    let e = s.entries[i];
                    if abs_last && i == k - 1 {
                        e.abs()
                    } else {
                        e
                    }
                })
                .max()
                .unwrap()
        })
        .collect())
}

/// Errors found when re-checking a [`Walk`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("walk has no steps")]
    Empty,
    #[error("expected {expected} witnesses, found {found}")]
    WitnessCount { expected: usize, found: usize },
    #[error("step {0} changes group")]
    MixedGroups(usize),
    #[error("witness of step {step} is not a common restriction of {from} and {to}")]
    BadWitness {
        step: usize,
        from: String,
        to: String,
    },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// A `~`-walk in `SO(N)^` together with, for every step, a child
/// signature contained in both restrictions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub steps: Vec<Signature>,
    pub witnesses: Vec<Signature>,
}

impl Walk {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> Option<&Signature> {
        self.steps.first()
    }

    pub fn end(&self) -> Option<&Signature> {
        self.steps.last()
    }

    /// Builds a walk through `steps`, computing witnesses.
    pub fn through(steps: Vec<Signature>) -> Result<Walk, WalkError> {
        let mut witnesses = Vec::with_capacity(steps.len().saturating_sub(1));
        for (i, pair) in steps.windows(2).enumerate() {
            let w = common_restriction(pair)?.ok_or_else(|| WalkError::BadWitness {
                step: i,
                from: pair[0].to_string(),
                to: pair[1].to_string(),
            })?;
            witnesses.push(w);
        }
        Ok(Walk { steps, witnesses })
    }

    /// Re-checks every step independently of how the walk was built.
    pub fn validate(&self) -> Result<(), WalkError> {
        let first = self.steps.first().ok_or(WalkError::Empty)?;
        if self.witnesses.len() != self.len() {
            return Err(WalkError::WitnessCount {
                expected: self.len(),
                found: self.witnesses.len(),
            });
        }
        for (i, s) in self.steps.iter().enumerate() {
            if s.ctx != first.ctx {
                return Err(WalkError::MixedGroups(i));
            }
        }
        for (i, (pair, w)) in self.steps.windows(2).zip(&self.witnesses).enumerate() {
            let ok = w.ctx == child_ctx(first.ctx)?
                && restricts_to(&pair[0], w)?
                && restricts_to(&pair[1], w)?;
            if !ok {
                return Err(WalkError::BadWitness {
                    step: i,
                    from: pair[0].to_string(),
                    to: pair[1].to_string(),
                });
            }
        }
        Ok(())
    }
}

/// One leg of the max-merge walk: `m` is moved towards the shared prefix
/// `s`, overwriting one more leading entry and zeroing one more trailing
/// entry at every step. Returns the `r + 1` states.
fn max_merge_leg(m: &[i64], s: &[i64], r: usize, n: u32) -> Vec<Signature> {
    let k = m.len();
    (0..=r)
        .map(|j| {
            let mut e = Vec::with_capacity(k);
            e.extend_from_slice(&s[..j]);
            e.extend_from_slice(&m[j..k - j]);
            e.resize(k, 0);
            validate(&e, n).expect("max-merge states are valid signatures")
        })
        .collect()
}

/// Removes repeated vertices so the walk is a path.
fn shortcut(steps: Vec<Signature>) -> Vec<Signature> {
    let mut out: Vec<Signature> = Vec::with_capacity(steps.len());
    for s in steps {
        if let Some(pos) = out.iter().position(|x| *x == s) {
            out.truncate(pos + 1);
        } else {
            out.push(s);
        }
    }
    out
}

/// An explicit walk of length at most `k = floor(N/2)` from `pi1` to
/// `pi2`.
///
/// Both endpoints are moved towards the coordinate maxima `s_j = max(m_j,
/// n_j)`: after `j` steps the state is `(s_1..s_j, m_{j+1}..m_{k-j}, 0..0)`.
/// With `k = 2r` both legs meet at `(s_1..s_r, 0..0)`; with `k = 2r+1`
/// they end at `(s_1..s_r, m_{r+1}, 0..)` and `(s_1..s_r, n_{r+1}, 0..)`,
/// which are adjacent. Repeated vertices are cut out afterwards.
pub fn walk(pi1: &Signature, pi2: &Signature) -> Result<Walk, WalkError> {
    same_ctx(pi1, pi2)?;
    child_ctx(pi1.ctx)?;
    let n = pi1.ctx.n;
    let k = pi1.ctx.k();
    let steps = if pi1 == pi2 {
        vec![pi1.clone()]
    } else if k <= 1 {
        vec![pi1.clone(), pi2.clone()]
    } else {
        let s: Vec<i64> = pi1
            .entries
            .iter()
            .zip(&pi2.entries)
            .map(|(a, b)| max(*a, *b))
            .collect();
        let r = k / 2;
        let mut fwd = max_merge_leg(&pi1.entries, &s, r, n);
        let mut back = max_merge_leg(&pi2.entries, &s, r, n);
        back.reverse();
        if k.is_multiple_of(2) {
            // both legs end at (s_1..s_r, 0..0)
            back.remove(0);
        }
        fwd.extend(back);
        shortcut(fwd)
    };
    let w = Walk::through(steps)?;
    debug_assert!(w.len() <= k.max(1));
    Ok(w)
}

/// The tail step behind the lower bound `d((0..0), (1..1)) >= k`: if
/// `pi ~ pi2` and `pi` vanishes after position `i` (`i <= k-2`), then
/// `pi2` vanishes after position `i+1`. Checks every applicable `i` and
/// returns whether all of them hold.
pub fn dual_zero_tail_step(pi: &Signature, pi2: &Signature) -> Result<bool, SignatureError> {
    if !inseparable(pi, pi2)? {
        return Ok(true);
    }
    let k = pi.ctx.k();
    if k < 2 {
        return Ok(true);
    }
    for i in 0..=k - 2 {
        let tail_zero = pi.entries[i..].iter().all(|&e| e == 0);
        if tail_zero && pi2.entries[i + 1..].iter().any(|&e| e != 0) {
            return Ok(false);
        }
    }
    Ok(true)
}
