//! Neighbourhoods, separation and chains of closed sets.
//!
//! A chain of length `n` is a cover `X_1, ..., X_n` of the space by closed
//! sets where only consecutive sets may meet, and where (for `n > 1`)
//! `X_1 \ X_2` and `X_n \ X_{n-1}` are nonempty. If `x` lies in
//! `X_1 \ X_2` and `y` in `X_n \ X_{n-1}`, then `d(x, y) >= n`, which is
//! how chains certify lower bounds on distances.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dualspace::{DualModel, PointId, PointSet, ProximitySpace, SpaceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("certification failure: {0}")]
    CertificationFailure(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chain {
    pub sets: Vec<PointSet>,
}

impl Chain {
    pub fn new(sets: Vec<PointSet>) -> Self {
        Self { sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `X_1 \ X_2`, or `X_1` for a chain of length 1.
    pub fn start_part(&self) -> PointSet {
        self.end_difference(0, 1)
    }

    /// `X_n \ X_{n-1}`, or `X_n` for a chain of length 1.
    pub fn end_part(&self) -> PointSet {
        let n = self.len();
        if n == 0 {
            return PointSet::new();
        }
        self.end_difference(n - 1, n.wrapping_sub(2))
    }

    fn end_difference(&self, i: usize, j: usize) -> PointSet {
        match (self.sets.get(i), self.sets.get(j)) {
            (Some(a), Some(b)) if self.len() > 1 => a.difference(b).copied().collect(),
            (Some(a), _) => a.clone(),
            _ => PointSet::new(),
        }
    }
}

/// One failed chain condition; set indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum ChainViolation {
    Empty,
    UnknownPoint { set: usize, point: PointId },
    NotClosed { set: usize },
    NotCovering { missing: Vec<PointId> },
    Overlap { i: usize, j: usize },
    EmptyStart,
    EmptyEnd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub length: usize,
    pub violations: Vec<ChainViolation>,
}

impl ChainReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Points at distance at most `n` from `y`; `Y^0 = Y`.
pub fn n_neighborhood<S: ProximitySpace + ?Sized>(
    space: &S,
    y: &PointSet,
    n: usize,
    restrict_to_class: bool,
) -> Result<PointSet, SpaceError> {
    y.iter().try_for_each(|&p| space.space().check(p))?;
    let dist = space
        .proximity(restrict_to_class)
        .bfs_from(y.iter().map(|p| p.0));
    Ok(dist
        .into_iter()
        .enumerate()
        .filter(|(_, d)| matches!(d, Some(d) if *d <= n))
        .map(|(i, _)| PointId(i))
        .collect())
}

/// `d(X, Y)`, the least distance between members; `None` is infinite.
pub fn set_distance<S: ProximitySpace + ?Sized>(
    space: &S,
    x: &PointSet,
    y: &PointSet,
    restrict_to_class: bool,
) -> Result<Option<usize>, SpaceError> {
    x.iter()
        .chain(y)
        .try_for_each(|&p| space.space().check(p))?;
    let dist = space
        .proximity(restrict_to_class)
        .bfs_from(x.iter().map(|p| p.0));
    Ok(y.iter().filter_map(|p| dist[p.0]).min())
}

pub fn validate_chain<S: ProximitySpace + ?Sized>(space: &S, chain: &Chain) -> ChainReport {
    let sp = space.space();
    let mut violations = Vec::new();
    let n = chain.len();
    if n == 0 {
        violations.push(ChainViolation::Empty);
    }
    let mut known = true;
    for (i, set) in chain.sets.iter().enumerate() {
        if let Some(&point) = set.iter().find(|p| sp.check(**p).is_err()) {
            violations.push(ChainViolation::UnknownPoint { set: i + 1, point });
            known = false;
        }
    }
    if !known {
        return ChainReport {
            length: n,
            violations,
        };
    }
    for (i, set) in chain.sets.iter().enumerate() {
        if !sp.is_closed(set).unwrap_or(false) {
            violations.push(ChainViolation::NotClosed { set: i + 1 });
        }
    }
    let covered: PointSet = chain.sets.iter().flatten().copied().collect();
    let missing: Vec<PointId> = sp.points().filter(|p| !covered.contains(p)).collect();
    if !missing.is_empty() && n > 0 {
        violations.push(ChainViolation::NotCovering { missing });
    }
    for i in 0..n {
        for j in i + 2..n {
            if !chain.sets[i].is_disjoint(&chain.sets[j]) {
                violations.push(ChainViolation::Overlap { i: i + 1, j: j + 1 });
            }
        }
    }
    if n > 1 {
        if chain.start_part().is_empty() {
            violations.push(ChainViolation::EmptyStart);
        }
        if chain.end_part().is_empty() {
            violations.push(ChainViolation::EmptyEnd);
        }
    }
    ChainReport {
        length: n,
        violations,
    }
}

/// Endpoint witnesses at finite distance, if the chain has any.
pub fn is_admissible<S: ProximitySpace + ?Sized>(
    space: &S,
    chain: &Chain,
    restrict_to_class: bool,
) -> Option<(PointId, PointId)> {
    if !validate_chain(space, chain).is_valid() {
        return None;
    }
    let g = space.proximity(restrict_to_class);
    let ends = chain.end_part();
    chain.start_part().iter().find_map(|&x| {
        let dist = g.bfs_from([x.0]);
        ends.iter().find(|y| dist[y.0].is_some()).map(|&y| (x, y))
    })
}

/// Returns the chain length after checking by breadth-first search that
/// `d(x, y)` is not smaller.
pub fn chain_lower_bound<S: ProximitySpace + ?Sized>(
    space: &S,
    chain: &Chain,
    x: PointId,
    y: PointId,
    restrict_to_class: bool,
) -> Result<usize, ChainError> {
    let report = validate_chain(space, chain);
    if !report.is_valid() {
        return Err(ChainError::PreconditionViolated(format!(
            "invalid chain: {:?}",
            report.violations
        )));
    }
    if !chain.start_part().contains(&x) {
        return Err(ChainError::PreconditionViolated(format!(
            "{x} is not in X_1 \\ X_2"
        )));
    }
    if !chain.end_part().contains(&y) {
        return Err(ChainError::PreconditionViolated(format!(
            "{y} is not in X_n \\ X_(n-1)"
        )));
    }
    let n = chain.len();
    if n > 1 {
        if let Some(d) = space.proximity(restrict_to_class).distance(x.0, y.0) {
            if d < n {
                return Err(ChainError::CertificationFailure(format!(
                    "d({x}, {y}) = {d} is below the chain length {n}"
                )));
            }
        }
    }
    Ok(n)
}

/// Disjoint open sets around `y` and `z`, if any exist.
///
/// The candidates are the smallest open sets containing `y` and `z`. The
/// answer is checked against the closure criterion `cl(Y^1) ∩ Z = ∅ and
/// cl(Z^1) ∩ Y = ∅` computed with the full relation.
pub fn separate<S: ProximitySpace + ?Sized>(
    space: &S,
    y: &PointSet,
    z: &PointSet,
) -> Result<Option<(PointSet, PointSet)>, ChainError> {
    let sp = space.space();
    let u = sp.open_hull(y)?;
    let v = sp.open_hull(z)?;
    let disjoint = u.is_disjoint(&v);

    let y1 = sp.closure_of(&n_neighborhood(sp, y, 1, false)?)?;
    let z1 = sp.closure_of(&n_neighborhood(sp, z, 1, false)?)?;
    let criterion = y1.is_disjoint(z) && z1.is_disjoint(y);
    if criterion != disjoint {
        return Err(ChainError::CertificationFailure(format!(
            "open-hull separation ({disjoint}) disagrees with the closure criterion ({criterion})"
        )));
    }
    Ok(disjoint.then_some((u, v)))
}

/// Builds an admissible chain `X_1, ..., X_k` with `x ⊆ X_1 \ X_2` and
/// `y ⊆ X_k \ X_{k-1}` by repeatedly separating the growing left part
/// from shrinking neighbourhoods of `y`.
pub fn find_admissible_chain<S: ProximitySpace + ?Sized>(
    space: &S,
    x: &PointSet,
    y: &PointSet,
    k: usize,
    restrict_to_class: bool,
) -> Result<Chain, ChainError> {
    let sp = space.space();
    if k < 2 {
        return Err(ChainError::PreconditionViolated(format!(
            "k = {k} must be at least 2"
        )));
    }
    if x.is_empty() || y.is_empty() {
        return Err(ChainError::PreconditionViolated(
            "empty endpoint set".into(),
        ));
    }
    let d = set_distance(space, x, y, restrict_to_class)?;
    if matches!(d, Some(d) if d < k) {
        return Err(ChainError::PreconditionViolated(format!(
            "d(X, Y) = {} is less than k = {k}",
            d.unwrap()
        )));
    }
    let g = space.proximity(restrict_to_class);
    let start = x.iter().next().unwrap().0;
    let reach = g.bfs_from([start]);
    if x.iter().chain(y).any(|p| reach[p.0].is_none()) {
        return Err(ChainError::PreconditionViolated(
            "X and Y are not in one component".into(),
        ));
    }

    let all = sp.all_points();
    let mut sets: Vec<PointSet> = Vec::with_capacity(k);
    let mut left = x.clone();
    let mut y_i = all.clone();
    for i in 1..k {
        let target = n_neighborhood(space, y, k - i - 1, restrict_to_class)?;
        let (u, v) = separate(space, &left, &target)?.ok_or_else(|| {
            ChainError::CertificationFailure(format!("step {i}: no separating open sets"))
        })?;
        let x_i: PointSet = sp.complement(&v).intersection(&y_i).copied().collect();
        y_i = sp.complement(&u);
        left = sets.iter().flatten().chain(&x_i).copied().collect();
        sets.push(x_i);
    }
    sets.push(y_i);
    let chain = Chain::new(sets);

    let report = validate_chain(space, &chain);
    if !report.is_valid() {
        return Err(ChainError::CertificationFailure(format!(
            "constructed chain is invalid: {:?}",
            report.violations
        )));
    }
    if !x.is_subset(&chain.start_part()) || !y.is_subset(&chain.end_part()) {
        return Err(ChainError::CertificationFailure(
            "endpoint sets escaped the chain ends".into(),
        ));
    }
    Ok(chain)
}

/// A chain between two sets together with its witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainCertificate {
    pub n: u32,
    pub bound: u32,
    pub restrict_to_class: bool,
    pub x: PointId,
    pub y: PointId,
    pub chain: Chain,
}

impl ChainCertificate {
    /// Re-derives the lower bound on a freshly built model.
    pub fn check(&self) -> Result<usize, ChainError> {
        let model = DualModel::build(self.n, self.bound)
            .map_err(|e| ChainError::PreconditionViolated(e.to_string()))?;
        chain_lower_bound(&model, &self.chain, self.x, self.y, self.restrict_to_class)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Property1Report {
    /// The witness set `Y`: the class points.
    pub witness: Vec<PointId>,
    pub witness_closed: bool,
    pub relatively_discrete: bool,
    pub contains_nonsingleton_components: bool,
    /// Components of the full model relation that contain germ points.
    /// They exist only because a germ stands in for a whole half-line.
    pub germ_components_in_model: usize,
    pub samples_checked: usize,
    pub samples_with_closed_x1: usize,
}

impl Property1Report {
    pub fn passes(&self) -> bool {
        self.witness_closed
            && self.relatively_discrete
            && self.contains_nonsingleton_components
            && self.samples_checked == self.samples_with_closed_x1
    }
}

/// Checks that the class points form a closed, relatively discrete set
/// containing every nontrivial component, and that `X^1` is closed for
/// sample closed sets `X`.
pub fn verify_property1(model: &DualModel) -> Result<Property1Report, ChainError> {
    let sp = model.space();
    let classes = model.class_points();
    let witness_closed = sp.is_closed(classes)?;
    let relatively_discrete = classes.iter().all(|&p| {
        sp.point_closure(p)
            .intersection(classes)
            .eq(std::iter::once(&p))
    });
    let g = model.proximity(true);
    let contains_nonsingleton_components = g
        .components()
        .iter()
        .filter(|c| c.len() > 1)
        .all(|c| c.iter().all(|&v| classes.contains(&PointId(v))));
    let germ_components_in_model = sp
        .relation()
        .components()
        .iter()
        .filter(|c| c.iter().any(|&v| !classes.contains(&PointId(v))))
        .count();

    let mut samples: Vec<PointSet> = vec![PointSet::new(), sp.all_points(), classes.clone()];
    samples.extend(sp.points().map(|p| sp.point_closure(p).clone()));
    let mut closed = 0;
    for s in &samples {
        let x1 = n_neighborhood(model, s, 1, true)?;
        if sp.is_closed(&x1)? {
            closed += 1;
        }
    }
    Ok(Property1Report {
        witness: classes.iter().copied().collect(),
        witness_closed,
        relatively_discrete,
        contains_nonsingleton_components,
        germ_components_in_model,
        samples_checked: samples.len(),
        samples_with_closed_x1: closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualspace::FiniteT0Space;
    use crate::signatures::{GroupContext, Signature};

    fn ends(model: &DualModel) -> (PointId, PointId) {
        let ctx = GroupContext::new(model.n()).unwrap();
        (
            model.class_point(&Signature::zero(ctx)).unwrap(),
            model
                .class_point(&Signature::constant(ctx, 1).unwrap())
                .unwrap(),
        )
    }

    #[test]
    fn neighborhoods() {
        let m = DualModel::build(4, 2).unwrap();
        let y = PointSet::from([m.class_point(&Signature::parse("2,2", 4).unwrap()).unwrap()]);
        assert_eq!(n_neighborhood(&m, &y, 0, true).unwrap(), y);
        let y1 = n_neighborhood(&m, &y, 1, true).unwrap();
        let g = m.proximity(true);
        let direct: PointSet = m
            .space()
            .points()
            .filter(|p| y.iter().any(|q| g.has_edge(p.0, q.0)))
            .collect();
        assert_eq!(y1, direct);
        assert!(n_neighborhood(&m, &PointSet::from([PointId(99)]), 1, true).is_err());
    }

    #[test]
    fn trivial_and_broken_chains() {
        let m = DualModel::build(5, 1).unwrap();
        let one = Chain::new(vec![m.space().all_points()]);
        assert!(validate_chain(&m, &one).is_valid());
        let (x, _) = ends(&m);
        assert_eq!(chain_lower_bound(&m, &one, x, x, true).unwrap(), 1);

        let all = m.space().all_points();
        let bad = Chain::new(vec![all.clone(), PointSet::new(), all.clone()]);
        let r = validate_chain(&m, &bad);
        assert_eq!(r.violations, vec![ChainViolation::Overlap { i: 1, j: 3 }]);
        let bad = Chain::new(vec![PointSet::from([x]), all]);
        let r = validate_chain(&m, &bad);
        assert_eq!(r.violations, vec![ChainViolation::EmptyStart]);

        let g = *m.germ_points().iter().next().unwrap();
        let open_not_closed = Chain::new(vec![PointSet::from([g]), m.space().all_points()]);
        let r = validate_chain(&m, &open_not_closed);
        assert!(r.violations.contains(&ChainViolation::NotClosed { set: 1 }));
    }

    #[test]
    fn extremal_chain_n7() {
        let m = DualModel::build(7, 1).unwrap();
        let (x, y) = ends(&m);
        let chain =
            find_admissible_chain(&m, &PointSet::from([x]), &PointSet::from([y]), 3, true).unwrap();
        assert_eq!(chain.len(), 3);
        assert!(is_admissible(&m, &chain, true).is_some());
        assert_eq!(chain_lower_bound(&m, &chain, x, y, true).unwrap(), 3);
        assert_eq!(m.distance(x, y, true).unwrap(), Some(3));
    }

    #[test]
    fn chain_precondition_errors() {
        let m = DualModel::build(5, 1).unwrap();
        let (x, y) = ends(&m);
        let (xs, ys) = (PointSet::from([x]), PointSet::from([y]));
        assert!(find_admissible_chain(&m, &xs, &ys, 2, true).is_ok());
        assert!(matches!(
            find_admissible_chain(&m, &xs, &ys, 3, true),
            Err(ChainError::PreconditionViolated(_))
        ));
        let m = DualModel::build(4, 1).unwrap();
        let a = m.class_point(&Signature::parse("1,0", 4).unwrap()).unwrap();
        let b = m.class_point(&Signature::parse("0,0", 4).unwrap()).unwrap();
        assert!(matches!(
            find_admissible_chain(&m, &PointSet::from([a]), &PointSet::from([b]), 2, true),
            Err(ChainError::PreconditionViolated(_))
        ));
        let chain = find_admissible_chain(
            &m,
            &PointSet::from([b]),
            &PointSet::from([m.class_point(&Signature::parse("1,1", 4).unwrap()).unwrap()]),
            2,
            true,
        )
        .unwrap();
        assert!(matches!(
            chain_lower_bound(&m, &chain, a, b, true),
            Err(ChainError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn separation() {
        let m = DualModel::build(5, 1).unwrap();
        let (x, y) = ends(&m);
        let d = m.distance(x, y, true).unwrap().unwrap();
        let sep = separate(&m, &PointSet::from([x]), &PointSet::from([y])).unwrap();
        assert_eq!(sep.is_some(), d >= 2);

        let a = m.class_point(&Signature::parse("1,0", 5).unwrap()).unwrap();
        assert!(separate(&m, &PointSet::from([x]), &PointSet::from([a]))
            .unwrap()
            .is_none());

        let lab = vec!["a".to_string(), "b".to_string()];
        let cls = vec![PointSet::from([PointId(0)]), PointSet::from([PointId(1)])];
        let two = FiniteT0Space::new(lab, cls).unwrap();
        let s = separate(
            &two,
            &PointSet::from([PointId(0)]),
            &PointSet::from([PointId(1)]),
        );
        assert!(s.unwrap().is_some());
        let chain = Chain::new(vec![
            PointSet::from([PointId(0)]),
            PointSet::from([PointId(1)]),
        ]);
        assert!(validate_chain(&two, &chain).is_valid());
        assert!(is_admissible(&two, &chain, false).is_none());
    }

    #[test]
    fn property1() {
        for (n, b) in [(3, 2), (4, 1), (5, 1), (6, 1)] {
            let m = DualModel::build(n, b).unwrap();
            let r = verify_property1(&m).unwrap();
            assert!(r.passes(), "{r:?}");
            assert_eq!(r.witness.len(), m.class_points().len());
        }
    }

    #[test]
    fn certificate_round_trip() {
        let m = DualModel::build(6, 1).unwrap();
        let (x, y) = ends(&m);
        let chain =
            find_admissible_chain(&m, &PointSet::from([x]), &PointSet::from([y]), 3, true).unwrap();
        let cert = ChainCertificate {
            n: 6,
            bound: 1,
            restrict_to_class: true,
            x,
            y,
            chain,
        };
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains("\"chain\":[["));
        let back: ChainCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back.check().unwrap(), 3);
    }
}
