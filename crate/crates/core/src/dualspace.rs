//! Finite `T0` models of the dual of `R^N x| SO(N)`.
//!
//! A [`FiniteT0Space`] is an Alexandrov space given by the closure of each
//! point. Its open sets are the up-sets of the specialization order, every
//! point `x` has a smallest open neighbourhood `U(x) = {q : x in cl(q)}`,
//! and two points are inseparable exactly when their smallest
//! neighbourhoods meet.
//!
//! A [`DualModel`] truncates the dual at `m_1 <= bound`: one *class point*
//! per `SO(N)` signature, which is closed, and one *germ point* per
//! `SO(N-1)` signature `sigma` standing for the whole half-line
//! `{pi_{t,sigma} : t > 0}`. The closure of a germ is the germ plus every
//! class point whose restriction contains `sigma`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::signatures::{self, enumerate, Signature, SignatureError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl std::fmt::Display for PointId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type PointSet = BTreeSet<PointId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("unknown point {0}")]
    UnknownPoint(usize),
    #[error("{labels} labels but {closures} closures")]
    LengthMismatch { labels: usize, closures: usize },
    #[error("point {0} is not in its own closure")]
    NotReflexive(usize),
    #[error("closure of {0} contains {1} but not all of cl({1})")]
    NotTransitive(usize, usize),
    #[error("points {0} and {1} have the same closure")]
    NotT0(usize, usize),
}

/// A finite topological `T0` space, stored as point closures.
#[derive(Debug, Clone)]
pub struct FiniteT0Space {
    labels: Vec<String>,
    closures: Vec<PointSet>,
    opens: Vec<PointSet>,
    relation: Graph,
}

impl FiniteT0Space {
    /// Checks reflexivity, transitivity and `T0` of the closure map.
    pub fn new(labels: Vec<String>, closures: Vec<PointSet>) -> Result<Self, SpaceError> {
        let len = labels.len();
        if closures.len() != len {
            return Err(SpaceError::LengthMismatch {
                labels: len,
                closures: closures.len(),
            });
        }
        for (x, cl) in closures.iter().enumerate() {
            if let Some(bad) = cl.iter().find(|p| p.0 >= len) {
                return Err(SpaceError::UnknownPoint(bad.0));
            }
            if !cl.contains(&PointId(x)) {
                return Err(SpaceError::NotReflexive(x));
            }
            for y in cl {
                if !closures[y.0].is_subset(cl) {
                    return Err(SpaceError::NotTransitive(x, y.0));
                }
            }
        }
        for x in 0..len {
            for y in x + 1..len {
                if closures[x] == closures[y] {
                    return Err(SpaceError::NotT0(x, y));
                }
            }
        }
        let mut opens = vec![PointSet::new(); len];
        for (q, cl) in closures.iter().enumerate() {
            for x in cl {
                opens[x.0].insert(PointId(q));
            }
        }
        let relation = Graph::from_relation(len, |a, b| !opens[a].is_disjoint(&opens[b]));
        Ok(Self {
            labels,
            closures,
            opens,
            relation,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.len()).map(PointId)
    }

    pub fn all_points(&self) -> PointSet {
        self.points().collect()
    }

    pub fn label(&self, x: PointId) -> &str {
        &self.labels[x.0]
    }

    pub fn check(&self, x: PointId) -> Result<(), SpaceError> {
        if x.0 < self.len() {
            Ok(())
        } else {
            Err(SpaceError::UnknownPoint(x.0))
        }
    }

    fn check_set(&self, s: &PointSet) -> Result<(), SpaceError> {
        s.iter().try_for_each(|&x| self.check(x))
    }

    pub fn point_closure(&self, x: PointId) -> &PointSet {
        &self.closures[x.0]
    }

    /// The smallest open set containing `x`.
    pub fn minimal_open(&self, x: PointId) -> &PointSet {
        &self.opens[x.0]
    }

    pub fn closure_of(&self, s: &PointSet) -> Result<PointSet, SpaceError> {
        self.check_set(s)?;
        Ok(s.iter()
            .flat_map(|x| self.closures[x.0].iter().copied())
            .collect())
    }

    /// The smallest open set containing `s`.
    pub fn open_hull(&self, s: &PointSet) -> Result<PointSet, SpaceError> {
        self.check_set(s)?;
        Ok(s.iter()
            .flat_map(|x| self.opens[x.0].iter().copied())
            .collect())
    }

    pub fn is_closed(&self, s: &PointSet) -> Result<bool, SpaceError> {
        Ok(self.closure_of(s)? == *s)
    }

    pub fn is_open(&self, s: &PointSet) -> Result<bool, SpaceError> {
        Ok(self.open_hull(s)? == *s)
    }

    pub fn complement(&self, s: &PointSet) -> PointSet {
        self.points().filter(|x| !s.contains(x)).collect()
    }

    /// `x ~ y`: no pair of disjoint open sets separates them.
    pub fn inseparable(&self, x: PointId, y: PointId) -> Result<bool, SpaceError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.relation.has_edge(x.0, y.0))
    }

    /// The graph of `~` on all points.
    pub fn relation(&self) -> &Graph {
        &self.relation
    }
}

/// A space together with the inseparability graph used for distances.
///
/// `restrict_to_class = true` selects the paper-faithful relation on a
/// [`DualModel`] (germ points isolated); plain spaces ignore the flag.
pub trait ProximitySpace {
    fn space(&self) -> &FiniteT0Space;
    fn proximity(&self, restrict_to_class: bool) -> &Graph;
}

impl ProximitySpace for FiniteT0Space {
    fn space(&self) -> &FiniteT0Space {
        self
    }

    fn proximity(&self, _restrict_to_class: bool) -> &Graph {
        &self.relation
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("dual models need N >= 3, got {0}")]
    UnsupportedN(u32),
    #[error("{0} is not a point of this model")]
    UnknownSignature(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    /// An irreducible representation of `SO(N)` (closed point).
    Class,
    /// The half-line of induced representations over an `SO(N-1)`
    /// signature.
    Germ,
}

/// Truncated finite model of the dual of the motion group.
#[derive(Debug, Clone)]
pub struct DualModel {
    n: u32,
    bound: u32,
    space: FiniteT0Space,
    kinds: Vec<PointKind>,
    signatures: Vec<Signature>,
    class_points: PointSet,
    germ_points: PointSet,
    class_index: HashMap<Signature, PointId>,
    germ_index: HashMap<Signature, PointId>,
    class_graph: Graph,
}

impl DualModel {
    /// Class points are `enumerate(n, bound)`, germ points
    /// `enumerate(n - 1, bound)`; class points come first.
    pub fn build(n: u32, bound: u32) -> Result<Self, ModelError> {
        if n < 3 {
            return Err(ModelError::UnsupportedN(n));
        }
        let classes = enumerate(n, bound);
        let germs = enumerate(n - 1, bound);
        let c = classes.len();
        let mut labels = Vec::with_capacity(c + germs.len());
        let mut closures = Vec::with_capacity(c + germs.len());
        for (i, pi) in classes.iter().enumerate() {
            labels.push(format!("pi({pi})"));
            closures.push(PointSet::from([PointId(i)]));
        }
        for (j, sigma) in germs.iter().enumerate() {
            labels.push(format!("germ({sigma})"));
            let mut cl = PointSet::from([PointId(c + j)]);
            for (i, pi) in classes.iter().enumerate() {
                if signatures::restricts_to(pi, sigma)? {
                    cl.insert(PointId(i));
                }
            }
            closures.push(cl);
        }
        let space = FiniteT0Space::new(labels, closures)?;

        let mut class_graph = Graph::new(space.len());
        for a in 0..c {
            for b in a + 1..c {
                if signatures::inseparable(&classes[a], &classes[b])? {
                    class_graph.add_edge(a, b);
                }
            }
        }

        let kinds = (0..c)
            .map(|_| PointKind::Class)
            .chain(germs.iter().map(|_| PointKind::Germ))
            .collect();
        let class_index = classes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), PointId(i)))
            .collect();
        let germ_index = germs
            .iter()
            .enumerate()
            .map(|(j, s)| (s.clone(), PointId(c + j)))
            .collect();
        let class_points = (0..c).map(PointId).collect();
        let germ_points = (c..c + germs.len()).map(PointId).collect();
        let signatures = classes.into_iter().chain(germs).collect();
        Ok(Self {
            n,
            bound,
            space,
            kinds,
            signatures,
            class_points,
            germ_points,
            class_index,
            germ_index,
            class_graph,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn space(&self) -> &FiniteT0Space {
        &self.space
    }

    pub fn class_points(&self) -> &PointSet {
        &self.class_points
    }

    pub fn germ_points(&self) -> &PointSet {
        &self.germ_points
    }

    pub fn kind(&self, x: PointId) -> PointKind {
        self.kinds[x.0]
    }

    pub fn signature(&self, x: PointId) -> &Signature {
        &self.signatures[x.0]
    }

    pub fn class_point(&self, pi: &Signature) -> Result<PointId, ModelError> {
        self.class_index
            .get(pi)
            .copied()
            .ok_or_else(|| ModelError::UnknownSignature(format!("class {pi}")))
    }

    pub fn germ_point(&self, sigma: &Signature) -> Result<PointId, ModelError> {
        self.germ_index
            .get(sigma)
            .copied()
            .ok_or_else(|| ModelError::UnknownSignature(format!("germ {sigma}")))
    }

    /// Points whose only inseparable partner is themselves.
    pub fn separated_points(&self) -> PointSet {
        let rel = self.space.relation();
        self.space
            .points()
            .filter(|x| rel.neighbors(x.0).is_empty())
            .collect()
    }

    /// Graph distance between `x` and `y`; `None` means infinite.
    ///
    /// With `restrict_to_class` the walk may only use class points, which
    /// is the distance of the genuine dual where half-line points are
    /// separated.
    pub fn distance(
        &self,
        x: PointId,
        y: PointId,
        restrict_to_class: bool,
    ) -> Result<Option<usize>, ModelError> {
        self.space.check(x)?;
        self.space.check(y)?;
        Ok(self.proximity(restrict_to_class).distance(x.0, y.0))
    }

    /// Distance between two class signatures in the class-restricted graph.
    pub fn class_distance(
        &self,
        a: &Signature,
        b: &Signature,
    ) -> Result<Option<usize>, ModelError> {
        let x = self.class_point(a)?;
        let y = self.class_point(b)?;
        self.distance(x, y, true)
    }

    /// `~`-components of the class points and the connecting order.
    pub fn components_and_orc(&self) -> ComponentSummary {
        let g = &self.class_graph;
        let components: Vec<Vec<PointId>> = g
            .components()
            .into_iter()
            .filter(|c| self.kinds[c[0]] == PointKind::Class)
            .map(|c| c.into_iter().map(PointId).collect())
            .collect();
        let orc = components
            .iter()
            .map(|c| {
                let ids: Vec<usize> = c.iter().map(|p| p.0).collect();
                // singleton components count as diameter 1
                g.diameter_of(&ids).max(1)
            })
            .max()
            .unwrap_or(1);
        ComponentSummary { components, orc }
    }

    /// Glimm classes: every germ alone, class points grouped by the
    /// transitive closure of `~` among class points.
    pub fn glimm_partition(&self) -> GlimmPartition {
        let summary = self.components_and_orc();
        let class_points_form_one_class = summary.components.len() <= 1;
        let mut classes = summary.components;
        classes.extend(self.germ_points.iter().map(|&g| vec![g]));
        GlimmPartition {
            classes,
            class_points_form_one_class,
        }
    }

    /// Graphviz rendering: germs as boxes, class points as ellipses, `~`
    /// as undirected edges and closure containment as dashed arcs.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph dual_so{}_b{} {{", self.n, self.bound);
        for x in self.space.points() {
            let shape = match self.kind(x) {
                PointKind::Class => "ellipse",
                PointKind::Germ => "box",
            };
            let _ = writeln!(
                out,
                "  p{} [label=\"{}\", shape={}];",
                x.0,
                self.space.label(x),
                shape
            );
        }
        let rel = self.space.relation();
        for a in 0..rel.len() {
            for &b in rel.neighbors(a) {
                if a < b {
                    let _ = writeln!(out, "  p{a} -- p{b};");
                }
            }
        }
        for g in &self.germ_points {
            for x in self.space.point_closure(*g) {
                if x != g {
                    let _ = writeln!(out, "  p{} -- p{} [style=dashed, dir=forward];", g.0, x.0);
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn export(&self) -> ModelExport {
        let rel = self.space.relation();
        ModelExport {
            n: self.n,
            bound: self.bound,
            points: self
                .space
                .points()
                .map(|x| ExportedPoint {
                    id: x,
                    kind: self.kind(x),
                    signature: self.signature(x).clone(),
                    closure: self.space.point_closure(x).iter().copied().collect(),
                })
                .collect(),
            edges: (0..rel.len())
                .flat_map(|a| {
                    rel.neighbors(a)
                        .iter()
                        .filter(move |&&b| a < b)
                        .map(move |&b| (PointId(a), PointId(b)))
                })
                .collect(),
        }
    }
}

impl ProximitySpace for DualModel {
    fn space(&self) -> &FiniteT0Space {
        &self.space
    }

    fn proximity(&self, restrict_to_class: bool) -> &Graph {
        if restrict_to_class {
            &self.class_graph
        } else {
            self.space.relation()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub components: Vec<Vec<PointId>>,
    pub orc: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlimmPartition {
    pub classes: Vec<Vec<PointId>>,
    pub class_points_form_one_class: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportedPoint {
    pub id: PointId,
    pub kind: PointKind,
    pub signature: Signature,
    pub closure: Vec<PointId>,
}

/// JSON form of a [`DualModel`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelExport {
    pub n: u32,
    pub bound: u32,
    pub points: Vec<ExportedPoint>,
    pub edges: Vec<(PointId, PointId)>,
}
