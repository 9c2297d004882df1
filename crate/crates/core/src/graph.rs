//! Small undirected graphs with breadth-first search.
//!
//! Vertices are `0..len`. Self-loops are never stored; every relation in
//! this crate is reflexive and the distance of a vertex to itself is 0.

use std::collections::VecDeque;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(len: usize) -> Self {
        Self {
            adj: vec![Vec::new(); len],
        }
    }

    /// Builds the graph of a symmetric relation given as a predicate.
    pub fn from_relation(len: usize, mut related: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Graph::new(len);
        for a in 0..len {
            for b in a + 1..len {
                if related(a, b) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a == b || self.adj[a].contains(&b) {
            return;
        }
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a == b || self.adj[a].contains(&b)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Distances from a set of sources; `None` is unreachable.
    pub fn bfs_from(&self, sources: impl IntoIterator<Item = usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        self.bfs_from([a])[b]
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        for v in 0..self.len() {
            if comp[v] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = Vec::new();
            for (w, d) in self.bfs_from([v]).into_iter().enumerate() {
                if d.is_some() {
                    comp[w] = id;
                    members.push(w);
                }
            }
            out.push(members);
        }
        out
    }

    /// Largest distance inside `component` (0 for a singleton).
    pub fn diameter_of(&self, component: &[usize]) -> usize {
        component
            .iter()
            .map(|&v| {
                let dist = self.bfs_from([v]);
                component.iter().filter_map(|&w| dist[w]).max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// The subgraph induced on `keep`, with vertex ids preserved; edges
    /// touching other vertices are dropped.
    pub fn induced(&self, keep: impl Fn(usize) -> bool) -> Graph {
        let mut g = Graph::new(self.len());
        for a in 0..self.len() {
            if !keep(a) {
                continue;
            }
            for &b in &self.adj[a] {
                if a < b && keep(b) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph() {
        let g = Graph::from_relation(5, |a, b| b == a + 1 && b < 4);
        assert_eq!(g.distance(0, 3), Some(3));
        assert_eq!(g.distance(0, 4), None);
        let comps = g.components();
        assert_eq!(comps, vec![vec![0, 1, 2, 3], vec![4]]);
        assert_eq!(g.diameter_of(&comps[0]), 3);
        assert_eq!(g.diameter_of(&comps[1]), 0);
        assert_eq!(g.edge_count(), 3);
        let h = g.induced(|v| v != 2);
        assert_eq!(h.distance(0, 3), None);
    }
}
