//! Brute-force oracles written straight from the branching inequalities.
//! Nothing here calls the library's branching code.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use motiondual::signatures::Signature;

pub fn rank(n: u32) -> usize {
    (n / 2) as usize
}

/// Dominance plus the sign rule on the last entry.
pub fn valid(e: &[i64], n: u32) -> bool {
    if e.len() != rank(n) {
        return false;
    }
    if n == 2 {
        return true;
    }
    if e.windows(2).any(|w| w[0] < w[1]) {
        return false;
    }
    let last = *e.last().unwrap();
    if n.is_multiple_of(2) {
        e.len() < 2 || e[e.len() - 2] >= last.abs()
    } else {
        last >= 0
    }
}

/// Every valid signature of `SO(n)` with entries in `[-b, b]`.
pub fn all_sigs(n: u32, b: i64) -> Vec<Vec<i64>> {
    let k = rank(n);
    let mut out = Vec::new();
    let mut cur = vec![-b; k];
    loop {
        if valid(&cur, n) {
            out.push(cur.clone());
        }
        let mut i = 0;
        while i < k && cur[i] == b {
            cur[i] = -b;
            i += 1;
        }
        if i == k {
            break;
        }
        cur[i] += 1;
    }
    out
}

/// `SO(n) -> SO(n-1)` restriction read off the interleaving pattern.
pub fn restricts(m: &[i64], q: &[i64], n: u32) -> bool {
    let k = rank(n);
    if n.is_multiple_of(2) {
        (0..k - 1).all(|i| m[i] >= q[i] && q[i] >= m[i + 1].abs())
    } else {
        (0..k).all(|i| {
            let lower = if i + 1 < k { m[i + 1] } else { -m[i] };
            m[i] >= q[i] && q[i] >= lower
        })
    }
}

pub fn sig(e: &[i64], n: u32) -> Signature {
    Signature::new(e.to_vec(), n).unwrap()
}

pub fn sigs(n: u32, b: i64) -> Vec<Signature> {
    all_sigs(n, b).iter().map(|e| sig(e, n)).collect()
}

/// Two `SO(n)` signatures share a constituent, searching children with
/// entries in `[-b, b]` (enough when the parents are bounded by `b`).
pub fn oracle_inseparable(a: &[i64], c: &[i64], n: u32, b: i64) -> bool {
    all_sigs(n - 1, b)
        .iter()
        .any(|q| restricts(a, q, n) && restricts(c, q, n))
}

/// Some `SO(n)` signature with entries in `[-b, b]` restricts to all of
/// the `SO(n-1)` signatures given.
pub fn oracle_common_extension(children: &[Vec<i64>], n: u32, b: i64) -> Option<Vec<i64>> {
    all_sigs(n, b)
        .into_iter()
        .find(|m| children.iter().all(|q| restricts(m, q, n)))
}

/// Class-restricted distance graph built from the oracle relation.
pub struct OracleGraph {
    pub nodes: Vec<Vec<i64>>,
    pub adj: Vec<Vec<usize>>,
}

impl OracleGraph {
    /// Class points with `m_1 <= b`.
    pub fn build(n: u32, b: i64) -> Self {
        let nodes = all_sigs(n, b);
        let children = all_sigs(n - 1, b);
        let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
        for (i, m) in nodes.iter().enumerate() {
            for (j, q) in children.iter().enumerate() {
                if restricts(m, q, n) {
                    below[i].insert(j);
                }
            }
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if !below[i].is_disjoint(&below[j]) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        OracleGraph { nodes, adj }
    }

    pub fn index(&self, e: &[i64]) -> usize {
        self.nodes.iter().position(|x| x == e).unwrap()
    }

    pub fn bfs(&self, from: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.nodes.len()];
        dist[from] = Some(0);
        let mut q = VecDeque::from([from]);
        while let Some(v) = q.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Number of components and the largest diameter among them.
    pub fn components_and_diameter(&self) -> (usize, usize) {
        let mut seen = vec![false; self.nodes.len()];
        let mut comps = 0;
        let mut diam = 0;
        for s in 0..self.nodes.len() {
            if seen[s] {
                continue;
            }
            comps += 1;
            let members: Vec<usize> = self
                .bfs(s)
                .iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|_| i))
                .collect();
            for &v in &members {
                seen[v] = true;
                let far = self.bfs(v).into_iter().flatten().max().unwrap_or(0);
                diam = diam.max(far);
            }
        }
        (comps, diam)
    }
}

/// Diameter of the germ-ideal `*` graph built from the oracle. Line
/// kernels are isolated, so they never raise the maximum.
pub fn oracle_big_d(n: u32, b: i64) -> usize {
    let germs = all_sigs(n - 1, b);
    let mut adj = vec![Vec::new(); germs.len()];
    for i in 0..germs.len() {
        for j in i + 1..germs.len() {
            if oracle_common_extension(&[germs[i].clone(), germs[j].clone()], n, b + 1).is_some() {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut best = 0;
    for s in 0..germs.len() {
        let mut dist = vec![None; germs.len()];
        dist[s] = Some(0usize);
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dist[v].unwrap() + 1);
                    q.push_back(w);
                }
            }
        }
        best = best.max(dist.into_iter().flatten().max().unwrap_or(0));
    }
    best
}
