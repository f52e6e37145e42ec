//! Undirected simple graphs and brute-force certifiers for degree bounds,
//! (strong) k-separability and generalized feedback vertex sets.
//!
//! The certifiers enumerate conditioning sets exhaustively in lexicographic
//! order (by size, then lexicographically within a size) and stop at the first
//! witness. They are the ground truth the identification routines are checked
//! against, so they deliberately share no code with them.

use std::collections::VecDeque;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::IndexSet;

/// Undirected graph without self loops or parallel edges on nodes `0..p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    p: usize,
    adj: Vec<bool>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph").field("p", &self.p).field("edges", &self.edges()).finish()
    }
}

impl Graph {
    pub fn empty(p: usize) -> Self {
        Graph { p, adj: vec![false; p * p] }
    }

    pub fn from_edges<I>(p: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(p);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(p: usize) -> Self {
        let mut g = Graph::empty(p);
        for u in 0..p {
            for v in u + 1..p {
                g.set(u, v, true);
            }
        }
        g
    }

    /// Path `0 - 1 - ... - (p-1)`.
    pub fn path(p: usize) -> Self {
        Graph::from_edges(p, (1..p).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn cycle(p: usize) -> Self {
        let mut g = Graph::path(p);
        if p >= 3 {
            g.set(0, p - 1, true);
        }
        g
    }

    /// Star centred at node 0.
    pub fn star(p: usize) -> Self {
        Graph::from_edges(p, (1..p).map(|i| (0, i))).expect("valid star")
    }

    #[inline]
    fn set(&mut self, u: usize, v: usize, on: bool) {
        self.adj[u * self.p + v] = on;
        self.adj[v * self.p + u] = on;
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for node in [u, v] {
            if node >= self.p {
                return Err(Error::InvalidIndex { index: node, dim: self.p });
            }
        }
        if u == v {
            return Err(Error::InvalidPair(u));
        }
        self.set(u, v, true);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if u < self.p && v < self.p {
            self.set(u, v, false);
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u * self.p + v]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.p).filter(move |&w| self.adj[u * self.p + w])
    }

    pub fn neighbor_set(&self, u: usize) -> IndexSet {
        IndexSet::from_sorted_unchecked(self.neighbors(u).collect())
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors(u).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.p).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.p)
            .flat_map(|u| (u + 1..self.p).map(move |v| (u, v)))
            .filter(|&(u, v)| self.has_edge(u, v))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count() / 2
    }

    /// Induced subgraph on `nodes`, relabelled to `0..nodes.len()` in order.
    pub fn induced(&self, nodes: &IndexSet) -> Graph {
        let ix = nodes.as_slice();
        let mut g = Graph::empty(ix.len());
        for (a, &u) in ix.iter().enumerate() {
            for (b, &v) in ix.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.set(a, b, true);
                }
            }
        }
        g
    }

    /// Edges of the induced subgraph on `nodes`, in the original labels.
    pub fn edges_within(&self, nodes: &IndexSet) -> Vec<(usize, usize)> {
        self.edges()
            .into_iter()
            .filter(|&(u, v)| nodes.contains(u) && nodes.contains(v))
            .collect()
    }

    /// Nodes reachable from `start` through `allowed` nodes, skipping the
    /// direct edge `skip` when given.
    fn reach(&self, start: usize, allowed: &[bool], skip: Option<(usize, usize)>) -> Vec<bool> {
        let mut seen = vec![false; self.p];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            for y in self.neighbors(x) {
                if seen[y] || !allowed[y] {
                    continue;
                }
                if let Some((a, b)) = skip {
                    if (x == a && y == b) || (x == b && y == a) {
                        continue;
                    }
                }
                seen[y] = true;
                queue.push_back(y);
            }
        }
        seen
    }
}

/// Connected components of the induced subgraph on `active`, each sorted and
/// listed by smallest member.
pub fn connected_components(g: &Graph, active: &IndexSet) -> Vec<IndexSet> {
    let mut allowed = vec![false; g.node_count()];
    for i in active.iter() {
        allowed[i] = true;
    }
    let mut assigned = vec![false; g.node_count()];
    let mut out = Vec::new();
    for start in active.iter() {
        if assigned[start] {
            continue;
        }
        let seen = g.reach(start, &allowed, None);
        let comp: Vec<usize> = (0..g.node_count()).filter(|&i| seen[i]).collect();
        for &i in &comp {
            assigned[i] = true;
        }
        out.push(IndexSet::from_sorted_unchecked(comp));
    }
    out
}

fn allowed_without(g: &Graph, s: &IndexSet) -> Vec<bool> {
    (0..g.node_count()).map(|i| !s.contains(i)).collect()
}

/// Whether `s` separates `u` and `v` in `g` (adjacent nodes are never separated).
pub fn is_separator(g: &Graph, s: &IndexSet, u: usize, v: usize) -> Result<bool> {
    check_pair(g, u, v, s)?;
    Ok(!g.reach(u, &allowed_without(g, s), None)[v])
}

/// Whether `s` separates `u` and `v` once the direct edge `(u, v)` is removed.
pub fn separates_without_edge(g: &Graph, s: &IndexSet, u: usize, v: usize) -> Result<bool> {
    check_pair(g, u, v, s)?;
    Ok(!g.reach(u, &allowed_without(g, s), Some((u, v)))[v])
}

fn check_pair(g: &Graph, u: usize, v: usize, s: &IndexSet) -> Result<()> {
    let p = g.node_count();
    for node in [u, v] {
        if node >= p {
            return Err(Error::InvalidIndex { index: node, dim: p });
        }
    }
    s.check_bounds(p)?;
    if u == v {
        return Err(Error::InvalidPair(u));
    }
    for node in [u, v] {
        if s.contains(node) {
            return Err(Error::InvalidConditioningSet { node });
        }
    }
    Ok(())
}

pub fn is_degree_bounded(g: &Graph, k: usize) -> bool {
    g.max_degree() <= k
}

/// Subsets of `V \ {u, v}` of size at most `max_size`, smallest first and
/// lexicographic within a size.
fn candidate_sets(p: usize, u: usize, v: usize, max_size: usize) -> impl Iterator<Item = IndexSet> {
    let pool: Vec<usize> = (0..p).filter(|&i| i != u && i != v).collect();
    let top = max_size.min(pool.len());
    (0..=top).flat_map(move |size| {
        pool.clone()
            .into_iter()
            .combinations(size)
            .map(IndexSet::from_sorted_unchecked)
    })
}

/// First set of size at most `k - δ_uv` separating `u` and `v` in `G_{-(u,v)}`.
pub fn strong_separator(g: &Graph, u: usize, v: usize, k: usize) -> Option<IndexSet> {
    let delta = usize::from(g.has_edge(u, v));
    let budget = k.checked_sub(delta)?;
    candidate_sets(g.node_count(), u, v, budget)
        .find(|s| !g.reach(u, &allowed_without(g, s), Some((u, v)))[v])
}

/// First set of size at most `k` separating the non-adjacent `u` and `v`.
pub fn separator(g: &Graph, u: usize, v: usize, k: usize) -> Option<IndexSet> {
    if g.has_edge(u, v) {
        return None;
    }
    candidate_sets(g.node_count(), u, v, k).find(|s| !g.reach(u, &allowed_without(g, s), None)[v])
}

pub fn is_strongly_k_separable_pair(g: &Graph, u: usize, v: usize, k: usize) -> bool {
    strong_separator(g, u, v, k).is_some()
}

pub fn is_strongly_k_separable(g: &Graph, k: usize) -> bool {
    let p = g.node_count();
    (0..p).all(|u| (u + 1..p).all(|v| is_strongly_k_separable_pair(g, u, v, k)))
}

/// Pairs `(u, v)`, `u > v`, that are not strongly k-separable.
pub fn strongly_inseparable_pairs(g: &Graph, k: usize) -> Vec<(usize, usize)> {
    let p = g.node_count();
    (0..p)
        .flat_map(|u| (0..u).map(move |v| (u, v)))
        .filter(|&(u, v)| !is_strongly_k_separable_pair(g, u, v, k))
        .collect()
}

pub fn is_k_separable(g: &Graph, k: usize) -> bool {
    let p = g.node_count();
    (0..p).all(|u| {
        (u + 1..p).all(|v| g.has_edge(u, v) || separator(g, u, v, k).is_some())
    })
}

/// Whether removing `f` leaves a strongly k-separable induced subgraph.
pub fn is_generalized_fvs(g: &Graph, f: &IndexSet, k: usize) -> bool {
    is_strongly_k_separable(&g.induced(&f.complement(g.node_count())), k)
}

/// Acyclicity via union-find over the edge list.
pub fn is_forest(g: &Graph) -> bool {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..g.node_count()).collect();
    for (u, v) in g.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

pub fn is_connected(g: &Graph) -> bool {
    connected_components(g, &IndexSet::full(g.node_count())).len() <= 1
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Edge (0,1) plus (u,0), (u,1) for every u >= 2.
    fn example1(p: usize) -> Graph {
        let mut edges = vec![(0, 1)];
        for u in 2..p {
            edges.push((0, u));
            edges.push((1, u));
        }
        Graph::from_edges(p, edges).unwrap()
    }

    /// Path on 0..p-2 plus hubs p-2, p-1 adjacent to every path node.
    fn example2(p: usize) -> Graph {
        let base = p - 2;
        let hubs = [p - 2, p - 1].into_iter().flat_map(|h| (0..base).map(move |u| (h, u)));
        Graph::from_edges(p, Graph::path(base).edges().into_iter().chain(hubs)).unwrap()
    }

    #[test]
    fn rejects_self_loops_and_out_of_range() {
        assert_eq!(Graph::from_edges(3, [(1, 1)]), Err(Error::InvalidPair(1)));
        assert_eq!(
            Graph::from_edges(3, [(0, 3)]),
            Err(Error::InvalidIndex { index: 3, dim: 3 })
        );
        let g = Graph::from_edges(3, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn components_of_path() {
        let g = Graph::path(3);
        assert_eq!(connected_components(&g, &IndexSet::full(3)), vec![IndexSet::from([0, 1, 2])]);
        assert_eq!(
            connected_components(&g, &[0, 2].into()),
            vec![IndexSet::from([0]), IndexSet::from([2])]
        );
        assert!(connected_components(&g, &IndexSet::empty()).is_empty());
    }

    #[test]
    fn components_example1_outer_nodes_are_singletons() {
        let g = example1(6);
        let comps = connected_components(&g, &[2, 3, 4, 5].into());
        assert_eq!(comps.len(), 4);
        assert!(comps.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn separator_cases() {
        assert!(is_separator(&Graph::path(3), &[1].into(), 0, 2).unwrap());
        assert!(!is_separator(&Graph::complete(3), &[2].into(), 0, 1).unwrap());
        assert!(is_separator(&example1(6), &[0, 1].into(), 2, 3).unwrap());
        assert_eq!(
            is_separator(&Graph::path(3), &[1].into(), 1, 2),
            Err(Error::InvalidConditioningSet { node: 1 })
        );
    }

    #[test]
    fn degree_bounds() {
        assert!(is_degree_bounded(&Graph::path(5), 2));
        assert!(!is_degree_bounded(&Graph::star(5), 3));
        let g = example1(6);
        assert_eq!(g.degree(0), 5);
        assert_eq!(g.degree(1), 5);
        assert!(!is_degree_bounded(&g, 4));
    }

    #[test]
    fn strong_pair_cases() {
        let tree = Graph::from_edges(5, [(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        for (u, v) in tree.edges() {
            assert_eq!(strong_separator(&tree, u, v, 1), Some(IndexSet::empty()));
        }
        assert!(!is_strongly_k_separable_pair(&example1(6), 0, 1, 3));
        let k4 = Graph::complete(4);
        assert_eq!(strong_separator(&k4, 0, 1, 3), Some(IndexSet::from([2, 3])));
        assert!(!is_strongly_k_separable_pair(&k4, 0, 1, 2));
    }

    #[test]
    fn strong_graph_cases() {
        assert!(is_strongly_k_separable(&Graph::cycle(6), 2));
        assert!(!is_strongly_k_separable(&Graph::cycle(6), 1));
        assert!(!is_strongly_k_separable(&example1(6), 3));
        assert_eq!(strongly_inseparable_pairs(&example1(6), 3), vec![(1, 0)]);
    }

    #[test]
    fn k_separable_cases() {
        assert!(is_k_separable(&Graph::complete(5), 1));
        assert!(is_k_separable(&example1(6), 3));
        assert!(is_k_separable(&Graph::path(4), 1));
        assert!(!is_k_separable(&Graph::cycle(5), 1));
    }

    #[test]
    fn generalized_fvs_cases() {
        let g = example2(7);
        assert_eq!(g.edge_count(), 14);
        assert!(is_generalized_fvs(&g, &[5, 6].into(), 1));
        assert!(!is_generalized_fvs(&g, &[5].into(), 1));
        assert!(!is_generalized_fvs(&g, &IndexSet::empty(), 1));
        let c = Graph::cycle(6);
        for f in 0..6 {
            assert!(is_generalized_fvs(&c, &[f].into(), 2));
        }
    }

    #[test]
    fn forest_detection() {
        assert!(is_forest(&Graph::path(6)));
        assert!(!is_forest(&Graph::cycle(4)));
        assert!(is_forest(&Graph::empty(3)));
    }

    #[test]
    fn induced_relabels() {
        let g = example2(7);
        let h = g.induced(&IndexSet::full(5));
        assert_eq!(h, Graph::path(5));
        assert_eq!(g.edges_within(&IndexSet::full(5)).len(), 4);
    }
}
