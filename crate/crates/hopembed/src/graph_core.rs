//! Weighted graphs and exact hop-bounded distances.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::{Error, ExtReal, Result};

/// An undirected weighted edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

/// Undirected graph with positive finite edge weights and no parallel edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "GraphJson", try_from = "GraphJson")]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, f64)>>,
    scale: f64,
}

impl From<WeightedGraph> for GraphJson {
    fn from(g: WeightedGraph) -> Self {
        GraphJson {
            n: g.n,
            edges: g.edges.iter().map(|e| (e.u, e.v, e.w)).collect(),
        }
    }
}

impl TryFrom<GraphJson> for WeightedGraph {
    type Error = Error;
    fn try_from(j: GraphJson) -> Result<Self> {
        WeightedGraph::new(j.n, j.edges)
    }
}

impl WeightedGraph {
    /// Builds a graph, validating vertex ids, weights and simplicity.
    ///
    /// Edges are stored with `u < v`, sorted.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (a, b, w) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::InvalidVertex { vertex: x, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::BadWeight { u: a, v: b, w });
            }
            let (u, v) = (a.min(b), a.max(b));
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
            list.push(Edge { u, v, w });
        }
        list.sort_by_key(|e| (e.u, e.v));
        let mut adj = vec![Vec::new(); n];
        for e in &list {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        for a in &mut adj {
            a.sort_by_key(|&(x, _)| x);
        }
        Ok(WeightedGraph {
            n,
            edges: list,
            adj,
            scale: 1.0,
        })
    }

    /// Parses the JSON graph format and normalizes the weights.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let g: WeightedGraph = serde_json::from_str(s)?;
        Ok(g.normalized())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("graph serialization cannot fail")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let a = self.adj.get(u)?;
        a.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| a[i].1)
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex {
                vertex: v,
                n: self.n,
            })
        }
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::min)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::max)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Factor by which the stored weights were divided at normalization.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Max edge weight divided by min edge weight (1 for edgeless graphs).
    pub fn aspect_ratio(&self) -> f64 {
        match (self.min_weight(), self.max_weight()) {
            (Some(lo), Some(hi)) => hi / lo,
            _ => 1.0,
        }
    }

    /// Max over min finite pairwise shortest-path distance (1 when no pair is connected).
    pub fn distance_aspect_ratio(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for s in 0..self.n {
            for (t, d) in shortest_distances(self, s).into_iter().enumerate() {
                if let (true, Some(x)) = (t != s, d.finite()) {
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
            }
        }
        if lo.is_finite() {
            hi / lo
        } else {
            1.0
        }
    }

    /// Copy with weights divided by the minimum weight, so the minimum is 1.
    pub fn normalized(&self) -> WeightedGraph {
        let Some(m) = self.min_weight() else {
            return self.clone();
        };
        let mut g = self.map_weights(|_, w| w / m);
        g.scale = self.scale * m;
        g
    }

    /// Copy with every weight replaced by `f(edge, weight)`.
    pub fn map_weights(&self, f: impl Fn(&Edge, f64) -> f64) -> WeightedGraph {
        let mut g = WeightedGraph::new(self.n, self.edges.iter().map(|e| (e.u, e.v, f(e, e.w))))
            .expect("mapping keeps the graph simple");
        g.scale = self.scale;
        g
    }

    /// Graph on the same vertices restricted to the given edges (weights from `self`).
    pub fn edge_subgraph(&self, edges: &[(usize, usize)]) -> Result<WeightedGraph> {
        let mut list = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            self.check_vertex(u)?;
            self.check_vertex(v)?;
            let w = self.weight(u, v).ok_or(Error::NotSubgraph(u, v))?;
            list.push((u, v, w));
        }
        WeightedGraph::new(self.n, list)
    }
}

/// The parameter triple shared by the constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopParams {
    pub h: usize,
    pub k: usize,
    pub epsilon: f64,
}

impl HopParams {
    pub fn new(h: usize, k: usize, epsilon: f64) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidParameter("h must be at least 1".into()));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter("epsilon must lie in (0, 1)".into()));
        }
        Ok(HopParams { h, k, epsilon })
    }
}

/// Distances and per-round predecessors of a truncated Bellman–Ford run.
#[derive(Debug, Clone)]
pub struct HopPaths {
    source: usize,
    dist: Vec<ExtReal>,
    /// `improved[r][v]` is the predecessor through which `v` improved in round `r + 1`.
    improved: Vec<Vec<Option<usize>>>,
}

impl HopPaths {
    pub fn distances(&self) -> &[ExtReal] {
        &self.dist
    }

    /// A minimum-weight path from the source to `v` with at most `h` hops.
    pub fn path_to(&self, v: usize) -> Option<Vec<usize>> {
        if !self.dist[v].is_finite() {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        for round in self.improved.iter().rev() {
            if let Some(p) = round[cur] {
                cur = p;
                path.push(cur);
            }
        }
        debug_assert_eq!(cur, self.source);
        path.reverse();
        Some(path)
    }
}

/// Synchronous Bellman–Ford truncated at `h` rounds.
///
/// Within a round, a vertex adopts the smallest-id predecessor among equal
/// candidates; later rounds replace it only on strict improvement.
pub fn hop_paths(g: &WeightedGraph, s: usize, h: usize) -> Result<HopPaths> {
    g.check_vertex(s)?;
    let mut dist = vec![ExtReal::Infinite; g.n()];
    dist[s] = ExtReal::ZERO;
    let mut improved = Vec::new();
    for _ in 0..h {
        let mut next = dist.clone();
        let mut round = vec![None; g.n()];
        let mut changed = false;
        for v in 0..g.n() {
            for &(u, w) in g.neighbors(v) {
                let cand = dist[u] + w;
                if cand < next[v] {
                    next[v] = cand;
                    round[v] = Some(u);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        improved.push(round);
        dist = next;
    }
    Ok(HopPaths {
        source: s,
        dist,
        improved,
    })
}

/// `d^(h)(s, v)` for every `v`.
pub fn hop_distance_all(g: &WeightedGraph, s: usize, h: usize) -> Result<Vec<ExtReal>> {
    Ok(hop_paths(g, s, h)?.dist)
}

pub fn hop_distance(g: &WeightedGraph, u: usize, v: usize, h: usize) -> Result<ExtReal> {
    g.check_vertex(v)?;
    Ok(hop_distance_all(g, u, h)?[v])
}

/// Vertices within `h`-hop distance `r` of `v`, sorted.
pub fn hop_ball(g: &WeightedGraph, v: usize, r: f64, h: usize) -> Result<Vec<usize>> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "radius {r} must be nonnegative"
        )));
    }
    let d = hop_distance_all(g, v, h)?;
    Ok((0..g.n()).filter(|&u| d[u] <= ExtReal::Finite(r)).collect())
}

/// All-pairs `h`-hop distance matrix.
pub fn all_pairs_hop(g: &WeightedGraph, h: usize) -> Vec<Vec<ExtReal>> {
    (0..g.n())
        .map(|s| hop_distance_all(g, s, h).expect("valid source"))
        .collect()
}

pub fn hop_diameter(g: &WeightedGraph, h: usize) -> ExtReal {
    all_pairs_hop(g, h)
        .into_iter()
        .flatten()
        .max()
        .unwrap_or(ExtReal::ZERO)
}

/// Largest finite `h`-hop distance between distinct vertices.
pub fn max_finite_hop_distance(g: &WeightedGraph, h: usize) -> Option<f64> {
    all_pairs_hop(g, h)
        .iter()
        .enumerate()
        .flat_map(|(s, row)| row.iter().enumerate().filter(move |(t, _)| *t != s))
        .filter_map(|(_, d)| d.finite())
        .reduce(f64::max)
}

/// Ordinary (hop-unconstrained) shortest-path distances by Dijkstra.
pub fn shortest_distances(g: &WeightedGraph, s: usize) -> Vec<ExtReal> {
    dijkstra_within(g, s, None)
}

/// Dijkstra inside the subgraph induced by `mask` (the whole graph for `None`).
pub(crate) fn dijkstra_within(g: &WeightedGraph, s: usize, mask: Option<&[bool]>) -> Vec<ExtReal> {
    let inside = |v: usize| mask.is_none_or(|m| m[v]);
    let mut dist = vec![ExtReal::Infinite; g.n()];
    let mut heap = BinaryHeap::new();
    dist[s] = ExtReal::ZERO;
    heap.push(Reverse((ExtReal::ZERO, s)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(u, w) in g.neighbors(v) {
            let c = d + w;
            if inside(u) && c < dist[u] {
                dist[u] = c;
                heap.push(Reverse((c, u)));
            }
        }
    }
    dist
}

/// A graph made `h`-hop connected by heavy shortcut edges.
#[derive(Debug, Clone)]
pub struct Completion {
    pub graph: WeightedGraph,
    /// Weight of the added edges; `Infinite` when nothing had to be added.
    pub omega: ExtReal,
    /// `factor * D'`, reported even when no edge was added.
    pub omega_value: f64,
    pub added: usize,
}

/// Adds an edge of weight `factor * D'` between every pair that is not `h`-hop
/// connected, where `D'` is the largest finite `h`-hop distance (1 if there is none).
pub(crate) fn completion(g: &WeightedGraph, h: usize, factor: f64) -> Completion {
    let d = all_pairs_hop(g, h);
    let dmax = (0..g.n())
        .flat_map(|s| (0..g.n()).filter(move |&t| t != s).map(move |t| (s, t)))
        .filter_map(|(s, t)| d[s][t].finite())
        .reduce(f64::max)
        .unwrap_or(1.0);
    let omega = factor * dmax;
    let mut edges: Vec<(usize, usize, f64)> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    let mut added = 0;
    for s in 0..g.n() {
        for t in s + 1..g.n() {
            if !d[s][t].is_finite() {
                edges.push((s, t, omega));
                added += 1;
            }
        }
    }
    let mut graph = WeightedGraph::new(g.n(), edges).expect("shortcuts join non-adjacent pairs");
    graph.scale = g.scale;
    Completion {
        graph,
        omega: if added > 0 {
            ExtReal::Finite(omega)
        } else {
            ExtReal::Infinite
        },
        omega_value: omega,
        added,
    }
}

/// Adds an edge of weight `omega = 17 k D'` for every pair that is not `h`-hop connected.
///
/// Returns the completed graph and `omega`.
pub fn finite_completion(g: &WeightedGraph, h: usize, k: usize) -> Result<(WeightedGraph, f64)> {
    finite_completion_with_factor(g, h, 17.0 * k as f64)
}

/// As [`finite_completion`] with an arbitrary multiplier in place of `17 k`.
pub fn finite_completion_with_factor(
    g: &WeightedGraph,
    h: usize,
    factor: f64,
) -> Result<(WeightedGraph, f64)> {
    if g.n() >= 2 && max_finite_hop_distance(g, h).is_none() {
        return Err(Error::InvalidParameter(
            "no pair of distinct vertices is h-hop connected".into(),
        ));
    }
    let c = completion(g, h, factor);
    Ok((c.graph, c.omega_value))
}

/// True iff `d_G^(h)(u, v) <= d_H(u, v)` for all vertices `u, v` of the subgraph `H`.
pub fn is_h_respecting(g: &WeightedGraph, sub: &[(usize, usize)], h: usize) -> Result<bool> {
    let hg = g.edge_subgraph(sub)?;
    let verts: BTreeSet<usize> = sub.iter().flat_map(|&(u, v)| [u, v]).collect();
    for &u in &verts {
        let dg = hop_distance_all(g, u, h)?;
        let dh = shortest_distances(&hg, u);
        if verts.iter().any(|&v| !dg[v].le_tol(dh[v])) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path4() -> WeightedGraph {
        WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap()
    }

    fn fin(x: f64) -> ExtReal {
        ExtReal::Finite(x)
    }

    #[test]
    fn path_distances() {
        let g = path4();
        assert_eq!(
            hop_distance_all(&g, 0, 3).unwrap(),
            vec![fin(0.), fin(1.), fin(2.), fin(3.)]
        );
        assert_eq!(
            hop_distance_all(&g, 0, 2).unwrap(),
            vec![fin(0.), fin(1.), fin(2.), ExtReal::Infinite]
        );
    }

    #[test]
    fn single_edge_and_zero_hops() {
        let g = WeightedGraph::new(2, [(0, 1, 5.0)]).unwrap();
        assert_eq!(hop_distance(&g, 0, 1, 1).unwrap(), fin(5.0));
        assert_eq!(hop_distance(&g, 0, 1, 0).unwrap(), ExtReal::Infinite);
    }

    #[test]
    fn triangle_shortcut() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 10.0)]).unwrap();
        assert_eq!(hop_distance(&g, 0, 2, 1).unwrap(), fin(10.0));
        assert_eq!(hop_distance(&g, 0, 2, 2).unwrap(), fin(2.0));
    }

    #[test]
    fn balls_on_path() {
        let g = path4();
        assert_eq!(hop_ball(&g, 2, 0.0, 0).unwrap(), vec![2]);
        assert_eq!(hop_ball(&g, 1, 1.0, 1).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn diameter_of_path() {
        assert_eq!(hop_diameter(&path4(), 3), fin(3.0));
        assert_eq!(hop_diameter(&path4(), 2), ExtReal::Infinite);
    }

    #[test]
    fn completion_of_path() {
        // The largest finite 2-hop distance on P4 is 2, so omega = 17 * 2 * 2.
        let (g2, omega) = finite_completion(&path4(), 2, 2).unwrap();
        assert_eq!(omega, 68.0);
        assert_eq!(g2.weight(0, 3), Some(68.0));
        assert_eq!(g2.edge_count(), 4);
    }

    #[test]
    fn completion_of_two_edges() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 3.0)]).unwrap();
        let (g2, omega) = finite_completion(&g, 1, 1).unwrap();
        assert_eq!(omega, 51.0);
        assert_eq!(g2.edge_count(), 6);
    }

    #[test]
    fn completion_of_complete_graph_is_identity() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 2.5)]).unwrap();
        let (g2, _) = finite_completion(&g, 1, 3).unwrap();
        assert_eq!(g2, g);
    }

    #[test]
    fn respecting_examples() {
        let g =
            WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 10.0)]).unwrap();
        assert!(is_h_respecting(&g, &[(0, 1)], 1).unwrap());
        assert!(!is_h_respecting(&g, &[(0, 1), (1, 2), (2, 3)], 1).unwrap());
        assert!(is_h_respecting(&g, &[(0, 1), (1, 2), (2, 3)], 3).unwrap());
        assert!(matches!(
            is_h_respecting(&g, &[(0, 2)], 1),
            Err(Error::NotSubgraph(0, 2))
        ));
    }

    #[test]
    fn loader_validates_and_normalizes() {
        let g = WeightedGraph::from_json_str(r#"{"n":3,"edges":[[0,1,2.0],[1,2,6.0]]}"#).unwrap();
        assert_eq!(g.min_weight(), Some(1.0));
        assert_eq!(g.weight(1, 2), Some(3.0));
        assert_eq!(g.scale(), 2.0);
        assert!(WeightedGraph::from_json_str(r#"{"n":2,"edges":[[0,0,1.0]]}"#).is_err());
        assert!(WeightedGraph::from_json_str(r#"{"n":2,"edges":[[0,1,1.0],[1,0,2.0]]}"#).is_err());
        assert!(WeightedGraph::from_json_str(r#"{"n":2,"edges":[[0,1,-1.0]]}"#).is_err());
        assert!(WeightedGraph::from_json_str(r#"{"n":2,"edges":[[0,2,1.0]]}"#).is_err());
    }

    #[test]
    fn predecessor_paths_respect_budget() {
        let g =
            WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 10.0)]).unwrap();
        let p = hop_paths(&g, 0, 1).unwrap();
        assert_eq!(p.path_to(3), Some(vec![0, 3]));
        let p = hop_paths(&g, 0, 3).unwrap();
        assert_eq!(p.path_to(3), Some(vec![0, 1, 2, 3]));
    }

    fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
        (2usize..9).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n, 1u32..20), 0..20).prop_map(move |raw| {
                let mut seen = BTreeSet::new();
                let edges: Vec<_> = raw
                    .into_iter()
                    .filter(|&(u, v, _)| u != v && seen.insert((u.min(v), u.max(v))))
                    .map(|(u, v, w)| (u, v, w as f64))
                    .collect();
                WeightedGraph::new(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn monotone_in_hops(g in arb_graph(), h in 0usize..6) {
            for s in 0..g.n() {
                let a = hop_distance_all(&g, s, h).unwrap();
                let b = hop_distance_all(&g, s, h + 1).unwrap();
                for v in 0..g.n() {
                    prop_assert!(b[v] <= a[v]);
                }
            }
        }

        #[test]
        fn full_budget_matches_dijkstra(g in arb_graph()) {
            for s in 0..g.n() {
                let a = hop_distance_all(&g, s, g.n() - 1).unwrap();
                let b = shortest_distances(&g, s);
                for v in 0..g.n() {
                    prop_assert!(a[v].le_tol(b[v]) && b[v].le_tol(a[v]));
                }
            }
        }

        #[test]
        fn relaxed_triangle(g in arb_graph(), h1 in 0usize..4, h2 in 0usize..4) {
            let d1 = all_pairs_hop(&g, h1);
            let d2 = all_pairs_hop(&g, h2);
            let d12 = all_pairs_hop(&g, h1 + h2);
            for u in 0..g.n() {
                for v in 0..g.n() {
                    for w in 0..g.n() {
                        prop_assert!(d12[u][w].le_tol(d1[u][v] + d2[v][w]));
                    }
                }
            }
        }

        #[test]
        fn ball_matches_filter(g in arb_graph(), r in 0.0f64..30.0, h in 0usize..4) {
            for v in 0..g.n() {
                let d = hop_distance_all(&g, v, h).unwrap();
                let ball = hop_ball(&g, v, r, h).unwrap();
                let expect: Vec<usize> = (0..g.n()).filter(|&u| d[u] <= ExtReal::Finite(r)).collect();
                prop_assert!(ball.contains(&v));
                prop_assert_eq!(ball, expect);
            }
        }

        #[test]
        fn completion_preserves_connected_pairs(g in arb_graph(), h in 1usize..4, k in 1usize..4) {
            if max_finite_hop_distance(&g, h).is_some() {
                let (g2, _) = finite_completion(&g, h, k).unwrap();
                let a = all_pairs_hop(&g, h);
                let b = all_pairs_hop(&g2, h);
                for u in 0..g.n() {
                    for v in 0..g.n() {
                        prop_assert!(b[u][v].is_finite());
                        if a[u][v].is_finite() {
                            prop_assert_eq!(a[u][v], b[u][v]);
                        }
                    }
                }
            }
        }

        #[test]
        fn paths_realize_distances(g in arb_graph(), h in 0usize..5) {
            let p = hop_paths(&g, 0, h).unwrap();
            for v in 0..g.n() {
                if let Some(path) = p.path_to(v) {
                    prop_assert!(path.len() - 1 <= h);
                    let w: f64 = path.windows(2).map(|e| g.weight(e[0], e[1]).unwrap()).sum();
                    prop_assert!(ExtReal::Finite(w).le_tol(p.distances()[v]));
                    prop_assert!(p.distances()[v].le_tol(ExtReal::Finite(w)));
                }
            }
        }
    }
}
