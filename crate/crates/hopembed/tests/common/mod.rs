//! Brute-force oracles and graph suites shared by the integration tests.
//!
//! Nothing here calls into the algorithms under test except the graph
//! container and the generators.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use hopembed::generate::{gen_graph, GraphSpec};
use hopembed::{ExtReal, Measure, WeightedGraph};
use rand::Rng;

/// Minimum weight of every walk with at most `h` edges from `s`, by explicit
/// enumeration of the walks.
pub fn walk_minimum(g: &WeightedGraph, s: usize, h: usize) -> Vec<ExtReal> {
    fn go(g: &WeightedGraph, v: usize, acc: f64, left: usize, best: &mut [ExtReal]) {
        best[v] = best[v].min(ExtReal::Finite(acc));
        if left == 0 {
            return;
        }
        for &(u, w) in g.neighbors(v) {
            go(g, u, acc + w, left - 1, best);
        }
    }
    let mut best = vec![ExtReal::Infinite; g.n()];
    go(g, s, 0.0, h, &mut best);
    best
}

/// `h`-th min-plus power of the weighted adjacency matrix (with zero diagonal).
pub fn minplus_power(g: &WeightedGraph, h: usize) -> Vec<Vec<ExtReal>> {
    let n = g.n();
    let mut adj = vec![vec![None; n]; n];
    for e in g.edges() {
        adj[e.u][e.v] = Some(e.w);
        adj[e.v][e.u] = Some(e.w);
    }
    let mut d: Vec<Vec<ExtReal>> = (0..n)
        .map(|s| {
            (0..n)
                .map(|t| {
                    if s == t {
                        ExtReal::ZERO
                    } else {
                        ExtReal::Infinite
                    }
                })
                .collect()
        })
        .collect();
    for _ in 0..h {
        let mut next = d.clone();
        for s in 0..n {
            for mid in 0..n {
                let ExtReal::Finite(a) = d[s][mid] else {
                    continue;
                };
                for t in 0..n {
                    if let Some(w) = adj[mid][t] {
                        next[s][t] = next[s][t].min(ExtReal::Finite(a + w));
                    }
                }
            }
        }
        d = next;
    }
    d
}

/// Dijkstra from `s` restricted to the vertices with `allowed[v]`.
pub fn dijkstra_masked(g: &WeightedGraph, s: usize, allowed: &[bool]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.n()];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Reverse((Key(0.0), s)));
    while let Some(Reverse((Key(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(u, w) in g.neighbors(v) {
            if allowed[u] && d + w < dist[u] {
                dist[u] = d + w;
                heap.push(Reverse((Key(d + w), u)));
            }
        }
    }
    dist
}

pub fn dijkstra(g: &WeightedGraph, s: usize) -> Vec<f64> {
    dijkstra_masked(g, s, &vec![true; g.n()])
}

#[derive(PartialEq)]
struct Key(f64);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl std::cmp::Ord for Key {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Hop counts from `s` in the graph on `n` vertices with the given edges.
pub fn bfs_hops(n: usize, edges: &[(usize, usize)], s: usize) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut hops = vec![None; n];
    hops[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if hops[u].is_none() {
                hops[u] = Some(hops[v].unwrap() + 1);
                queue.push_back(u);
            }
        }
    }
    hops
}

pub struct Dsu(Vec<usize>);

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    pub fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// True iff no pair on the simple path `path` is closer along the path than in
/// `dh`, the `h`-hop distance matrix.
pub fn path_respects(g: &WeightedGraph, dh: &[Vec<ExtReal>], path: &[usize]) -> bool {
    let mut prefix = vec![0.0];
    for w in path.windows(2) {
        let Some(x) = g.weight(w[0], w[1]) else {
            return false;
        };
        prefix.push(prefix.last().unwrap() + x);
    }
    (0..path.len()).all(|i| {
        (i + 1..path.len())
            .all(|j| dh[path[i]][path[j]].le_tol(ExtReal::Finite(prefix[j] - prefix[i])))
    })
}

/// Random simple walk of at most `max_edges` edges.
pub fn random_simple_walk<R: Rng>(g: &WeightedGraph, max_edges: usize, rng: &mut R) -> Vec<usize> {
    let mut path = vec![rng.gen_range(0..g.n())];
    let target = rng.gen_range(1..=max_edges.max(1));
    while path.len() <= target {
        let at = *path.last().unwrap();
        let fresh: Vec<usize> = g
            .neighbors(at)
            .iter()
            .map(|&(u, _)| u)
            .filter(|u| !path.contains(u))
            .collect();
        if fresh.is_empty() {
            break;
        }
        path.push(fresh[rng.gen_range(0..fresh.len())]);
    }
    path
}

/// `n` in `8..=64`, a random spanning tree plus sparse extra edges, weights in `1..=n`.
pub fn suite_graph(i: u64) -> WeightedGraph {
    let n = 8 + (i as usize * 13) % 57;
    let spec = GraphSpec::RandomWeighted {
        n,
        p: (3.0 / n as f64).min(1.0),
        max_weight: n as u64,
    };
    gen_graph(&spec, 1000 + i).unwrap()
}

/// Uniform measure for even `i`, integer weights in `1..=5` for odd `i`.
pub fn suite_measure(i: u64, n: usize) -> Measure {
    if i.is_multiple_of(2) {
        Measure::uniform(n)
    } else {
        Measure::new(
            (0..n)
                .map(|v| 1.0 + ((v * 7 + i as usize) % 5) as f64)
                .collect(),
        )
        .unwrap()
    }
}

/// Unit-weight `G(n, p)` for even `i` and a weighted graph for odd `i`.
pub fn mixed_graph(i: u64, n: usize) -> WeightedGraph {
    let spec = if i.is_multiple_of(2) {
        GraphSpec::Gnp { n, p: 0.3 }
    } else {
        GraphSpec::RandomWeighted {
            n,
            p: 0.15,
            max_weight: 20,
        }
    };
    gen_graph(&spec, 5000 + i).unwrap()
}

pub fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (0..n).map(move |v| (u, v)))
}
