//! Thorup–Zwick distance oracle, labels and tree-cover routing on an ordinary
//! (hop-unconstrained) weighted graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use serde::Serialize;

use crate::{ExtReal, WeightedGraph};

/// Pivot and bunch of one vertex; enough to answer queries against another label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TzLabel {
    /// `pivots[i]`: nearest vertex of level `i` and its distance.
    pub pivots: Vec<Option<(u32, f64)>>,
    /// Bunch members with their distances, sorted by id.
    pub bunch: Vec<(u32, f64)>,
}

impl TzLabel {
    pub fn words(&self) -> usize {
        2 * self.pivots.len() + 2 * self.bunch.len()
    }

    fn bunch_distance(&self, w: u32) -> Option<f64> {
        self.bunch
            .binary_search_by_key(&w, |e| e.0)
            .ok()
            .map(|i| self.bunch[i].1)
    }
}

/// Estimate within a factor `2k - 1` of the distance, never below it.
pub fn tz_query(a: &TzLabel, b: &TzLabel) -> ExtReal {
    let (mut u, mut v) = (a, b);
    let levels = u.pivots.len();
    let Some(mut w) = u.pivots[0] else {
        return ExtReal::Infinite;
    };
    let mut i = 0;
    loop {
        if let Some(dv) = v.bunch_distance(w.0) {
            return ExtReal::Finite(w.1 + dv);
        }
        i += 1;
        if i >= levels {
            return ExtReal::Infinite;
        }
        std::mem::swap(&mut u, &mut v);
        match u.pivots[i] {
            Some(p) => w = p,
            None => return ExtReal::Infinite,
        }
    }
}

/// Position of a node in one cluster tree, with the intervals of its children.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeEntry {
    pub root: u32,
    pub dist: f64,
    pub enter: u32,
    pub exit: u32,
    pub parent: Option<u32>,
    /// `(enter, child)` sorted by `enter`.
    pub children: Vec<(u32, u32)>,
}

impl TreeEntry {
    /// Next node towards the node entered at `target`; `None` on arrival.
    pub fn next_hop(&self, target: u32) -> Option<u32> {
        if target == self.enter {
            return None;
        }
        if self.enter < target && target <= self.exit {
            let i = self.children.partition_point(|c| c.0 <= target) - 1;
            Some(self.children[i].1)
        } else {
            Some(self.parent.expect("target outside the subtree of the root"))
        }
    }
}

/// Routing table of one node: an entry for every cluster tree containing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TzTable {
    /// Sorted by root.
    pub trees: Vec<TreeEntry>,
}

impl TzTable {
    pub fn tree(&self, root: u32) -> Option<&TreeEntry> {
        self.trees
            .binary_search_by_key(&root, |e| e.root)
            .ok()
            .map(|i| &self.trees[i])
    }

    pub fn words(&self) -> usize {
        self.trees.iter().map(|e| 5 + 2 * e.children.len()).sum()
    }
}

/// `(root, distance from root, enter time)` of a node in a cluster tree.
pub type TreeAddress = (u32, f64, u32);

/// Destination label for routing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TzRouteLabel {
    pub vertex: u32,
    /// Address in the tree of each lower-level pivot.
    pub pivots: Vec<Option<TreeAddress>>,
    /// Address in every top-level tree reaching the vertex.
    pub top: Vec<TreeAddress>,
}

impl TzRouteLabel {
    pub fn words(&self) -> usize {
        1 + 3 * self.pivots.len() + 3 * self.top.len()
    }
}

/// Source decision: tree to route in and the destination's enter time there,
/// read from the source's own table and the destination label.
pub fn tz_choose_tree(table: &TzTable, dest: &TzRouteLabel) -> Option<(u32, u32)> {
    for &(w, _, enter) in dest.pivots.iter().flatten() {
        if table.tree(w).is_some() {
            return Some((w, enter));
        }
    }
    dest.top
        .iter()
        .filter_map(|&(w, d, enter)| table.tree(w).map(|e| (e.dist + d, w, enter)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, w, enter)| (w, enter))
}

/// Thorup–Zwick structure with `k` levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThorupZwick {
    pub k: usize,
    /// Level of each vertex: the largest `i` with the vertex in `A_i`.
    pub level: Vec<usize>,
    pub labels: Vec<TzLabel>,
    pub tables: Vec<TzTable>,
    pub route_labels: Vec<TzRouteLabel>,
}

impl ThorupZwick {
    pub fn query(&self, u: usize, v: usize) -> ExtReal {
        tz_query(&self.labels[u], &self.labels[v])
    }

    /// Stretch of the distance query.
    pub fn query_stretch(k: usize) -> f64 {
        (2 * k - 1) as f64
    }

    /// Stretch of routing through the chosen cluster tree.
    pub fn route_stretch(k: usize) -> f64 {
        (4 * k).saturating_sub(5).max(1) as f64
    }

    pub fn oracle_words(&self) -> usize {
        self.labels.iter().map(TzLabel::words).sum()
    }
}

/// Builds the structure on `g`, drawing the level sets from `rng`.
///
/// Level `i + 1` keeps each vertex of level `i` with probability `n^(-1/k)`;
/// draws repeat until the top level is nonempty. Distances come from one
/// Dijkstra run per vertex so that every membership test compares values from
/// the same run.
pub fn thorup_zwick<R: Rng>(g: &WeightedGraph, k: usize, rng: &mut R) -> ThorupZwick {
    let n = g.n();
    assert!(k >= 1 && n >= 1);
    let p = (n as f64).powf(-1.0 / k as f64);
    let level = loop {
        let mut level = vec![0usize; n];
        for l in level.iter_mut() {
            while *l + 1 < k && rng.gen::<f64>() < p {
                *l += 1;
            }
        }
        if level.iter().any(|&l| l == k - 1) {
            break level;
        }
    };
    let runs: Vec<(Vec<ExtReal>, Vec<Option<usize>>)> =
        (0..n).map(|s| dijkstra_tree(g, s)).collect();

    // nearest[i][v]: nearest level-i vertex (ties: smaller id), with the
    // convention that a tie with level i + 1 defers to the higher pivot.
    let mut nearest: Vec<Vec<Option<(usize, f64)>>> = vec![vec![None; n]; k + 1];
    for i in (0..k).rev() {
        for v in 0..n {
            let best = (0..n)
                .filter(|&w| level[w] >= i)
                .filter_map(|w| runs[w].0[v].finite().map(|d| (w, d)))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            nearest[i][v] = match (best, nearest[i + 1][v]) {
                (Some(b), Some(up)) if b.1 == up.1 => Some(up),
                (b, _) => b,
            };
        }
    }
    let bound = |i: usize, v: usize| nearest[i + 1][v].map_or(f64::INFINITY, |x| x.1);

    let mut bunch: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for w in 0..n {
        let i = level[w];
        for v in 0..n {
            if let Some(d) = runs[w].0[v].finite() {
                if d < bound(i, v) {
                    bunch[v].push((w as u32, d));
                    members[w].push(v);
                }
            }
        }
    }

    let mut tables = vec![TzTable { trees: Vec::new() }; n];
    let mut enter_of: Vec<Vec<u32>> = vec![Vec::new(); n];
    for w in 0..n {
        let (dist, parent) = &runs[w];
        let entries = cluster_tree(w, &members[w], parent);
        let mut enter = vec![u32::MAX; n];
        for (v, entry) in entries {
            enter[v] = entry.enter;
            tables[v].trees.push(TreeEntry {
                dist: dist[v].to_f64(),
                ..entry
            });
        }
        enter_of[w] = enter;
    }

    let labels: Vec<TzLabel> = (0..n)
        .map(|v| TzLabel {
            pivots: (0..k)
                .map(|i| nearest[i][v].map(|(w, d)| (w as u32, d)))
                .collect(),
            bunch: bunch[v].clone(),
        })
        .collect();
    let route_labels = (0..n)
        .map(|v| TzRouteLabel {
            vertex: v as u32,
            pivots: (0..k - 1)
                .map(|i| nearest[i][v].map(|(w, d)| (w as u32, d, enter_of[w][v])))
                .collect(),
            top: bunch[v]
                .iter()
                .filter(|&&(w, _)| level[w as usize] == k - 1)
                .map(|&(w, d)| (w, d, enter_of[w as usize][v]))
                .collect(),
        })
        .collect();
    ThorupZwick {
        k,
        level,
        labels,
        tables,
        route_labels,
    }
}

/// DFS-interval entries of the tree over `members` given by `parent` pointers.
fn cluster_tree(
    root: usize,
    members: &[usize],
    parent: &[Option<usize>],
) -> Vec<(usize, TreeEntry)> {
    let n = parent.len();
    let mut inside = vec![false; n];
    members.iter().for_each(|&v| inside[v] = true);
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in members {
        if v != root {
            let p = parent[v].expect("cluster members are reachable");
            debug_assert!(inside[p], "clusters are closed under tree parents");
            kids[p].push(v);
        }
    }
    let mut enter = vec![0u32; n];
    let mut exit = vec![0u32; n];
    let mut clock = 0u32;
    let mut stack = vec![(root, false)];
    while let Some((v, done)) = stack.pop() {
        if done {
            exit[v] = clock - 1;
            continue;
        }
        enter[v] = clock;
        clock += 1;
        stack.push((v, true));
        for &c in kids[v].iter().rev() {
            stack.push((c, false));
        }
    }
    members
        .iter()
        .map(|&v| {
            let entry = TreeEntry {
                root: root as u32,
                dist: 0.0,
                enter: enter[v],
                exit: exit[v],
                parent: (v != root).then(|| parent[v].expect("member") as u32),
                children: kids[v].iter().map(|&c| (enter[c], c as u32)).collect(),
            };
            (v, entry)
        })
        .collect()
}

fn dijkstra_tree(g: &WeightedGraph, s: usize) -> (Vec<ExtReal>, Vec<Option<usize>>) {
    let mut dist = vec![ExtReal::Infinite; g.n()];
    let mut parent = vec![None; g.n()];
    let mut heap = BinaryHeap::new();
    dist[s] = ExtReal::ZERO;
    heap.push(Reverse((ExtReal::ZERO, s)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(u, w) in g.neighbors(v) {
            let c = d + w;
            if c < dist[u] {
                dist[u] = c;
                parent[u] = Some(v);
                heap.push(Reverse((c, u)));
            }
        }
    }
    (dist, parent)
}
