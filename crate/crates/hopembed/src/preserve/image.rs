use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use super::{build_path_tree_embedding, PathTreeEmbedding};
use crate::clan::optimal_path_copies;
use crate::cover::{sparse_cover, SparseCover};
use crate::graph_core::is_h_respecting;
use crate::{Error, ExtReal, Result, Variant, WeightedGraph};

/// Image of a connected `h`-respecting subgraph.
#[derive(Debug, Clone, Serialize)]
pub struct RespectingImage {
    /// Closed walk traversing every subgraph edge twice.
    pub tour: Vec<usize>,
    /// Tree node picked for each tour position.
    pub copies: Vec<usize>,
    /// Tree edges `(child, parent)` of the Steiner subtree spanning the copies.
    pub edges: Vec<(usize, usize)>,
    pub weight: ExtReal,
    /// Ultrametric cost of the copy sequence.
    pub tour_cost: ExtReal,
    /// Twice the subgraph weight.
    pub tour_weight: f64,
    /// Factor the image weight is guaranteed within, relative to `tour_weight`.
    pub bound_factor: f64,
}

/// Closed walk through every edge of `edges` exactly twice, starting at the
/// smallest vertex. Requires the edge set to be connected.
pub fn euler_tour(edges: &[(usize, usize)]) -> Vec<usize> {
    let verts: BTreeSet<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    let Some(&start) = verts.iter().next() else {
        return Vec::new();
    };
    let top = verts.iter().next_back().copied().unwrap_or(0) + 1;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); top];
    for (i, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    adj.iter_mut().for_each(|l| l.sort_unstable());
    let mut used = vec![false; edges.len()];
    let mut seen = vec![false; top];
    let mut tour = vec![start];
    walk(start, &adj, &mut used, &mut seen, &mut tour);
    tour
}

fn walk(
    v: usize,
    adj: &[Vec<(usize, usize)>],
    used: &mut [bool],
    seen: &mut [bool],
    tour: &mut Vec<usize>,
) {
    seen[v] = true;
    for &(u, e) in &adj[v] {
        if used[e] {
            continue;
        }
        used[e] = true;
        tour.push(u);
        if !seen[u] {
            walk(u, adj, used, seen, tour);
        }
        tour.push(v);
    }
}

fn connected(edges: &[(usize, usize)]) -> bool {
    let mut comp = UnionFind::new(
        edges
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .max()
            .map_or(0, |m| m + 1),
    );
    for &(a, b) in edges {
        comp.union(a, b);
    }
    let verts: BTreeSet<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    let roots: BTreeSet<usize> = verts.iter().map(|&v| comp.find(v)).collect();
    roots.len() <= 1
}

/// Image of a connected `h`-respecting subgraph `sub` of `g` inside the tree.
///
/// Doubles every subgraph edge, walks an Euler tour, assigns copies to the
/// tour optimally in the underlying clan embedding, and returns the minimal
/// subtree spanning those copies.
pub fn image_of_respecting_subgraph(
    pte: &PathTreeEmbedding,
    g: &WeightedGraph,
    sub: &[(usize, usize)],
) -> Result<RespectingImage> {
    if !connected(sub) {
        return Err(Error::Disconnected);
    }
    if !is_h_respecting(g, sub, pte.h)? {
        return Err(Error::NotRespecting);
    }
    let tour_weight = 2.0
        * sub
            .iter()
            .map(|&(a, b)| g.weight(a, b).expect("checked subgraph"))
            .sum::<f64>();
    image_of_walk(pte, euler_tour(sub), tour_weight)
}

fn image_of_walk(
    pte: &PathTreeEmbedding,
    tour: Vec<usize>,
    tour_weight: f64,
) -> Result<RespectingImage> {
    let (leaves, tour_cost) = optimal_path_copies(&pte.clan, &tour)?;
    let copies: Vec<usize> = leaves.iter().map(|l| pte.node_of_leaf[l]).collect();
    let edges = pte.tree.steiner_subtree(&copies);
    let weight = edges.iter().map(|&(c, _)| pte.tree.parent_weight(c)).sum();
    Ok(RespectingImage {
        tour,
        copies,
        edges,
        weight,
        tour_cost,
        tour_weight,
        bound_factor: pte.spr_stretch * pte.clan.params.path_bound,
    })
}

/// Image of an arbitrary subgraph: a forest of tree edges with its components.
#[derive(Debug, Clone, Serialize)]
pub struct GeneralImage {
    pub pte: PathTreeEmbedding,
    pub cover: SparseCover,
    /// Per cover cluster: the copies used and the tree edges spanning them.
    pub pieces: Vec<RespectingImage>,
    /// Union of the pieces' tree edges.
    pub edges: Vec<(usize, usize)>,
    /// Component id of every tree node touched by the image (`None` otherwise).
    pub component: Vec<Option<usize>>,
    pub weight: ExtReal,
    pub subgraph_weight: f64,
    /// Hop parameter the tree was built with.
    pub tree_h: usize,
}

impl GeneralImage {
    /// True iff some copy of `u` and some copy of `v` share a component.
    pub fn co_component(&self, u: usize, v: usize) -> bool {
        let comps = |x: usize| -> BTreeSet<usize> {
            self.pte.clans[x]
                .iter()
                .filter_map(|&c| self.component[c])
                .collect()
        };
        !comps(u).is_disjoint(&comps(v))
    }
}

/// Images of the spanning BFS trees of the sparse-cover clusters of `sub`.
///
/// The tree is built with hop parameter `4h * ceil(log2 n)`; the cover runs on
/// `sub` with unit weights and `delta = h`, so each BFS tree has hop depth at most
/// `h log2(2n)` and is respecting at the larger parameter.
pub fn image_of_general_subgraph(
    g: &WeightedGraph,
    sub: &[(usize, usize)],
    h: usize,
    variant: Variant,
    seed: u64,
) -> Result<GeneralImage> {
    let n = g.n();
    let unit_sub = g.edge_subgraph(sub)?.map_weights(|_, _| 1.0);
    let cost: Vec<f64> = unit_sub
        .edges()
        .iter()
        .map(|e| g.weight(e.u, e.v).expect("subgraph edge"))
        .collect();
    let tree_h = 4 * h * ((n.max(2) as f64).log2().ceil() as usize);
    let pte = build_path_tree_embedding(g, 0, tree_h, variant)?;
    let cover = sparse_cover(&unit_sub, &cost, h as f64, seed)?;

    let mut pieces = Vec::with_capacity(cover.clusters.len());
    for cl in &cover.clusters {
        let bfs = bfs_tree(&unit_sub, cl.center, &cl.members);
        let piece = if bfs.is_empty() {
            image_of_walk(&pte, vec![cl.center], 0.0)?
        } else {
            let w = 2.0
                * bfs
                    .iter()
                    .map(|&(a, b)| g.weight(a, b).expect("subgraph edge"))
                    .sum::<f64>();
            image_of_walk(&pte, euler_tour(&bfs), w)?
        };
        pieces.push(piece);
    }

    let mut edges: Vec<(usize, usize)> = pieces
        .iter()
        .flat_map(|p| p.edges.iter().copied())
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let mut uf = UnionFind::new(pte.copies());
    let mut touched = vec![false; pte.copies()];
    for &(c, p) in &edges {
        uf.union(c, p);
        touched[c] = true;
        touched[p] = true;
    }
    for piece in &pieces {
        piece.copies.iter().for_each(|&c| touched[c] = true);
    }
    let component = (0..pte.copies())
        .map(|x| touched[x].then(|| uf.find(x)))
        .collect();
    let weight = edges.iter().map(|&(c, _)| pte.tree.parent_weight(c)).sum();
    let subgraph_weight = cost.iter().sum();
    Ok(GeneralImage {
        pte,
        cover,
        pieces,
        edges,
        component,
        weight,
        subgraph_weight,
        tree_h,
    })
}

/// BFS tree of `g[members]` from `root`, as edges `(parent, child)`.
fn bfs_tree(g: &WeightedGraph, root: usize, members: &[usize]) -> Vec<(usize, usize)> {
    let mut inside = vec![false; g.n()];
    members.iter().for_each(|&v| inside[v] = true);
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut edges = Vec::new();
    while let Some(v) = queue.pop_front() {
        for &(u, _) in g.neighbors(v) {
            if inside[u] && !seen[u] {
                seen[u] = true;
                edges.push((v, u));
                queue.push_back(u);
            }
        }
    }
    edges
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tour_doubles_edges() {
        let edges = [(0, 1), (1, 2), (2, 0), (2, 3)];
        let t = euler_tour(&edges);
        assert_eq!(t.first(), t.last());
        assert_eq!(t.len(), 2 * edges.len() + 1);
        let mut count = std::collections::HashMap::new();
        for w in t.windows(2) {
            *count.entry((w[0].min(w[1]), w[0].max(w[1]))).or_insert(0) += 1;
        }
        assert!(edges
            .iter()
            .all(|&(a, b)| count[&(a.min(b), a.max(b))] == 2));
    }

    #[test]
    fn single_edge_image() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0)]).unwrap();
        let pte = build_path_tree_embedding(&g, 0, 3, Variant::Standard).unwrap();
        let img = image_of_respecting_subgraph(&pte, &g, &[(1, 2)]).unwrap();
        assert!(img.weight.le_tol(ExtReal::Finite(img.bound_factor * 4.0)));
    }

    #[test]
    fn rejects_non_respecting() {
        // The path 0-1-2-3 weighs 3 while the direct edge 0-3 weighs 10; with
        // h = 1 the pair (0, 3) has 1-hop distance 10 > 3.
        let g =
            WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 10.0)]).unwrap();
        let pte = build_path_tree_embedding(&g, 0, 1, Variant::Standard).unwrap();
        assert!(matches!(
            image_of_respecting_subgraph(&pte, &g, &[(0, 1), (1, 2), (2, 3)]),
            Err(Error::NotRespecting)
        ));
    }

    #[test]
    fn empty_subgraph() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let img = image_of_general_subgraph(&g, &[], 2, Variant::Standard, 1).unwrap();
        assert!(img.edges.is_empty());
    }
}
