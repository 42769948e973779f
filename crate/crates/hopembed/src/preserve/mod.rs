//! Path-tree embeddings: trees over vertex copies whose edges carry explicit
//! bounded-hop witness paths, and images of subgraphs inside them.

mod image;

pub use image::{
    euler_tour, image_of_general_subgraph, image_of_respecting_subgraph, GeneralImage,
    RespectingImage,
};

use std::collections::HashMap;

use serde::Serialize;

use crate::clan::{clan_embed, ClanEmbedding};
use crate::graph_core::{hop_paths, HopPaths};
use crate::ultrametric::{steiner_point_removal, NodeId, WeightedTree};
use crate::{Error, ExtReal, Measure, Result, Variant, WeightedGraph};

/// Tree over copies of the vertices plus a witness path for every tree edge.
#[derive(Debug, Clone, Serialize)]
pub struct PathTreeEmbedding {
    /// Tree nodes are copies; the payload of a node is its vertex.
    pub tree: WeightedTree,
    /// Tree nodes of each vertex.
    pub clans: Vec<Vec<usize>>,
    pub chief: Vec<usize>,
    /// Witness path of the edge from each node to its parent, from the node's
    /// vertex to the parent's vertex; `None` at the root and on infinite edges.
    pub assoc: Vec<Option<Vec<usize>>>,
    /// Hop budget used for each edge's witness search.
    pub edge_budget: Vec<usize>,
    /// Bound on the hops of any induced path.
    pub hop_bound: usize,
    pub root_vertex: usize,
    pub h: usize,
    /// Largest `d_out / d_in` of the Steiner point removal.
    pub spr_stretch: f64,
    pub aspect_ratio: f64,
    /// The clan embedding the tree was built from.
    #[serde(skip)]
    pub clan: ClanEmbedding,
    /// Tree node of each clan-embedding leaf.
    #[serde(skip)]
    pub node_of_leaf: HashMap<NodeId, usize>,
}

impl PathTreeEmbedding {
    pub fn owner(&self, node: usize) -> usize {
        self.tree.payload(node)
    }

    pub fn copies(&self) -> usize {
        self.tree.len()
    }

    /// Concatenation of witness paths along the tree path from `a` to `b`, as a
    /// vertex sequence (a single vertex when `a == b`). `None` when the tree path
    /// crosses an infinite edge.
    pub fn induced_path(&self, a: usize, b: usize) -> Result<Option<Vec<usize>>> {
        for x in [a, b] {
            if x >= self.tree.len() {
                return Err(Error::InvalidVertex {
                    vertex: x,
                    n: self.tree.len(),
                });
            }
        }
        let nodes = self.tree.path(a, b);
        let mut out = vec![self.owner(a)];
        for w in nodes.windows(2) {
            let (x, y) = (w[0], w[1]);
            let (child, forward) = if self.tree.parent(x) == Some(y) {
                (x, true)
            } else {
                (y, false)
            };
            let Some(p) = &self.assoc[child] else {
                return Ok(None);
            };
            if forward {
                out.extend(p.iter().skip(1));
            } else {
                out.extend(p.iter().rev().skip(1));
            }
        }
        Ok(Some(out))
    }

    /// Edges of the tree as `(child, parent)` with their witness paths.
    pub fn witnessed_edges(
        &self,
    ) -> impl Iterator<Item = (usize, usize, ExtReal, Option<&Vec<usize>>)> + '_ {
        self.tree
            .edges()
            .map(|(c, p, w)| (c, p, w, self.assoc[c].as_ref()))
    }
}

/// Sum of edge weights along a vertex sequence.
pub fn path_weight(g: &WeightedGraph, path: &[usize]) -> Option<f64> {
    path.windows(2).map(|w| g.weight(w[0], w[1])).sum()
}

/// Builds a path-tree embedding in which `root` has a single copy.
///
/// Runs the clan construction with `k = 2` and measure `n` at `root`, 1
/// elsewhere; converts the ultrametric to a tree and removes the Steiner points;
/// then gives every tree edge the lightest path within the hop budget that the
/// clan embedding's domination guarantees at that edge's scale.
pub fn build_path_tree_embedding(
    g: &WeightedGraph,
    root: usize,
    h: usize,
    variant: Variant,
) -> Result<PathTreeEmbedding> {
    g.check_vertex(root)?;
    let n = g.n();
    let mut m = vec![1.0; n];
    m[root] = n as f64;
    let clan = clan_embed(g, &Measure::new(m)?, h, 2, variant)?;
    let u = &clan.ultrametric;
    let full = WeightedTree::from_ultrametric(u);
    let leaves: Vec<usize> = u.leaves().map(|x| x.0).collect();
    let spr = steiner_point_removal(&full, &leaves)?;
    let owner: Vec<usize> = spr
        .terminals
        .iter()
        .map(|&x| u.payload(NodeId(x)).expect("terminals are leaves"))
        .collect();
    let len = spr.tree.len();
    let parent: Vec<Option<usize>> = (0..len).map(|x| spr.tree.parent(x)).collect();
    let weight: Vec<ExtReal> = (0..len).map(|x| spr.tree.parent_weight(x)).collect();
    let tree = WeightedTree::from_parents(parent, weight, owner.clone())?;

    let mut clans = vec![Vec::new(); n];
    for (x, &v) in owner.iter().enumerate() {
        clans[v].push(x);
    }
    let node_of_leaf: HashMap<NodeId, usize> = spr
        .terminals
        .iter()
        .enumerate()
        .map(|(i, &x)| (NodeId(x), i))
        .collect();
    let chief = clan.chief.iter().map(|c| node_of_leaf[c]).collect();

    let scale_budget = |label: ExtReal| -> usize {
        let p = &clan.params;
        match variant {
            Variant::Alt => p.hop_budget,
            Variant::Standard => {
                let i = (label.to_f64() / p.unit).log2().round().max(0.0) as usize;
                2 * (i + 2) * 2 * (p.k + 1) * h
            }
        }
    };
    let mut cache: HashMap<(usize, usize), HopPaths> = HashMap::new();
    let mut assoc = vec![None; len];
    let mut edge_budget = vec![0; len];
    for (c, p, w) in tree.edges() {
        let label = u.leaf_distance(NodeId(spr.terminals[c]), NodeId(spr.terminals[p]));
        if !w.is_finite() || !label.is_finite() {
            continue;
        }
        let budget = scale_budget(label);
        edge_budget[c] = budget;
        let (a, b) = (owner[c], owner[p]);
        let paths = match cache.entry((a, budget)) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(hop_paths(g, a, budget)?),
        };
        let path = paths.path_to(b).ok_or_else(|| {
            Error::InvalidParameter(format!("no {budget}-hop path between {a} and {b}"))
        })?;
        let pw = path_weight(g, &path).expect("path follows edges");
        if !ExtReal::Finite(pw).le_tol(w) {
            return Err(Error::InvalidParameter(format!(
                "witness for tree edge {c}-{p} weighs {pw} > {w}"
            )));
        }
        assoc[c] = Some(path);
    }
    let max_budget = edge_budget.iter().copied().max().unwrap_or(0);
    let hop_bound = tree.hop_diameter() * max_budget;
    Ok(PathTreeEmbedding {
        tree,
        clans,
        chief,
        assoc,
        edge_budget,
        hop_bound,
        root_vertex: root,
        h,
        spr_stretch: spr.stretch,
        aspect_ratio: g.aspect_ratio(),
        clan,
        node_of_leaf,
    })
}
