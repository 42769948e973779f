//! Ultrametrics as rooted labeled trees, weighted trees and Steiner point removal.

mod spr;
mod tree;

pub use spr::{steiner_point_removal, SprResult};
pub use tree::{tree_distance, WeightedTree};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, ExtReal, Result};

/// Index of a node inside one [`Ultrametric`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

/// Arena used while a tree is assembled bottom-up.
#[derive(Debug, Default)]
pub struct UltrametricBuilder {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    label: Vec<ExtReal>,
    payload: Vec<Option<usize>>,
}

impl UltrametricBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_leaf(&mut self, payload: usize) -> NodeId {
        self.push(ExtReal::ZERO, Some(payload), Vec::new())
    }

    /// Adds an internal node above `children`; its label must dominate theirs.
    pub fn add_internal(&mut self, label: ExtReal, children: &[NodeId]) -> Result<NodeId> {
        for c in children {
            let cl = self.label[c.0];
            if !cl.le_tol(label) {
                return Err(Error::LabelOrder {
                    label: label.to_f64(),
                    child: cl.to_f64(),
                });
            }
        }
        let kids: Vec<usize> = children.iter().map(|c| c.0).collect();
        let id = self.push(label, None, kids.clone());
        for c in kids {
            self.parent[c] = Some(id.0);
        }
        Ok(id)
    }

    fn push(&mut self, label: ExtReal, payload: Option<usize>, children: Vec<usize>) -> NodeId {
        self.parent.push(None);
        self.children.push(children);
        self.label.push(label);
        self.payload.push(payload);
        NodeId(self.label.len() - 1)
    }

    /// Finishes the tree rooted at `root`, renumbering nodes in preorder.
    pub fn build(self, root: NodeId) -> Ultrametric {
        self.build_mapped(root).0
    }

    /// As [`UltrametricBuilder::build`], also returning the new id of every builder node
    /// (`usize::MAX` for nodes not below `root`).
    pub fn build_mapped(self, root: NodeId) -> (Ultrametric, Vec<usize>) {
        let mut order = Vec::with_capacity(self.label.len());
        let mut stack = vec![root.0];
        while let Some(x) = stack.pop() {
            order.push(x);
            stack.extend(self.children[x].iter().rev());
        }
        let mut new_id = vec![usize::MAX; self.label.len()];
        for (i, &x) in order.iter().enumerate() {
            new_id[x] = i;
        }
        let parent = order
            .iter()
            .map(|&x| {
                if x == root.0 {
                    None
                } else {
                    self.parent[x].map(|p| new_id[p])
                }
            })
            .collect();
        let children = order
            .iter()
            .map(|&x| self.children[x].iter().map(|&c| new_id[c]).collect())
            .collect();
        let label = order.iter().map(|&x| self.label[x]).collect();
        let payload = order.iter().map(|&x| self.payload[x]).collect();
        (
            Ultrametric::from_parts(parent, children, label, payload),
            new_id,
        )
    }
}

/// A rooted labeled tree; the distance between two leaves is the label of their LCA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "UltrametricJson", try_from = "UltrametricJson")]
pub struct Ultrametric {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    label: Vec<ExtReal>,
    payload: Vec<Option<usize>>,
    depth: Vec<usize>,
}

/// Parent array, labels and leaf payloads; node 0 is the root.
#[derive(Serialize, Deserialize)]
struct UltrametricJson {
    parent: Vec<Option<usize>>,
    label: Vec<ExtReal>,
    payload: Vec<Option<usize>>,
}

impl From<Ultrametric> for UltrametricJson {
    fn from(u: Ultrametric) -> Self {
        UltrametricJson {
            parent: u.parent,
            label: u.label,
            payload: u.payload,
        }
    }
}

impl TryFrom<UltrametricJson> for Ultrametric {
    type Error = Error;
    fn try_from(j: UltrametricJson) -> Result<Self> {
        let n = j.parent.len();
        if n == 0 || j.label.len() != n || j.payload.len() != n || j.parent[0].is_some() {
            return Err(Error::InvalidParameter("malformed ultrametric".into()));
        }
        let mut children = vec![Vec::new(); n];
        for (x, p) in j.parent.iter().enumerate().skip(1) {
            match p {
                Some(p) if *p < x => children[*p].push(x),
                _ => return Err(Error::InvalidParameter("parent must precede child".into())),
            }
        }
        Ok(Ultrametric::from_parts(
            j.parent, children, j.label, j.payload,
        ))
    }
}

impl Ultrametric {
    fn from_parts(
        parent: Vec<Option<usize>>,
        children: Vec<Vec<usize>>,
        label: Vec<ExtReal>,
        payload: Vec<Option<usize>>,
    ) -> Self {
        let mut depth = vec![0; parent.len()];
        for x in 1..parent.len() {
            depth[x] = depth[parent[x].expect("non-root has a parent")] + 1;
        }
        Ultrametric {
            parent,
            children,
            label,
            payload,
            depth,
        }
    }

    /// A single leaf.
    pub fn leaf(payload: usize) -> Self {
        let mut b = UltrametricBuilder::new();
        let r = b.add_leaf(payload);
        b.build(r)
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label.is_empty()
    }

    pub fn parent(&self, x: NodeId) -> Option<NodeId> {
        self.parent[x.0].map(NodeId)
    }

    pub fn children(&self, x: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.children[x.0].iter().map(|&c| NodeId(c))
    }

    pub fn label(&self, x: NodeId) -> ExtReal {
        self.label[x.0]
    }

    pub fn payload(&self, x: NodeId) -> Option<usize> {
        self.payload[x.0]
    }

    pub fn depth(&self, x: NodeId) -> usize {
        self.depth[x.0]
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn is_leaf(&self, x: NodeId) -> bool {
        self.children[x.0].is_empty() && self.payload[x.0].is_some()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.len()).map(NodeId).filter(|&x| self.is_leaf(x))
    }

    /// Leaves grouped by payload; index `p` lists the leaves carrying payload `p`.
    pub fn leaves_by_payload(&self, n: usize) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); n];
        for x in self.leaves() {
            let p = self.payload[x.0].expect("leaves carry payloads");
            if p < n {
                out[p].push(x);
            }
        }
        out
    }

    /// Leaves below `x` (including `x` itself when it is a leaf).
    pub fn leaves_under(&self, x: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![x.0];
        while let Some(y) = stack.pop() {
            if self.is_leaf(NodeId(y)) {
                out.push(NodeId(y));
            }
            stack.extend(self.children[y].iter().rev());
        }
        out
    }

    pub fn lca(&self, a: NodeId, b: NodeId) -> NodeId {
        let (mut a, mut b) = (a.0, b.0);
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("deeper node has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("deeper node has a parent");
        }
        while a != b {
            a = self.parent[a].expect("distinct nodes below root");
            b = self.parent[b].expect("distinct nodes below root");
        }
        NodeId(a)
    }

    /// Label of the LCA; 0 when the leaves coincide.
    pub fn distance(&self, x: NodeId, y: NodeId) -> Result<ExtReal> {
        for z in [x, y] {
            if z.0 >= self.len() || !self.is_leaf(z) {
                return Err(Error::NotALeaf(z.0));
            }
        }
        Ok(self.leaf_distance(x, y))
    }

    /// As [`Ultrametric::distance`] without argument validation.
    pub fn leaf_distance(&self, x: NodeId, y: NodeId) -> ExtReal {
        if x == y {
            ExtReal::ZERO
        } else {
            self.label[self.lca(x, y).0]
        }
    }

    /// Labels that are at least `omega` become infinite.
    pub fn saturate_labels(&self, omega: ExtReal) -> Ultrametric {
        let mut u = self.clone();
        for l in &mut u.label {
            if *l >= omega {
                *l = ExtReal::Infinite;
            }
        }
        u
    }

    /// Label monotonicity plus the strong triangle inequality on (sampled) leaf triples.
    pub fn validate(&self) -> bool {
        validate_ultrametric(self)
    }
}

/// Checks leaf labels are 0, labels never increase towards the leaves, and the
/// strong triangle inequality holds on all triples (sampled when there are many leaves).
pub fn validate_ultrametric(u: &Ultrametric) -> bool {
    for x in 0..u.len() {
        let id = NodeId(x);
        if u.is_leaf(id) && u.label(id) != ExtReal::ZERO {
            return false;
        }
        if let Some(p) = u.parent(id) {
            if !u.label(id).le_tol(u.label(p)) {
                return false;
            }
        }
    }
    let leaves: Vec<NodeId> = u.leaves().collect();
    let m = leaves.len();
    let ok = |a: NodeId, b: NodeId, c: NodeId| {
        u.leaf_distance(a, c)
            .le_tol(u.leaf_distance(a, b).max(u.leaf_distance(b, c)))
    };
    if m <= 40 {
        leaves
            .iter()
            .all(|&a| leaves.iter().all(|&b| leaves.iter().all(|&c| ok(a, b, c))))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..20_000).all(|_| {
            let t = sample(&mut rng, m, 3);
            ok(leaves[t.index(0)], leaves[t.index(1)], leaves[t.index(2)])
        })
    }
}

/// New root with the given label above the given trees.
pub fn join_under_root(children: Vec<Ultrametric>, label: ExtReal) -> Result<Ultrametric> {
    let mut b = UltrametricBuilder::new();
    let mut roots = Vec::with_capacity(children.len());
    for c in &children {
        let mut ids = Vec::with_capacity(c.len());
        // Preorder numbering means every child appears after its parent, so
        // rebuild bottom-up by walking the nodes in reverse.
        ids.resize(c.len(), NodeId(0));
        for x in (0..c.len()).rev() {
            ids[x] = match c.payload[x] {
                Some(p) if c.children[x].is_empty() => b.add_leaf(p),
                _ => {
                    let kids: Vec<NodeId> = c.children[x].iter().map(|&k| ids[k]).collect();
                    b.add_internal(c.label[x], &kids)?
                }
            };
        }
        roots.push(ids[0]);
    }
    let r = b.add_internal(label, &roots)?;
    Ok(b.build(r))
}
