use serde::Serialize;

use crate::ultrametric::{NodeId, Ultrametric};
use crate::{Error, ExtReal, Result};

/// Root-to-leaf path of a leaf in an ultrametric, as `(ancestor, label)` pairs.
///
/// Runs of ancestors sharing a label are collapsed to their topmost node, so
/// labels strictly decrease along the path and the last entry is the leaf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeLabel {
    /// Identifier of the ultrametric the label was taken from.
    pub tree: u32,
    pub path: Vec<(u32, ExtReal)>,
}

impl TreeLabel {
    pub fn words(&self) -> usize {
        1 + 2 * self.path.len()
    }
}

/// Label of every leaf of `u` listed in `leaves`, tagged with `tree`.
pub fn build_tree_labels(u: &Ultrametric, tree: u32, leaves: &[NodeId]) -> Vec<TreeLabel> {
    leaves.iter().map(|&x| tree_label(u, tree, x)).collect()
}

fn tree_label(u: &Ultrametric, tree: u32, leaf: NodeId) -> TreeLabel {
    let mut chain = vec![leaf];
    let mut x = leaf;
    while let Some(p) = u.parent(x) {
        chain.push(p);
        x = p;
    }
    chain.reverse();
    let mut path: Vec<(u32, ExtReal)> = Vec::with_capacity(chain.len());
    for x in chain {
        let l = u.label(x);
        if path.last().is_some_and(|&(_, top)| top == l) {
            continue;
        }
        path.push((x.0 as u32, l));
    }
    TreeLabel { tree, path }
}

/// Label of the deepest common entry: the ultrametric distance of the two leaves.
pub fn tree_label_query(a: &TreeLabel, b: &TreeLabel) -> Result<ExtReal> {
    if a.tree != b.tree {
        return Err(Error::LabelMismatch(a.tree, b.tree));
    }
    Ok(a.path
        .iter()
        .zip(&b.path)
        .take_while(|(x, y)| x.0 == y.0)
        .last()
        .map_or(ExtReal::Infinite, |(x, _)| x.1))
}
