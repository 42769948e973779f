use std::collections::VecDeque;

use serde::Serialize;

use super::{NodeId, Ultrametric};
use crate::{Error, ExtReal, Result};

/// A rooted tree with nonnegative edge weights. Infinite edges mark pieces that
/// are disconnected for distance purposes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedTree {
    parent: Vec<Option<usize>>,
    /// Weight of the edge to the parent; zero at the root.
    parent_weight: Vec<ExtReal>,
    payload: Vec<usize>,
    #[serde(skip)]
    children: Vec<Vec<usize>>,
    #[serde(skip)]
    depth: Vec<usize>,
    root: usize,
}

impl WeightedTree {
    /// Builds a tree from a parent array; exactly one node has no parent.
    pub fn from_parents(
        parent: Vec<Option<usize>>,
        parent_weight: Vec<ExtReal>,
        payload: Vec<usize>,
    ) -> Result<Self> {
        let n = parent.len();
        if parent_weight.len() != n || payload.len() != n {
            return Err(Error::InvalidParameter(
                "tree arrays differ in length".into(),
            ));
        }
        let roots: Vec<usize> = (0..n).filter(|&x| parent[x].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "tree has {} roots",
                roots.len()
            )));
        }
        let mut children = vec![Vec::new(); n];
        for (x, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::InvalidVertex { vertex: p, n });
                }
                children[p].push(x);
            }
        }
        let root = roots[0];
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut seen = 1;
        while let Some(x) = queue.pop_front() {
            for &c in &children[x] {
                depth[c] = depth[x] + 1;
                seen += 1;
                queue.push_back(c);
            }
        }
        if seen != n {
            return Err(Error::InvalidParameter(
                "parent array contains a cycle".into(),
            ));
        }
        Ok(WeightedTree {
            parent,
            parent_weight,
            payload,
            children,
            depth,
            root,
        })
    }

    /// Tree metric realizing the ultrametric on its leaves: the edge from a node
    /// to its parent weighs half the label difference. Payloads are ultrametric node ids.
    pub fn from_ultrametric(u: &Ultrametric) -> WeightedTree {
        let n = u.len();
        let parent: Vec<Option<usize>> = (0..n).map(|x| u.parent(NodeId(x)).map(|p| p.0)).collect();
        let weight = (0..n)
            .map(|x| match u.parent(NodeId(x)) {
                None => ExtReal::ZERO,
                Some(p) => match (u.label(p), u.label(NodeId(x))) {
                    (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite((a - b) / 2.0),
                    _ => ExtReal::Infinite,
                },
            })
            .collect();
        WeightedTree::from_parents(parent, weight, (0..n).collect()).expect("ultrametric is a tree")
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn parent_weight(&self, x: usize) -> ExtReal {
        self.parent_weight[x]
    }

    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    pub fn payload(&self, x: usize) -> usize {
        self.payload[x]
    }

    pub fn depth(&self, x: usize) -> usize {
        self.depth[x]
    }

    /// Edges as `(child, parent, weight)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, ExtReal)> + '_ {
        (0..self.len()).filter_map(|x| self.parent[x].map(|p| (x, p, self.parent_weight[x])))
    }

    /// Largest node depth in edges.
    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("deeper node has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("deeper node has a parent");
        }
        while a != b {
            a = self.parent[a].expect("below root");
            b = self.parent[b].expect("below root");
        }
        a
    }

    /// Nodes on the unique path from `a` to `b`, inclusive.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let l = self.lca(a, b);
        let mut up = vec![a];
        let mut x = a;
        while x != l {
            x = self.parent[x].expect("below lca");
            up.push(x);
        }
        let mut down = Vec::new();
        let mut y = b;
        while y != l {
            down.push(y);
            y = self.parent[y].expect("below lca");
        }
        up.extend(down.into_iter().rev());
        up
    }

    /// Weighted distance; infinite when the path crosses an infinite edge.
    pub fn distance(&self, a: usize, b: usize) -> ExtReal {
        let l = self.lca(a, b);
        let mut total = ExtReal::ZERO;
        for mut x in [a, b] {
            while x != l {
                total = total + self.parent_weight[x];
                x = self.parent[x].expect("below lca");
            }
        }
        total
    }

    /// Distances from `s` to every node by traversal (used for all-pairs checks).
    pub fn distances_from(&self, s: usize) -> Vec<ExtReal> {
        let mut dist = vec![ExtReal::Infinite; self.len()];
        let mut seen = vec![false; self.len()];
        dist[s] = ExtReal::ZERO;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            let nbrs = self.children[x]
                .iter()
                .map(|&c| (c, self.parent_weight[c]))
                .chain(self.parent[x].map(|p| (p, self.parent_weight[x])));
            for (y, w) in nbrs {
                if !seen[y] {
                    seen[y] = true;
                    dist[y] = dist[x] + w;
                    stack.push(y);
                }
            }
        }
        dist
    }

    /// Largest number of edges on a path between two nodes.
    pub fn hop_diameter(&self) -> usize {
        if self.is_empty() {
            return 0;
        }
        let far = |s: usize| {
            let mut hops = vec![usize::MAX; self.len()];
            hops[s] = 0;
            let mut queue = VecDeque::from([s]);
            let mut best = (0, s);
            while let Some(x) = queue.pop_front() {
                best = best.max((hops[x], x));
                let nbrs = self.children[x].iter().copied().chain(self.parent[x]);
                for y in nbrs {
                    if hops[y] == usize::MAX {
                        hops[y] = hops[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            best
        };
        let (_, a) = far(self.root);
        far(a).0
    }

    /// Edges `(child, parent)` of the minimal subtree spanning `nodes`.
    pub fn steiner_subtree(&self, nodes: &[usize]) -> Vec<(usize, usize)> {
        let mut count = vec![0usize; self.len()];
        let mut marked = vec![false; self.len()];
        for &x in nodes {
            marked[x] = true;
        }
        let total = marked.iter().filter(|&&m| m).count();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&x| std::cmp::Reverse(self.depth[x]));
        for &x in &order {
            count[x] += usize::from(marked[x]);
            if let Some(p) = self.parent[x] {
                count[p] += count[x];
            }
        }
        let mut edges: Vec<(usize, usize)> = (0..self.len())
            .filter_map(|x| {
                let p = self.parent[x]?;
                (count[x] > 0 && count[x] < total).then_some((x, p))
            })
            .collect();
        edges.sort_unstable();
        edges
    }
}

/// Weighted path distance between two nodes of `t`.
pub fn tree_distance(t: &WeightedTree, u: usize, v: usize) -> Result<ExtReal> {
    for x in [u, v] {
        if x >= t.len() {
            return Err(Error::InvalidVertex {
                vertex: x,
                n: t.len(),
            });
        }
    }
    Ok(t.distance(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::shortest_distances;
    use crate::WeightedGraph;
    use proptest::prelude::*;

    fn fin(x: f64) -> ExtReal {
        ExtReal::Finite(x)
    }

    #[test]
    fn trivial_distances() {
        let t =
            WeightedTree::from_parents(vec![None, Some(0)], vec![fin(0.0), fin(3.0)], vec![0, 1])
                .unwrap();
        assert_eq!(tree_distance(&t, 1, 1).unwrap(), fin(0.0));
        assert_eq!(tree_distance(&t, 0, 1).unwrap(), fin(3.0));
    }

    #[test]
    fn rejects_cycles_and_forests() {
        assert!(
            WeightedTree::from_parents(vec![None, None], vec![fin(0.0); 2], vec![0, 1]).is_err()
        );
        assert!(WeightedTree::from_parents(
            vec![None, Some(2), Some(1)],
            vec![fin(0.0); 3],
            vec![0, 1, 2]
        )
        .is_err());
    }

    #[test]
    fn steiner_subtree_of_path() {
        // 0 - 1 - 2 - 3 rooted at 0.
        let t = WeightedTree::from_parents(
            vec![None, Some(0), Some(1), Some(2)],
            vec![fin(0.0), fin(1.0), fin(1.0), fin(1.0)],
            vec![0, 1, 2, 3],
        )
        .unwrap();
        assert_eq!(t.steiner_subtree(&[1, 3]), vec![(2, 1), (3, 2)]);
        assert_eq!(t.steiner_subtree(&[2]), vec![]);
        assert_eq!(t.hop_diameter(), 3);
        assert_eq!(t.path(3, 0), vec![3, 2, 1, 0]);
    }

    fn arb_tree() -> impl Strategy<Value = WeightedTree> {
        (1usize..30).prop_flat_map(|n| {
            (
                proptest::collection::vec(0usize..1000, n),
                proptest::collection::vec(1u32..50, n),
            )
                .prop_map(move |(ps, ws)| {
                    let parent = (0..n).map(|x| (x > 0).then(|| ps[x] % x)).collect();
                    let weight = (0..n)
                        .map(|x| if x == 0 { fin(0.0) } else { fin(ws[x] as f64) })
                        .collect();
                    WeightedTree::from_parents(parent, weight, (0..n).collect()).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn distance_matches_dijkstra(t in arb_tree()) {
            let edges: Vec<_> = t.edges().map(|(c, p, w)| (c, p, w.to_f64())).collect();
            let g = WeightedGraph::new(t.len(), edges).unwrap();
            for s in 0..t.len() {
                let d = shortest_distances(&g, s);
                let d2 = t.distances_from(s);
                for v in 0..t.len() {
                    prop_assert_eq!(t.distance(s, v), d[v]);
                    prop_assert_eq!(d2[v], d[v]);
                }
            }
        }
    }
}
