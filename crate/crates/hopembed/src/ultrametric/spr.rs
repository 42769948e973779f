use std::collections::VecDeque;

use super::WeightedTree;
use crate::{Error, ExtReal, Result};

/// Output of [`steiner_point_removal`].
#[derive(Debug, Clone)]
pub struct SprResult {
    /// Tree whose node `i` is the terminal `terminals[i]`; payloads are copied from the input.
    pub tree: WeightedTree,
    /// Input node of each output node, sorted ascending.
    pub terminals: Vec<usize>,
    /// Largest ratio `d_out / d_in` over terminal pairs at finite distance.
    pub stretch: f64,
}

impl SprResult {
    /// Output node of input node `x`, if `x` is a terminal.
    pub fn index_of(&self, x: usize) -> Option<usize> {
        self.terminals.binary_search(&x).ok()
    }
}

/// Removes the non-terminal nodes of `t` by contracting every other node into
/// its nearest terminal descendant (ties to the smallest node id).
///
/// Nodes without a terminal below them join their parent's class. Each
/// surviving edge joins two classes and weighs the input distance between
/// their terminals, so the output never shrinks a distance. The realized
/// stretch is measured and an error is returned if it exceeds 8.
pub fn steiner_point_removal(t: &WeightedTree, terminals: &[usize]) -> Result<SprResult> {
    let mut k: Vec<usize> = terminals.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.is_empty() {
        return Err(Error::EmptyTerminals);
    }
    if let Some(&bad) = k.iter().find(|&&x| x >= t.len()) {
        return Err(Error::InvalidVertex {
            vertex: bad,
            n: t.len(),
        });
    }
    let is_terminal = {
        let mut m = vec![false; t.len()];
        for &x in &k {
            m[x] = true;
        }
        m
    };

    // Bottom-up: nearest terminal descendant as (distance, node).
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by_key(|&x| std::cmp::Reverse(t.depth(x)));
    let mut best: Vec<Option<(ExtReal, usize)>> = vec![None; t.len()];
    for &x in &order {
        if is_terminal[x] {
            best[x] = Some((ExtReal::ZERO, x));
            continue;
        }
        best[x] = t
            .children(x)
            .iter()
            .filter_map(|&c| best[c].map(|(d, y)| (d + t.parent_weight(c), y)))
            .min();
    }
    // Top-down: classes without a terminal below adopt the parent's class.
    let mut assign = vec![usize::MAX; t.len()];
    let mut queue = VecDeque::from([t.root()]);
    while let Some(x) = queue.pop_front() {
        assign[x] = match best[x] {
            Some((_, y)) => y,
            None => assign[t.parent(x).expect("root has a terminal below it")],
        };
        queue.extend(t.children(x).iter().copied());
    }

    let index = |x: usize| k.binary_search(&x).expect("assigned to a terminal");
    let m = k.len();
    let mut adj: Vec<Vec<(usize, ExtReal)>> = vec![Vec::new(); m];
    for (c, p, _) in t.edges() {
        let (a, b) = (assign[c], assign[p]);
        if a != b {
            let w = t.distance(a, b);
            adj[index(a)].push((index(b), w));
            adj[index(b)].push((index(a), w));
        }
    }
    let root = index(assign[t.root()]);
    let mut parent = vec![None; m];
    let mut weight = vec![ExtReal::ZERO; m];
    let mut seen = vec![false; m];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &(y, w) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(x);
                weight[y] = w;
                queue.push_back(y);
            }
        }
    }
    let payload = k.iter().map(|&x| t.payload(x)).collect();
    let tree = WeightedTree::from_parents(parent, weight, payload)?;
    let stretch = measure_stretch(t, &k, &tree);
    if stretch > 8.0 + crate::EPS {
        return Err(Error::StretchExceeded(stretch));
    }
    Ok(SprResult {
        tree,
        terminals: k,
        stretch,
    })
}

fn measure_stretch(t: &WeightedTree, k: &[usize], out: &WeightedTree) -> f64 {
    let mut worst: f64 = 1.0;
    for i in 0..k.len() {
        let d_out = out.distances_from(i);
        let d_in = t.distances_from(k[i]);
        for j in i + 1..k.len() {
            match (d_in[k[j]], d_out[j]) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) if a > 0.0 => worst = worst.max(b / a),
                (ExtReal::Finite(a), ExtReal::Finite(b)) if b > a => worst = f64::INFINITY,
                (ExtReal::Finite(_), ExtReal::Infinite) => worst = f64::INFINITY,
                _ => {}
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ultrametric::{join_under_root, Ultrametric};
    use proptest::prelude::*;

    fn fin(x: f64) -> ExtReal {
        ExtReal::Finite(x)
    }

    fn check_bounds(t: &WeightedTree, r: &SprResult) {
        for (i, &a) in r.terminals.iter().enumerate() {
            for (j, &b) in r.terminals.iter().enumerate() {
                let din = t.distance(a, b);
                let dout = r.tree.distance(i, j);
                assert!(din.le_tol(dout), "contracting pair {a},{b}");
                assert!(dout.le_tol(din * 8.0), "stretch above 8 for {a},{b}");
            }
        }
    }

    #[test]
    fn star_with_steiner_center() {
        let t = WeightedTree::from_parents(
            vec![None, Some(0), Some(0), Some(0)],
            vec![fin(0.0), fin(2.0), fin(1.0), fin(3.0)],
            vec![0, 1, 2, 3],
        )
        .unwrap();
        let r = steiner_point_removal(&t, &[1, 2, 3]).unwrap();
        assert_eq!(r.tree.len(), 3);
        // The center merges into its nearest leaf, node 2.
        assert_eq!(r.tree.root(), r.index_of(2).unwrap());
        check_bounds(&t, &r);
    }

    #[test]
    fn single_terminal() {
        let t =
            WeightedTree::from_parents(vec![None, Some(0)], vec![fin(0.0), fin(1.0)], vec![0, 1])
                .unwrap();
        let r = steiner_point_removal(&t, &[1]).unwrap();
        assert_eq!(r.tree.len(), 1);
    }

    #[test]
    fn all_terminals_is_identity() {
        let t = WeightedTree::from_parents(
            vec![None, Some(0), Some(1)],
            vec![fin(0.0), fin(2.0), fin(5.0)],
            vec![0, 1, 2],
        )
        .unwrap();
        let r = steiner_point_removal(&t, &[0, 1, 2]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(r.tree.distance(a, b), t.distance(a, b));
            }
        }
    }

    #[test]
    fn empty_terminals_rejected() {
        let t = WeightedTree::from_parents(vec![None], vec![fin(0.0)], vec![0]).unwrap();
        assert!(matches!(
            steiner_point_removal(&t, &[]),
            Err(Error::EmptyTerminals)
        ));
    }

    fn arb_hst() -> impl Strategy<Value = Ultrametric> {
        let leaf = (0usize..100).prop_map(Ultrametric::leaf);
        leaf.prop_recursive(4, 40, 4, |inner| {
            proptest::collection::vec(inner, 1..4).prop_map(|kids| {
                let top = kids.iter().map(|k| k.label(k.root())).max().unwrap();
                let label = if top == ExtReal::ZERO {
                    fin(1.0)
                } else {
                    top * 2.0
                };
                join_under_root(kids, label).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn hst_leaves_within_stretch(u in arb_hst()) {
            let t = WeightedTree::from_ultrametric(&u);
            let leaves: Vec<usize> = u.leaves().map(|x| x.0).collect();
            let r = steiner_point_removal(&t, &leaves).unwrap();
            check_bounds(&t, &r);
            prop_assert!(r.tree.height() <= t.height());
        }
    }
}
