//! Hop-bounded distances inside an induced subgraph `G[Y]`.

use crate::{ExtReal, WeightedGraph};

pub(crate) struct Region<'a> {
    g: &'a WeightedGraph,
    mask: Vec<bool>,
    members: Vec<usize>,
}

impl<'a> Region<'a> {
    /// `members` must be sorted and duplicate-free.
    pub fn new(g: &'a WeightedGraph, members: &[usize]) -> Self {
        let mut mask = vec![false; g.n()];
        for &v in members {
            mask[v] = true;
        }
        Region {
            g,
            mask,
            members: members.to_vec(),
        }
    }

    /// Distances from `s` after each budget in `budgets` (ascending), indexed by vertex id.
    pub fn snapshots(&self, s: usize, budgets: &[usize]) -> Vec<Vec<ExtReal>> {
        debug_assert!(budgets.windows(2).all(|w| w[0] <= w[1]));
        let mut dist = vec![ExtReal::Infinite; self.g.n()];
        dist[s] = ExtReal::ZERO;
        let mut out = Vec::with_capacity(budgets.len());
        let mut rounds = 0;
        let mut stable = false;
        for &b in budgets {
            while rounds < b && !stable {
                let mut next = dist.clone();
                let mut changed = false;
                for &v in &self.members {
                    for &(u, w) in self.g.neighbors(v) {
                        if self.mask[u] {
                            let c = dist[u] + w;
                            if c < next[v] {
                                next[v] = c;
                                changed = true;
                            }
                        }
                    }
                }
                dist = next;
                rounds += 1;
                stable = !changed;
            }
            out.push(dist.clone());
        }
        out
    }

    pub fn distances(&self, s: usize, h: usize) -> Vec<ExtReal> {
        self.snapshots(s, &[h]).pop().expect("one snapshot")
    }
}

/// Members `x` with `dist[x] <= r` (tolerant comparison).
pub(crate) fn within(members: &[usize], dist: &[ExtReal], r: f64) -> Vec<usize> {
    members
        .iter()
        .copied()
        .filter(|&x| dist[x].le_tol(ExtReal::Finite(r)))
        .collect()
}
