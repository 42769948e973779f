//! Ramsey-type embeddings into ultrametrics.
//!
//! [`ramsey_embed`] recursively partitions the graph scale by scale. Every
//! vertex ends up as a leaf; the surviving marked set `M` gets the stretch
//! guarantee `d_U(u, v) <= t * d^(h)(u, v)` for `u` in `M`, while every pair is
//! dominated: `d^(beta*h)(u, v) <= d_U(u, v)`.

mod cluster;
mod distribution;
mod partition;

pub use cluster::{create_cluster, create_cluster_alt, ClusterTriple};
pub(crate) use cluster::{ring_index, ring_index_where};
pub use distribution::{
    mode_k, ramsey_distribution, ramsey_distribution_with, RamseyDistribution, RamseyMode,
};
pub use partition::{padded_partition, Part, Partition};

use serde::Serialize;

use crate::graph_core::{completion, hop_diameter};
use crate::scale::{ceil_loglog, pow2, top_scale};
use crate::ultrametric::{NodeId, Ultrametric, UltrametricBuilder};
use crate::{Error, ExtReal, Measure, Result, Variant, WeightedGraph};

/// Constants realized by one embedding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamseyParams {
    pub variant: Variant,
    pub k: usize,
    pub h: usize,
    /// Stretch for pairs touching the marked set.
    pub t: f64,
    /// Hop-stretch factor: distances are dominated by `d^(beta*h)`.
    pub beta: usize,
    /// `beta * h`.
    pub hop_budget: usize,
    /// Top scale exponent.
    pub phi: i32,
    /// Loglog parameter of the marked measure (alternative rule only).
    pub l_top: Option<usize>,
    /// Labels at or above this value were saturated to infinity.
    pub omega: ExtReal,
    /// Unit of the labels (the minimum edge weight).
    pub unit: f64,
}

/// A cluster of the hierarchy with the scale at which it was split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledCluster {
    pub scale: i32,
    pub members: Vec<usize>,
}

/// Bookkeeping collected while embedding.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RamseyStats {
    pub cluster_calls: usize,
    pub max_j: usize,
    /// Calls whose ring index came from the rounding fallback.
    pub ratio_misses: usize,
    pub dense_calls: usize,
    /// Every non-singleton cluster that was split, with its scale.
    #[serde(skip)]
    pub clusters: Vec<ScaledCluster>,
}

/// Ultrametric over all vertices plus the surviving marked set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamseyEmbedding {
    pub ultrametric: Ultrametric,
    pub marked: Vec<usize>,
    /// Leaf of each vertex.
    pub leaf_of: Vec<NodeId>,
    pub params: RamseyParams,
    pub stats: RamseyStats,
}

impl RamseyEmbedding {
    pub fn distance(&self, u: usize, v: usize) -> ExtReal {
        self.ultrametric
            .leaf_distance(self.leaf_of[u], self.leaf_of[v])
    }

    pub fn is_marked(&self, v: usize) -> bool {
        self.marked.binary_search(&v).is_ok()
    }
}

pub(crate) fn check_embed_args(g: &WeightedGraph, mu: &Measure, h: usize, k: usize) -> Result<()> {
    if h == 0 || k == 0 {
        return Err(Error::InvalidParameter("h and k must be at least 1".into()));
    }
    if mu.len() != g.n() {
        return Err(Error::InvalidParameter(format!(
            "measure has {} entries for {} vertices",
            mu.len(),
            g.n()
        )));
    }
    if g.n() == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    mu.check_at_least_one()
}

/// Completion factor for stretch `t`: shortcut edges must be heavier than any
/// label a finite pair can receive.
pub(crate) fn completion_factor(t: f64) -> f64 {
    t * 17.0 / 16.0
}

/// Builds the Ramsey-type embedding of `g` for the marked set `initial`.
///
/// `mu` must be at least 1 everywhere. If some pair is not `h`-hop connected,
/// the graph is first completed with heavy shortcut edges and the labels they
/// induce are saturated to infinity afterwards.
pub fn ramsey_embed(
    g: &WeightedGraph,
    mu: &Measure,
    initial: &[usize],
    h: usize,
    k: usize,
    variant: Variant,
) -> Result<RamseyEmbedding> {
    check_embed_args(g, mu, h, k)?;
    let mut m0 = initial.to_vec();
    m0.sort_unstable();
    m0.dedup();
    for &v in &m0 {
        g.check_vertex(v)?;
    }
    let l_top = ceil_loglog(mu.of(&m0)).max(2);
    let t = match variant {
        Variant::Standard => 16.0 * k as f64,
        Variant::Alt => (8 * k * l_top) as f64,
    };
    let done = completion(g, h, completion_factor(t));
    let work = &done.graph;
    let unit = work.min_weight().unwrap_or(1.0);
    let scaled = work.map_weights(|_, w| w / unit);
    let diam = hop_diameter(&scaled, h)
        .finite()
        .expect("completed graph is h-hop connected");
    let phi = top_scale(diam);
    let beta = match variant {
        Variant::Standard => 2 * (phi.max(0) as usize + 2) * 2 * k,
        Variant::Alt => 4 * k * l_top,
    };

    let mut ctx = Ctx {
        g: &scaled,
        mu,
        h,
        k,
        variant,
        unit,
        builder: UltrametricBuilder::new(),
        marked: Vec::new(),
        stats: RamseyStats::default(),
    };
    let all: Vec<usize> = (0..g.n()).collect();
    let root = ctx.embed(&all, &m0, phi)?;
    let Ctx {
        builder,
        mut marked,
        stats,
        ..
    } = ctx;
    let built = builder.build(root);
    marked.sort_unstable();
    let ultrametric = built.saturate_labels(done.omega);
    let leaf_of = first_leaves(&ultrametric, g.n());
    Ok(RamseyEmbedding {
        ultrametric,
        marked,
        leaf_of,
        params: RamseyParams {
            variant,
            k,
            h,
            t,
            beta,
            hop_budget: beta * h,
            phi,
            l_top: (variant == Variant::Alt).then_some(l_top),
            omega: done.omega,
            unit,
        },
        stats,
    })
}

/// First leaf carrying each vertex.
pub(crate) fn first_leaves(u: &Ultrametric, n: usize) -> Vec<NodeId> {
    u.leaves_by_payload(n)
        .into_iter()
        .map(|v| *v.first().expect("every vertex has a leaf"))
        .collect()
}

struct Ctx<'a> {
    g: &'a WeightedGraph,
    mu: &'a Measure,
    h: usize,
    k: usize,
    variant: Variant,
    unit: f64,
    builder: UltrametricBuilder,
    marked: Vec<usize>,
    stats: RamseyStats,
}

impl Ctx<'_> {
    fn embed(&mut self, x: &[usize], m: &[usize], i: i32) -> Result<NodeId> {
        if let [v] = x {
            if !m.is_empty() {
                self.marked.push(*v);
            }
            return Ok(self.builder.add_leaf(*v));
        }
        self.stats.clusters.push(ScaledCluster {
            scale: i,
            members: x.to_vec(),
        });
        let p = padded_partition(self.g, x, self.mu, m, self.h, self.k, i, self.variant)?;
        for t in &p.triples {
            self.stats.cluster_calls += 1;
            self.stats.max_j = self.stats.max_j.max(t.j);
            self.stats.ratio_misses += usize::from(!t.ratio_met);
            self.stats.dense_calls += usize::from(t.dense);
        }
        if p.parts.len() == 1 {
            // A unary node would carry a larger label than its only child needs.
            return self.embed(x, &p.parts[0].marked, i - 1);
        }
        let kids = p
            .parts
            .iter()
            .map(|part| self.embed(&part.cluster, &part.marked, i - 1))
            .collect::<Result<Vec<_>>>()?;
        self.builder
            .add_internal(ExtReal::Finite(pow2(i) * self.unit), &kids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::{all_pairs_hop, hop_distance_all};

    fn check(g: &WeightedGraph, e: &RamseyEmbedding) {
        let p = &e.params;
        let low = all_pairs_hop(g, p.hop_budget);
        let high = all_pairs_hop(g, p.h);
        assert!(e.ultrametric.validate());
        for u in 0..g.n() {
            for v in 0..g.n() {
                let d = e.distance(u, v);
                assert!(low[u][v].le_tol(d), "domination {u} {v}");
                if e.is_marked(u) {
                    assert!(d.le_tol(high[u][v] * p.t), "stretch {u} {v}");
                }
            }
        }
    }

    #[test]
    fn singleton_graph() {
        let g = WeightedGraph::new(1, []).unwrap();
        let e = ramsey_embed(&g, &Measure::uniform(1), &[0], 1, 1, Variant::Standard).unwrap();
        assert_eq!(e.marked, vec![0]);
        assert_eq!(e.ultrametric.len(), 1);
    }

    #[test]
    fn path_four_standard() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let all = [0, 1, 2, 3];
        let e = ramsey_embed(&g, &Measure::uniform(4), &all, 3, 1, Variant::Standard).unwrap();
        assert!(!e.marked.is_empty());
        check(&g, &e);
    }

    #[test]
    fn path_four_short_budget_saturates() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let all = [0, 1, 2, 3];
        for variant in [Variant::Standard, Variant::Alt] {
            let e = ramsey_embed(&g, &Measure::uniform(4), &all, 1, 2, variant).unwrap();
            check(&g, &e);
            let d1 = hop_distance_all(&g, 0, 1).unwrap();
            for &u in &e.marked {
                for v in 0..4 {
                    let dh = hop_distance_all(&g, u, 1).unwrap()[v];
                    if dh.is_finite() {
                        assert!(e.distance(u, v).is_finite());
                    }
                }
            }
            assert!(!d1[3].is_finite());
        }
    }

    #[test]
    fn rejects_small_measure() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let mu = Measure::new(vec![1.0, 0.5]).unwrap();
        assert!(matches!(
            ramsey_embed(&g, &mu, &[0, 1], 1, 1, Variant::Standard),
            Err(Error::MeasureBelowOne { .. })
        ));
    }

    #[test]
    fn unnormalized_weights_use_unit() {
        let g = WeightedGraph::new(3, [(0, 1, 0.25), (1, 2, 0.5)]).unwrap();
        let e = ramsey_embed(
            &g,
            &Measure::uniform(3),
            &[0, 1, 2],
            2,
            1,
            Variant::Standard,
        )
        .unwrap();
        check(&g, &e);
        assert_eq!(e.params.unit, 0.25);
    }
}
