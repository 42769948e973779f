//! Clan embeddings: one-to-many embeddings into ultrametrics with a chief copy per vertex.
//!
//! Every vertex `v` gets a clan `f(v)` of leaf copies and a chief `chi(v)` in it.
//! All copies dominate the `beta*h`-hop distances, and from every chief some
//! copy of every other vertex is within `t` times the `h`-hop distance.

mod cluster;
mod distribution;
mod path;

pub use cluster::{clan_create_cluster, clan_create_cluster_alt};
pub use distribution::{clan_distribution, ClanDistribution, ClanMode};
pub use path::optimal_path_copies;

use serde::Serialize;

use crate::graph_core::{completion, hop_diameter};
use crate::ramsey::{ClusterTriple, ScaledCluster};
use crate::scale::{ceil_loglog, minus, pow2, top_scale};
use crate::ultrametric::{NodeId, Ultrametric, UltrametricBuilder};
use crate::{ExtReal, Measure, Result, Variant, WeightedGraph};

/// Runs the clan cover of `x` at scale `i`: clusters are carved from the
/// remaining set and only their inner balls are removed, so outer clusters overlap.
pub fn clan_cover(
    g: &WeightedGraph,
    x: &[usize],
    mu: &Measure,
    h: usize,
    k: usize,
    i: i32,
    variant: Variant,
) -> Result<Vec<ClusterTriple>> {
    let mut y = x.to_vec();
    let mut out = Vec::new();
    while !y.is_empty() {
        let t = match variant {
            Variant::Standard => clan_create_cluster(g, &y, mu, h, k, i)?,
            Variant::Alt => clan_create_cluster_alt(g, &y, mu, h, k, i)?,
        };
        y = minus(&y, &t.inner);
        out.push(t);
    }
    Ok(out)
}

/// Constants realized by a clan embedding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClanParams {
    pub variant: Variant,
    pub k: usize,
    pub h: usize,
    /// Chief stretch.
    pub t: f64,
    pub beta: usize,
    pub hop_budget: usize,
    pub phi: i32,
    pub l_top: Option<usize>,
    pub omega: ExtReal,
    pub unit: f64,
    /// Path-distortion factor proven for `h`-respecting paths.
    pub path_bound: f64,
    /// Bound on `sum_v mu(v) |f(v)|`.
    pub size_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ClanStats {
    pub cluster_calls: usize,
    pub max_j: usize,
    pub ratio_misses: usize,
    pub dense_calls: usize,
    /// `sum_v mu(v) |f(v)|`.
    pub weighted_size: f64,
    pub copies: usize,
    #[serde(skip)]
    pub clusters: Vec<ScaledCluster>,
}

/// Ultrametric over vertex copies with clans and chiefs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClanEmbedding {
    pub ultrametric: Ultrametric,
    /// Leaf copies of each vertex, ascending.
    pub clans: Vec<Vec<NodeId>>,
    pub chief: Vec<NodeId>,
    pub params: ClanParams,
    pub stats: ClanStats,
}

impl ClanEmbedding {
    pub fn n(&self) -> usize {
        self.clans.len()
    }

    /// Vertex a leaf copy belongs to.
    pub fn owner(&self, copy: NodeId) -> Option<usize> {
        self.ultrametric.payload(copy)
    }

    /// Smallest distance between any copy of `u` and any copy of `v`.
    pub fn min_distance(&self, u: usize, v: usize) -> ExtReal {
        self.clans[u]
            .iter()
            .flat_map(|&a| self.clans[v].iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.ultrametric.leaf_distance(a, b))
            .min()
            .expect("clans are nonempty")
    }

    /// Smallest distance from the chief of `u` to a copy of `v`.
    pub fn chief_distance(&self, u: usize, v: usize) -> ExtReal {
        self.clans[v]
            .iter()
            .map(|&b| self.ultrametric.leaf_distance(self.chief[u], b))
            .min()
            .expect("clans are nonempty")
    }
}

/// Builds the clan embedding of `g` for the `(>= 1)`-measure `mu`.
pub fn clan_embed(
    g: &WeightedGraph,
    mu: &Measure,
    h: usize,
    k: usize,
    variant: Variant,
) -> Result<ClanEmbedding> {
    crate::ramsey::check_embed_args(g, mu, h, k)?;
    let total = mu.total();
    let l_top = ceil_loglog(total).max(1);
    let (t, path_factor) = match variant {
        Variant::Standard => (
            16.0 * (k + 1) as f64,
            2.0 * 8.0 * (k + 1) as f64 * total.log(1.5),
        ),
        Variant::Alt => (
            (8 * k * l_top) as f64,
            2.0 * (4 * k * l_top) as f64 * total.log2(),
        ),
    };
    let done = completion(g, h, crate::ramsey::completion_factor(t));
    let unit = done.graph.min_weight().unwrap_or(1.0);
    let scaled = done.graph.map_weights(|_, w| w / unit);
    let diam = hop_diameter(&scaled, h)
        .finite()
        .expect("completed graph is h-hop connected");
    let phi = top_scale(diam);
    let beta = match variant {
        Variant::Standard => 2 * (phi.max(0) as usize + 2) * 2 * (k + 1),
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
        stats: ClanStats::default(),
    };
    let all: Vec<usize> = (0..g.n()).collect();
    let (root, chiefs) = ctx.embed(&all, phi)?;
    let Ctx {
        builder, mut stats, ..
    } = ctx;
    let (built, remap) = builder.build_mapped(root);
    let ultrametric = built.saturate_labels(done.omega);
    let clans = ultrametric.leaves_by_payload(g.n());
    let mut chief = vec![NodeId(0); g.n()];
    for (v, c) in chiefs {
        chief[v] = NodeId(remap[c.0]);
    }
    stats.copies = clans.iter().map(Vec::len).sum();
    stats.weighted_size = clans
        .iter()
        .enumerate()
        .map(|(v, c)| mu.get(v) * c.len() as f64)
        .sum();
    Ok(ClanEmbedding {
        ultrametric,
        clans,
        chief,
        params: ClanParams {
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
            path_bound: path_factor,
            size_bound: total.powf(1.0 + 1.0 / k as f64),
        },
        stats,
    })
}

struct Ctx<'a> {
    g: &'a WeightedGraph,
    mu: &'a Measure,
    h: usize,
    k: usize,
    variant: Variant,
    unit: f64,
    builder: UltrametricBuilder,
    stats: ClanStats,
}

impl Ctx<'_> {
    /// Returns the subtree root and the chief of every vertex of `x` (builder ids).
    fn embed(&mut self, x: &[usize], i: i32) -> Result<(NodeId, Vec<(usize, NodeId)>)> {
        if let [v] = x {
            let id = self.builder.add_leaf(*v);
            return Ok((id, vec![(*v, id)]));
        }
        self.stats.clusters.push(ScaledCluster {
            scale: i,
            members: x.to_vec(),
        });
        let cover = clan_cover(self.g, x, self.mu, self.h, self.k, i, self.variant)?;
        for t in &cover {
            self.stats.cluster_calls += 1;
            self.stats.max_j = self.stats.max_j.max(t.j);
            self.stats.ratio_misses += usize::from(!t.ratio_met);
            self.stats.dense_calls += usize::from(t.dense);
        }
        if cover.len() == 1 {
            return self.embed(x, i - 1);
        }
        let mut kids = Vec::with_capacity(cover.len());
        let mut chief: Vec<Option<NodeId>> = vec![None; self.g.n()];
        for t in &cover {
            let (node, chiefs) = self.embed(&t.outer, i - 1)?;
            kids.push(node);
            for (v, c) in chiefs {
                if chief[v].is_none() && t.mid.binary_search(&v).is_ok() {
                    chief[v] = Some(c);
                }
            }
        }
        let root = self
            .builder
            .add_internal(ExtReal::Finite(pow2(i) * self.unit), &kids)?;
        let chiefs = x
            .iter()
            .map(|&v| (v, chief[v].expect("every vertex lies in some middle ball")))
            .collect();
        Ok((root, chiefs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::all_pairs_hop;

    fn check(g: &WeightedGraph, e: &ClanEmbedding) {
        let low = all_pairs_hop(g, e.params.hop_budget);
        let high = all_pairs_hop(g, e.params.h);
        assert!(e.ultrametric.validate());
        for v in 0..g.n() {
            assert!(e.clans[v].contains(&e.chief[v]));
        }
        for u in 0..g.n() {
            for v in 0..g.n() {
                assert!(low[u][v].le_tol(e.min_distance(u, v)), "domination {u} {v}");
                assert!(
                    e.chief_distance(u, v).le_tol(high[u][v] * e.params.t),
                    "chief {u} {v}"
                );
            }
        }
        assert!(e.stats.weighted_size <= e.params.size_bound * (1.0 + crate::EPS));
    }

    #[test]
    fn singleton() {
        let g = WeightedGraph::new(1, []).unwrap();
        let e = clan_embed(&g, &Measure::uniform(1), 1, 1, Variant::Standard).unwrap();
        assert_eq!(e.clans, vec![vec![NodeId(0)]]);
        assert_eq!(e.chief, vec![NodeId(0)]);
    }

    #[test]
    fn heavy_vertex_has_one_copy() {
        let g = WeightedGraph::new(6, (0..5).map(|v| (v, v + 1, 1.0 + v as f64))).unwrap();
        let mut m = vec![1.0; 6];
        m[2] = 10.0;
        let mu = Measure::new(m).unwrap();
        for variant in [Variant::Standard, Variant::Alt] {
            let e = clan_embed(&g, &mu, 2, 2, variant).unwrap();
            assert_eq!(e.clans[2].len(), 1);
            check(&g, &e);
        }
    }

    #[test]
    fn cover_structure_on_cycle() {
        let g = WeightedGraph::new(10, (0..10).map(|v| (v, (v + 1) % 10, 1.0))).unwrap();
        let all: Vec<usize> = (0..10).collect();
        let cover =
            clan_cover(&g, &all, &Measure::uniform(10), 1, 1, 2, Variant::Standard).unwrap();
        let mut inner = [0; 10];
        let mut outer = [0; 10];
        for t in &cover {
            t.inner.iter().for_each(|&v| inner[v] += 1);
            t.outer.iter().for_each(|&v| outer[v] += 1);
        }
        assert!(inner.iter().all(|&c| c == 1));
        assert!(outer.iter().all(|&c| c >= 1));
    }

    #[test]
    fn disconnected_pairs_saturate() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 2.0)]).unwrap();
        let e = clan_embed(&g, &Measure::uniform(4), 1, 1, Variant::Standard).unwrap();
        check(&g, &e);
        assert_eq!(e.min_distance(0, 3), ExtReal::Infinite);
    }
}
