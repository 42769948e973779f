//! Hop-constrained distance oracle, distance labeling and compact routing.
//!
//! Every final structure has two layers. A coarse structure built from Ramsey
//! embeddings returns an estimate `A` with `d^(beta*h) <= A <= t * d^(h)`. The
//! estimate picks a scale `i`, and an ordinary Thorup–Zwick structure on the
//! auxiliary graph of that scale (every edge made heavier by `omega_i`) gives
//! the answer. The surcharge makes long-hop paths expensive, which converts the
//! hop constraint into a weight constraint.

mod coarse;
mod routing;
mod scales;
mod tree_label;
mod tz;

pub use coarse::{
    asymmetric_query, build_coarse_labeling, build_coarse_oracle, build_coarse_oracle_with,
    coarse_label_query, CoarseLabel, CoarseLabeling, CoarseOracle, ShortLabel, COARSE_ROUNDS,
};
pub use routing::{build_routing_scheme, Delivery, Header, NodeTable, RouteLabel, RoutingScheme};
pub use scales::{AuxiliaryGraph, ScaleConfig};
pub use tree_label::{build_tree_labels, tree_label_query, TreeLabel};
pub use tz::{
    thorup_zwick, tz_choose_tree, tz_query, ThorupZwick, TreeEntry, TzLabel, TzRouteLabel, TzTable,
};

use serde::Serialize;

use crate::graph_core::max_finite_hop_distance;
use crate::rng::{stream, Component};
use crate::{ExtReal, HopParams, Result, WeightedGraph};

/// Constants realized by a final structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalParams {
    pub h: usize,
    pub k: usize,
    pub epsilon: f64,
    pub scales: ScaleConfig,
    /// Stretch and hop factor of the coarse layer.
    pub t_coarse: f64,
    pub beta_hops: usize,
    /// Every answer is at least `d^(hop_factor * h)`.
    pub hop_factor: usize,
    /// Stretch of the inner structure on each auxiliary graph.
    pub inner_stretch: f64,
    /// Largest finite `h`-hop distance.
    pub d_max: Option<f64>,
}

impl FinalParams {
    fn new(
        g: &WeightedGraph,
        p: HopParams,
        t_coarse: f64,
        beta_hops: usize,
        inner_stretch: f64,
    ) -> Self {
        let d_max = max_finite_hop_distance(g, p.h);
        let base = g.min_weight().unwrap_or(1.0);
        let scales = ScaleConfig::new(base, p.h, t_coarse, p.epsilon, d_max);
        FinalParams {
            h: p.h,
            k: p.k,
            epsilon: p.epsilon,
            scales,
            t_coarse,
            beta_hops,
            hop_factor: scales.hop_factor(beta_hops),
            inner_stretch,
            d_max,
        }
    }

    /// Upper bound factor on `d^(h)`.
    pub fn stretch(&self) -> f64 {
        self.inner_stretch * (1.0 + self.epsilon)
    }

    /// Hop budget of the lower bound.
    pub fn hop_budget(&self) -> usize {
        self.hop_factor * self.h
    }
}

fn inner_structures(
    g: &WeightedGraph,
    params: &FinalParams,
    seed: u64,
) -> Result<Vec<ThorupZwick>> {
    (0..=params.scales.max_scale)
        .map(|i| {
            let aux = params.scales.auxiliary(g, i)?;
            Ok(thorup_zwick(
                &aux.graph,
                params.k,
                &mut stream(seed, Component::ThorupZwick, i as u64),
            ))
        })
        .collect()
}

/// Distance oracle answering within `[d^(B*h), (2k-1)(1+epsilon) d^(h)]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopOracle {
    pub params: FinalParams,
    pub coarse: CoarseOracle,
    pub inner: Vec<ThorupZwick>,
}

impl HopOracle {
    /// Infinity whenever the coarse estimate selects no scale.
    pub fn query(&self, u: usize, v: usize) -> Result<ExtReal> {
        if u == v {
            return Ok(ExtReal::ZERO);
        }
        let a = self.coarse.query(u, v)?;
        Ok(match self.params.scales.scale_of(a) {
            Some(i) => self.inner[i].query(u, v),
            None => ExtReal::Infinite,
        })
    }

    pub fn words(&self) -> usize {
        self.coarse.words()
            + self
                .inner
                .iter()
                .map(ThorupZwick::oracle_words)
                .sum::<usize>()
    }
}

pub fn build_hop_oracle(
    g: &WeightedGraph,
    h: usize,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<HopOracle> {
    let p = HopParams::new(h, k, epsilon)?;
    let coarse = build_coarse_oracle(g, h, k, seed)?;
    let params = FinalParams::new(g, p, coarse.t, coarse.beta, ThorupZwick::query_stretch(k));
    let inner = inner_structures(g, &params, seed)?;
    Ok(HopOracle {
        params,
        coarse,
        inner,
    })
}

/// Label of one vertex: its coarse label and its inner label at every scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopLabel {
    pub vertex: usize,
    pub coarse: CoarseLabel,
    pub inner: Vec<TzLabel>,
}

impl HopLabel {
    pub fn words(&self) -> usize {
        1 + self.coarse.short_words()
            + self.coarse.long_words()
            + self.inner.iter().map(TzLabel::words).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopLabeling {
    pub params: FinalParams,
    pub labels: Vec<HopLabel>,
    pub coarse_rounds: usize,
}

impl HopLabeling {
    pub fn query(&self, u: usize, v: usize) -> Result<ExtReal> {
        labeling_query(&self.params, &self.labels[u], &self.labels[v])
    }

    pub fn max_words(&self) -> usize {
        self.labels.iter().map(HopLabel::words).max().unwrap_or(0)
    }
}

/// Answer from two labels and the public scale parameters alone.
pub fn labeling_query(params: &FinalParams, a: &HopLabel, b: &HopLabel) -> Result<ExtReal> {
    if a.vertex == b.vertex {
        return Ok(ExtReal::ZERO);
    }
    let est = coarse_label_query(&a.coarse, &b.coarse)?;
    Ok(match params.scales.scale_of(est) {
        Some(i) => tz_query(&a.inner[i], &b.inner[i]),
        None => ExtReal::Infinite,
    })
}

pub fn build_hop_labeling(
    g: &WeightedGraph,
    h: usize,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<HopLabeling> {
    let p = HopParams::new(h, k, epsilon)?;
    let coarse = build_coarse_labeling(g, h, k)?;
    let params = FinalParams::new(g, p, coarse.t, coarse.beta, ThorupZwick::query_stretch(k));
    let inner = inner_structures(g, &params, seed)?;
    let labels = coarse
        .labels
        .into_iter()
        .enumerate()
        .map(|(v, c)| HopLabel {
            vertex: v,
            coarse: c,
            inner: inner.iter().map(|tz| tz.labels[v].clone()).collect(),
        })
        .collect();
    Ok(HopLabeling {
        params,
        labels,
        coarse_rounds: coarse.rounds,
    })
}
