//! Randomized sparse covers by ball growing with geometric radii.

use rand::Rng;
use serde::Serialize;

use crate::graph_core::dijkstra_within;
use crate::rng::{stream, Component};
use crate::{Error, ExtReal, Result, WeightedGraph};

/// One ball of the cover.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverCluster {
    pub members: Vec<usize>,
    pub center: usize,
    /// Radius in units of `delta`.
    pub radius: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseCover {
    pub clusters: Vec<CoverCluster>,
    pub delta: f64,
    /// Every radius is at most `log2(2n)` (always true of a returned cover).
    pub psi: bool,
    /// Number of full restarts needed before all radii were small enough.
    pub attempts: usize,
}

impl SparseCover {
    /// Number of clusters containing each vertex.
    pub fn multiplicity(&self, n: usize) -> Vec<usize> {
        let mut m = vec![0; n];
        for c in &self.clusters {
            for &v in &c.members {
                m[v] += 1;
            }
        }
        m
    }

    /// `sum_i cost(G[C_i])` for the per-edge costs `cost` (aligned with `g.edges()`).
    pub fn total_cost(&self, g: &WeightedGraph, cost: &[f64]) -> f64 {
        let mut inside = vec![false; g.n()];
        self.clusters
            .iter()
            .map(|c| {
                c.members.iter().for_each(|&v| inside[v] = true);
                let s = g
                    .edges()
                    .iter()
                    .zip(cost)
                    .filter(|(e, _)| inside[e.u] && inside[e.v])
                    .map(|(_, &w)| w)
                    .sum::<f64>();
                c.members.iter().for_each(|&v| inside[v] = false);
                s
            })
            .sum()
    }
}

/// Largest radius (in units of `delta`) a returned cover may use.
pub fn radius_cap(n: usize) -> f64 {
    (2.0 * n as f64).log2()
}

/// Draws `i >= 1` with probability `2^-i` by inverting the CDF.
fn geometric<R: Rng>(rng: &mut R) -> u32 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    (-u.log2()).ceil().max(1.0) as u32
}

/// Sparse cover of `g` at scale `delta`.
///
/// Repeatedly picks the smallest unclustered vertex, draws a geometric radius,
/// takes the ball of that radius (times `delta`) in the graph induced by the
/// unclustered vertices, and removes the ball of radius one less. The whole
/// process restarts on a fresh stream whenever a radius exceeds `log2(2n)`.
/// `cost` only needs to be aligned with the edges; it does not affect the clusters.
pub fn sparse_cover(g: &WeightedGraph, cost: &[f64], delta: f64, seed: u64) -> Result<SparseCover> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if cost.len() != g.edge_count() {
        return Err(Error::InvalidParameter(
            "one cost per edge is required".into(),
        ));
    }
    let n = g.n();
    let cap = radius_cap(n);
    for attempt in 0.. {
        let mut rng = stream(seed, Component::SparseCover, attempt);
        if let Some(clusters) = grow(g, delta, cap, &mut rng) {
            return Ok(SparseCover {
                clusters,
                delta,
                psi: true,
                attempts: attempt as usize + 1,
            });
        }
    }
    unreachable!("the attempt loop only exits by returning")
}

fn grow<R: Rng>(g: &WeightedGraph, delta: f64, cap: f64, rng: &mut R) -> Option<Vec<CoverCluster>> {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut left = n;
    let mut clusters = Vec::new();
    while left > 0 {
        let center = alive.iter().position(|&a| a).expect("some vertex is alive");
        let radius = geometric(rng);
        if radius as f64 > cap {
            return None;
        }
        let dist = dijkstra_within(g, center, Some(&alive));
        let inside = |r: f64| {
            (0..n)
                .filter(|&v| alive[v] && dist[v].le_tol(ExtReal::Finite(r * delta)))
                .collect::<Vec<_>>()
        };
        let members = inside(radius as f64);
        for v in inside(radius as f64 - 1.0) {
            alive[v] = false;
            left -= 1;
        }
        clusters.push(CoverCluster {
            members,
            center,
            radius,
        });
    }
    Some(clusters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::shortest_distances;
    use rand::SeedableRng;

    #[test]
    fn single_vertex() {
        let g = WeightedGraph::new(1, []).unwrap();
        let c = sparse_cover(&g, &[], 1.0, 3).unwrap();
        assert_eq!(c.clusters.len(), 1);
        assert_eq!(c.clusters[0].members, vec![0]);
        assert_eq!(c.total_cost(&g, &[]), 0.0);
    }

    #[test]
    fn geometric_frequencies() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut counts = [0usize; 4];
        let trials = 40_000;
        for _ in 0..trials {
            let r = geometric(&mut rng) as usize;
            if r <= 3 {
                counts[r] += 1;
            }
        }
        assert_eq!(counts[0], 0);
        for (i, &c) in counts.iter().enumerate().skip(1) {
            let p = c as f64 / trials as f64;
            assert!((p - 0.5f64.powi(i as i32)).abs() < 0.01, "P[r = {i}] = {p}");
        }
    }

    /// Replays the documented process on P8 with the same stream.
    #[test]
    fn path_replay_and_cover() {
        let g = WeightedGraph::new(8, (0..7).map(|v| (v, v + 1, 1.0))).unwrap();
        let cost = vec![1.0; 7];
        let c = sparse_cover(&g, &cost, 1.0, 11).unwrap();
        let mut rng = stream(11, Component::SparseCover, c.attempts as u64 - 1);
        let mut lo = 0usize;
        for cl in &c.clusters {
            assert_eq!(cl.center, lo);
            let r = geometric(&mut rng) as usize;
            assert_eq!(cl.radius as usize, r);
            assert_eq!(cl.members, (lo..(lo + r + 1).min(8)).collect::<Vec<_>>());
            lo = (lo + r).min(8);
        }
        for v in 0..7 {
            assert!(c
                .clusters
                .iter()
                .any(|cl| cl.members.contains(&v) && cl.members.contains(&(v + 1))));
        }
    }

    #[test]
    fn cover_and_radius_on_cycle() {
        let g = WeightedGraph::new(12, (0..12).map(|v| (v, (v + 1) % 12, 1.0 + (v % 2) as f64)))
            .unwrap();
        let cost = vec![1.0; 12];
        for seed in 0..20 {
            let c = sparse_cover(&g, &cost, 2.0, seed).unwrap();
            let cap = radius_cap(12) * 2.0;
            for cl in &c.clusters {
                let mut mask = vec![false; 12];
                cl.members.iter().for_each(|&v| mask[v] = true);
                let d = dijkstra_within(&g, cl.center, Some(&mask));
                assert!(cl
                    .members
                    .iter()
                    .all(|&v| d[v].le_tol(ExtReal::Finite(cap))));
            }
            for u in 0..12 {
                let d = shortest_distances(&g, u);
                for v in 0..12 {
                    if d[v].le_tol(ExtReal::Finite(2.0)) {
                        assert!(c
                            .clusters
                            .iter()
                            .any(|cl| cl.members.contains(&u) && cl.members.contains(&v)));
                    }
                }
            }
        }
    }
}
