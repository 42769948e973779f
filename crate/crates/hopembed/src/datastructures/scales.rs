use serde::Serialize;

use crate::{Error, ExtReal, Result, WeightedGraph};

/// Geometry of the scale hierarchy shared by the final structures.
///
/// Scale `i` covers coarse estimates in `[base * 2^i, base * 2^(i+1))`, and its
/// auxiliary graph adds `omega_i = epsilon * base * 2^i / (stretch * h)` to every
/// edge, where `stretch` is the coarse structure's stretch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleConfig {
    pub base: f64,
    pub h: usize,
    pub stretch: f64,
    pub epsilon: f64,
    pub max_scale: usize,
}

impl ScaleConfig {
    /// Range large enough for every estimate `<= stretch * d_max`.
    pub fn new(base: f64, h: usize, stretch: f64, epsilon: f64, d_max: Option<f64>) -> Self {
        let max_scale = d_max.map_or(0, |d| (stretch * d / base).log2().ceil().max(0.0) as usize);
        ScaleConfig {
            base,
            h,
            stretch,
            epsilon,
            max_scale,
        }
    }

    pub fn omega(&self, i: usize) -> f64 {
        self.epsilon * self.base * 2f64.powi(i as i32) / (self.stretch * self.h as f64)
    }

    /// Unique scale of a positive finite estimate; `None` for 0, infinity, or
    /// estimates beyond the range (no `h`-hop connected pair has one).
    pub fn scale_of(&self, estimate: ExtReal) -> Option<usize> {
        let a = estimate.finite().filter(|&a| a > 0.0)?;
        let i = (a / self.base).log2().floor().max(0.0) as usize;
        (i <= self.max_scale).then_some(i)
    }

    /// Hop budget `B` with `d^(B*h) <=` every answer; needs `B >= 2 * stretch / epsilon`
    /// and `B >= beta`.
    pub fn hop_factor(&self, beta: usize) -> usize {
        ((2.0 * self.stretch / self.epsilon).ceil() as usize).max(beta)
    }

    pub fn auxiliary(&self, g: &WeightedGraph, i: usize) -> Result<AuxiliaryGraph> {
        if i > self.max_scale {
            return Err(Error::ScaleOutOfRange {
                scale: i as i32,
                max: self.max_scale as i32,
            });
        }
        let omega = self.omega(i);
        Ok(AuxiliaryGraph {
            scale: i,
            omega,
            graph: g.map_weights(|_, w| w + omega),
        })
    }
}

/// The base graph with every weight increased by `omega`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuxiliaryGraph {
    pub scale: usize,
    pub omega: f64,
    pub graph: WeightedGraph,
}

impl AuxiliaryGraph {
    /// Any path of auxiliary weight `x` has at most `x / omega` hops.
    pub fn hop_bound(&self, weight: f64) -> f64 {
        weight / self.omega
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::{all_pairs_hop, shortest_distances};

    #[test]
    fn unit_path_weights() {
        let g = WeightedGraph::new(4, (0..3).map(|v| (v, v + 1, 1.0))).unwrap();
        let cfg = ScaleConfig::new(1.0, 3, 8.0, 0.5, Some(3.0));
        assert_eq!(cfg.max_scale, 5);
        let a = cfg.auxiliary(&g, 0).unwrap();
        // 0.5 / (8 * 3)
        assert!(a.graph.edges().iter().all(|e| e.w == 1.0 + 0.5 / 24.0));
        assert!(cfg.auxiliary(&g, 6).is_err());
        assert_eq!(cfg.scale_of(ExtReal::Finite(5.0)), Some(2));
        assert_eq!(cfg.scale_of(ExtReal::Finite(0.999_999_999)), Some(0));
        assert_eq!(cfg.scale_of(ExtReal::Finite(64.0)), None);
        assert_eq!(cfg.scale_of(ExtReal::ZERO), None);
    }

    /// The upper and lower sandwich of every scale, for estimates anywhere in
    /// `[d^(beta h), t d^(h)]` that select it.
    #[test]
    fn per_scale_sandwich() {
        let g = WeightedGraph::new(
            7,
            (0..7)
                .map(|v| (v, (v + 1) % 7, 1.0 + v as f64))
                .chain([(0, 3, 9.0)]),
        )
        .unwrap();
        let (h, t, beta, eps) = (2, 6.0, 3, 0.5);
        let hi = all_pairs_hop(&g, h);
        let cfg = ScaleConfig::new(
            1.0,
            h,
            t,
            eps,
            crate::graph_core::max_finite_hop_distance(&g, h),
        );
        let b = cfg.hop_factor(beta);
        let lo = all_pairs_hop(&g, b * h);
        let lo_beta = all_pairs_hop(&g, beta * h);
        for i in 0..=cfg.max_scale {
            let aux = cfg.auxiliary(&g, i).unwrap();
            for u in 0..7 {
                let d = shortest_distances(&aux.graph, u);
                for v in 0..7 {
                    let (Some(dh), Some(db)) = (hi[u][v].finite(), lo_beta[u][v].finite()) else {
                        continue;
                    };
                    let (a_lo, a_hi) = (db, t * dh);
                    let lo_s = 2f64.powi(i as i32);
                    if u == v || a_hi < lo_s || a_lo >= 2.0 * lo_s {
                        continue;
                    }
                    assert!(d[v].le_tol(ExtReal::Finite((1.0 + eps) * dh)));
                    assert!(lo[u][v].le_tol(d[v]));
                }
            }
        }
    }
}
