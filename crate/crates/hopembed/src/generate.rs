//! Seeded graph generators.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{stream, Component};
use crate::{Error, Result, WeightedGraph};

/// A graph family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GraphSpec {
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Grid {
        rows: usize,
        cols: usize,
    },
    /// `G(n, p)` with unit weights.
    Gnp {
        n: usize,
        p: f64,
    },
    /// A random spanning tree plus `G(n, p)` edges, with integer weights drawn
    /// uniformly from `1..=max_weight`.
    RandomWeighted {
        n: usize,
        p: f64,
        max_weight: u64,
    },
}

/// Generates the graph described by `spec`; weights are normalized so the
/// lightest edge weighs 1.
pub fn gen_graph(spec: &GraphSpec, seed: u64) -> Result<WeightedGraph> {
    let mut rng = stream(seed, Component::Generator, 0);
    let g = match *spec {
        GraphSpec::Path { n } => WeightedGraph::new(positive(n)?, (1..n).map(|v| (v - 1, v, 1.0)))?,
        GraphSpec::Cycle { n } => {
            if n < 3 {
                return Err(Error::InvalidParameter(format!(
                    "a cycle needs 3 vertices, got {n}"
                )));
            }
            WeightedGraph::new(n, (0..n).map(|v| (v, (v + 1) % n, 1.0)))?
        }
        GraphSpec::Grid { rows, cols } => {
            let n = positive(rows)? * positive(cols)?;
            let id = |r: usize, c: usize| r * cols + c;
            let right =
                (0..rows).flat_map(|r| (1..cols).map(move |c| (id(r, c - 1), id(r, c), 1.0)));
            let down =
                (1..rows).flat_map(|r| (0..cols).map(move |c| (id(r - 1, c), id(r, c), 1.0)));
            WeightedGraph::new(n, right.chain(down))?
        }
        GraphSpec::Gnp { n, p } => {
            check_p(p)?;
            let edges = pairs(positive(n)?)
                .filter(|_| rng.gen::<f64>() < p)
                .map(|(a, b)| (a, b, 1.0));
            WeightedGraph::new(n, edges.collect::<Vec<_>>())?
        }
        GraphSpec::RandomWeighted { n, p, max_weight } => {
            check_p(p)?;
            if max_weight == 0 {
                return Err(Error::InvalidParameter(
                    "max_weight must be positive".into(),
                ));
            }
            let mut order: Vec<usize> = (0..positive(n)?).collect();
            order.shuffle(&mut rng);
            let mut edges: Vec<(usize, usize)> = (1..n)
                .map(|i| (order[rng.gen_range(0..i)], order[i]))
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            edges.sort_unstable();
            let tree = edges.clone();
            for (a, b) in pairs(n) {
                if rng.gen::<f64>() < p && tree.binary_search(&(a, b)).is_err() {
                    edges.push((a, b));
                }
            }
            let weighted: Vec<_> = edges
                .into_iter()
                .map(|(a, b)| (a, b, rng.gen_range(1..=max_weight) as f64))
                .collect();
            WeightedGraph::new(n, weighted)?
        }
    };
    Ok(g.normalized())
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

fn positive(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "graphs need at least one vertex".into(),
        ));
    }
    Ok(n)
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "edge probability {p} outside [0, 1]"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_four() {
        let g = gen_graph(&GraphSpec::Path { n: 4 }, 0).unwrap();
        assert_eq!(
            g,
            WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap()
        );
    }

    #[test]
    fn grid_edge_count() {
        // 4 rows of 3 horizontal edges plus 3 rows of 4 vertical edges.
        let g = gen_graph(&GraphSpec::Grid { rows: 4, cols: 4 }, 0).unwrap();
        assert_eq!(g.edge_count(), 24);
    }

    #[test]
    fn seeded_families_repeat() {
        let specs = [
            GraphSpec::Gnp { n: 32, p: 0.2 },
            GraphSpec::RandomWeighted {
                n: 20,
                p: 0.1,
                max_weight: 1_000_000,
            },
        ];
        for s in &specs {
            assert_eq!(gen_graph(s, 7).unwrap(), gen_graph(s, 7).unwrap());
        }
        assert_ne!(
            gen_graph(&specs[0], 7).unwrap(),
            gen_graph(&specs[0], 8).unwrap()
        );
    }

    #[test]
    fn random_weighted_is_connected_and_normalized() {
        let g = gen_graph(
            &GraphSpec::RandomWeighted {
                n: 30,
                p: 0.05,
                max_weight: 50,
            },
            3,
        )
        .unwrap();
        assert_eq!(g.min_weight(), Some(1.0));
        let d = crate::graph_core::shortest_distances(&g, 0);
        assert!(d.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn bad_parameters() {
        assert!(gen_graph(&GraphSpec::Cycle { n: 2 }, 0).is_err());
        assert!(gen_graph(&GraphSpec::Gnp { n: 5, p: 1.5 }, 0).is_err());
        assert!(gen_graph(&GraphSpec::Path { n: 0 }, 0).is_err());
    }
}
