use serde::Serialize;

use super::cluster::{create_cluster, create_cluster_alt, ClusterTriple};
use crate::scale::{intersect, minus};
use crate::{Measure, Result, Variant, WeightedGraph};

/// One block of a padded partition together with the marked vertices it keeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Part {
    pub cluster: Vec<usize>,
    pub marked: Vec<usize>,
}

/// Blocks in creation order and the triples that produced the non-singleton ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub parts: Vec<Part>,
    pub triples: Vec<ClusterTriple>,
}

/// Carves clusters out of `x` until no marked vertex is left, then splits the
/// remainder into unmarked singletons.
///
/// Each step takes the middle ball of a [`ClusterTriple`] as the cluster, keeps
/// the marked vertices of the inner ball, and unmarks everything in the outer ball.
#[allow(clippy::too_many_arguments)]
pub fn padded_partition(
    g: &WeightedGraph,
    x: &[usize],
    mu: &Measure,
    marked: &[usize],
    h: usize,
    k: usize,
    i: i32,
    variant: Variant,
) -> Result<Partition> {
    let mut y = x.to_vec();
    let mut live = intersect(marked, x);
    let mut parts = Vec::new();
    let mut triples = Vec::new();
    while !live.is_empty() {
        let t = match variant {
            Variant::Standard => create_cluster(g, &y, &live, mu, h, k, i)?,
            Variant::Alt => create_cluster_alt(g, &y, &live, mu, h, k, i)?,
        };
        parts.push(Part {
            cluster: t.mid.clone(),
            marked: intersect(&live, &t.inner),
        });
        y = minus(&y, &t.mid);
        live = minus(&live, &t.outer);
        triples.push(t);
    }
    parts.extend(y.into_iter().map(|v| Part {
        cluster: vec![v],
        marked: Vec::new(),
    }));
    Ok(Partition { parts, triples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gnp(n: usize, bits: &[bool], weights: &[u8]) -> WeightedGraph {
        let mut edges = Vec::new();
        let mut c = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits[c] {
                    edges.push((u, v, 1.0 + weights[c] as f64 % 5.0));
                }
                c += 1;
            }
        }
        WeightedGraph::new(n, edges).unwrap()
    }

    #[test]
    fn no_marks_gives_singletons() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let p = padded_partition(
            &g,
            &[0, 1, 2],
            &Measure::uniform(3),
            &[],
            1,
            1,
            2,
            Variant::Standard,
        )
        .unwrap();
        assert_eq!(p.parts.len(), 3);
        assert!(p
            .parts
            .iter()
            .all(|q| q.cluster.len() == 1 && q.marked.is_empty()));
    }

    #[test]
    fn large_scale_gives_one_block() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let all = [0, 1, 2];
        let p = padded_partition(
            &g,
            &all,
            &Measure::uniform(3),
            &all,
            2,
            1,
            5,
            Variant::Standard,
        )
        .unwrap();
        assert_eq!(
            p.parts,
            vec![Part {
                cluster: all.to_vec(),
                marked: all.to_vec()
            }]
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn blocks_partition_and_marks_nest(
            bits in proptest::collection::vec(proptest::bool::weighted(0.3), 190),
            weights in proptest::collection::vec(any::<u8>(), 190),
            k in 1usize..3,
            i in 0i32..5,
            alt in any::<bool>(),
        ) {
            let n = 20;
            let g = gnp(n, &bits, &weights);
            let all: Vec<usize> = (0..n).collect();
            let variant = if alt { Variant::Alt } else { Variant::Standard };
            let p = padded_partition(&g, &all, &Measure::uniform(n), &all, 1, k, i, variant).unwrap();
            let mut seen = vec![0; n];
            for part in &p.parts {
                for &v in &part.cluster {
                    seen[v] += 1;
                }
                prop_assert!(part.marked.iter().all(|m| part.cluster.binary_search(m).is_ok()));
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
            for t in &p.triples {
                prop_assert!(t.inner.iter().all(|v| t.mid.binary_search(v).is_ok()));
                prop_assert!(t.mid.iter().all(|v| t.outer.binary_search(v).is_ok()));
                if variant == Variant::Standard {
                    prop_assert!(t.j <= 2 * (k - 1));
                } else if let (Some(a), Some(l)) = (t.a, t.l) {
                    prop_assert!(a < l - 1 && t.j <= 2 * (k - 1));
                }
            }
        }
    }
}
