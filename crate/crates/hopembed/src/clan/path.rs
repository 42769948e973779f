use super::ClanEmbedding;
use crate::ultrametric::NodeId;
use crate::{Error, ExtReal, Result};

/// Cheapest choice of one copy per path vertex, by dynamic programming over
/// the layered graph `f(v_0), ..., f(v_m)`.
///
/// Returns the witness copies and the total ultrametric length of consecutive pairs.
pub fn optimal_path_copies(emb: &ClanEmbedding, path: &[usize]) -> Result<(Vec<NodeId>, ExtReal)> {
    let Some(&first) = path.first() else {
        return Ok((Vec::new(), ExtReal::ZERO));
    };
    if let Some(&bad) = path.iter().find(|&&v| v >= emb.n()) {
        return Err(Error::InvalidVertex {
            vertex: bad,
            n: emb.n(),
        });
    }
    let u = &emb.ultrametric;
    let mut cost: Vec<ExtReal> = vec![ExtReal::ZERO; emb.clans[first].len()];
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(path.len());
    for w in path.windows(2) {
        let (prev, next) = (&emb.clans[w[0]], &emb.clans[w[1]]);
        let mut layer_cost = Vec::with_capacity(next.len());
        let mut layer_back = Vec::with_capacity(next.len());
        for &b in next {
            let (arg, best) = prev
                .iter()
                .enumerate()
                .map(|(ai, &a)| (ai, cost[ai] + u.leaf_distance(a, b)))
                .min_by(|x, y| x.1.cmp(&y.1))
                .expect("clans are nonempty");
            layer_cost.push(best);
            layer_back.push(arg);
        }
        cost = layer_cost;
        back.push(layer_back);
    }
    let (mut idx, total) = cost
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.cmp(&y.1))
        .expect("clans are nonempty");
    let mut picks = vec![idx];
    for layer in back.iter().rev() {
        idx = layer[idx];
        picks.push(idx);
    }
    picks.reverse();
    let copies = path
        .iter()
        .zip(picks)
        .map(|(&v, i)| emb.clans[v][i])
        .collect();
    Ok((copies, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clan::clan_embed;
    use crate::{Measure, Variant, WeightedGraph};

    #[test]
    fn empty_and_single() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let e = clan_embed(&g, &Measure::uniform(3), 2, 1, Variant::Standard).unwrap();
        assert_eq!(optimal_path_copies(&e, &[]).unwrap().1, ExtReal::ZERO);
        assert_eq!(optimal_path_copies(&e, &[1]).unwrap().1, ExtReal::ZERO);
    }

    /// Brute force over every copy assignment.
    #[test]
    fn matches_enumeration() {
        let g =
            WeightedGraph::new(7, (0..7).map(|v| (v, (v + 1) % 7, 1.0 + (v % 3) as f64))).unwrap();
        let e = clan_embed(&g, &Measure::uniform(7), 1, 1, Variant::Standard).unwrap();
        let path = [0, 1, 2, 3, 4];
        let (copies, cost) = optimal_path_copies(&e, &path).unwrap();
        let mut best = ExtReal::Infinite;
        let mut idx = vec![0usize; path.len()];
        loop {
            let choice: Vec<NodeId> = path
                .iter()
                .zip(&idx)
                .map(|(&v, &i)| e.clans[v][i])
                .collect();
            let c: ExtReal = choice
                .windows(2)
                .map(|w| e.ultrametric.leaf_distance(w[0], w[1]))
                .sum();
            best = best.min(c);
            let mut p = 0;
            while p < path.len() {
                idx[p] += 1;
                if idx[p] < e.clans[path[p]].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == path.len() {
                break;
            }
        }
        assert_eq!(cost, best);
        let again: ExtReal = copies
            .windows(2)
            .map(|w| e.ultrametric.leaf_distance(w[0], w[1]))
            .sum();
        assert_eq!(again, cost);
    }
}
