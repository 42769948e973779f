//! Coarse hop-distance estimates from Ramsey embeddings.

use serde::Serialize;

use super::tree_label::{build_tree_labels, tree_label_query, TreeLabel};
use crate::ramsey::{ramsey_distribution_with, ramsey_embed, RamseyEmbedding, RamseyMode};
use crate::rng::{stream, Component};
use crate::scale::minus;
use crate::{Error, ExtReal, Measure, Result, Variant, WeightedGraph};

use rand::Rng;

/// Short half of a coarse label: the vertex's position in its home tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShortLabel {
    pub home: u32,
    pub label: TreeLabel,
}

/// Both halves of a vertex's coarse label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseLabel {
    pub short: ShortLabel,
    /// Position in every tree, indexed by tree id.
    pub long: Vec<TreeLabel>,
}

impl CoarseLabel {
    pub fn short_words(&self) -> usize {
        1 + self.short.label.words()
    }

    pub fn long_words(&self) -> usize {
        self.long.iter().map(TreeLabel::words).sum()
    }
}

/// `d_U(u, v)` in the home tree of `v`, from the long label of `u` and the short label of `v`.
pub fn asymmetric_query(long_of_u: &[TreeLabel], short_of_v: &ShortLabel) -> Result<ExtReal> {
    let tree = long_of_u
        .get(short_of_v.home as usize)
        .ok_or(Error::LabelMismatch(
            short_of_v.home,
            long_of_u.len() as u32,
        ))?;
    tree_label_query(tree, &short_of_v.label)
}

/// Smaller of the two asymmetric estimates.
pub fn coarse_label_query(a: &CoarseLabel, b: &CoarseLabel) -> Result<ExtReal> {
    Ok(asymmetric_query(&a.long, &b.short)?.min(asymmetric_query(&b.long, &a.short)?))
}

/// Asymmetric labels from repeated alternative-rule Ramsey embeddings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseLabeling {
    pub labels: Vec<CoarseLabel>,
    pub rounds: usize,
    /// Realized stretch: `coarse <= t * d^(h)`.
    pub t: f64,
    /// Realized hop factor: `coarse >= d^(beta*h)`.
    pub beta: usize,
}

impl CoarseLabeling {
    pub fn query(&self, u: usize, v: usize) -> Result<ExtReal> {
        coarse_label_query(&self.labels[u], &self.labels[v])
    }
}

/// Embeds with the alternative rule and uniform measure, marking the vertices
/// not yet homed, until every vertex has a home.
pub fn build_coarse_labeling(g: &WeightedGraph, h: usize, k: usize) -> Result<CoarseLabeling> {
    let n = g.n();
    let mu = Measure::uniform(n);
    let mut left: Vec<usize> = (0..n).collect();
    let mut home = vec![0u32; n];
    let mut trees: Vec<Vec<TreeLabel>> = Vec::new();
    let (mut t, mut beta) = (0.0f64, 0usize);
    while !left.is_empty() {
        let e = ramsey_embed(g, &mu, &left, h, k, Variant::Alt)?;
        if e.marked.is_empty() {
            return Err(Error::InvalidParameter("embedding marked no vertex".into()));
        }
        let id = trees.len() as u32;
        for &v in &e.marked {
            home[v] = id;
        }
        left = minus(&left, &e.marked);
        t = t.max(e.params.t);
        beta = beta.max(e.params.beta);
        trees.push(build_tree_labels(&e.ultrametric, id, &e.leaf_of));
    }
    let labels = (0..n)
        .map(|v| CoarseLabel {
            short: ShortLabel {
                home: home[v],
                label: trees[home[v] as usize][v].clone(),
            },
            long: trees.iter().map(|tr| tr[v].clone()).collect(),
        })
        .collect();
    Ok(CoarseLabeling {
        labels,
        rounds: trees.len(),
        t,
        beta,
    })
}

/// Rounds of the multiplicative-weights distribution sampled by the coarse oracle.
pub const COARSE_ROUNDS: usize = 16;
/// Sampling restarts allowed before the smallest oracle seen is kept.
const MAX_ATTEMPTS: u64 = 16;

/// Oracle storing each vertex's tree labels up to its home tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseOracle {
    /// `labels[v][i]`: position of `v` in tree `i`, for `i <= home(v)`.
    pub labels: Vec<Vec<TreeLabel>>,
    pub homes: Vec<u32>,
    /// Trees drawn from the distribution.
    pub samples: usize,
    /// Deterministic trees appended for vertices the distribution never marks.
    pub topped_up: usize,
    pub attempts: usize,
    /// Stored labels, and the expectation the restart rule compares against.
    pub size: usize,
    pub expected_size: f64,
    pub t: f64,
    pub beta: usize,
}

impl CoarseOracle {
    pub fn query(&self, u: usize, v: usize) -> Result<ExtReal> {
        let i = self.homes[u].min(self.homes[v]) as usize;
        tree_label_query(&self.labels[u][i], &self.labels[v][i])
    }

    pub fn words(&self) -> usize {
        self.labels
            .iter()
            .flatten()
            .map(TreeLabel::words)
            .sum::<usize>()
            + self.homes.len()
    }
}

/// Samples embeddings from the alternative-rule distribution until every vertex
/// is marked somewhere; `home(v)` is the first such sample.
///
/// Vertices that no embedding of the distribution marks are homed in extra
/// deterministic embeddings. When the stored label count exceeds four times its
/// expectation, sampling restarts on a fresh stream.
pub fn build_coarse_oracle(
    g: &WeightedGraph,
    h: usize,
    k: usize,
    seed: u64,
) -> Result<CoarseOracle> {
    build_coarse_oracle_with(g, h, k, seed, COARSE_ROUNDS)
}

pub fn build_coarse_oracle_with(
    g: &WeightedGraph,
    h: usize,
    k: usize,
    seed: u64,
    rounds: usize,
) -> Result<CoarseOracle> {
    let n = g.n();
    let dist = ramsey_distribution_with(g, h, RamseyMode::FixedK(k), rounds, Variant::Alt)?;
    let freq = dist.inclusion_frequency(n);
    let coverable: Vec<usize> = (0..n).filter(|&v| freq[v] > 0.0).collect();
    let leftover = minus(&(0..n).collect::<Vec<_>>(), &coverable);
    let extra = top_up(g, h, k, &leftover)?;
    let expected_size = freq
        .iter()
        .map(|&p| {
            if p > 0.0 {
                1.0 / p
            } else {
                (dist.embeddings.len() + extra.len()) as f64
            }
        })
        .sum::<f64>();

    let mut best: Option<(Vec<usize>, usize, u64)> = None;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream(seed, Component::OracleHomes, attempt);
        let picks = sample_until_covered(&dist.embeddings, &coverable, n, &mut rng);
        let size = stored_labels(&picks, &dist.embeddings, &extra, n);
        if best.as_ref().is_none_or(|b| size < b.1) {
            best = Some((picks, size, attempt));
        }
        if size as f64 <= 4.0 * expected_size {
            break;
        }
    }
    let (picks, size, attempt) = best.expect("at least one attempt");
    let trees: Vec<&RamseyEmbedding> = picks
        .iter()
        .map(|&i| &dist.embeddings[i])
        .chain(extra.iter())
        .collect();
    let homes = homes_of(&trees, n);
    let labels = (0..n)
        .map(|v| {
            trees[..=homes[v] as usize]
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    build_tree_labels(&e.ultrametric, i as u32, &[e.leaf_of[v]]).remove(0)
                })
                .collect()
        })
        .collect();
    Ok(CoarseOracle {
        labels,
        homes,
        samples: picks.len(),
        topped_up: extra.len(),
        attempts: attempt as usize + 1,
        size,
        expected_size,
        t: trees.iter().map(|e| e.params.t).fold(0.0, f64::max),
        beta: trees.iter().map(|e| e.params.beta).max().unwrap_or(0),
    })
}

fn top_up(
    g: &WeightedGraph,
    h: usize,
    k: usize,
    leftover: &[usize],
) -> Result<Vec<RamseyEmbedding>> {
    let mu = Measure::uniform(g.n());
    let mut left = leftover.to_vec();
    let mut out = Vec::new();
    while !left.is_empty() {
        let e = ramsey_embed(g, &mu, &left, h, k, Variant::Alt)?;
        left = minus(&left, &e.marked);
        out.push(e);
    }
    Ok(out)
}

fn sample_until_covered<R: Rng>(
    support: &[RamseyEmbedding],
    coverable: &[usize],
    n: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut covered = vec![false; n];
    let mut missing = coverable.len();
    let mut picks = Vec::new();
    while missing > 0 {
        let i = rng.gen_range(0..support.len());
        for &v in &support[i].marked {
            if !covered[v] {
                covered[v] = true;
                missing -= 1;
            }
        }
        picks.push(i);
    }
    picks
}

fn homes_of(trees: &[&RamseyEmbedding], n: usize) -> Vec<u32> {
    let mut home = vec![u32::MAX; n];
    for (i, e) in trees.iter().enumerate() {
        for &v in &e.marked {
            if home[v] == u32::MAX {
                home[v] = i as u32;
            }
        }
    }
    home
}

fn stored_labels(
    picks: &[usize],
    support: &[RamseyEmbedding],
    extra: &[RamseyEmbedding],
    n: usize,
) -> usize {
    let trees: Vec<&RamseyEmbedding> = picks
        .iter()
        .map(|&i| &support[i])
        .chain(extra.iter())
        .collect();
    homes_of(&trees, n).iter().map(|&h| h as usize + 1).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::all_pairs_hop;

    fn sandwich(
        g: &WeightedGraph,
        h: usize,
        t: f64,
        beta: usize,
        q: impl Fn(usize, usize) -> ExtReal,
    ) {
        let lo = all_pairs_hop(g, beta * h);
        let hi = all_pairs_hop(g, h);
        for u in 0..g.n() {
            for v in 0..g.n() {
                let a = q(u, v);
                assert!(lo[u][v].le_tol(a), "lower bound fails at ({u}, {v})");
                if hi[u][v].is_finite() {
                    assert!(a.le_tol(hi[u][v] * t), "upper bound fails at ({u}, {v})");
                }
            }
        }
    }

    #[test]
    fn single_vertex() {
        let g = WeightedGraph::new(1, []).unwrap();
        let l = build_coarse_labeling(&g, 1, 1).unwrap();
        assert_eq!(l.rounds, 1);
        assert_eq!(l.query(0, 0).unwrap(), ExtReal::ZERO);
        let o = build_coarse_oracle(&g, 1, 1, 5).unwrap();
        assert_eq!(o.query(0, 0).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn path_labeling_sandwich() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 3.0), (2, 3, 1.0)]).unwrap();
        let l = build_coarse_labeling(&g, 3, 1).unwrap();
        assert!(l.labels.iter().all(|x| (x.short.home as usize) < l.rounds));
        sandwich(&g, 3, l.t, l.beta, |u, v| l.query(u, v).unwrap());
    }

    #[test]
    fn cycle_oracle_sandwich() {
        let g = WeightedGraph::new(10, (0..10).map(|v| (v, (v + 1) % 10, 1.0 + (v % 4) as f64)))
            .unwrap();
        let o = build_coarse_oracle(&g, 2, 2, 9).unwrap();
        assert_eq!(
            o.size,
            o.homes.iter().map(|&h| h as usize + 1).sum::<usize>()
        );
        sandwich(&g, 2, o.t, o.beta, |u, v| o.query(u, v).unwrap());
        assert_eq!(o, build_coarse_oracle(&g, 2, 2, 9).unwrap());
    }
}
