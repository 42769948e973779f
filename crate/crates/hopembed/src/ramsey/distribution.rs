use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ramsey_embed, RamseyEmbedding};
use crate::{Error, Measure, Result, Variant, WeightedGraph};

/// Target of the multiplicative-weights builder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RamseyMode {
    /// Every vertex survives with probability about `n^(-1/k)`.
    FixedK(usize),
    /// Every vertex survives with probability about `1 - epsilon`.
    Inclusion(f64),
}

/// Uniform distribution over the embeddings produced by the rounds.
#[derive(Debug, Clone, Serialize)]
pub struct RamseyDistribution {
    pub embeddings: Vec<RamseyEmbedding>,
    /// Parameter passed to each embedding.
    pub k_embed: usize,
    pub eta: f64,
}

impl RamseyDistribution {
    pub fn weight(&self) -> f64 {
        1.0 / self.embeddings.len() as f64
    }

    /// Fraction of embeddings whose marked set contains each vertex.
    pub fn inclusion_frequency(&self, n: usize) -> Vec<f64> {
        let mut hits = vec![0usize; n];
        for e in &self.embeddings {
            for &v in &e.marked {
                hits[v] += 1;
            }
        }
        hits.iter().map(|&c| c as f64 * self.weight()).collect()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> &RamseyEmbedding {
        &self.embeddings[rng.gen_range(0..self.embeddings.len())]
    }
}

/// Base parameter `k` of a mode on `n` vertices.
pub fn mode_k(mode: RamseyMode, n: usize) -> Result<usize> {
    match mode {
        RamseyMode::FixedK(k) if k >= 1 => Ok(k),
        RamseyMode::Inclusion(eps) if eps > 0.0 && eps < 1.0 => {
            Ok(((4.0 * (n.max(2) as f64).ln()) / eps).ceil() as usize)
        }
        _ => Err(Error::InvalidParameter(format!("invalid mode {mode:?}"))),
    }
}

/// Multiplicative-weights construction of a distribution over Ramsey embeddings.
///
/// Each round turns the current vertex weights into a probability measure, mixes
/// it with the uniform measure so that a `(>= 1)`-measure with a controlled total
/// results, embeds with parameter `k + 1`, and raises the weight of every vertex
/// that was left out of the marked set. The construction is deterministic.
pub fn ramsey_distribution(
    g: &WeightedGraph,
    h: usize,
    mode: RamseyMode,
    rounds: usize,
) -> Result<RamseyDistribution> {
    ramsey_distribution_with(g, h, mode, rounds, Variant::Standard)
}

/// As [`ramsey_distribution`] with the cluster rule of every round chosen by `variant`.
pub fn ramsey_distribution_with(
    g: &WeightedGraph,
    h: usize,
    mode: RamseyMode,
    rounds: usize,
    variant: Variant,
) -> Result<RamseyDistribution> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be positive".into()));
    }
    let n = g.n();
    let k = mode_k(mode, n)?;
    let k_embed = k + 1;
    let kf = k as f64;
    let delta = (kf + 1.0).powf(-(kf + 1.0) / kf);
    let s = (n as f64).powf(1.0 / kf) / delta;
    let eta = 0.5 / (rounds as f64).sqrt();
    let all: Vec<usize> = (0..n).collect();
    let mut weights = vec![1.0f64; n];
    let mut embeddings = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let total: f64 = weights.iter().sum();
        let mixed: Vec<f64> = weights
            .iter()
            .map(|w| 1.0 / (s * n as f64) + (s - 1.0) / s * (w / total))
            .collect();
        let floor = mixed.iter().copied().fold(f64::INFINITY, f64::min);
        let mu = Measure::new(mixed.iter().map(|x| (x / floor).max(1.0)).collect())?;
        let e = ramsey_embed(g, &mu, &all, h, k_embed, variant)?;
        for (v, w) in weights.iter_mut().enumerate() {
            if !e.is_marked(v) {
                *w *= 1.0 + eta;
            }
        }
        let peak = weights.iter().copied().fold(0.0, f64::max);
        weights.iter_mut().for_each(|w| *w /= peak);
        embeddings.push(e);
    }
    Ok(RamseyDistribution {
        embeddings,
        k_embed,
        eta,
    })
}
