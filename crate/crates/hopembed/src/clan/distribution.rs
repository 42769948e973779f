use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{clan_embed, ClanEmbedding};
use crate::{Error, Measure, Result, Variant, WeightedGraph};

/// Target of the clan distribution builder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClanMode {
    /// Expected clan size about `n^(1/k)`.
    FixedK(usize),
    /// Expected clan size at most about `1 + epsilon`.
    Expected(f64),
}

/// Uniform distribution over the clan embeddings produced by the rounds.
#[derive(Debug, Clone, Serialize)]
pub struct ClanDistribution {
    pub embeddings: Vec<ClanEmbedding>,
    pub k: usize,
    pub eta: f64,
}

impl ClanDistribution {
    /// Mean clan size of every vertex over the support.
    pub fn mean_clan_size(&self, n: usize) -> Vec<f64> {
        let mut sum = vec![0.0; n];
        for e in &self.embeddings {
            for (v, c) in e.clans.iter().enumerate() {
                sum[v] += c.len() as f64;
            }
        }
        sum.iter()
            .map(|s| s / self.embeddings.len() as f64)
            .collect()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> &ClanEmbedding {
        &self.embeddings[rng.gen_range(0..self.embeddings.len())]
    }
}

/// Parameter `k` of a mode on `n` vertices.
pub fn clan_mode_k(mode: ClanMode, n: usize) -> Result<usize> {
    match mode {
        ClanMode::FixedK(k) if k >= 1 => Ok(k),
        ClanMode::Expected(eps) if eps > 0.0 && eps < 1.0 => Ok(((2.0 * n as f64).ln()
            / (1.0 + eps / 2.0).ln())
        .ceil()
        .max(1.0) as usize),
        _ => Err(Error::InvalidParameter(format!("invalid mode {mode:?}"))),
    }
}

/// Multiplicative-weights construction of a distribution over clan embeddings.
///
/// Each round mixes the normalized weights half and half with the uniform
/// measure, scales by `2n` to get a `(>= 1)`-measure, embeds, and multiplies the
/// weight of every vertex by `(1 + eta)^(|f(v)| - 1)`. Deterministic.
pub fn clan_distribution(
    g: &WeightedGraph,
    h: usize,
    mode: ClanMode,
    rounds: usize,
) -> Result<ClanDistribution> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be positive".into()));
    }
    let n = g.n();
    let k = clan_mode_k(mode, n)?;
    let eta = 0.5 / (rounds as f64).sqrt();
    let mut weights = vec![1.0f64; n];
    let mut embeddings = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let total: f64 = weights.iter().sum();
        let mu = Measure::new(weights.iter().map(|w| 1.0 + n as f64 * w / total).collect())?;
        let e = clan_embed(g, &mu, h, k, Variant::Standard)?;
        for (w, c) in weights.iter_mut().zip(&e.clans) {
            *w *= (1.0 + eta).powi(c.len() as i32 - 1);
        }
        let peak = weights.iter().copied().fold(0.0, f64::max);
        weights.iter_mut().for_each(|w| *w /= peak);
        embeddings.push(e);
    }
    Ok(ClanDistribution { embeddings, k, eta })
}
