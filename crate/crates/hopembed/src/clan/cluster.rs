use crate::ramsey::{ring_index, ring_index_where, ClusterTriple};
use crate::region::{within, Region};
use crate::scale::{ceil_loglog, pow2};
use crate::{le_tol, Error, Measure, Result, WeightedGraph};

fn check_nonempty(y: &[usize]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::InvalidParameter("empty vertex set".into()));
    }
    Ok(())
}

/// Ring search for the clan construction.
///
/// Like the Ramsey rule with `k + 1` in place of `k` and the plain measure; the
/// ring index must also satisfy `mu(A_j) > mu(y)/3` or `mu(A_{j+2}) <= 2 mu(y)/3`,
/// so that either the removed part or the cluster is a constant fraction lighter.
pub fn clan_create_cluster(
    g: &WeightedGraph,
    y: &[usize],
    mu: &Measure,
    h: usize,
    k: usize,
    i: i32,
) -> Result<ClusterTriple> {
    check_nonempty(y)?;
    let region = Region::new(g, y);
    let total = mu.of(y);
    let base = i.max(0) as usize * 2 * (k + 1) * h;
    let r0 = pow2(i - 3);
    let rho = pow2(i) / (16.0 * (k + 1) as f64);

    let mut center = y[0];
    let mut best = f64::NEG_INFINITY;
    for &v in y {
        let m = mu.of(&within(y, &region.distances(v, base), r0));
        if m > best {
            best = m;
            center = v;
        }
    }

    let last = 2 * k + 2;
    let budgets: Vec<usize> = (0..=last).map(|j| base + j * h).collect();
    let balls: Vec<Vec<usize>> = region
        .snapshots(center, &budgets)
        .iter()
        .enumerate()
        .map(|(j, d)| within(y, d, r0 + j as f64 * rho))
        .collect();
    let m: Vec<f64> = balls.iter().map(|b| mu.of(b)).collect();
    let target = (m[last] / m[0]).powf(1.0 / k as f64);
    let (j, ratio_met) = ring_index_where(&m, 2 * k, target, |j| {
        m[j] > total / 3.0 || le_tol(m[j + 2], 2.0 * total / 3.0)
    });
    Ok(ClusterTriple {
        inner: balls[j].clone(),
        mid: balls[j + 1].clone(),
        outer: balls[j + 2].clone(),
        center,
        j,
        a: None,
        l: None,
        dense: false,
        ratio_met,
    })
}

/// Clan ring search whose hop budget depends on `k` and `mu(y)` only.
///
/// With `Δ = 2^i` and `L = max(1, ceil(1 + log log mu(y)))`, the center minimizes
/// the measure of its `2kLh`-hop ball of radius `Δ/4`. When even that ball holds
/// more than half of `mu(y)` the whole set is returned; otherwise the outer
/// cluster lies inside that ball and so carries at most half the measure.
pub fn clan_create_cluster_alt(
    g: &WeightedGraph,
    y: &[usize],
    mu: &Measure,
    h: usize,
    k: usize,
    i: i32,
) -> Result<ClusterTriple> {
    check_nonempty(y)?;
    let region = Region::new(g, y);
    let total = mu.of(y);
    let l = ceil_loglog(total).max(1);
    let delta = pow2(i);
    let step = delta / (8.0 * (k * l) as f64);
    let last = 2 * k * l;

    let mut light: Option<(f64, usize)> = None;
    for &x in y {
        let m = mu.of(&within(y, &region.distances(x, last * h), delta / 4.0));
        if light.is_none_or(|(bm, _)| m < bm) {
            light = Some((m, x));
        }
    }
    let (lightest, center) = light.expect("nonempty");
    if lightest > total / 2.0 {
        return Ok(ClusterTriple::single(y, center, Some(l)));
    }

    let budgets: Vec<usize> = (0..=last).map(|t| t * h).collect();
    let rings: Vec<Vec<usize>> = region
        .snapshots(center, &budgets)
        .iter()
        .enumerate()
        .map(|(t, d)| within(y, d, t as f64 * step))
        .collect();
    let m: Vec<f64> = rings.iter().map(|b| mu.of(b)).collect();
    let outer_at = |a: usize| m[2 * k * a];
    let a_found =
        (0..l).find(|&a| outer_at(a) * total >= outer_at(a + 1).powi(2) * (1.0 - crate::EPS));
    let a = a_found.unwrap_or_else(|| {
        (0..l)
            .max_by(|&p, &q| {
                let s = |a: usize| outer_at(a) * total / outer_at(a + 1).powi(2);
                s(p).total_cmp(&s(q)).then(q.cmp(&p))
            })
            .expect("L >= 1")
    });
    let base = 2 * k * a;
    let target = (outer_at(a + 1) / outer_at(a)).powf(1.0 / k as f64);
    let (j, ratio_met) = ring_index(&m[base..=base + 2 * k], 2 * k - 2, target);
    Ok(ClusterTriple {
        inner: rings[base + j].clone(),
        mid: rings[base + j + 1].clone(),
        outer: rings[base + j + 2].clone(),
        center,
        j,
        a: Some(a),
        l: Some(l),
        dense: false,
        ratio_met: ratio_met && a_found.is_some(),
    })
}
