use serde::Serialize;

use crate::region::{within, Region};
use crate::scale::{ceil_loglog, pow2};
use crate::{Error, Measure, Result, WeightedGraph};

/// Nested balls `inner ⊆ mid ⊆ outer` around a common center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterTriple {
    pub inner: Vec<usize>,
    pub mid: Vec<usize>,
    pub outer: Vec<usize>,
    pub center: usize,
    /// Index of the inner ball within its ring sequence.
    pub j: usize,
    /// Outer ring index of the alternative rule (`None` for the standard rule).
    pub a: Option<usize>,
    /// Loglog parameter of the alternative rule.
    pub l: Option<usize>,
    /// The alternative rule returned one dense cluster without ring search.
    pub dense: bool,
    /// The ring-ratio condition held at `j` (it always should; a miss means rounding).
    pub ratio_met: bool,
}

impl ClusterTriple {
    pub(crate) fn single(y: &[usize], center: usize, l: Option<usize>) -> Self {
        ClusterTriple {
            inner: y.to_vec(),
            mid: y.to_vec(),
            outer: y.to_vec(),
            center,
            j: 0,
            a: None,
            l,
            dense: true,
            ratio_met: true,
        }
    }
}

/// Sum of `mu` over the members of `set` that are marked.
pub(crate) fn marked_measure(set: &[usize], marked: &[usize], mu: &Measure) -> f64 {
    set.iter()
        .filter(|x| marked.binary_search(x).is_ok())
        .map(|&x| mu.get(x))
        .sum()
}

/// First `j` in `0..=last` with `m[j + 2] / m[j] <= target`, flagged `true`.
/// Otherwise the even index with the smallest ratio, flagged `false`; in exact
/// arithmetic that index always meets the target.
pub(crate) fn ring_index(m: &[f64], last: usize, target: f64) -> (usize, bool) {
    ring_index_where(m, last, target, |_| true)
}

/// As [`ring_index`], restricted to indices accepted by `extra`.
pub(crate) fn ring_index_where(
    m: &[f64],
    last: usize,
    target: f64,
    extra: impl Fn(usize) -> bool,
) -> (usize, bool) {
    let ratio = |j: usize| m[j + 2] / m[j];
    let target = target * (1.0 + crate::EPS);
    match (0..=last).find(|&j| ratio(j) <= target && extra(j)) {
        Some(j) => (j, true),
        None => {
            let j = (0..=last)
                .step_by(2)
                .min_by(|&a, &b| ratio(a).total_cmp(&ratio(b)))
                .expect("nonempty range");
            (j, false)
        }
    }
}

fn check_marked(y: &[usize], marked: &[usize]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::InvalidParameter("empty vertex set".into()));
    }
    if marked.is_empty() || marked.iter().any(|x| y.binary_search(x).is_err()) {
        return Err(Error::InvalidParameter(
            "marked set must be a nonempty subset of the cluster".into(),
        ));
    }
    Ok(())
}

/// Ring search around the vertex whose marked ball at the current scale is heaviest.
///
/// `y` and `marked` must be sorted; `marked ⊆ y` must be nonempty. Balls are
/// taken in `G[y]` with hop budget `i·2kh + jh` and radius `2^(i-3) + j·2^i/(16k)`.
pub fn create_cluster(
    g: &WeightedGraph,
    y: &[usize],
    marked: &[usize],
    mu: &Measure,
    h: usize,
    k: usize,
    i: i32,
) -> Result<ClusterTriple> {
    check_marked(y, marked)?;
    let region = Region::new(g, y);
    let hop_step = 2 * k * h;
    let base = i.max(0) as usize * hop_step;
    let r0 = pow2(i - 3);
    let rho = pow2(i) / (16.0 * k as f64);

    let mut center = y[0];
    let mut best = f64::NEG_INFINITY;
    for &v in y {
        let d = region.distances(v, base);
        let m = marked_measure(&within(y, &d, r0), marked, mu);
        if m > best {
            best = m;
            center = v;
        }
    }

    let budgets: Vec<usize> = (0..=2 * k).map(|j| base + j * h).collect();
    let snaps = region.snapshots(center, &budgets);
    let balls: Vec<Vec<usize>> = snaps
        .iter()
        .enumerate()
        .map(|(j, d)| within(y, d, r0 + j as f64 * rho))
        .collect();
    let m: Vec<f64> = balls
        .iter()
        .map(|b| marked_measure(b, marked, mu))
        .collect();
    let target = (m[2 * k] / m[0]).powf(1.0 / k as f64);
    let (j, ratio_met) = ring_index(&m, 2 * k - 2, target);
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

/// Ring search whose hop budget depends on `k` and the marked measure only.
///
/// With `Δ = 2^i`, `L = max(2, ceil(1 + log log μ_M(y)))` and `t = 2ka + j`,
/// ring `t` is the ball of hop budget `t·h` and radius `t·Δ/(8kL)`; rings go up to
/// `t = 2k(L-1)`. If every marked vertex has more than half the marked measure in
/// its last ring, the returned cluster is the set of vertices whose last ring,
/// widened by one step, still holds more than half; all marked vertices belong
/// to it and the vertices left out are unmarked.
pub fn create_cluster_alt(
    g: &WeightedGraph,
    y: &[usize],
    marked: &[usize],
    mu: &Measure,
    h: usize,
    k: usize,
    i: i32,
) -> Result<ClusterTriple> {
    check_marked(y, marked)?;
    let region = Region::new(g, y);
    let total = marked_measure(y, marked, mu);
    let l = ceil_loglog(total).max(2);
    let step = pow2(i) / (8.0 * (k * l) as f64);
    let last = 2 * k * (l - 1);
    let last_radius = last as f64 * step;

    let mut light: Option<(f64, usize)> = None;
    let mut dense_ok = true;
    let mut wide = Vec::with_capacity(y.len());
    for &x in y {
        let snaps = region.snapshots(x, &[last * h, last * h + h]);
        if marked.binary_search(&x).is_ok() {
            let m = marked_measure(&within(y, &snaps[0], last_radius), marked, mu);
            if m <= total / 2.0 {
                dense_ok = false;
            }
            if light.is_none_or(|(bm, _)| m < bm) {
                light = Some((m, x));
            }
        }
        wide.push(marked_measure(
            &within(y, &snaps[1], last_radius + step),
            marked,
            mu,
        ));
    }
    let (_, center) = light.expect("marked set is nonempty");
    if dense_ok {
        let cluster: Vec<usize> = y
            .iter()
            .zip(&wide)
            .filter(|(_, &m)| m > total / 2.0)
            .map(|(&x, _)| x)
            .collect();
        return Ok(ClusterTriple::single(&cluster, center, Some(l)));
    }

    let budgets: Vec<usize> = (0..=last).map(|t| t * h).collect();
    let snaps = region.snapshots(center, &budgets);
    let rings: Vec<Vec<usize>> = snaps
        .iter()
        .enumerate()
        .map(|(t, d)| within(y, d, t as f64 * step))
        .collect();
    let m: Vec<f64> = rings
        .iter()
        .map(|b| marked_measure(b, marked, mu))
        .collect();
    let outer_at = |a: usize| m[2 * k * a];
    let a_found =
        (0..l - 1).find(|&a| outer_at(a) * total >= outer_at(a + 1).powi(2) * (1.0 - crate::EPS));
    let a = a_found.unwrap_or_else(|| {
        (0..l - 1)
            .max_by(|&p, &q| {
                let s = |a: usize| outer_at(a) * total / outer_at(a + 1).powi(2);
                s(p).total_cmp(&s(q)).then(q.cmp(&p))
            })
            .expect("L >= 2")
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
