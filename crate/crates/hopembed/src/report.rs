//! Invariant reports: every construction re-checked against exact hop distances.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::clan::{optimal_path_copies, ClanEmbedding};
use crate::cover::{radius_cap, SparseCover};
use crate::datastructures::{HopLabeling, HopOracle, RoutingScheme};
use crate::graph_core::{
    all_pairs_hop, dijkstra_within, hop_paths, is_h_respecting, shortest_distances,
};
use crate::preserve::{path_weight, GeneralImage, PathTreeEmbedding, RespectingImage};
use crate::ramsey::RamseyEmbedding;
use crate::rng::{stream, Component};
use crate::ultrametric::validate_ultrametric;
use crate::{ExtReal, Measure, Variant, WeightedGraph};

/// First violating pair of a check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub u: usize,
    pub v: usize,
    pub observed: ExtReal,
    pub bound: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantResult {
    pub name: String,
    /// The module invariant this check instantiates.
    pub invariant: String,
    pub passed: bool,
    pub checked: usize,
    pub violations: usize,
    pub counterexample: Option<Counterexample>,
}

/// Machine-readable outcome of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub module: String,
    /// Configuration and seed that reproduce the run.
    pub reproducer: serde_json::Value,
    pub constants: BTreeMap<String, serde_json::Value>,
    pub invariants: Vec<InvariantResult>,
}

impl InvariantReport {
    pub fn new(module: &str, reproducer: serde_json::Value) -> Self {
        InvariantReport {
            module: module.to_string(),
            reproducer,
            constants: BTreeMap::new(),
            invariants: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.invariants.iter().all(|i| i.passed)
    }

    pub fn constant(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("constants serialize");
        self.constants.insert(key.to_string(), v);
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantResult> {
        self.invariants.iter().filter(|i| !i.passed)
    }

    fn add(&mut self, name: &str, invariant: &str, tally: Tally) {
        self.invariants.push(InvariantResult {
            name: name.to_string(),
            invariant: invariant.to_string(),
            passed: tally.violations == 0,
            checked: tally.checked,
            violations: tally.violations,
            counterexample: tally.first,
        });
    }

    fn flag(&mut self, name: &str, invariant: &str, ok: bool) {
        let mut t = Tally::default();
        t.check(ok, 0, 0, ExtReal::ZERO, ExtReal::ZERO);
        self.add(name, invariant, t);
    }

    /// Appends the checks of `other`, prefixing their names.
    pub fn merge(&mut self, prefix: &str, other: InvariantReport) {
        for mut i in other.invariants {
            i.name = format!("{prefix}.{}", i.name);
            self.invariants.push(i);
        }
        for (k, v) in other.constants {
            self.constants.insert(format!("{prefix}.{k}"), v);
        }
    }
}

#[derive(Default)]
struct Tally {
    checked: usize,
    violations: usize,
    first: Option<Counterexample>,
}

impl Tally {
    fn check(&mut self, ok: bool, u: usize, v: usize, observed: ExtReal, bound: ExtReal) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            self.first.get_or_insert(Counterexample {
                u,
                v,
                observed,
                bound,
            });
        }
    }

    fn le(&mut self, u: usize, v: usize, observed: ExtReal, bound: ExtReal) {
        self.check(observed.le_tol(bound), u, v, observed, bound);
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (0..n).map(move |v| (u, v)))
}

/// Exact `h`-hop distances by enumerating every walk with at most `h` hops.
/// Exponential; meant for small graphs.
pub fn enumerate_hop_distances(g: &WeightedGraph, s: usize, h: usize) -> Vec<ExtReal> {
    let mut best = vec![ExtReal::Infinite; g.n()];
    fn go(g: &WeightedGraph, v: usize, left: usize, acc: f64, best: &mut [ExtReal]) {
        best[v] = best[v].min(ExtReal::Finite(acc));
        if left == 0 {
            return;
        }
        for &(u, w) in g.neighbors(v) {
            go(g, u, left - 1, acc + w, best);
        }
    }
    go(g, s, h, 0.0, &mut best);
    best
}

/// Oracle self-check: Bellman–Ford against walk enumeration (when `g` is small)
/// and monotonicity in `h`.
pub fn report_graph_core(g: &WeightedGraph, h: usize) -> InvariantReport {
    let mut r = InvariantReport::new("graph_core", serde_json::json!({ "h": h }));
    let d = all_pairs_hop(g, h);
    let enumerable = g.n() <= 12 && h <= 6;
    if enumerable {
        let mut t = Tally::default();
        for s in 0..g.n() {
            let e = enumerate_hop_distances(g, s, h);
            for v in 0..g.n() {
                t.check(e[v] == d[s][v], s, v, d[s][v], e[v]);
            }
        }
        r.add(
            "hop_distance_exact",
            "hop_distance equals the minimum over all <=h-hop walks",
            t,
        );
    }
    let more = all_pairs_hop(g, h + 1);
    let mut t = Tally::default();
    for (u, v) in pairs(g.n()) {
        t.le(u, v, more[u][v], d[u][v]);
        t.check(d[u][v] == d[v][u], u, v, d[u][v], d[v][u]);
    }
    r.add(
        "monotone_symmetric",
        "d^(h+1) <= d^(h) and d^(h) is symmetric",
        t,
    );
    r.constant("n", g.n());
    r.constant("edges", g.edge_count());
    r.constant("aspect_ratio", g.aspect_ratio());
    r.constant("enumerated", enumerable);
    r
}

/// Domination, stretch on marked pairs, marked measure and cluster-rule checks.
pub fn report_ramsey(
    g: &WeightedGraph,
    mu: &Measure,
    initial: &[usize],
    e: &RamseyEmbedding,
) -> InvariantReport {
    let p = &e.params;
    let mut r = InvariantReport::new(
        "ramsey",
        serde_json::json!({ "h": p.h, "k": p.k, "variant": p.variant }),
    );
    r.flag(
        "ultrametric_valid",
        "the output is an ultrametric",
        validate_ultrametric(&e.ultrametric),
    );
    let low = all_pairs_hop(g, p.hop_budget);
    let high = all_pairs_hop(g, p.h);
    let mut dom = Tally::default();
    let mut stretch = Tally::default();
    for (u, v) in pairs(g.n()) {
        let d = e.distance(u, v);
        dom.le(u, v, low[u][v], d);
        if e.is_marked(u) || e.is_marked(v) {
            stretch.le(u, v, d, high[u][v] * p.t);
        }
    }
    r.add(
        "domination",
        "d^(beta*h)(u,v) <= d_U(u,v) for all pairs",
        dom,
    );
    r.add(
        "marked_stretch",
        "d_U(u,v) <= t * d^(h)(u,v) whenever u or v is marked",
        stretch,
    );
    let m0 = mu.of(initial);
    let kept = mu.of(&e.marked);
    let need = m0.powf(1.0 - 1.0 / p.k as f64);
    let mut t = Tally::default();
    t.le(0, 0, ExtReal::Finite(need), ExtReal::Finite(kept));
    r.add("marked_measure", "mu(M) >= mu(M0)^(1-1/k)", t);
    match p.variant {
        Variant::Standard => {
            let ok = e.stats.max_j <= 2 * (p.k - 1);
            r.flag("ring_index", "j <= 2(k-1) at every cluster call", ok);
        }
        Variant::Alt => {
            let l = p.l_top.unwrap_or(0);
            r.flag(
                "alt_hop_budget",
                "hop budget <= 4kL*h with L = ceil(1 + loglog mu(M0))",
                p.hop_budget <= 4 * p.k * l * p.h,
            );
        }
    }
    r.constant("t", p.t);
    r.constant("beta", p.beta);
    r.constant("hop_budget", p.hop_budget);
    r.constant("marked_measure", kept);
    r.constant("required_measure", need);
    r.constant("cluster_calls", e.stats.cluster_calls);
    r.constant("max_j", e.stats.max_j);
    r.constant("ratio_misses", e.stats.ratio_misses);
    r
}

/// Random paths that are `h`-respecting: lightest `h`-hop paths between random
/// pairs, kept only when they pass the respecting test.
pub fn sample_respecting_paths(
    g: &WeightedGraph,
    h: usize,
    count: usize,
    seed: u64,
) -> Vec<Vec<usize>> {
    let mut rng = stream(seed, Component::Workload, 0);
    let mut out = Vec::new();
    if g.edge_count() == 0 {
        return out;
    }
    for _ in 0..count * 20 {
        if out.len() == count {
            break;
        }
        let s = rng.gen_range(0..g.n());
        let t = rng.gen_range(0..g.n());
        let Some(path) = hop_paths(g, s, h).expect("valid source").path_to(t) else {
            continue;
        };
        if path.len() < 2 {
            continue;
        }
        let edges: Vec<(usize, usize)> = path.windows(2).map(|w| (w[0], w[1])).collect();
        let simple = {
            let mut seen = path.clone();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        };
        if simple && is_h_respecting(g, &edges, h).unwrap_or(false) {
            out.push(path);
        }
    }
    out
}

/// Size bound, chief stretch, domination, root and path-distortion checks.
pub fn report_clan(
    g: &WeightedGraph,
    mu: &Measure,
    e: &ClanEmbedding,
    paths: usize,
    seed: u64,
) -> InvariantReport {
    let p = &e.params;
    let mut r = InvariantReport::new(
        "clan",
        serde_json::json!({ "h": p.h, "k": p.k, "variant": p.variant, "seed": seed, "paths": paths }),
    );
    r.flag(
        "ultrametric_valid",
        "the output is an ultrametric",
        validate_ultrametric(&e.ultrametric),
    );
    r.flag(
        "chief_in_clan",
        "chi(v) belongs to f(v)",
        (0..g.n()).all(|v| e.clans[v].contains(&e.chief[v])),
    );
    let size: f64 = (0..g.n())
        .map(|v| mu.get(v) * e.clans[v].len() as f64)
        .sum();
    let mut t = Tally::default();
    t.le(0, 0, ExtReal::Finite(size), ExtReal::Finite(p.size_bound));
    r.add("clan_size", "sum_v mu(v)|f(v)| <= mu(V)^(1+1/k)", t);
    let low = all_pairs_hop(g, p.hop_budget);
    let high = all_pairs_hop(g, p.h);
    let (mut dom, mut chief) = (Tally::default(), Tally::default());
    for (u, v) in pairs(g.n()) {
        dom.le(u, v, low[u][v], e.min_distance(u, v));
        chief.le(u, v, e.chief_distance(u, v), high[u][v] * p.t);
    }
    r.add(
        "domination",
        "d^(beta*h)(u,v) <= d_U(u',v') for all copies",
        dom,
    );
    r.add(
        "chief_stretch",
        "min over v' in f(v) of d_U(chi(u),v') <= t * d^(h)(u,v)",
        chief,
    );
    let total = mu.total();
    let mut heavy = Tally::default();
    for v in (0..g.n()).filter(|&v| mu.get(v) > total / 2.0) {
        heavy.check(
            e.clans[v].len() == 1,
            v,
            v,
            ExtReal::Finite(e.clans[v].len() as f64),
            ExtReal::Finite(1.0),
        );
    }
    r.add("heavy_vertex", "|f(r)| = 1 whenever mu(r) > mu(V)/2", heavy);
    let mut dist = Tally::default();
    for path in sample_respecting_paths(g, p.h, paths, seed) {
        let w = path_weight(g, &path).expect("sampled paths follow edges");
        let (_, cost) = optimal_path_copies(e, &path).expect("valid path");
        dist.le(
            path[0],
            *path.last().expect("nonempty"),
            cost,
            ExtReal::Finite(p.path_bound * w),
        );
    }
    r.add(
        "path_distortion",
        "DP copy cost <= path_bound * w(P) for h-respecting P",
        dist,
    );
    r.constant("t", p.t);
    r.constant("beta", p.beta);
    r.constant("path_bound", p.path_bound);
    r.constant("weighted_size", size);
    r.constant("size_bound", p.size_bound);
    r.constant("copies", e.stats.copies);
    r
}

/// Cover and radius properties plus the cost and multiplicity of this run.
pub fn report_cover(g: &WeightedGraph, cover: &SparseCover, cost: &[f64]) -> InvariantReport {
    let n = g.n();
    let mut r = InvariantReport::new("cover", serde_json::json!({ "delta": cover.delta }));
    let delta = ExtReal::Finite(cover.delta);
    let mut covered = Tally::default();
    let mut together = vec![vec![false; n]; n];
    for c in &cover.clusters {
        for &a in &c.members {
            for &b in &c.members {
                together[a][b] = true;
            }
        }
    }
    for u in 0..n {
        let d = shortest_distances(g, u);
        for v in 0..n {
            if d[v].le_tol(delta) {
                covered.check(together[u][v], u, v, d[v], delta);
            }
        }
    }
    r.add(
        "cover",
        "every pair with d(u,v) <= delta shares a cluster",
        covered,
    );
    let cap = ExtReal::Finite(cover.delta * radius_cap(n));
    let mut radius = Tally::default();
    for c in &cover.clusters {
        let mut mask = vec![false; n];
        c.members.iter().for_each(|&v| mask[v] = true);
        let d = dijkstra_within(g, c.center, Some(&mask));
        let ecc = c
            .members
            .iter()
            .map(|&v| d[v])
            .max()
            .unwrap_or(ExtReal::ZERO);
        radius.le(c.center, c.center, ecc, cap);
    }
    r.add(
        "radius",
        "each cluster has radius <= delta * log2(2n) in its induced subgraph",
        radius,
    );
    r.flag("psi", "every sampled radius is at most log2(2n)", cover.psi);
    let base: f64 = cost.iter().sum();
    let mult = cover.multiplicity(n);
    r.constant("clusters", cover.clusters.len());
    r.constant("attempts", cover.attempts);
    r.constant(
        "cost_ratio",
        if base > 0.0 {
            cover.total_cost(g, cost) / base
        } else {
            0.0
        },
    );
    r.constant(
        "mean_multiplicity",
        mult.iter().sum::<usize>() as f64 / n as f64,
    );
    r
}

/// Structural checks of a path-tree embedding, exhaustive over copy pairs.
pub fn report_preserve(g: &WeightedGraph, p: &PathTreeEmbedding) -> InvariantReport {
    let mut r = InvariantReport::new(
        "preserve",
        serde_json::json!({ "h": p.h, "root": p.root_vertex }),
    );
    r.flag(
        "root_single_copy",
        "|f(r)| = 1",
        p.clans[p.root_vertex].len() == 1,
    );
    r.flag(
        "copies_cover",
        "f(V) = V(T)",
        p.clans.iter().map(Vec::len).sum::<usize>() == p.copies()
            && p.clans.iter().all(|c| !c.is_empty()),
    );
    let mut witness = Tally::default();
    for (c, par, w, path) in p.witnessed_edges() {
        if let Some(path) = path {
            let ends = path.first() == Some(&p.owner(c)) && path.last() == Some(&p.owner(par));
            let pw = ExtReal::Finite(path_weight(g, path).unwrap_or(f64::INFINITY));
            witness.check(ends && pw.le_tol(w), c, par, pw, w);
        } else {
            witness.check(!w.is_finite(), c, par, w, ExtReal::Infinite);
        }
    }
    r.add(
        "witness_weight",
        "w_G(assoc(e)) <= w_T(e) for every tree edge",
        witness,
    );
    let (mut hops, mut weight) = (Tally::default(), Tally::default());
    for (a, b) in pairs(p.copies()) {
        if let Ok(Some(path)) = p.induced_path(a, b) {
            let hb = ExtReal::Finite(p.hop_bound as f64);
            hops.le(a, b, ExtReal::Finite((path.len() - 1) as f64), hb);
            let pw = path_weight(g, &path).map_or(ExtReal::Infinite, ExtReal::Finite);
            weight.le(a, b, pw, p.tree.distance(a, b));
        }
    }
    r.add(
        "induced_hops",
        "every induced path has at most hop_bound hops",
        hops,
    );
    r.add(
        "induced_weight",
        "every induced path weighs at most d_T",
        weight,
    );
    r.constant("copies", p.copies());
    r.constant("copy_bound", (2.0 * g.n() as f64).powf(1.5));
    r.constant("hop_bound", p.hop_bound);
    r.constant("spr_stretch", p.spr_stretch);
    r.constant("aspect_ratio", p.aspect_ratio);
    r
}

/// Connectivity, coverage and weight of an image of a connected respecting subgraph.
pub fn report_respecting_image(
    p: &PathTreeEmbedding,
    sub: &[(usize, usize)],
    img: &RespectingImage,
) -> InvariantReport {
    let mut r = InvariantReport::new("preserve.image", serde_json::json!({ "edges": sub.len() }));
    let mut nodes: Vec<usize> = img
        .edges
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .chain(img.copies.iter().copied())
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    let connected =
        nodes.len() == img.edges.len() + 1 || (img.edges.is_empty() && nodes.len() <= 1);
    r.flag("connected", "the image is a connected subtree", connected);
    let covers = sub
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .all(|v| p.clans[v].iter().any(|c| nodes.binary_search(c).is_ok()));
    r.flag(
        "covers",
        "the image holds a copy of every vertex of H",
        covers,
    );
    let mut t = Tally::default();
    t.le(
        0,
        0,
        img.weight,
        ExtReal::Finite(img.bound_factor * img.tour_weight),
    );
    r.add("weight", "w_T(H') <= path_bound * spr_stretch * 2w(H)", t);
    r.constant(
        "ratio",
        img.weight.to_f64() / img.tour_weight.max(f64::MIN_POSITIVE),
    );
    r
}

/// Pair coverage of a general-subgraph image over all pairs at most `h` hops apart in `H`.
pub fn report_general_image(
    g: &WeightedGraph,
    sub: &[(usize, usize)],
    h: usize,
    img: &GeneralImage,
) -> InvariantReport {
    let mut r = InvariantReport::new(
        "preserve.general",
        serde_json::json!({ "edges": sub.len(), "h": h }),
    );
    let unit = g
        .edge_subgraph(sub)
        .expect("image was built from this subgraph")
        .map_weights(|_, _| 1.0);
    let mut t = Tally::default();
    for u in 0..g.n() {
        let d = shortest_distances(&unit, u);
        for v in 0..g.n() {
            if u != v && d[v].le_tol(ExtReal::Finite(h as f64)) {
                t.check(
                    img.co_component(u, v),
                    u,
                    v,
                    d[v],
                    ExtReal::Finite(h as f64),
                );
            }
        }
    }
    r.add(
        "pair_coverage",
        "every pair within h hops in H has copies in one component",
        t,
    );
    r.constant("weight", img.weight);
    r.constant("subgraph_weight", img.subgraph_weight);
    r.constant("tree_h", img.tree_h);
    r.constant(
        "expected_bound",
        img.pieces.first().map_or(0.0, |p| p.bound_factor) * 4.0 * img.subgraph_weight,
    );
    r
}

fn sandwich(
    r: &mut InvariantReport,
    g: &WeightedGraph,
    h: usize,
    budget: usize,
    stretch: f64,
    q: impl Fn(usize, usize) -> ExtReal,
) {
    let hi = all_pairs_hop(g, h);
    let lo = all_pairs_hop(g, budget);
    let (mut upper, mut lower) = (Tally::default(), Tally::default());
    for (u, v) in pairs(g.n()) {
        let a = q(u, v);
        lower.le(u, v, lo[u][v], a);
        if hi[u][v].is_finite() {
            upper.le(u, v, a, hi[u][v] * stretch);
        }
    }
    r.add(
        "upper",
        "query <= (2k-1)(1+eps) d^(h) for h-hop connected pairs",
        upper,
    );
    r.add("lower", "query >= d^(B*h) at the recorded budget B", lower);
}

pub fn report_oracle(g: &WeightedGraph, o: &HopOracle) -> InvariantReport {
    let p = &o.params;
    let mut r = InvariantReport::new("oracle", serde_json::to_value(p).expect("params serialize"));
    sandwich(&mut r, g, p.h, p.hop_budget(), p.stretch(), |u, v| {
        o.query(u, v).unwrap_or(ExtReal::ZERO)
    });
    r.constant("words", o.words());
    r.constant("coarse_samples", o.coarse.samples);
    r.constant("coarse_attempts", o.coarse.attempts);
    r.constant("coarse_labels", o.coarse.size);
    r.constant("scales", o.inner.len());
    r
}

pub fn report_labeling(g: &WeightedGraph, l: &HopLabeling) -> InvariantReport {
    let p = &l.params;
    let mut r = InvariantReport::new("labels", serde_json::to_value(p).expect("params serialize"));
    sandwich(&mut r, g, p.h, p.hop_budget(), p.stretch(), |u, v| {
        l.query(u, v).unwrap_or(ExtReal::ZERO)
    });
    r.constant("max_label_words", l.max_words());
    r.constant("coarse_rounds", l.coarse_rounds);
    r
}

/// Delivery, stretch, hop and locality checks over the given pairs.
pub fn report_routing(
    g: &WeightedGraph,
    s: &RoutingScheme,
    pairs: &[(usize, usize)],
) -> InvariantReport {
    let p = &s.params;
    let mut r = InvariantReport::new("route", serde_json::to_value(p).expect("params serialize"));
    let hi = all_pairs_hop(g, p.h);
    let (mut delivered, mut stretch, mut hops, mut aux, mut local) = (
        Tally::default(),
        Tally::default(),
        Tally::default(),
        Tally::default(),
        Tally::default(),
    );
    for &(u, v) in pairs {
        let d = hi[u][v];
        let res = s.route(u, v).ok().flatten();
        if !d.is_finite() {
            continue;
        }
        delivered.check(
            res.as_ref().is_some_and(|x| x.path.last() == Some(&v)),
            u,
            v,
            d,
            d,
        );
        let Some(x) = res else { continue };
        stretch.le(u, v, ExtReal::Finite(x.weight), d * p.stretch());
        hops.le(
            u,
            v,
            ExtReal::Finite(x.hops as f64),
            ExtReal::Finite(s.hop_bound),
        );
        aux.le(
            u,
            v,
            ExtReal::Finite(x.hops as f64),
            ExtReal::Finite(x.aux_weight / x.omega),
        );
        local.check(
            x.nonlocal_reads == 0,
            u,
            v,
            ExtReal::Finite(x.nonlocal_reads as f64),
            ExtReal::ZERO,
        );
    }
    r.add(
        "delivery",
        "every h-hop connected pair is delivered",
        delivered,
    );
    r.add("stretch", "w(P) <= stretch_inner (1+eps) d^(h)", stretch);
    r.add("hop_bound", "hop(P) <= recorded hop bound", hops);
    r.add("aux_hops", "hop(P) <= w_i(P) / omega_i", aux);
    r.add(
        "locality",
        "forwarding reads only the current node's table and the header",
        local,
    );
    r.constant("max_table_words", s.max_table_words());
    r.constant("max_label_words", s.max_label_words());
    r.constant("hop_bound", s.hop_bound);
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_agrees_on_small_cycle() {
        let g = WeightedGraph::new(5, (0..5).map(|v| (v, (v + 1) % 5, 1.0 + v as f64))).unwrap();
        for h in 1..4 {
            assert!(report_graph_core(&g, h).passed());
        }
    }

    #[test]
    fn failing_check_names_invariant() {
        let mut r = InvariantReport::new("x", serde_json::Value::Null);
        let mut t = Tally::default();
        t.le(1, 2, ExtReal::Finite(3.0), ExtReal::Finite(2.0));
        r.add("demo", "3 <= 2", t);
        assert!(!r.passed());
        let f = r.failures().next().unwrap();
        assert_eq!(f.invariant, "3 <= 2");
        assert_eq!(f.counterexample.as_ref().unwrap().u, 1);
    }
}
