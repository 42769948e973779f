//! Simulated compact routing: per-node tables, destination labels and a
//! forwarding rule that reads only the current node's table and the header.

use std::cell::RefCell;

use serde::Serialize;

use super::coarse::{asymmetric_query, build_coarse_labeling, ShortLabel};
use super::tree_label::TreeLabel;
use super::tz::{tz_choose_tree, TzRouteLabel, TzTable};
use super::{inner_structures, FinalParams, ScaleConfig, ThorupZwick};
use crate::{Error, HopParams, Result, WeightedGraph};

/// Everything a node stores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeTable {
    pub vertex: u32,
    pub scales: ScaleConfig,
    /// Long coarse label of the node.
    pub coarse_long: Vec<TreeLabel>,
    /// Tree-routing table on each auxiliary graph.
    pub inner: Vec<TzTable>,
}

impl NodeTable {
    pub fn words(&self) -> usize {
        6 + self.coarse_long.iter().map(TreeLabel::words).sum::<usize>()
            + self.inner.iter().map(TzTable::words).sum::<usize>()
    }
}

/// Destination label carried in the header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteLabel {
    pub vertex: u32,
    pub short: ShortLabel,
    pub inner: Vec<TzRouteLabel>,
}

impl RouteLabel {
    pub fn words(&self) -> usize {
        1 + 1 + self.short.label.words() + self.inner.iter().map(TzRouteLabel::words).sum::<usize>()
    }
}

/// Packet header: the destination label plus the choices fixed at the source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub dest: RouteLabel,
    pub scale: Option<usize>,
    /// Root of the cluster tree and the destination's enter time in it.
    pub tree: Option<(u32, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Deliver,
    Forward(u32),
    Decline,
}

/// Forwarding rule. The source fixes the scale from the coarse estimate and
/// the cluster tree from its inner table; every node then follows the tree.
fn forward(table: &NodeTable, header: &mut Header) -> Step {
    if header.dest.vertex == table.vertex {
        return Step::Deliver;
    }
    if header.tree.is_none() {
        let Ok(est) = asymmetric_query(&table.coarse_long, &header.dest.short) else {
            return Step::Decline;
        };
        let Some(i) = table.scales.scale_of(est) else {
            return Step::Decline;
        };
        let Some(choice) = tz_choose_tree(&table.inner[i], &header.dest.inner[i]) else {
            return Step::Decline;
        };
        header.scale = Some(i);
        header.tree = Some(choice);
    }
    let (Some(i), Some((root, enter))) = (header.scale, header.tree) else {
        return Step::Decline;
    };
    match table.inner[i].tree(root).and_then(|e| e.next_hop(enter)) {
        Some(next) => Step::Forward(next),
        None if table.inner[i].tree(root).is_some() => Step::Deliver,
        None => Step::Decline,
    }
}

/// A delivered packet's trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Delivery {
    pub path: Vec<usize>,
    pub weight: f64,
    /// Weight in the auxiliary graph of the chosen scale.
    pub aux_weight: f64,
    pub scale: usize,
    pub omega: f64,
    pub hops: usize,
    /// Table reads outside the node currently holding the packet.
    pub nonlocal_reads: usize,
}

/// Tables and labels of every node, plus the links they sit on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutingScheme {
    pub params: FinalParams,
    pub tables: Vec<NodeTable>,
    pub labels: Vec<RouteLabel>,
    /// Bound on the hops of any delivered path.
    pub hop_bound: f64,
    #[serde(skip)]
    graph: WeightedGraph,
}

/// Table reads logged per node, for the locality replay.
struct Network<'a> {
    tables: &'a [NodeTable],
    reads: RefCell<Vec<usize>>,
}

impl Network<'_> {
    fn table(&self, x: usize) -> &NodeTable {
        self.reads.borrow_mut().push(x);
        &self.tables[x]
    }
}

impl RoutingScheme {
    /// Routes a packet from `u` to `v`; `None` when the scheme declines.
    pub fn route(&self, u: usize, v: usize) -> Result<Option<Delivery>> {
        let n = self.graph.n();
        for x in [u, v] {
            self.graph.check_vertex(x)?;
        }
        let net = Network {
            tables: &self.tables,
            reads: RefCell::new(Vec::new()),
        };
        let mut header = Header {
            dest: self.labels[v].clone(),
            scale: None,
            tree: None,
        };
        let mut path = vec![u];
        let mut weight = 0.0;
        let mut nonlocal_reads = 0;
        loop {
            let at = *path.last().expect("path starts at the source");
            let seen = net.reads.borrow().len();
            let step = forward(net.table(at), &mut header);
            nonlocal_reads += net.reads.borrow()[seen..]
                .iter()
                .filter(|&&x| x != at)
                .count();
            match step {
                Step::Decline => return Ok(None),
                Step::Deliver => break,
                Step::Forward(next) => {
                    let next = next as usize;
                    let w = self.graph.weight(at, next).ok_or_else(|| {
                        Error::InvalidParameter(format!("forwarded over non-edge {at}-{next}"))
                    })?;
                    weight += w;
                    path.push(next);
                    if path.len() > 2 * n + 1 {
                        return Err(Error::InvalidParameter(format!(
                            "packet from {u} to {v} loops"
                        )));
                    }
                }
            }
        }
        let hops = path.len() - 1;
        let scale = header.scale.unwrap_or(0);
        let omega = self.params.scales.omega(scale);
        Ok(Some(Delivery {
            path,
            weight,
            aux_weight: weight + hops as f64 * omega,
            scale,
            omega,
            hops,
            nonlocal_reads,
        }))
    }

    pub fn max_table_words(&self) -> usize {
        self.tables.iter().map(NodeTable::words).max().unwrap_or(0)
    }

    pub fn max_label_words(&self) -> usize {
        self.labels.iter().map(RouteLabel::words).max().unwrap_or(0)
    }
}

/// Routing scheme from the coarse labeling and tree-cover routing on every
/// auxiliary graph.
pub fn build_routing_scheme(
    g: &WeightedGraph,
    h: usize,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<RoutingScheme> {
    let p = HopParams::new(h, k, epsilon)?;
    let coarse = build_coarse_labeling(g, h, k)?;
    let params = FinalParams::new(g, p, coarse.t, coarse.beta, ThorupZwick::route_stretch(k));
    let inner = inner_structures(g, &params, seed)?;
    let hop_bound = params.inner_stretch
        * (2.0 * params.t_coarse / epsilon + params.beta_hops as f64)
        * h as f64;
    let (tables, labels) = coarse
        .labels
        .into_iter()
        .enumerate()
        .map(|(v, c)| {
            let table = NodeTable {
                vertex: v as u32,
                scales: params.scales,
                coarse_long: c.long,
                inner: inner.iter().map(|tz| tz.tables[v].clone()).collect(),
            };
            let label = RouteLabel {
                vertex: v as u32,
                short: c.short,
                inner: inner.iter().map(|tz| tz.route_labels[v].clone()).collect(),
            };
            (table, label)
        })
        .unzip();
    Ok(RoutingScheme {
        params,
        tables,
        labels,
        hop_bound,
        graph: g.clone(),
    })
}
