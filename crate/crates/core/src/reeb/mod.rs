//! Reeb graphs of piecewise-linear fields.

mod iso;
mod oracle;
mod sweep;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complex::{ScalarField, SimplicialComplex};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

pub use iso::{is_isomorphic, is_isomorphic_by, IsoOptions, MAX_ISO_NODES};
pub use oracle::{slab_oracle, slab_oracle_with_limit, DEFAULT_ORACLE_LIMIT};
pub use sweep::reeb_graph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReebNode {
    pub id: usize,
    pub value: f64,
    /// A vertex of the source complex that maps to this node, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
}

/// A finite multigraph with a function on its nodes. Every edge joins
/// nodes of different value and is stored low end first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct ReebGraph {
    nodes: Vec<ReebNode>,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    nodes: Vec<ReebNode>,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawGraph> for ReebGraph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        for (i, n) in raw.nodes.iter().enumerate() {
            if n.id != i {
                return Err(Error::invalid(format!("node ids must be 0..n, found {} at {i}", n.id)));
            }
        }
        ReebGraph::from_parts(raw.nodes, raw.edges)
    }
}

impl From<ReebGraph> for RawGraph {
    fn from(g: ReebGraph) -> Self {
        RawGraph {
            nodes: g.nodes,
            edges: g.edges,
        }
    }
}

impl ReebGraph {
    /// Builds a graph from node values and undirected edges. Edges are
    /// oriented by value; equal-valued endpoints are rejected.
    pub fn new(values: &[f64], edges: &[[usize; 2]]) -> Result<Self> {
        let nodes = values
            .iter()
            .enumerate()
            .map(|(id, &value)| ReebNode { id, value, vertex: None })
            .collect();
        Self::from_parts(nodes, edges.to_vec())
    }

    pub(crate) fn from_parts(nodes: Vec<ReebNode>, mut edges: Vec<[usize; 2]>) -> Result<Self> {
        for (i, n) in nodes.iter().enumerate() {
            if !n.value.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        for e in edges.iter_mut() {
            let [a, b] = *e;
            if a >= nodes.len() || b >= nodes.len() {
                return Err(Error::invalid(format!("edge [{a}, {b}] references a missing node")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at node {a}")));
            }
            let (va, vb) = (nodes[a].value, nodes[b].value);
            if va == vb {
                return Err(Error::invalid(format!("edge [{a}, {b}] joins nodes of equal value {va}")));
            }
            if va > vb {
                *e = [b, a];
            }
        }
        edges.sort_unstable();
        Ok(ReebGraph { nodes, edges })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[ReebNode] {
        &self.nodes
    }

    /// Edges as (lower node, upper node), sorted.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn value(&self, n: usize) -> f64 {
        self.nodes[n].value
    }

    pub fn values(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.value).collect()
    }

    pub fn degree(&self, n: usize) -> usize {
        self.edges.iter().filter(|e| e[0] == n || e[1] == n).count()
    }

    /// Number of edges leaving `n` upwards.
    pub fn up_degree(&self, n: usize) -> usize {
        self.edges.iter().filter(|e| e[0] == n).count()
    }

    pub fn down_degree(&self, n: usize) -> usize {
        self.edges.iter().filter(|e| e[1] == n).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for &[a, b] in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn num_components(&self) -> usize {
        let mut uf = UnionFind::new(self.nodes.len());
        let mut count = self.nodes.len();
        for &[a, b] in &self.edges {
            if !uf.same(a, b) {
                uf.union(a, b);
                count -= 1;
            }
        }
        count
    }

    /// Component label per node, labels numbered by first appearance.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.nodes.len());
        for &[a, b] in &self.edges {
            uf.union(a, b);
        }
        let mut label = BTreeMap::new();
        (0..self.nodes.len())
            .map(|n| {
                let r = uf.find(n);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect()
    }

    /// First Betti number: independent cycles.
    pub fn betti1(&self) -> usize {
        self.edges.len() + self.num_components() - self.nodes.len()
    }

    pub fn is_tree(&self) -> bool {
        self.betti1() == 0 && self.num_components() <= 1
    }

    pub fn min_value(&self) -> Option<f64> {
        self.nodes.iter().map(|n| n.value).reduce(f64::min)
    }

    pub fn max_value(&self) -> Option<f64> {
        self.nodes.iter().map(|n| n.value).reduce(f64::max)
    }

    /// Same graph with every node value passed through `f`, which must be
    /// strictly increasing on the node values.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| ReebNode {
                value: f(n.value),
                ..n.clone()
            })
            .collect();
        Self::from_parts(nodes, self.edges.clone())
    }

    /// Merges the endpoints of every edge spanning at most `tol` in value,
    /// then splices out nodes left with one edge below and one above.
    /// Merged nodes take the lowest value in their group.
    pub fn contract_short_edges(&self, tol: f64) -> Result<Self> {
        let n = self.nodes.len();
        let mut uf = UnionFind::new(n);
        for &[a, b] in &self.edges {
            if self.value(b) - self.value(a) <= tol {
                uf.union(a, b);
            }
        }
        let mut low = vec![f64::INFINITY; n];
        for v in 0..n {
            let r = uf.find(v);
            low[r] = low[r].min(self.value(v));
        }
        let values: Vec<f64> = (0..n).map(|v| low[uf.find(v)]).collect();
        let provenance: Vec<Option<usize>> = self.nodes.iter().map(|n| n.vertex).collect();
        simplify(&values, &provenance, &self.edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Graphviz rendering. Nodes of equal value share a rank and the
    /// layout runs bottom to top.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph reeb {\n  rankdir=BT;\n  node [shape=circle];\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  n{} [label=\"{}\\n{:.4}\", value={}];", n.id, n.id, n.value, n.value);
        }
        let mut levels: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for n in &self.nodes {
            levels.entry(order_key(n.value)).or_default().push(n.id);
        }
        for ids in levels.values() {
            let names: Vec<String> = ids.iter().map(|i| format!("n{i}")).collect();
            let _ = writeln!(out, "  {{ rank=same; {}; }}", names.join("; "));
        }
        for &[a, b] in &self.edges {
            let _ = writeln!(out, "  n{a} -- n{b};");
        }
        out.push_str("}\n");
        out
    }

    /// Realizes the graph as a 1-complex on the real line, with each edge
    /// split at its midpoint so parallel edges stay distinct simplices.
    /// The returned field is the node value, which is linear on every edge.
    pub fn to_complex(&self) -> Result<(SimplicialComplex, ScalarField)> {
        let mut coords: Vec<Vec<f64>> = self.nodes.iter().map(|n| vec![n.value]).collect();
        let mut values = self.values();
        let mut simplices = Vec::with_capacity(2 * self.edges.len() + self.nodes.len());
        for v in 0..self.nodes.len() {
            simplices.push(vec![v]);
        }
        for &[a, b] in &self.edges {
            let mid = 0.5 * (self.nodes[a].value + self.nodes[b].value);
            let m = coords.len();
            coords.push(vec![mid]);
            values.push(mid);
            simplices.push(vec![a, m]);
            simplices.push(vec![m, b]);
        }
        let complex = SimplicialComplex::from_simplices(coords, simplices)?;
        let field = ScalarField::new(values)?;
        Ok((complex, field))
    }
}

/// Maps an f64 to an integer with the same total order.
pub(crate) fn order_key(x: f64) -> u64 {
    let bits = x.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

/// Merges equal-valued adjacent nodes, then splices out nodes with exactly
/// one edge below and one above. Shared by the sweep and the oracle.
pub(crate) fn simplify(values: &[f64], provenance: &[Option<usize>], arcs: &[[usize; 2]]) -> Result<ReebGraph> {
    let n = values.len();
    let mut plateau = UnionFind::new(n);
    for &[a, b] in arcs {
        if values[a] == values[b] {
            plateau.union(a, b);
        }
    }
    let class: Vec<usize> = (0..n).map(|v| plateau.find(v)).collect();

    // Arcs between classes, oriented low to high; `None` once spliced away.
    let mut live: Vec<Option<[usize; 2]>> = Vec::with_capacity(arcs.len());
    let mut below: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut above: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &[a, b] in arcs {
        let (ca, cb) = (class[a], class[b]);
        if ca == cb {
            continue;
        }
        let (lo, hi) = if values[ca] < values[cb] { (ca, cb) } else { (cb, ca) };
        let id = live.len();
        live.push(Some([lo, hi]));
        above[lo].push(id);
        below[hi].push(id);
    }

    let mut alive = vec![false; n];
    for v in 0..n {
        alive[class[v]] = true;
    }
    for v in 0..n {
        if !alive[v] || below[v].len() != 1 || above[v].len() != 1 {
            continue;
        }
        let (down, up) = (below[v][0], above[v][0]);
        let lo = live[down].expect("live arc")[0];
        let hi = live[up].expect("live arc")[1];
        live[down] = Some([lo, hi]);
        live[up] = None;
        let slot = below[hi].iter().position(|&a| a == up).expect("arc registered at its top");
        below[hi][slot] = down;
        alive[v] = false;
    }

    // Representative vertex of each class: the first one in sweep order.
    let mut rep: Vec<Option<usize>> = vec![None; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    for &v in &order {
        let c = class[v];
        if rep[c].is_none() {
            rep[c] = Some(v);
        }
    }
    let mut kept: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    kept.sort_by(|&a, &b| {
        values[a]
            .total_cmp(&values[b])
            .then(rep[a].cmp(&rep[b]))
    });
    let mut new_id = vec![usize::MAX; n];
    let nodes = kept
        .iter()
        .enumerate()
        .map(|(id, &c)| {
            new_id[c] = id;
            ReebNode {
                id,
                value: values[c],
                vertex: rep[c].and_then(|r| provenance[r]),
            }
        })
        .collect();
    let edges = live
        .iter()
        .flatten()
        .map(|&[a, b]| [new_id[a], new_id[b]])
        .collect();
    ReebGraph::from_parts(nodes, edges)
}
