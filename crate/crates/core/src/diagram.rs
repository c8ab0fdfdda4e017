//! Extended persistence of functions on graphs, the bottleneck distance,
//! and a lower bound on the interleaving distance built from them.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reeb::ReebGraph;

/// Largest diagram size accepted by [`bottleneck`].
pub const MAX_BOTTLENECK_POINTS: usize = 128;

/// Default ratio between the bottleneck distance of extended diagrams and
/// the interleaving distance it bounds from below.
pub const DEFAULT_PROXY_CONSTANT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Ordinary,
    Relative,
    Extended,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
    pub dim: u8,
    pub class: PointClass,
    /// Graph nodes giving the birth and death values, when known.
    #[serde(skip)]
    pub nodes: Option<[usize; 2]>,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64, dim: u8, class: PointClass) -> Self {
        DiagramPoint {
            birth,
            death,
            dim,
            class,
            nodes: None,
        }
    }

    pub fn persistence(&self) -> f64 {
        (self.death - self.birth).abs()
    }

    fn group(&self) -> (u8, PointClass) {
        (self.dim, self.class)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn new(points: Vec<DiagramPoint>) -> Self {
        PersistenceDiagram { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn of(&self, dim: u8, class: PointClass) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter().filter(move |p| p.dim == dim && p.class == class)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serialization cannot fail")
    }
}

/// Extended persistence of the node function of `g`, linear on edges.
///
/// Points, all with coordinates among the node values:
/// - ordinary, dim 0: (minimum, value where its component merges into an
///   older one) from the upward sweep;
/// - relative, dim 1: (maximum, value where it merges) from the downward
///   sweep, so birth > death;
/// - extended, dim 0: (minimum, maximum) of each component;
/// - extended, dim 1: (top, bottom) of each independent loop.
///
/// Points on the diagonal are dropped.
pub fn extended_persistence(g: &ReebGraph) -> PersistenceDiagram {
    let n = g.num_nodes();
    let edges = g.edges();
    let m = edges.len();
    let value = |v: usize| g.value(v);

    // Cells: 0 is the cone point, then the ordinary vertices and edges in
    // upward order, then the cones on vertices and on edges in downward
    // order. Edges enter going up with their upper value and going down
    // with their lower value.
    #[derive(Clone, Copy)]
    enum Cell {
        Apex,
        Vertex(usize),
        Edge(usize),
        ConeVertex(usize),
        ConeEdge(usize),
    }
    let mut up: Vec<(f64, u8, usize)> = (0..n).map(|v| (value(v), 0, v)).collect();
    up.extend(edges.iter().enumerate().map(|(e, &[_, b])| (value(b), 1, e)));
    up.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut down: Vec<(f64, u8, usize)> = (0..n).map(|v| (value(v), 0, v)).collect();
    down.extend(edges.iter().enumerate().map(|(e, &[a, _])| (value(a), 1, e)));
    down.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut cells = vec![Cell::Apex];
    cells.extend(up.iter().map(|&(_, d, i)| if d == 0 { Cell::Vertex(i) } else { Cell::Edge(i) }));
    cells.extend(down.iter().map(|&(_, d, i)| if d == 0 { Cell::ConeVertex(i) } else { Cell::ConeEdge(i) }));

    let mut vertex_pos = vec![0; n];
    let mut edge_pos = vec![0; m];
    let mut cone_vertex_pos = vec![0; n];
    for (pos, c) in cells.iter().enumerate() {
        match *c {
            Cell::Vertex(v) => vertex_pos[v] = pos,
            Cell::Edge(e) => edge_pos[e] = pos,
            Cell::ConeVertex(v) => cone_vertex_pos[v] = pos,
            _ => {}
        }
    }

    // Boundaries over Z/2, as sorted position lists.
    let boundary = |c: Cell| -> Vec<usize> {
        let mut b = match c {
            Cell::Apex | Cell::Vertex(_) => Vec::new(),
            Cell::Edge(e) => vec![vertex_pos[edges[e][0]], vertex_pos[edges[e][1]]],
            Cell::ConeVertex(v) => vec![0, vertex_pos[v]],
            Cell::ConeEdge(e) => {
                let [a, b] = edges[e];
                vec![edge_pos[e], cone_vertex_pos[a], cone_vertex_pos[b]]
            }
        };
        b.sort_unstable();
        b
    };

    let total = cells.len();
    let mut columns: Vec<Vec<usize>> = cells.iter().map(|&c| boundary(c)).collect();
    let mut owner: Vec<Option<usize>> = vec![None; total];
    let mut pairs = Vec::new();
    for j in 0..total {
        while let Some(&low) = columns[j].last() {
            match owner[low] {
                Some(k) => {
                    let other = std::mem::take(&mut columns[k]);
                    columns[j] = symmetric_difference(&columns[j], &other);
                    columns[k] = other;
                }
                None => {
                    owner[low] = Some(j);
                    pairs.push((low, j));
                    break;
                }
            }
        }
    }

    let node_and_value = |c: Cell, upward_edge: bool| -> (usize, f64) {
        match c {
            Cell::Vertex(v) | Cell::ConeVertex(v) => (v, value(v)),
            Cell::Edge(e) | Cell::ConeEdge(e) => {
                let v = if upward_edge { edges[e][1] } else { edges[e][0] };
                (v, value(v))
            }
            Cell::Apex => unreachable!("the apex is never paired"),
        }
    };

    let mut points = Vec::new();
    for (i, j) in pairs {
        let (ci, cj) = (cells[i], cells[j]);
        let (dim, class) = match (ci, cj) {
            (Cell::Vertex(_), Cell::Edge(_)) => (0, PointClass::Ordinary),
            (Cell::Vertex(_), Cell::ConeVertex(_)) => (0, PointClass::Extended),
            (Cell::Edge(_), Cell::ConeEdge(_)) => (1, PointClass::Extended),
            (Cell::ConeVertex(_), Cell::ConeEdge(_)) => (1, PointClass::Relative),
            // the apex pairs with nothing; anything else cannot occur
            _ => continue,
        };
        let (bn, birth) = node_and_value(ci, true);
        let (dn, death) = node_and_value(cj, matches!(cj, Cell::Edge(_)));
        if birth == death {
            continue;
        }
        points.push(DiagramPoint {
            birth,
            death,
            dim,
            class,
            nodes: Some([bn, dn]),
        });
    }
    points.sort_by(|a, b| {
        (a.dim, a.class)
            .cmp(&(b.dim, b.class))
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
    PersistenceDiagram { points }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn linf(p: &DiagramPoint, q: &DiagramPoint) -> f64 {
    (p.birth - q.birth).abs().max((p.death - q.death).abs())
}

/// Bottleneck distance: the least `r` such that points can be matched
/// within sup-norm distance `r`, matching only points of equal dimension
/// and class, with each unmatched point charged half its persistence.
pub fn bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<f64> {
    for d in [a, b] {
        if d.len() > MAX_BOTTLENECK_POINTS {
            return Err(Error::Guard {
                what: "bottleneck diagram points",
                limit: MAX_BOTTLENECK_POINTS,
                actual: d.len(),
            });
        }
    }
    let mut groups: Vec<(u8, PointClass)> = a.points.iter().chain(&b.points).map(|p| p.group()).collect();
    groups.sort();
    groups.dedup();
    let mut worst: f64 = 0.0;
    for g in groups {
        let p: Vec<&DiagramPoint> = a.points.iter().filter(|x| x.group() == g).collect();
        let q: Vec<&DiagramPoint> = b.points.iter().filter(|x| x.group() == g).collect();
        worst = worst.max(group_bottleneck(&p, &q));
    }
    Ok(worst)
}

fn group_bottleneck(p: &[&DiagramPoint], q: &[&DiagramPoint]) -> f64 {
    let (n, k) = (p.len(), q.len());
    let mut candidates: Vec<f64> = Vec::with_capacity(n * k + n + k + 1);
    candidates.push(0.0);
    for x in p {
        candidates.push(x.persistence() / 2.0);
        for y in q {
            candidates.push(linf(x, y));
        }
    }
    for y in q {
        candidates.push(y.persistence() / 2.0);
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    // The largest candidate is always feasible: everything can go to the
    // diagonal.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(p, q, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Left side: the points of `p`, then one diagonal slot per point of `q`.
/// Right side: the points of `q`, then one diagonal slot per point of `p`.
fn perfect_matching(p: &[&DiagramPoint], q: &[&DiagramPoint], r: f64) -> bool {
    let (n, k) = (p.len(), q.len());
    let size = n + k;
    let adj: Vec<Vec<usize>> = (0..size)
        .map(|i| {
            let mut out = Vec::new();
            if i < n {
                for (j, y) in q.iter().enumerate() {
                    if linf(p[i], y) <= r {
                        out.push(j);
                    }
                }
                if p[i].persistence() / 2.0 <= r {
                    out.push(k + i);
                }
            } else {
                let j = i - n;
                if q[j].persistence() / 2.0 <= r {
                    out.push(j);
                }
                // diagonal to diagonal is free
                out.extend(k..k + n);
            }
            out
        })
        .collect();
    let mut partner: Vec<Option<usize>> = vec![None; size];
    for i in 0..size {
        let mut seen = vec![false; size];
        if !augment(i, &adj, &mut partner, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(i: usize, adj: &[Vec<usize>], partner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        let free = match partner[j] {
            None => true,
            Some(other) => augment(other, adj, partner, seen),
        };
        if free {
            partner[j] = Some(i);
            return true;
        }
    }
    false
}

/// `bottleneck(extended diagrams) / proxy_constant`, a lower bound on the
/// interleaving distance of the two graphs for a valid constant.
pub fn interleaving_lower_bound(g: &ReebGraph, h: &ReebGraph, proxy_constant: f64) -> Result<f64> {
    if !(proxy_constant > 0.0 && proxy_constant.is_finite()) {
        return Err(Error::invalid(format!("proxy constant must be positive, got {proxy_constant}")));
    }
    let d = bottleneck(&extended_persistence(g), &extended_persistence(h))?;
    Ok(d / proxy_constant)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(b: f64, d: f64) -> DiagramPoint {
        DiagramPoint::new(b, d, 0, PointClass::Ordinary)
    }

    fn triples(d: &PersistenceDiagram) -> Vec<(f64, f64, u8, PointClass)> {
        d.points.iter().map(|p| (p.birth, p.death, p.dim, p.class)).collect()
    }

    #[test]
    fn interval() {
        let g = ReebGraph::new(&[0.0, 1.0], &[[0, 1]]).unwrap();
        let d = extended_persistence(&g);
        assert_eq!(triples(&d), vec![(0.0, 1.0, 0, PointClass::Extended)]);
    }

    #[test]
    fn circle() {
        let g = ReebGraph::new(&[0.0, 2.0], &[[0, 1], [0, 1]]).unwrap();
        let d = extended_persistence(&g);
        assert_eq!(
            triples(&d),
            vec![(0.0, 2.0, 0, PointClass::Extended), (2.0, 0.0, 1, PointClass::Extended)]
        );
    }

    #[test]
    fn y_shape_and_its_mirror() {
        // two minima merging at 2, one maximum at 3
        let y = ReebGraph::new(&[0.0, 1.0, 2.0, 3.0], &[[0, 2], [1, 2], [2, 3]]).unwrap();
        let d = extended_persistence(&y);
        assert_eq!(
            triples(&d),
            vec![(1.0, 2.0, 0, PointClass::Ordinary), (0.0, 3.0, 0, PointClass::Extended)]
        );
        // two maxima splitting at 1, one minimum at 0
        let v = ReebGraph::new(&[0.0, 1.0, 2.0, 3.0], &[[0, 1], [1, 2], [1, 3]]).unwrap();
        let d = extended_persistence(&v);
        assert_eq!(
            triples(&d),
            vec![(0.0, 3.0, 0, PointClass::Extended), (2.0, 1.0, 1, PointClass::Relative)]
        );
    }

    #[test]
    fn torus_graph() {
        // min 0, split 1, merge 2, max 3
        let g = ReebGraph::new(&[0.0, 1.0, 2.0, 3.0], &[[0, 1], [1, 2], [1, 2], [2, 3]]).unwrap();
        let d = extended_persistence(&g);
        assert_eq!(
            triples(&d),
            vec![(0.0, 3.0, 0, PointClass::Extended), (2.0, 1.0, 1, PointClass::Extended)]
        );
        let p = d.of(1, PointClass::Extended).next().unwrap();
        assert_eq!(p.nodes, Some([2, 1]));
    }

    #[test]
    fn bottleneck_basics() {
        let d = PersistenceDiagram::new(vec![pt(0.0, 1.0), pt(0.5, 3.0)]);
        assert_eq!(bottleneck(&d, &d).unwrap(), 0.0);
        let single = PersistenceDiagram::new(vec![pt(0.0, 1.0)]);
        assert_eq!(bottleneck(&single, &PersistenceDiagram::default()).unwrap(), 0.5);
        let moved = PersistenceDiagram::new(vec![pt(0.1, 1.2)]);
        assert!((bottleneck(&single, &moved).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn classes_do_not_mix() {
        let a = PersistenceDiagram::new(vec![pt(0.0, 4.0)]);
        let b = PersistenceDiagram::new(vec![DiagramPoint::new(0.0, 4.0, 0, PointClass::Extended)]);
        assert_eq!(bottleneck(&a, &b).unwrap(), 2.0);
    }

    #[test]
    fn guard() {
        let big = PersistenceDiagram::new((0..129).map(|i| pt(0.0, f64::from(i))).collect());
        assert!(matches!(bottleneck(&big, &big), Err(Error::Guard { .. })));
    }

    #[test]
    fn circles_of_different_height() {
        let a = ReebGraph::new(&[0.0, 2.0], &[[0, 1], [0, 1]]).unwrap();
        let b = ReebGraph::new(&[0.0, 1.0], &[[0, 1], [0, 1]]).unwrap();
        // extended points (0,2) vs (0,1) and (2,0) vs (1,0): both move by 1
        let lb = interleaving_lower_bound(&a, &b, DEFAULT_PROXY_CONSTANT).unwrap();
        assert!((lb - 1.0 / DEFAULT_PROXY_CONSTANT).abs() < 1e-15);
        assert_eq!(interleaving_lower_bound(&a, &a, 5.0).unwrap(), 0.0);
        assert!(interleaving_lower_bound(&a, &b, 0.0).is_err());
    }

    #[test]
    fn json_shape() {
        let d = PersistenceDiagram::new(vec![pt(0.0, 1.0)]);
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"points": [{"birth": 0.0, "death": 1.0, "dim": 0, "class": "ordinary"}]})
        );
    }
}
