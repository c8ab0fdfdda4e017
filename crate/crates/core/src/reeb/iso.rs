use super::ReebGraph;
use crate::error::{Error, Result};

/// Largest node count accepted by the exhaustive isomorphism search.
pub const MAX_ISO_NODES: usize = 64;

#[derive(Debug, Clone, Copy)]
pub struct IsoOptions {
    pub max_nodes: usize,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions {
            max_nodes: MAX_ISO_NODES,
        }
    }
}

/// Whether some bijection of nodes matches values within `value_tol` and
/// preserves edge multiplicities.
pub fn is_isomorphic(g: &ReebGraph, h: &ReebGraph, value_tol: f64) -> Result<bool> {
    is_isomorphic_by(g, h, IsoOptions::default(), |a, b| (a - b).abs() <= value_tol)
}

/// Isomorphism search with a custom node-value predicate. With a predicate
/// that always holds this compares the bare multigraphs (up and down
/// degrees are still respected, so the orientation must agree).
pub fn is_isomorphic_by(
    g: &ReebGraph,
    h: &ReebGraph,
    options: IsoOptions,
    same_value: impl Fn(f64, f64) -> bool,
) -> Result<bool> {
    let n = g.num_nodes();
    for size in [n, h.num_nodes()] {
        if size > options.max_nodes {
            return Err(Error::Guard {
                what: "isomorphism nodes",
                limit: options.max_nodes,
                actual: size,
            });
        }
    }
    if n != h.num_nodes() || g.num_edges() != h.num_edges() {
        return Ok(false);
    }
    let mg = multiplicities(g);
    let mh = multiplicities(h);
    let signature = |m: &[Vec<u32>], v: usize| -> (u32, u32) {
        let up = m[v].iter().sum();
        let down = m.iter().map(|row| row[v]).sum();
        (up, down)
    };

    // Candidate targets per source node; search most constrained first.
    let mut candidates: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| signature(&mg, a) == signature(&mh, b) && same_value(g.value(a), h.value(b)))
                .collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(false);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        candidates[a]
            .len()
            .cmp(&candidates[b].len())
            .then(g.value(a).total_cmp(&g.value(b)))
    });
    for c in candidates.iter_mut() {
        c.sort_by(|&a, &b| h.value(a).total_cmp(&h.value(b)));
    }

    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(extend(0, &order, &candidates, &mg, &mh, &mut image, &mut used))
}

fn multiplicities(g: &ReebGraph) -> Vec<Vec<u32>> {
    let n = g.num_nodes();
    let mut m = vec![vec![0u32; n]; n];
    for &[a, b] in g.edges() {
        m[a][b] += 1;
    }
    m
}

fn extend(
    depth: usize,
    order: &[usize],
    candidates: &[Vec<usize>],
    mg: &[Vec<u32>],
    mh: &[Vec<u32>],
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let a = order[depth];
    for &b in &candidates[a] {
        if used[b] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&p| {
            let q = image[p];
            mg[a][p] == mh[b][q] && mg[p][a] == mh[q][b]
        });
        if !consistent {
            continue;
        }
        image[a] = b;
        used[b] = true;
        if extend(depth + 1, order, candidates, mg, mh, image, used) {
            return true;
        }
        used[b] = false;
        image[a] = usize::MAX;
    }
    false
}
