use super::{simplify, ReebGraph};
use crate::complex::{ScalarField, SimplicialComplex};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// Reeb graph of a PL field by a sweep over vertices in (value, id) order.
///
/// Between two consecutive vertices the level set is a union of points on
/// crossing edges, glued along crossing triangles; at a vertex level the
/// vertex itself joins the edges and triangles it touches. Tetrahedra are
/// not needed: the slice of a tetrahedron is connected exactly when the
/// slices of its triangles are. Equal-valued neighbours are merged after
/// the sweep.
pub fn reeb_graph(x: &SimplicialComplex, f: &ScalarField) -> Result<ReebGraph> {
    f.check_len(x)?;
    if let Some(v) = f.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(v));
    }
    let n = x.num_vertices();
    let vals = f.values();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    let mut rank = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }

    let edges = x.edges();
    let m = edges.len();
    let mut lo = vec![0; m];
    let mut hi = vec![0; m];
    let mut starting: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &[a, b]) in edges.iter().enumerate() {
        let (p, q) = (rank[a].min(rank[b]), rank[a].max(rank[b]));
        lo[e] = p;
        hi[e] = q;
        starting[p].push(e);
    }
    let edge_id = |a: usize, b: usize| -> usize {
        let key = [a.min(b), a.max(b)];
        edges.binary_search(&key).expect("triangle edges are in the complex")
    };

    // Triangle with ranks p < q < s and its edges ps, pq, qs.
    struct Tri {
        q: usize,
        s: usize,
        ps: usize,
        pq: usize,
        qs: usize,
    }
    let mut tris = Vec::with_capacity(x.triangles().len());
    let mut tri_starting: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in x.triangles() {
        let mut vs = *t;
        vs.sort_by_key(|&v| rank[v]);
        let [a, b, c] = vs;
        tri_starting[rank[a]].push(tris.len());
        tris.push(Tri {
            q: rank[b],
            s: rank[c],
            ps: edge_id(a, c),
            pq: edge_id(a, b),
            qs: edge_id(b, c),
        });
    }

    // Element `m` of the edge union-find stands for the current vertex.
    let here = m;
    let mut uf = UnionFind::new(m + 1);
    let mut active_edges: Vec<usize> = Vec::new();
    let mut active_tris: Vec<usize> = Vec::new();

    // Pieces are interval components; arcs are classes of pieces.
    let mut pieces = UnionFind::new(0);
    let mut piece_bottom: Vec<Option<usize>> = Vec::new();
    let mut piece_top: Vec<Option<usize>> = Vec::new();
    let mut cur_piece = vec![usize::MAX; m];
    // For a passing edge: the piece below it at the last level, or None
    // if it touched the vertex there.
    let mut carried: Vec<Option<usize>> = vec![None; m];
    let mut stamp = vec![usize::MAX; m + 1];
    let mut root_piece = vec![0; m + 1];

    for i in 0..n {
        let v = order[i];

        // Level set at vertex i.
        uf.reset(here);
        for &e in &active_edges {
            uf.reset(e);
        }
        for &t in &active_tris {
            let t = &tris[t];
            if t.s == i {
                continue;
            }
            match t.q.cmp(&i) {
                std::cmp::Ordering::Equal => uf.union(here, t.ps),
                std::cmp::Ordering::Less => uf.union(t.ps, t.qs),
                std::cmp::Ordering::Greater => uf.union(t.ps, t.pq),
            };
        }
        for &e in &active_edges {
            if hi[e] == i {
                uf.union(here, e);
            }
        }
        for &e in &active_edges {
            let piece = cur_piece[e];
            if uf.same(e, here) {
                piece_top[piece] = Some(v);
                carried[e] = None;
            } else {
                carried[e] = Some(piece);
            }
        }

        active_edges.retain(|&e| hi[e] != i);
        active_edges.extend(starting[i].iter().copied());
        active_tris.retain(|&t| tris[t].s != i);
        active_tris.extend(tri_starting[i].iter().copied());
        if i + 1 == n {
            break;
        }

        // Open interval (i, i + 1).
        for &e in &active_edges {
            uf.reset(e);
        }
        for &t in &active_tris {
            let t = &tris[t];
            let other = if t.q > i { t.pq } else { t.qs };
            uf.union(t.ps, other);
        }
        for &e in &active_edges {
            let r = uf.find(e);
            if stamp[r] != i {
                stamp[r] = i;
                root_piece[r] = pieces.push();
                piece_bottom.push(None);
                piece_top.push(None);
            }
            let piece = root_piece[r];
            cur_piece[e] = piece;
            if lo[e] == i {
                piece_bottom[piece] = Some(v);
            } else {
                match carried[e] {
                    None => piece_bottom[piece] = Some(v),
                    Some(old) => {
                        pieces.union(old, piece);
                    }
                }
            }
        }
    }

    let k = pieces.len();
    let mut arc_bottom: Vec<Option<usize>> = vec![None; k];
    let mut arc_top: Vec<Option<usize>> = vec![None; k];
    for p in 0..k {
        let r = pieces.find(p);
        if let Some(b) = piece_bottom[p] {
            arc_bottom[r] = Some(b);
        }
        if let Some(t) = piece_top[p] {
            arc_top[r] = Some(t);
        }
    }
    let mut arcs = Vec::new();
    for p in 0..k {
        if pieces.find(p) != p {
            continue;
        }
        match (arc_bottom[p], arc_top[p]) {
            (Some(b), Some(t)) => arcs.push([b, t]),
            _ => return Err(Error::invalid("sweep produced an open arc")),
        }
    }
    let provenance: Vec<Option<usize>> = (0..n).map(Some).collect();
    simplify(vals, &provenance, &arcs)
}
