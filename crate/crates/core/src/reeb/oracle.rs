use super::{simplify, ReebGraph};
use crate::complex::{ScalarField, SimplicialComplex};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

pub const DEFAULT_ORACLE_LIMIT: usize = 10_000;

/// Brute-force Reeb graph for cross-checking [`super::reeb_graph`].
///
/// Computes the level set at every distinct vertex value and inside every
/// gap between them by clipping each simplex (tetrahedra
/// included), then glues each middle component to the components it
/// touches at the two neighbouring levels.
pub fn slab_oracle(x: &SimplicialComplex, f: &ScalarField) -> Result<ReebGraph> {
    slab_oracle_with_limit(x, f, DEFAULT_ORACLE_LIMIT)
}

pub fn slab_oracle_with_limit(x: &SimplicialComplex, f: &ScalarField, limit: usize) -> Result<ReebGraph> {
    f.check_len(x)?;
    if let Some(v) = f.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(v));
    }
    let size = x.num_simplices();
    if size > limit {
        return Err(Error::Guard {
            what: "slab oracle simplices",
            limit,
            actual: size,
        });
    }
    let vals = f.values();
    let n = x.num_vertices();
    if n == 0 {
        return ReebGraph::new(&[], &[]);
    }
    let mut levels: Vec<f64> = vals.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let simplices: Vec<Vec<usize>> = x.simplices().collect();
    let edge_atom = |a: usize, b: usize| -> usize {
        let key = [a.min(b), a.max(b)];
        n + x.edges().binary_search(&key).expect("face edge exists")
    };
    let atoms = n + x.edges().len();

    // Level set between `lo` and `hi`, both included. Atoms are vertices
    // inside the range and edges reaching across it; each simplex glues the
    // atoms it contains. With lo == hi this is the level set at that value.
    // With lo < hi consecutive vertex values it stands for any level in the
    // open gap, with no arithmetic on the values.
    let level = |lo: f64, hi: f64| -> (UnionFind, Vec<bool>) {
        let mut uf = UnionFind::new(atoms);
        let mut present = vec![false; atoms];
        for s in &simplices {
            let mut first = None;
            let mut add = |atom: usize, uf: &mut UnionFind| {
                present[atom] = true;
                match first {
                    None => first = Some(atom),
                    Some(a) => {
                        uf.union(a, atom);
                    }
                }
            };
            for (i, &a) in s.iter().enumerate() {
                if lo == hi && vals[a] == lo {
                    add(a, &mut uf);
                }
                for &b in &s[i + 1..] {
                    let (fa, fb) = (vals[a], vals[b]);
                    let (emin, emax) = (fa.min(fb), fa.max(fb));
                    let crosses = if lo == hi { emin < lo && lo < emax } else { emin <= lo && hi <= emax };
                    if crosses {
                        add(edge_atom(a, b), &mut uf);
                    }
                }
            }
        }
        (uf, present)
    };

    let mut node_values = Vec::new();
    let mut provenance = Vec::new();
    let mut arcs = Vec::new();

    // Node ids of the components of one level.
    let register = |uf: &mut UnionFind, present: &[bool], c: f64, node_values: &mut Vec<f64>,
                        provenance: &mut Vec<Option<usize>>| {
        let mut id = vec![usize::MAX; atoms];
        for a in 0..atoms {
            if !present[a] {
                continue;
            }
            let r = uf.find(a);
            if id[r] == usize::MAX {
                id[r] = node_values.len();
                node_values.push(c);
                provenance.push(None);
            }
            if a < n && provenance[id[r]].is_none() {
                provenance[id[r]] = Some(a);
            }
        }
        id
    };

    let (mut below_uf, below_present) = level(levels[0], levels[0]);
    let mut below_id = register(&mut below_uf, &below_present, levels[0], &mut node_values, &mut provenance);
    for w in levels.windows(2) {
        let (c0, c1) = (w[0], w[1]);
        let (mut above_uf, above_present) = level(c1, c1);
        let above_id = register(&mut above_uf, &above_present, c1, &mut node_values, &mut provenance);
        let (mut mid_uf, mid_present) = level(c0, c1);

        let mut seen = vec![false; atoms];
        for a in n..atoms {
            if !mid_present[a] {
                continue;
            }
            let r = mid_uf.find(a);
            if seen[r] {
                continue;
            }
            seen[r] = true;
            let [u, v] = x.edges()[a - n];
            let (p, q) = if vals[u] < vals[v] { (u, v) } else { (v, u) };
            // Where this edge meets the bounding levels: its endpoint if
            // the endpoint sits on the level, the edge itself otherwise.
            let bottom = if vals[p] == c0 { p } else { a };
            let top = if vals[q] == c1 { q } else { a };
            let lo_node = below_id[below_uf.find(bottom)];
            let hi_node = above_id[above_uf.find(top)];
            arcs.push([lo_node, hi_node]);
        }
        below_uf = above_uf;
        below_id = above_id;
    }
    simplify(&node_values, &provenance, &arcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::thicken_global;
    use crate::reeb::{is_isomorphic, reeb_graph};

    #[test]
    fn constant_field() {
        let x = SimplicialComplex::from_simplices(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let g = slab_oracle(&x, &ScalarField::constant(3, 1.0)).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (1, 0));
    }

    #[test]
    fn agrees_on_thickened_circle() {
        let k = 10;
        let coords = (0..k)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / k as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let x = SimplicialComplex::from_simplices(coords, (0..k).map(|i| vec![i, (i + 1) % k])).unwrap();
        let f = ScalarField::height(&x);
        for eps in [0.3, 0.7, 1.2] {
            let t = thicken_global(&x, &f, eps).unwrap();
            let a = reeb_graph(t.complex(), t.field()).unwrap();
            let b = slab_oracle(t.complex(), t.field()).unwrap();
            assert!(is_isomorphic(&a, &b, 1e-12).unwrap(), "eps {eps}\n{a:?}\n{b:?}");
        }
    }

    #[test]
    fn guard() {
        let x = SimplicialComplex::from_simplices(vec![vec![0.0], vec![1.0]], vec![vec![0, 1]]).unwrap();
        let err = slab_oracle_with_limit(&x, &ScalarField::height(&x), 2).unwrap_err();
        assert!(matches!(err, Error::Guard { .. }));
    }
}
