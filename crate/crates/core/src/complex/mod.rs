//! Simplicial complexes of dimension at most 3 carrying piecewise-linear
//! fields, together with their triangulated thickenings.

mod field;
mod io;
mod subdivide;
mod thicken;

use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub use field::{ScalarField, VectorField};
pub use io::{parse_field_csv, parse_off, write_off, ComplexDocument, VertexEntry};
pub use subdivide::subdivide_at_levels;
pub use thicken::{thicken_global, thicken_global_with, thicken_local, thicken_local_with,
    ThickenOptions, ThickenedComplex};

/// A finite abstract simplicial complex with vertex coordinates.
///
/// Vertices are identified by their index. Every simplex is stored as an
/// ascending tuple of vertex ids, and the complex is closed under taking
/// faces.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    coords: Vec<Vec<f64>>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    tetrahedra: Vec<[usize; 4]>,
}

impl SimplicialComplex {
    /// Builds the closure of the given simplices. Each simplex is a list of
    /// 1 to 4 distinct vertex ids in any order.
    pub fn from_simplices<I, S>(coords: Vec<Vec<f64>>, simplices: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[usize]>,
    {
        check_coords(&coords)?;
        let n = coords.len();
        let mut edges = BTreeSet::new();
        let mut triangles = BTreeSet::new();
        let mut tetrahedra = BTreeSet::new();
        for simplex in simplices {
            let mut s = simplex.as_ref().to_vec();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("repeated vertex in simplex {s:?}")));
            }
            if let Some(&v) = s.iter().find(|&&v| v >= n) {
                return Err(Error::invalid(format!("simplex references missing vertex {v}")));
            }
            match s.len() {
                1 => {}
                2 => {
                    edges.insert([s[0], s[1]]);
                }
                3 => add_triangle(&mut edges, &mut triangles, [s[0], s[1], s[2]]),
                4 => {
                    let t = [s[0], s[1], s[2], s[3]];
                    for skip in 0..4 {
                        let mut face = [0; 3];
                        let mut k = 0;
                        for (i, &v) in t.iter().enumerate() {
                            if i != skip {
                                face[k] = v;
                                k += 1;
                            }
                        }
                        add_triangle(&mut edges, &mut triangles, face);
                    }
                    tetrahedra.insert(t);
                }
                k => {
                    return Err(Error::invalid(format!(
                        "simplices must have 1 to 4 vertices, found {k}"
                    )))
                }
            }
        }
        Ok(SimplicialComplex {
            coords,
            edges: edges.into_iter().collect(),
            triangles: triangles.into_iter().collect(),
            tetrahedra: tetrahedra.into_iter().collect(),
        })
    }

    /// Builds a complex from explicit simplex lists and checks every
    /// invariant (sorted tuples, no duplicates, closure) instead of closing.
    pub fn new(
        coords: Vec<Vec<f64>>,
        edges: Vec<[usize; 2]>,
        triangles: Vec<[usize; 3]>,
        tetrahedra: Vec<[usize; 4]>,
    ) -> Result<Self> {
        check_coords(&coords)?;
        let mut complex = SimplicialComplex {
            coords,
            edges,
            triangles,
            tetrahedra,
        };
        complex.edges.sort_unstable();
        complex.triangles.sort_unstable();
        complex.tetrahedra.sort_unstable();
        complex.validate()?;
        Ok(complex)
    }

    /// Checks the closure, ordering and reference invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vertices();
        fn check<const K: usize>(list: &[[usize; K]], n: usize) -> Result<()> {
            for s in list {
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::invalid(format!("simplex {s:?} is not strictly ascending")));
                }
                if s[K - 1] >= n {
                    return Err(Error::invalid(format!("simplex {s:?} references a missing vertex")));
                }
            }
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid("duplicate simplex"));
            }
            Ok(())
        }
        check(&self.edges, n)?;
        check(&self.triangles, n)?;
        check(&self.tetrahedra, n)?;
        for t in &self.tetrahedra {
            for face in [[t[0], t[1], t[2]], [t[0], t[1], t[3]], [t[0], t[2], t[3]], [t[1], t[2], t[3]]] {
                if self.triangles.binary_search(&face).is_err() {
                    return Err(Error::invalid(format!("missing face {face:?} of {t:?}")));
                }
            }
        }
        for t in &self.triangles {
            for face in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                if self.edges.binary_search(&face).is_err() {
                    return Err(Error::invalid(format!("missing face {face:?} of {t:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self, v: usize) -> &[f64] {
        &self.coords[v]
    }

    pub fn all_coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    /// Dimension of the coordinate space (0 for a complex with no vertices).
    pub fn ambient_dim(&self) -> usize {
        self.coords.first().map_or(0, Vec::len)
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn tetrahedra(&self) -> &[[usize; 4]] {
        &self.tetrahedra
    }

    /// Largest simplex dimension, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        if !self.tetrahedra.is_empty() {
            Some(3)
        } else if !self.triangles.is_empty() {
            Some(2)
        } else if !self.edges.is_empty() {
            Some(1)
        } else if self.coords.is_empty() {
            None
        } else {
            Some(0)
        }
    }

    /// Number of simplices per dimension 0..=3.
    pub fn simplex_counts(&self) -> [usize; 4] {
        [
            self.coords.len(),
            self.edges.len(),
            self.triangles.len(),
            self.tetrahedra.len(),
        ]
    }

    pub fn num_simplices(&self) -> usize {
        self.simplex_counts().iter().sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let c = self.simplex_counts();
        c[0] as i64 - c[1] as i64 + c[2] as i64 - c[3] as i64
    }

    /// Every simplex of every dimension as a vertex list, vertices first.
    pub fn simplices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.coords.len())
            .map(|v| vec![v])
            .chain(self.edges.iter().map(|s| s.to_vec()))
            .chain(self.triangles.iter().map(|s| s.to_vec()))
            .chain(self.tetrahedra.iter().map(|s| s.to_vec()))
    }

    /// Simplices that are not a proper face of another simplex.
    pub fn maximal_simplices(&self) -> Vec<Vec<usize>> {
        let n = self.coords.len();
        let mut vertex_used = vec![false; n];
        let mut edge_used = vec![false; self.edges.len()];
        let mut tri_used = vec![false; self.triangles.len()];
        for t in &self.tetrahedra {
            for face in [[t[0], t[1], t[2]], [t[0], t[1], t[3]], [t[0], t[2], t[3]], [t[1], t[2], t[3]]] {
                if let Ok(i) = self.triangles.binary_search(&face) {
                    tri_used[i] = true;
                }
            }
        }
        for t in &self.triangles {
            for face in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                if let Ok(i) = self.edges.binary_search(&face) {
                    edge_used[i] = true;
                }
            }
        }
        for e in &self.edges {
            vertex_used[e[0]] = true;
            vertex_used[e[1]] = true;
        }
        let mut out: Vec<Vec<usize>> = (0..n).filter(|&v| !vertex_used[v]).map(|v| vec![v]).collect();
        out.extend(self.edges.iter().zip(&edge_used).filter(|(_, &u)| !u).map(|(e, _)| e.to_vec()));
        out.extend(self.triangles.iter().zip(&tri_used).filter(|(_, &u)| !u).map(|(t, _)| t.to_vec()));
        out.extend(self.tetrahedra.iter().map(|t| t.to_vec()));
        out
    }

    /// Largest Euclidean distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, a) in self.coords.iter().enumerate() {
            for b in &self.coords[i + 1..] {
                best = best.max(euclidean(a, b));
            }
        }
        best
    }

    /// Number of connected components of the 1-skeleton.
    pub fn num_components(&self) -> usize {
        let mut uf = crate::unionfind::UnionFind::new(self.coords.len());
        let mut count = self.coords.len();
        for e in &self.edges {
            if !uf.same(e[0], e[1]) {
                uf.union(e[0], e[1]);
                count -= 1;
            }
        }
        count
    }
}

fn add_triangle(edges: &mut BTreeSet<[usize; 2]>, triangles: &mut BTreeSet<[usize; 3]>, t: [usize; 3]) {
    edges.insert([t[0], t[1]]);
    edges.insert([t[0], t[2]]);
    edges.insert([t[1], t[2]]);
    triangles.insert(t);
}

fn check_coords(coords: &[Vec<f64>]) -> Result<()> {
    if let Some(first) = coords.first() {
        let k = first.len();
        if k > 3 {
            return Err(Error::invalid(format!("coordinates must have at most 3 entries, found {k}")));
        }
        for (v, c) in coords.iter().enumerate() {
            if c.len() != k {
                return Err(Error::dims(k, c.len()));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(v));
            }
        }
    }
    Ok(())
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_single_triangle() {
        let c = SimplicialComplex::from_simplices(vec![vec![0.0]; 3], [[2, 0, 1]]).unwrap();
        assert_eq!(c.simplex_counts(), [3, 3, 1, 0]);
        assert!(c.validate().is_ok());
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn closure_of_tetrahedron() {
        let c = SimplicialComplex::from_simplices(vec![vec![0.0]; 4], [[0, 1, 2, 3]]).unwrap();
        assert_eq!(c.simplex_counts(), [4, 6, 4, 1]);
        assert_eq!(c.maximal_simplices(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn strict_constructor_rejects_open_complex() {
        let err = SimplicialComplex::new(vec![vec![0.0]; 3], vec![[0, 1]], vec![[0, 1, 2]], vec![]);
        assert!(err.is_err());
        let err = SimplicialComplex::new(vec![vec![0.0]; 2], vec![[1, 0]], vec![], vec![]);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_missing_vertex_and_repeats() {
        assert!(SimplicialComplex::from_simplices(vec![vec![0.0]; 2], [[0, 5]]).is_err());
        assert!(SimplicialComplex::from_simplices(vec![vec![0.0]; 2], [[1, 1]]).is_err());
    }

    #[test]
    fn maximal_simplices_include_isolated_vertices() {
        let c = SimplicialComplex::from_simplices(vec![vec![0.0]; 4], [vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(c.maximal_simplices(), vec![vec![3], vec![0, 1], vec![1, 2]]);
        assert_eq!(c.num_components(), 2);
    }
}
