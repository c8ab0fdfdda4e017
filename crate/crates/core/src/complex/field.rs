use serde::{Deserialize, Serialize};

use super::SimplicialComplex;
use crate::error::{Error, Result};

/// Real values on the vertices of a complex, interpolated linearly on each
/// simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(v));
        }
        Ok(ScalarField { values })
    }

    /// Like [`ScalarField::new`] but also checks the length against `complex`.
    pub fn on(complex: &SimplicialComplex, values: Vec<f64>) -> Result<Self> {
        if values.len() != complex.num_vertices() {
            return Err(Error::dims(complex.num_vertices(), values.len()));
        }
        Self::new(values)
    }

    pub fn constant(n: usize, value: f64) -> Self {
        ScalarField { values: vec![value; n] }
    }

    /// The last coordinate of every vertex.
    pub fn height(complex: &SimplicialComplex) -> Self {
        let values = complex
            .all_coords()
            .iter()
            .map(|c| c.last().copied().unwrap_or(0.0))
            .collect();
        ScalarField { values }
    }

    pub fn from_fn(complex: &SimplicialComplex, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        Self::new(complex.all_coords().iter().map(|c| f(c)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&x| f(x)).collect())
    }

    /// Vertex-wise sup distance. On linear simplices this is the sup norm of
    /// the difference of the interpolated functions.
    pub fn sup_distance(&self, other: &ScalarField) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::dims(self.len(), other.len()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_len(&self, complex: &SimplicialComplex) -> Result<()> {
        if self.len() != complex.num_vertices() {
            return Err(Error::dims(complex.num_vertices(), self.len()));
        }
        Ok(())
    }
}

/// `d` real values per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    dim: usize,
    values: Vec<f64>,
}

impl VectorField {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(1, Vec::len);
        if dim == 0 {
            return Err(Error::invalid("vector field needs at least one component"));
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (v, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::dims(dim, row.len()));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(v));
            }
            values.extend_from_slice(row);
        }
        Ok(VectorField { dim, values })
    }

    pub fn from_components(components: &[ScalarField]) -> Result<Self> {
        let n = components.first().map_or(0, ScalarField::len);
        if let Some(c) = components.iter().find(|c| c.len() != n) {
            return Err(Error::dims(n, c.len()));
        }
        Self::new((0..n).map(|v| components.iter().map(|c| c.value(v)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, v: usize) -> &[f64] {
        &self.values[v * self.dim..(v + 1) * self.dim]
    }

    pub fn component(&self, i: usize) -> ScalarField {
        ScalarField {
            values: (0..self.len()).map(|v| self.point(v)[i]).collect(),
        }
    }

    /// Vertex-wise sup of the l-infinity norm of the difference.
    pub fn sup_distance(&self, other: &VectorField) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::dims(self.dim, other.dim));
        }
        if self.len() != other.len() {
            return Err(Error::dims(self.len(), other.len()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl From<&ScalarField> for VectorField {
    fn from(f: &ScalarField) -> Self {
        VectorField {
            dim: 1,
            values: f.values.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(ScalarField::new(vec![0.0, f64::NAN]), Err(Error::NonFinite(1))));
        assert!(VectorField::new(vec![vec![0.0], vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn ragged_vector_field_rejected() {
        assert!(VectorField::new(vec![vec![0.0, 1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn sup_distance_is_vertex_max() {
        let a = VectorField::new(vec![vec![0.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let b = VectorField::new(vec![vec![0.5, 1.0], vec![2.0, -1.0]]).unwrap();
        assert_eq!(a.sup_distance(&b).unwrap(), 3.0);
        assert_eq!(a.component(1).values(), &[1.0, 2.0]);
    }
}
