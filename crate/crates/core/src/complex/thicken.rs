use super::{ScalarField, SimplicialComplex};
use crate::error::{Error, Result};

/// Controls how finely each vertex column of a thickening is layered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThickenOptions {
    /// Number of layers per column; odd and at least 3 so that the offsets
    /// `-r`, `0` and `+r` are always present.
    pub layers: usize,
}

impl Default for ThickenOptions {
    fn default() -> Self {
        ThickenOptions { layers: 3 }
    }
}

/// A triangulated region `{(x, t) : |t| <= r(x)}` over a base complex,
/// carrying the field `f(x) + t`.
#[derive(Debug, Clone)]
pub struct ThickenedComplex {
    complex: SimplicialComplex,
    base_vertex: Vec<usize>,
    offset: Vec<f64>,
    field: ScalarField,
    radius: Vec<f64>,
    layers: usize,
}

impl ThickenedComplex {
    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn into_parts(self) -> (SimplicialComplex, ScalarField) {
        (self.complex, self.field)
    }

    /// Base vertex of thickened vertex `v`.
    pub fn base_vertex(&self, v: usize) -> usize {
        self.base_vertex[v]
    }

    /// Offset `t` of thickened vertex `v`.
    pub fn offset(&self, v: usize) -> f64 {
        self.offset[v]
    }

    /// Half-width of the column over base vertex `b`.
    pub fn radius(&self, b: usize) -> f64 {
        self.radius[b]
    }

    /// `M`, the largest column half-width.
    pub fn sup_radius(&self) -> f64 {
        self.radius.iter().copied().fold(0.0, f64::max)
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    /// Index of the thickened vertex at `layer` over base vertex `base`.
    pub fn vertex_index(&self, base: usize, layer: usize) -> usize {
        base * self.layers + layer
    }
}

/// Triangulates `X x [-eps, eps]` with field `f(x) + t`.
pub fn thicken_global(x: &SimplicialComplex, f: &ScalarField, eps: f64) -> Result<ThickenedComplex> {
    thicken_global_with(x, f, eps, ThickenOptions::default())
}

pub fn thicken_global_with(
    x: &SimplicialComplex,
    f: &ScalarField,
    eps: f64,
    options: ThickenOptions,
) -> Result<ThickenedComplex> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("thickening radius must be positive, got {eps}")));
    }
    build(x, f, &vec![eps; x.num_vertices()], options)
}

/// Triangulates `X_r = {(x, t) : |t| <= r(x)}` with field `f(x) + t`, where
/// `r` is interpolated linearly on each simplex.
pub fn thicken_local(x: &SimplicialComplex, f: &ScalarField, r: &ScalarField) -> Result<ThickenedComplex> {
    thicken_local_with(x, f, r, ThickenOptions::default())
}

pub fn thicken_local_with(
    x: &SimplicialComplex,
    f: &ScalarField,
    r: &ScalarField,
    options: ThickenOptions,
) -> Result<ThickenedComplex> {
    r.check_len(x)?;
    if let Some(v) = r.values().iter().position(|&t| t <= 0.0) {
        return Err(Error::invalid(format!(
            "smoothing factor must be positive, r({v}) = {}",
            r.value(v)
        )));
    }
    build(x, f, r.values(), options)
}

fn build(
    x: &SimplicialComplex,
    f: &ScalarField,
    radius: &[f64],
    options: ThickenOptions,
) -> Result<ThickenedComplex> {
    f.check_len(x)?;
    let layers = options.layers;
    if layers < 3 || layers.is_multiple_of(2) {
        return Err(Error::invalid(format!("layer count must be odd and >= 3, got {layers}")));
    }
    if x.dim().unwrap_or(0) > 2 {
        return Err(Error::invalid("only complexes of dimension <= 2 can be thickened"));
    }
    // Offsets are r * c with c in [-1, 1]; c is exactly -1, 0, 1 at the
    // bottom, middle and top layers.
    let half = (layers - 1) / 2;
    let coeff: Vec<f64> = (0..layers)
        .map(|j| (j as f64 - half as f64) / half as f64)
        .collect();

    let n = x.num_vertices();
    let mut coords = Vec::with_capacity(n * layers);
    let mut base_vertex = Vec::with_capacity(n * layers);
    let mut offset = Vec::with_capacity(n * layers);
    let mut values = Vec::with_capacity(n * layers);
    for b in 0..n {
        for &c in &coeff {
            let t = radius[b] * c;
            // Coordinates are for export only; a base already in R^3 keeps
            // its first two axes so the prism still fits in R^3.
            let base = x.coords(b);
            let mut p = base[..base.len().min(2)].to_vec();
            p.push(t);
            coords.push(p);
            base_vertex.push(b);
            offset.push(t);
            values.push(f.value(b) + t);
        }
    }

    // Staircase prism decomposition: for a base simplex v0 < ... < vk and
    // layers j, j+1, the i-th piece is (v0,j)..(vi,j),(vi,j+1)..(vk,j+1).
    let id = |v: usize, j: usize| v * layers + j;
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    for simplex in x.simplices() {
        for j in 0..layers - 1 {
            for i in 0..simplex.len() {
                let mut piece = Vec::with_capacity(simplex.len() + 1);
                piece.extend(simplex[..=i].iter().map(|&v| id(v, j)));
                piece.extend(simplex[i..].iter().map(|&v| id(v, j + 1)));
                pieces.push(piece);
            }
        }
    }
    let complex = SimplicialComplex::from_simplices(coords, pieces)?;
    Ok(ThickenedComplex {
        complex,
        base_vertex,
        offset,
        field: ScalarField::new(values)?,
        radius: radius.to_vec(),
        layers,
    })
}
