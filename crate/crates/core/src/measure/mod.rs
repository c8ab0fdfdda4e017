//! Empirical probability measures and the distances built on them.

mod cdf;
mod dtm;
mod kernel;
mod wasserstein;

use crate::complex::euclidean;
use crate::error::{Error, Result};

pub use cdf::{empirical_cdf, ks_distance, ContinuousCDF};
pub use dtm::{dtm, dtm_field, quantile_radius};
pub use kernel::{kdist_field, kdist_to_measure, kernel_distance, KernelDistanceToMeasure, KernelSpec};
pub use wasserstein::{wasserstein2, MAX_TRANSPORT_SUPPORT};

/// A finitely supported probability measure in `R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    dim: usize,
    points: Vec<Vec<f64>>,
    masses: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Normalizes nonnegative `weights` to unit total mass.
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("measure needs at least one point"));
        }
        if points.len() != weights.len() {
            return Err(Error::dims(points.len(), weights.len()));
        }
        let dim = points[0].len();
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::dims(dim, p.len()));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::invalid(format!("weights must be finite and nonnegative, found {w}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("total mass must be positive"));
        }
        let masses = weights.iter().map(|w| w / total).collect();
        Ok(EmpiricalMeasure { dim, points, masses })
    }

    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0; n])
    }

    pub fn dirac(point: Vec<f64>) -> Result<Self> {
        Self::new(vec![point], vec![1.0])
    }

    /// A measure on the real line.
    pub fn on_line(samples: &[f64], weights: &[f64]) -> Result<Self> {
        Self::new(samples.iter().map(|&x| vec![x]).collect(), weights.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points.iter().map(Vec::as_slice).zip(self.masses.iter().copied())
    }

    /// Applies `shift` to every point, keeping the masses.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::dims(self.dim, shift.len()));
        }
        let points = self
            .points
            .iter()
            .map(|p| p.iter().zip(shift).map(|(a, b)| a + b).collect())
            .collect();
        Ok(EmpiricalMeasure {
            dim: self.dim,
            points,
            masses: self.masses.clone(),
        })
    }

    /// The continuous surrogate CDF of a measure on the line.
    pub fn cdf(&self) -> Result<ContinuousCDF> {
        if self.dim != 1 {
            return Err(Error::dims(1, self.dim));
        }
        let samples: Vec<f64> = self.points.iter().map(|p| p[0]).collect();
        empirical_cdf(&samples, &self.masses)
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::dims(self.dim, x.len()));
        }
        Ok(())
    }

    pub(crate) fn distances(&self, x: &[f64]) -> Vec<f64> {
        self.points.iter().map(|p| euclidean(p, x)).collect()
    }
}

/// Parses CSV rows `x[,y[,z]],weight` into a normalized measure.
pub fn parse_weighted_points(text: &str) -> Result<EmpiricalMeasure> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut width = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let n = i + 1;
        let mut cols = Vec::new();
        for tok in line.split(',') {
            let tok = tok.trim();
            let x: f64 = tok
                .parse()
                .map_err(|_| Error::parse(n, format!("non-numeric value `{tok}`")))?;
            if !x.is_finite() {
                return Err(Error::parse(n, format!("non-finite value `{tok}`")));
            }
            cols.push(x);
        }
        if !(2..=4).contains(&cols.len()) {
            return Err(Error::parse(n, format!("expected 2 to 4 columns, found {}", cols.len())));
        }
        match width {
            None => width = Some(cols.len()),
            Some(w) if w != cols.len() => {
                return Err(Error::parse(n, format!("ragged row: expected {w} columns, found {}", cols.len())))
            }
            _ => {}
        }
        let w = cols.pop().unwrap_or_default();
        if w < 0.0 {
            return Err(Error::parse(n, format!("negative weight {w}")));
        }
        points.push(cols);
        weights.push(w);
    }
    if points.is_empty() {
        return Err(Error::parse(1, "no weighted points"));
    }
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::invalid("total mass must be positive"));
    }
    EmpiricalMeasure::new(points, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_normalization() {
        let m = parse_weighted_points("0,1\n1,1").unwrap();
        assert_eq!(m.masses(), &[0.5, 0.5]);
        assert_eq!(m.dim(), 1);
    }

    #[test]
    fn zero_weight_point_retained() {
        let m = parse_weighted_points("0,2\n1,0\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.masses(), &[1.0, 0.0]);
    }

    #[test]
    fn hundred_rows_sum_to_one() {
        // Weights 7.3 * (i + 1) / 5050 sum to 7.3 over i = 0..100.
        let mut text = String::new();
        let mut expected = 0.0;
        for i in 0..100 {
            let w = 7.3 * (i + 1) as f64 / 5050.0;
            expected += w;
            text.push_str(&format!("{},{},{}\n", i, i * 2, w));
        }
        assert!((expected - 7.3).abs() < 1e-9);
        let m = parse_weighted_points(&text).unwrap();
        let total: f64 = m.masses().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(m.dim(), 2);
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(parse_weighted_points("0,1\n1,-1"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_weighted_points("0,0\n1,0").is_err());
        assert!(matches!(parse_weighted_points("0,1\n1,2,1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_weighted_points("a,1"), Err(Error::Parse { line: 1, .. })));
    }
}
