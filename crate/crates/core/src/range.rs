//! Reeb graphs of fields reparametrized by a cumulative distribution.

use serde::Serialize;

use crate::complex::{subdivide_at_levels, ScalarField, SimplicialComplex, VectorField};
use crate::error::{Error, Result};
use crate::measure::{empirical_cdf, ContinuousCDF, EmpiricalMeasure};
use crate::reeb::{is_isomorphic, is_isomorphic_by, reeb_graph, IsoOptions, ReebGraph};

/// `F(f(v))` at every vertex. Between vertices the composition has extra
/// breakpoints, which are not inserted here.
pub fn compose_cdf(f: &ScalarField, cdf: &ContinuousCDF) -> ScalarField {
    ScalarField::new(f.values().iter().map(|&v| cdf.eval(v)).collect()).expect("CDF values are finite")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RangeOptions {
    /// Split edges where the field crosses a CDF knot before composing, so
    /// that flat stretches of the CDF collapse exactly. Needs dim <= 2.
    pub subdivide_at_knots: bool,
}

/// Reeb graph of `F_mu o f` for a measure `mu` on the line.
pub fn range_integrated_reeb(x: &SimplicialComplex, f: &ScalarField, mu: &EmpiricalMeasure) -> Result<ReebGraph> {
    range_integrated_reeb_with(x, f, mu, RangeOptions::default())
}

pub fn range_integrated_reeb_with(
    x: &SimplicialComplex,
    f: &ScalarField,
    mu: &EmpiricalMeasure,
    options: RangeOptions,
) -> Result<ReebGraph> {
    let cdf = mu.cdf()?;
    reeb_of_composition(x, f, &cdf, options)
}

/// Reeb graph of `F o f` for an arbitrary CDF.
pub fn reeb_of_composition(
    x: &SimplicialComplex,
    f: &ScalarField,
    cdf: &ContinuousCDF,
    options: RangeOptions,
) -> Result<ReebGraph> {
    f.check_len(x)?;
    if options.subdivide_at_knots {
        let (y, g) = subdivide_at_levels(x, f, cdf.knots())?;
        reeb_graph(&y, &compose_cdf(&g, cdf))
    } else {
        reeb_graph(x, &compose_cdf(f, cdf))
    }
}

/// One CDF per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinatewiseCDF {
    marginals: Vec<ContinuousCDF>,
}

impl CoordinatewiseCDF {
    pub fn new(marginals: Vec<ContinuousCDF>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::invalid("need at least one marginal"));
        }
        Ok(CoordinatewiseCDF { marginals })
    }

    /// Surrogate CDFs of the coordinate marginals of `mu`.
    pub fn from_measure(mu: &EmpiricalMeasure) -> Result<Self> {
        let marginals = (0..mu.dim())
            .map(|k| {
                let samples: Vec<f64> = mu.points().iter().map(|p| p[k]).collect();
                empirical_cdf(&samples, mu.masses())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(marginals)
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[ContinuousCDF] {
        &self.marginals
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.dim() {
            return Err(Error::dims(self.dim(), p.len()));
        }
        Ok(p.iter().zip(&self.marginals).map(|(&x, c)| c.eval(x)).collect())
    }

    /// Lipschitz constant of the whole map in the sup norm, which is the
    /// largest marginal constant.
    pub fn lipschitz(&self) -> f64 {
        self.marginals.iter().map(|c| c.lipschitz()).fold(0.0, f64::max)
    }
}

/// Applies each marginal CDF to its coordinate of `f`.
pub fn coordinatewise_transform(f: &VectorField, cdf: &CoordinatewiseCDF) -> Result<VectorField> {
    if f.dim() != cdf.dim() {
        return Err(Error::dims(cdf.dim(), f.dim()));
    }
    let rows = (0..f.len()).map(|v| cdf.eval(f.point(v))).collect::<Result<Vec<_>>>()?;
    VectorField::new(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    /// Whether `F` is strictly increasing on the range of `f`. When it is
    /// not, the comparison is skipped.
    pub strictly_increasing: bool,
    /// Whether the two graphs match as multigraphs with values related by
    /// `F`; `None` when skipped.
    pub isomorphic: Option<bool>,
    /// Whether they match as bare multigraphs, ignoring values.
    pub same_shape: Option<bool>,
    pub nodes: usize,
    pub passed: bool,
}

/// Checks that reparametrizing `f` by a strictly increasing `F` changes the
/// Reeb graph only by mapping its node values through `F`.
pub fn check_monotone_invariance(
    x: &SimplicialComplex,
    f: &ScalarField,
    cdf: &ContinuousCDF,
    value_tol: f64,
) -> Result<MonotoneReport> {
    f.check_len(x)?;
    if f.is_empty() || !cdf.is_strictly_increasing_on(f.min(), f.max()) {
        return Ok(MonotoneReport {
            strictly_increasing: false,
            isomorphic: None,
            same_shape: None,
            nodes: 0,
            passed: false,
        });
    }
    let plain = reeb_graph(x, f)?;
    let composed = reeb_graph(x, &compose_cdf(f, cdf))?;
    let expected = plain.map_values(|v| cdf.eval(v))?;
    let isomorphic = is_isomorphic(&composed, &expected, value_tol)?;
    let same_shape = is_isomorphic_by(&composed, &plain, IsoOptions::default(), |_, _| true)?;
    Ok(MonotoneReport {
        strictly_increasing: true,
        isomorphic: Some(isomorphic),
        same_shape: Some(same_shape),
        nodes: composed.num_nodes(),
        passed: isomorphic && same_shape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{circle, torus};
    use crate::reeb::slab_oracle;

    #[test]
    fn identity_cdf_leaves_field() {
        let f = ScalarField::new(vec![0.0, 0.25, 1.0]).unwrap();
        let id = ContinuousCDF::linear(0.0, 1.0).unwrap();
        assert_eq!(compose_cdf(&f, &id), f);
    }

    #[test]
    fn uniform_pair_at_half() {
        let cdf = EmpiricalMeasure::on_line(&[0.0, 1.0], &[1.0, 1.0]).unwrap().cdf().unwrap();
        let f = ScalarField::constant(4, 0.5);
        assert_eq!(compose_cdf(&f, &cdf), ScalarField::constant(4, 0.5));
        let below = ScalarField::constant(2, -3.0);
        assert_eq!(compose_cdf(&below, &cdf).values(), &[0.0, 0.0]);
    }

    #[test]
    fn strictly_increasing_cdf_keeps_the_torus_graph() {
        let x = torus(10, 8, 1.0, 0.4);
        let f = ScalarField::height(&x);
        let mu = EmpiricalMeasure::on_line(&[-2.0, -0.5, 0.1, 0.7, 2.0], &[1.0, 3.0, 1.0, 2.0, 1.0]).unwrap();
        let cdf = mu.cdf().unwrap();
        let rep = check_monotone_invariance(&x, &f, &cdf, 1e-12).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.nodes, 4);
        let g = range_integrated_reeb(&x, &f, &mu).unwrap();
        assert!(g.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn affine_cdf_maps_values_affinely() {
        let x = circle(12, 2.0);
        let f = ScalarField::height(&x);
        let cdf = ContinuousCDF::linear(-1.0, 3.0).unwrap();
        let g = reeb_of_composition(&x, &f, &cdf, RangeOptions::default()).unwrap();
        assert_eq!(g.values(), vec![0.25, 0.75]);
    }

    #[test]
    fn flat_stretch_is_reported() {
        let x = circle(12, 2.0);
        let f = ScalarField::height(&x);
        // no mass between 0.5 and 1.5, so F is flat over the middle of the
        // range and the check is skipped
        let cdf = empirical_cdf(&[-1.0, 0.5, 1.5, 3.0], &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let rep = check_monotone_invariance(&x, &f, &cdf, 1e-12).unwrap();
        assert!(!rep.strictly_increasing);
        assert!(rep.isomorphic.is_none());
    }

    #[test]
    fn mass_below_the_range_flattens_everything() {
        let x = circle(12, 2.0);
        let f = ScalarField::height(&x).map(|v| v + 10.0).unwrap();
        let mu = EmpiricalMeasure::on_line(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0]).unwrap();
        for subdivide in [false, true] {
            let options = RangeOptions {
                subdivide_at_knots: subdivide,
            };
            let g = range_integrated_reeb_with(&x, &f, &mu, options).unwrap();
            assert_eq!((g.num_nodes(), g.num_edges()), (1, 0));
            assert_eq!(g.value(0), 1.0);
        }
        let composed = compose_cdf(&f, &mu.cdf().unwrap());
        let oracle = slab_oracle(&x, &composed).unwrap();
        assert_eq!(oracle.num_nodes(), 1);
    }

    #[test]
    fn subdividing_captures_partial_flats() {
        // the loop spans [0, 2]; F is flat on [1.5, 3], above which the loop
        // top is squashed onto a plateau at level F(1.5)
        let x = circle(8, 2.0);
        let f = ScalarField::height(&x);
        let cdf = empirical_cdf(&[-1.0, 1.5, 3.0], &[1.0, 1.0, 0.0]).unwrap();
        let exact = reeb_of_composition(&x, &f, &cdf, RangeOptions { subdivide_at_knots: true }).unwrap();
        assert_eq!(exact.betti1(), 1);
        assert_eq!(exact.max_value(), Some(1.0));
        let (y, g) = subdivide_at_levels(&x, &f, cdf.knots()).unwrap();
        let oracle = slab_oracle(&y, &compose_cdf(&g, &cdf)).unwrap();
        assert!(is_isomorphic(&exact, &oracle, 1e-12).unwrap());
    }

    #[test]
    fn coordinatewise() {
        let mu = EmpiricalMeasure::new(
            vec![vec![0.0, 10.0], vec![1.0, 20.0], vec![2.0, 40.0]],
            vec![1.0, 1.0, 1.0],
        )
        .unwrap();
        let cdf = CoordinatewiseCDF::from_measure(&mu).unwrap();
        let f = VectorField::new(vec![vec![1.0, 30.0], vec![-5.0, 50.0]]).unwrap();
        let out = coordinatewise_transform(&f, &cdf).unwrap();
        assert!((out.point(0)[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((out.point(0)[1] - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(out.point(1), &[0.0, 1.0]);
        let bad = VectorField::new(vec![vec![1.0]]).unwrap();
        assert!(coordinatewise_transform(&bad, &cdf).is_err());
        assert!((cdf.lipschitz() - cdf.marginals()[0].lipschitz().max(cdf.marginals()[1].lipschitz())).abs() == 0.0);
    }

    #[test]
    fn one_dimensional_reduction() {
        let mu = EmpiricalMeasure::on_line(&[0.0, 0.3, 1.0], &[1.0, 2.0, 1.0]).unwrap();
        let cdf = CoordinatewiseCDF::from_measure(&mu).unwrap();
        let f = ScalarField::new(vec![-0.1, 0.2, 0.5, 0.9, 1.3]).unwrap();
        let via_vector = coordinatewise_transform(&VectorField::from(&f), &cdf).unwrap();
        let direct = compose_cdf(&f, &mu.cdf().unwrap());
        assert_eq!(via_vector.component(0), direct);
    }
}
