use rayon::prelude::*;

use super::EmpiricalMeasure;
use crate::complex::{ScalarField, SimplicialComplex};
use crate::error::{Error, Result};

/// Points of `mu` ordered by distance to `x`, ties broken by index.
fn sorted_by_distance(mu: &EmpiricalMeasure, x: &[f64]) -> Vec<(f64, f64)> {
    let d = mu.distances(x);
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    order.into_iter().map(|i| (d[i], mu.masses()[i])).collect()
}

/// `inf { r > 0 : mu(closed ball(x, r)) > s }` for `s` in `[0, 1)`.
pub fn quantile_radius(mu: &EmpiricalMeasure, s: f64, x: &[f64]) -> Result<f64> {
    mu.check_point(x)?;
    if !(0.0..1.0).contains(&s) {
        return Err(Error::invalid(format!("quantile level must lie in [0, 1), got {s}")));
    }
    let sorted = sorted_by_distance(mu, x);
    let mut cumulative = 0.0;
    let mut last = 0.0;
    for (d, w) in sorted {
        if w <= 0.0 {
            continue;
        }
        cumulative += w;
        last = d;
        if cumulative > s {
            return Ok(d);
        }
    }
    // Rounding left the total mass a hair below s.
    Ok(last)
}

/// Distance to the measure `mu` with mass parameter `m`:
/// `sqrt((1/m) * integral_0^m quantile_radius(s)^2 ds)`.
///
/// The quantile radius is a step function of `s` with jumps at the
/// cumulative masses of the points sorted by distance, so the integral is a
/// finite sum.
pub fn dtm(mu: &EmpiricalMeasure, m: f64, x: &[f64]) -> Result<f64> {
    mu.check_point(x)?;
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::invalid(format!("mass parameter must lie in (0, 1], got {m}")));
    }
    let sorted = sorted_by_distance(mu, x);
    let last_positive = sorted.iter().rposition(|&(_, w)| w > 0.0);
    let mut integral = 0.0;
    let mut lo = 0.0;
    for (k, &(d, w)) in sorted.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let hi = if Some(k) == last_positive { f64::INFINITY } else { lo + w };
        let covered = hi.min(m) - lo;
        if covered > 0.0 {
            integral += d * d * covered;
        }
        lo = hi;
        if lo >= m {
            break;
        }
    }
    Ok((integral / m).sqrt())
}

/// Evaluates [`dtm`] at every vertex of `x`, lifting values below `floor`
/// up to `floor`.
pub fn dtm_field(x: &SimplicialComplex, mu: &EmpiricalMeasure, m: f64, floor: f64) -> Result<ScalarField> {
    if x.ambient_dim() != mu.dim() {
        return Err(Error::dims(x.ambient_dim(), mu.dim()));
    }
    let values = x
        .all_coords()
        .par_iter()
        .map(|p| dtm(mu, m, p).map(|d| d.max(floor)))
        .collect::<Result<Vec<f64>>>()?;
    ScalarField::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_points() -> EmpiricalMeasure {
        EmpiricalMeasure::uniform(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap()
    }

    /// Midpoint rule on a fine grid of s, independent of the closed form.
    fn dtm_by_quadrature(mu: &EmpiricalMeasure, m: f64, x: &[f64], steps: usize) -> f64 {
        let h = m / steps as f64;
        let sum: f64 = (0..steps)
            .map(|i| {
                let s = (i as f64 + 0.5) * h;
                let r = quantile_radius(mu, s, x).unwrap();
                r * r
            })
            .sum();
        (sum * h / m).sqrt()
    }

    #[test]
    fn third_mass_at_half() {
        let mu = three_points();
        let got = dtm(&mu, 1.0 / 3.0, &[0.5]).unwrap();
        let oracle = dtm_by_quadrature(&mu, 1.0 / 3.0, &[0.5], 30_000);
        assert!((oracle - 0.5).abs() < 1e-6);
        assert!((got - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_mass_at_origin() {
        let mu = three_points();
        let got = dtm(&mu, 1.0, &[0.0]).unwrap();
        let oracle = dtm_by_quadrature(&mu, 1.0, &[0.0], 30_000);
        let expected = (5.0f64 / 3.0).sqrt();
        assert!((oracle - expected).abs() < 1e-4);
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_on_heavy_support_point() {
        let mu = EmpiricalMeasure::new(vec![vec![0.0, 0.0], vec![3.0, 1.0]], vec![0.7, 0.3]).unwrap();
        assert_eq!(dtm(&mu, 0.5, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(dtm(&mu, 0.7, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(dtm(&mu, 0.8, &[0.0, 0.0]).unwrap() > 0.0);
    }

    #[test]
    fn quantile_radius_uses_strict_inequality() {
        let mu = three_points();
        assert_eq!(quantile_radius(&mu, 0.0, &[0.0]).unwrap(), 0.0);
        // mu(B(0, 0)) = 1/3 is not > 1/3, so the radius jumps to 1.
        assert_eq!(quantile_radius(&mu, 1.0 / 3.0, &[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        let mu = three_points();
        assert!(dtm(&mu, 0.0, &[0.0]).is_err());
        assert!(dtm(&mu, 1.5, &[0.0]).is_err());
        assert!(dtm(&mu, 0.5, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn field_is_translation_invariant() {
        let x = SimplicialComplex::from_simplices(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            [[0, 1, 2]],
        )
        .unwrap();
        let mu = EmpiricalMeasure::uniform(vec![vec![0.2, 0.1], vec![0.9, 0.4], vec![-0.5, 0.3]]).unwrap();
        let a = dtm_field(&x, &mu, 0.5, 0.0).unwrap();
        let shift = [3.0, -2.0];
        let moved: Vec<Vec<f64>> = x
            .all_coords()
            .iter()
            .map(|c| vec![c[0] + shift[0], c[1] + shift[1]])
            .collect();
        let y = SimplicialComplex::from_simplices(moved, x.triangles().to_vec()).unwrap();
        let b = dtm_field(&y, &mu.translated(&shift).unwrap(), 0.5, 0.0).unwrap();
        assert!(a.sup_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn uniform_on_vertices_small_mass_is_near_zero() {
        let x = SimplicialComplex::from_simplices(vec![vec![0.0], vec![1.0], vec![2.0]], [[0, 1], [1, 2]]).unwrap();
        let mu = EmpiricalMeasure::uniform(x.all_coords().to_vec()).unwrap();
        let f = dtm_field(&x, &mu, 1e-3, 1e-9).unwrap();
        assert!(f.values().iter().all(|&v| v == 1e-9));
    }
}
