use crate::error::{Error, Result};

/// A continuous, piecewise-linear cumulative distribution function.
///
/// Knots are strictly increasing; values start at 0, end at 1 and never
/// decrease. Evaluation interpolates linearly and clamps outside the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousCDF {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl ContinuousCDF {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::invalid("a CDF needs at least two knots and one value per knot"));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) || knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::invalid("CDF knots must be finite and strictly increasing"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("CDF values must be nondecreasing"));
        }
        if values[0] != 0.0 || *values.last().unwrap_or(&0.0) != 1.0 {
            return Err(Error::invalid("CDF values must run from 0 to 1"));
        }
        Ok(ContinuousCDF { knots, values })
    }

    /// The identity on `[lo, hi]`, rescaled to run from 0 to 1.
    pub fn linear(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo, hi], vec![0.0, 1.0])
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= k[0] {
            return self.values[0];
        }
        if x >= k[k.len() - 1] {
            return self.values[k.len() - 1];
        }
        // First knot strictly greater than x; x lies in [k[i-1], k[i]).
        let i = k.partition_point(|&t| t <= x);
        let (x0, x1) = (k[i - 1], k[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        let s = (x - x0) / (x1 - x0);
        (y0 + s * (y1 - y0)).clamp(0.0, 1.0)
    }

    /// Slope of segment `i` (between knots `i` and `i + 1`).
    pub fn slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.knots[i + 1] - self.knots[i])
    }

    /// Lipschitz constant over the whole line: the largest segment slope,
    /// since the function is flat outside the knots.
    pub fn lipschitz(&self) -> f64 {
        (0..self.knots.len() - 1).map(|i| self.slope(i)).fold(0.0, f64::max)
    }

    /// True when the function is strictly increasing on `[lo, hi]`.
    pub fn is_strictly_increasing_on(&self, lo: f64, hi: f64) -> bool {
        if lo >= hi {
            return true;
        }
        let k = &self.knots;
        if lo < k[0] || hi > k[k.len() - 1] {
            return false;
        }
        (0..k.len() - 1)
            .filter(|&i| k[i] < hi && k[i + 1] > lo)
            .all(|i| self.slope(i) > 0.0)
    }
}

/// Builds the continuous surrogate CDF of a weighted sample on the line.
///
/// Knots sit at the distinct sample values `x_0 < ... < x_n`; the value at
/// `x_0` is 0 and the value at `x_k` (k >= 1) is the cumulative mass of
/// `x_0..=x_k`. In between the function is linear, so it is strictly
/// increasing on `[x_0, x_n]` whenever all masses are positive.
pub fn empirical_cdf(samples: &[f64], masses: &[f64]) -> Result<ContinuousCDF> {
    if samples.len() != masses.len() {
        return Err(Error::dims(samples.len(), masses.len()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    if masses.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::invalid("masses must be finite and nonnegative"));
    }
    let total: f64 = masses.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("total mass must be positive"));
    }
    let mut pairs: Vec<(f64, f64)> = samples.iter().copied().zip(masses.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut knots: Vec<f64> = Vec::new();
    let mut mass: Vec<f64> = Vec::new();
    for (x, w) in pairs {
        if knots.last() == Some(&x) {
            *mass.last_mut().unwrap() += w;
        } else {
            knots.push(x);
            mass.push(w);
        }
    }
    if knots.len() < 2 {
        return Err(Error::invalid("an empirical CDF needs at least two distinct sample values"));
    }
    let mut values = Vec::with_capacity(knots.len());
    values.push(0.0);
    let mut cumulative = mass[0];
    for w in &mass[1..] {
        cumulative += w;
        values.push((cumulative / total).min(1.0));
    }
    *values.last_mut().unwrap() = 1.0;
    ContinuousCDF::new(knots, values)
}

/// `sup_x |F(x) - G(x)|`. Both functions are linear between the union of
/// their knots and constant outside it, so the sup is attained at a knot.
pub fn ks_distance(f: &ContinuousCDF, g: &ContinuousCDF) -> f64 {
    f.knots
        .iter()
        .chain(&g.knots)
        .map(|&x| (f.eval(x) - g.eval(x)).abs())
        .fold(0.0, f64::max)
        .min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(xs: &[f64]) -> ContinuousCDF {
        empirical_cdf(xs, &vec![1.0; xs.len()]).unwrap()
    }

    /// Dense grid plus ternary refinement inside the best cells.
    fn grid_sup(f: &ContinuousCDF, g: &ContinuousCDF, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        let diff = |x: f64| (f.eval(x) - g.eval(x)).abs();
        let mut cells: Vec<(f64, usize)> = (0..=n).map(|i| (diff(lo + i as f64 * h), i)).collect();
        let mut best = cells.iter().map(|c| c.0).fold(0.0, f64::max);
        cells.sort_by(|a, b| b.0.total_cmp(&a.0));
        for &(_, i) in cells.iter().take(8) {
            for (mut a, mut b) in [(lo + (i as f64 - 1.0) * h, lo + i as f64 * h), (lo + i as f64 * h, lo + (i as f64 + 1.0) * h)] {
                for _ in 0..200 {
                    let m1 = a + (b - a) / 3.0;
                    let m2 = b - (b - a) / 3.0;
                    if diff(m1) < diff(m2) {
                        a = m1;
                    } else {
                        b = m2;
                    }
                }
                best = best.max(diff(0.5 * (a + b)));
            }
        }
        best
    }

    #[test]
    fn two_points() {
        let f = uniform(&[0.0, 1.0]);
        assert_eq!(f.eval(0.5), 0.5);
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(1.0), 1.0);
        assert_eq!(f.eval(0.25), 0.25);
        assert_eq!(f.lipschitz(), 1.0);
    }

    #[test]
    fn three_points() {
        let f = uniform(&[0.0, 1.0, 2.0]);
        assert!((f.eval(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.eval(-1.0), 0.0);
        assert_eq!(f.eval(3.0), 1.0);
    }

    #[test]
    fn needs_two_distinct_values() {
        assert!(empirical_cdf(&[1.0, 1.0], &[0.5, 0.5]).is_err());
        assert!(empirical_cdf(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn ks_self_and_range() {
        let f = uniform(&[0.0, 1.0]);
        let g = uniform(&[0.0, 3.0]);
        assert_eq!(ks_distance(&f, &f), 0.0);
        let d = ks_distance(&f, &g);
        assert!((0.0..=1.0).contains(&d));
        let oracle = grid_sup(&f, &g, -1.0, 4.0, 1_000_000);
        assert!((d - oracle).abs() < 1e-9, "{d} vs {oracle}");
        assert!((d - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn strictly_increasing_check() {
        // The mass of x_k feeds the segment ending at x_k, so a zero mass at
        // x_2 makes [1, 2] flat.
        let f = empirical_cdf(&[0.0, 1.0, 2.0, 3.0], &[0.5, 0.25, 0.0, 0.25]).unwrap();
        assert!(f.is_strictly_increasing_on(0.0, 1.0));
        assert!(!f.is_strictly_increasing_on(0.5, 1.5));
        assert!(f.is_strictly_increasing_on(2.0, 3.0));
        assert!(!f.is_strictly_increasing_on(2.0, 3.5));
    }

    #[test]
    fn constructor_validates() {
        assert!(ContinuousCDF::new(vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(ContinuousCDF::new(vec![0.0, 1.0], vec![0.0, 0.9]).is_err());
        assert!(ContinuousCDF::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.6, 0.5]).is_err());
    }
}
