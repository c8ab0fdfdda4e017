use rayon::prelude::*;

use super::EmpiricalMeasure;
use crate::complex::{ScalarField, SimplicialComplex};
use crate::error::{Error, Result};

/// A Gaussian kernel `exp(-|x - y|^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    bandwidth: f64,
}

impl KernelSpec {
    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::invalid(format!("kernel bandwidth must be positive, got {bandwidth}")));
        }
        Ok(KernelSpec { bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        (-d2 / (2.0 * self.bandwidth * self.bandwidth)).exp()
    }

    /// `kappa(mu, nu) = sum_ij mu_i nu_j K(p_i, q_j)`, summed in index order.
    pub fn cross(&self, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> f64 {
        let mut total = 0.0;
        for (p, a) in mu.iter() {
            let mut row = 0.0;
            for (q, b) in nu.iter() {
                row += b * self.eval(p, q);
            }
            total += a * row;
        }
        total
    }
}

fn clamped_sqrt(radicand: f64) -> f64 {
    // Cancellation can leave a tiny negative radicand for equal measures.
    debug_assert!(radicand >= -1e-12, "negative kernel radicand {radicand}");
    radicand.max(0.0).sqrt()
}

/// Kernel distance `sqrt(kappa(mu,mu) + kappa(nu,nu) - 2 kappa(mu,nu))`.
pub fn kernel_distance(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, kernel: &KernelSpec) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::dims(mu.dim(), nu.dim()));
    }
    let r = kernel.cross(mu, mu) + kernel.cross(nu, nu) - 2.0 * kernel.cross(mu, nu);
    Ok(clamped_sqrt(r))
}

/// Kernel distance from a fixed measure to Dirac masses, with the
/// self-interaction `kappa(mu, mu)` computed once.
#[derive(Debug, Clone)]
pub struct KernelDistanceToMeasure<'a> {
    mu: &'a EmpiricalMeasure,
    kernel: KernelSpec,
    self_kappa: f64,
}

impl<'a> KernelDistanceToMeasure<'a> {
    pub fn new(mu: &'a EmpiricalMeasure, kernel: KernelSpec) -> Self {
        KernelDistanceToMeasure {
            mu,
            kernel,
            self_kappa: kernel.cross(mu, mu),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.mu.check_point(x)?;
        let mut cross = 0.0;
        for (p, w) in self.mu.iter() {
            cross += w * self.kernel.eval(x, p);
        }
        Ok(clamped_sqrt(self.self_kappa + 1.0 - 2.0 * cross))
    }
}

/// `D_K(mu, delta_x)`.
pub fn kdist_to_measure(mu: &EmpiricalMeasure, kernel: &KernelSpec, x: &[f64]) -> Result<f64> {
    KernelDistanceToMeasure::new(mu, *kernel).eval(x)
}

/// Evaluates [`kdist_to_measure`] at every vertex of `x`, lifting values
/// below `floor` up to `floor`.
pub fn kdist_field(
    x: &SimplicialComplex,
    mu: &EmpiricalMeasure,
    kernel: &KernelSpec,
    floor: f64,
) -> Result<ScalarField> {
    if x.ambient_dim() != mu.dim() {
        return Err(Error::dims(x.ambient_dim(), mu.dim()));
    }
    let kd = KernelDistanceToMeasure::new(mu, *kernel);
    let values = x
        .all_coords()
        .par_iter()
        .map(|p| kd.eval(p).map(|d| d.max(floor)))
        .collect::<Result<Vec<f64>>>()?;
    ScalarField::new(values)
}
