//! Global and measure-driven local smoothing of Reeb graphs, and the
//! explicit interleaving maps between smoothings.

mod maps;

use serde::{Deserialize, Serialize};

use crate::complex::{thicken_global, thicken_local, ScalarField, SimplicialComplex};
use crate::error::{Error, Result};
use crate::measure::{dtm_field, kdist_field, EmpiricalMeasure, KernelSpec};
use crate::reeb::{reeb_graph, ReebGraph};

pub use maps::{
    build_ambient_interleaving, build_local_interleaving, build_local_interleaving_with, clamp_projection,
    clamp_projection_box, verify_commutativity, verify_function_preservation, CommutativityOptions,
    CommutativityReport, InterleavingMap, InterleavingMapPair, MapEntry, PairKind, PreservationReport,
    DEFAULT_PATH_SAMPLES,
};

/// Floor as a fraction of the base diameter when none is given.
pub const DEFAULT_FLOOR_FRACTION: f64 = 1e-6;

pub fn default_floor(x: &SimplicialComplex) -> f64 {
    let d = x.diameter();
    if d > 0.0 {
        DEFAULT_FLOOR_FRACTION * d
    } else {
        DEFAULT_FLOOR_FRACTION
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FactorKind {
    Constant { eps: f64 },
    Dtm { mass: f64 },
    Kernel { bandwidth: f64 },
    /// A factor given directly as a field.
    Custom,
}

/// A per-vertex thickening half-width, bounded below by a positive floor.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingFactor {
    kind: FactorKind,
    radius: ScalarField,
    floor: f64,
}

impl SmoothingFactor {
    pub fn constant(x: &SimplicialComplex, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::invalid(format!("smoothing radius must be positive, got {eps}")));
        }
        Ok(SmoothingFactor {
            kind: FactorKind::Constant { eps },
            radius: ScalarField::constant(x.num_vertices(), eps),
            floor: eps,
        })
    }

    /// Distance to `mu` with mass parameter `m`.
    pub fn dtm(x: &SimplicialComplex, mu: &EmpiricalMeasure, m: f64, floor: f64) -> Result<Self> {
        check_floor(floor)?;
        Ok(SmoothingFactor {
            kind: FactorKind::Dtm { mass: m },
            radius: dtm_field(x, mu, m, floor)?,
            floor,
        })
    }

    /// Kernel distance to `mu`.
    pub fn kernel(x: &SimplicialComplex, mu: &EmpiricalMeasure, kernel: &KernelSpec, floor: f64) -> Result<Self> {
        check_floor(floor)?;
        Ok(SmoothingFactor {
            kind: FactorKind::Kernel {
                bandwidth: kernel.bandwidth(),
            },
            radius: kdist_field(x, mu, kernel, floor)?,
            floor,
        })
    }

    pub fn from_field(x: &SimplicialComplex, r: ScalarField, floor: f64) -> Result<Self> {
        check_floor(floor)?;
        r.check_len(x)?;
        let radius = r.map(|v| v.max(floor))?;
        Ok(SmoothingFactor {
            kind: FactorKind::Custom,
            radius,
            floor,
        })
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn radius(&self) -> &ScalarField {
        &self.radius
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Largest half-width over the vertices.
    pub fn sup(&self) -> f64 {
        self.radius.max()
    }

    /// `max(scale * r, floor)`, keeping the kind.
    pub fn scaled(&self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!("scale must be positive, got {scale}")));
        }
        let floor = self.floor;
        Ok(SmoothingFactor {
            kind: self.kind,
            radius: self.radius.map(|v| (scale * v).max(floor))?,
            floor,
        })
    }

    pub(crate) fn check_on(&self, x: &SimplicialComplex) -> Result<()> {
        self.radius.check_len(x)
    }
}

fn check_floor(floor: f64) -> Result<()> {
    if floor > 0.0 && floor.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("factor floor must be positive, got {floor}")))
    }
}

/// Reeb graph of `X x [-eps, eps]` with field `f + t`.
pub fn smooth_global(x: &SimplicialComplex, f: &ScalarField, eps: f64) -> Result<ReebGraph> {
    let t = thicken_global(x, f, eps)?;
    reeb_graph(t.complex(), t.field())
}

/// Reeb graph of `X_r` with field `f + t`.
pub fn smooth_local(x: &SimplicialComplex, f: &ScalarField, r: &SmoothingFactor) -> Result<ReebGraph> {
    r.check_on(x)?;
    let t = thicken_local(x, f, r.radius())?;
    reeb_graph(t.complex(), t.field())
}

/// Smooths a Reeb graph directly by thickening its realization as a
/// 1-complex.
pub fn smooth_graph(g: &ReebGraph, eps: f64) -> Result<ReebGraph> {
    let (x, f) = g.to_complex()?;
    smooth_global(&x, &f, eps)
}
