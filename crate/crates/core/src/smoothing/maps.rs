use rayon::prelude::*;
use serde::Serialize;

use super::SmoothingFactor;
use crate::complex::{thicken_local_with, ScalarField, SimplicialComplex, ThickenOptions, VectorField};
use crate::error::{Error, Result};

pub const DEFAULT_PATH_SAMPLES: usize = 16;

/// Nearest point of `[-r, r]` to `t`.
pub fn clamp_projection(t: f64, r: f64) -> f64 {
    t.clamp(-r, r)
}

/// Nearest point of the box `[-r, r]^d` to `t` in the sup norm, taken
/// coordinate by coordinate.
pub fn clamp_projection_box(t: &[f64], r: f64) -> Vec<f64> {
    t.iter().map(|&x| clamp_projection(x, r)).collect()
}

/// Image of one source point: it sits over `base` at `source_offset` and
/// lands over the same base at `target_offset`, shifted out of the target
/// space by `residual` along the extra thickening direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapEntry {
    pub base: usize,
    pub source_offset: Vec<f64>,
    pub target_offset: Vec<f64>,
    pub residual: Vec<f64>,
}

/// A map from a thickened space into a further thickening of another one,
/// tabulated on the source vertices. Source points carry the value
/// `source_field(base) + source_offset`, target points
/// `target_field(base) + target_offset + residual`.
#[derive(Debug, Clone, Serialize)]
pub struct InterleavingMap {
    #[serde(skip)]
    pub source_field: VectorField,
    #[serde(skip)]
    pub target_field: VectorField,
    pub entries: Vec<MapEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PairKind {
    /// Between the thickenings by `r1` and `r2` of one space.
    Local { r1: ScalarField, r2: ScalarField },
    /// Between two functions on one space, mapping the space itself.
    Ambient,
}

#[derive(Debug, Clone, Serialize)]
pub struct InterleavingMapPair {
    pub eps: f64,
    pub phi: InterleavingMap,
    pub psi: InterleavingMap,
    pub kind: PairKind,
}

/// Maps between the thickenings by two smoothing factors, following the
/// clamp construction: `(x, t)` goes to `(x, clamp(t, r2(x)))` with the
/// remainder `t - clamp(t, r2(x))` as the extra offset, and symmetrically.
pub fn build_local_interleaving(
    x: &SimplicialComplex,
    f: &ScalarField,
    r1: &SmoothingFactor,
    r2: &SmoothingFactor,
) -> Result<InterleavingMapPair> {
    build_local_interleaving_with(x, f, r1, r2, ThickenOptions::default())
}

pub fn build_local_interleaving_with(
    x: &SimplicialComplex,
    f: &ScalarField,
    r1: &SmoothingFactor,
    r2: &SmoothingFactor,
    options: ThickenOptions,
) -> Result<InterleavingMapPair> {
    r1.check_on(x)?;
    r2.check_on(x)?;
    let (a, b) = (r1.radius(), r2.radius());
    let eps = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    let field = VectorField::from(f);
    let one_way = |from: &ScalarField, to: &ScalarField| -> Result<InterleavingMap> {
        let t = thicken_local_with(x, f, from, options)?;
        let entries = (0..t.complex().num_vertices())
            .map(|v| {
                let base = t.base_vertex(v);
                let s = t.offset(v);
                let p = clamp_projection(s, to.value(base));
                MapEntry {
                    base,
                    source_offset: vec![s],
                    target_offset: vec![p],
                    residual: vec![s - p],
                }
            })
            .collect();
        Ok(InterleavingMap {
            source_field: field.clone(),
            target_field: field.clone(),
            entries,
        })
    };
    Ok(InterleavingMapPair {
        eps,
        phi: one_way(a, b)?,
        psi: one_way(b, a)?,
        kind: PairKind::Local {
            r1: a.clone(),
            r2: b.clone(),
        },
    })
}

/// Maps between `(X, f)` and `(X, g)` for functions with values in `R^d`:
/// `x` goes to `(x, f(x) - g(x))` over `g` and to `(x, g(x) - f(x))` over
/// `f`, with boxes in the sup norm.
pub fn build_ambient_interleaving(x: &SimplicialComplex, f: &VectorField, g: &VectorField) -> Result<InterleavingMapPair> {
    let n = x.num_vertices();
    for h in [f, g] {
        if h.len() != n {
            return Err(Error::dims(n, h.len()));
        }
    }
    if f.dim() != g.dim() {
        return Err(Error::dims(f.dim(), g.dim()));
    }
    let eps = f.sup_distance(g)?;
    let d = f.dim();
    let one_way = |from: &VectorField, to: &VectorField| InterleavingMap {
        source_field: from.clone(),
        target_field: to.clone(),
        entries: (0..n)
            .map(|v| MapEntry {
                base: v,
                source_offset: vec![0.0; d],
                target_offset: vec![0.0; d],
                residual: from.point(v).iter().zip(to.point(v)).map(|(a, b)| a - b).collect(),
            })
            .collect(),
    };
    Ok(InterleavingMapPair {
        eps,
        phi: one_way(f, g),
        psi: one_way(g, f),
        kind: PairKind::Ambient,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreservationReport {
    pub checked: usize,
    /// Largest `|target value - source value|` over both maps, sup norm.
    pub max_violation: f64,
    /// Largest `|residual|` over both maps, sup norm.
    pub max_residual: f64,
    pub eps: f64,
    /// Entries whose value or residual bound fails by more than the
    /// tolerance, as (map name, entry index).
    pub failures: Vec<(String, usize)>,
    pub passed: bool,
}

/// Checks that both maps carry every source value to the same value and
/// keep their residuals within the interleaving radius.
pub fn verify_function_preservation(pair: &InterleavingMapPair, tol: f64) -> PreservationReport {
    let mut report = PreservationReport {
        checked: 0,
        max_violation: 0.0,
        max_residual: 0.0,
        eps: pair.eps,
        failures: Vec::new(),
        passed: true,
    };
    for (name, map) in [("phi", &pair.phi), ("psi", &pair.psi)] {
        for (i, e) in map.entries.iter().enumerate() {
            let src = map.source_field.point(e.base);
            let dst = map.target_field.point(e.base);
            let mut violation: f64 = 0.0;
            let mut residual: f64 = 0.0;
            for k in 0..src.len() {
                let before = src[k] + e.source_offset[k];
                let after = dst[k] + e.target_offset[k] + e.residual[k];
                violation = violation.max((after - before).abs());
                residual = residual.max(e.residual[k].abs());
            }
            report.checked += 1;
            report.max_violation = report.max_violation.max(violation);
            report.max_residual = report.max_residual.max(residual);
            if violation > tol || residual > pair.eps + tol {
                report.failures.push((name.to_string(), i));
            }
        }
    }
    report.passed = report.failures.is_empty();
    report
}

#[derive(Debug, Clone, Copy)]
pub struct CommutativityOptions {
    pub samples: usize,
    pub tol: f64,
}

impl Default for CommutativityOptions {
    fn default() -> Self {
        CommutativityOptions {
            samples: DEFAULT_PATH_SAMPLES,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutativityReport {
    pub checked: usize,
    pub samples: usize,
    /// Entries where the two composites give the same point outright.
    pub coincident: usize,
    /// Largest amount by which a path sample leaves the double thickening.
    pub max_escape: f64,
    /// Largest drift of the field value along a path.
    pub max_drift: f64,
    /// (direction, entry index) for each failed path.
    pub failures: Vec<(String, usize)>,
    pub passed: bool,
}

/// Checks, on every source vertex, that going there and back through the
/// pair lands in the same level-set component as the plain inclusion into
/// the double-radius thickening.
///
/// Both images lie over the same base point. With `a` the offset reached
/// through the maps and `t` the original offset, the straight path
/// `((x, (1 - s) a + s t), (1 - s)(t - a))` joins them; every sample must
/// stay inside the thickened column, keep its extra offset within `2 eps`,
/// and keep the field value constant.
pub fn verify_commutativity(pair: &InterleavingMapPair, options: CommutativityOptions) -> CommutativityReport {
    let samples = options.samples.max(1);
    let tol = options.tol;
    let two_eps = 2.0 * pair.eps;

    // Follows entry `i` of `first` through the return map. In the local
    // case the return map clamps to `back_radius`; in the ambient case it
    // adds the other residual over the same base.
    let check = |first: &InterleavingMap, back: &InterleavingMap, back_radius: Option<&ScalarField>, i: usize| {
        let e = &first.entries[i];
        let d = e.source_offset.len();
        let src = first.source_field.point(e.base);
        let (landed, extra): (Vec<f64>, Vec<f64>) = match back_radius {
            Some(r) => {
                let a = clamp_projection(e.target_offset[0], r.value(e.base));
                (vec![a], vec![e.target_offset[0] - a + e.residual[0]])
            }
            None => {
                let b = &back.entries[e.base];
                let extra = e.residual.iter().zip(&b.residual).map(|(p, q)| p + q).collect();
                (b.target_offset.clone(), extra)
            }
        };
        let start = &e.source_offset;
        let coincide = landed == *start && extra.iter().all(|&v| v == 0.0);
        let limit = back_radius.map(|r| r.value(e.base));
        let mut escape: f64 = 0.0;
        let mut drift: f64 = 0.0;
        for j in 0..=samples {
            let s = j as f64 / samples as f64;
            for k in 0..d {
                let offset = (1.0 - s) * landed[k] + s * start[k];
                let shift = (1.0 - s) * extra[k];
                if let Some(r) = limit {
                    escape = escape.max(offset.abs() - r);
                }
                escape = escape.max(shift.abs() - two_eps);
                let value0 = src[k] + start[k];
                drift = drift.max((src[k] + offset + shift - value0).abs());
            }
        }
        let ok = escape <= tol && drift <= tol;
        (ok, coincide, escape.max(0.0), drift)
    };

    let (r1, r2) = match &pair.kind {
        PairKind::Local { r1, r2 } => (Some(r1), Some(r2)),
        PairKind::Ambient => (None, None),
    };
    let mut report = CommutativityReport {
        checked: 0,
        samples,
        coincident: 0,
        max_escape: 0.0,
        max_drift: 0.0,
        failures: Vec::new(),
        passed: true,
    };
    // phi then psi returns to the r1 side, psi then phi to the r2 side.
    for (name, map, other, back) in [("psi.phi", &pair.phi, &pair.psi, r1), ("phi.psi", &pair.psi, &pair.phi, r2)] {
        let results: Vec<(bool, bool, f64, f64)> = (0..map.entries.len())
            .into_par_iter()
            .map(|i| check(map, other, back, i))
            .collect();
        for (i, (ok, coincide, escape, drift)) in results.into_iter().enumerate() {
            report.checked += 1;
            report.coincident += usize::from(coincide);
            report.max_escape = report.max_escape.max(escape);
            report.max_drift = report.max_drift.max(drift);
            if !ok {
                report.failures.push((name.to_string(), i));
            }
        }
    }
    report.passed = report.failures.is_empty();
    report
}
