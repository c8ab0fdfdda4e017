//! Synthetic meshes, fields and measures used by the tests, the
//! experiments and the shipped fixture files.

use std::f64::consts::{FRAC_PI_2, TAU};

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{write_off, ComplexDocument, ScalarField, SimplicialComplex};
use crate::error::Result;
use crate::measure::EmpiricalMeasure;

/// Regular polygon in the plane with a vertex at the bottom, scaled so the
/// height ranges over [0, height].
pub fn circle(k: usize, height: f64) -> SimplicialComplex {
    let radius = height / 2.0;
    let coords = (0..k)
        .map(|i| {
            let a = TAU * i as f64 / k as f64 - FRAC_PI_2;
            vec![radius * a.cos(), radius + radius * a.sin()]
        })
        .collect();
    SimplicialComplex::from_simplices(coords, (0..k).map(|i| vec![i, (i + 1) % k]))
        .expect("polygon is a valid complex")
}

/// Torus standing upright in R^3: the core circle lies in the x-z plane and
/// the last coordinate is the height. Grid of `nu` steps around the core and
/// `nv` steps around the tube.
pub fn torus(nu: usize, nv: usize, major: f64, minor: f64) -> SimplicialComplex {
    let mut coords = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        // half-step offset keeps the two extreme points off the grid
        // symmetry so no two neighbours tie in height
        let u = TAU * (i as f64 + 0.25) / nu as f64;
        for j in 0..nv {
            let v = TAU * (j as f64 + 0.25) / nv as f64;
            let w = major + minor * v.cos();
            coords.push(vec![w * u.cos(), minor * v.sin(), w * u.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut tris = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            tris.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    SimplicialComplex::from_simplices(coords, tris).expect("torus grid is a valid complex")
}

/// Which part of the two-loop example a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopLabel {
    Outer,
    Alpha,
    Beta,
    Bridge,
}

/// One large loop holding two small loops, each hung from the large one
/// by a short bridge. The larger small loop sits bottom left, the smaller
/// one top right.
#[derive(Debug, Clone)]
pub struct TwoLoopExample {
    pub complex: SimplicialComplex,
    pub field: ScalarField,
    pub labels: Vec<LoopLabel>,
}

pub const OUTER_RADIUS: f64 = 0.5;
pub const ALPHA_CENTER: [f64; 2] = [-0.2, -0.15];
pub const ALPHA_RADIUS: f64 = 0.225;
pub const BETA_CENTER: [f64; 2] = [0.2, 0.2];
pub const BETA_RADIUS: f64 = 0.15;

pub fn two_loops() -> TwoLoopExample {
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut simplices: Vec<Vec<usize>> = Vec::new();

    // Ring starting at `phase` so that the attachment point is vertex 0.
    let mut ring = |center: [f64; 2], radius: f64, k: usize, phase: f64, label: LoopLabel| -> usize {
        let start = coords.len();
        for i in 0..k {
            let a = phase + TAU * i as f64 / k as f64;
            coords.push(vec![center[0] + radius * a.cos(), center[1] + radius * a.sin()]);
            labels.push(label);
        }
        for i in 0..k {
            simplices.push(vec![start + i, start + (i + 1) % k]);
        }
        start
    };
    let outer_k = 64;
    let outer = ring([0.0, 0.0], OUTER_RADIUS, outer_k, 0.0, LoopLabel::Outer);
    let alpha = ring(ALPHA_CENTER, ALPHA_RADIUS, 32, std::f64::consts::PI, LoopLabel::Alpha);
    let beta = ring(BETA_CENTER, BETA_RADIUS, 24, 0.0, LoopLabel::Beta);

    // Bridges run to the nearest outer vertex, with one midpoint each.
    let mut bridge = |from: usize| {
        let p = coords[from].clone();
        let to = (outer..outer + outer_k)
            .min_by(|&a, &b| dist2(&coords[a], &p).total_cmp(&dist2(&coords[b], &p)))
            .expect("outer ring is non-empty");
        let q = coords[to].clone();
        let mid = coords.len();
        coords.push(vec![0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
        labels.push(LoopLabel::Bridge);
        simplices.push(vec![from, mid]);
        simplices.push(vec![mid, to]);
    };
    bridge(alpha);
    bridge(beta);

    let complex = SimplicialComplex::from_simplices(coords, simplices).expect("two-loop complex is valid");
    let field = ScalarField::height(&complex);
    TwoLoopExample { complex, field, labels }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sample cloud for the two-loop example: a heavy diffuse cloud around the
/// larger loop, two tight heavy clumps at the top and bottom of the smaller
/// loop, and a light scatter along the outer loop.
pub fn two_loop_measure(rng: &mut impl Rng) -> Result<EmpiricalMeasure> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for _ in 0..240 {
        let a = rng.gen_range(0.0..TAU);
        let rad = ALPHA_RADIUS * rng.gen_range(0.5..1.5);
        points.push(vec![ALPHA_CENTER[0] + rad * a.cos(), ALPHA_CENTER[1] + rad * a.sin()]);
        weights.push(0.6 / 240.0);
    }
    for sign in [-1.0, 1.0] {
        for _ in 0..6 {
            let jitter = [rng.gen_range(-0.005..0.005), rng.gen_range(-0.005..0.005)];
            points.push(vec![BETA_CENTER[0] + jitter[0], BETA_CENTER[1] + sign * BETA_RADIUS + jitter[1]]);
            weights.push(0.06 / 6.0);
        }
    }
    for _ in 0..56 {
        let a = rng.gen_range(0.0..TAU);
        let rad = OUTER_RADIUS + rng.gen_range(-0.03..0.03);
        points.push(vec![rad * a.cos(), rad * a.sin()]);
        weights.push(0.28 / 56.0);
    }
    EmpiricalMeasure::new(points, weights)
}

/// Seed of the sample cloud shipped with the two-loop example.
pub const FIG4_MEASURE_SEED: u64 = 7;

/// The sample cloud shipped with the two-loop example.
pub fn fig4_measure() -> Result<EmpiricalMeasure> {
    two_loop_measure(&mut ChaCha8Rng::seed_from_u64(FIG4_MEASURE_SEED))
}

#[derive(Serialize)]
struct TwoLoopFile {
    #[serde(flatten)]
    doc: ComplexDocument,
    labels: Vec<LoopLabel>,
}

/// Names and contents of the fixture files shipped in `fixtures/`.
pub fn fixture_files() -> Result<Vec<(&'static str, String)>> {
    let ex = two_loops();
    let two_loop = TwoLoopFile {
        doc: ComplexDocument::from_complex(&ex.complex, Some(&ex.field)),
        labels: ex.labels,
    };
    let mut csv = String::from("# x,y,weight\n");
    for (p, w) in fig4_measure()?.iter() {
        let _ = writeln!(csv, "{},{},{}", p[0], p[1], w);
    }
    Ok(vec![
        ("circle.off", write_off(&circle(32, 2.0))),
        ("torus.off", write_off(&torus(16, 16, 1.0, 0.4))),
        ("fig4.json", serde_json::to_string_pretty(&two_loop)? + "\n"),
        ("fig4_measure.csv", csv),
    ])
}

/// A smooth random field: a few Gaussian bumps plus a random linear term,
/// evaluated at the vertices. Keeps the number of critical points modest.
pub fn random_smooth_field(x: &SimplicialComplex, rng: &mut impl Rng) -> ScalarField {
    let n = x.num_vertices();
    let d = x.ambient_dim().max(1);
    let scale = x.diameter().max(1e-9);
    let bumps: Vec<(Vec<f64>, f64, f64)> = (0..4)
        .map(|_| {
            let c = x.coords(rng.gen_range(0..n)).to_vec();
            let amp = rng.gen_range(-1.0..1.0);
            let width = scale * rng.gen_range(0.15..0.4);
            (c, amp, width)
        })
        .collect();
    let slope: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0) / scale).collect();
    let values = (0..n)
        .map(|v| {
            let p = x.coords(v);
            let linear: f64 = p.iter().zip(&slope).map(|(a, b)| a * b).sum();
            let bumps: f64 = bumps
                .iter()
                .map(|(c, amp, w)| amp * (-dist2(p, c) / (2.0 * w * w)).exp())
                .sum();
            linear + bumps
        })
        .collect();
    ScalarField::new(values).expect("finite by construction")
}

/// Independent uniform values in [0, 1) at every vertex.
pub fn random_vertex_field(n: usize, rng: &mut impl Rng) -> ScalarField {
    ScalarField::new((0..n).map(|_| rng.gen::<f64>()).collect()).expect("finite")
}
