//! Seeded stability trials for smoothed and range-integrated Reeb graphs,
//! and the scale sweep of the two-loop example.
//!
//! Every check here is one-sided: a lower bound on the interleaving
//! distance, built from extended persistence, is compared against the
//! exact right-hand side of the corresponding stability bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{parse_off, thicken_local, ComplexDocument, ScalarField, SimplicialComplex};
use crate::diagram::{extended_persistence, interleaving_lower_bound, PointClass, DEFAULT_PROXY_CONSTANT};
use crate::error::{Error, Result};
use crate::fixtures::{circle, fig4_measure, random_smooth_field, torus, two_loops, LoopLabel, TwoLoopExample};
use crate::measure::{kernel_distance, ks_distance, wasserstein2, EmpiricalMeasure, KernelSpec};
use crate::range::compose_cdf;
use crate::reeb::{reeb_graph, ReebGraph};
use crate::smoothing::{default_floor, smooth_local, SmoothingFactor};

/// Version of the report layout written by this module.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Largest support drawn for a trial measure.
pub const MAX_TRIAL_SUPPORT: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    /// Meshes for the stability trials; empty means the built-in circle,
    /// torus and two-loop complexes.
    pub meshes: Vec<String>,
    /// Mass parameter of the distance to a measure.
    pub mass: f64,
    /// Gaussian kernel bandwidth.
    pub bandwidth: f64,
    /// Multipliers applied to the smoothing factors.
    pub scales: Vec<f64>,
    /// Largest sup-norm of the bump added to a field.
    pub bump: f64,
    /// Largest coordinate shift of a measure point, relative to the mesh
    /// diameter (or the field range on the line).
    pub jitter: f64,
    /// Concentration of the Dirichlet draw that resamples weights.
    pub concentration: f64,
    pub tol: f64,
    pub proxy_constant: f64,
    /// Worker threads; `None` leaves the choice to rayon. Results do not
    /// depend on it, so reports leave it out.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            trials: 100,
            meshes: Vec::new(),
            mass: 0.05,
            bandwidth: 0.15,
            scales: default_scales(),
            bump: 0.1,
            jitter: 0.02,
            concentration: 50.0,
            tol: 1e-9,
            proxy_constant: DEFAULT_PROXY_CONSTANT,
            threads: None,
        }
    }
}

/// 0.05, 0.10, ..., 3.00, then 6 and 12.
pub fn default_scales() -> Vec<f64> {
    let mut s: Vec<f64> = (1..=60).map(|i| f64::from(i) / 20.0).collect();
    s.extend([6.0, 12.0]);
    s
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive, got {v}")))
            }
        };
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if !(self.mass > 0.0 && self.mass <= 1.0) {
            return Err(Error::invalid(format!("mass must lie in (0, 1], got {}", self.mass)));
        }
        positive("bandwidth", self.bandwidth)?;
        positive("tol", self.tol)?;
        positive("proxy_constant", self.proxy_constant)?;
        positive("concentration", self.concentration)?;
        if self.scales.is_empty() {
            return Err(Error::invalid("need at least one scale"));
        }
        for &s in &self.scales {
            positive("scale", s)?;
        }
        for (name, v) in [("bump", self.bump), ("jitter", self.jitter)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads must be at least 1"));
        }
        Ok(())
    }

    /// Runs `op` on a pool with the configured thread count.
    pub fn install<T: Send>(&self, op: impl FnOnce() -> T + Send) -> Result<T> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::invalid(format!("cannot start thread pool: {e}")))?;
        Ok(pool.install(op))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityMode {
    Dtm,
    Kernel,
    Range,
}

impl std::str::FromStr for StabilityMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dtm" => Ok(StabilityMode::Dtm),
            "kernel" => Ok(StabilityMode::Kernel),
            "range" => Ok(StabilityMode::Range),
            _ => Err(Error::invalid(format!("unknown mode `{s}`"))),
        }
    }
}

/// A named mesh used by the trials.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub name: String,
    pub complex: SimplicialComplex,
}

pub fn builtin_meshes() -> Vec<Mesh> {
    vec![
        Mesh {
            name: "circle".into(),
            complex: circle(24, 2.0),
        },
        Mesh {
            name: "torus".into(),
            complex: torus(10, 8, 1.0, 0.4),
        },
        Mesh {
            name: "two-loops".into(),
            complex: two_loops().complex,
        },
    ]
}

/// The pair of inputs compared in one trial.
#[derive(Debug, Clone)]
pub struct TrialInput {
    pub f: ScalarField,
    pub g: ScalarField,
    /// On the mesh's ambient space for the smoothing modes, on the line for
    /// the range mode.
    pub mu: EmpiricalMeasure,
    pub nu: EmpiricalMeasure,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub mesh: String,
    pub scale: f64,
    /// `sup |f - g|` over the vertices.
    pub field_distance: f64,
    /// W2 for the distance to a measure, the kernel distance, or the KS
    /// distance.
    pub measure_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<[f64; 2]>,
    pub rhs: f64,
    pub lower_bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub schema_version: u32,
    pub mode: StabilityMode,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub violations: usize,
    pub max_lower_bound: f64,
    /// Smallest `rhs - lower_bound` over the trials.
    pub min_margin: f64,
    pub passed: bool,
}


/// Reads the configured meshes, or returns the built-in ones.
pub fn resolve_meshes(config: &ExperimentConfig) -> Result<Vec<Mesh>> {
    if config.meshes.is_empty() {
        return Ok(builtin_meshes());
    }
    config
        .meshes
        .iter()
        .map(|path| {
            Ok(Mesh {
                name: path.clone(),
                complex: read_complex(std::path::Path::new(path))?.0,
            })
        })
        .collect()
}

/// Outcome of comparing one pair of inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub field_distance: f64,
    pub measure_distance: f64,
    pub lipschitz: Option<[f64; 2]>,
    pub rhs: f64,
    pub lower_bound: f64,
}

/// Compares two inputs on one mesh. The bound checked is
/// - dtm: `|f - g| + s W2(mu, nu) / sqrt(m)`,
/// - kernel: `|f - g| + s D_K(mu, nu)`,
/// - range: `min(KS + Lip(F_mu) |f - g|, KS + Lip(F_nu) |f - g|, 1)`.
///
/// Scaling a factor by `s` scales the bound on its variation by `s`; the
/// floor only shrinks differences.
pub fn stability_trial(
    x: &SimplicialComplex,
    input: &TrialInput,
    mode: StabilityMode,
    config: &ExperimentConfig,
) -> Result<TrialOutcome> {
    let delta = input.f.sup_distance(&input.g)?;
    let (g1, g2, distance, lipschitz, rhs) = match mode {
        StabilityMode::Dtm | StabilityMode::Kernel => {
            let floor = default_floor(x);
            let kernel = KernelSpec::gaussian(config.bandwidth)?;
            let factor = |mu: &EmpiricalMeasure| -> Result<SmoothingFactor> {
                let r = if mode == StabilityMode::Dtm {
                    SmoothingFactor::dtm(x, mu, config.mass, floor)?
                } else {
                    SmoothingFactor::kernel(x, mu, &kernel, floor)?
                };
                r.scaled(input.scale)
            };
            let (distance, weight) = if mode == StabilityMode::Dtm {
                (wasserstein2(&input.mu, &input.nu)?, input.scale / config.mass.sqrt())
            } else {
                (kernel_distance(&input.mu, &input.nu, &kernel)?, input.scale)
            };
            let g1 = smooth_local(x, &input.f, &factor(&input.mu)?)?;
            let g2 = smooth_local(x, &input.g, &factor(&input.nu)?)?;
            (g1, g2, distance, None, delta + weight * distance)
        }
        StabilityMode::Range => {
            let (cdf_mu, cdf_nu) = (input.mu.cdf()?, input.nu.cdf()?);
            let ks = ks_distance(&cdf_mu, &cdf_nu);
            let (lm, ln) = (cdf_mu.lipschitz(), cdf_nu.lipschitz());
            let rhs = (ks + lm * delta).min(ks + ln * delta).min(1.0);
            let g1 = reeb_graph(x, &compose_cdf(&input.f, &cdf_mu))?;
            let g2 = reeb_graph(x, &compose_cdf(&input.g, &cdf_nu))?;
            (g1, g2, ks, Some([lm, ln]), rhs)
        }
    };
    Ok(TrialOutcome {
        field_distance: delta,
        measure_distance: distance,
        lipschitz,
        rhs,
        lower_bound: interleaving_lower_bound(&g1, &g2, config.proxy_constant)?,
    })
}

fn dirichlet(alpha: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    let alpha: Vec<f64> = alpha.iter().map(|a| a.max(1e-3)).collect();
    Dirichlet::new(&alpha).expect("at least two positive concentrations").sample(rng)
}

fn resampled(weights: &[f64], concentration: f64, rng: &mut impl Rng) -> Vec<f64> {
    let n = weights.len() as f64;
    let alpha: Vec<f64> = weights.iter().map(|w| concentration * n * w).collect();
    dirichlet(&alpha, rng)
}

/// Draws the inputs of trial `index` from its own random stream.
pub fn sample_trial(x: &SimplicialComplex, mode: StabilityMode, scale: f64, config: &ExperimentConfig, index: usize) -> Result<TrialInput> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let n = x.num_vertices();
    if n == 0 {
        return Err(Error::invalid("trial mesh has no vertices"));
    }
    let diameter = x.diameter().max(1e-9);

    let f = random_smooth_field(x, &mut rng);
    let amp = rng.gen_range(-1.0..=1.0) * config.bump;
    let center = x.coords(rng.gen_range(0..n)).to_vec();
    let width = diameter * rng.gen_range(0.1..0.3);
    let g = ScalarField::new(
        (0..n)
            .map(|v| {
                let d2: f64 = x.coords(v).iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
                f.value(v) + amp * (-d2 / (2.0 * width * width)).exp()
            })
            .collect(),
    )?;

    let k = rng.gen_range(4..=MAX_TRIAL_SUPPORT);
    let (points, shift): (Vec<Vec<f64>>, f64) = match mode {
        StabilityMode::Range => {
            let span = (f.max() - f.min()).max(1e-9);
            let (lo, hi) = (f.min() - 0.1 * span, f.max() + 0.1 * span);
            ((0..k).map(|_| vec![rng.gen_range(lo..hi)]).collect(), config.jitter * span)
        }
        _ => {
            let spread = 0.05 * diameter;
            let pts = (0..k)
                .map(|_| {
                    let base = x.coords(rng.gen_range(0..n));
                    base.iter().map(|c| c + rng.gen_range(-spread..spread)).collect()
                })
                .collect();
            (pts, config.jitter * diameter)
        }
    };
    let weights = dirichlet(&vec![1.0; k], &mut rng);
    let moved: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            p.iter()
                .map(|c| if shift > 0.0 { c + rng.gen_range(-shift..shift) } else { *c })
                .collect()
        })
        .collect();
    let moved_weights = resampled(&weights, config.concentration, &mut rng);
    Ok(TrialInput {
        f,
        g,
        mu: EmpiricalMeasure::new(points, weights)?,
        nu: EmpiricalMeasure::new(moved, moved_weights)?,
        scale,
    })
}

/// Runs `config.trials` seeded trials. Trial `i` uses mesh `i mod #meshes`
/// and scale `(i / #meshes) mod #scales`; results come back in trial order
/// whatever the thread count.
pub fn run_stability(meshes: &[Mesh], mode: StabilityMode, config: &ExperimentConfig) -> Result<StabilityReport> {
    config.validate()?;
    if meshes.is_empty() {
        return Err(Error::invalid("no meshes to run on"));
    }
    let records = config.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|i| {
                let mesh = &meshes[i % meshes.len()];
                let scale = config.scales[(i / meshes.len()) % config.scales.len()];
                let input = sample_trial(&mesh.complex, mode, scale, config, i)?;
                let out = stability_trial(&mesh.complex, &input, mode, config)?;
                Ok(TrialRecord {
                    trial: i,
                    mesh: mesh.name.clone(),
                    scale,
                    field_distance: out.field_distance,
                    measure_distance: out.measure_distance,
                    lipschitz: out.lipschitz,
                    rhs: out.rhs,
                    lower_bound: out.lower_bound,
                    passed: out.lower_bound <= out.rhs + config.tol,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let violations = records.iter().filter(|r| !r.passed).count();
    Ok(StabilityReport {
        schema_version: REPORT_SCHEMA_VERSION,
        mode,
        config: config.clone(),
        max_lower_bound: records.iter().map(|r| r.lower_bound).fold(0.0, f64::max),
        min_margin: records.iter().map(|r| r.rhs - r.lower_bound).fold(f64::INFINITY, f64::min),
        violations,
        passed: violations == 0,
        trials: records,
    })
}

/// Loops surviving one smoothing, named by the part of the example they
/// come from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopSurvey {
    pub betti1: usize,
    pub loops: Vec<LoopLabel>,
}

impl LoopSurvey {
    pub fn retains(&self, label: LoopLabel) -> bool {
        self.loops.contains(&label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig4Row {
    pub scale: f64,
    pub dtm: LoopSurvey,
    pub kernel: LoopSurvey,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig4Report {
    pub schema_version: u32,
    pub mass: f64,
    pub bandwidth: f64,
    pub rows: Vec<Fig4Row>,
    /// Scales where the kernel factor keeps the larger small loop but not
    /// the smaller one, while the dtm factor does the opposite.
    pub crossover: Vec<f64>,
    /// Whether the smallest scale keeps all three loops under both factors.
    pub smallest_scale_keeps_all: bool,
    /// Whether the largest scale leaves trees under both factors.
    pub largest_scale_is_tree: bool,
    pub passed: bool,
}

/// Smoothed graphs at the first crossover scale, for export.
#[derive(Debug, Clone)]
pub struct Fig4Graphs {
    pub scale: f64,
    pub dtm: ReebGraph,
    pub kernel: ReebGraph,
}

/// Offset of the normalized factors in the two-loop sweep.
pub const FIG4_BASELINE: f64 = 0.05;

/// Rescales a factor affinely onto `[baseline, baseline + 1]` over the
/// vertices, so that two factors share one scale axis. A positive baseline
/// keeps the factor away from zero: a point of (near) zero width pins its
/// level and stops the loop through it from ever contracting.
pub fn normalize_factor(r: &ScalarField, baseline: f64) -> Result<ScalarField> {
    let (lo, hi) = (r.min(), r.max());
    if hi > lo {
        r.map(|v| baseline + (v - lo) / (hi - lo))
    } else {
        Ok(ScalarField::constant(r.len(), baseline))
    }
}

fn survey(ex: &TwoLoopExample, r: &ScalarField) -> Result<(LoopSurvey, ReebGraph)> {
    let t = thicken_local(&ex.complex, &ex.field, r)?;
    let g = reeb_graph(t.complex(), t.field())?;
    let label_of = |node: usize| g.nodes()[node].vertex.map(|v| ex.labels[t.base_vertex(v)]);
    let mut loops: Vec<LoopLabel> = extended_persistence(&g)
        .of(1, PointClass::Extended)
        .map(|p| {
            let ends: Vec<Option<LoopLabel>> = p.nodes.map_or(vec![], |[a, b]| vec![label_of(a), label_of(b)]);
            [LoopLabel::Alpha, LoopLabel::Beta]
                .into_iter()
                .find(|l| ends.contains(&Some(*l)))
                .unwrap_or(LoopLabel::Outer)
        })
        .collect();
    loops.sort();
    Ok((
        LoopSurvey {
            betti1: g.betti1(),
            loops,
        },
        g,
    ))
}

/// Sweeps the scale multiplier over the two-loop example, smoothing with
/// the normalized distance to a measure and kernel distance of `mu` (the
/// shipped sample cloud when `None`).
pub fn fig4(config: &ExperimentConfig, mu: Option<&EmpiricalMeasure>) -> Result<(Fig4Report, Option<Fig4Graphs>)> {
    config.validate()?;
    let ex = two_loops();
    let shipped;
    let mu = match mu {
        Some(m) => m,
        None => {
            shipped = fig4_measure()?;
            &shipped
        }
    };
    let floor = default_floor(&ex.complex);
    let kernel = KernelSpec::gaussian(config.bandwidth)?;
    let dtm = SmoothingFactor::dtm(&ex.complex, mu, config.mass, floor)?;
    let ker = SmoothingFactor::kernel(&ex.complex, mu, &kernel, floor)?;
    let dtm = normalize_factor(dtm.radius(), FIG4_BASELINE)?;
    let ker = normalize_factor(ker.radius(), FIG4_BASELINE)?;

    let mut scales = config.scales.clone();
    scales.sort_by(f64::total_cmp);
    scales.dedup();
    let rows = config.install(|| {
        scales
            .par_iter()
            .map(|&s| {
                let at = |r: &ScalarField| r.map(|v| (s * v).max(floor));
                let (d, dg) = survey(&ex, &at(&dtm)?)?;
                let (k, kg) = survey(&ex, &at(&ker)?)?;
                Ok((Fig4Row { scale: s, dtm: d, kernel: k }, dg, kg))
            })
            .collect::<Result<Vec<_>>>()
    })??;

    use LoopLabel::{Alpha, Beta};
    let is_crossover =
        |r: &Fig4Row| r.kernel.retains(Alpha) && !r.kernel.retains(Beta) && r.dtm.retains(Beta) && !r.dtm.retains(Alpha);
    let graphs = rows.iter().find(|(r, _, _)| is_crossover(r)).map(|(r, dg, kg)| Fig4Graphs {
        scale: r.scale,
        dtm: dg.clone(),
        kernel: kg.clone(),
    });
    let rows: Vec<Fig4Row> = rows.into_iter().map(|(r, _, _)| r).collect();
    let crossover: Vec<f64> = rows.iter().filter(|r| is_crossover(r)).map(|r| r.scale).collect();
    let first = rows.first().expect("validated scales are non-empty");
    let last = rows.last().expect("validated scales are non-empty");
    let report = Fig4Report {
        schema_version: REPORT_SCHEMA_VERSION,
        mass: config.mass,
        bandwidth: config.bandwidth,
        smallest_scale_keeps_all: first.dtm.betti1 == 3 && first.kernel.betti1 == 3,
        largest_scale_is_tree: last.dtm.betti1 == 0 && last.kernel.betti1 == 0,
        passed: !crossover.is_empty(),
        crossover,
        rows,
    };
    Ok((report, graphs))
}

/// Reads an OFF file, or a JSON complex document that may carry a field.
pub fn read_complex(path: &std::path::Path) -> Result<(SimplicialComplex, Option<ScalarField>)> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let doc: ComplexDocument = serde_json::from_str(&text)?;
        doc.into_complex()
    } else {
        Ok((parse_off(&text)?, None))
    }
}
