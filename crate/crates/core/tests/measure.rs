use mmreeb::measure::{
    dtm, empirical_cdf, kdist_to_measure, kernel_distance, ks_distance, quantile_radius, wasserstein2,
    EmpiricalMeasure, KernelSpec,
};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn measure_strategy(max: usize) -> impl Strategy<Value = EmpiricalMeasure> {
    prop::collection::vec(((-1.0..1.0f64, -1.0..1.0f64), 0.01..1.0f64), 1..=max).prop_map(|rows| {
        let (points, weights): (Vec<Vec<f64>>, Vec<f64>) = rows.into_iter().map(|((x, y), w)| (vec![x, y], w)).unzip();
        EmpiricalMeasure::new(points, weights).unwrap()
    })
}

fn query_grid(n: usize) -> Vec<Vec<f64>> {
    // n points on a spiral through [-1.5, 1.5]^2
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let a = 37.0 * t;
            vec![1.5 * t.sqrt() * a.cos(), 1.5 * t.sqrt() * a.sin()]
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// For uniform measures of equal size an optimal plan is a permutation.
fn brute_force_w2(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let n = a.len() as f64;
    permutations(a.len())
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .map(|(i, &j)| a[i].iter().zip(&b[j]).map(|(x, y)| (x - y).powi(2)).sum::<f64>())
                .sum::<f64>()
                / n
        })
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Midpoint rule over the quantile radii.
fn integrated_dtm(mu: &EmpiricalMeasure, m: f64, x: &[f64]) -> f64 {
    let steps = 20_000;
    let h = m / steps as f64;
    let sum: f64 = (0..steps)
        .map(|i| quantile_radius(mu, (i as f64 + 0.5) * h, x).unwrap().powi(2))
        .sum();
    (sum * h / m).sqrt()
}

#[test]
fn w2_matches_permutation_oracle() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let pts = prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 2), 5);
    for _ in 0..50 {
        let a = pts.new_tree(&mut runner).unwrap().current();
        let b = pts.new_tree(&mut runner).unwrap().current();
        let mu = EmpiricalMeasure::uniform(a.clone()).unwrap();
        let nu = EmpiricalMeasure::uniform(b.clone()).unwrap();
        let w = wasserstein2(&mu, &nu).unwrap();
        assert!((w - brute_force_w2(&a, &b)).abs() < 1e-9);
    }
}

#[test]
fn dtm_matches_integrated_quantiles() {
    let mu = EmpiricalMeasure::new(
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.2, 0.7], vec![-0.4, 0.1]],
        vec![0.1, 0.4, 0.3, 0.2],
    )
    .unwrap();
    for x in query_grid(25) {
        for m in [0.05, 0.3, 0.65, 1.0] {
            let exact = dtm(&mu, m, &x).unwrap();
            assert!((exact - integrated_dtm(&mu, m, &x)).abs() < 1e-3, "x {x:?} m {m}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dtm_is_stable_under_transport(mu in measure_strategy(12), nu in measure_strategy(12), m in 0.05..1.0f64) {
        let bound = wasserstein2(&mu, &nu).unwrap() / m.sqrt();
        for x in query_grid(50) {
            let d = (dtm(&mu, m, &x).unwrap() - dtm(&nu, m, &x).unwrap()).abs();
            prop_assert!(d <= bound + 1e-9, "{d} > {bound}");
        }
    }

    #[test]
    fn dtm_is_one_lipschitz(mu in measure_strategy(10), m in 0.05..1.0f64, a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let (p, q) = (vec![a, b], vec![b, -a]);
        let gap = ((a - b).powi(2) + (b + a).powi(2)).sqrt();
        let d = (dtm(&mu, m, &p).unwrap() - dtm(&mu, m, &q).unwrap()).abs();
        prop_assert!(d <= gap + 1e-12);
    }

    #[test]
    fn kernel_distance_is_a_metric(a in measure_strategy(8), b in measure_strategy(8), c in measure_strategy(8), sigma in 0.1..2.0f64) {
        let k = KernelSpec::gaussian(sigma).unwrap();
        let ab = kernel_distance(&a, &b, &k).unwrap();
        let ba = kernel_distance(&b, &a, &k).unwrap();
        let bc = kernel_distance(&b, &c, &k).unwrap();
        let ac = kernel_distance(&a, &c, &k).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert!(kernel_distance(&a, &a, &k).unwrap() < 1e-6);
    }

    #[test]
    fn kernel_distance_to_measure_is_stable(mu in measure_strategy(12), nu in measure_strategy(12), sigma in 0.1..2.0f64) {
        let k = KernelSpec::gaussian(sigma).unwrap();
        let bound = kernel_distance(&mu, &nu, &k).unwrap();
        for x in query_grid(50) {
            let d = (kdist_to_measure(&mu, &k, &x).unwrap() - kdist_to_measure(&nu, &k, &x).unwrap()).abs();
            prop_assert!(d <= bound + 1e-9, "{d} > {bound}");
        }
    }

    #[test]
    fn ks_and_lipschitz_match_dense_grids(
        xs in prop::collection::vec((-1.0..1.0f64, 0.05..1.0f64), 2..10),
        ys in prop::collection::vec((-1.0..1.0f64, 0.05..1.0f64), 2..10),
    ) {
        let (a, wa): (Vec<f64>, Vec<f64>) = xs.into_iter().unzip();
        let (b, wb): (Vec<f64>, Vec<f64>) = ys.into_iter().unzip();
        let (Ok(f), Ok(g)) = (empirical_cdf(&a, &wa), empirical_cdf(&b, &wb)) else {
            return Ok(());
        };
        // both CDFs are linear between the union of their knots, so a grid
        // containing every knot attains the sup
        let mut grid: Vec<f64> = (0..=4000).map(|i| -1.5 + 3.0 * i as f64 / 4000.0).collect();
        grid.extend(f.knots());
        grid.extend(g.knots());
        grid.sort_by(f64::total_cmp);
        let ks = grid.iter().map(|&x| (f.eval(x) - g.eval(x)).abs()).fold(0.0, f64::max);
        prop_assert!((ks - ks_distance(&f, &g)).abs() <= 1e-9);
        let lip = grid
            .windows(2)
            .filter(|w| w[1] - w[0] > 1e-9)
            .map(|w| (f.eval(w[1]) - f.eval(w[0])) / (w[1] - w[0]))
            .fold(0.0, f64::max);
        prop_assert!((lip - f.lipschitz()).abs() <= 1e-9 * f.lipschitz().max(1.0), "{lip} vs {}", f.lipschitz());
    }

    #[test]
    fn composed_fields_differ_by_at_most_ks(
        xs in prop::collection::vec((-1.0..1.0f64, 0.05..1.0f64), 2..10),
        ys in prop::collection::vec((-1.0..1.0f64, 0.05..1.0f64), 2..10),
        values in prop::collection::vec(-1.5..1.5f64, 1..40),
    ) {
        let (a, wa): (Vec<f64>, Vec<f64>) = xs.into_iter().unzip();
        let (b, wb): (Vec<f64>, Vec<f64>) = ys.into_iter().unzip();
        let (Ok(f), Ok(g)) = (empirical_cdf(&a, &wa), empirical_cdf(&b, &wb)) else {
            return Ok(());
        };
        let ks = ks_distance(&f, &g);
        for v in values {
            prop_assert!((f.eval(v) - g.eval(v)).abs() <= ks + 1e-12);
        }
    }
}
