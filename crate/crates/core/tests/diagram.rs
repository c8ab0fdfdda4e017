use mmreeb::diagram::{
    bottleneck, extended_persistence, interleaving_lower_bound, DiagramPoint, PersistenceDiagram, PointClass,
    DEFAULT_PROXY_CONSTANT,
};
use mmreeb::fixtures::{random_smooth_field, random_vertex_field, torus};
use mmreeb::{reeb_graph, slab_oracle, ReebGraph, ScalarField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GROUPS: [(u8, PointClass); 4] = [
    (0, PointClass::Ordinary),
    (0, PointClass::Extended),
    (1, PointClass::Extended),
    (1, PointClass::Relative),
];

fn random_diagram(rng: &mut impl Rng, max: usize, snap: bool) -> PersistenceDiagram {
    let n = rng.gen_range(0..=max);
    let value = |rng: &mut dyn rand::RngCore| {
        let v: f64 = rng.gen_range(0.0..4.0);
        if snap {
            (v * 4.0).round() / 4.0
        } else {
            v
        }
    };
    let points = (0..n)
        .map(|_| {
            let (dim, class) = GROUPS[rng.gen_range(0..GROUPS.len())];
            let (a, b) = (value(rng), value(rng));
            let (lo, hi) = (a.min(b), a.max(b));
            let (birth, death) = match class {
                PointClass::Relative => (hi, lo),
                PointClass::Extended if dim == 1 => (hi, lo),
                _ => (lo, hi),
            };
            DiagramPoint::new(birth, death, dim, class)
        })
        .collect();
    PersistenceDiagram::new(points)
}

fn linf(p: &DiagramPoint, q: &DiagramPoint) -> f64 {
    (p.birth - q.birth).abs().max((p.death - q.death).abs())
}

/// Tries every partial matching that respects dimension and class.
fn exhaustive_bottleneck(a: &[DiagramPoint], b: &[DiagramPoint]) -> f64 {
    fn go(i: usize, a: &[DiagramPoint], b: &[DiagramPoint], used: &mut Vec<bool>, worst: f64, best: &mut f64) {
        if worst >= *best {
            return;
        }
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(q, _)| q.persistence() / 2.0)
                .fold(worst, f64::max);
            *best = best.min(rest);
            return;
        }
        go(i + 1, a, b, used, worst.max(a[i].persistence() / 2.0), best);
        for j in 0..b.len() {
            if !used[j] && a[i].dim == b[j].dim && a[i].class == b[j].class {
                used[j] = true;
                go(i + 1, a, b, used, worst.max(linf(&a[i], &b[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

#[test]
fn bottleneck_matches_exhaustive_matching() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..300 {
        let snap = trial % 2 == 0;
        let a = random_diagram(&mut rng, 6, snap);
        let b = random_diagram(&mut rng, 6, snap);
        let fast = bottleneck(&a, &b).unwrap();
        let slow = exhaustive_bottleneck(&a.points, &b.points);
        assert!((fast - slow).abs() <= 1e-12, "trial {trial}: {fast} vs {slow}\n{a:?}\n{b:?}");
    }
}

#[test]
fn bottleneck_is_a_metric_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let [a, b, c] = [0, 1, 2].map(|_| random_diagram(&mut rng, 10, false));
        let ab = bottleneck(&a, &b).unwrap();
        assert_eq!(ab, bottleneck(&b, &a).unwrap());
        assert_eq!(bottleneck(&a, &a).unwrap(), 0.0);
        let ac = bottleneck(&a, &c).unwrap();
        let bc = bottleneck(&b, &c).unwrap();
        assert!(ac <= ab + bc + 1e-9);
    }
}

fn random_graph(rng: &mut impl Rng) -> ReebGraph {
    let n = rng.gen_range(2..12);
    let values: Vec<f64> = (0..n).map(|i| i as f64 + rng.gen_range(0.0..0.5)).collect();
    let m = rng.gen_range(1..2 * n);
    let edges: Vec<[usize; 2]> = (0..m)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            [a, b]
        })
        .collect();
    ReebGraph::new(&values, &edges).unwrap()
}

#[test]
fn diagram_counts_match_graph_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let g = random_graph(&mut rng);
        let d = extended_persistence(&g);
        let count = |dim, class| d.of(dim, class).count();
        let values = g.values();
        for p in &d.points {
            assert!(values.contains(&p.birth) && values.contains(&p.death));
            assert!(p.persistence() > 0.0);
        }
        // a loop's top lies strictly above its bottom, so none is dropped
        assert_eq!(count(1, PointClass::Extended), g.betti1());
        let labels = g.component_labels();
        let nontrivial: Vec<usize> = {
            let mut c: Vec<usize> = (0..g.num_nodes()).filter(|&v| g.degree(v) > 0).map(|v| labels[v]).collect();
            c.sort_unstable();
            c.dedup();
            c
        };
        assert_eq!(count(0, PointClass::Extended), nontrivial.len());
        let minima = (0..g.num_nodes()).filter(|&v| g.degree(v) > 0 && g.down_degree(v) == 0).count();
        let maxima = (0..g.num_nodes()).filter(|&v| g.degree(v) > 0 && g.up_degree(v) == 0).count();
        assert_eq!(count(0, PointClass::Ordinary) + nontrivial.len(), minima);
        assert_eq!(count(1, PointClass::Relative) + nontrivial.len(), maxima);
        // each component's extended point is its (min, max)
        for p in d.of(0, PointClass::Extended) {
            let [lo, hi] = p.nodes.unwrap();
            let comp = labels[lo];
            assert_eq!(labels[hi], comp);
            let in_comp: Vec<f64> = (0..g.num_nodes()).filter(|&v| labels[v] == comp).map(|v| g.value(v)).collect();
            assert_eq!(p.birth, in_comp.iter().copied().fold(f64::INFINITY, f64::min));
            assert_eq!(p.death, in_comp.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        }
    }
}

#[test]
fn torus_loop_spans_the_saddles() {
    let x = torus(16, 16, 1.0, 0.4);
    let f = ScalarField::height(&x);
    let g = reeb_graph(&x, &f).unwrap();
    let oracle = slab_oracle(&x, &f).unwrap();
    let mut saddles: Vec<f64> = (0..oracle.num_nodes())
        .filter(|&v| oracle.degree(v) == 3)
        .map(|v| oracle.value(v))
        .collect();
    saddles.sort_by(f64::total_cmp);
    assert_eq!(saddles.len(), 2);
    let d = extended_persistence(&g);
    let loops: Vec<&DiagramPoint> = d.of(1, PointClass::Extended).collect();
    assert_eq!(loops.len(), 1);
    assert!((loops[0].birth - saddles[1]).abs() < 1e-12);
    assert!((loops[0].death - saddles[0]).abs() < 1e-12);
}

#[test]
fn circle_heights_lower_bound_by_hand() {
    let tall = ReebGraph::new(&[0.0, 2.0], &[[0, 1], [0, 1]]).unwrap();
    let short = ReebGraph::new(&[0.0, 1.0], &[[0, 1], [0, 1]]).unwrap();
    // written out: extended (0,2) and loop (2,0) against (0,1) and (1,0)
    let a = PersistenceDiagram::new(vec![
        DiagramPoint::new(0.0, 2.0, 0, PointClass::Extended),
        DiagramPoint::new(2.0, 0.0, 1, PointClass::Extended),
    ]);
    let b = PersistenceDiagram::new(vec![
        DiagramPoint::new(0.0, 1.0, 0, PointClass::Extended),
        DiagramPoint::new(1.0, 0.0, 1, PointClass::Extended),
    ]);
    let expected = exhaustive_bottleneck(&a.points, &b.points) / DEFAULT_PROXY_CONSTANT;
    let lb = interleaving_lower_bound(&tall, &short, DEFAULT_PROXY_CONSTANT).unwrap();
    assert!((lb - expected).abs() < 1e-15);
    assert!((lb - 0.2).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Extended persistence is stable under sup-norm perturbation of the
    /// function on a fixed space; in particular the ordinary dim-0 part is.
    #[test]
    fn diagrams_are_stable(seed in 0u64..10_000, amp in 0.0..0.3f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = torus(8, 6, 1.0, 0.4);
        let f = random_smooth_field(&x, &mut rng);
        let noise = random_vertex_field(x.num_vertices(), &mut rng);
        let g = ScalarField::new(f.values().iter().zip(noise.values()).map(|(a, b)| a + amp * (b - 0.5)).collect()).unwrap();
        let delta = f.sup_distance(&g).unwrap();
        let (gf, gg) = (reeb_graph(&x, &f).unwrap(), reeb_graph(&x, &g).unwrap());
        let (df, dg) = (extended_persistence(&gf), extended_persistence(&gg));
        let ordinary = |d: &PersistenceDiagram| {
            PersistenceDiagram::new(d.of(0, PointClass::Ordinary).cloned().collect())
        };
        prop_assert!(bottleneck(&ordinary(&df), &ordinary(&dg)).unwrap() <= delta + 1e-9);
        prop_assert!(bottleneck(&df, &dg).unwrap() <= delta + 1e-9);
    }

    #[test]
    fn lower_bound_is_nonnegative_and_symmetric(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, h) = (random_graph(&mut rng), random_graph(&mut rng));
        let a = interleaving_lower_bound(&g, &h, DEFAULT_PROXY_CONSTANT).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert_eq!(a, interleaving_lower_bound(&h, &g, DEFAULT_PROXY_CONSTANT).unwrap());
        prop_assert_eq!(interleaving_lower_bound(&g, &g, DEFAULT_PROXY_CONSTANT).unwrap(), 0.0);
    }
}
