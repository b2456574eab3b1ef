//! Property tests for the geometry kernel and hypergraph structure
//! invariants, driven by seeded samplers.

use hyperlap::hypergraph::random_hypergraph;
use hyperlap::manifold::{frechet_mean, ManifoldKind, ManifoldPoint};
use hyperlap::verify::{random_point, random_tangent};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kinds() -> impl Strategy<Value = ManifoldKind> {
    prop_oneof![
        (1usize..=4).prop_map(ManifoldKind::Euclidean),
        (1usize..=3).prop_map(ManifoldKind::Sphere),
        (1usize..=3).prop_map(ManifoldKind::Hyperbolic),
    ]
}

fn reach(kind: ManifoldKind) -> f64 {
    match kind {
        // margin below the sphere's injectivity radius
        ManifoldKind::Sphere(_) => std::f64::consts::PI - 0.35,
        _ => 2.5,
    }
}

fn ambient_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn exp_log_inversion(kind in kinds(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_point(kind, &mut rng);
        let step = random_tangent(&a, reach(kind), &mut rng);
        let b = a.exp(&step).unwrap();
        let back = a.exp(&a.log(&b).unwrap()).unwrap();
        prop_assert!(ambient_diff(back.coords(), b.coords()) < 1e-9);
    }

    #[test]
    fn log_recovers_the_generating_vector(kind in kinds(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_point(kind, &mut rng);
        let step = random_tangent(&a, reach(kind), &mut rng);
        let b = a.exp(&step).unwrap();
        let log = a.log(&b).unwrap();
        prop_assert!(ambient_diff(log.coords(), step.coords()) < 1e-9);
    }

    #[test]
    fn transport_is_an_isometry(kind in kinds(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_point(kind, &mut rng);
        let b = a.exp(&random_tangent(&a, reach(kind), &mut rng)).unwrap();
        let v = random_tangent(&a, 1.0, &mut rng);
        let w = random_tangent(&a, 1.0, &mut rng);
        let tv = v.parallel_transport(&b).unwrap();
        let tw = w.parallel_transport(&b).unwrap();
        prop_assert!((tv.norm() - v.norm()).abs() < 1e-10);
        prop_assert!((tv.inner(&tw).unwrap() - v.inner(&w).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn distance_equals_log_norm(kind in kinds(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_point(kind, &mut rng);
        let b = a.exp(&random_tangent(&a, reach(kind), &mut rng)).unwrap();
        let d = a.distance(&b).unwrap();
        prop_assert!((d - a.log(&b).unwrap().norm()).abs() < 1e-10);
        prop_assert!((d - b.distance(&a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn mean_is_stationary(kind in kinds(), seed: u64, count in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = random_point(kind, &mut rng);
        let points: Vec<ManifoldPoint> = (0..count)
            .map(|_| center.exp(&random_tangent(&center, 0.5, &mut rng)).unwrap())
            .collect();
        let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..2.0)).collect();
        let m = frechet_mean(&points, Some(&weights)).unwrap();
        let dim = kind.ambient_dim();
        let mut acc = vec![0.0; dim];
        for (p, w) in points.iter().zip(&weights) {
            let l = m.log(p).unwrap();
            for (a, c) in acc.iter_mut().zip(l.coords()) {
                *a += w * c;
            }
        }
        let total: f64 = weights.iter().sum();
        let norm = acc.iter().map(|c| c * c).sum::<f64>().sqrt() / total;
        // solver tolerance on the tangent mean, plus metric slack
        prop_assert!(norm < 1e-9);
    }

    #[test]
    fn euclidean_mean_is_arithmetic(seed: u64, count in 1usize..6) {
        let kind = ManifoldKind::Euclidean(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<ManifoldPoint> = (0..count).map(|_| random_point(kind, &mut rng)).collect();
        let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..2.0)).collect();
        let m = frechet_mean(&points, Some(&weights)).unwrap();
        let total: f64 = weights.iter().sum();
        for i in 0..3 {
            let expected: f64 = points
                .iter()
                .zip(&weights)
                .map(|(p, w)| w * p.coords()[i])
                .sum::<f64>()
                / total;
            prop_assert!((m.coords()[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn generated_hypergraphs_are_sound(seed: u64, n in 4usize..14, m in 1usize..7, c in 1usize..3) {
        prop_assume!(2 * c <= n);
        let g = random_hypergraph(n, m, c, seed).unwrap();
        prop_assert!(g.is_symmetric());
        prop_assert_eq!(g.opposite().opposite(), g.clone());
        prop_assert_eq!(g.symmetrize().unwrap(), g.clone());

        let expanded = g.expand_to_graph();
        prop_assert!(expanded.is_graph());
        prop_assert!(expanded.edges().iter().all(|e| e.weight() == 1.0));

        for u in g.vertices() {
            let brute: Vec<usize> = g
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.in_set().contains(&u))
                .map(|(i, _)| i)
                .collect();
            prop_assert_eq!(g.in_neighborhood(u).unwrap(), brute.as_slice());
        }
    }

    #[test]
    fn opposite_of_asymmetric_graph_differs(seed: u64) {
        let g = random_hypergraph(8, 3, 2, seed).unwrap();
        // symmetric by construction: the opposite has the same edge set
        let o = g.opposite();
        prop_assert!(o.is_symmetric());
        prop_assert_eq!(o.edges().len(), g.edges().len());
    }
}
