//! Seeded self-check batteries.
//!
//! Each battery draws random instances, evaluates a family of identities the
//! operators must satisfy, and reports the largest observed error together
//! with a reproducer (case index and derived seed) for every violation. The
//! graph-reduction battery compares all four hypergraph p-Laplacians against
//! an independently coded graph p-Laplacian that never touches the
//! hypergraph code paths.

use crate::calculus::{
    dirichlet_energy, edge_means, frechet_gradient, laplacian_field, pairwise_gradient, Framework,
    LaplaceParams, LaplaceVariant, VertexFunction,
};
use crate::diffusion::{diffuse, DiffusionConfig};
use crate::error::{Error, Result};
use crate::hypergraph::{random_hypergraph, OrientedHypergraph, VertexId};
use crate::manifold::{ManifoldKind, ManifoldPoint, TangentVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::Arc;

/// Geodesic radius of the sampling cluster used for random vertex
/// functions; keeps every instance inside a normal convex neighborhood.
const CLUSTER_RADIUS: f64 = 0.45;

/// Outcome of one property over a batch of random cases.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub name: String,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
}

impl PropertyReport {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        PropertyReport {
            name: name.into(),
            cases: 0,
            max_error: 0.0,
            tolerance,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, error: f64, reproducer: impl Fn() -> String) {
        self.cases += 1;
        if error > self.max_error {
            self.max_error = error;
        }
        if error > self.tolerance {
            self.failures
                .push(format!("{} (error {error:.3e})", reproducer()));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Size knobs for the random-instance batteries.
#[derive(Debug, Clone, Copy)]
pub struct BatteryConfig {
    pub cases: usize,
    pub max_vertices: usize,
    pub n_edges: usize,
    pub max_cardinality: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            cases: 200,
            max_vertices: 20,
            n_edges: 5,
            max_cardinality: 4,
        }
    }
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.iter().map(|c| c / n).collect();
        }
    }
}

/// A random point, broadly spread over the manifold (hyperbolic points stay
/// within geodesic distance ~1.5 of the origin of the sheet).
pub fn random_point(kind: ManifoldKind, rng: &mut ChaCha8Rng) -> ManifoldPoint {
    match kind {
        ManifoldKind::Euclidean(d) => {
            let coords = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            ManifoldPoint::new(kind, coords).expect("euclidean coordinates are unconstrained")
        }
        ManifoldKind::Sphere(d) => ManifoldPoint::new(kind, unit_vector(rng, d + 1))
            .expect("normalized coordinates lie on the sphere"),
        ManifoldKind::Hyperbolic(d) => {
            let mut origin = vec![0.0; d + 1];
            origin[0] = 1.0;
            let origin = ManifoldPoint::new(kind, origin).expect("sheet origin");
            let t = random_tangent(&origin, rng.gen_range(0.0..1.5), rng);
            origin.exp(&t).expect("exp is total on the hyperboloid")
        }
    }
}

/// A random tangent vector at `at` with norm at most `scale`.
pub fn random_tangent(at: &ManifoldPoint, scale: f64, rng: &mut ChaCha8Rng) -> TangentVector {
    let dim = at.kind().ambient_dim();
    let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let coords = match at.kind() {
        ManifoldKind::Euclidean(_) => raw,
        ManifoldKind::Sphere(_) => {
            let c = crate::manifold::dot(&raw, at.coords());
            raw.iter()
                .zip(at.coords())
                .map(|(r, a)| r - c * a)
                .collect()
        }
        ManifoldKind::Hyperbolic(_) => {
            // tangent projection: v + <v,x>_L x, since <x,x>_L = -1
            let c = crate::manifold::minkowski_dot(&raw, at.coords());
            raw.iter()
                .zip(at.coords())
                .map(|(r, a)| r + c * a)
                .collect()
        }
    };
    let v = TangentVector::new_unchecked(at.clone(), coords);
    let n = v.norm();
    if n < 1e-6 {
        return TangentVector::zero(at.clone());
    }
    v.scaled(rng.gen_range(0.1..1.0) * scale / n)
}

/// A vertex function whose values cluster inside a geodesic ball, so that
/// logarithms and Fréchet means exist and are unique.
pub fn random_vertex_function(
    graph: &Arc<OrientedHypergraph>,
    kind: ManifoldKind,
    seed: u64,
) -> VertexFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = random_point(kind, &mut rng);
    let values = (0..graph.num_vertices())
        .map(|_| {
            let t = random_tangent(&center, CLUSTER_RADIUS, &mut rng);
            center
                .exp(&t)
                .expect("short geodesics stay on the manifold")
        })
        .collect();
    VertexFunction::new(Arc::clone(graph), values).expect("one value per vertex")
}

fn ambient_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Exp/log inversion, transport isometry, and distance-vs-norm checks on
/// `cases` random pairs.
pub fn geometry_battery(kind: ManifoldKind, cases: usize, seed: u64) -> Vec<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inversion = PropertyReport::new(format!("{kind}: exp/log inversion"), 1e-9);
    let mut isometry = PropertyReport::new(format!("{kind}: transport isometry"), 1e-9);
    let mut dist_norm = PropertyReport::new(format!("{kind}: distance equals log norm"), 1e-9);
    // stay clear of the sphere's injectivity radius
    let reach = match kind {
        ManifoldKind::Sphere(_) => std::f64::consts::PI - 0.35,
        _ => 2.5,
    };
    for case in 0..cases {
        let case_seed = rng.gen::<u64>();
        let mut r = ChaCha8Rng::seed_from_u64(case_seed);
        let a = random_point(kind, &mut r);
        let step = random_tangent(&a, reach, &mut r);
        let b = a.exp(&step).expect("within injectivity reach");
        let tag = || format!("case {case}, seed {case_seed:#x}");

        let log = a.log(&b).expect("b is within the injectivity domain");
        let back = a.exp(&log).expect("exp of a valid log");
        inversion.record(ambient_diff(back.coords(), b.coords()), tag);

        dist_norm.record((a.distance(&b).expect("same kind") - log.norm()).abs(), tag);

        let v = random_tangent(&a, 1.0, &mut r);
        let w = random_tangent(&a, 1.0, &mut r);
        let tv = v
            .parallel_transport(&b)
            .expect("transport along the geodesic");
        let tw = w
            .parallel_transport(&b)
            .expect("transport along the geodesic");
        let norm_err = (tv.norm() - v.norm()).abs();
        let inner_err = (tv.inner(&tw).expect("same base") - v.inner(&w).expect("same base")).abs();
        isometry.record(norm_err.max(inner_err), tag);
    }
    vec![inversion, isometry, dist_norm]
}

fn random_instance(
    kind: ManifoldKind,
    cfg: &BatteryConfig,
    rng: &mut ChaCha8Rng,
) -> (Arc<OrientedHypergraph>, VertexFunction, u64) {
    let seed = rng.gen::<u64>();
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let card = r.gen_range(1..=cfg.max_cardinality);
    let n = r.gen_range((2 * card).max(3)..=cfg.max_vertices);
    let m = r.gen_range(1..=cfg.n_edges);
    let graph = Arc::new(random_hypergraph(n, m, card, seed).expect("valid generator parameters"));
    let f = random_vertex_function(&graph, kind, seed ^ 0x9e37_79b9_7f4a_7c15);
    (graph, f, seed)
}

fn opposite_index(graph: &OrientedHypergraph) -> HashMap<(Vec<VertexId>, Vec<VertexId>), usize> {
    graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.in_set().to_vec(), e.out_set().to_vec()), i))
        .collect()
}

/// Gradient identities on random symmetric hypergraphs: vanishing on
/// locally constant functions, antisymmetry under parallel transport (both
/// gradients), and the two directions of the pairwise kernel
/// characterization.
pub fn gradient_identity_battery(
    kind: ManifoldKind,
    cfg: &BatteryConfig,
    seed: u64,
) -> Vec<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut constant_frechet = PropertyReport::new(
        format!("{kind}: constant edge kills Frechet gradient"),
        1e-9,
    );
    let mut antisym_frechet =
        PropertyReport::new(format!("{kind}: Frechet gradient antisymmetry"), 1e-9);
    let mut kernel_forward = PropertyReport::new(
        format!("{kind}: constant edge kills pairwise gradient"),
        1e-9,
    );
    let mut kernel_reverse = PropertyReport::new(
        format!("{kind}: distinct pair forces nonzero pairwise entry"),
        0.0,
    );
    let mut antisym_pairwise =
        PropertyReport::new(format!("{kind}: pairwise gradient antisymmetry"), 1e-9);

    for case in 0..cfg.cases {
        let (graph, f, inst_seed) = random_instance(kind, cfg, &mut rng);
        let tag = || format!("case {case}, seed {inst_seed:#x}");

        // freeze edge 0 to a constant and check both kernels
        let pivot = graph.edges()[0].clone();
        let common = f.value(pivot.in_set()[0]).clone();
        let mut frozen = f.values().to_vec();
        for &u in pivot.in_set().iter().chain(pivot.out_set()) {
            frozen[u - 1] = common.clone();
        }
        let f_frozen = f.with_values(frozen).expect("same graph");
        let grad_frozen = frechet_gradient(&f_frozen).expect("cluster instances are regular");
        constant_frechet.record(grad_frozen.vector(0).norm(), tag);
        let pair_frozen = pairwise_gradient(&f_frozen).expect("cluster instances are regular");
        let max_entry = pair_frozen
            .entries(0)
            .iter()
            .map(|p| p.vector.norm())
            .fold(0.0, f64::max);
        kernel_forward.record(max_entry, tag);

        // antisymmetry across opposite edges
        let opposites = opposite_index(&graph);
        let means = edge_means(&f).expect("cluster instances are regular");
        let grad = frechet_gradient(&f).expect("cluster instances are regular");
        let pair = pairwise_gradient(&f).expect("cluster instances are regular");
        for (ei, e) in graph.edges().iter().enumerate() {
            let oi = opposites[&(e.out_set().to_vec(), e.in_set().to_vec())];
            let carried = grad
                .vector(oi)
                .parallel_transport(means.x_in(ei))
                .expect("means stay in the cluster hull")
                .scaled(-1.0);
            antisym_frechet.record(
                ambient_diff(carried.coords(), grad.vector(ei).coords()),
                tag,
            );

            for entry in pair.entries(ei) {
                let twin = pair
                    .get(oi, entry.v, entry.u)
                    .expect("opposite edge has the swapped pair");
                let carried = twin
                    .parallel_transport(f.value(entry.u))
                    .expect("vertex values stay in the cluster hull")
                    .scaled(-1.0);
                antisym_pairwise.record(ambient_diff(carried.coords(), entry.vector.coords()), tag);

                // reverse kernel direction
                let d = f
                    .value(entry.u)
                    .distance(f.value(entry.v))
                    .expect("same kind");
                if d > 1e-6 && entry.vector.norm() == 0.0 {
                    kernel_reverse.record(1.0, tag);
                } else {
                    kernel_reverse.record(0.0, tag);
                }
            }
        }
    }
    vec![
        constant_frechet,
        antisym_frechet,
        kernel_forward,
        kernel_reverse,
        antisym_pairwise,
    ]
}

/// Euclidean Dirichlet pairing on random symmetric hypergraphs: for both
/// frameworks the gradient energy equals twice the vertex pairing
/// `<f, lap_2 f>` of the corresponding 2-Laplacian (eta = 0).
pub fn dirichlet_battery(cfg: &BatteryConfig, seed: u64) -> Vec<PropertyReport> {
    let kind = ManifoldKind::Euclidean(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frechet =
        PropertyReport::new("euclidean: energy = 2 <f, lap> (Frechet)".to_string(), 1e-9);
    let mut pairwise = PropertyReport::new(
        "euclidean: energy = 2 <f, lap> (pairwise)".to_string(),
        1e-9,
    );
    for case in 0..cfg.cases {
        let (_, f, inst_seed) = random_instance(kind, cfg, &mut rng);
        let tag = || format!("case {case}, seed {inst_seed:#x}");
        for (framework, variant, report) in [
            (
                Framework::Frechet,
                LaplaceVariant::IsotropicFrechet,
                &mut frechet,
            ),
            (
                Framework::Pairwise,
                LaplaceVariant::IsotropicPairwise,
                &mut pairwise,
            ),
        ] {
            let energy = dirichlet_energy(&f, framework).expect("euclidean instances are regular");
            let params = LaplaceParams::new(variant, 2.0, 0).expect("valid params");
            let field = laplacian_field(&f, &params).expect("euclidean instances are regular");
            let pairing: f64 = f
                .graph()
                .vertices()
                .map(|u| crate::manifold::dot(f.value(u).coords(), field[u - 1].coords()))
                .sum();
            report.record((energy - 2.0 * pairing).abs() / (1.0 + energy), tag);
        }
    }
    vec![frechet, pairwise]
}

/// Isotropic/anisotropic agreement at p = 2 and the exact in-degree scaling
/// between eta = 1 and eta = 0.
pub fn coincidence_battery(
    kind: ManifoldKind,
    cfg: &BatteryConfig,
    seed: u64,
) -> Vec<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p2 = PropertyReport::new(format!("{kind}: isotropic = anisotropic at p = 2"), 1e-10);
    let mut eta = PropertyReport::new(format!("{kind}: eta = 1 divides by in-degree"), 0.0);
    let pairs = [
        (
            LaplaceVariant::IsotropicFrechet,
            LaplaceVariant::AnisotropicFrechet,
        ),
        (
            LaplaceVariant::IsotropicPairwise,
            LaplaceVariant::AnisotropicPairwise,
        ),
    ];
    for case in 0..cfg.cases {
        let (graph, f, inst_seed) = random_instance(kind, cfg, &mut rng);
        let tag = || format!("case {case}, seed {inst_seed:#x}");
        for (iso, aniso) in pairs {
            let fi = laplacian_field(&f, &LaplaceParams::new(iso, 2.0, 0).expect("valid"))
                .expect("regular instance");
            let fa = laplacian_field(&f, &LaplaceParams::new(aniso, 2.0, 0).expect("valid"))
                .expect("regular instance");
            for (a, b) in fi.iter().zip(&fa) {
                p2.record(ambient_diff(a.coords(), b.coords()), tag);
            }
            for p in [1.5, 2.0, 3.0] {
                let l0 = laplacian_field(&f, &LaplaceParams::new(aniso, p, 0).expect("valid"))
                    .expect("regular instance");
                let l1 = laplacian_field(&f, &LaplaceParams::new(aniso, p, 1).expect("valid"))
                    .expect("regular instance");
                for (u, (a, b)) in l0.iter().zip(&l1).enumerate() {
                    let deg = graph.in_degree(u + 1).expect("valid vertex") as f64;
                    if deg == 0.0 {
                        continue;
                    }
                    let err = a
                        .coords()
                        .iter()
                        .zip(b.coords())
                        .map(|(x, y)| {
                            if x / deg == *y {
                                0.0
                            } else {
                                (x / deg - y).abs()
                            }
                        })
                        .fold(0.0, f64::max);
                    eta.record(err, tag);
                }
            }
        }
    }
    vec![p2, eta]
}

/// Independently coded graph p-Laplacian: scans singleton edges directly and
/// uses only the manifold maps, bypassing means, in-neighborhood indices,
/// and the hypergraph Laplacian implementation.
pub fn graph_p_laplacian(
    f: &VertexFunction,
    u: VertexId,
    p: f64,
    eta: u8,
    isotropic: bool,
) -> Result<TangentVector> {
    let fu = f.value(u);
    let dim = f.kind().ambient_dim();
    let mut sum = vec![0.0; dim];
    let mut aggregate = 0.0;
    let mut degree = 0usize;
    for e in f.graph().edges() {
        if e.in_set() != [u] {
            if e.in_set().len() != 1 || e.out_set().len() != 1 {
                return Err(Error::InvalidHypergraph(
                    "graph oracle requires cardinality-one edges".into(),
                ));
            }
            continue;
        }
        let v = e.out_set()[0];
        let w = e.weight();
        degree += 1;
        let log = fu.log(f.value(v))?;
        let d = log.norm();
        let coef = if isotropic {
            aggregate += w * d * d;
            w
        } else if p == 2.0 {
            w
        } else {
            if d <= 1e-12 && p < 2.0 {
                return Err(Error::ZeroDistanceTerm { p });
            }
            w.powf(0.5 * p) * d.powf(p - 2.0)
        };
        for (s, c) in sum.iter_mut().zip(log.coords()) {
            *s += coef * c;
        }
    }
    if degree == 0 {
        return Ok(TangentVector::zero(fu.clone()));
    }
    let factor = if isotropic && p != 2.0 {
        if aggregate <= 1e-12 && p < 2.0 {
            return Err(Error::ZeroDistanceTerm { p });
        }
        aggregate.powf(0.5 * (p - 2.0))
    } else {
        1.0
    };
    let mut coords: Vec<f64> = sum.iter().map(|s| -(factor * s)).collect();
    if eta == 1 {
        coords.iter_mut().for_each(|c| *c /= degree as f64);
    }
    Ok(TangentVector::new_unchecked(fu.clone(), coords))
}

/// On cardinality-one hypergraphs every variant must match the independent
/// graph oracle, and the Fréchet and pairwise heat flows must coincide step
/// for step.
pub fn graph_reduction_battery(
    kind: ManifoldKind,
    cfg: &BatteryConfig,
    seed: u64,
) -> Vec<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut oracle = PropertyReport::new(format!("{kind}: variants match graph oracle"), 1e-10);
    let mut traces = PropertyReport::new(format!("{kind}: Frechet/pairwise flows coincide"), 1e-10);
    for case in 0..cfg.cases {
        let inst_seed = rng.gen::<u64>();
        let mut r = ChaCha8Rng::seed_from_u64(inst_seed);
        let n = r.gen_range(4..=cfg.max_vertices);
        let m = r.gen_range(2..=(2 * cfg.n_edges));
        let graph = Arc::new(random_hypergraph(n, m, 1, inst_seed).expect("valid parameters"));
        let f = random_vertex_function(&graph, kind, inst_seed ^ 0x5851_f42d_4c95_7f2d);
        let tag = || format!("case {case}, seed {inst_seed:#x}");

        for p in [1.5, 2.0, 3.0] {
            for (variant, isotropic) in [
                (LaplaceVariant::IsotropicFrechet, true),
                (LaplaceVariant::IsotropicPairwise, true),
                (LaplaceVariant::AnisotropicFrechet, false),
                (LaplaceVariant::AnisotropicPairwise, false),
            ] {
                for eta in [0u8, 1u8] {
                    let params = LaplaceParams::new(variant, p, eta).expect("valid");
                    let field = laplacian_field(&f, &params).expect("regular instance");
                    for u in graph.vertices() {
                        let expected =
                            graph_p_laplacian(&f, u, p, eta, isotropic).expect("regular instance");
                        oracle.record(ambient_diff(field[u - 1].coords(), expected.coords()), tag);
                    }
                }
            }
        }

        let base = DiffusionConfig {
            params: LaplaceParams::new(LaplaceVariant::IsotropicFrechet, 2.0, 1).expect("valid"),
            step_size: 0.2,
            max_steps: 300,
            residual_tol: 1e-9,
            record_every: 30,
        };
        let mut pair_cfg = base;
        pair_cfg.params =
            LaplaceParams::new(LaplaceVariant::IsotropicPairwise, 2.0, 1).expect("valid");
        let tf = diffuse(&f, &base).expect("regular instance");
        let tp = diffuse(&f, &pair_cfg).expect("regular instance");
        if tf.snapshots.len() != tp.snapshots.len() {
            traces.record(f64::INFINITY, tag);
            continue;
        }
        for ((sa, fa), (sb, fb)) in tf.snapshots.iter().zip(&tp.snapshots) {
            if sa != sb {
                traces.record(f64::INFINITY, tag);
                continue;
            }
            for (pa, pb) in fa.values().iter().zip(fb.values()) {
                traces.record(ambient_diff(pa.coords(), pb.coords()), tag);
            }
        }
    }
    vec![oracle, traces]
}

/// The three manifold kinds exercised by the batteries.
pub fn battery_kinds() -> [ManifoldKind; 3] {
    [
        ManifoldKind::Euclidean(3),
        ManifoldKind::Sphere(2),
        ManifoldKind::Hyperbolic(2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::HyperEdge;
    use approx::assert_abs_diff_eq;

    #[test]
    fn oracle_matches_direct_graph_formula() {
        let edges = vec![
            HyperEdge::new(vec![1], vec![2], 1.0).unwrap(),
            HyperEdge::new(vec![1], vec![3], 2.0).unwrap(),
        ];
        let g = Arc::new(OrientedHypergraph::new(3, edges).unwrap());
        let values = [0.0, 1.0, 4.0]
            .iter()
            .map(|&x| ManifoldPoint::new(ManifoldKind::Euclidean(1), vec![x]).unwrap())
            .collect();
        let f = VertexFunction::new(g, values).unwrap();
        // anisotropic p = 3: -(w^{3/2} d) (f(v) - f(u)) summed
        let l = graph_p_laplacian(&f, 1, 3.0, 0, false).unwrap();
        let expected = -((1.0f64).powf(1.5) * 1.0 * 1.0 + (2.0f64).powf(1.5) * 4.0 * 4.0);
        assert_abs_diff_eq!(l.coords()[0], expected, epsilon = 1e-12);
        // isotropic p = 3: -(sum w d^2)^{1/2} * sum w log
        let l = graph_p_laplacian(&f, 1, 3.0, 0, true).unwrap();
        let agg: f64 = 1.0 + 2.0 * 16.0;
        assert_abs_diff_eq!(
            l.coords()[0],
            -(agg.sqrt() * (1.0 + 2.0 * 4.0)),
            epsilon = 1e-12
        );
        // no in-edges at vertex 2
        assert!(graph_p_laplacian(&f, 2, 3.0, 0, true).unwrap().is_zero());
    }

    #[test]
    fn small_batteries_pass() {
        let cfg = BatteryConfig {
            cases: 10,
            max_vertices: 12,
            n_edges: 3,
            max_cardinality: 3,
        };
        for kind in battery_kinds() {
            for report in geometry_battery(kind, 50, 1)
                .into_iter()
                .chain(gradient_identity_battery(kind, &cfg, 2))
                .chain(coincidence_battery(kind, &cfg, 3))
                .chain(graph_reduction_battery(kind, &cfg, 4))
            {
                assert!(
                    report.passed(),
                    "{}: max error {:.3e}, failures: {:?}",
                    report.name,
                    report.max_error,
                    report.failures
                );
            }
        }
        for report in dirichlet_battery(&cfg, 5) {
            assert!(report.passed(), "{}: {:?}", report.name, report.failures);
        }
    }
}
