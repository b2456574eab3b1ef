//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with:
//!   cargo test -p hyperlap-cli --test acceptance -- --nocapture --test-threads=1

use hyperlap::calculus::{
    dirichlet_energy, laplacian_field, Framework, LaplaceParams, LaplaceVariant, VertexFunction,
};
use hyperlap::diffusion::{
    diffuse, diffusion_step, embed_random_octant, vertex_spread, DiffusionConfig,
};
use hyperlap::hypergraph::{random_hypergraph, HyperEdge, OrientedHypergraph};
use hyperlap::manifold::{ManifoldKind, ManifoldPoint};
use hyperlap::verify::{
    battery_kinds, coincidence_battery, geometry_battery, gradient_identity_battery,
    graph_reduction_battery, random_vertex_function, BatteryConfig, PropertyReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

const LEMMA_CONFIG: BatteryConfig = BatteryConfig {
    cases: 200,
    max_vertices: 20,
    n_edges: 5,
    max_cardinality: 4,
};

fn banner(criterion: usize, name: &str, passed: bool, detail: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {criterion} ({name}): {status} — {detail}");
}

fn assert_reports(criterion: usize, name: &str, reports: &[PropertyReport], detail: &str) {
    let passed = reports.iter().all(PropertyReport::passed);
    banner(criterion, name, passed, detail);
    for r in reports {
        assert!(
            r.passed(),
            "criterion {criterion}: {} violated (max error {:.3e} > {:.1e}): {:?}",
            r.name,
            r.max_error,
            r.tolerance,
            r.failures
        );
    }
}

// Criterion 1: 1000 seeded exp/log inversion, transport isometry, and
// distance-norm checks per manifold kind at 1e-9, in under five seconds.
#[test]
fn criterion_1_geometry_suite() {
    let start = Instant::now();
    let mut reports = Vec::new();
    for kind in battery_kinds() {
        reports.extend(geometry_battery(kind, 1000, 0xC1));
    }
    let elapsed = start.elapsed();
    let max_err = reports.iter().map(|r| r.max_error).fold(0.0, f64::max);
    assert_reports(
        1,
        "geometry suite",
        &reports,
        &format!("3 kinds x 1000 cases, max error {max_err:.3e}, {elapsed:?}"),
    );
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "geometry suite took {elapsed:?}"
    );
}

// Criterion 2: gradient identities (i)-(iv) including the reverse direction
// of (iii), on 200 random symmetric hypergraphs per manifold kind at 1e-9.
#[test]
fn criterion_2_gradient_identities() {
    let mut reports = Vec::new();
    for kind in battery_kinds() {
        reports.extend(gradient_identity_battery(kind, &LEMMA_CONFIG, 0xC2));
    }
    let max_err = reports.iter().map(|r| r.max_error).fold(0.0, f64::max);
    assert_reports(
        2,
        "gradient identity suite",
        &reports,
        &format!("3 kinds x 200 instances, max error {max_err:.3e}"),
    );
}

// Criterion 3, as stated: on 200 random Euclidean hypergraphs,
// |<grad f, grad f> + 1/2 <f, lap_2 f>| <= 1e-9 (1 + energy), for the
// Fréchet framework and for the pairwise framework with the semi inner
// product.
//
// This form is not attainable for the operators fixed by criterion 7: the
// identity these operators satisfy on symmetric hypergraphs is
// <grad f, grad f> = 2 <f, lap_2 f> (note the sign of the pairing and the
// constant). The test asserts the stated form and reports the measured
// relationship; the companion check below keeps the substance covered.
#[test]
fn criterion_3_dirichlet_identity_as_stated() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let mut worst_literal = 0.0_f64;
    let mut worst_corrected = 0.0_f64;
    for _ in 0..200 {
        let seed = rng.gen::<u64>();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let card = r.gen_range(1..=4);
        let n = r.gen_range((2 * card).max(3)..=20);
        let m = r.gen_range(1..=5);
        let graph = Arc::new(random_hypergraph(n, m, card, seed).unwrap());
        let f = random_vertex_function(&graph, ManifoldKind::Euclidean(3), seed ^ 0xABCD);

        for (framework, variant) in [
            (Framework::Frechet, LaplaceVariant::IsotropicFrechet),
            (Framework::Pairwise, LaplaceVariant::IsotropicPairwise),
        ] {
            let energy = dirichlet_energy(&f, framework).unwrap();
            let params = LaplaceParams::new(variant, 2.0, 0).unwrap();
            let field = laplacian_field(&f, &params).unwrap();
            let pairing: f64 = graph
                .vertices()
                .map(|u| {
                    f.value(u)
                        .coords()
                        .iter()
                        .zip(field[u - 1].coords())
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
                })
                .sum();
            worst_literal = worst_literal.max((energy + 0.5 * pairing).abs() / (1.0 + energy));
            worst_corrected = worst_corrected.max((energy - 2.0 * pairing).abs() / (1.0 + energy));
        }
    }
    let passed = worst_literal <= 1e-9;
    banner(
        3,
        "Dirichlet identity (as stated)",
        passed,
        &format!(
            "max |E + (1/2)<f,lap f>|/(1+E) = {worst_literal:.3e} (stated bound 1e-9); \
             measured identity E = 2<f,lap f> holds to {worst_corrected:.3e}"
        ),
    );
    assert!(
        passed,
        "stated Dirichlet form violated at {worst_literal:.3e}; the operators satisfy \
         E = 2<f,lap_2 f> instead (max error {worst_corrected:.3e}); see this test's comment"
    );
}

// Substance companion to criterion 3: the energy/2-Laplacian pairing that
// the implemented operators do satisfy, at the stated tolerance and scale.
#[test]
fn criterion_3_dirichlet_identity_measured_form() {
    let reports = hyperlap::verify::dirichlet_battery(&LEMMA_CONFIG, 0xC3);
    let max_err = reports.iter().map(|r| r.max_error).fold(0.0, f64::max);
    assert_reports(
        3,
        "Dirichlet identity (measured form, both frameworks)",
        &reports,
        &format!("200 instances, max error {max_err:.3e}"),
    );
}

// Criterion 4: isotropic and anisotropic variants agree at p = 2 within
// 1e-10 on all suite instances, both frameworks; eta = 1 equals eta = 0
// divided by the in-degree exactly.
#[test]
fn criterion_4_p2_coincidence_and_eta_scaling() {
    let mut reports = Vec::new();
    for kind in battery_kinds() {
        reports.extend(coincidence_battery(kind, &LEMMA_CONFIG, 0xC4));
    }
    let max_err = reports.iter().map(|r| r.max_error).fold(0.0, f64::max);
    assert_reports(
        4,
        "p = 2 coincidence and eta scaling",
        &reports,
        &format!("3 kinds x 200 instances, max deviation {max_err:.3e}"),
    );
}

// Criterion 5: on 200 cardinality-one hypergraphs all four variants match
// the independently coded graph p-Laplacian (p in {1.5, 2, 3}) at 1e-10,
// and the Fréchet/pairwise diffusion traces coincide step for step.
#[test]
fn criterion_5_graph_reduction() {
    let mut reports = Vec::new();
    for kind in battery_kinds() {
        reports.extend(graph_reduction_battery(kind, &LEMMA_CONFIG, 0xC5));
    }
    let max_err = reports.iter().map(|r| r.max_error).fold(0.0, f64::max);
    assert_reports(
        5,
        "graph reduction oracle",
        &reports,
        &format!("3 kinds x 200 graphs, max deviation {max_err:.3e}"),
    );
}

fn octant_run(
    graph: &Arc<OrientedHypergraph>,
    seed: u64,
    variant: LaplaceVariant,
    step_size: f64,
    max_steps: usize,
) -> (bool, f64) {
    let f0 = embed_random_octant(Arc::clone(graph), seed ^ 0x00AB_CDEF);
    let cfg = DiffusionConfig {
        params: LaplaceParams::new(variant, 2.0, 1).unwrap(),
        step_size,
        max_steps,
        residual_tol: 1e-8,
        record_every: max_steps,
    };
    let trace = diffuse(&f0, &cfg).unwrap();
    (trace.converged, vertex_spread(trace.final_state()))
}

// Criterion 6: qualitative reproduction of the sphere experiment, all
// parts within one two-minute budget.
//
// (a) Expanded-graph diffusion from octant embeddings reaches consensus
//     (spread < 1e-4) on at least 95 of 100 seeds.
// (b) With a few high-cardinality edges (two base edges, cardinality up to
//     five), some seed converges (residual < 1e-8) to a non-constant
//     equilibrium (spread > 1e-3) under the Fréchet Laplacian and some seed
//     under the pairwise Laplacian. The detail line also reports how far
//     apart the two frameworks' equilibria land (max per-vertex geodesic
//     distance where both converged) and their step counts, which is the
//     observable form of the Fréchet/pairwise discrepancy here.
// (c) As stated: some seed yields different constant/non-constant
//     classifications under the two Laplacians. This did not occur once in
//     extensive searching (~5500 paired converged runs across ~25 instance
//     families, step sizes 0.05-0.8, eta in {0, 1}, horizons up to 3e6
//     steps): the operators are identical on Euclidean data and differ only
//     by curvature corrections here, so from a shared initial embedding
//     both flows land in the same class every time. The discrepancy the
//     instances do exhibit is the one quantified in (b): same-class
//     equilibria differing by O(0.5) rad with ~100x convergence-speed gaps.
//     The check runs as stated on the boundary family where both classes
//     occur (n = 8, 8 base edges, cardinality <= 3) and fails honestly with
//     the measured counts.
#[test]
fn criterion_6_sphere_experiment() {
    let start = Instant::now();

    // (a) expanded-graph consensus
    let mut consensus = 0;
    for seed in 0..100u64 {
        let graph = Arc::new(random_hypergraph(8, 12, 2, seed).unwrap().expand_to_graph());
        let (converged, spread) =
            octant_run(&graph, seed, LaplaceVariant::IsotropicFrechet, 0.2, 30_000);
        if converged && spread < 1e-4 {
            consensus += 1;
        }
    }
    banner(
        6,
        "sphere experiment (a): expanded-graph consensus",
        consensus >= 95,
        &format!("consensus on {consensus}/100 seeds"),
    );

    // (b) non-constant equilibria under both Laplacians
    let mut frechet_nonconstant = 0;
    let mut pairwise_nonconstant = 0;
    let mut max_gap = 0.0_f64;
    let mut fastest_frechet = usize::MAX;
    let mut slowest_pairwise = 0usize;
    for seed in 0..100u64 {
        let graph = Arc::new(random_hypergraph(10, 2, 5, seed).unwrap());
        let f0 = embed_random_octant(Arc::clone(&graph), seed ^ 0x00AB_CDEF);
        let mut finals = Vec::new();
        for variant in [
            LaplaceVariant::IsotropicFrechet,
            LaplaceVariant::IsotropicPairwise,
        ] {
            let cfg = DiffusionConfig {
                params: LaplaceParams::new(variant, 2.0, 1).unwrap(),
                step_size: 0.3,
                max_steps: 20_000,
                residual_tol: 1e-8,
                record_every: 20_000,
            };
            let trace = diffuse(&f0, &cfg).unwrap();
            let nonconstant = trace.converged && vertex_spread(trace.final_state()) > 1e-3;
            if nonconstant {
                if variant == LaplaceVariant::IsotropicFrechet {
                    frechet_nonconstant += 1;
                    fastest_frechet = fastest_frechet.min(trace.steps_taken);
                } else {
                    pairwise_nonconstant += 1;
                    slowest_pairwise = slowest_pairwise.max(trace.steps_taken);
                }
            }
            finals.push(trace.converged.then(|| trace.final_state().clone()));
        }
        if let (Some(fa), Some(fb)) = (&finals[0], &finals[1]) {
            let gap = fa
                .values()
                .iter()
                .zip(fb.values())
                .map(|(a, b)| a.distance(b).unwrap())
                .fold(0.0_f64, f64::max);
            max_gap = max_gap.max(gap);
        }
    }
    banner(
        6,
        "sphere experiment (b): non-constant equilibria",
        frechet_nonconstant >= 1 && pairwise_nonconstant >= 1,
        &format!(
            "Frechet {frechet_nonconstant}/100, pairwise {pairwise_nonconstant}/100; \
             equilibria differ by up to {max_gap:.2} rad per vertex (Frechet settles \
             in as few as {fastest_frechet} steps, pairwise needs up to {slowest_pairwise})"
        ),
    );

    // (c) classification mismatch, as stated
    let mut mismatches = 0;
    let mut constant_pairs = 0;
    let mut nonconstant_pairs = 0;
    for seed in 0..100u64 {
        let graph = Arc::new(random_hypergraph(8, 8, 3, seed).unwrap());
        let (fc, fs) = octant_run(&graph, seed, LaplaceVariant::IsotropicFrechet, 0.3, 20_000);
        let (pc, ps) = octant_run(&graph, seed, LaplaceVariant::IsotropicPairwise, 0.3, 20_000);
        if fc && pc {
            match (fs > 1e-3, ps > 1e-3) {
                (a, b) if a != b => mismatches += 1,
                (true, _) => nonconstant_pairs += 1,
                _ => constant_pairs += 1,
            }
        }
    }
    let elapsed = start.elapsed();
    banner(
        6,
        "sphere experiment (c): classification mismatch (as stated)",
        mismatches >= 1,
        &format!(
            "mismatches {mismatches}/100 (agreeing pairs: {constant_pairs} constant, \
             {nonconstant_pairs} non-constant); total experiment runtime {elapsed:?}"
        ),
    );

    assert!(elapsed.as_secs_f64() < 120.0, "experiment took {elapsed:?}");
    assert!(consensus >= 95, "graph consensus rate {consensus}/100 < 95");
    assert!(
        frechet_nonconstant >= 1,
        "no Frechet non-constant equilibrium"
    );
    assert!(
        pairwise_nonconstant >= 1,
        "no pairwise non-constant equilibrium"
    );
    assert!(
        mismatches >= 1,
        "no constant/non-constant classification mismatch in 100 seeds; the observed \
         form of the discrepancy is reported under (b); see this test's comment"
    );
}

// Criterion 7: the hand-computed instances are reproduced exactly.
#[test]
fn criterion_7_hand_oracles() {
    // f = (0, 1, 3) on the edge ({1}, {2, 3}): both 2-Laplacians give -2.
    let edges = vec![HyperEdge::new(vec![1], vec![2, 3], 1.0).unwrap()];
    let graph = Arc::new(OrientedHypergraph::new(3, edges).unwrap());
    let values = [0.0, 1.0, 3.0]
        .iter()
        .map(|&x| ManifoldPoint::new(ManifoldKind::Euclidean(1), vec![x]).unwrap())
        .collect();
    let f = VertexFunction::new(graph, values).unwrap();
    let mut exact = true;
    for variant in [
        LaplaceVariant::IsotropicFrechet,
        LaplaceVariant::IsotropicPairwise,
    ] {
        let params = LaplaceParams::new(variant, 2.0, 0).unwrap();
        let lap = hyperlap::p_laplacian(&f, 1, &params).unwrap();
        exact &= lap.coords() == [-2.0];
        assert_eq!(lap.coords(), &[-2.0], "{variant:?}");
    }

    // two-node step: f = (0, 4), tau = 0.25 maps to exactly (1, 3)
    let edges = vec![
        HyperEdge::new(vec![1], vec![2], 1.0).unwrap(),
        HyperEdge::new(vec![2], vec![1], 1.0).unwrap(),
    ];
    let graph = Arc::new(OrientedHypergraph::new(2, edges).unwrap());
    let values = [0.0, 4.0]
        .iter()
        .map(|&x| ManifoldPoint::new(ManifoldKind::Euclidean(1), vec![x]).unwrap())
        .collect();
    let f = VertexFunction::new(graph, values).unwrap();
    let cfg = DiffusionConfig {
        params: LaplaceParams::new(LaplaceVariant::IsotropicFrechet, 2.0, 0).unwrap(),
        step_size: 0.25,
        max_steps: 1,
        residual_tol: 1e-12,
        record_every: 1,
    };
    let next = diffusion_step(&f, &cfg).unwrap();
    exact &= next.value(1).coords() == [1.0] && next.value(2).coords() == [3.0];
    assert_eq!(next.value(1).coords(), &[1.0]);
    assert_eq!(next.value(2).coords(), &[3.0]);
    banner(
        7,
        "hand-computed oracles",
        exact,
        "both 2-Laplacians = -2; step = (1, 3), exact",
    );
}

// Criterion 8: CLI outputs re-run from their echoed configuration are
// byte-identical.
#[test]
fn criterion_8_cli_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_hyperlap");
    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin)
            .args(args)
            .output()
            .expect("binary runs");
        assert!(
            out.status.code() == Some(0) || out.status.code() == Some(3),
            "{out:?}"
        );
    };

    let input_a = dir.path().join("in_a.json");
    let input_b = dir.path().join("in_b.json");
    for input in [&input_a, &input_b] {
        run(&[
            "generate",
            "--vertices",
            "10",
            "--edges",
            "3",
            "--max-cardinality",
            "3",
            "--seed",
            "77",
            "--out",
            input.to_str().unwrap(),
        ]);
    }
    let bytes_a = std::fs::read(&input_a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&input_b).unwrap());

    let csv_a = dir.path().join("a.csv");
    run(&[
        "diffuse",
        "--input",
        input_a.to_str().unwrap(),
        "--variant",
        "pairwise",
        "--tau",
        "0.2",
        "--out",
        csv_a.to_str().unwrap(),
    ]);

    // re-run strictly from the echoed configuration
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.csv.meta.json")).unwrap())
            .unwrap();
    let csv_b = dir.path().join("b.csv");
    run(&[
        "diffuse",
        "--input",
        meta["input_path"].as_str().unwrap(),
        "--variant",
        meta["variant"].as_str().unwrap(),
        "--flavor",
        meta["flavor"].as_str().unwrap(),
        "--p",
        &meta["p"].to_string(),
        "--eta",
        &meta["eta"].to_string(),
        "--tau",
        &meta["step_size"].to_string(),
        "--tol",
        &meta["residual_tol"].to_string(),
        "--max-steps",
        &meta["max_steps"].to_string(),
        "--record-every",
        &meta["record_every"].to_string(),
        "--out",
        csv_b.to_str().unwrap(),
    ]);
    let trace_a = std::fs::read(&csv_a).unwrap();
    let trace_b = std::fs::read(&csv_b).unwrap();
    assert_eq!(trace_a, trace_b);
    let meta_b: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("b.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta, meta_b);
    banner(
        8,
        "CLI reproducibility",
        true,
        "generate and diffuse outputs byte-identical under echoed configs",
    );
}
