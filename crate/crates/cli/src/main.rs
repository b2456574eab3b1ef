//! Command-line driver: generate random embedded hypergraphs, integrate
//! heat diffusion, expand hypergraphs to graphs, and run the self-check
//! batteries.
//!
//! Exit codes: 0 success (and convergence for `diffuse`); 1 self-check
//! violation; 2 invalid input, parameters, or I/O failure; 3 `diffuse` hit
//! the step limit without converging; 4 numerical singularity (antipodal
//! points, degenerate p < 2 term, or a mean that failed to converge).

use clap::{Parser, Subcommand, ValueEnum};
use hyperlap::calculus::{LaplaceParams, LaplaceVariant, VertexFunction};
use hyperlap::diffusion::{diffuse, embed_random_octant, DiffusionConfig};
use hyperlap::error::Error;
use hyperlap::io::{
    classify, load_hypergraph, save_hypergraph, write_json, write_trace_csv, GeneratorInfo,
    HypergraphDocument, TraceMetadata, CONSTANT_SPREAD_THRESHOLD,
};
use hyperlap::manifold::ManifoldKind;
use hyperlap::verify::{
    battery_kinds, coincidence_battery, dirichlet_battery, geometry_battery,
    gradient_identity_battery, graph_reduction_battery, BatteryConfig, PropertyReport,
};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "hyperlap",
    version,
    about = "Heat diffusion on manifold-valued hypergraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random symmetric unit-weight hypergraph embedded on an
    /// octant of the unit 2-sphere.
    Generate {
        /// Number of vertices
        #[arg(long)]
        vertices: usize,
        /// Number of base edges before symmetrization
        #[arg(long)]
        edges: usize,
        /// Largest input/output set cardinality
        #[arg(long, default_value_t = 3)]
        max_cardinality: usize,
        /// Seed for both the structure and the embedding
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output document path (JSON)
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate the heat flow on a stored hypergraph and export the trace
    /// (CSV plus a `.meta.json` sidecar).
    Diffuse {
        /// Input hypergraph document with features
        #[arg(long)]
        input: PathBuf,
        /// Operator family; `graph` expands the hypergraph first
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Isotropic or anisotropic p-dependence (irrelevant at p = 2)
        #[arg(long, value_enum, default_value_t = FlavorArg::Isotropic)]
        flavor: FlavorArg,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// In-degree normalization switch (0 or 1)
        #[arg(long, default_value_t = 1)]
        eta: u8,
        /// Step size of the explicit scheme
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
        /// Residual tolerance declaring equilibrium
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        #[arg(long, default_value_t = 100)]
        record_every: usize,
        /// Output CSV path; metadata goes to `<out>.meta.json`
        #[arg(long)]
        out: PathBuf,
    },
    /// Expand a hypergraph document into its graph (all cardinalities one).
    Expand {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the seeded self-check batteries and report per-property errors.
    Check {
        /// Random instances per calculus battery
        #[arg(long, default_value_t = 200)]
        cases: usize,
        /// Random pairs per geometry battery
        #[arg(long, default_value_t = 1000)]
        geometry_cases: usize,
        /// Manifolds to exercise
        #[arg(long, value_delimiter = ',', default_values_t = vec![
            ManifoldArg::Euclidean, ManifoldArg::Sphere, ManifoldArg::Hyperbolic
        ])]
        manifolds: Vec<ManifoldArg>,
        #[arg(long, default_value_t = 20)]
        max_vertices: usize,
        /// Base edges per random hypergraph
        #[arg(long, default_value_t = 5)]
        edges: usize,
        #[arg(long, default_value_t = 4)]
        max_cardinality: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Frechet,
    Pairwise,
    Graph,
}

impl VariantArg {
    fn name(self) -> &'static str {
        match self {
            VariantArg::Frechet => "frechet",
            VariantArg::Pairwise => "pairwise",
            VariantArg::Graph => "graph",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    Isotropic,
    Anisotropic,
}

impl FlavorArg {
    fn name(self) -> &'static str {
        match self {
            FlavorArg::Isotropic => "isotropic",
            FlavorArg::Anisotropic => "anisotropic",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ManifoldArg {
    Euclidean,
    Sphere,
    Hyperbolic,
}

impl std::fmt::Display for ManifoldArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ManifoldArg::Euclidean => "euclidean",
            ManifoldArg::Sphere => "sphere",
            ManifoldArg::Hyperbolic => "hyperbolic",
        })
    }
}

impl ManifoldArg {
    fn kind(self) -> ManifoldKind {
        let [e, s, h] = battery_kinds();
        match self {
            ManifoldArg::Euclidean => e,
            ManifoldArg::Sphere => s,
            ManifoldArg::Hyperbolic => h,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e.root() {
                Error::Antipodal(_)
                | Error::ZeroDistanceTerm { .. }
                | Error::MeanNotConverged { .. } => 4,
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> hyperlap::Result<i32> {
    match command {
        Command::Generate {
            vertices,
            edges,
            max_cardinality,
            seed,
            out,
        } => {
            let graph = hyperlap::random_hypergraph(vertices, edges, max_cardinality, seed)?;
            let graph = Arc::new(graph);
            let f = embed_random_octant(Arc::clone(&graph), seed);
            let doc = HypergraphDocument::from_parts(
                ManifoldKind::Sphere(2),
                &graph,
                Some(&f),
                Some(GeneratorInfo {
                    seed,
                    n_vertices: vertices,
                    n_edges: edges,
                    max_cardinality,
                }),
            );
            save_hypergraph(&out, &doc)?;
            println!(
                "wrote {}: {} vertices, {} edges (seed {seed})",
                out.display(),
                graph.num_vertices(),
                graph.edges().len()
            );
            let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
            for e in graph.edges() {
                *histogram.entry(e.cardinality()).or_default() += 1;
            }
            println!("edge cardinality histogram:");
            for (card, count) in histogram {
                println!("  {card}: {count}");
            }
            Ok(0)
        }
        Command::Diffuse {
            input,
            variant,
            flavor,
            p,
            eta,
            tau,
            tol,
            max_steps,
            record_every,
            out,
        } => {
            let doc = load_hypergraph(&input)?;
            let generator = doc.generator;
            let (graph, function) = doc.into_parts()?;
            let function = function.ok_or_else(|| {
                Error::Validation("input document carries no vertex features".into())
            })?;
            let function = if variant == VariantArg::Graph {
                let expanded = Arc::new(graph.expand_to_graph());
                VertexFunction::new(expanded, function.values().to_vec())?
            } else {
                function
            };
            let laplace_variant = match (variant, flavor) {
                (VariantArg::Pairwise, FlavorArg::Isotropic) => LaplaceVariant::IsotropicPairwise,
                (VariantArg::Pairwise, FlavorArg::Anisotropic) => {
                    LaplaceVariant::AnisotropicPairwise
                }
                (_, FlavorArg::Isotropic) => LaplaceVariant::IsotropicFrechet,
                (_, FlavorArg::Anisotropic) => LaplaceVariant::AnisotropicFrechet,
            };
            let cfg = DiffusionConfig {
                params: LaplaceParams::new(laplace_variant, p, eta)?,
                step_size: tau,
                max_steps,
                residual_tol: tol,
                record_every,
            };
            let trace = diffuse(&function, &cfg)?;
            write_trace_csv(&out, &trace)?;
            let end = trace.final_state();
            // an equilibrium classification exists only at convergence
            let classification = if trace.converged {
                classify(end)
            } else {
                "none"
            };
            let meta = TraceMetadata {
                schema_version: hyperlap::io::SCHEMA_VERSION.to_string(),
                input_path: input.display().to_string(),
                variant: variant.name().to_string(),
                flavor: flavor.name().to_string(),
                p,
                eta,
                step_size: tau,
                residual_tol: tol,
                max_steps,
                record_every,
                generator,
                converged: trace.converged,
                steps_taken: trace.steps_taken,
                final_residual: trace.final_residual(),
                final_spread: hyperlap::vertex_spread(end),
                spread_threshold: CONSTANT_SPREAD_THRESHOLD,
                classification: classification.to_string(),
                final_coordinates: end.values().iter().map(|p| p.coords().to_vec()).collect(),
            };
            let meta_path = sidecar_path(&out);
            write_json(&meta_path, &meta)?;
            if trace.converged {
                println!(
                    "converged after {} steps (residual {:.3e}); classification: {}",
                    trace.steps_taken,
                    trace.final_residual(),
                    meta.classification
                );
                Ok(0)
            } else {
                println!(
                    "no equilibrium after {} steps (residual {:.3e})",
                    trace.steps_taken,
                    trace.final_residual()
                );
                Ok(3)
            }
        }
        Command::Expand { input, out } => {
            let doc = load_hypergraph(&input)?;
            let generator = doc.generator;
            let kind = doc.manifold.to_kind()?;
            let (graph, function) = doc.into_parts()?;
            let expanded = graph.expand_to_graph();
            let function = function
                .map(|f| VertexFunction::new(Arc::new(expanded.clone()), f.values().to_vec()))
                .transpose()?;
            let out_doc =
                HypergraphDocument::from_parts(kind, &expanded, function.as_ref(), generator);
            save_hypergraph(&out, &out_doc)?;
            println!(
                "wrote {}: {} vertices, {} graph edges",
                out.display(),
                expanded.num_vertices(),
                expanded.edges().len()
            );
            Ok(0)
        }
        Command::Check {
            cases,
            geometry_cases,
            manifolds,
            max_vertices,
            edges,
            max_cardinality,
            seed,
        } => {
            let cfg = BatteryConfig {
                cases,
                max_vertices,
                n_edges: edges,
                max_cardinality,
            };
            let mut reports: Vec<PropertyReport> = Vec::new();
            for m in &manifolds {
                let kind = m.kind();
                reports.extend(geometry_battery(kind, geometry_cases, seed));
                reports.extend(gradient_identity_battery(kind, &cfg, seed ^ 1));
                reports.extend(coincidence_battery(kind, &cfg, seed ^ 2));
                reports.extend(graph_reduction_battery(kind, &cfg, seed ^ 3));
            }
            if manifolds.contains(&ManifoldArg::Euclidean) {
                reports.extend(dirichlet_battery(&cfg, seed ^ 4));
            }
            let mut violations = 0;
            for r in &reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                println!(
                    "{status} {} [{} cases, max error {:.3e}, tolerance {:.1e}]",
                    r.name, r.cases, r.max_error, r.tolerance
                );
                if !r.passed() {
                    violations += 1;
                    for failure in r.failures.iter().take(3) {
                        println!("     reproducer: {failure}");
                    }
                }
            }
            if violations > 0 {
                eprintln!("{violations} properties violated");
                return Ok(1);
            }
            println!("all {} properties passed", reports.len());
            Ok(0)
        }
    }
}

fn sidecar_path(csv: &std::path::Path) -> PathBuf {
    let mut name = csv.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    csv.with_file_name(name)
}
