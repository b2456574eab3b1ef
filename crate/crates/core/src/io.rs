//! Serialization: hypergraph documents (JSON) and diffusion traces (CSV
//! rows plus a JSON metadata sidecar).
//!
//! Floating-point values are emitted in shortest round-trip decimal form, so
//! `load(save(x)) = x` holds bit-exactly and identical inputs produce
//! byte-identical outputs. All writes go through a temp-file-and-rename.

use crate::calculus::VertexFunction;
use crate::diffusion::{vertex_spread, DiffusionTrace};
use crate::error::{Error, Result};
use crate::hypergraph::{HyperEdge, OrientedHypergraph};
use crate::manifold::{ManifoldKind, ManifoldPoint};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

pub const SCHEMA_VERSION: &str = "1";

/// Vertex functions with spread below this are classified as constant.
pub const CONSTANT_SPREAD_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub kind: String,
    pub dim: usize,
}

impl ManifoldSpec {
    pub fn of(kind: ManifoldKind) -> Self {
        ManifoldSpec {
            kind: kind.name().to_string(),
            dim: kind.intrinsic_dim(),
        }
    }

    pub fn to_kind(&self) -> Result<ManifoldKind> {
        match self.kind.as_str() {
            "euclidean" => Ok(ManifoldKind::Euclidean(self.dim)),
            "sphere" => Ok(ManifoldKind::Sphere(self.dim)),
            "hyperbolic" => Ok(ManifoldKind::Hyperbolic(self.dim)),
            other => Err(Error::Validation(format!(
                "unknown manifold kind {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDocument {
    #[serde(rename = "in")]
    pub in_set: Vec<usize>,
    pub out: Vec<usize>,
    pub weight: f64,
}

/// Provenance of a generated hypergraph, echoed into trace metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub seed: u64,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub max_cardinality: usize,
}

/// On-disk form of a hypergraph with optional per-vertex features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergraphDocument {
    pub schema_version: String,
    pub manifold: ManifoldSpec,
    pub num_vertices: usize,
    pub edges: Vec<EdgeDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorInfo>,
}

impl HypergraphDocument {
    pub fn from_parts(
        kind: ManifoldKind,
        graph: &OrientedHypergraph,
        features: Option<&VertexFunction>,
        generator: Option<GeneratorInfo>,
    ) -> Self {
        HypergraphDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            manifold: ManifoldSpec::of(kind),
            num_vertices: graph.num_vertices(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeDocument {
                    in_set: e.in_set().to_vec(),
                    out: e.out_set().to_vec(),
                    weight: e.weight(),
                })
                .collect(),
            features: features.map(|f| f.values().iter().map(|p| p.coords().to_vec()).collect()),
            generator,
        }
    }

    /// Rebuilds the validated in-memory structures. Every hypergraph and
    /// point invariant is re-checked; violations name the offending edge or
    /// vertex.
    pub fn into_parts(self) -> Result<(Arc<OrientedHypergraph>, Option<VertexFunction>)> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "unsupported schema version {:?}",
                self.schema_version
            )));
        }
        let kind = self.manifold.to_kind()?;
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.into_iter().enumerate() {
            edges.push(
                HyperEdge::new(e.in_set, e.out, e.weight).map_err(|err| Error::at_edge(i, err))?,
            );
        }
        let graph = Arc::new(OrientedHypergraph::new(self.num_vertices, edges)?);
        let function = match self.features {
            None => None,
            Some(rows) => {
                if rows.len() != graph.num_vertices() {
                    return Err(Error::Validation(format!(
                        "{} feature rows for {} vertices",
                        rows.len(),
                        graph.num_vertices()
                    )));
                }
                let mut points = Vec::with_capacity(rows.len());
                for (i, row) in rows.into_iter().enumerate() {
                    points.push(
                        ManifoldPoint::new(kind, row)
                            .map_err(|err| Error::at_vertex(i + 1, err))?,
                    );
                }
                Some(VertexFunction::new(Arc::clone(&graph), points)?)
            }
        };
        Ok((graph, function))
    }
}

/// One run's parameters and outcome; together with the input document this
/// suffices to reproduce the trace byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub schema_version: String,
    pub input_path: String,
    pub variant: String,
    pub flavor: String,
    pub p: f64,
    pub eta: u8,
    pub step_size: f64,
    pub residual_tol: f64,
    pub max_steps: usize,
    pub record_every: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorInfo>,
    pub converged: bool,
    pub steps_taken: usize,
    pub final_residual: f64,
    pub final_spread: f64,
    pub spread_threshold: f64,
    pub classification: String,
    pub final_coordinates: Vec<Vec<f64>>,
}

/// `constant` or `non-constant`, by the spread threshold.
pub fn classify(f: &VertexFunction) -> &'static str {
    if vertex_spread(f) < CONSTANT_SPREAD_THRESHOLD {
        "constant"
    } else {
        "non-constant"
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    atomic_write(path.as_ref(), &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let bytes = std::fs::read(path.as_ref())?;
    Ok(serde_json::from_slice(&bytes)?)
}

pub fn save_hypergraph(path: impl AsRef<Path>, doc: &HypergraphDocument) -> Result<()> {
    write_json(path, doc)
}

pub fn load_hypergraph(path: impl AsRef<Path>) -> Result<HypergraphDocument> {
    read_json(path)
}

/// Writes the recorded trajectory as CSV with the exact header
/// `step,residual,energy,vertex_spread`.
pub fn write_trace_csv(path: impl AsRef<Path>, trace: &DiffusionTrace) -> Result<()> {
    let mut out = String::from("step,residual,energy,vertex_spread\n");
    for (i, (step, state)) in trace.snapshots.iter().enumerate() {
        let spread = vertex_spread(state);
        out.push_str(&format!(
            "{},{},{},{}\n",
            step, trace.residuals[i], trace.energies[i], spread
        ));
    }
    atomic_write(path.as_ref(), out.as_bytes())
}
