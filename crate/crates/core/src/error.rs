//! Crate-wide error type.

use crate::manifold::ManifoldKind;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two values live on different manifolds.
    #[error("manifold kind mismatch: {0} vs {1}")]
    KindMismatch(ManifoldKind, ManifoldKind),

    /// Coordinate array has the wrong ambient length.
    #[error("expected {expected} ambient coordinates for {kind}, got {got}")]
    DimensionMismatch {
        kind: ManifoldKind,
        expected: usize,
        got: usize,
    },

    /// Coordinates violate the manifold constraint beyond repair.
    #[error("invalid point on {kind}: {reason}")]
    InvalidPoint { kind: ManifoldKind, reason: String },

    /// Vector is not tangent at its claimed base point.
    #[error("vector is not tangent at its base point (defect {defect:.3e})")]
    NotTangent { defect: f64 },

    /// Logarithm or transport requested between (nearly) antipodal sphere points.
    #[error("antipodal points on {0}: logarithm and transport are undefined")]
    Antipodal(ManifoldKind),

    /// Iterative mean failed to reach the stationarity tolerance.
    #[error(
        "mean iteration did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    MeanNotConverged { iterations: usize, residual: f64 },

    /// A p < 2 power of a zero distance appeared in a Laplacian term.
    #[error("zero-distance term with p = {p} < 2: the distance power is singular")]
    ZeroDistanceTerm { p: f64 },

    /// Hypergraph structure violates a construction invariant.
    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    /// Vertex id outside 1..=num_vertices.
    #[error("vertex {vertex} out of range 1..={num_vertices}")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },

    /// Operands belong to different hypergraphs or vertex functions.
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),

    /// Invalid operator or solver parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Error while evaluating a quantity attached to a hyperedge.
    #[error("edge {edge}: {source}")]
    AtEdge {
        edge: usize,
        #[source]
        source: Box<Error>,
    },

    /// Error while evaluating a quantity attached to a vertex.
    #[error("vertex {vertex}: {source}")]
    AtVertex {
        vertex: usize,
        #[source]
        source: Box<Error>,
    },

    /// Error while evaluating a quantity attached to an (edge, u, v) entry.
    #[error("edge {edge}, pair ({u}, {v}): {source}")]
    AtPair {
        edge: usize,
        u: usize,
        v: usize,
        #[source]
        source: Box<Error>,
    },

    /// Document does not match the expected schema.
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    /// Document parsed but violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn at_edge(edge: usize, source: Error) -> Self {
        Error::AtEdge {
            edge,
            source: Box::new(source),
        }
    }

    pub fn at_vertex(vertex: usize, source: Error) -> Self {
        Error::AtVertex {
            vertex,
            source: Box::new(source),
        }
    }

    pub fn at_pair(edge: usize, u: usize, v: usize, source: Error) -> Self {
        Error::AtPair {
            edge,
            u,
            v,
            source: Box::new(source),
        }
    }

    /// Unwraps the context layers added by [`Error::at_edge`] and friends.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtEdge { source, .. }
            | Error::AtVertex { source, .. }
            | Error::AtPair { source, .. } => source.root(),
            other => other,
        }
    }
}
