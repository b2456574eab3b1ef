//! Discrete calculus on manifold-valued hypergraphs.
//!
//! A vertex function assigns a manifold point to every vertex. Two gradient
//! notions lift it to edge data: the Fréchet gradient stores one tangent
//! vector per edge, anchored at the Fréchet mean of the edge's input values
//! and pointing at the mean of its output values; the pairwise gradient
//! stores one tangent vector per input/output vertex pair, anchored at the
//! input vertex's value. Each gradient comes with an inner product on edge
//! fields and a family of p-Laplacians (isotropic and anisotropic), all of
//! which transport their terms to the evaluation vertex before summing.

use crate::error::{Error, Result};
use crate::hypergraph::{OrientedHypergraph, VertexId};
use crate::manifold::{frechet_mean, ManifoldKind, ManifoldPoint, TangentVector};
use std::sync::Arc;

/// Distances at or below this threshold count as a true coincidence of
/// points rather than roundoff when raising to a negative power.
const ZERO_DISTANCE_GUARD: f64 = 1e-12;

/// An assignment of a manifold point to every vertex of a hypergraph.
#[derive(Debug, Clone)]
pub struct VertexFunction {
    graph: Arc<OrientedHypergraph>,
    values: Vec<ManifoldPoint>,
}

impl VertexFunction {
    pub fn new(graph: Arc<OrientedHypergraph>, values: Vec<ManifoldPoint>) -> Result<Self> {
        if values.len() != graph.num_vertices() {
            return Err(Error::StructureMismatch(format!(
                "{} values for {} vertices",
                values.len(),
                graph.num_vertices()
            )));
        }
        let kind = values[0].kind();
        for v in &values {
            if v.kind() != kind {
                return Err(Error::KindMismatch(kind, v.kind()));
            }
        }
        Ok(VertexFunction { graph, values })
    }

    /// The constant function `u -> point`.
    pub fn constant(graph: Arc<OrientedHypergraph>, point: ManifoldPoint) -> Result<Self> {
        let values = vec![point; graph.num_vertices()];
        VertexFunction::new(graph, values)
    }

    pub fn graph(&self) -> &Arc<OrientedHypergraph> {
        &self.graph
    }

    pub fn kind(&self) -> ManifoldKind {
        self.values[0].kind()
    }

    /// Value at a vertex. Panics if `u` is not a valid 1-based vertex id.
    pub fn value(&self, u: VertexId) -> &ManifoldPoint {
        &self.values[u - 1]
    }

    pub fn values(&self) -> &[ManifoldPoint] {
        &self.values
    }

    /// A new function over the same hypergraph.
    pub fn with_values(&self, values: Vec<ManifoldPoint>) -> Result<Self> {
        VertexFunction::new(Arc::clone(&self.graph), values)
    }
}

/// Per-edge Fréchet means of the input and output value sets.
#[derive(Debug, Clone)]
pub struct EdgeMeans {
    x_in: Vec<ManifoldPoint>,
    x_out: Vec<ManifoldPoint>,
}

impl EdgeMeans {
    pub fn x_in(&self, edge: usize) -> &ManifoldPoint {
        &self.x_in[edge]
    }

    pub fn x_out(&self, edge: usize) -> &ManifoldPoint {
        &self.x_out[edge]
    }

    pub fn len(&self) -> usize {
        self.x_in.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_in.is_empty()
    }
}

/// Fréchet means of every edge's input and output values, unit weights.
pub fn edge_means(f: &VertexFunction) -> Result<EdgeMeans> {
    let mut x_in = Vec::with_capacity(f.graph.edges().len());
    let mut x_out = Vec::with_capacity(f.graph.edges().len());
    for (ei, e) in f.graph.edges().iter().enumerate() {
        x_in.push(side_mean(f, e.in_set()).map_err(|err| Error::at_edge(ei, err))?);
        x_out.push(side_mean(f, e.out_set()).map_err(|err| Error::at_edge(ei, err))?);
    }
    Ok(EdgeMeans { x_in, x_out })
}

fn side_mean(f: &VertexFunction, side: &[VertexId]) -> Result<ManifoldPoint> {
    if let [u] = side {
        return Ok(f.value(*u).clone());
    }
    let points: Vec<ManifoldPoint> = side.iter().map(|&u| f.value(u).clone()).collect();
    frechet_mean(&points, None)
}

/// One tangent vector per edge, anchored at the edge's input mean.
#[derive(Debug, Clone)]
pub struct FrechetEdgeField {
    graph: Arc<OrientedHypergraph>,
    vectors: Vec<TangentVector>,
}

impl FrechetEdgeField {
    pub fn vector(&self, edge: usize) -> &TangentVector {
        &self.vectors[edge]
    }

    pub fn vectors(&self) -> &[TangentVector] {
        &self.vectors
    }

    pub fn scaled(&self, s: f64) -> FrechetEdgeField {
        FrechetEdgeField {
            graph: Arc::clone(&self.graph),
            vectors: self.vectors.iter().map(|v| v.scaled(s)).collect(),
        }
    }
}

/// `sqrt(w(e)) log_{x_in} x_out` per edge.
pub fn frechet_gradient(f: &VertexFunction) -> Result<FrechetEdgeField> {
    let means = edge_means(f)?;
    let mut vectors = Vec::with_capacity(f.graph.edges().len());
    for (ei, e) in f.graph.edges().iter().enumerate() {
        let log = means
            .x_in(ei)
            .log(means.x_out(ei))
            .map_err(|err| Error::at_edge(ei, err))?;
        vectors.push(log.scaled(e.weight().sqrt()));
    }
    Ok(FrechetEdgeField {
        graph: Arc::clone(&f.graph),
        vectors,
    })
}

/// One entry of a pairwise edge field: a tangent vector at `f(u)` indexed by
/// an input/output vertex pair `(u, v)` of the edge.
#[derive(Debug, Clone)]
pub struct PairEntry {
    pub u: VertexId,
    pub v: VertexId,
    pub vector: TangentVector,
}

/// Per edge, tangent vectors for every `(u, v)` in `e_in x e_out`, stored in
/// sorted pair order.
#[derive(Debug, Clone)]
pub struct PairwiseEdgeField {
    graph: Arc<OrientedHypergraph>,
    entries: Vec<Vec<PairEntry>>,
}

impl PairwiseEdgeField {
    pub fn entries(&self, edge: usize) -> &[PairEntry] {
        &self.entries[edge]
    }

    pub fn get(&self, edge: usize, u: VertexId, v: VertexId) -> Option<&TangentVector> {
        self.entries[edge]
            .iter()
            .find(|p| p.u == u && p.v == v)
            .map(|p| &p.vector)
    }

    pub fn scaled(&self, s: f64) -> PairwiseEdgeField {
        PairwiseEdgeField {
            graph: Arc::clone(&self.graph),
            entries: self
                .entries
                .iter()
                .map(|es| {
                    es.iter()
                        .map(|p| PairEntry {
                            u: p.u,
                            v: p.v,
                            vector: p.vector.scaled(s),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// `sqrt(w(e)) / (|e_in| |e_out|) log_{f(u)} f(v)` per edge and pair.
pub fn pairwise_gradient(f: &VertexFunction) -> Result<PairwiseEdgeField> {
    let mut entries = Vec::with_capacity(f.graph.edges().len());
    for (ei, e) in f.graph.edges().iter().enumerate() {
        let scale = e.weight().sqrt() / (e.in_set().len() * e.out_set().len()) as f64;
        let mut edge_entries = Vec::with_capacity(e.in_set().len() * e.out_set().len());
        for &u in e.in_set() {
            for &v in e.out_set() {
                let log = f
                    .value(u)
                    .log(f.value(v))
                    .map_err(|err| Error::at_pair(ei, u, v, err))?;
                edge_entries.push(PairEntry {
                    u,
                    v,
                    vector: log.scaled(scale),
                });
            }
        }
        entries.push(edge_entries);
    }
    Ok(PairwiseEdgeField {
        graph: Arc::clone(&f.graph),
        entries,
    })
}

fn check_same_graph(a: &Arc<OrientedHypergraph>, b: &Arc<OrientedHypergraph>) -> Result<()> {
    if !Arc::ptr_eq(a, b) && **a != **b {
        return Err(Error::StructureMismatch(
            "fields live on different hypergraphs".into(),
        ));
    }
    Ok(())
}

/// Sum over edges of the metric inner product at the edge's input mean.
pub fn frechet_inner_product(h: &FrechetEdgeField, g: &FrechetEdgeField) -> Result<f64> {
    check_same_graph(&h.graph, &g.graph)?;
    let mut total = 0.0;
    for (a, b) in h.vectors.iter().zip(&g.vectors) {
        total += a.inner(b)?;
    }
    Ok(total)
}

/// Sum over edges and pairs of the metric inner product at `f(u)`.
pub fn pairwise_inner_product(h: &PairwiseEdgeField, g: &PairwiseEdgeField) -> Result<f64> {
    check_same_graph(&h.graph, &g.graph)?;
    let mut total = 0.0;
    for (ha, ga) in h.entries.iter().zip(&g.entries) {
        if ha.len() != ga.len() {
            return Err(Error::StructureMismatch(
                "pairwise fields have different entry counts".into(),
            ));
        }
        for (a, b) in ha.iter().zip(ga) {
            total += a.vector.inner(&b.vector)?;
        }
    }
    Ok(total)
}

/// Transported entry sum of a pairwise field's edge at the evaluation
/// vertex: every `(u1, u2)` entry is carried from `f(u1)` to `f(u)` along the
/// minimizing geodesic, then summed.
fn transported_entry_sum(
    field: &PairwiseEdgeField,
    edge: usize,
    u: VertexId,
    f: &VertexFunction,
) -> Result<Vec<f64>> {
    let dim = f.kind().ambient_dim();
    let fu = f.value(u);
    let mut total = vec![0.0; dim];
    let entries = &field.entries[edge];
    let mut i = 0;
    while i < entries.len() {
        let u1 = entries[i].u;
        // entries are pair-sorted, so one anchor's block is contiguous
        let mut block = vec![0.0; dim];
        while i < entries.len() && entries[i].u == u1 {
            for (b, c) in block.iter_mut().zip(entries[i].vector.coords()) {
                *b += c;
            }
            i += 1;
        }
        let carried = TangentVector::new_unchecked(f.value(u1).clone(), block)
            .parallel_transport(fu)
            .map_err(|err| Error::at_pair(edge, u, u1, err))?;
        for (t, c) in total.iter_mut().zip(carried.coords()) {
            *t += c;
        }
    }
    Ok(total)
}

/// Semi inner product of two pairwise fields: for every vertex `u` and every
/// edge in its in-neighborhood, the transported entry sums of both fields are
/// paired at `f(u)` and weighted by `1/|e_in|`.
pub fn pairwise_semi_inner_product(
    h: &PairwiseEdgeField,
    g: &PairwiseEdgeField,
    f: &VertexFunction,
) -> Result<f64> {
    check_same_graph(&h.graph, &g.graph)?;
    check_same_graph(&h.graph, &f.graph)?;
    let kind = f.kind();
    let mut total = 0.0;
    for u in f.graph.vertices() {
        for &ei in f.graph.in_neighborhood(u)? {
            let hs = transported_entry_sum(h, ei, u, f)?;
            let gs = transported_entry_sum(g, ei, u, f)?;
            let pairing = match kind {
                ManifoldKind::Euclidean(_) | ManifoldKind::Sphere(_) => {
                    crate::manifold::dot(&hs, &gs)
                }
                ManifoldKind::Hyperbolic(_) => crate::manifold::minkowski_dot(&hs, &gs),
            };
            total += pairing / f.graph.edges()[ei].in_set().len() as f64;
        }
    }
    Ok(total)
}

/// Selects one of the four p-Laplacians.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceVariant {
    IsotropicFrechet,
    AnisotropicFrechet,
    IsotropicPairwise,
    AnisotropicPairwise,
}

impl LaplaceVariant {
    pub fn is_frechet(&self) -> bool {
        matches!(
            self,
            LaplaceVariant::IsotropicFrechet | LaplaceVariant::AnisotropicFrechet
        )
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(
            self,
            LaplaceVariant::IsotropicFrechet | LaplaceVariant::IsotropicPairwise
        )
    }
}

/// Parameters of a p-Laplacian: the exponent `p`, the in-degree
/// normalization switch `eta`, and the variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceParams {
    pub p: f64,
    pub eta: u8,
    pub variant: LaplaceVariant,
}

impl LaplaceParams {
    pub fn new(variant: LaplaceVariant, p: f64, eta: u8) -> Result<Self> {
        let params = LaplaceParams { p, eta, variant };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p.is_finite() || self.p <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "p must lie in (0, inf), got {}",
                self.p
            )));
        }
        if self.eta > 1 {
            return Err(Error::InvalidParameter(format!(
                "eta must be 0 or 1, got {}",
                self.eta
            )));
        }
        Ok(())
    }
}

/// `d^(p-2)` with the degenerate-case policy: at `p = 2` the factor is
/// exactly one; a (near-)zero distance under `p < 2` is an error rather than
/// a silent convention.
fn distance_power(d: f64, p: f64) -> Result<f64> {
    if p == 2.0 {
        return Ok(1.0);
    }
    if d <= ZERO_DISTANCE_GUARD {
        if p < 2.0 {
            return Err(Error::ZeroDistanceTerm { p });
        }
        return Ok(0.0);
    }
    Ok(d.powf(p - 2.0))
}

/// `a^((p-2)/2)` for the isotropic neighborhood aggregate, same policy.
fn aggregate_power(a: f64, p: f64) -> Result<f64> {
    if p == 2.0 {
        return Ok(1.0);
    }
    if a <= ZERO_DISTANCE_GUARD {
        if p < 2.0 {
            return Err(Error::ZeroDistanceTerm { p });
        }
        return Ok(0.0);
    }
    Ok(a.powf(0.5 * (p - 2.0)))
}

fn weight_power(w: f64, p: f64) -> f64 {
    if p == 2.0 {
        w
    } else {
        w.powf(0.5 * p)
    }
}

/// The selected p-Laplacian of `f` at vertex `u`, based at `f(u)`. Vertices
/// with an empty in-neighborhood map to the zero vector.
pub fn p_laplacian(
    f: &VertexFunction,
    u: VertexId,
    params: &LaplaceParams,
) -> Result<TangentVector> {
    params.validate()?;
    f.graph.check_vertex(u)?;
    let means = if params.variant.is_frechet() {
        Some(edge_means(f)?)
    } else {
        None
    };
    laplacian_at(f, u, params, means.as_ref())
}

/// The p-Laplacian at every vertex, in vertex order. Edge means are shared
/// across vertices within the call.
pub fn laplacian_field(f: &VertexFunction, params: &LaplaceParams) -> Result<Vec<TangentVector>> {
    params.validate()?;
    let means = if params.variant.is_frechet() {
        Some(edge_means(f)?)
    } else {
        None
    };
    f.graph
        .vertices()
        .map(|u| laplacian_at(f, u, params, means.as_ref()).map_err(|e| Error::at_vertex(u, e)))
        .collect()
}

fn laplacian_at(
    f: &VertexFunction,
    u: VertexId,
    params: &LaplaceParams,
    means: Option<&EdgeMeans>,
) -> Result<TangentVector> {
    let neighborhood = f.graph.in_neighborhood(u)?;
    let fu = f.value(u);
    if neighborhood.is_empty() {
        return Ok(TangentVector::zero(fu.clone()));
    }
    let dim = f.kind().ambient_dim();
    let mut sum = vec![0.0; dim];
    let mut aggregate = 0.0;
    let p = params.p;

    for &ei in neighborhood {
        let e = &f.graph.edges()[ei];
        let w = e.weight();
        let n_in = e.in_set().len() as f64;
        if params.variant.is_frechet() {
            let (x_in, x_out) = match means {
                Some(m) => (m.x_in(ei).clone(), m.x_out(ei).clone()),
                None => (
                    side_mean(f, e.in_set()).map_err(|err| Error::at_edge(ei, err))?,
                    side_mean(f, e.out_set()).map_err(|err| Error::at_edge(ei, err))?,
                ),
            };
            let log = x_in.log(&x_out).map_err(|err| Error::at_edge(ei, err))?;
            let d = log.norm();
            let carried = log
                .parallel_transport(fu)
                .map_err(|err| Error::at_edge(ei, err))?;
            let coef = if params.variant.is_isotropic() {
                aggregate += w * d * d / n_in;
                w / n_in
            } else {
                weight_power(w, p) * distance_power(d, p).map_err(|err| Error::at_edge(ei, err))?
                    / n_in
            };
            for (s, c) in sum.iter_mut().zip(carried.coords()) {
                *s += coef * c;
            }
        } else {
            let n_out = e.out_set().len() as f64;
            // at p = 2 the anisotropic coefficient collapses to the
            // isotropic one, bit for bit
            let coef = if params.variant.is_isotropic() || p == 2.0 {
                w / (n_in * n_in * n_out)
            } else {
                weight_power(w, p) / (n_in.powf(p) * n_out.powf(p - 1.0))
            };
            let mut edge_vec = vec![0.0; dim];
            for &u1 in e.in_set() {
                let fu1 = f.value(u1);
                let mut anchor_sum = vec![0.0; dim];
                for &u2 in e.out_set() {
                    let log = fu1
                        .log(f.value(u2))
                        .map_err(|err| Error::at_pair(ei, u1, u2, err))?;
                    let d = log.norm();
                    let term = if params.variant.is_isotropic() {
                        aggregate += w * d * d / (n_in * n_in * n_out);
                        1.0
                    } else {
                        distance_power(d, p).map_err(|err| Error::at_pair(ei, u1, u2, err))?
                    };
                    for (a, c) in anchor_sum.iter_mut().zip(log.coords()) {
                        *a += term * c;
                    }
                }
                let carried = TangentVector::new_unchecked(fu1.clone(), anchor_sum)
                    .parallel_transport(fu)
                    .map_err(|err| Error::at_pair(ei, u1, u, err))?;
                for (v, c) in edge_vec.iter_mut().zip(carried.coords()) {
                    *v += c;
                }
            }
            for (s, c) in sum.iter_mut().zip(&edge_vec) {
                *s += coef * c;
            }
        }
    }

    let factor = if params.variant.is_isotropic() {
        aggregate_power(aggregate, p)?
    } else {
        1.0
    };
    let mut coords: Vec<f64> = sum.iter().map(|s| -(factor * s)).collect();
    if params.eta == 1 {
        let degree = neighborhood.len() as f64;
        coords.iter_mut().for_each(|c| *c /= degree);
    }
    Ok(TangentVector::new_unchecked(fu.clone(), coords))
}

/// Gradient framework selector for energies and diffusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Framework {
    Frechet,
    Pairwise,
}

/// Dirichlet energy of `f`: the squared norm of its gradient field under the
/// framework's (semi) inner product.
pub fn dirichlet_energy(f: &VertexFunction, framework: Framework) -> Result<f64> {
    match framework {
        Framework::Frechet => {
            let g = frechet_gradient(f)?;
            frechet_inner_product(&g, &g)
        }
        Framework::Pairwise => {
            let g = pairwise_gradient(f)?;
            pairwise_semi_inner_product(&g, &g, f)
        }
    }
}
