//! Oriented weighted hypergraphs.
//!
//! Vertices are the 1-based ids `1..=num_vertices`; edges are indexed by
//! their 0-based position in the edge list. Each hyperedge carries disjoint,
//! nonempty input and output vertex sets and a nonnegative weight. The
//! structure is immutable after construction; all queries are read-only.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

pub type VertexId = usize;

/// An oriented hyperedge: disjoint input/output vertex sets plus a weight.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperEdge {
    in_set: Vec<VertexId>,
    out_set: Vec<VertexId>,
    weight: f64,
}

impl HyperEdge {
    /// Sorts and deduplicates both sets, then validates nonemptiness,
    /// disjointness, and the weight.
    pub fn new(in_set: Vec<VertexId>, out_set: Vec<VertexId>, weight: f64) -> Result<Self> {
        let mut in_set = in_set;
        let mut out_set = out_set;
        in_set.sort_unstable();
        in_set.dedup();
        out_set.sort_unstable();
        out_set.dedup();
        if in_set.is_empty() || out_set.is_empty() {
            return Err(Error::InvalidHypergraph(
                "hyperedge with an empty input or output set".into(),
            ));
        }
        if in_set.iter().any(|u| out_set.binary_search(u).is_ok()) {
            return Err(Error::InvalidHypergraph(format!(
                "input and output sets overlap: {in_set:?} vs {out_set:?}"
            )));
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidHypergraph(format!(
                "weight {weight} is not a nonnegative real"
            )));
        }
        Ok(HyperEdge {
            in_set,
            out_set,
            weight,
        })
    }

    pub fn in_set(&self) -> &[VertexId] {
        &self.in_set
    }

    pub fn out_set(&self) -> &[VertexId] {
        &self.out_set
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Total number of vertices the edge touches.
    pub fn cardinality(&self) -> usize {
        self.in_set.len() + self.out_set.len()
    }

    /// The same edge with input and output sets swapped.
    pub fn opposite(&self) -> HyperEdge {
        HyperEdge {
            in_set: self.out_set.clone(),
            out_set: self.in_set.clone(),
            weight: self.weight,
        }
    }

    fn key(&self) -> (Vec<VertexId>, Vec<VertexId>) {
        (self.in_set.clone(), self.out_set.clone())
    }
}

/// An oriented weighted hypergraph with a precomputed in-neighborhood index.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedHypergraph {
    num_vertices: usize,
    edges: Vec<HyperEdge>,
    in_neighborhoods: Vec<Vec<usize>>,
}

impl OrientedHypergraph {
    pub fn new(num_vertices: usize, edges: Vec<HyperEdge>) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::InvalidHypergraph("no vertices".into()));
        }
        let mut seen: HashMap<(Vec<VertexId>, Vec<VertexId>), usize> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            for &u in e.in_set.iter().chain(&e.out_set) {
                if u == 0 || u > num_vertices {
                    return Err(Error::InvalidHypergraph(format!(
                        "edge {i} references vertex {u}, outside 1..={num_vertices}"
                    )));
                }
            }
            if let Some(j) = seen.insert(e.key(), i) {
                return Err(Error::InvalidHypergraph(format!(
                    "edges {j} and {i} have identical input and output sets"
                )));
            }
        }
        let mut in_neighborhoods = vec![Vec::new(); num_vertices];
        for (i, e) in edges.iter().enumerate() {
            for &u in &e.in_set {
                in_neighborhoods[u - 1].push(i);
            }
        }
        Ok(OrientedHypergraph {
            num_vertices,
            edges,
            in_neighborhoods,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[HyperEdge] {
        &self.edges
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        1..=self.num_vertices
    }

    pub(crate) fn check_vertex(&self, u: VertexId) -> Result<()> {
        if u == 0 || u > self.num_vertices {
            return Err(Error::VertexOutOfRange {
                vertex: u,
                num_vertices: self.num_vertices,
            });
        }
        Ok(())
    }

    /// Indices of the edges whose input set contains `u`, in edge order.
    pub fn in_neighborhood(&self, u: VertexId) -> Result<&[usize]> {
        self.check_vertex(u)?;
        Ok(&self.in_neighborhoods[u - 1])
    }

    /// Number of edges whose input set contains `u`.
    pub fn in_degree(&self, u: VertexId) -> Result<usize> {
        Ok(self.in_neighborhood(u)?.len())
    }

    /// The hypergraph with every edge's orientation reversed.
    pub fn opposite(&self) -> OrientedHypergraph {
        let edges = self.edges.iter().map(HyperEdge::opposite).collect();
        OrientedHypergraph::new(self.num_vertices, edges)
            .expect("reversing orientations preserves validity")
    }

    /// True iff every edge's opposite is present with the same weight.
    pub fn is_symmetric(&self) -> bool {
        let index: HashMap<_, f64> = self.edges.iter().map(|e| (e.key(), e.weight)).collect();
        self.edges
            .iter()
            .all(|e| index.get(&e.opposite().key()) == Some(&e.weight))
    }

    /// Union with the oppositely oriented hypergraph. Fails if an opposite
    /// pair already exists with a different weight.
    pub fn symmetrize(&self) -> Result<OrientedHypergraph> {
        let index: HashMap<_, f64> = self.edges.iter().map(|e| (e.key(), e.weight)).collect();
        let mut edges = self.edges.clone();
        for e in &self.edges {
            let opp = e.opposite();
            match index.get(&opp.key()) {
                Some(&w) if w == e.weight => {}
                Some(&w) => {
                    return Err(Error::InvalidHypergraph(format!(
                        "opposite of edge ({:?}, {:?}) exists with weight {w} != {}",
                        e.in_set, e.out_set, e.weight
                    )))
                }
                None => edges.push(opp),
            }
        }
        OrientedHypergraph::new(self.num_vertices, edges)
    }

    /// Replaces every hyperedge by the unit-weight graph edges
    /// `({u}, {v})` for all `u` in its input and `v` in its output set,
    /// deduplicated. The vertex set is unchanged.
    pub fn expand_to_graph(&self) -> OrientedHypergraph {
        let mut seen = HashMap::new();
        let mut edges = Vec::new();
        for e in &self.edges {
            for &u in &e.in_set {
                for &v in &e.out_set {
                    if seen.insert((u, v), ()).is_none() {
                        edges.push(
                            HyperEdge::new(vec![u], vec![v], 1.0)
                                .expect("singleton sets of distinct vertices are valid"),
                        );
                    }
                }
            }
        }
        OrientedHypergraph::new(self.num_vertices, edges)
            .expect("deduplicated singleton edges are valid")
    }

    /// True iff every edge has singleton input and output sets.
    pub fn is_graph(&self) -> bool {
        self.edges
            .iter()
            .all(|e| e.in_set.len() == 1 && e.out_set.len() == 1)
    }
}

/// Generates a unit-weight symmetric hypergraph: `n_edges` base edges with
/// input/output cardinalities drawn uniformly from `1..=max_cardinality` and
/// disjoint vertex sets drawn without replacement, then symmetrized.
/// Duplicate draws are merged. Deterministic for a fixed seed.
pub fn random_hypergraph(
    n_vertices: usize,
    n_edges: usize,
    max_cardinality: usize,
    seed: u64,
) -> Result<OrientedHypergraph> {
    if n_vertices < 2 || n_edges < 1 || max_cardinality < 1 {
        return Err(Error::InvalidParameter(format!(
            "need n_vertices >= 2, n_edges >= 1, max_cardinality >= 1; \
             got ({n_vertices}, {n_edges}, {max_cardinality})"
        )));
    }
    if 2 * max_cardinality > n_vertices {
        return Err(Error::InvalidParameter(format!(
            "2 * max_cardinality = {} exceeds n_vertices = {n_vertices}; \
             disjoint input/output sets are impossible",
            2 * max_cardinality
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashMap::new();
    let mut edges = Vec::new();
    for _ in 0..n_edges {
        let k_in = rng.gen_range(1..=max_cardinality);
        let k_out = rng.gen_range(1..=max_cardinality);
        let picks = rand::seq::index::sample(&mut rng, n_vertices, k_in + k_out);
        let ids: Vec<VertexId> = picks.iter().map(|i| i + 1).collect();
        let edge = HyperEdge::new(ids[..k_in].to_vec(), ids[k_in..].to_vec(), 1.0)?;
        if seen.insert(edge.key(), ()).is_none() {
            edges.push(edge);
        }
    }
    OrientedHypergraph::new(n_vertices, edges)?.symmetrize()
}
