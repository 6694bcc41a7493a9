//! Weighted simplicial complexes of dimension <= 2 and weighted multigraphs.
//!
//! Weights follow the propagation rule: the weight of a k-simplex contained
//! in at least one (k+1)-simplex equals the sum of the weights of the
//! (k+1)-simplices containing it. Vertex and edge weights of a complex are
//! therefore always derived from the face weights, and vertex weights of a
//! graph from its edge weights (loops counted twice).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Relative tolerance for weight-consistency validation.
pub const WEIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("vertex {vertex} out of range (vertex count {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("duplicate face {{{0}, {1}, {2}}}", face[0], face[1], face[2])]
    DuplicateFace { face: [usize; 3] },
    #[error("degenerate face {{{0}, {1}, {2}}} has a repeated vertex", face[0], face[1], face[2])]
    DegenerateFace { face: [usize; 3] },
    #[error("non-positive weight {weight} on {simplex}")]
    NonPositiveWeight { simplex: String, weight: f64 },
    #[error("graph needs at least one vertex")]
    Empty,
    #[error("link weights inconsistent at vertex {vertex}: edge {{{vertex}, {other}}} lies in no face")]
    LinkInconsistent { vertex: usize, other: usize },
    #[error("{0} is not a vertex of the complex")]
    NotAVertex(usize),
    #[error("duplicate edge {{{0}, {1}}} in complex", edge.0, edge.1)]
    DuplicateEdge { edge: (usize, usize) },
}

/// One weighted edge item. Parallel edges are distinct items; `u == v` is a
/// loop (graphs only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeItem {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// A violated invariant found by [`WeightedGraph::validate`] or
/// [`WeightedComplex::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A derived weight does not match the propagation identity.
    WeightPropagation {
        simplex: String,
        expected: f64,
        actual: f64,
    },
    /// A simplex carries a non-positive weight.
    NonPositiveWeight { simplex: String, weight: f64 },
    /// An isolated vertex has weight 0, so m(emptyset) > 0 fails on its
    /// component.
    IsolatedVertex { vertex: usize },
    /// A face references an edge that is not in the edge set.
    MissingEdge { face: [usize; 3], edge: (usize, usize) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WeightPropagation {
                simplex,
                expected,
                actual,
            } => write!(
                f,
                "weight propagation fails on {simplex}: expected {expected}, found {actual}"
            ),
            Violation::NonPositiveWeight { simplex, weight } => {
                write!(f, "non-positive weight {weight} on {simplex}")
            }
            Violation::IsolatedVertex { vertex } => write!(
                f,
                "isolated vertex {vertex} has weight 0 (m(emptyset) > 0 fails per component)"
            ),
            Violation::MissingEdge { face, edge } => write!(
                f,
                "face {{{}, {}, {}}} uses edge {{{}, {}}} absent from the edge set",
                face[0], face[1], face[2], edge.0, edge.1
            ),
        }
    }
}

/// A finite weighted multigraph: the type of links and of all spectral
/// inputs. Vertex weights are derived (sum of incident edge weights, loops
/// twice).
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<EdgeItem>,
    vertex_weight: Vec<f64>,
    /// Aggregated neighbor weights: `adj[x]` lists `(y, w)` with `w` the
    /// summed weight of parallel `{x, y}` edges; a loop at `x` appears as
    /// `(x, 2 * loop weight)`.
    adj: Vec<Vec<(usize, f64)>>,
    /// Edge item indices incident to each vertex; loops listed once.
    incident: Vec<Vec<usize>>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self, ComplexError> {
        if n == 0 {
            return Err(ComplexError::Empty);
        }
        let mut items = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            if u >= n {
                return Err(ComplexError::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(ComplexError::VertexOutOfRange { vertex: v, n });
            }
            if !(w > 0.0) {
                return Err(ComplexError::NonPositiveWeight {
                    simplex: format!("edge {{{u}, {v}}}"),
                    weight: w,
                });
            }
            let (u, v) = if u <= v { (u, v) } else { (v, u) };
            items.push(EdgeItem { u, v, weight: w });
        }
        let mut vertex_weight = vec![0.0; n];
        let mut agg: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        let mut incident = vec![Vec::new(); n];
        for (i, e) in items.iter().enumerate() {
            if e.u == e.v {
                vertex_weight[e.u] += 2.0 * e.weight;
                *agg[e.u].entry(e.u).or_insert(0.0) += 2.0 * e.weight;
                incident[e.u].push(i);
            } else {
                vertex_weight[e.u] += e.weight;
                vertex_weight[e.v] += e.weight;
                *agg[e.u].entry(e.v).or_insert(0.0) += e.weight;
                *agg[e.v].entry(e.u).or_insert(0.0) += e.weight;
                incident[e.u].push(i);
                incident[e.v].push(i);
            }
        }
        let adj = agg
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        Ok(WeightedGraph {
            n,
            edges: items,
            vertex_weight,
            adj,
            incident,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_items(&self) -> &[EdgeItem] {
        &self.edges
    }

    pub fn vertex_weight(&self, x: usize) -> f64 {
        self.vertex_weight[x]
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weight
    }

    /// m(emptyset): the total vertex weight.
    pub fn total_vertex_weight(&self) -> f64 {
        self.vertex_weight.iter().sum()
    }

    /// Aggregated neighbors of `x` as `(neighbor, summed weight)`; a loop
    /// shows up as `(x, 2w)`.
    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adj[x]
    }

    /// Indices into [`Self::edge_items`] of the edges at `x`; loops listed
    /// once.
    pub fn incident_items(&self, x: usize) -> &[usize] {
        &self.incident[x]
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.n
    }

    /// Deterministic invariant report; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for e in &self.edges {
            if !(e.weight > 0.0) {
                out.push(Violation::NonPositiveWeight {
                    simplex: format!("edge {{{}, {}}}", e.u, e.v),
                    weight: e.weight,
                });
            }
        }
        for x in 0..self.n {
            if self.adj[x].is_empty() {
                out.push(Violation::IsolatedVertex { vertex: x });
            }
        }
        out
    }
}

/// A weighted simplicial complex of dimension <= 2. Faces are distinct
/// sorted triples; edge and vertex weights are derived by propagation.
#[derive(Debug, Clone)]
pub struct WeightedComplex {
    n: usize,
    faces: Vec<[usize; 3]>,
    face_weight: Vec<f64>,
    edges: Vec<(usize, usize)>,
    edge_weight: Vec<f64>,
    vertex_weight: Vec<f64>,
    edge_index: BTreeMap<(usize, usize), usize>,
    faces_at_vertex: Vec<Vec<usize>>,
    skeleton: WeightedGraph,
}

impl WeightedComplex {
    /// Builds a complex from weighted faces, deriving edge and vertex
    /// weights by propagation. The vertex set is `0..n` with
    /// `n = max vertex + 1` unless `vertex_count` enlarges it.
    pub fn from_faces(
        faces: Vec<([usize; 3], f64)>,
        vertex_count: Option<usize>,
    ) -> Result<Self, ComplexError> {
        let mut sorted_faces: Vec<([usize; 3], f64)> = Vec::with_capacity(faces.len());
        for (mut tri, w) in faces {
            tri.sort_unstable();
            if tri[0] == tri[1] || tri[1] == tri[2] {
                return Err(ComplexError::DegenerateFace { face: tri });
            }
            if !(w > 0.0) {
                return Err(ComplexError::NonPositiveWeight {
                    simplex: format!("face {{{}, {}, {}}}", tri[0], tri[1], tri[2]),
                    weight: w,
                });
            }
            sorted_faces.push((tri, w));
        }
        sorted_faces.sort_by_key(|(tri, _)| *tri);
        for pair in sorted_faces.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(ComplexError::DuplicateFace { face: pair[0].0 });
            }
        }
        let max_v = sorted_faces
            .iter()
            .map(|(t, _)| t[2])
            .max()
            .map_or(0, |m| m + 1);
        let n = vertex_count.unwrap_or(max_v).max(max_v);
        if n == 0 {
            return Err(ComplexError::Empty);
        }

        let mut edge_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edge_weight_map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (tri, w) in &sorted_faces {
            for (a, b) in [(tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])] {
                *edge_weight_map.entry((a, b)).or_insert(0.0) += w;
            }
        }
        let mut edges = Vec::with_capacity(edge_weight_map.len());
        let mut edge_weight = Vec::with_capacity(edge_weight_map.len());
        for (idx, (e, w)) in edge_weight_map.into_iter().enumerate() {
            edge_index.insert(e, idx);
            edges.push(e);
            edge_weight.push(w);
        }
        let mut vertex_weight = vec![0.0; n];
        for (&(u, v), &idx) in edge_index.iter() {
            let w = edge_weight[idx];
            vertex_weight[u] += w;
            vertex_weight[v] += w;
        }
        let mut faces_at_vertex = vec![Vec::new(); n];
        for (i, (tri, _)) in sorted_faces.iter().enumerate() {
            for &x in tri {
                faces_at_vertex[x].push(i);
            }
        }
        let skeleton = WeightedGraph::new(
            n,
            edges
                .iter()
                .zip(edge_weight.iter())
                .map(|(&(u, v), &w)| (u, v, w))
                .collect(),
        )?;
        let (faces, face_weight) = sorted_faces.into_iter().unzip();
        Ok(WeightedComplex {
            n,
            faces,
            face_weight,
            edges,
            edge_weight,
            vertex_weight,
            edge_index,
            faces_at_vertex,
            skeleton,
        })
    }

    /// Builds a complex from explicit simplex weights without enforcing the
    /// propagation identity (structural checks only); [`Self::validate`]
    /// then reports any inconsistencies. Intended for diagnostics.
    pub fn from_parts(
        n: usize,
        faces: Vec<([usize; 3], f64)>,
        edges: Vec<((usize, usize), f64)>,
        vertex_weight: Vec<f64>,
    ) -> Result<Self, ComplexError> {
        if n == 0 || vertex_weight.len() != n {
            return Err(ComplexError::Empty);
        }
        let mut sorted_faces: Vec<([usize; 3], f64)> = Vec::with_capacity(faces.len());
        for (mut tri, w) in faces {
            tri.sort_unstable();
            if tri[0] == tri[1] || tri[1] == tri[2] {
                return Err(ComplexError::DegenerateFace { face: tri });
            }
            if tri[2] >= n {
                return Err(ComplexError::VertexOutOfRange { vertex: tri[2], n });
            }
            sorted_faces.push((tri, w));
        }
        sorted_faces.sort_by_key(|(tri, _)| *tri);
        for pair in sorted_faces.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(ComplexError::DuplicateFace { face: pair[0].0 });
            }
        }
        let mut edge_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut sorted_edges: Vec<((usize, usize), f64)> = edges
            .into_iter()
            .map(|((u, v), w)| (if u <= v { (u, v) } else { (v, u) }, w))
            .collect();
        sorted_edges.sort_by_key(|(e, _)| *e);
        for pair in sorted_edges.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(ComplexError::DuplicateEdge { edge: pair[0].0 });
            }
        }
        let mut edges = Vec::new();
        let mut edge_weight = Vec::new();
        for (idx, ((u, v), w)) in sorted_edges.into_iter().enumerate() {
            if v >= n {
                return Err(ComplexError::VertexOutOfRange { vertex: v, n });
            }
            edge_index.insert((u, v), idx);
            edges.push((u, v));
            edge_weight.push(w);
        }
        let mut faces_at_vertex = vec![Vec::new(); n];
        for (i, (tri, _)) in sorted_faces.iter().enumerate() {
            for &x in tri {
                faces_at_vertex[x].push(i);
            }
        }
        let skeleton = WeightedGraph::new(
            n,
            edges
                .iter()
                .zip(edge_weight.iter())
                .filter(|(_, &w)| w > 0.0)
                .map(|(&(u, v), &w)| (u, v, w))
                .collect(),
        )?;
        let (faces, face_weight) = sorted_faces.into_iter().unzip();
        Ok(WeightedComplex {
            n,
            faces,
            face_weight,
            edges,
            edge_weight,
            vertex_weight,
            edge_index,
            faces_at_vertex,
            skeleton,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_weight(&self, i: usize) -> f64 {
        self.face_weight[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weight
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edge_index.get(&key).copied()
    }

    pub fn vertex_weight(&self, x: usize) -> f64 {
        self.vertex_weight[x]
    }

    pub fn total_vertex_weight(&self) -> f64 {
        self.vertex_weight.iter().sum()
    }

    pub fn faces_at_vertex(&self, x: usize) -> &[usize] {
        &self.faces_at_vertex[x]
    }

    /// The 1-skeleton as a weighted graph (propagated weights).
    pub fn skeleton(&self) -> &WeightedGraph {
        &self.skeleton
    }

    /// Whether every edge of the complex lies in at least one face.
    pub fn every_edge_in_a_face(&self) -> bool {
        let mut covered = vec![false; self.edges.len()];
        for tri in &self.faces {
            for (a, b) in [(tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])] {
                if let Some(i) = self.edge_index.get(&(a, b)) {
                    covered[*i] = true;
                }
            }
        }
        covered.iter().all(|&c| c)
    }

    /// The link of `x`: neighbor vertices with inherited weights, one link
    /// edge per face through `x` carrying the face weight.
    pub fn link_of(&self, x: usize) -> Result<Link, ComplexError> {
        if x >= self.n {
            return Err(ComplexError::NotAVertex(x));
        }
        let mut vertices: Vec<usize> = Vec::new();
        for &(u, v) in self.edge_index.keys() {
            if u == x {
                vertices.push(v);
            } else if v == x {
                vertices.push(u);
            }
        }
        vertices.sort_unstable();
        let local: BTreeMap<usize, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        // Every edge at x must lie in >= 1 face, otherwise the inherited
        // vertex weight exceeds the incident link-edge weight sum.
        let mut in_face = vec![false; vertices.len()];
        let mut link_edges = Vec::new();
        for &fi in &self.faces_at_vertex[x] {
            let tri = self.faces[fi];
            let others: Vec<usize> = tri.iter().copied().filter(|&v| v != x).collect();
            let (a, b) = (local[&others[0]], local[&others[1]]);
            in_face[a] = true;
            in_face[b] = true;
            link_edges.push((a, b, self.face_weight[fi]));
        }
        if let Some(i) = in_face.iter().position(|&c| !c) {
            return Err(ComplexError::LinkInconsistent {
                vertex: x,
                other: vertices[i],
            });
        }
        let graph = WeightedGraph::new(vertices.len().max(1), link_edges)?;
        Ok(Link { graph, vertices })
    }

    /// Deterministic invariant report; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let rel = |expected: f64, actual: f64| {
            (expected - actual).abs() > WEIGHT_TOL * expected.abs().max(actual.abs()).max(1.0)
        };
        for (i, tri) in self.faces.iter().enumerate() {
            if !(self.face_weight[i] > 0.0) {
                out.push(Violation::NonPositiveWeight {
                    simplex: format!("face {{{}, {}, {}}}", tri[0], tri[1], tri[2]),
                    weight: self.face_weight[i],
                });
            }
            for (a, b) in [(tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])] {
                if !self.edge_index.contains_key(&(a, b)) {
                    out.push(Violation::MissingEdge {
                        face: *tri,
                        edge: (a, b),
                    });
                }
            }
        }
        // Edge weights must equal the sum over containing faces.
        let mut prop_edge = vec![0.0; self.edges.len()];
        let mut in_face = vec![false; self.edges.len()];
        for (i, tri) in self.faces.iter().enumerate() {
            for (a, b) in [(tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])] {
                if let Some(&ei) = self.edge_index.get(&(a, b)) {
                    prop_edge[ei] += self.face_weight[i];
                    in_face[ei] = true;
                }
            }
        }
        for (ei, &(u, v)) in self.edges.iter().enumerate() {
            if !(self.edge_weight[ei] > 0.0) {
                out.push(Violation::NonPositiveWeight {
                    simplex: format!("edge {{{u}, {v}}}"),
                    weight: self.edge_weight[ei],
                });
            }
            if in_face[ei] && rel(prop_edge[ei], self.edge_weight[ei]) {
                out.push(Violation::WeightPropagation {
                    simplex: format!("edge {{{u}, {v}}}"),
                    expected: prop_edge[ei],
                    actual: self.edge_weight[ei],
                });
            }
        }
        // Vertex weights must equal the sum over incident edges.
        let mut prop_vertex = vec![0.0; self.n];
        let mut touched = vec![false; self.n];
        for (ei, &(u, v)) in self.edges.iter().enumerate() {
            prop_vertex[u] += self.edge_weight[ei];
            prop_vertex[v] += self.edge_weight[ei];
            touched[u] = true;
            touched[v] = true;
        }
        for x in 0..self.n {
            if !touched[x] {
                out.push(Violation::IsolatedVertex { vertex: x });
            } else if rel(prop_vertex[x], self.vertex_weight[x]) {
                out.push(Violation::WeightPropagation {
                    simplex: format!("vertex {x}"),
                    expected: prop_vertex[x],
                    actual: self.vertex_weight[x],
                });
            }
        }
        out
    }
}

/// The link of a vertex: a weighted graph on re-indexed neighbor vertices
/// plus the map back to complex vertex ids.
#[derive(Debug, Clone)]
pub struct Link {
    pub graph: WeightedGraph,
    /// `vertices[i]` is the complex vertex id of link vertex `i`.
    pub vertices: Vec<usize>,
}

/// Builds a weighted complex from faces, propagating weights downward.
/// Faces default to weight 1 when `weights` is `None`.
pub fn propagate_weights(
    faces: &[[usize; 3]],
    weights: Option<&[f64]>,
) -> Result<WeightedComplex, ComplexError> {
    let paired: Vec<([usize; 3], f64)> = match weights {
        Some(ws) => faces.iter().copied().zip(ws.iter().copied()).collect(),
        None => faces.iter().map(|&f| (f, 1.0)).collect(),
    };
    WeightedComplex::from_faces(paired, None)
}
