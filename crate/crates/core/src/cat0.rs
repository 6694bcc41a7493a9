//! CAT(0) model target spaces: Euclidean spaces, finite metric trees and
//! finite products, with distances, geodesics, barycenters, tangent-cone
//! stars, polygon closings and Izeki-Nayatani bound calculators.
//!
//! Tree barycenters are computed by an exact convex descent: the squared
//! distance functional restricted to any edge strip is a quadratic in the
//! arclength coordinate (the slopes of the distances are +-1 inside an
//! edge), so the minimizer is walked vertex-to-vertex by one-sided
//! derivative signs and finished in closed form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Cat0Error {
    #[error("invalid tree: {0}")]
    BadTree(&'static str),
    #[error("point does not belong to the space: {0}")]
    PointSpaceMismatch(&'static str),
    #[error("geodesic parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("empty point set")]
    EmptyPointSet,
    #[error("barycenter not at apex: branch {index} has a_i > sum of the others")]
    PolygonInfeasible { index: usize },
    #[error("infeasible candidate map: {0}")]
    InfeasiblePhi(String),
    #[error("{0}")]
    BadParameter(String),
}

/// A finite combinatorial tree with positive edge lengths.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TreeData", into = "TreeData")]
pub struct MetricTree {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<(usize, usize)>>,
}

/// Serialized form of a tree: vertex count and weighted edge list.
#[derive(Clone, Serialize, Deserialize)]
struct TreeData {
    vertices: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl TryFrom<TreeData> for MetricTree {
    type Error = Cat0Error;

    fn try_from(data: TreeData) -> Result<Self, Cat0Error> {
        MetricTree::new(data.vertices, data.edges)
    }
}

impl From<MetricTree> for TreeData {
    fn from(tree: MetricTree) -> TreeData {
        TreeData {
            vertices: tree.n,
            edges: tree.edges,
        }
    }
}

impl MetricTree {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self, Cat0Error> {
        if n == 0 {
            return Err(Cat0Error::BadTree("no vertices"));
        }
        if edges.len() + 1 != n {
            return Err(Cat0Error::BadTree("edge count must be vertex count - 1"));
        }
        for &(u, v, len) in &edges {
            if u >= n || v >= n {
                return Err(Cat0Error::BadTree("edge endpoint out of range"));
            }
            if u == v {
                return Err(Cat0Error::BadTree("loop edge"));
            }
            if !(len > 0.0) {
                return Err(Cat0Error::BadTree("non-positive edge length"));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v, _)) in edges.iter().enumerate() {
            adj[u].push((v, i));
            adj[v].push((u, i));
        }
        let tree = MetricTree { n, edges, adj };
        if !tree.connected() {
            return Err(Cat0Error::BadTree("not connected"));
        }
        Ok(tree)
    }

    fn connected(&self) -> bool {
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

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn incident_edges(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Distances from `root` to every vertex plus, per vertex, the first
    /// edge of the geodesic leaving `root` (`usize::MAX` at the root).
    pub fn scan_from(&self, root: usize) -> (Vec<f64>, Vec<usize>) {
        let mut dist = vec![f64::INFINITY; self.n];
        let mut first_edge = vec![usize::MAX; self.n];
        dist[root] = 0.0;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &(y, ei) in &self.adj[x] {
                if dist[y].is_infinite() {
                    dist[y] = dist[x] + self.edges[ei].2;
                    first_edge[y] = if x == root { ei } else { first_edge[x] };
                    stack.push(y);
                }
            }
        }
        (dist, first_edge)
    }

    /// The vertex sequence of the geodesic from `u` to `v`, inclusive.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.n];
        let mut seen = vec![false; self.n];
        seen[u] = true;
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            if x == v {
                break;
            }
            for &(y, _) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adj[u].iter().find(|&&(y, _)| y == v).map(|&(_, e)| e)
    }

    /// Canonicalizes a tree point: zero/full offsets collapse to vertices.
    pub fn canonicalize(&self, p: &TargetPoint) -> Result<TargetPoint, Cat0Error> {
        match p {
            TargetPoint::TreeVertex { vertex } => {
                if *vertex >= self.n {
                    return Err(Cat0Error::PointSpaceMismatch("tree vertex out of range"));
                }
                Ok(p.clone())
            }
            TargetPoint::TreeInterior { edge, offset } => {
                if *edge >= self.edges.len() {
                    return Err(Cat0Error::PointSpaceMismatch("tree edge out of range"));
                }
                let (u, v, len) = self.edges[*edge];
                if *offset < -1e-12 || *offset > len + 1e-12 {
                    return Err(Cat0Error::PointSpaceMismatch("offset outside edge length"));
                }
                if *offset <= 0.0 {
                    Ok(TargetPoint::TreeVertex { vertex: u })
                } else if *offset >= len {
                    Ok(TargetPoint::TreeVertex { vertex: v })
                } else {
                    Ok(p.clone())
                }
            }
            _ => Err(Cat0Error::PointSpaceMismatch("not a tree point")),
        }
    }

    /// `(endpoint vertex, offset to it)` pairs describing a point.
    fn anchors(&self, p: &TargetPoint) -> Result<Vec<(usize, f64)>, Cat0Error> {
        match self.canonicalize(p)? {
            TargetPoint::TreeVertex { vertex } => Ok(vec![(vertex, 0.0)]),
            TargetPoint::TreeInterior { edge, offset } => {
                let (u, v, len) = self.edges[edge];
                Ok(vec![(u, offset), (v, len - offset)])
            }
            _ => unreachable!(),
        }
    }

    pub fn point_distance(&self, p: &TargetPoint, q: &TargetPoint) -> Result<f64, Cat0Error> {
        let cp = self.canonicalize(p)?;
        let cq = self.canonicalize(q)?;
        if let (
            TargetPoint::TreeInterior { edge: e1, offset: o1 },
            TargetPoint::TreeInterior { edge: e2, offset: o2 },
        ) = (&cp, &cq)
        {
            if e1 == e2 {
                return Ok((o1 - o2).abs());
            }
        }
        let pa = self.anchors(&cp)?;
        let qa = self.anchors(&cq)?;
        let mut best = f64::INFINITY;
        for &(a, da) in &pa {
            let (dist, _) = self.scan_from(a);
            for &(b, db) in &qa {
                best = best.min(da + dist[b] + db);
            }
        }
        Ok(best)
    }

    /// Point at distance `s` from `p` along the geodesic toward `q`.
    fn walk_toward(&self, p: &TargetPoint, q: &TargetPoint, s: f64) -> Result<TargetPoint, Cat0Error> {
        let cp = self.canonicalize(p)?;
        let cq = self.canonicalize(q)?;
        if s <= 0.0 {
            return Ok(cp);
        }
        // Same-edge interior pair: move directly along the edge.
        if let (
            TargetPoint::TreeInterior { edge: e1, offset: o1 },
            TargetPoint::TreeInterior { edge: e2, offset: o2 },
        ) = (&cp, &cq)
        {
            if e1 == e2 {
                let dir = if o2 >= o1 { 1.0 } else { -1.0 };
                return self.canonicalize(&TargetPoint::TreeInterior {
                    edge: *e1,
                    offset: o1 + dir * s,
                });
            }
        }
        // Choose the anchor pair realizing the distance, then walk
        // p -> a -> ... -> b -> q.
        let pa = self.anchors(&cp)?;
        let qa = self.anchors(&cq)?;
        let mut best = (f64::INFINITY, 0usize, 0usize);
        for (i, &(a, da)) in pa.iter().enumerate() {
            let (dist, _) = self.scan_from(a);
            for (j, &(b, db)) in qa.iter().enumerate() {
                let d = da + dist[b] + db;
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        let (total, i, j) = best;
        let (a, da) = pa[i];
        let (b, _db) = qa[j];
        let mut remaining = s.min(total);
        // Leg 1: from p to its anchor a.
        if remaining <= da {
            if let TargetPoint::TreeInterior { edge, offset } = &cp {
                let (u, _v, _len) = self.edges[*edge];
                let dir = if a == u { -1.0 } else { 1.0 };
                return self.canonicalize(&TargetPoint::TreeInterior {
                    edge: *edge,
                    offset: offset + dir * remaining,
                });
            }
        }
        remaining -= da;
        // Leg 2: along the vertex path from a to b.
        let path = self.path(a, b);
        for w in path.windows(2) {
            let ei = self.edge_between(w[0], w[1]).expect("path edge");
            let (u, _v, len) = self.edges[ei];
            if remaining <= len {
                let offset = if w[0] == u { remaining } else { len - remaining };
                return self.canonicalize(&TargetPoint::TreeInterior { edge: ei, offset });
            }
            remaining -= len;
        }
        // Leg 3: from b into q's edge.
        if let TargetPoint::TreeInterior { edge, offset } = &cq {
            let (u, _v, len) = self.edges[*edge];
            let off = if b == u { remaining } else { len - remaining };
            let _ = offset;
            let _ = len;
            return self.canonicalize(&TargetPoint::TreeInterior { edge: *edge, offset: off });
        }
        Ok(cq)
    }
}

/// A CAT(0) model space.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpace {
    Euclidean { dim: usize },
    Tree(MetricTree),
    Product(Vec<TargetSpace>),
}

impl TargetSpace {
    pub fn tripod(leg: f64) -> TargetSpace {
        TargetSpace::Tree(
            MetricTree::new(4, vec![(0, 1, leg), (0, 2, leg), (0, 3, leg)]).expect("tripod"),
        )
    }
}

/// A point of a [`TargetSpace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetPoint {
    Euclidean { coords: Vec<f64> },
    TreeVertex { vertex: usize },
    TreeInterior { edge: usize, offset: f64 },
    Product { components: Vec<TargetPoint> },
}

impl TargetPoint {
    pub fn euclidean(coords: &[f64]) -> TargetPoint {
        TargetPoint::Euclidean {
            coords: coords.to_vec(),
        }
    }

    pub fn tree_vertex(v: usize) -> TargetPoint {
        TargetPoint::TreeVertex { vertex: v }
    }
}

/// A finite list of weighted points of a common space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedPointSet {
    pub points: Vec<TargetPoint>,
    pub weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn new(points: Vec<TargetPoint>, weights: Vec<f64>) -> Result<Self, Cat0Error> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Cat0Error::EmptyPointSet);
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Cat0Error::BadParameter("weights must be positive".into()));
        }
        Ok(WeightedPointSet { points, weights })
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn euclidean_coords<'a>(p: &'a TargetPoint, dim: usize) -> Result<&'a [f64], Cat0Error> {
    match p {
        TargetPoint::Euclidean { coords } if coords.len() == dim => Ok(coords),
        TargetPoint::Euclidean { .. } => {
            Err(Cat0Error::PointSpaceMismatch("euclidean dimension mismatch"))
        }
        _ => Err(Cat0Error::PointSpaceMismatch("expected euclidean point")),
    }
}

fn product_components<'a>(
    p: &'a TargetPoint,
    arity: usize,
) -> Result<&'a [TargetPoint], Cat0Error> {
    match p {
        TargetPoint::Product { components } if components.len() == arity => Ok(components),
        TargetPoint::Product { .. } => Err(Cat0Error::PointSpaceMismatch("product arity mismatch")),
        _ => Err(Cat0Error::PointSpaceMismatch("expected product point")),
    }
}

/// The metric of the model space.
pub fn distance(space: &TargetSpace, p: &TargetPoint, q: &TargetPoint) -> Result<f64, Cat0Error> {
    match space {
        TargetSpace::Euclidean { dim } => {
            let a = euclidean_coords(p, *dim)?;
            let b = euclidean_coords(q, *dim)?;
            Ok(a.iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt())
        }
        TargetSpace::Tree(tree) => tree.point_distance(p, q),
        TargetSpace::Product(parts) => {
            let pc = product_components(p, parts.len())?;
            let qc = product_components(q, parts.len())?;
            let mut sum = 0.0;
            for ((part, a), b) in parts.iter().zip(pc).zip(qc) {
                let d = distance(part, a, b)?;
                sum += d * d;
            }
            Ok(sum.sqrt())
        }
    }
}

/// Constant-speed geodesic: the point at distance `t * d(p, q)` from `p`.
pub fn geodesic_point(
    space: &TargetSpace,
    p: &TargetPoint,
    q: &TargetPoint,
    t: f64,
) -> Result<TargetPoint, Cat0Error> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Cat0Error::ParameterOutOfRange(t));
    }
    match space {
        TargetSpace::Euclidean { dim } => {
            let a = euclidean_coords(p, *dim)?;
            let b = euclidean_coords(q, *dim)?;
            Ok(TargetPoint::Euclidean {
                coords: a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| x + t * (y - x))
                    .collect(),
            })
        }
        TargetSpace::Tree(tree) => {
            if t == 0.0 {
                return tree.canonicalize(p);
            }
            if t == 1.0 {
                return tree.canonicalize(q);
            }
            let d = tree.point_distance(p, q)?;
            tree.walk_toward(p, q, t * d)
        }
        TargetSpace::Product(parts) => {
            let pc = product_components(p, parts.len())?;
            let qc = product_components(q, parts.len())?;
            let mut comps = Vec::with_capacity(parts.len());
            for ((part, a), b) in parts.iter().zip(pc).zip(qc) {
                comps.push(geodesic_point(part, a, b, t)?);
            }
            Ok(TargetPoint::Product { components: comps })
        }
    }
}

/// Unique minimizer of `u(y) = sum_i w_i d(z_i, y)^2`.
pub fn barycenter(space: &TargetSpace, pts: &WeightedPointSet) -> Result<TargetPoint, Cat0Error> {
    if pts.points.is_empty() {
        return Err(Cat0Error::EmptyPointSet);
    }
    match space {
        TargetSpace::Euclidean { dim } => {
            let total = pts.total_weight();
            let mut mean = vec![0.0; *dim];
            for (p, &w) in pts.points.iter().zip(&pts.weights) {
                let c = euclidean_coords(p, *dim)?;
                for (m, x) in mean.iter_mut().zip(c) {
                    *m += w * x;
                }
            }
            mean.iter_mut().for_each(|m| *m /= total);
            Ok(TargetPoint::Euclidean { coords: mean })
        }
        TargetSpace::Tree(tree) => tree_barycenter(tree, pts),
        TargetSpace::Product(parts) => {
            let mut comps = Vec::with_capacity(parts.len());
            for (i, part) in parts.iter().enumerate() {
                let proj = WeightedPointSet {
                    points: pts
                        .points
                        .iter()
                        .map(|p| product_components(p, parts.len()).map(|c| c[i].clone()))
                        .collect::<Result<_, _>>()?,
                    weights: pts.weights.clone(),
                };
                comps.push(barycenter(part, &proj)?);
            }
            Ok(TargetPoint::Product { components: comps })
        }
    }
}

/// Value of `u(y) = sum_i w_i d(z_i, y)^2`.
pub fn dispersion_at(
    space: &TargetSpace,
    pts: &WeightedPointSet,
    y: &TargetPoint,
) -> Result<f64, Cat0Error> {
    let mut u = 0.0;
    for (p, &w) in pts.points.iter().zip(&pts.weights) {
        let d = distance(space, p, y)?;
        u += w * d * d;
    }
    Ok(u)
}

fn tree_barycenter(tree: &MetricTree, pts: &WeightedPointSet) -> Result<TargetPoint, Cat0Error> {
    let canon: Vec<TargetPoint> = pts
        .points
        .iter()
        .map(|p| tree.canonicalize(p))
        .collect::<Result<_, _>>()?;
    let mut current = 0usize;
    let mut visited = vec![false; tree.vertex_count()];
    loop {
        visited[current] = true;
        let (dist, first_edge) = tree.scan_from(current);
        // Radial mass per incident edge germ; on-edge interior points are
        // assigned by their nearer side of the current vertex.
        let mut total_moment = 0.0;
        let mut germ_moment: Vec<f64> = vec![0.0; tree.degree(current)];
        let germ_slot: std::collections::BTreeMap<usize, usize> = tree
            .incident_edges(current)
            .iter()
            .enumerate()
            .map(|(slot, &(_, ei))| (ei, slot))
            .collect();
        for (p, &w) in canon.iter().zip(&pts.weights) {
            let (radius, germ) = point_branch_from_vertex(tree, current, p, &dist, &first_edge);
            total_moment += w * radius;
            if let Some(ei) = germ {
                germ_moment[germ_slot[&ei]] += w * radius;
            }
        }
        // One-sided derivative into germ e is 2 (total - 2 a_e); descend
        // where it is negative (at most one germ by convexity).
        let mut descend: Option<usize> = None;
        for (&(_, ei), slot) in tree.incident_edges(current).iter().zip(0..) {
            if 2.0 * germ_moment[slot] > total_moment {
                descend = Some(ei);
                break;
            }
        }
        let Some(ei) = descend else {
            return Ok(TargetPoint::TreeVertex { vertex: current });
        };
        let (u, v, len) = tree.edges[ei];
        let far = if u == current { v } else { u };
        if visited[far] {
            // Numerical tie on a previously visited vertex; stop here.
            return Ok(TargetPoint::TreeVertex { vertex: current });
        }
        // Minimize the piecewise quadratic on the edge strip [0, len],
        // splitting at on-edge data points (offsets measured from
        // `current`).
        let mut breaks: Vec<f64> = vec![0.0, len];
        for p in &canon {
            if let TargetPoint::TreeInterior { edge, offset } = p {
                if *edge == ei {
                    let off = if u == current { *offset } else { len - *offset };
                    breaks.push(off);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let total_w: f64 = pts.weights.iter().sum();
        let mut found: Option<f64> = None;
        'strips: for wpair in breaks.windows(2) {
            let (lo, hi) = (wpair[0], wpair[1]);
            let mid = 0.5 * (lo + hi);
            // u(s) = sum w (c_z + eps_z s)^2 on this strip.
            let mut lin = 0.0; // sum w eps c
            for (p, &w) in canon.iter().zip(&pts.weights) {
                let (c, eps) = edge_strip_coeff(tree, current, ei, p, mid, &dist, &first_edge);
                lin += w * eps * c;
            }
            let s_star = -lin / total_w;
            if s_star <= lo {
                // Minimum is behind this strip; by convexity it is at `lo`.
                found = Some(lo);
                break 'strips;
            }
            if s_star < hi {
                found = Some(s_star);
                break 'strips;
            }
        }
        match found {
            Some(s) if s > 0.0 && s < len => {
                let offset = if u == current { s } else { len - s };
                return Ok(TargetPoint::TreeInterior { edge: ei, offset });
            }
            Some(s) if s <= 0.0 => {
                return Ok(TargetPoint::TreeVertex { vertex: current });
            }
            _ => {
                current = far;
            }
        }
    }
}

/// Radius and first edge germ (from `root`) of a canonical tree point.
fn point_branch_from_vertex(
    tree: &MetricTree,
    root: usize,
    p: &TargetPoint,
    dist: &[f64],
    first_edge: &[usize],
) -> (f64, Option<usize>) {
    match p {
        TargetPoint::TreeVertex { vertex } => {
            if *vertex == root {
                (0.0, None)
            } else {
                (dist[*vertex], Some(first_edge[*vertex]))
            }
        }
        TargetPoint::TreeInterior { edge, offset } => {
            let (u, v, len) = tree.edges[*edge];
            if u == root {
                (*offset, Some(*edge))
            } else if v == root {
                (len - offset, Some(*edge))
            } else {
                let via_u = dist[u] + offset;
                let via_v = dist[v] + (len - offset);
                if via_u <= via_v {
                    (via_u, Some(first_edge[u]))
                } else {
                    (via_v, Some(first_edge[v]))
                }
            }
        }
        _ => unreachable!("canonical tree point"),
    }
}

/// Affine coefficients `(c, eps)` of `d(z, s) = c + eps * s` for `s` in an
/// edge strip starting at `root` into edge `ei`, probed at strip midpoint
/// `mid`.
fn edge_strip_coeff(
    tree: &MetricTree,
    root: usize,
    ei: usize,
    p: &TargetPoint,
    mid: f64,
    dist: &[f64],
    first_edge: &[usize],
) -> (f64, f64) {
    let (u, v, len) = tree.edges[ei];
    let far = if u == root { v } else { u };
    if let TargetPoint::TreeInterior { edge, offset } = p {
        if *edge == ei {
            let off = if u == root { *offset } else { len - *offset };
            return if off >= mid { (off, -1.0) } else { (-off, 1.0) };
        }
    }
    let (radius, germ) = point_branch_from_vertex(tree, root, p, dist, first_edge);
    if germ == Some(ei) {
        // Ahead through the far vertex: d = (radius - s).
        (radius, -1.0)
    } else {
        let _ = far;
        (radius, 1.0)
    }
}

/// Star data at a tree basepoint: branch directions and weighted radial
/// masses of a point set pushed to the tangent cone.
#[derive(Debug, Clone, Serialize)]
pub struct StarData {
    /// Number of genuine branch directions at the basepoint.
    pub branch_count: usize,
    /// `a_i`: total weighted radial mass per branch.
    pub radial_mass: Vec<f64>,
    /// Per point: branch id (`None` marks the designated null branch for
    /// points at the basepoint) and radius.
    pub assignments: Vec<(Option<usize>, f64)>,
}

/// Pushes a point set to the tangent cone at `basepoint` (a star of
/// half-lines): each point gets the branch of its geodesic's first edge
/// germ and its distance to the basepoint.
pub fn tangent_cone_star(
    tree: &MetricTree,
    basepoint: &TargetPoint,
    pts: &WeightedPointSet,
) -> Result<StarData, Cat0Error> {
    let base = tree.canonicalize(basepoint)?;
    match base {
        TargetPoint::TreeVertex { vertex } => {
            let (dist, first_edge) = tree.scan_from(vertex);
            let germs: Vec<usize> = tree
                .incident_edges(vertex)
                .iter()
                .map(|&(_, ei)| ei)
                .collect();
            let slot: std::collections::BTreeMap<usize, usize> =
                germs.iter().enumerate().map(|(i, &e)| (e, i)).collect();
            let mut radial_mass = vec![0.0; germs.len()];
            let mut assignments = Vec::with_capacity(pts.points.len());
            for (p, &w) in pts.points.iter().zip(&pts.weights) {
                let cp = tree.canonicalize(p)?;
                let (radius, germ) =
                    point_branch_from_vertex(tree, vertex, &cp, &dist, &first_edge);
                let branch = germ.map(|e| slot[&e]);
                if let Some(b) = branch {
                    radial_mass[b] += w * radius;
                }
                assignments.push((branch, radius));
            }
            Ok(StarData {
                branch_count: germs.len(),
                radial_mass,
                assignments,
            })
        }
        TargetPoint::TreeInterior { edge, offset } => {
            // Interior basepoint: exactly two branches, toward each
            // endpoint of the edge.
            let (u, v, len) = tree.edges[edge];
            let mut radial_mass = vec![0.0, 0.0];
            let mut assignments = Vec::with_capacity(pts.points.len());
            for (p, &w) in pts.points.iter().zip(&pts.weights) {
                let cp = tree.canonicalize(p)?;
                let (branch, radius) = match &cp {
                    TargetPoint::TreeInterior { edge: e2, offset: o2 } if *e2 == edge => {
                        if (o2 - offset).abs() < 1e-300 {
                            (None, 0.0)
                        } else if *o2 < offset {
                            (Some(0), offset - o2)
                        } else {
                            (Some(1), o2 - offset)
                        }
                    }
                    _ => {
                        let du = tree.point_distance(&cp, &TargetPoint::TreeVertex { vertex: u })?;
                        let dv = tree.point_distance(&cp, &TargetPoint::TreeVertex { vertex: v })?;
                        let via_u = du + offset;
                        let via_v = dv + (len - offset);
                        if via_u <= via_v {
                            (Some(0), via_u)
                        } else {
                            (Some(1), via_v)
                        }
                    }
                };
                if let Some(b) = branch {
                    radial_mass[b] += w * radius;
                }
                assignments.push((branch, radius));
            }
            Ok(StarData {
                branch_count: 2,
                radial_mass,
                assignments,
            })
        }
        _ => Err(Cat0Error::PointSpaceMismatch("basepoint not a tree point")),
    }
}

/// Closes the star into the plane: unit vectors `e_i` per branch with
/// `sum_i a_i e_i = 0`, provided every `a_i <= sum_{j != i} a_j`.
///
/// Sides are sorted descending and grouped into three bundles whose sums
/// satisfy the triangle inequality; the triangle is closed by the law of
/// cosines. Branches with zero mass receive the direction `(1, 0)` and are
/// ignored by the closing sum.
pub fn polygon_closing_embedding(star: &StarData) -> Result<Vec<[f64; 2]>, Cat0Error> {
    let a = &star.radial_mass;
    let total: f64 = a.iter().sum();
    if total <= 0.0 {
        return Err(Cat0Error::BadParameter(
            "no radial mass: all points at the apex".into(),
        ));
    }
    for (i, &ai) in a.iter().enumerate() {
        if ai > total - ai + 1e-12 * total {
            return Err(Cat0Error::PolygonInfeasible { index: i });
        }
    }
    let mut order: Vec<usize> = (0..a.len()).filter(|&i| a[i] > 0.0).collect();
    order.sort_by(|&i, &j| a[j].total_cmp(&a[i]));
    // Group the largest side alone, then balance the rest greedily; the
    // resulting bundle sums satisfy the triangle inequality whenever the
    // polygon inequality holds.
    let mut groups: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut sums = [0.0f64; 3];
    for (rank, &i) in order.iter().enumerate() {
        let g = if rank == 0 {
            0
        } else if sums[1] <= sums[2] {
            1
        } else {
            2
        };
        groups[g].push(i);
        sums[g] += a[i];
    }
    let (s1, s2, s3) = (sums[0], sums[1], sums[2]);
    // Close the triangle s1 u1 + s2 u2 + s3 u3 = 0 with u1 = (1, 0) by the
    // two-arc intersection: the apex p sits at distance s2 from the origin
    // and s3 from w = (-s1, 0). Both remaining directions come from the
    // same apex, so their heights cancel structurally; the apex height is
    // additionally clamped by the exact area bound y <= s2 s3 / s1, which
    // zeroes the spurious sqrt-eps heights of flat closings.
    let x = (s1 * s1 + s2 * s2 - s3 * s3) / (2.0 * s1);
    let y_raw = (s2 * s2 - x * x).max(0.0).sqrt();
    let y = y_raw.min(s2 * s3 / s1);
    let u2 = {
        let norm = (x * x + y * y).sqrt();
        if norm > 0.0 {
            [-x / norm, y / norm]
        } else {
            [-1.0, 0.0]
        }
    };
    let u3 = {
        let v = [x - s1, -y];
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        if norm > 0.0 {
            [v[0] / norm, v[1] / norm]
        } else {
            [-1.0, 0.0]
        }
    };
    let dirs = [[1.0, 0.0], u2, u3];
    let mut out = vec![[1.0, 0.0]; a.len()];
    for (g, members) in groups.iter().enumerate() {
        for &i in members {
            out[i] = dirs[g];
        }
    }
    Ok(out)
}

/// Ratio `|bar(phi)|^2 / ||phi||^2` of a feasible candidate re-embedding:
/// an upper bound on the configuration invariant `delta(Z)`.
///
/// `phi[i]` is the Euclidean image of the i-th point; feasibility requires
/// `|phi(z)| = d(z, barycenter)` (radial isometry) and pairwise
/// 1-Lipschitzness, both to 1e-9. Weights must be normalized to total 1.
pub fn izeki_nayatani_ratio(
    space: &TargetSpace,
    pts: &WeightedPointSet,
    phi: &[Vec<f64>],
) -> Result<f64, Cat0Error> {
    const TOL: f64 = 1e-9;
    if phi.len() != pts.points.len() {
        return Err(Cat0Error::InfeasiblePhi(
            "phi length differs from point count".into(),
        ));
    }
    if (pts.total_weight() - 1.0).abs() > TOL {
        return Err(Cat0Error::BadParameter(
            "weights must be normalized to total 1".into(),
        ));
    }
    let dim = phi.first().map_or(0, |v| v.len());
    if phi.iter().any(|v| v.len() != dim) {
        return Err(Cat0Error::InfeasiblePhi("phi images have mixed dimensions".into()));
    }
    let bar = barycenter(space, pts)?;
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for (i, (p, f)) in pts.points.iter().zip(phi).enumerate() {
        let d = distance(space, p, &bar)?;
        if (norm(f) - d).abs() > TOL {
            return Err(Cat0Error::InfeasiblePhi(format!(
                "norm constraint violated at point {i}: |phi| = {} but d(z, bar) = {d}",
                norm(f)
            )));
        }
    }
    for i in 0..phi.len() {
        for j in (i + 1)..phi.len() {
            let dz = distance(space, &pts.points[i], &pts.points[j])?;
            let mut dq = 0.0;
            for k in 0..dim {
                let t = phi[i][k] - phi[j][k];
                dq += t * t;
            }
            let dphi = dq.sqrt();
            if dphi > dz + TOL {
                return Err(Cat0Error::InfeasiblePhi(format!(
                    "1-Lipschitz constraint violated on pair ({i}, {j}): |phi_i - phi_j| = {dphi} > d = {dz}"
                )));
            }
        }
    }
    let mut mean = vec![0.0; dim];
    let mut norm_sq = 0.0;
    for (f, &w) in phi.iter().zip(&pts.weights) {
        for (m, x) in mean.iter_mut().zip(f) {
            *m += w * x;
        }
        norm_sq += w * f.iter().map(|x| x * x).sum::<f64>();
    }
    if norm_sq <= 1e-24 {
        return Err(Cat0Error::BadParameter(
            "all points at the barycenter: ratio undefined".into(),
        ));
    }
    let mean_sq: f64 = mean.iter().map(|x| x * x).sum();
    Ok(mean_sq / norm_sq)
}

/// Closed-form lower bound `(sqrt(p) - 1)^2 / (2 (p - sqrt(p) + 1))` on the
/// invariant of the rank-2 affine building over the p-adics.
pub fn in_lower_bound_building(p: u64) -> Result<f64, Cat0Error> {
    if p < 2 {
        return Err(Cat0Error::BadParameter(format!("p must be >= 2, got {p}")));
    }
    let s = (p as f64).sqrt();
    Ok((s - 1.0) * (s - 1.0) / (2.0 * (p as f64 - s + 1.0)))
}

/// Degraded gap bound `(1 - IN) * lambda` for targets with a bounded
/// invariant.
pub fn gap_bound_from_in(lambda_scalar: f64, in_bound: f64) -> Result<f64, Cat0Error> {
    if !(0.0..1.0).contains(&in_bound) {
        return Err(Cat0Error::BadParameter(format!(
            "IN bound must lie in [0, 1), got {in_bound}"
        )));
    }
    Ok((1.0 - in_bound) * lambda_scalar)
}
