//! Energies of vertex maps into CAT(0) targets, the discrete Laplacian,
//! a synchronous descent flow, a twisted Euclidean harmonic solver, and
//! Garland identity/inequality checkers plus fixed-point certificates.
//!
//! Equivariance is carried by finite data: a map on the finite complex plus
//! an optional Euclidean translation cocycle. With a cocycle `c`, the edge
//! term of the energy is `|f(x') - f(x) + c(x -> x')|^2` and the neighbor
//! `x'` seen from `x` sits at `f(x') + c(x -> x')`; face-closedness makes
//! the link's pairwise distances well-defined.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cat0::{self, Cat0Error, TargetPoint, TargetSpace, WeightedPointSet};
use crate::complex::{WeightedComplex, WeightedGraph};
use crate::linalg::{self, LinalgError};
use crate::spectral::{self, SpectralError};

/// Max-vertex-magnitude threshold under which a map counts as harmonic.
pub const HARMONIC_TOL: f64 = 1e-8;

/// Absolute tolerance for the face-closedness of a cocycle.
pub const COCYCLE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum HarmonicError {
    #[error("map has {points} points but host has {vertices} vertices")]
    SizeMismatch { points: usize, vertices: usize },
    #[error("cocycle has {vectors} vectors but host has {edges} edge items")]
    CocycleSizeMismatch { vectors: usize, edges: usize },
    #[error("cocycles require a Euclidean target")]
    CocycleNeedsEuclidean,
    #[error("cocycle dimension {cocycle} does not match target dimension {target}")]
    CocycleDimension { cocycle: usize, target: usize },
    #[error("cocycle is not face-closed: face {{{0}, {1}, {2}}} has residual {residual}", face[0], face[1], face[2])]
    CocycleNotClosed { face: [usize; 3], residual: f64 },
    #[error("step size {0} outside (0, 1]")]
    BadEta(f64),
    #[error("complex is not connected")]
    NotConnected,
    #[error("edge {{{0}, {1}}} lies in no face", edge.0, edge.1)]
    EdgeNotInFace { edge: (usize, usize) },
    #[error("vertex {0} lies in no face")]
    VertexNotInFace(usize),
    #[error(transparent)]
    Cat0(#[from] Cat0Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Errors of the operations that additionally run eigensolves.
#[derive(Debug, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("IN bound delta = {0} must be < 1")]
    BadDelta(f64),
}

/// Assignment of target points to host vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexMap {
    pub space: TargetSpace,
    pub points: Vec<TargetPoint>,
}

impl VertexMap {
    pub fn constant(space: TargetSpace, point: TargetPoint, n: usize) -> VertexMap {
        VertexMap {
            space,
            points: vec![point; n],
        }
    }

    pub fn euclidean(dim: usize, rows: Vec<Vec<f64>>) -> VertexMap {
        VertexMap {
            space: TargetSpace::Euclidean { dim },
            points: rows
                .into_iter()
                .map(|coords| TargetPoint::Euclidean { coords })
                .collect(),
        }
    }

    fn check_host(&self, n: usize) -> Result<(), HarmonicError> {
        if self.points.len() != n {
            return Err(HarmonicError::SizeMismatch {
                points: self.points.len(),
                vertices: n,
            });
        }
        Ok(())
    }
}

/// Euclidean translation cocycle: one vector per host edge item, oriented
/// from the stored smaller endpoint to the larger; the reversed orientation
/// is the negative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeCocycle {
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
}

impl EdgeCocycle {
    pub fn new(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self, HarmonicError> {
        for v in &vectors {
            if v.len() != dim {
                return Err(HarmonicError::CocycleDimension {
                    cocycle: v.len(),
                    target: dim,
                });
            }
        }
        Ok(EdgeCocycle { dim, vectors })
    }

    /// The coboundary of a vertex potential: `c(u -> v) = h(v) - h(u)`.
    pub fn coboundary(g: &WeightedGraph, dim: usize, h: &[Vec<f64>]) -> Self {
        let vectors = g
            .edge_items()
            .iter()
            .map(|e| {
                (0..dim)
                    .map(|k| h[e.v][k] - h[e.u][k])
                    .collect::<Vec<f64>>()
            })
            .collect();
        EdgeCocycle { dim, vectors }
    }

    fn check_host(&self, g: &WeightedGraph) -> Result<(), HarmonicError> {
        if self.vectors.len() != g.edge_items().len() {
            return Err(HarmonicError::CocycleSizeMismatch {
                vectors: self.vectors.len(),
                edges: g.edge_items().len(),
            });
        }
        Ok(())
    }

    /// The vector of edge item `idx` oriented to leave `from`.
    fn oriented(&self, g: &WeightedGraph, idx: usize, from: usize) -> Vec<f64> {
        let e = &g.edge_items()[idx];
        let v = &self.vectors[idx];
        if e.u == from {
            v.clone()
        } else {
            v.iter().map(|x| -x).collect()
        }
    }

    /// Checks `c(x -> x') + c(x' -> x'') + c(x'' -> x) = 0` on every face.
    pub fn validate_closed(&self, cx: &WeightedComplex) -> Result<(), HarmonicError> {
        let g = cx.skeleton();
        self.check_host(g)?;
        for (fi, tri) in cx.faces().iter().enumerate() {
            let _ = fi;
            let mut sum = vec![0.0; self.dim];
            let mut scale: f64 = 1.0;
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let idx = cx
                    .edge_index(a, b)
                    .expect("face edge present by construction");
                let v = self.oriented(g, idx, a);
                for (s, x) in sum.iter_mut().zip(&v) {
                    *s += x;
                }
                scale = scale.max(v.iter().map(|x| x.abs()).fold(0.0, f64::max));
            }
            let residual = sum.iter().map(|x| x * x).sum::<f64>().sqrt();
            if residual > COCYCLE_TOL * scale.max(1.0) {
                return Err(HarmonicError::CocycleNotClosed {
                    face: *tri,
                    residual,
                });
            }
        }
        Ok(())
    }
}

fn euclid_dim(space: &TargetSpace) -> Option<usize> {
    match space {
        TargetSpace::Euclidean { dim } => Some(*dim),
        _ => None,
    }
}

fn coords(p: &TargetPoint) -> &[f64] {
    match p {
        TargetPoint::Euclidean { coords } => coords,
        _ => unreachable!("checked euclidean"),
    }
}

/// Energy `E(f) = sum_e m(e) d(f(ori e), f(ext e))^2`, with the cocycle
/// twist on Euclidean targets.
pub fn energy(
    g: &WeightedGraph,
    map: &VertexMap,
    cocycle: Option<&EdgeCocycle>,
) -> Result<f64, HarmonicError> {
    map.check_host(g.vertex_count())?;
    match cocycle {
        None => {
            let mut total = 0.0;
            for e in g.edge_items() {
                if e.u == e.v {
                    continue;
                }
                let d = cat0::distance(&map.space, &map.points[e.u], &map.points[e.v])?;
                total += e.weight * d * d;
            }
            Ok(total)
        }
        Some(c) => {
            let dim = euclid_dim(&map.space).ok_or(HarmonicError::CocycleNeedsEuclidean)?;
            if c.dim != dim {
                return Err(HarmonicError::CocycleDimension {
                    cocycle: c.dim,
                    target: dim,
                });
            }
            c.check_host(g)?;
            let mut total = 0.0;
            for (i, e) in g.edge_items().iter().enumerate() {
                let fu = coords(&map.points[e.u]);
                let fv = coords(&map.points[e.v]);
                let cv = &c.vectors[i];
                let mut d2 = 0.0;
                for k in 0..dim {
                    let t = fv[k] - fu[k] + cv[k];
                    d2 += t * t;
                }
                total += e.weight * d2;
            }
            Ok(total)
        }
    }
}

/// Weighted l2 distance `d(f, g) = (sum_x m(x) d(f(x), g(x))^2)^(1/2)`.
pub fn map_distance(
    g: &WeightedGraph,
    f: &VertexMap,
    h: &VertexMap,
) -> Result<f64, HarmonicError> {
    f.check_host(g.vertex_count())?;
    h.check_host(g.vertex_count())?;
    let mut sum = 0.0;
    for x in 0..g.vertex_count() {
        let d = cat0::distance(&f.space, &f.points[x], &h.points[x])?;
        sum += g.vertex_weight(x) * d * d;
    }
    Ok(sum.sqrt())
}

/// The link restriction seen from `x`: neighbor positions (cocycle-shifted
/// on Euclidean targets) weighted by the edge weights, plus
/// `ED(f, x) = 1/2 sum m(x, x') d(position, f(x))^2`.
#[derive(Debug, Clone)]
pub struct LocalData {
    pub positions: WeightedPointSet,
    /// Host vertex behind each position (x itself for loop slots).
    pub link_vertices: Vec<usize>,
    pub ed: f64,
}

pub fn local_data(
    g: &WeightedGraph,
    map: &VertexMap,
    x: usize,
    cocycle: Option<&EdgeCocycle>,
) -> Result<LocalData, HarmonicError> {
    map.check_host(g.vertex_count())?;
    if let Some(c) = cocycle {
        let dim = euclid_dim(&map.space).ok_or(HarmonicError::CocycleNeedsEuclidean)?;
        if c.dim != dim {
            return Err(HarmonicError::CocycleDimension {
                cocycle: c.dim,
                target: dim,
            });
        }
        c.check_host(g)?;
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut link_vertices = Vec::new();
    for &idx in g.incident_items(x) {
        let e = &g.edge_items()[idx];
        let other = if e.u == x { e.v } else { e.u };
        match cocycle {
            None => {
                if other == x {
                    // Loop: both walk slots stay at f(x).
                    points.push(map.points[x].clone());
                    weights.push(2.0 * e.weight);
                    link_vertices.push(x);
                } else {
                    points.push(map.points[other].clone());
                    weights.push(e.weight);
                    link_vertices.push(other);
                }
            }
            Some(c) => {
                let dim = c.dim;
                if other == x {
                    // Loop: the two slots carry opposite twists.
                    let v = c.oriented(g, idx, x);
                    let fx = coords(&map.points[x]);
                    for sign in [1.0, -1.0] {
                        points.push(TargetPoint::Euclidean {
                            coords: (0..dim).map(|k| fx[k] + sign * v[k]).collect(),
                        });
                        weights.push(e.weight);
                        link_vertices.push(x);
                    }
                } else {
                    let v = c.oriented(g, idx, x);
                    let fo = coords(&map.points[other]);
                    points.push(TargetPoint::Euclidean {
                        coords: (0..dim).map(|k| fo[k] + v[k]).collect(),
                    });
                    weights.push(e.weight);
                    link_vertices.push(other);
                }
            }
        }
    }
    let positions = WeightedPointSet { points, weights };
    let mut ed = 0.0;
    for (p, &w) in positions.points.iter().zip(&positions.weights) {
        let d = cat0::distance(&map.space, p, &map.points[x])?;
        ed += 0.5 * w * d * d;
    }
    Ok(LocalData {
        positions,
        link_vertices,
        ed,
    })
}

/// Direction descriptor of `-Delta f(x)` in the tangent cone at `f(x)`.
#[derive(Debug, Clone)]
pub enum TangentVector {
    Euclidean(Vec<f64>),
    /// Branch of the tree star (`None` when at the apex) and radius.
    Star { branch: Option<usize>, radius: f64 },
    Product(Vec<TangentVector>),
}

#[derive(Debug, Clone)]
pub struct LaplacianData {
    pub direction: TangentVector,
    pub magnitude: f64,
}

fn cone_barycenter(
    space: &TargetSpace,
    base: &TargetPoint,
    pts: &WeightedPointSet,
) -> Result<LaplacianData, HarmonicError> {
    match space {
        TargetSpace::Euclidean { dim } => {
            let mean = cat0::barycenter(space, pts)?;
            let b = coords(&mean);
            let f = coords(base);
            let dir: Vec<f64> = (0..*dim).map(|k| b[k] - f[k]).collect();
            let magnitude = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            Ok(LaplacianData {
                direction: TangentVector::Euclidean(dir),
                magnitude,
            })
        }
        TargetSpace::Tree(tree) => {
            let star = cat0::tangent_cone_star(tree, base, pts)?;
            let total_w: f64 = pts.weights.iter().sum();
            let total_mass: f64 = star.radial_mass.iter().sum();
            let mut best: Option<(usize, f64)> = None;
            for (i, &a) in star.radial_mass.iter().enumerate() {
                if 2.0 * a > total_mass {
                    best = Some((i, (2.0 * a - total_mass) / total_w));
                    break;
                }
            }
            match best {
                Some((branch, radius)) => Ok(LaplacianData {
                    direction: TangentVector::Star {
                        branch: Some(branch),
                        radius,
                    },
                    magnitude: radius,
                }),
                None => Ok(LaplacianData {
                    direction: TangentVector::Star {
                        branch: None,
                        radius: 0.0,
                    },
                    magnitude: 0.0,
                }),
            }
        }
        TargetSpace::Product(parts) => {
            let base_comps = match base {
                TargetPoint::Product { components } => components,
                _ => return Err(Cat0Error::PointSpaceMismatch("expected product point").into()),
            };
            let mut dirs = Vec::with_capacity(parts.len());
            let mut mag_sq = 0.0;
            for (i, part) in parts.iter().enumerate() {
                let proj = WeightedPointSet {
                    points: pts
                        .points
                        .iter()
                        .map(|p| match p {
                            TargetPoint::Product { components } => Ok(components[i].clone()),
                            _ => Err(Cat0Error::PointSpaceMismatch("expected product point")),
                        })
                        .collect::<Result<_, _>>()?,
                    weights: pts.weights.clone(),
                };
                let sub = cone_barycenter(part, &base_comps[i], &proj)?;
                mag_sq += sub.magnitude * sub.magnitude;
                dirs.push(sub.direction);
            }
            Ok(LaplacianData {
                direction: TangentVector::Product(dirs),
                magnitude: mag_sq.sqrt(),
            })
        }
    }
}

/// `-Delta f(x)`: the barycenter of the link restriction pushed to the
/// tangent cone at `f(x)`; its magnitude vanishes exactly at harmonic
/// points.
///
/// For scalar maps this is Kirchhoff's current law: with conductances
/// `m(x, x')` and potentials `f`, the vertex is balanced iff the incident
/// currents `m(x, x') (f(x') - f(x))` sum to zero.
pub fn minus_laplacian(
    g: &WeightedGraph,
    map: &VertexMap,
    x: usize,
    cocycle: Option<&EdgeCocycle>,
) -> Result<LaplacianData, HarmonicError> {
    let local = local_data(g, map, x, cocycle)?;
    if local.positions.points.is_empty() {
        return Ok(LaplacianData {
            direction: TangentVector::Euclidean(Vec::new()),
            magnitude: 0.0,
        });
    }
    cone_barycenter(&map.space, &map.points[x], &local.positions)
}

/// `|-Delta f| = (sum_z m(z) |-Delta f(x)|^2)^(1/2)`.
pub fn laplacian_norm(
    g: &WeightedGraph,
    map: &VertexMap,
    cocycle: Option<&EdgeCocycle>,
) -> Result<f64, HarmonicError> {
    let mut sum = 0.0;
    for x in 0..g.vertex_count() {
        let l = minus_laplacian(g, map, x, cocycle)?;
        sum += g.vertex_weight(x) * l.magnitude * l.magnitude;
    }
    Ok(sum.sqrt())
}

/// Largest per-vertex Laplacian magnitude.
pub fn max_vertex_laplacian(
    g: &WeightedGraph,
    map: &VertexMap,
    cocycle: Option<&EdgeCocycle>,
) -> Result<f64, HarmonicError> {
    let mut max = 0.0f64;
    for x in 0..g.vertex_count() {
        max = max.max(minus_laplacian(g, map, x, cocycle)?.magnitude);
    }
    Ok(max)
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowStep {
    pub step: usize,
    pub energy: f64,
    pub laplacian_norm: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub steps: Vec<FlowStep>,
    pub final_map: VertexMap,
}

/// Synchronous descent: each sweep moves every `f(x)` along the geodesic
/// toward its link barycenter by the fraction `eta`. The trace records the
/// state before the first sweep and after each one; sweeps stop early once
/// the map is harmonic to [`HARMONIC_TOL`].
pub fn mayer_flow(
    g: &WeightedGraph,
    map0: &VertexMap,
    eta: f64,
    iterations: usize,
    cocycle: Option<&EdgeCocycle>,
) -> Result<FlowTrace, HarmonicError> {
    mayer_flow_with_tolerance(g, map0, eta, iterations, cocycle, HARMONIC_TOL)
}

/// [`mayer_flow`] with an overridden harmonicity stop threshold.
pub fn mayer_flow_with_tolerance(
    g: &WeightedGraph,
    map0: &VertexMap,
    eta: f64,
    iterations: usize,
    cocycle: Option<&EdgeCocycle>,
    harmonic_tol: f64,
) -> Result<FlowTrace, HarmonicError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(HarmonicError::BadEta(eta));
    }
    map0.check_host(g.vertex_count())?;
    let mut map = map0.clone();
    let mut steps = Vec::with_capacity(iterations + 1);
    let record = |map: &VertexMap, step: usize| -> Result<(FlowStep, f64), HarmonicError> {
        let e = energy(g, map, cocycle)?;
        let ln = laplacian_norm(g, map, cocycle)?;
        let max = max_vertex_laplacian(g, map, cocycle)?;
        Ok((
            FlowStep {
                step,
                energy: e,
                laplacian_norm: ln,
            },
            max,
        ))
    };
    let (st, mut max_mag) = record(&map, 0)?;
    steps.push(st);
    for step in 1..=iterations {
        if max_mag < harmonic_tol {
            break;
        }
        let mut next_points = Vec::with_capacity(map.points.len());
        for x in 0..g.vertex_count() {
            let local = local_data(g, &map, x, cocycle)?;
            if local.positions.points.is_empty() {
                next_points.push(map.points[x].clone());
                continue;
            }
            let target = cat0::barycenter(&map.space, &local.positions)?;
            next_points.push(cat0::geodesic_point(
                &map.space,
                &map.points[x],
                &target,
                eta,
            )?);
        }
        map = VertexMap {
            space: map.space.clone(),
            points: next_points,
        };
        let (st, m) = record(&map, step)?;
        steps.push(st);
        max_mag = m;
    }
    Ok(FlowTrace {
        steps,
        final_map: map,
    })
}

/// Exact minimizer of the twisted energy on a connected complex with a
/// face-closed Euclidean cocycle, gauge-fixed by pinning vertex 0 at the
/// origin. Solves the weighted-Laplacian normal equations per coordinate.
pub fn solve_twisted_harmonic(
    cx: &WeightedComplex,
    cocycle: &EdgeCocycle,
) -> Result<VertexMap, HarmonicError> {
    let g = cx.skeleton();
    if !g.is_connected() {
        return Err(HarmonicError::NotConnected);
    }
    cocycle.validate_closed(cx)?;
    let n = g.vertex_count();
    let dim = cocycle.dim;
    // rho(x) = sum over incident oriented edges of m(e) c(x -> x').
    let mut rho = vec![vec![0.0; dim]; n];
    for (i, e) in g.edge_items().iter().enumerate() {
        if e.u == e.v {
            continue;
        }
        let v = &cocycle.vectors[i];
        for k in 0..dim {
            rho[e.u][k] += e.weight * v[k];
            rho[e.v][k] -= e.weight * v[k];
        }
    }
    // Reduced Laplacian on vertices 1..n (vertex 0 pinned to the origin).
    let m = n - 1;
    let mut lap = vec![0.0; m * m];
    for x in 1..n {
        lap[(x - 1) * m + (x - 1)] = g.vertex_weight(x);
    }
    for e in g.edge_items() {
        if e.u == e.v || e.u == 0 || e.v == 0 {
            continue;
        }
        lap[(e.u - 1) * m + (e.v - 1)] -= e.weight;
        lap[(e.v - 1) * m + (e.u - 1)] -= e.weight;
    }
    // Loops contribute twice to the vertex weight but nothing to L.
    for e in g.edge_items() {
        if e.u == e.v && e.u != 0 {
            lap[(e.u - 1) * m + (e.u - 1)] -= 2.0 * e.weight;
        }
    }
    let chol = linalg::cholesky_factor(m, &lap)?;
    let mut rows = vec![vec![0.0; dim]; n];
    let mut rhs = vec![0.0; m];
    for k in 0..dim {
        for x in 1..n {
            rhs[x - 1] = rho[x][k];
        }
        linalg::cholesky_solve_inplace(m, &chol, &mut rhs);
        for x in 1..n {
            rows[x][k] = rhs[x - 1];
        }
    }
    Ok(VertexMap::euclidean(dim, rows))
}

/// Residual report of the energy decompositions. The identity
/// `E(f) = 2 sum_z RQ(link restriction) ED(f, x)` is asserted only for
/// harmonic maps; `E(f) = sum_z E(link restriction) = sum_z ED(f, x)` hold
/// unconditionally whenever every edge lies in a face.
#[derive(Debug, Clone, Serialize)]
pub struct GarlandIdentityReport {
    pub harmonic: bool,
    pub max_vertex_laplacian: f64,
    pub energy: f64,
    pub sum_link_energies: f64,
    pub sum_ed: f64,
    /// `2 sum_z RQ(f|link(x)) ED(f, x)`; constant restrictions contribute 0.
    pub weighted_rq_sum: f64,
    /// Per-vertex link Rayleigh quotients (`None` for constant
    /// restrictions).
    pub link_quotients: Vec<Option<f64>>,
    pub unconditional_residual: f64,
    pub ed_residual: f64,
    /// `|E - 2 sum RQ ED|` relative; `None` when the map is not harmonic
    /// ("identity not asserted").
    pub harmonic_residual: Option<f64>,
}

fn link_restriction_map(
    cx: &WeightedComplex,
    map: &VertexMap,
    x: usize,
    cocycle: Option<&EdgeCocycle>,
) -> Result<(crate::complex::Link, VertexMap), HarmonicError> {
    let g = cx.skeleton();
    let link = cx.link_of(x).map_err(|e| match e {
        crate::complex::ComplexError::LinkInconsistent { vertex, other } => {
            HarmonicError::EdgeNotInFace {
                edge: if vertex <= other {
                    (vertex, other)
                } else {
                    (other, vertex)
                },
            }
        }
        _ => HarmonicError::VertexNotInFace(x),
    })?;
    let points: Vec<TargetPoint> = match cocycle {
        None => link.vertices.iter().map(|&v| map.points[v].clone()).collect(),
        Some(c) => {
            let dim = c.dim;
            link.vertices
                .iter()
                .map(|&v| {
                    let idx = cx.edge_index(x, v).expect("link edge");
                    let shift = c.oriented(g, idx, x);
                    let fv = coords(&map.points[v]);
                    TargetPoint::Euclidean {
                        coords: (0..dim).map(|k| fv[k] + shift[k]).collect(),
                    }
                })
                .collect()
        }
    };
    let restriction = VertexMap {
        space: map.space.clone(),
        points,
    };
    Ok((link, restriction))
}

pub fn garland_identity_check(
    cx: &WeightedComplex,
    map: &VertexMap,
    cocycle: Option<&EdgeCocycle>,
) -> Result<GarlandIdentityReport, CertificateError> {
    require_edges_in_faces(cx)?;
    let g = cx.skeleton();
    map.check_host(g.vertex_count())?;
    let total_energy = energy(g, map, cocycle)?;
    let max_lap = max_vertex_laplacian(g, map, cocycle)?;
    let harmonic = max_lap < HARMONIC_TOL;

    let mut sum_link = 0.0;
    let mut sum_ed = 0.0;
    let mut weighted = 0.0;
    let mut quotients = Vec::with_capacity(g.vertex_count());
    for x in 0..g.vertex_count() {
        // Fully isolated vertices contribute nothing to either side.
        if cx.faces_at_vertex(x).is_empty() && g.incident_items(x).is_empty() {
            quotients.push(None);
            continue;
        }
        let (link, restriction) = link_restriction_map(cx, map, x, cocycle)?;
        let e_link = energy(&link.graph, &restriction, None)?;
        sum_link += e_link;
        let ed = local_data(g, map, x, cocycle)?.ed;
        sum_ed += ed;
        match spectral::rayleigh_quotient(&link.graph, &restriction) {
            Ok(rq) => {
                weighted += 2.0 * rq * ed;
                quotients.push(Some(rq));
            }
            Err(SpectralError::ConstantMap) => {
                quotients.push(None);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let scale = total_energy.abs().max(1.0);
    let unconditional_residual = (total_energy - sum_link).abs() / scale;
    let ed_residual = (total_energy - sum_ed).abs() / scale;
    let harmonic_residual = if harmonic {
        Some((total_energy - weighted).abs() / scale)
    } else {
        None
    };
    Ok(GarlandIdentityReport {
        harmonic,
        max_vertex_laplacian: max_lap,
        energy: total_energy,
        sum_link_energies: sum_link,
        sum_ed,
        weighted_rq_sum: weighted,
        link_quotients: quotients,
        unconditional_residual,
        ed_residual,
        harmonic_residual,
    })
}

/// Slack report of `(2 lambda - 1)^2 E(f) <= 8 lambda^2 |-Delta f|^2`.
/// Euclidean targets also carry the sharper linear form
/// `(2 lambda - 1) E(f) <= lambda |-Delta f|^2`.
#[derive(Debug, Clone, Serialize)]
pub struct GarlandInequalityReport {
    pub lambda: f64,
    pub energy: f64,
    pub laplacian_norm: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub linear_lhs: Option<f64>,
    pub linear_rhs: Option<f64>,
    pub linear_slack: Option<f64>,
}

pub fn garland_inequality_check(
    cx: &WeightedComplex,
    map: &VertexMap,
    lambda: f64,
    cocycle: Option<&EdgeCocycle>,
) -> Result<GarlandInequalityReport, HarmonicError> {
    let g = cx.skeleton();
    map.check_host(g.vertex_count())?;
    let e = energy(g, map, cocycle)?;
    let ln = laplacian_norm(g, map, cocycle)?;
    let lhs = (2.0 * lambda - 1.0).powi(2) * e;
    let rhs = 8.0 * lambda * lambda * ln * ln;
    let linear = matches!(map.space, TargetSpace::Euclidean { .. });
    let linear_lhs = linear.then(|| (2.0 * lambda - 1.0) * e);
    let linear_rhs = linear.then(|| lambda * ln * ln);
    let linear_slack = linear_rhs.zip(linear_lhs).map(|(r, l)| r - l);
    Ok(GarlandInequalityReport {
        lambda,
        energy: e,
        laplacian_norm: ln,
        lhs,
        rhs,
        slack: rhs - lhs,
        linear_lhs,
        linear_rhs,
        linear_slack,
    })
}

/// Target class of a fixed-point certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum TargetClass {
    /// Hilbert targets: link gaps must exceed 1/2.
    Hilbert,
    /// Targets with Izeki-Nayatani invariant at most `delta`: link gaps
    /// must exceed `1 / (2 (1 - delta))`.
    InBounded { delta: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub target: TargetClass,
    pub threshold: f64,
    pub min_link_gap: f64,
    pub binding_vertex: usize,
    pub link_gaps: Vec<f64>,
    pub granted: bool,
    /// Set when a Hilbert certificate is granted: the fixed-point property
    /// on Hilbert spaces is Kazhdan's property (T).
    pub property_t_certified: bool,
}

fn require_edges_in_faces(cx: &WeightedComplex) -> Result<(), HarmonicError> {
    let mut covered = vec![false; cx.edges().len()];
    for tri in cx.faces() {
        for (a, b) in [(tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])] {
            if let Some(i) = cx.edge_index(a, b) {
                covered[i] = true;
            }
        }
    }
    if let Some(i) = covered.iter().position(|&c| !c) {
        return Err(HarmonicError::EdgeNotInFace {
            edge: cx.edges()[i],
        });
    }
    Ok(())
}

/// Evaluates the link-gap fixed-point criterion: every link gap strictly
/// above the class threshold grants the certificate.
pub fn fixed_point_certificate(
    cx: &WeightedComplex,
    target: TargetClass,
) -> Result<CertificateReport, CertificateError> {
    let threshold = match target {
        TargetClass::Hilbert => 0.5,
        TargetClass::InBounded { delta } => {
            if !(0.0..1.0).contains(&delta) {
                return Err(CertificateError::BadDelta(delta));
            }
            1.0 / (2.0 * (1.0 - delta))
        }
    };
    require_edges_in_faces(cx)?;
    let mut link_gaps = Vec::with_capacity(cx.vertex_count());
    for x in 0..cx.vertex_count() {
        if cx.faces_at_vertex(x).is_empty() {
            return Err(HarmonicError::VertexNotInFace(x).into());
        }
        let link = cx
            .link_of(x)
            .map_err(|_| HarmonicError::VertexNotInFace(x))?;
        let rep = spectral::scalar_spectral_gap(&link.graph)?;
        link_gaps.push(rep.lambda);
    }
    let (binding_vertex, &min_link_gap) = link_gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty complex");
    let granted = min_link_gap > threshold;
    Ok(CertificateReport {
        target,
        threshold,
        min_link_gap,
        binding_vertex,
        link_gaps,
        granted,
        property_t_certified: granted && matches!(target, TargetClass::Hilbert),
    })
}
