//! Scalar spectral gaps, Rayleigh quotients (standard and all-pairs forms)
//! and the trace-method lower bound.
//!
//! The scalar gap of a weighted graph is the second-smallest eigenvalue of
//! the generalized problem `L g = lambda D g` with `L` the weighted graph
//! Laplacian and `D = diag(vertexWeight)`; equivalently the spectrum of the
//! symmetric normalized Laplacian `I - D^{-1/2} W D^{-1/2}`, which lies in
//! `[0, 2]`. Loops contribute 2 to the vertex weight and nothing to `L`, so
//! the random-walk matrix keeps a positive diagonal entry for them.

use serde::Serialize;
use thiserror::Error;

use crate::cat0::{self, Cat0Error, WeightedPointSet};
use crate::complex::WeightedGraph;
use crate::harmonic::{self, HarmonicError, VertexMap};
use crate::linalg::{self, LinalgError};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} is isolated (weight 0), normalized Laplacian undefined")]
    IsolatedVertex(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("zero denominator: map is constant")]
    ConstantMap,
    #[error("map has {points} points but graph has {vertices} vertices")]
    SizeMismatch { points: usize, vertices: usize },
    #[error("k must satisfy {0}")]
    BadParameter(&'static str),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cat0(#[from] Cat0Error),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
}

/// How a spectral quantity was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    Dense,
    TraceBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    /// Second-smallest generalized eigenvalue; 0 for disconnected graphs.
    pub lambda: f64,
    /// Full spectrum, sorted ascending.
    pub spectrum: Vec<f64>,
    pub connected: bool,
    pub method: SpectralMethod,
}

/// Symmetric normalized Laplacian as a flat row-major matrix.
fn normalized_laplacian(g: &WeightedGraph) -> Result<Vec<f64>, SpectralError> {
    let n = g.vertex_count();
    let mut inv_sqrt = vec![0.0; n];
    for x in 0..n {
        let w = g.vertex_weight(x);
        if !(w > 0.0) {
            return Err(SpectralError::IsolatedVertex(x));
        }
        inv_sqrt[x] = 1.0 / w.sqrt();
    }
    let mut a = vec![0.0; n * n];
    for x in 0..n {
        a[x * n + x] = 1.0;
        for &(y, w) in g.neighbors(x) {
            a[x * n + y] -= w * inv_sqrt[x] * inv_sqrt[y];
        }
    }
    Ok(a)
}

/// Second-smallest eigenvalue of the weighted Laplacian pencil, with the
/// full spectrum and a connectivity flag. Disconnected graphs report
/// `lambda = 0`.
pub fn scalar_spectral_gap(g: &WeightedGraph) -> Result<SpectralReport, SpectralError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(SpectralError::TooFewVertices(n));
    }
    let a = normalized_laplacian(g)?;
    let spectrum = linalg::symmetric_eigenvalues(n, a)?;
    let connected = g.is_connected();
    let lambda = if connected {
        spectrum[1].max(0.0)
    } else {
        0.0
    };
    Ok(SpectralReport {
        lambda,
        spectrum,
        connected,
        method: SpectralMethod::Dense,
    })
}

/// `lambda(C_k, R) = 1/2 |1 - e^{2 i pi / k}|^2 = 1 - cos(2 pi / k)`.
pub fn cycle_gap_closed_form(k: usize) -> Result<f64, SpectralError> {
    if k < 3 {
        return Err(SpectralError::BadParameter("k >= 3"));
    }
    Ok(1.0 - (2.0 * std::f64::consts::PI / k as f64).cos())
}

/// Rayleigh quotient `E(g) / d(g, bar(g))^2` of a nonconstant map.
pub fn rayleigh_quotient(g: &WeightedGraph, map: &VertexMap) -> Result<f64, SpectralError> {
    let n = g.vertex_count();
    if map.points.len() != n {
        return Err(SpectralError::SizeMismatch {
            points: map.points.len(),
            vertices: n,
        });
    }
    let energy = harmonic::energy(g, map, None)?;
    let pts = WeightedPointSet {
        points: map.points.clone(),
        weights: (0..n).map(|x| g.vertex_weight(x)).collect(),
    };
    let bar = cat0::barycenter(&map.space, &pts)?;
    let mut denom = 0.0;
    for x in 0..n {
        let d = cat0::distance(&map.space, &map.points[x], &bar)?;
        denom += g.vertex_weight(x) * d * d;
    }
    if denom <= 1e-24 {
        return Err(SpectralError::ConstantMap);
    }
    Ok(energy / denom)
}

/// All-pairs Rayleigh quotient `E(g) / F(g)` with
/// `F(g) = (1 / 2 m(0)) sum_{c, c'} m(c) m(c') d(g(c), g(c'))^2`.
pub fn gromov_rayleigh(g: &WeightedGraph, map: &VertexMap) -> Result<f64, SpectralError> {
    let n = g.vertex_count();
    if map.points.len() != n {
        return Err(SpectralError::SizeMismatch {
            points: map.points.len(),
            vertices: n,
        });
    }
    let energy = harmonic::energy(g, map, None)?;
    let total = g.total_vertex_weight();
    let mut dispersion = 0.0;
    for c in 0..n {
        for c2 in (c + 1)..n {
            let d = cat0::distance(&map.space, &map.points[c], &map.points[c2])?;
            dispersion += 2.0 * g.vertex_weight(c) * g.vertex_weight(c2) * d * d;
        }
    }
    let f = dispersion / (2.0 * total);
    if f <= 1e-24 {
        return Err(SpectralError::ConstantMap);
    }
    Ok(energy / f)
}

/// Trace-method lower bound `1 - (tr(P^{2k}) - 1)^{1/2k}` on the gap of a
/// connected graph, with `P` the random-walk transition matrix.
pub fn trace_method_gap_bound(g: &WeightedGraph, k: usize) -> Result<f64, SpectralError> {
    if k < 1 {
        return Err(SpectralError::BadParameter("k >= 1"));
    }
    let n = g.vertex_count();
    if n < 2 {
        return Err(SpectralError::TooFewVertices(n));
    }
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    let mut inv_sqrt = vec![0.0; n];
    for x in 0..n {
        let w = g.vertex_weight(x);
        if !(w > 0.0) {
            return Err(SpectralError::IsolatedVertex(x));
        }
        inv_sqrt[x] = 1.0 / w.sqrt();
    }
    // tr(P^{2k}) = tr(M^{2k}) = sum_i |M^k e_i|^2 for the symmetrized
    // random-walk matrix M = D^{-1/2} W D^{-1/2}; per-column sparse matvecs
    // keep this O(n k |E|).
    let mut trace = 0.0;
    let mut col = vec![0.0; n];
    let mut next = vec![0.0; n];
    for i in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[i] = 1.0;
        for _ in 0..k {
            next.iter_mut().for_each(|v| *v = 0.0);
            for (x, nx) in next.iter_mut().enumerate() {
                let mut acc = 0.0;
                for &(y, w) in g.neighbors(x) {
                    acc += w * inv_sqrt[x] * inv_sqrt[y] * col[y];
                }
                *nx = acc;
            }
            std::mem::swap(&mut col, &mut next);
        }
        trace += col.iter().map(|v| v * v).sum::<f64>();
    }
    let rest = (trace - 1.0).max(0.0);
    Ok(1.0 - rest.powf(1.0 / (2.0 * k as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat0::{TargetPoint, TargetSpace};
    use crate::models;

    fn euclidean_map(dim: usize, coords: &[&[f64]]) -> VertexMap {
        VertexMap {
            space: TargetSpace::Euclidean { dim },
            points: coords
                .iter()
                .map(|c| TargetPoint::Euclidean { coords: c.to_vec() })
                .collect(),
        }
    }

    #[test]
    fn cycle_gaps_match_closed_form() {
        assert!((cycle_gap_closed_form(6).unwrap() - 0.5).abs() < 1e-15);
        assert!((cycle_gap_closed_form(4).unwrap() - 1.0).abs() < 1e-15);
        assert!((cycle_gap_closed_form(3).unwrap() - 1.5).abs() < 1e-15);
        for k in [3usize, 4, 5, 6, 7, 12, 33] {
            let rep = scalar_spectral_gap(&models::cycle_graph(k)).unwrap();
            assert!(rep.connected);
            assert!(
                (rep.lambda - cycle_gap_closed_form(k).unwrap()).abs() < 1e-10,
                "k={k}"
            );
        }
    }

    #[test]
    fn disconnected_graph_reports_zero() {
        let rep = scalar_spectral_gap(&models::two_disjoint_edges()).unwrap();
        assert_eq!(rep.lambda, 0.0);
        assert!(!rep.connected);
    }

    #[test]
    fn heawood_gap() {
        // Fano incidence: lines {i, i+1, i+3} mod 7; points 0..7, lines 7..14.
        let mut edges = Vec::new();
        for line in 0..7usize {
            for d in [0usize, 1, 3] {
                edges.push(((line + d) % 7, 7 + line, 1.0));
            }
        }
        let g = WeightedGraph::new(14, edges).unwrap();
        let rep = scalar_spectral_gap(&g).unwrap();
        let expected = 1.0 - 2.0f64.sqrt() / 3.0;
        assert!((rep.lambda - expected).abs() < 1e-10, "{}", rep.lambda);
    }

    #[test]
    fn spectrum_bounds_and_zero_mode() {
        for g in [
            models::cycle_graph(5),
            models::complete_graph(6),
            models::double_edge(),
            models::path_graph(7),
        ] {
            let rep = scalar_spectral_gap(&g).unwrap();
            assert!(rep.spectrum[0].abs() < 1e-8);
            for &v in &rep.spectrum {
                assert!(v > -1e-9 && v < 2.0 + 1e-9);
            }
        }
    }

    #[test]
    fn rayleigh_quotient_on_c4() {
        let g = models::cycle_graph(4);
        let map = euclidean_map(1, &[&[1.0], &[0.0], &[-1.0], &[0.0]]);
        let rq = rayleigh_quotient(&g, &map).unwrap();
        assert!((rq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_quotient_of_eigenvector_is_lambda() {
        let g = models::cycle_graph(5);
        let n = g.vertex_count();
        // Generalized eigenvector via the symmetric form: L_sym u = mu u,
        // g = D^{-1/2} u.
        let a = super::normalized_laplacian(&g).unwrap();
        let (vals, vecs) = crate::linalg::symmetric_eigen_jacobi(n, a).unwrap();
        let mu = vals[1];
        let coords: Vec<Vec<f64>> = (0..n)
            .map(|x| vec![vecs[1][x] / g.vertex_weight(x).sqrt()])
            .collect();
        let map = VertexMap {
            space: TargetSpace::Euclidean { dim: 1 },
            points: coords
                .into_iter()
                .map(|c| TargetPoint::Euclidean { coords: c })
                .collect(),
        };
        let rq = rayleigh_quotient(&g, &map).unwrap();
        assert!((rq - mu).abs() < 1e-8, "rq={rq} mu={mu}");
    }

    #[test]
    fn regular_hexagon_is_an_eigenmap() {
        let g = models::cycle_graph(6);
        let coords: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / 3.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let map = VertexMap {
            space: TargetSpace::Euclidean { dim: 2 },
            points: coords
                .into_iter()
                .map(|c| TargetPoint::Euclidean { coords: c })
                .collect(),
        };
        assert!((rayleigh_quotient(&g, &map).unwrap() - 0.5).abs() < 1e-12);
        assert!((gromov_rayleigh(&g, &map).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gromov_quotient_examples() {
        let g = models::cycle_graph(4);
        let map = euclidean_map(1, &[&[1.0], &[0.0], &[-1.0], &[0.0]]);
        assert!((gromov_rayleigh(&g, &map).unwrap() - 1.0).abs() < 1e-12);

        let two = WeightedGraph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let map = euclidean_map(1, &[&[0.0], &[1.0]]);
        assert!((gromov_rayleigh(&two, &map).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_map_rejected() {
        let g = models::cycle_graph(4);
        let map = euclidean_map(1, &[&[2.0], &[2.0], &[2.0], &[2.0]]);
        assert!(matches!(
            rayleigh_quotient(&g, &map),
            Err(SpectralError::ConstantMap)
        ));
        assert!(matches!(
            gromov_rayleigh(&g, &map),
            Err(SpectralError::ConstantMap)
        ));
    }

    #[test]
    fn trace_bound_examples() {
        // Double edge: P^2 = I, so the bound is 0 while lambda = 2.
        for k in 1..5 {
            let b = trace_method_gap_bound(&models::double_edge(), k).unwrap();
            assert!(b.abs() < 1e-12);
        }
        // C4: eigenvalues of P are {1, 0, 0, -1}; bound 0, true gap 1.
        let b = trace_method_gap_bound(&models::cycle_graph(4), 2).unwrap();
        assert!(b.abs() < 1e-12);
        // The bound never exceeds the eigensolved gap.
        for k in [1usize, 2, 3, 5] {
            for g in [
                models::cycle_graph(5),
                models::complete_graph(7),
                models::path_graph(6),
            ] {
                let b = trace_method_gap_bound(&g, k).unwrap();
                let lam = scalar_spectral_gap(&g).unwrap().lambda;
                assert!(b <= lam + 1e-10, "k={k} b={b} lam={lam}");
            }
        }
    }

    #[test]
    fn trace_bound_rejects_disconnected() {
        assert!(matches!(
            trace_method_gap_bound(&models::two_disjoint_edges(), 2),
            Err(SpectralError::Disconnected)
        ));
    }

    #[test]
    fn too_few_vertices() {
        let g = WeightedGraph::new(1, vec![(0, 0, 1.0)]).unwrap();
        assert!(matches!(
            scalar_spectral_gap(&g),
            Err(SpectralError::TooFewVertices(1))
        ));
    }
}
