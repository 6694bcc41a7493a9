//! Projective-plane incidence graphs over prime fields, generalized-
//! triangle validation, the classical gap formula comparison, and the
//! building-embedding Rayleigh census.
//!
//! The building itself is never constructed; the census only uses the
//! squared distances 1, 3, 4 of the three distance classes of the natural
//! embedding of a vertex link.

use serde::Serialize;
use thiserror::Error;

use crate::complex::WeightedGraph;
use crate::spectral::{self, SpectralError};
use crate::wirtinger::{self, WirtingerError};

#[derive(Debug, Error)]
pub enum IncidenceError {
    #[error("{0} is not prime (prime powers are out of scope)")]
    NotPrime(u64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Wirtinger(#[from] WirtingerError),
    #[error("census mismatch at distance {distance}: counted {found}, expected {expected}")]
    CensusMismatch {
        distance: usize,
        found: usize,
        expected: usize,
    },
    #[error("graph has a pair of vertices at distance {0} > 3")]
    DiameterExceeded(usize),
}

/// Which side of the bipartition a vertex lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Point,
    Line,
}

/// The bipartite incidence graph of the projective plane over the prime
/// field with `p` elements: `2 (p^2 + p + 1)` vertices of valence `p + 1`,
/// unit edge weights.
#[derive(Debug, Clone)]
pub struct IncidenceGraph {
    pub graph: WeightedGraph,
    pub p: u64,
    pub sides: Vec<Side>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Normalized representatives of the 1-dimensional subspaces of F_p^3:
/// (1, y, z), (0, 1, z), (0, 0, 1).
fn projective_reps(p: u64) -> Vec<[u64; 3]> {
    let mut reps = Vec::with_capacity((p * p + p + 1) as usize);
    for y in 0..p {
        for z in 0..p {
            reps.push([1, y, z]);
        }
    }
    for z in 0..p {
        reps.push([0, 1, z]);
    }
    reps.push([0, 0, 1]);
    reps
}

pub fn projective_plane_incidence(p: u64) -> Result<IncidenceGraph, IncidenceError> {
    if !is_prime(p) {
        return Err(IncidenceError::NotPrime(p));
    }
    let reps = projective_reps(p);
    let count = reps.len();
    let mut edges = Vec::with_capacity(count * (p as usize + 1));
    for (i, pt) in reps.iter().enumerate() {
        for (j, ln) in reps.iter().enumerate() {
            let dot = (pt[0] * ln[0] + pt[1] * ln[1] + pt[2] * ln[2]) % p;
            if dot == 0 {
                edges.push((i, count + j, 1.0));
            }
        }
    }
    let graph = WeightedGraph::new(2 * count, edges).expect("valid incidence graph");
    let sides = (0..2 * count)
        .map(|v| if v < count { Side::Point } else { Side::Line })
        .collect();
    Ok(IncidenceGraph { graph, p, sides })
}

/// Witness of a failed generalized-triangle check.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TriangleWitness {
    ShortCycle { cycle: Vec<usize> },
    UncoveredEdgePair {
        first: (usize, usize),
        second: (usize, usize),
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangleCheck {
    pub girth: Option<usize>,
    pub is_generalized_triangle: bool,
    pub witness: Option<TriangleWitness>,
}

/// Girth of a simple graph with a witness cycle, `None` for forests.
/// Parallel edges count as 2-cycles and loops as 1-cycles.
fn girth_with_witness(g: &WeightedGraph) -> Option<(usize, Vec<usize>)> {
    for e in g.edge_items() {
        if e.u == e.v {
            return Some((1, vec![e.u]));
        }
    }
    let mut seen: std::collections::BTreeMap<(usize, usize), usize> =
        std::collections::BTreeMap::new();
    for e in g.edge_items() {
        let key = (e.u.min(e.v), e.u.max(e.v));
        *seen.entry(key).or_insert(0) += 1;
    }
    if let Some(((u, v), _)) = seen.iter().find(|(_, &c)| c > 1) {
        return Some((2, vec![*u, *v]));
    }
    let n = g.vertex_count();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for root in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[root] = 0;
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in g.neighbors(x) {
                if y == x {
                    continue;
                }
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    queue.push_back(y);
                } else if parent[x] != y && parent[y] != x {
                    let len = dist[x] + dist[y] + 1;
                    if best.as_ref().map_or(true, |(b, _)| len < *b) {
                        // Reconstruct the closed walk through the BFS tree.
                        let mut left = vec![x];
                        let mut cur = x;
                        while cur != root {
                            cur = parent[cur];
                            left.push(cur);
                        }
                        let mut right = vec![y];
                        cur = y;
                        while cur != root {
                            cur = parent[cur];
                            right.push(cur);
                        }
                        // Trim the common tail toward the root.
                        while left.len() > 1
                            && right.len() > 1
                            && left[left.len() - 1] == right[right.len() - 1]
                            && left[left.len() - 2] == right[right.len() - 2]
                        {
                            left.pop();
                            right.pop();
                        }
                        left.pop();
                        let mut cycle = left;
                        cycle.extend(right.iter().rev().skip(1));
                        cycle.push(y);
                        cycle.reverse();
                        best = Some((len, cycle));
                    }
                }
            }
        }
    }
    best
}

/// Checks the generalized-triangle property: girth at least 6 and every
/// unordered pair of edges contained in a common 6-cycle.
pub fn generalized_triangle_check(g: &WeightedGraph) -> Result<TriangleCheck, IncidenceError> {
    let girth = girth_with_witness(g);
    if let Some((len, cycle)) = &girth {
        if *len < 6 {
            return Ok(TriangleCheck {
                girth: Some(*len),
                is_generalized_triangle: false,
                witness: Some(TriangleWitness::ShortCycle {
                    cycle: cycle.clone(),
                }),
            });
        }
    }
    // Cover matrix of edge pairs by 6-cycles.
    let edge_id: std::collections::BTreeMap<(usize, usize), usize> = g
        .edge_items()
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.u, e.v), i))
        .collect();
    let ne = g.edge_items().len();
    let mut covered = vec![false; ne * ne];
    let hexagons = wirtinger::enumerate_cycles(g, 6)?;
    for hex in &hexagons {
        let ids: Vec<usize> = (0..6)
            .map(|i| {
                let (a, b) = (hex[i], hex[(i + 1) % 6]);
                edge_id[&(a.min(b), a.max(b))]
            })
            .collect();
        for &x in &ids {
            for &y in &ids {
                covered[x * ne + y] = true;
            }
        }
    }
    for x in 0..ne {
        for y in x..ne {
            if !covered[x * ne + y] {
                let e1 = g.edge_items()[x];
                let e2 = g.edge_items()[y];
                return Ok(TriangleCheck {
                    girth: girth.map(|(l, _)| l),
                    is_generalized_triangle: false,
                    witness: Some(TriangleWitness::UncoveredEdgePair {
                        first: (e1.u, e1.v),
                        second: (e2.u, e2.v),
                    }),
                });
            }
        }
    }
    Ok(TriangleCheck {
        girth: girth.map(|(l, _)| l),
        is_generalized_triangle: true,
        witness: None,
    })
}

/// Distance census of the natural link embedding and both Rayleigh
/// quotients.
#[derive(Debug, Clone, Serialize)]
pub struct BuildingCensus {
    pub p: u64,
    /// Vertex count `n = 2 (p^2 + p + 1)` and valence `d = p + 1`.
    pub n: usize,
    pub valence: usize,
    /// Ordered pair counts at graph distances 1, 2, 3.
    pub ordered_pairs: [usize; 3],
    /// `n d`, `n d (d-1)`, `n (d-1)^2`.
    pub expected_pairs: [usize; 3],
    /// `E = n d / 2`: each edge maps to a unit-distance segment.
    pub energy: f64,
    /// All-pairs dispersion with squared distances 1, 3, 4 per class.
    pub dispersion: f64,
    pub rq_gromov: f64,
    pub closed_form: f64,
    /// Standard quotient from the same census: every vertex at distance 1
    /// from the apex.
    pub rq_standard: f64,
}

pub fn building_embedding_rq(p: u64) -> Result<BuildingCensus, IncidenceError> {
    let inc = projective_plane_incidence(p)?;
    let g = &inc.graph;
    let n = g.vertex_count();
    let d = (p + 1) as usize;
    let mut counts = [0usize; 3];
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[s] = 0;
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in g.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        for (t, &dt) in dist.iter().enumerate() {
            if t == s {
                continue;
            }
            if dt == 0 || dt > 3 {
                return Err(IncidenceError::DiameterExceeded(dt));
            }
            counts[dt - 1] += 1;
        }
    }
    let expected = [n * d, n * d * (d - 1), n * (d - 1) * (d - 1)];
    for i in 0..3 {
        if counts[i] != expected[i] {
            return Err(IncidenceError::CensusMismatch {
                distance: i + 1,
                found: counts[i],
                expected: expected[i],
            });
        }
    }
    let energy = 0.5 * (n * d) as f64;
    // F = (1 / 2 m(0)) sum m(c) m(c') d^2 with m = d everywhere and
    // squared building distances 1, 3, 4 per distance class.
    let m_total = (n * d) as f64;
    let weighted_sum =
        (d * d) as f64 * (counts[0] as f64 + 3.0 * counts[1] as f64 + 4.0 * counts[2] as f64);
    let dispersion = weighted_sum / (2.0 * m_total);
    let rq_gromov = energy / dispersion;
    let pf = p as f64;
    let closed_form = 2.0 * (pf * pf + pf + 1.0) / (7.0 * pf * pf + 4.0 * pf + 1.0);
    // Every link vertex sits at distance 1 from the apex, which is the
    // barycenter by symmetry.
    let rq_standard = energy / m_total;
    Ok(BuildingCensus {
        p,
        n,
        valence: d,
        ordered_pairs: counts,
        expected_pairs: expected,
        energy,
        dispersion,
        rq_gromov,
        closed_form,
        rq_standard,
    })
}

/// Eigensolved gap next to the classical closed form under its two
/// readings of the parameter (field order vs valence). No equality is
/// asserted: the eigensolve is the ground truth.
#[derive(Debug, Clone, Serialize)]
pub struct FeitHigmanReport {
    pub p: u64,
    pub eigensolved: f64,
    /// `1 - sqrt(q - 2) / (q - 1)` with `q` the field order `p`.
    pub formula_field_order: f64,
    /// Same formula with `q` the valence `p + 1`.
    pub formula_valence: f64,
    pub diff_field_order: f64,
    pub diff_valence: f64,
}

pub fn feit_higman_compare(p: u64) -> Result<FeitHigmanReport, IncidenceError> {
    let inc = projective_plane_incidence(p)?;
    let eigensolved = spectral::scalar_spectral_gap(&inc.graph)?.lambda;
    let formula = |q: f64| 1.0 - (q - 2.0).max(0.0).sqrt() / (q - 1.0);
    let formula_field_order = formula(p as f64);
    let formula_valence = formula((p + 1) as f64);
    Ok(FeitHigmanReport {
        p,
        eigensolved,
        formula_field_order,
        formula_valence,
        diff_field_order: (eigensolved - formula_field_order).abs(),
        diff_valence: (eigensolved - formula_valence).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn heawood_structure() {
        let inc = projective_plane_incidence(2).unwrap();
        assert_eq!(inc.graph.vertex_count(), 14);
        assert_eq!(inc.graph.edge_items().len(), 21);
        for x in 0..14 {
            assert_eq!(inc.graph.vertex_weight(x), 3.0);
            assert_eq!(inc.graph.neighbors(x).len(), 3);
        }
        // Bipartite: edges only between sides.
        for e in inc.graph.edge_items() {
            assert_ne!(inc.sides[e.u], inc.sides[e.v]);
        }
    }

    #[test]
    fn p3_structure() {
        let inc = projective_plane_incidence(3).unwrap();
        assert_eq!(inc.graph.vertex_count(), 26);
        assert_eq!(inc.graph.edge_items().len(), 52);
        for x in 0..26 {
            assert_eq!(inc.graph.neighbors(x).len(), 4);
        }
    }

    #[test]
    fn composite_rejected() {
        assert!(matches!(
            projective_plane_incidence(4),
            Err(IncidenceError::NotPrime(4))
        ));
        assert!(matches!(
            projective_plane_incidence(9),
            Err(IncidenceError::NotPrime(9))
        ));
    }

    #[test]
    fn incidence_graphs_are_generalized_triangles() {
        for p in [2u64, 3] {
            let inc = projective_plane_incidence(p).unwrap();
            let check = generalized_triangle_check(&inc.graph).unwrap();
            assert_eq!(check.girth, Some(6));
            assert!(check.is_generalized_triangle, "p = {p}");
        }
    }

    #[test]
    fn hexagon_is_a_generalized_triangle() {
        let check = generalized_triangle_check(&models::cycle_graph(6)).unwrap();
        assert!(check.is_generalized_triangle);
    }

    #[test]
    fn k4_fails_on_girth() {
        let check = generalized_triangle_check(&models::complete_graph(4)).unwrap();
        assert_eq!(check.girth, Some(3));
        assert!(!check.is_generalized_triangle);
        match check.witness {
            Some(TriangleWitness::ShortCycle { cycle }) => assert_eq!(cycle.len(), 3),
            other => panic!("expected short cycle witness, got {other:?}"),
        }
    }

    #[test]
    fn octagon_fails_on_coverage() {
        // Girth 8 >= 6 but no 6-cycles at all.
        let check = generalized_triangle_check(&models::cycle_graph(8)).unwrap();
        assert_eq!(check.girth, Some(8));
        assert!(!check.is_generalized_triangle);
        assert!(matches!(
            check.witness,
            Some(TriangleWitness::UncoveredEdgePair { .. })
        ));
    }

    #[test]
    fn census_p2() {
        let census = building_embedding_rq(2).unwrap();
        assert_eq!(census.ordered_pairs, [42, 84, 56]);
        assert_eq!(census.ordered_pairs.iter().sum::<usize>(), 14 * 13);
        assert!((census.rq_gromov - 14.0 / 37.0).abs() < 1e-12);
        assert!((census.rq_gromov - census.closed_form).abs() < 1e-12);
        assert!((census.rq_standard - 0.5).abs() < 1e-12);
    }

    #[test]
    fn census_p3() {
        let census = building_embedding_rq(3).unwrap();
        assert!((census.rq_gromov - 26.0 / 76.0).abs() < 1e-12);
        assert!((census.rq_standard - 0.5).abs() < 1e-12);
    }

    #[test]
    fn feit_higman_values() {
        let r = feit_higman_compare(2).unwrap();
        assert!((r.eigensolved - (1.0 - 2.0f64.sqrt() / 3.0)).abs() < 1e-9);
        assert!((r.formula_valence - 0.5).abs() < 1e-12);
        assert!(r.eigensolved > 0.5);

        let r3 = feit_higman_compare(3).unwrap();
        assert!((r3.eigensolved - (1.0 - 3.0f64.sqrt() / 4.0)).abs() < 1e-9);
        assert!(r3.eigensolved > 0.5);
    }
}
