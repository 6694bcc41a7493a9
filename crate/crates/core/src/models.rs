//! Small standard graphs and complexes used across the test-bed and CLI.

use crate::complex::{propagate_weights, WeightedComplex, WeightedGraph};

/// The k-cycle with unit edge weights (vertex weights 2).
pub fn cycle_graph(k: usize) -> WeightedGraph {
    assert!(k >= 3, "cycle needs k >= 3");
    let edges = (0..k).map(|i| (i, (i + 1) % k, 1.0)).collect();
    WeightedGraph::new(k, edges).expect("valid cycle")
}

/// The path on `k` vertices with unit edge weights.
pub fn path_graph(k: usize) -> WeightedGraph {
    assert!(k >= 2, "path needs k >= 2");
    let edges = (0..k - 1).map(|i| (i, i + 1, 1.0)).collect();
    WeightedGraph::new(k, edges).expect("valid path")
}

/// The complete graph on `n` vertices with unit edge weights.
pub fn complete_graph(n: usize) -> WeightedGraph {
    assert!(n >= 2);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((i, j, 1.0));
        }
    }
    WeightedGraph::new(n, edges).expect("valid complete graph")
}

/// Two disjoint unit-weight edges on four vertices.
pub fn two_disjoint_edges() -> WeightedGraph {
    WeightedGraph::new(4, vec![(0, 1, 1.0), (2, 3, 1.0)]).expect("valid")
}

/// Two vertices joined by a double edge.
pub fn double_edge() -> WeightedGraph {
    WeightedGraph::new(2, vec![(0, 1, 1.0), (0, 1, 1.0)]).expect("valid")
}

/// Vertex id of lattice point `(i, j)` on the 3x3 torus.
pub fn torus_vertex(i: usize, j: usize) -> usize {
    3 * (i % 3) + (j % 3)
}

/// The 3x3 equilateral torus triangulation: 9 vertices, 27 edges, 18 unit
/// faces. Every edge lies in exactly two faces, every link is a hexagon.
pub fn torus_3x3() -> WeightedComplex {
    let mut faces = Vec::with_capacity(18);
    for i in 0..3 {
        for j in 0..3 {
            let a = torus_vertex(i, j);
            let b = torus_vertex(i + 1, j);
            let c = torus_vertex(i, j + 1);
            let d = torus_vertex(i + 1, j + 1);
            faces.push([a, b, c]);
            faces.push([b, c, d]);
        }
    }
    propagate_weights(&faces, None).expect("valid torus")
}

/// Translation cocycle of the equilateral lattice on [`torus_3x3`]: unit
/// generators at 60 degrees. Vectors are aligned with the complex's stored
/// edge order and oriented from the smaller to the larger vertex id.
pub fn torus_lattice_cocycle(torus: &WeightedComplex) -> Vec<Vec<f64>> {
    let gen_a = [1.0, 0.0];
    let gen_b = [0.5, 3.0f64.sqrt() / 2.0];
    let diag = [gen_b[0] - gen_a[0], gen_b[1] - gen_a[1]];
    let mut oriented: std::collections::BTreeMap<(usize, usize), [f64; 2]> =
        std::collections::BTreeMap::new();
    let mut put = |from: usize, to: usize, vec: [f64; 2]| {
        if from < to {
            oriented.insert((from, to), vec);
        } else {
            oriented.insert((to, from), [-vec[0], -vec[1]]);
        }
    };
    for i in 0..3 {
        for j in 0..3 {
            let here = torus_vertex(i, j);
            put(here, torus_vertex(i + 1, j), gen_a);
            put(here, torus_vertex(i, j + 1), gen_b);
            put(torus_vertex(i + 1, j), torus_vertex(i, j + 1), diag);
        }
    }
    torus
        .edges()
        .iter()
        .map(|e| oriented[e].to_vec())
        .collect()
}

/// The icosahedron boundary: 12 vertices, 20 unit faces, every link a
/// pentagon.
pub fn icosahedron() -> WeightedComplex {
    let mut faces: Vec<[usize; 3]> = Vec::with_capacity(20);
    // Top cap around vertex 0 (ring 1..=5), bottom cap around 11 (ring
    // 6..=10), antiprism band between the rings.
    for i in 0..5 {
        let a = 1 + i;
        let b = 1 + (i + 1) % 5;
        let c = 6 + i;
        let d = 6 + (i + 1) % 5;
        faces.push([0, a, b]);
        faces.push([a, c, b]);
        faces.push([b, c, d]);
        faces.push([11, c, d]);
    }
    propagate_weights(&faces, None).expect("valid icosahedron")
}

/// The octahedron boundary: 6 vertices, 8 unit faces, every link a square.
pub fn octahedron() -> WeightedComplex {
    let faces = [
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [0, 2, 5],
        [2, 1, 5],
        [1, 3, 5],
        [3, 0, 5],
    ];
    propagate_weights(&faces, None).expect("valid octahedron")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_weights_from_incidence_census() {
        let t = torus_3x3();
        assert_eq!(t.vertex_count(), 9);
        assert_eq!(t.faces().len(), 18);
        assert_eq!(t.edges().len(), 27);
        for &w in t.edge_weights() {
            assert_eq!(w, 2.0);
        }
        for x in 0..9 {
            assert_eq!(t.vertex_weight(x), 12.0);
        }
        assert!(t.validate().is_empty());
        assert!(t.every_edge_in_a_face());
    }

    #[test]
    fn torus_links_are_hexagons() {
        let t = torus_3x3();
        for x in 0..9 {
            let link = t.link_of(x).unwrap();
            assert_eq!(link.vertices.len(), 6);
            assert_eq!(link.graph.edge_items().len(), 6);
            for e in link.graph.edge_items() {
                assert_eq!(e.weight, 1.0);
            }
            for v in 0..6 {
                assert_eq!(link.graph.vertex_weight(v), 2.0);
                assert_eq!(link.graph.neighbors(v).len(), 2);
            }
            assert!(link.graph.is_connected());
        }
    }

    #[test]
    fn torus_cocycle_is_face_closed() {
        let t = torus_3x3();
        let c = torus_lattice_cocycle(&t);
        for (fi, tri) in t.faces().iter().enumerate() {
            let _ = fi;
            let get = |a: usize, b: usize| -> [f64; 2] {
                let idx = t.edge_index(a, b).unwrap();
                let (u, _v) = t.edges()[idx];
                let v = &c[idx];
                if a == u {
                    [v[0], v[1]]
                } else {
                    [-v[0], -v[1]]
                }
            };
            let ab = get(tri[0], tri[1]);
            let bc = get(tri[1], tri[2]);
            let ca = get(tri[2], tri[0]);
            assert!((ab[0] + bc[0] + ca[0]).abs() < 1e-12);
            assert!((ab[1] + bc[1] + ca[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn icosahedron_links_are_pentagons() {
        let ico = icosahedron();
        assert_eq!(ico.vertex_count(), 12);
        assert_eq!(ico.faces().len(), 20);
        assert_eq!(ico.edges().len(), 30);
        assert!(ico.validate().is_empty());
        for x in 0..12 {
            let link = ico.link_of(x).unwrap();
            assert_eq!(link.vertices.len(), 5);
            assert_eq!(link.graph.edge_items().len(), 5);
            for v in 0..5 {
                assert_eq!(link.graph.neighbors(v).len(), 2);
            }
            assert!(link.graph.is_connected());
        }
    }

    #[test]
    fn octahedron_links_are_squares() {
        let oct = octahedron();
        assert!(oct.validate().is_empty());
        for x in 0..6 {
            let link = oct.link_of(x).unwrap();
            assert_eq!(link.vertices.len(), 4);
            assert_eq!(link.graph.edge_items().len(), 4);
            for v in 0..4 {
                assert_eq!(link.graph.neighbors(v).len(), 2);
            }
            assert!(link.graph.is_connected());
        }
    }
}
