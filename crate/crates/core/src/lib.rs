//! Combinatorial harmonic-map and spectral-gap machinery on weighted
//! simplicial complexes of dimension <= 2.
//!
//! The crate provides, roughly bottom-up:
//!
//! - [`complex`] — weighted complexes and graphs with the weight-propagation
//!   identity, vertex links, validation.
//! - [`spectral`] — scalar spectral gaps of weighted graphs, Rayleigh
//!   quotients (standard and all-pairs "Gromov" form), trace-method bounds.
//! - [`cat0`] — CAT(0) model targets (Euclidean spaces, metric trees,
//!   products): distances, geodesics, barycenters, tangent-cone stars,
//!   polygon closings and Izeki-Nayatani bound calculators.
//! - [`harmonic`] — energies of vertex maps, the discrete Laplacian, a
//!   synchronous descent flow, a twisted Euclidean harmonic solver, Garland
//!   identity/inequality checkers and fixed-point certificates.
//! - [`wirtinger`] — Wirtinger constants and inequalities on cycles,
//!   distance-j energies, loop-family averaging certificates.
//! - [`incidence`] — projective-plane incidence graphs, generalized-triangle
//!   validation and the building-embedding Rayleigh census.
//! - [`randomgen`] — seeded permutation-model regular multigraphs and
//!   density-model random presentations with the link-graph verdict.
//! - [`io`] — line-oriented text formats for graphs, complexes and trees.
//! - [`models`] — small standard complexes and graphs used throughout the
//!   test-bed (cycles, the 3x3 equilateral torus, platonic boundaries).

pub mod cat0;
pub mod complex;
pub mod harmonic;
pub mod incidence;
pub mod io;
pub mod linalg;
pub mod models;
pub mod randomgen;
pub mod spectral;
pub mod wirtinger;
