//! Seeded random models: permutation-model regular multigraphs with
//! spectral statistics, and density-model random presentations with the
//! link-graph property-(T) verdict.
//!
//! All sampling runs on a counter-based stream cipher generator
//! (ChaCha8): sample `i` of a batch uses the master seed with stream `i`,
//! so parallel and serial runs agree bit for bit.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::complex::WeightedGraph;
use crate::spectral::{self, SpectralError};

#[derive(Debug, Error)]
pub enum RandomGenError {
    #[error("need m >= 2 generators, got {0}")]
    TooFewGenerators(usize),
    #[error("density must lie in (0, 1), got {0}")]
    BadDensity(f64),
    #[error("requested {requested} relators but only {pool} cyclically reduced words exist")]
    TooManyRelators { requested: usize, pool: usize },
    #[error("need n >= 1 and d >= 1, got n={n}, d={d}")]
    BadPermutationParams { n: usize, d: usize },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PermutationModelParams {
    /// Vertex count.
    pub n: usize,
    /// Number of permutations; the sampled multigraph is 2d-regular.
    pub d: usize,
    pub seed: u64,
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The multigraph with one edge `{s, sigma_i(s)}` per permutation and
/// vertex; loops at fixed points. Every vertex has weighted degree exactly
/// `2d`, loops counted twice.
pub fn graph_from_permutations(n: usize, perms: &[Vec<usize>]) -> WeightedGraph {
    let mut edges = Vec::with_capacity(n * perms.len());
    for sigma in perms {
        for s in 0..n {
            edges.push((s, sigma[s], 1.0));
        }
    }
    WeightedGraph::new(n, edges).expect("permutation image in range")
}

/// Samples `d` uniform permutations (Fisher-Yates on the seeded stream)
/// and assembles the 2d-regular multigraph.
pub fn permutation_model_graph(
    params: &PermutationModelParams,
) -> Result<WeightedGraph, RandomGenError> {
    permutation_model_sample(params, 0)
}

/// Sample `index` of a batch: the same seed on stream `index`.
pub fn permutation_model_sample(
    params: &PermutationModelParams,
    stream: u64,
) -> Result<WeightedGraph, RandomGenError> {
    if params.n < 1 || params.d < 1 {
        return Err(RandomGenError::BadPermutationParams {
            n: params.n,
            d: params.d,
        });
    }
    let mut rng = sample_rng(params.seed, stream);
    let mut perms = Vec::with_capacity(params.d);
    for _ in 0..params.d {
        let mut perm: Vec<usize> = (0..params.n).collect();
        perm.shuffle(&mut rng);
        perms.push(perm);
    }
    Ok(graph_from_permutations(params.n, &perms))
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralStatistics {
    pub params: PermutationModelParams,
    pub samples: usize,
    /// Per-sample gaps, ordered by sample index.
    pub lambdas: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub variance: f64,
    /// Caller-supplied constant of the refined threshold.
    pub friedman_c: f64,
    /// `1 - (sqrt(2d-1)/d + ln(2d)/(2d) + c/d)`.
    pub friedman_threshold: f64,
    pub fraction_above_threshold: f64,
    /// Asymptotic regular-tree reference `1 - 2 sqrt(2d-1) / (2d)`.
    pub tree_reference: f64,
}

/// Samples `samples` graphs (streams `0..samples` of the seed) and reports
/// gap statistics.
pub fn spectral_statistics(
    params: &PermutationModelParams,
    samples: usize,
    friedman_c: f64,
) -> Result<SpectralStatistics, SpectralError> {
    assert!(samples >= 1, "need at least one sample");
    let lambdas: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let g = permutation_model_sample(params, i as u64)
                .expect("validated params");
            if !g.is_connected() {
                return Ok(0.0);
            }
            Ok(spectral::scalar_spectral_gap(&g)?.lambda)
        })
        .collect::<Result<_, SpectralError>>()?;
    let d = params.d as f64;
    let mean = lambdas.iter().sum::<f64>() / samples as f64;
    let min = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let max = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let variance =
        lambdas.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / samples as f64;
    let tree_reference = 1.0 - 2.0 * (2.0 * d - 1.0).sqrt() / (2.0 * d);
    let friedman_threshold =
        1.0 - ((2.0 * d - 1.0).sqrt() / d + (2.0 * d).ln() / (2.0 * d) + friedman_c / d);
    let fraction_above_threshold = lambdas
        .iter()
        .filter(|&&l| l >= friedman_threshold)
        .count() as f64
        / samples as f64;
    Ok(SpectralStatistics {
        params: *params,
        samples,
        lambdas,
        mean,
        min,
        max,
        variance,
        friedman_c,
        friedman_threshold,
        fraction_above_threshold,
        tree_reference,
    })
}

/// A letter is an index in `0..2m`: `x < m` is the generator `s_{x+1}`,
/// `x >= m` its inverse.
pub fn inverse_letter(x: usize, m: usize) -> usize {
    (x + m) % (2 * m)
}

/// A random presentation of the length-3 density model.
#[derive(Debug, Clone, Serialize)]
pub struct Presentation {
    pub generator_count: usize,
    pub density: f64,
    pub seed: u64,
    /// Cyclically reduced length-3 words, lexicographically sorted.
    pub relators: Vec<[usize; 3]>,
}

/// Relator budget `N = round((2m / (2m-1)) (2m-1)^{3 d})`, ties rounded
/// up.
pub fn relator_budget(m: usize, density: f64) -> usize {
    let q = (2 * m - 1) as f64;
    let raw = (2.0 * m as f64 / q) * q.powf(3.0 * density);
    raw.round() as usize
}

/// All cyclically reduced length-3 words over `2m` letters, in
/// lexicographic order: no `x x^{-1}` step and last letter not inverse to
/// the first.
pub fn cyclically_reduced_words(m: usize) -> Vec<[usize; 3]> {
    let a = 2 * m;
    let mut out = Vec::new();
    for w1 in 0..a {
        for w2 in 0..a {
            if w2 == inverse_letter(w1, m) {
                continue;
            }
            for w3 in 0..a {
                if w3 == inverse_letter(w2, m) || w3 == inverse_letter(w1, m) {
                    continue;
                }
                out.push([w1, w2, w3]);
            }
        }
    }
    out
}

/// Samples `N(m, d)` distinct cyclically reduced relators uniformly
/// without replacement. Words are distinct as written; no quotient by
/// rotation or inversion is taken.
pub fn density_presentation(
    m: usize,
    density: f64,
    seed: u64,
) -> Result<Presentation, RandomGenError> {
    density_presentation_sample(m, density, seed, 0)
}

/// Sample `index` of a batch: the same seed on stream `index`.
pub fn density_presentation_sample(
    m: usize,
    density: f64,
    seed: u64,
    stream: u64,
) -> Result<Presentation, RandomGenError> {
    if m < 2 {
        return Err(RandomGenError::TooFewGenerators(m));
    }
    if !(density > 0.0 && density < 1.0) {
        return Err(RandomGenError::BadDensity(density));
    }
    let pool = cyclically_reduced_words(m);
    let budget = relator_budget(m, density);
    if budget > pool.len() {
        return Err(RandomGenError::TooManyRelators {
            requested: budget,
            pool: pool.len(),
        });
    }
    let mut rng = sample_rng(seed, stream);
    let chosen = rand::seq::index::sample(&mut rng, pool.len(), budget);
    let mut relators: Vec<[usize; 3]> = chosen.iter().map(|i| pool[i]).collect();
    relators.sort_unstable();
    Ok(Presentation {
        generator_count: m,
        density,
        seed,
        relators,
    })
}

/// The link graph on `S u S^{-1}`: for each relator `z1 z2 z3`, the three
/// readings of the edge rule contribute the edges `{z1^{-1}, z2}`,
/// `{z2, z3}` and `{z3, z1^{-1}}`, with multiplicity accumulating across
/// relators and readings.
pub fn link_graph_of_presentation(pres: &Presentation) -> WeightedGraph {
    let m = pres.generator_count;
    let mut edges = Vec::with_capacity(3 * pres.relators.len());
    for w in &pres.relators {
        let inv1 = inverse_letter(w[0], m);
        edges.push((inv1, w[1], 1.0));
        edges.push((w[1], w[2], 1.0));
        edges.push((w[2], inv1, 1.0));
    }
    WeightedGraph::new(2 * m, edges).expect("letters in range")
}

#[derive(Debug, Clone, Serialize)]
pub struct ZukVerdict {
    pub generator_count: usize,
    pub density: f64,
    pub seed: u64,
    pub relator_count: usize,
    pub connected: bool,
    /// Gap of the link graph; 0 when disconnected (including isolated
    /// letters).
    pub lambda: f64,
    /// Granted iff the link graph is connected with gap strictly above
    /// 1/2. A refusal asserts nothing about the group.
    pub certified: bool,
}

pub fn zuk_verdict(pres: &Presentation) -> Result<ZukVerdict, SpectralError> {
    let g = link_graph_of_presentation(pres);
    let isolated = (0..g.vertex_count()).any(|x| !(g.vertex_weight(x) > 0.0));
    let (connected, lambda) = if isolated || !g.is_connected() {
        (false, 0.0)
    } else {
        let rep = spectral::scalar_spectral_gap(&g)?;
        (rep.connected, rep.lambda)
    };
    Ok(ZukVerdict {
        generator_count: pres.generator_count,
        density: pres.density,
        seed: pres.seed,
        relator_count: pres.relators.len(),
        connected,
        lambda,
        certified: connected && lambda > 0.5,
    })
}

/// Batch of verdicts over streams `0..samples` of the seed, ordered by
/// sample index.
pub fn zuk_verdict_batch(
    m: usize,
    density: f64,
    seed: u64,
    samples: usize,
) -> Result<Vec<ZukVerdict>, RandomGenError> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let pres = density_presentation_sample(m, density, seed, i as u64)?;
            Ok(zuk_verdict(&pres).expect("verdict never eigensolves singular graphs"))
        })
        .collect()
}
