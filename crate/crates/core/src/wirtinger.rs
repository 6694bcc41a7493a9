//! Wirtinger constants and inequalities on cycles, distance-j energies,
//! the cycle bound for the all-pairs spectral quantity, and loop-family
//! averaging certificates.
//!
//! `E_j` counts each unordered distance-j pair once. The antipodal class
//! `j = k/2` of an even cycle then carries half the mass of the stepped
//! (ordered) form used by the Fourier diagonalization, so the sharp
//! reference for the inequality at `j = k/2` is `W(k, k/2) / 2`; the same
//! halving appears as the count doubling inside the averaging certificate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cat0::{self, TargetSpace};
use crate::complex::WeightedGraph;
use crate::harmonic::VertexMap;

#[derive(Debug, Error)]
pub enum WirtingerError {
    #[error("{0}")]
    BadParameter(String),
    #[error("map is constant")]
    ConstantMap,
    #[error("loop {index} is invalid: {reason}")]
    BadLoop { index: usize, reason: String },
    #[error("host must carry uniform unit edge weights")]
    NonUniformHost,
    #[error("host graph is disconnected")]
    Disconnected,
    #[error("family is not distance-regular: pair ({u}, {v}) at distance {dist} lies in {found} cycles, expected {expected}")]
    NotDistanceRegular {
        u: usize,
        v: usize,
        dist: usize,
        found: usize,
        expected: usize,
    },
    #[error("graph has {0} vertices, beyond the enumeration cap {1}")]
    TooLargeForEnumeration(usize, usize),
    #[error(transparent)]
    Cat0(#[from] cat0::Cat0Error),
}

/// `W(k, j) = 4 k sin^2(pi j / k)`.
pub fn wirtinger_constant(k: usize, j: usize) -> Result<f64, WirtingerError> {
    if k < 1 || j < 1 || j > k {
        return Err(WirtingerError::BadParameter(format!(
            "need 1 <= j <= k, got k={k}, j={j}"
        )));
    }
    let s = (std::f64::consts::PI * j as f64 / k as f64).sin();
    Ok(4.0 * k as f64 * s * s)
}

/// Sharp per-class reference: `W(k, j)` for `j < k/2`, halved on the
/// antipodal class of an even cycle.
pub fn wirtinger_reference(k: usize, j: usize) -> Result<f64, WirtingerError> {
    let w = wirtinger_constant(k, j)?;
    Ok(if 2 * j == k { w / 2.0 } else { w })
}

/// `E_j(g) = 1/2 sum_c sum_{d(c, c') = j} d(g(c), g(c'))^2` on the k-cycle,
/// each unordered pair counted once.
pub fn distance_j_energy(map: &VertexMap, j: usize) -> Result<f64, WirtingerError> {
    let k = map.points.len();
    if k < 3 {
        return Err(WirtingerError::BadParameter(format!(
            "cycle map needs k >= 3 points, got {k}"
        )));
    }
    if j < 1 || 2 * j > k {
        return Err(WirtingerError::BadParameter(format!(
            "need 1 <= j <= floor(k/2), got j={j}, k={k}"
        )));
    }
    let upper = if 2 * j == k { k / 2 } else { k };
    let mut sum = 0.0;
    for i in 0..upper {
        let d = cat0::distance(&map.space, &map.points[i], &map.points[(i + j) % k])?;
        sum += d * d;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Serialize)]
pub struct WirRow {
    pub j: usize,
    pub energy_j: f64,
    /// `E_1 / E_j`; `None` when `E_j` vanishes (the inequality is then
    /// trivially satisfied).
    pub ratio: Option<f64>,
    /// Sharp lower bound `W(k,1) / W_ref(k,j)` the ratio must reach.
    pub bound: f64,
    /// The unadjusted `W(k,1) / W(k,j)` for reference.
    pub raw_bound: f64,
    pub pass: bool,
    pub equality: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WirReport {
    pub k: usize,
    pub energy_1: f64,
    /// Whether the map is the restriction of an affine map of the plane to
    /// the k-th roots of unity (Euclidean targets only).
    pub affine_circle: Option<bool>,
    pub rows: Vec<WirRow>,
    pub all_pass: bool,
}

const WIR_TOL: f64 = 1e-9;

/// Checks the cycle inequalities `E_1 / E_j >= W(k,1) / W_ref(k,j)` for a
/// nonconstant map of the k-cycle, `k >= 4`.
pub fn wir_check(map: &VertexMap) -> Result<WirReport, WirtingerError> {
    let k = map.points.len();
    if k < 4 {
        return Err(WirtingerError::BadParameter(format!(
            "wirtinger check needs k >= 4, got {k}"
        )));
    }
    let e1 = distance_j_energy(map, 1)?;
    if e1 <= 1e-24 {
        return Err(WirtingerError::ConstantMap);
    }
    let w1 = wirtinger_constant(k, 1)?;
    let mut rows = Vec::new();
    let mut all_pass = true;
    for j in 1..=(k / 2) {
        let ej = distance_j_energy(map, j)?;
        let wref = wirtinger_reference(k, j)?;
        let wraw = wirtinger_constant(k, j)?;
        let bound = w1 / wref;
        let raw_bound = w1 / wraw;
        let (ratio, pass, equality) = if ej <= 1e-24 {
            (None, true, false)
        } else {
            let r = e1 / ej;
            // Cross-multiplied comparison avoids blowups for tiny E_j.
            let pass = e1 * wref >= w1 * ej - WIR_TOL * (e1 * wref).max(w1 * ej).max(1.0);
            let equality =
                (e1 * wref - w1 * ej).abs() <= WIR_TOL * (e1 * wref).max(w1 * ej).max(1.0);
            (Some(r), pass, equality)
        };
        all_pass &= pass;
        rows.push(WirRow {
            j,
            energy_j: ej,
            ratio,
            bound,
            raw_bound,
            pass,
            equality,
        });
    }
    let affine_circle = match &map.space {
        TargetSpace::Euclidean { dim } => Some(is_affine_circle(map, k, *dim)),
        _ => None,
    };
    Ok(WirReport {
        k,
        energy_1: e1,
        affine_circle,
        rows,
        all_pass,
    })
}

/// Whether the map is (to 1e-9 relative) the restriction of an affine map
/// of the plane to the k-th roots of unity, i.e. supported on the Fourier
/// modes {constant, cos, sin}. These maps realize equality in every cycle
/// inequality.
fn is_affine_circle(map: &VertexMap, k: usize, dim: usize) -> bool {
    let coords: Vec<&[f64]> = map
        .points
        .iter()
        .map(|p| match p {
            cat0::TargetPoint::Euclidean { coords } => coords.as_slice(),
            _ => unreachable!("euclidean map"),
        })
        .collect();
    let mut residual = 0.0;
    let mut norm = 0.0;
    for c in 0..dim {
        let mut a0 = 0.0;
        let mut ac = 0.0;
        let mut asn = 0.0;
        for (i, row) in coords.iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            a0 += row[c];
            ac += row[c] * t.cos();
            asn += row[c] * t.sin();
        }
        a0 /= k as f64;
        ac *= 2.0 / k as f64;
        asn *= 2.0 / k as f64;
        for (i, row) in coords.iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            let fit = a0 + ac * t.cos() + asn * t.sin();
            residual += (row[c] - fit) * (row[c] - fit);
            norm += row[c] * row[c];
        }
    }
    residual <= 1e-18 * norm.max(1e-12)
}

/// The certified lower bound `1/2 |1 - e^{2 i pi / k}|^2` on the all-pairs
/// spectral quantity of the k-cycle over any target satisfying the cycle
/// inequalities.
pub fn gromov_cycle_bound(k: usize) -> Result<f64, WirtingerError> {
    if k < 4 {
        return Err(WirtingerError::BadParameter(format!(
            "cycle bound needs k >= 4, got {k}"
        )));
    }
    Ok(1.0 - (2.0 * std::f64::consts::PI / k as f64).cos())
}

/// A family of closed vertex walks of length at most `k` on a host graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoopFamily {
    pub k: usize,
    pub loops: Vec<Vec<usize>>,
}

impl LoopFamily {
    fn validate(&self, host: &WeightedGraph) -> Result<(), WirtingerError> {
        for (index, l) in self.loops.iter().enumerate() {
            if l.len() < 3 {
                return Err(WirtingerError::BadLoop {
                    index,
                    reason: "loop shorter than 3".into(),
                });
            }
            if l.len() > self.k {
                return Err(WirtingerError::BadLoop {
                    index,
                    reason: format!("loop length {} exceeds the cap k = {}", l.len(), self.k),
                });
            }
            for i in 0..l.len() {
                let a = l[i];
                let b = l[(i + 1) % l.len()];
                if a >= host.vertex_count() || b >= host.vertex_count() {
                    return Err(WirtingerError::BadLoop {
                        index,
                        reason: "vertex out of range".into(),
                    });
                }
                if a == b || !host.neighbors(a).iter().any(|&(y, _)| y == b) {
                    return Err(WirtingerError::BadLoop {
                        index,
                        reason: format!("consecutive vertices {a}, {b} not adjacent"),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopFamilyReport {
    pub edge_count: usize,
    pub max_valence: f64,
    /// Minimum over vertex pairs of the number of family loops containing
    /// both; 0 makes the bound vacuous.
    pub r_pair_cover: usize,
    /// Maximum over edges of the family traversal count.
    pub q_edge_cover: usize,
    pub k: usize,
    pub bound: f64,
    pub vacuous: bool,
    pub exceeds_half: bool,
}

/// The averaging bound `(4 A r / (q k v^2)) * 1/2 |1 - e^{2 i pi / k}|^2`
/// from a family of short loops; vacuous families are reported, not
/// rejected.
pub fn loop_family_certificate(
    host: &WeightedGraph,
    family: &LoopFamily,
) -> Result<LoopFamilyReport, WirtingerError> {
    if family.loops.is_empty() {
        return Err(WirtingerError::BadParameter("empty loop family".into()));
    }
    if !host.is_connected() {
        return Err(WirtingerError::Disconnected);
    }
    if host.edge_items().iter().any(|e| (e.weight - 1.0).abs() > 1e-12) {
        return Err(WirtingerError::NonUniformHost);
    }
    family.validate(host)?;
    let n = host.vertex_count();
    let a_edges = host.edge_items().len();
    let max_valence = (0..n).map(|x| host.vertex_weight(x)).fold(0.0, f64::max);

    let mut pair_cover = vec![0usize; n * n];
    for l in &family.loops {
        let mut verts: Vec<usize> = l.clone();
        verts.sort_unstable();
        verts.dedup();
        for (i, &u) in verts.iter().enumerate() {
            for &v in &verts[i + 1..] {
                pair_cover[u * n + v] += 1;
            }
        }
    }
    let mut r = usize::MAX;
    for u in 0..n {
        for v in (u + 1)..n {
            r = r.min(pair_cover[u * n + v]);
        }
    }

    let mut edge_cover: std::collections::BTreeMap<(usize, usize), usize> =
        std::collections::BTreeMap::new();
    for l in &family.loops {
        for i in 0..l.len() {
            let (a, b) = (l[i], l[(i + 1) % l.len()]);
            let key = if a <= b { (a, b) } else { (b, a) };
            *edge_cover.entry(key).or_insert(0) += 1;
        }
    }
    let q = edge_cover.values().copied().max().unwrap_or(0);

    let k = family.k;
    let gap = 1.0 - (2.0 * std::f64::consts::PI / k as f64).cos();
    let bound = if r == 0 || q == 0 {
        0.0
    } else {
        (4.0 * a_edges as f64 * r as f64) / (q as f64 * k as f64 * max_valence * max_valence) * gap
    };
    Ok(LoopFamilyReport {
        edge_count: a_edges,
        max_valence,
        r_pair_cover: r,
        q_edge_cover: q,
        k,
        bound,
        vacuous: r == 0,
        exceeds_half: bound > 0.5,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AveragedReport {
    pub k: usize,
    pub counts: Vec<usize>,
    pub max_valence: f64,
    pub total_vertex_weight: f64,
    pub bound: f64,
}

/// The distance-regular averaging bound: families of isometrically
/// embedded k-cycles with every distance-j pair in exactly `N_j` cycles
/// give
/// `lambda = [ (v^2 / m(0)) N_1 sum_j W(k,j) / (N~_j W(k,1)) ]^{-1}`
/// with `N~_j = N_j` below the antipodal class and `2 N_{k/2}` on it.
pub fn averaged_regular_certificate(
    host: &WeightedGraph,
    cycles: &[Vec<usize>],
    counts: &[usize],
) -> Result<AveragedReport, WirtingerError> {
    if cycles.is_empty() {
        return Err(WirtingerError::BadParameter("empty cycle family".into()));
    }
    if !host.is_connected() {
        return Err(WirtingerError::Disconnected);
    }
    if host.edge_items().iter().any(|e| (e.weight - 1.0).abs() > 1e-12) {
        return Err(WirtingerError::NonUniformHost);
    }
    let k = cycles[0].len();
    if counts.len() != k / 2 {
        return Err(WirtingerError::BadParameter(format!(
            "expected {} distance-class counts for k = {k}, got {}",
            k / 2,
            counts.len()
        )));
    }
    let n = host.vertex_count();
    let dist = all_pairs_distances(host);
    // Isometric embedding check: cycle distances realize graph distances.
    for (index, c) in cycles.iter().enumerate() {
        if c.len() != k {
            return Err(WirtingerError::BadLoop {
                index,
                reason: format!("cycle length {} differs from k = {k}", c.len()),
            });
        }
        let mut seen = c.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != k {
            return Err(WirtingerError::BadLoop {
                index,
                reason: "repeated vertex".into(),
            });
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let cycdist = (j - i).min(k - (j - i));
                let gd = dist[c[i] * n + c[j]];
                if gd != cycdist {
                    return Err(WirtingerError::BadLoop {
                        index,
                        reason: format!(
                            "not isometrically embedded: vertices {} and {} at cycle distance {cycdist} but graph distance {gd}",
                            c[i], c[j]
                        ),
                    });
                }
            }
        }
    }
    // Distance-regularity of the family: every pair at distance j lies in
    // exactly counts[j-1] cycles.
    let mut cover = vec![0usize; n * n];
    for c in cycles {
        for (i, &u) in c.iter().enumerate() {
            for &v in &c[i + 1..] {
                let (a, b) = if u <= v { (u, v) } else { (v, u) };
                cover[a * n + b] += 1;
            }
        }
    }
    for u in 0..n {
        for v in (u + 1)..n {
            let d = dist[u * n + v];
            if d == usize::MAX {
                return Err(WirtingerError::Disconnected);
            }
            if d == 0 {
                continue;
            }
            if d > k / 2 {
                return Err(WirtingerError::BadParameter(format!(
                    "diameter exceeds k/2: vertices {u} and {v} at distance {d}"
                )));
            }
            let expected = counts[d - 1];
            let found = cover[u * n + v];
            if found != expected {
                return Err(WirtingerError::NotDistanceRegular {
                    u,
                    v,
                    dist: d,
                    found,
                    expected,
                });
            }
        }
    }
    let max_valence = (0..n).map(|x| host.vertex_weight(x)).fold(0.0, f64::max);
    let total = host.total_vertex_weight();
    let w1 = wirtinger_constant(k, 1)?;
    let mut sum = 0.0;
    for j in 1..=(k / 2) {
        let nj = counts[j - 1];
        if nj == 0 {
            return Err(WirtingerError::BadParameter(format!(
                "count N_{j} is zero; the averaging bound is undefined"
            )));
        }
        let ntilde = if 2 * j == k { 2 * nj } else { nj } as f64;
        sum += wirtinger_constant(k, j)? / (ntilde * w1);
    }
    let bound = 1.0 / ((max_valence * max_valence / total) * counts[0] as f64 * sum);
    Ok(AveragedReport {
        k,
        counts: counts.to_vec(),
        max_valence,
        total_vertex_weight: total,
        bound,
    })
}

fn all_pairs_distances(g: &WeightedGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n * n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        dist[s * n + s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in g.neighbors(x) {
                if y != x && dist[s * n + y] == usize::MAX {
                    dist[s * n + y] = dist[s * n + x] + 1;
                    queue.push_back(y);
                }
            }
        }
    }
    dist
}

/// Enumeration cap for cycle search.
pub const CYCLE_ENUM_CAP: usize = 200;

/// All simple cycles of exactly `length` vertices, each reported once with
/// its minimal vertex first and the smaller neighbor second.
pub fn enumerate_cycles(
    g: &WeightedGraph,
    length: usize,
) -> Result<Vec<Vec<usize>>, WirtingerError> {
    let n = g.vertex_count();
    if n > CYCLE_ENUM_CAP {
        return Err(WirtingerError::TooLargeForEnumeration(n, CYCLE_ENUM_CAP));
    }
    if length < 3 {
        return Err(WirtingerError::BadParameter("cycle length >= 3".into()));
    }
    let mut cycles = Vec::new();
    let mut path = Vec::with_capacity(length);
    let mut on_path = vec![false; n];
    for start in 0..n {
        path.push(start);
        on_path[start] = true;
        dfs_cycles(g, start, length, &mut path, &mut on_path, &mut cycles);
        on_path[start] = false;
        path.pop();
    }
    Ok(cycles)
}

fn dfs_cycles(
    g: &WeightedGraph,
    start: usize,
    length: usize,
    path: &mut Vec<usize>,
    on_path: &mut Vec<bool>,
    cycles: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().unwrap();
    if path.len() == length {
        // Close the cycle; canonical direction keeps path[1] < path[last].
        if path[1] < path[length - 1] && g.neighbors(last).iter().any(|&(y, _)| y == start) {
            cycles.push(path.clone());
        }
        return;
    }
    for &(y, _) in g.neighbors(last) {
        if y <= start || on_path[y] {
            continue;
        }
        path.push(y);
        on_path[y] = true;
        dfs_cycles(g, start, length, path, on_path, cycles);
        on_path[y] = false;
        path.pop();
    }
}
